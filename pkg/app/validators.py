import math

from app.exceptions import PartitionError
from app.utils import normalize_angle, wrap_cosine


class Params:
    """Numerical guards shared by the domain types and services."""

    unit_tolerance = 1e-12

    # Distances below these are rejected (meters)
    coincident_distance_m = 1e-9
    uav_min_distance_m = 1.0
    far_field_min_distance_m = 10.0

    max_abs_sin_elevation = 0.95

    # Fraction of the matched projection norm below which a direction
    # counts as unseen by the sensing matrix
    projection_floor = 1e-6

    divergence_patience = 5
    min_step_fraction = 1e-6


def validate_finite(value: float) -> float:
    """Validate that a real value is finite.

    Args:
        value: The value to validate

    Returns:
        float: The validated value

    Raises:
        ValueError: If value is NaN or infinite

    """
    if not math.isfinite(value):
        raise ValueError(f"Value must be finite, got {value}")
    return value


def validate_angle(value: float) -> float:
    """Validate an angle in radians and normalize it onto (-pi, pi].

    Args:
        value: Angle in radians

    Returns:
        float: The normalized angle

    Raises:
        ValueError: If the angle is not finite

    """
    return normalize_angle(validate_finite(value))


def validate_cosine_angle(value: float) -> float:
    """Validate a cosine angle and wrap it onto [-1, 1).

    A value of exactly +1 becomes -1: both steer the same beam.

    Args:
        value: Cosine angle

    Returns:
        float: The wrapped cosine angle

    Raises:
        ValueError: If the value is not finite

    """
    return float(wrap_cosine(validate_finite(value)))


def validate_non_negative(value: float) -> float:
    """Validate that a value is finite and not negative."""
    if validate_finite(value) < 0:
        raise ValueError(f"Value must be non-negative, got {value}")
    return value


def validate_positive(value: float) -> float:
    """Validate that a value is finite and strictly positive."""
    if validate_finite(value) <= 0:
        raise ValueError(f"Value must be positive, got {value}")
    return value


def validate_partition(n_axis: int, n_subarrays: int) -> int:
    """Validate that ``n_subarrays`` splits an array axis into equal blocks.

    Args:
        n_axis: Number of elements along the axis
        n_subarrays: Requested number of sub-arrays

    Returns:
        int: The sub-array length

    Raises:
        PartitionError: If the partition is not exact

    """
    if n_subarrays < 1 or n_axis % n_subarrays:
        raise PartitionError(
            f"{n_subarrays} sub-arrays do not divide an axis of {n_axis} elements",
        )
    return n_axis // n_subarrays
