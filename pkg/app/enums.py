from enum import Enum


class Side(str, Enum):
    """Link end an array or beamformer belongs to."""

    bs = "bs"
    uav = "uav"


class Method(str, Enum):
    """AoA acquisition methods compared by the experiments."""

    nav_only = "nav-only"
    fully_random = "fully-random"
    partial_type1 = "partial-type1"
    partial_type2 = "partial-type2"

    @property
    def is_training(self) -> bool:
        """Whether the method spends measurements on beam training."""
        return self is not Method.nav_only


class BeamformingScheme(str, Enum):
    """Which angle sources drive the BS and UAV beams in the path-loss study."""

    true_both = "scheme1"
    nav_bs_true_uav = "scheme2"
    nav_both = "scheme3"


class EnvironmentTypes(Enum):
    development = "development"
    testing = "testing"
    production = "production"
