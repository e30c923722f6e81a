import math
import sys
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import TextIO

import numpy as np
import numpy.typing as npt

FloatLike = float | npt.NDArray[np.float64]


def wrap_cosine(value: FloatLike) -> FloatLike:
    """Map a cosine angle onto the period-2 interval [-1, 1).

    Values already inside the interval are returned unchanged.
    """
    array = np.asarray(value, dtype=float)
    wrapped = np.mod(array + 1.0, 2.0) - 1.0
    # The remainder of a tiny negative number can round up to the modulus
    wrapped = np.where(wrapped >= 1.0, -1.0, wrapped)
    result = np.where((array >= -1.0) & (array < 1.0), array, wrapped)
    if result.ndim == 0:
        return float(result)
    return result


def normalize_angle(value: float) -> float:
    """Map an angle in radians onto (-pi, pi]."""
    turns = math.ceil((value - math.pi) / (2 * math.pi))
    return value - 2 * math.pi * turns


def dbm_to_watts(value_dbm: FloatLike) -> FloatLike:
    """Convert power from dBm to watts."""
    if np.ndim(value_dbm):
        return 10.0 ** ((np.asarray(value_dbm, dtype=float) - 30.0) / 10.0)
    return 10.0 ** ((float(value_dbm) - 30.0) / 10.0)


def watts_to_dbm(value_w: FloatLike) -> FloatLike:
    """Convert power from watts to dBm."""
    if np.ndim(value_w):
        return 10.0 * np.log10(np.asarray(value_w, dtype=float)) + 30.0
    return 10.0 * math.log10(float(value_w)) + 30.0


def trial_seed_sequence(seed: int, trial: int, *stream: int) -> np.random.SeedSequence:
    """Seed sequence for one trial and optional sub-stream.

    Streams depend only on ``(seed, trial, stream)``, never on execution order,
    so serial and parallel runs draw identical numbers.
    """
    return np.random.SeedSequence(seed, spawn_key=(trial, *stream))


def trial_rng(seed: int, trial: int, *stream: int) -> np.random.Generator:
    """Random generator for one trial and optional sub-stream."""
    return np.random.default_rng(trial_seed_sequence(seed, trial, *stream))


def format_float(value: float) -> str:
    """Render a float with nine significant digits for CSV output."""
    return format(value, ".9g")


@contextmanager
def open_output(path: Path | None) -> Iterator[TextIO]:
    """Text stream for CSV output: the given file, or stdout when ``path`` is None."""
    if path is None:
        yield sys.stdout
        return
    with path.open("w", newline="") as stream:
        yield stream
