import logging
from collections.abc import Iterable, Sequence
from pathlib import Path

import numpy as np

from app.exceptions import CodebookFormatError
from app.schemas.geometry import AoaPair, UpaGeometry
from app.schemas.jitter import AoaDistribution
from app.schemas.sensing import CodebookEntry, SensingMatrix, SensingSpec
from app.services.sensing import sensing_matrix
from app.utils import trial_rng, wrap_cosine

logger = logging.getLogger(__name__)

MAGIC = b"UAVBTCBK"
VERSION = 2

HEADER_DTYPE = np.dtype(
    [
        ("magic", "S8"),
        ("version", "<u4"),
        ("nx", "<u4"),
        ("ny", "<u4"),
        ("n", "<u4"),
        ("n_a", "<u4"),
        ("w", "<f8"),
        ("psi", "<f8"),
        ("omega", "<f8"),
        ("seed", "<i8"),
        ("stream", "<u4"),
    ],
)
DATA_DTYPE = np.dtype("<c16")


def generate_codebook(
    uav_geom: UpaGeometry,
    n_measurements: int,
    configurations: Iterable[tuple[int, float]],
    center: AoaPair,
    seed: int,
) -> list[CodebookEntry]:
    """Draw one sensing matrix per ``(n_subarrays, half_width)`` configuration.

    Entry ``i`` uses the generator stream ``(seed, i)`` and records ``i`` as its stream.
    """
    entries = []
    for index, (n_subarrays, half_width) in enumerate(configurations):
        spec = SensingSpec(
            n_measurements=n_measurements,
            n_subarrays_x=n_subarrays,
            n_subarrays_y=n_subarrays,
            half_width=half_width,
            center=center,
            uav_geom=uav_geom,
        )
        matrix = sensing_matrix(spec, trial_rng(seed, index))
        entries.append(CodebookEntry(matrix=matrix, seed=seed, stream=index))
    logger.info(f"Generated codebook with {len(entries)} sensing matrices")
    return entries


def regenerate_entry(entry: CodebookEntry) -> SensingMatrix:
    """Redraw an entry's sensing matrix from its stored spec, seed and stream."""
    return sensing_matrix(entry.matrix.spec, trial_rng(entry.seed, entry.stream))


def encode_entry(entry: CodebookEntry) -> bytes:
    """Serialize one entry: fixed header, then column-major complex data.

    Raises:
        CodebookFormatError: If the two axes use different sub-array counts

    """
    spec = entry.matrix.spec
    if spec.n_subarrays_x != spec.n_subarrays_y:
        raise CodebookFormatError("Codebook entries need the same sub-array count on both axes")
    header = np.array(
        [
            (
                MAGIC,
                VERSION,
                spec.uav_geom.n_x,
                spec.uav_geom.n_second_axis,
                spec.n_measurements,
                spec.n_subarrays_x,
                spec.half_width,
                spec.center.psi,
                spec.center.omega,
                entry.seed,
                entry.stream,
            ),
        ],
        dtype=HEADER_DTYPE,
    )
    data = np.asarray(entry.matrix.columns, dtype=DATA_DTYPE)
    return header.tobytes() + data.tobytes(order="F")


def write_codebook(path: Path, entries: Sequence[CodebookEntry]) -> None:
    """Write entries back to back into a single codebook file."""
    path.write_bytes(b"".join(encode_entry(entry) for entry in entries))
    logger.info(f"Wrote {len(entries)} codebook entries to {path}")


def decode_entries(payload: bytes, wavelength: float) -> list[CodebookEntry]:
    """Parse every entry in a codebook byte string.

    Raises:
        CodebookFormatError: If the payload is truncated or has a bad header

    """
    entries = []
    offset = 0
    while offset < len(payload):
        if len(payload) - offset < HEADER_DTYPE.itemsize:
            raise CodebookFormatError(f"Truncated codebook header at byte {offset}")
        header = np.frombuffer(payload, dtype=HEADER_DTYPE, count=1, offset=offset)[0]
        if header["magic"] != MAGIC:
            raise CodebookFormatError(f"Bad codebook magic at byte {offset}")
        if header["version"] != VERSION:
            raise CodebookFormatError(f"Unsupported codebook version {header['version']}")
        offset += HEADER_DTYPE.itemsize

        nx, ny, n = int(header["nx"]), int(header["ny"]), int(header["n"])
        count = nx * ny * n
        if len(payload) - offset < count * DATA_DTYPE.itemsize:
            raise CodebookFormatError(f"Truncated codebook data at byte {offset}")
        data = np.frombuffer(payload, dtype=DATA_DTYPE, count=count, offset=offset)
        offset += count * DATA_DTYPE.itemsize

        try:
            spec = SensingSpec(
                n_measurements=n,
                n_subarrays_x=int(header["n_a"]),
                n_subarrays_y=int(header["n_a"]),
                half_width=float(header["w"]),
                center=AoaPair(psi=float(header["psi"]), omega=float(header["omega"])),
                uav_geom=UpaGeometry.uav(nx, ny, wavelength),
            )
            matrix = SensingMatrix(
                columns=data.reshape((nx * ny, n), order="F").astype(np.complex128),
                declared_range=spec.declared_range(),
                spec=spec,
            )
        except ValueError as e:
            raise CodebookFormatError(f"Invalid codebook entry: {e}") from e
        entries.append(
            CodebookEntry(
                matrix=matrix,
                seed=int(header["seed"]),
                stream=int(header["stream"]),
            ),
        )
    return entries


def read_codebook(path: Path, wavelength: float) -> list[CodebookEntry]:
    """Load all entries of a codebook file.

    Raises:
        CodebookFormatError: If the file is not a valid codebook

    """
    entries = decode_entries(path.read_bytes(), wavelength)
    logger.info(f"Read {len(entries)} codebook entries from {path}")
    return entries


def covers(entry: CodebookEntry, distribution: AoaDistribution, k: float = 3.0) -> bool:
    """Whether the entry's declared range holds the ``k``-sigma AoA intervals."""
    declared = entry.matrix.declared_range
    offsets = np.abs(wrap_cosine(distribution.mean - declared.center.as_array()))
    reach = offsets + k * distribution.std
    return all(
        half >= 1.0 or r <= half
        for r, half in zip(reach, declared.half_widths, strict=True)
    )


def select_codebook(
    entries: Sequence[CodebookEntry],
    distribution: AoaDistribution,
    k: float = 3.0,
) -> CodebookEntry:
    """Pick the narrowest stored range that still covers the predicted AoA spread.

    Falls back to the widest entry when none covers it.

    Raises:
        ValueError: If ``entries`` is empty

    """
    if not entries:
        raise ValueError("Codebook is empty")

    def area(entry: CodebookEntry) -> float:
        declared = entry.matrix.declared_range
        return declared.width(0) * declared.width(1)

    covering = [entry for entry in entries if covers(entry, distribution, k)]
    if covering:
        return min(covering, key=area)
    logger.warning("No codebook entry covers the predicted AoA spread, using the widest")
    return max(entries, key=area)
