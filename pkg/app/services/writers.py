import csv
import logging
from collections.abc import Iterable, Sequence
from enum import Enum
from typing import TextIO

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel

from app.utils import format_float

logger = logging.getLogger(__name__)


def format_cell(value: object) -> str:
    """CSV text for one value: floats with 9 significant digits, enums by value."""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, float | np.floating):
        return format_float(float(value))
    return str(value)


def write_rows(stream: TextIO, header: Sequence[str], rows: Iterable[Sequence[object]]) -> int:
    """Write a header row and data rows; returns the number of data rows."""
    writer = csv.writer(stream)
    writer.writerow(header)
    count = 0
    for row in rows:
        writer.writerow([format_cell(value) for value in row])
        count += 1
    return count


def write_models(stream: TextIO, model_type: type[BaseModel], models: Iterable[BaseModel]) -> int:
    """One CSV row per model, columns named and ordered as the model's fields."""
    header = list(model_type.model_fields)
    count = write_rows(
        stream,
        header,
        ([getattr(model, name) for name in header] for model in models),
    )
    logger.debug(f"Wrote {count} {model_type.__name__} rows")
    return count


def write_grid(
    stream: TextIO,
    values: npt.NDArray[np.float64],
    psi: npt.NDArray[np.float64],
    omega: npt.NDArray[np.float64],
    value_name: str = "energy",
) -> int:
    """Long-format grid: one (psi, omega, value) row per cell, psi-major."""
    return write_rows(
        stream,
        ["psi", "omega", value_name],
        (
            (float(p), float(o), float(values[i, j]))
            for i, p in enumerate(psi)
            for j, o in enumerate(omega)
        ),
    )
