"""
Plain-text covariance matrices: first line is the dimension 2N, followed
by 2N rows of 2N space-separated decimals in all-q-then-all-p order.
"""

from pathlib import Path
from typing import TextIO

import numpy as np

from schemas.matrix_schemas import GaussianState, SymMatrix
from services.errors import WrongModeCount


def format_number(value: float, digits: int = 15) -> str:
    # + 0.0 turns -0.0 into 0.0
    return format(float(value) + 0.0, f".{digits}g")


def format_cm(m: SymMatrix | GaussianState) -> str:
    entries = m.entries
    lines = [str(entries.shape[0])]
    lines += [" ".join(format_number(v) for v in row) for row in entries]
    return "\n".join(lines) + "\n"


def write_cm(m: SymMatrix | GaussianState, stream: TextIO) -> None:
    stream.write(format_cm(m))


def parse_cm(text: str) -> SymMatrix:
    rows = [line.split() for line in text.splitlines() if line.strip() and not line.lstrip().startswith("#")]
    if not rows:
        raise WrongModeCount("Empty covariance matrix file.")
    try:
        dim = int(rows[0][0])
        values = np.array([[float(v) for v in row] for row in rows[1:]])
    except ValueError as e:
        raise WrongModeCount(f"Malformed covariance matrix text: {e}") from e
    if len(rows[0]) != 1 or values.shape != (dim, dim):
        raise WrongModeCount(f"Header announces dimension {rows[0][0]} but the body has shape {values.shape}.")
    if dim % 2:
        raise WrongModeCount(f"Covariance matrix dimension {dim} is odd.")
    return SymMatrix(entries=values)


def read_cm(path: str | Path) -> GaussianState:
    return GaussianState.of(parse_cm(Path(path).read_text()))
