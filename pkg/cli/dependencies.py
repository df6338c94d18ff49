"""
Plumbing shared by the command handlers: argument validation into a
RunConfig, output sinks, the CSV dialect and the grid executor.
"""

import argparse
import csv
import logging
import sys
from collections.abc import Callable, Iterable, Iterator, Sequence
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from typing import Any, TextIO, TypeVar

import numpy as np

from schemas.matrix_schemas import GaussianState, SymMatrix
from schemas.run_schemas import Command, OutputFormat, RunConfig
from schemas.state_schemas import BondSpec
from services.cm_io import format_number, write_cm
from services.entanglement_analysis import squeezing_db

logger = logging.getLogger(__name__)

CSV_DIGITS = 12

T = TypeVar("T")
R = TypeVar("R")


def get_run_config(command: Command, args: argparse.Namespace) -> RunConfig:
    """Validate parsed arguments; unset flags fall back to the RunConfig defaults."""
    fields: dict[str, Any] = {
        name: value
        for name, value in vars(args).items()
        if name in RunConfig.model_fields and name != "command" and value is not None
    }
    if isinstance(fields.get("bond"), str):
        fields["bond"] = BondSpec.parse(fields["bond"])
    return RunConfig(command=command, **fields)


@contextmanager
def open_sink(config: RunConfig) -> Iterator[TextIO]:
    if config.output is None:
        yield sys.stdout
        return
    with open(config.output, "w", newline="", encoding="utf-8") as stream:
        yield stream
    logger.info("[%s]: wrote %s", config.command.value, config.output)


def format_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool | np.bool_):
        return "true" if value else "false"
    if isinstance(value, float | np.floating):
        return format_number(value, CSV_DIGITS)
    return str(value)


def run_metadata(config: RunConfig) -> dict[str, str]:
    """`# key=value` lines for --header; never written unless asked for."""
    meta = {"command": config.command.value}
    for name in ("n", "x", "s", "tol"):
        value = getattr(config, name)
        if value is not None:
            meta[name] = format_cell(value)
    meta["bond"] = config.bond.label()
    if config.bond.r is not None:
        levels = squeezing_db(config.bond.r)
        meta["bond_db_variance"] = format_cell(levels.variance_ratio_db)
        meta["bond_db_cosh"] = format_cell(levels.cosh_db)
    for name in ("x_grid", "d_grid", "k_list"):
        values = getattr(config, name)
        if values:
            meta[name] = " ".join(format_cell(v) for v in values)
    return meta


class CsvTable:
    """Comma-separated rows with a header row, 12 significant digits."""

    def __init__(self, stream: TextIO, columns: Sequence[str], metadata: dict[str, str] | None = None):
        for key, value in (metadata or {}).items():
            stream.write(f"# {key}={value}\n")
        self._writer = csv.writer(stream, lineterminator="\n")
        self._writer.writerow(columns)
        self.width = len(columns)

    def row(self, *values: Any) -> None:
        if len(values) != self.width:
            raise ValueError(f"Row has {len(values)} cells, the table {self.width} columns.")
        self._writer.writerow([format_cell(v) for v in values])


def open_table(stream: TextIO, config: RunConfig, columns: Sequence[str]) -> CsvTable:
    return CsvTable(stream, columns, run_metadata(config) if config.header else None)


def write_matrix(stream: TextIO, m: SymMatrix | GaussianState, config: RunConfig, *, prefix: str = "m") -> None:
    """Matrix-text by default, or CSV rows `row, m_0 .. m_{d-1}` with --format csv."""
    if config.output_format(OutputFormat.MATRIX_TEXT) is OutputFormat.MATRIX_TEXT:
        write_cm(m, stream)
        return
    entries = m.entries
    table = open_table(stream, config, ["row", *(f"{prefix}_{j}" for j in range(entries.shape[1]))])
    for i, values in enumerate(entries):
        table.row(i, *(float(v) for v in values))


def run_grid(func: Callable[[T], R], items: Iterable[T], workers: int = 1) -> list[R]:
    """Map over grid points, in input order whatever the worker count."""
    points = list(items)
    if workers <= 1 or len(points) <= 1:
        return [func(p) for p in points]
    logger.debug("[grid]: %d points on %d workers", len(points), workers)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, points))
