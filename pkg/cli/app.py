"""
Command-line front end. One sub-command per task; data goes to stdout or
--output, diagnostics to the log on stderr.

Exit codes: 0 on success, 2 on invalid input, 3 on numerical failure.
"""

import argparse
import logging
from collections.abc import Callable, Sequence

from pydantic import ValidationError

from cli.commands.analysis import cmd_distribution, cmd_scan_eof, cmd_thresholds
from cli.commands.states import cmd_block, cmd_build, cmd_hamiltonian, cmd_longrange
from cli.dependencies import get_run_config
from schemas.run_schemas import Command, OutputFormat, RunConfig
from services.errors import GmpsError

logger = logging.getLogger(__name__)

HANDLERS: dict[Command, Callable[[RunConfig], None]] = {
    Command.BLOCK: cmd_block,
    Command.BUILD: cmd_build,
    Command.DISTRIBUTION: cmd_distribution,
    Command.THRESHOLDS: cmd_thresholds,
    Command.SCAN_EOF: cmd_scan_eof,
    Command.HAMILTONIAN: cmd_hamiltonian,
    Command.LONGRANGE: cmd_longrange,
}


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="log DEBUG messages")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="log warnings and errors only")
    common.add_argument("--output", "-o", help="write data to this file instead of stdout")
    common.add_argument("--format", choices=[f.value for f in OutputFormat])
    common.add_argument("--header", action="store_true", default=None, help="prefix CSV with # key=value lines")
    return common


def _add_ring(p: argparse.ArgumentParser, *, with_s: bool = True, with_n: bool = True) -> None:
    if with_n:
        p.add_argument("--n", type=int, help="number of ring sites")
        p.add_argument("--allow-large", action="store_true", default=None, help="lift the ring-size cap")
    p.add_argument("--x", type=float, help="local mixedness of the output-port mode")
    if with_s:
        p.add_argument("--s", type=float, help="local mixedness of the input-port modes")


def _add_bond(p: argparse.ArgumentParser) -> None:
    p.add_argument("--bond", default="inf", help='"inf" for EPR bonds or a squeezing parameter r')


def _add_grid(p: argparse.ArgumentParser) -> None:
    p.add_argument("--x-grid", type=float, nargs="+", help="x values")
    p.add_argument("--workers", type=int, help="processes for the grid (default 1)")


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(
        prog="gmps",
        description="Gaussian matrix-product states on harmonic rings and their entanglement distribution.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser(Command.BLOCK.value, parents=[common], help="three-mode building block CM")
    _add_ring(p, with_n=False)

    p = sub.add_parser(Command.BUILD.value, parents=[common], help="N-mode MPS CM")
    _add_ring(p)
    _add_bond(p)

    p = sub.add_parser(Command.DISTRIBUTION.value, parents=[common], help="eta and E_F per separation")
    _add_ring(p)
    _add_bond(p)
    p.add_argument("--tol", type=float, help="eta < 1 - tol counts as entangled")
    p.add_argument("--from-file", help="analyze a CM in matrix-text format instead of building one")

    p = sub.add_parser(Command.THRESHOLDS.value, parents=[common], help="entanglement thresholds s_k(x)")
    p.add_argument("--n", type=int, help="number of ring sites")
    p.add_argument("--allow-large", action="store_true", default=None)
    _add_bond(p)
    _add_grid(p)
    p.add_argument("--k-list", type=int, nargs="+", help="separations (default 1..N/2)")

    p = sub.add_parser(Command.SCAN_EOF.value, parents=[common], help="E_F over an (x, d) grid")
    p.add_argument("--n", type=int, help="number of ring sites")
    p.add_argument("--allow-large", action="store_true", default=None)
    _add_bond(p)
    _add_grid(p)
    p.add_argument("--d-grid", type=float, nargs="+", help="d = s - s_min values")

    p = sub.add_parser(Command.HAMILTONIAN.value, parents=[common], help="parent-Hamiltonian potential V")
    _add_ring(p)
    _add_bond(p)

    p = sub.add_parser(Command.LONGRANGE.value, parents=[common], help="analytic s -> inf limit CM")
    _add_ring(p, with_s=False)
    p.add_argument("--entropies", action="store_true", default=None, help="log contiguous block entropies")
    return parser


def _set_verbosity(args: argparse.Namespace) -> None:
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.getLogger().setLevel(level)


def run(argv: Sequence[str] | None = None) -> int:
    """Parse, validate and dispatch one command; returns the process exit code."""
    args = build_parser().parse_args(argv)
    _set_verbosity(args)
    command = Command(args.command)
    try:
        config = get_run_config(command, args)
        HANDLERS[command](config)
    except ValidationError as e:
        logger.error("[%s]: invalid parameters: %s", command.value, e)
        return 2
    except GmpsError as e:
        logger.error("[%s]: %s", command.value, e.detail)
        return e.exit_code
    return 0
