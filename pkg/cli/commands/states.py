import logging

import numpy as np

from cli.dependencies import open_sink, open_table, write_matrix
from config import numerics
from schemas.run_schemas import RunConfig
from services.entanglement_analysis import block_entropies, local_purity, port_entanglement
from services.errors import NumericalError
from services.gaussian_states import building_block
from services.mps_builder import (
    build_mps,
    extract_circulant,
    ground_state_cm,
    long_range_cm,
    potential_matrix,
    translation_residual,
)

logger = logging.getLogger(__name__)


def cmd_block(config: RunConfig) -> None:
    """The 6x6 CM of the three-mode building block."""
    params = config.block
    state = building_block(params)
    logger.info("[block]: det = %.6f", np.linalg.det(state.entries))
    ports = port_entanglement(params)
    logger.info(
        "[block]: eta_ss = %.9g (E_F = %.9g ebits), eta_sx = %.9g",
        ports.eta_ss, ports.eof_ss, ports.eta_sx,
    )
    with open_sink(config) as out:
        write_matrix(out, state, config)


def cmd_build(config: RunConfig) -> None:
    """The N-mode MPS CM."""
    spec = config.ring
    state = build_mps(spec)
    logger.info(
        "[build N=%d]: det = %.9f, translation residual = %.2e",
        spec.n_sites, np.linalg.det(state.entries), translation_residual(state),
    )
    with open_sink(config) as out:
        write_matrix(out, state, config)


def cmd_hamiltonian(config: RunConfig) -> None:
    """
    Rows of the potential matrix V = C^2 of the parent Hamiltonian, each
    carrying the verdict of the ground-state round trip.
    """
    spec = config.ring
    state = build_mps(spec)
    v = potential_matrix(extract_circulant(state))
    deviation = float(np.max(np.abs(ground_state_cm(v).entries - state.entries)))
    verified = deviation <= numerics.roundtrip_tol
    logger.info("[hamiltonian N=%d]: ground-state deviation %.2e", spec.n_sites, deviation)

    with open_sink(config) as out:
        table = open_table(out, config, ["row", *(f"v_{j}" for j in range(spec.n_sites)), "verified"])
        for i, values in enumerate(v.entries):
            table.row(i, *(float(e) for e in values), verified)
    if not verified:
        raise NumericalError(
            f"Ground state of V deviates from the MPS CM by {deviation:.2e} "
            f"(tolerance {numerics.roundtrip_tol:.0e})."
        )


def cmd_longrange(config: RunConfig) -> None:
    """The s -> inf limit CM; mu_loc and block entropies go to the log."""
    config.require("n", "x")
    assert config.n is not None and config.x is not None
    state = long_range_cm(config.n, config.x)
    logger.info("[longrange N=%d]: mu_loc = %.12g", config.n, local_purity(state, 0))
    if config.entropies:
        for k, entropy in enumerate(block_entropies(state), start=1):
            logger.info("[longrange N=%d]: S(%d modes) = %.9g bits", config.n, k, entropy)
    with open_sink(config) as out:
        write_matrix(out, state, config)
