import logging
from functools import partial

from cli.dependencies import open_sink, open_table, run_grid
from schemas.run_schemas import RunConfig
from schemas.state_schemas import BondSpec, BuildingBlockParams, RingSpec
from services.cm_io import read_cm
from services.entanglement_analysis import by_separation, distribution, threshold
from services.errors import NoThreshold
from services.mps_builder import build_mps

logger = logging.getLogger(__name__)


def cmd_distribution(config: RunConfig) -> None:
    """One row per separation class of a built ring, or of a CM read with --from-file."""
    if config.from_file:
        state = read_cm(config.from_file)
        logger.info("[distribution]: analyzing %d-mode CM from %s", state.n_modes, config.from_file)
    else:
        state = build_mps(config.ring)
    records = by_separation(distribution(state, decision_tol=config.tol))

    with open_sink(config) as out:
        table = open_table(out, config, ["separation", "eta", "eof", "entangled"])
        for r in records:
            table.row(r.separation, r.eta, r.eof, r.entangled)


def _threshold_point(point: tuple[int, float], n_sites: int, bond: BondSpec) -> float | None:
    k, x = point
    if x <= 1 and 2 <= k <= n_sites // 2:
        logger.warning("[threshold k=%d]: x = 1 is a product state; no threshold.", k)
        return None
    try:
        return threshold(k, x, n_sites, bond).s_k
    except NoThreshold as e:
        logger.warning("[threshold k=%d]: %s", k, e.detail)
        return None


def cmd_thresholds(config: RunConfig) -> None:
    """s_k over the x grid for each requested separation; an empty s_k means none below s_cap."""
    config.require("n", "x_grid")
    assert config.n is not None
    k_list = config.k_list or tuple(range(1, config.n // 2 + 1))
    points = [(k, x) for k in k_list for x in config.x_grid]
    values = run_grid(partial(_threshold_point, n_sites=config.n, bond=config.bond), points, config.workers)

    with open_sink(config) as out:
        table = open_table(out, config, ["k", "x", "s_k"])
        for (k, x), s_k in zip(points, values, strict=True):
            table.row(k, x, s_k)


def _eof_point(point: tuple[float, float], n_sites: int, bond: BondSpec) -> list[tuple[int, float]]:
    x, d = point
    spec = RingSpec(n_sites=n_sites, block=BuildingBlockParams.at_offset(x, d), bond=bond)
    return [(r.separation, r.eof) for r in by_separation(distribution(build_mps(spec)))]


def cmd_scan_eof(config: RunConfig) -> None:
    """E_F per separation over the (x, d = s - s_min) grid."""
    config.require("n", "x_grid", "d_grid")
    assert config.n is not None
    points = [(x, d) for x in config.x_grid for d in config.d_grid]
    values = run_grid(partial(_eof_point, n_sites=config.n, bond=config.bond), points, config.workers)

    with open_sink(config) as out:
        table = open_table(out, config, ["x", "d", "k", "eof"])
        for (x, d), per_k in zip(points, values, strict=True):
            for k, e in per_k:
                table.row(x, d, k, e)
