import logging
import math
from collections.abc import Iterable

import numpy as np
from scipy.special import xlogy

from config import numerics
from schemas.analysis_schemas import EntanglementRecord, PortEntanglement, SqueezingLevels, ThresholdResult
from schemas.matrix_schemas import GaussianState
from schemas.state_schemas import BondSpec, BuildingBlockParams, RingSpec, s_min
from services.errors import (
    BrokenSymmetry,
    IndexOutOfRange,
    NonPositiveEta,
    NoThreshold,
    Unphysical,
    WrongModeCount,
)
from services.gaussian_states import building_block, partial_transpose, reduce
from services.mps_builder import build_mps
from services.symplectic_core import check_modes, symplectic_eigenvalues, symplectic_eigenvalues_eig

logger = logging.getLogger(__name__)

_LN2 = math.log(2)


def _mode_blocks(g: GaussianState) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-mode blocks A, B and cross block C of a two-mode CM stored as (q0, q1, p0, p1)."""
    if g.n_modes != 2:
        raise WrongModeCount(f"Expected a two-mode state, got {g.n_modes} modes.")
    e = g.entries
    first, second = [0, 2], [1, 3]
    return e[np.ix_(first, first)], e[np.ix_(second, second)], e[np.ix_(first, second)]


def ppt_eta_eig(g: GaussianState) -> float:
    """Smallest symplectic eigenvalue of the partial transpose, by direct eigensolve."""
    if g.n_modes != 2:
        raise WrongModeCount(f"Expected a two-mode state, got {g.n_modes} modes.")
    return float(symplectic_eigenvalues_eig(partial_transpose(g, [1])).min())


def ppt_eta(g: GaussianState) -> float:
    """
    Smallest symplectic eigenvalue of the partially transposed two-mode CM from
    the invariants: with D = det A + det B - 2 det C,
    eta^2 = (D - sqrt(D^2 - 4 det G)) / 2 = 2 det G / (D + sqrt(D^2 - 4 det G)).
    """
    a, b, c = _mode_blocks(g)
    delta = np.linalg.det(a) + np.linalg.det(b) - 2 * np.linalg.det(c)
    det = np.linalg.det(g.entries)
    disc = math.sqrt(max(delta * delta - 4 * det, 0.0))
    eta = math.sqrt(max(2 * det / (delta + disc), 0.0))

    reference = ppt_eta_eig(g)
    if abs(reference - eta) > 1e-8 * max(1.0, eta):
        logger.warning("[ppt]: invariant eta %.12g and eigensolver eta %.12g disagree.", eta, reference)
    return eta


def eof(eta: float) -> float:
    """
    Entanglement of formation (ebits) of a symmetric two-mode Gaussian state,
    max{0, f(eta)} with
    f(x) = (1+x)^2/(4x) log2((1+x)^2/(4x)) - (1-x)^2/(4x) log2((1-x)^2/(4x)).
    """
    if not eta > 0:
        raise NonPositiveEta(f"eta = {eta} must be positive.")
    if eta >= 1:
        return 0.0
    plus = (1 + eta) ** 2 / (4 * eta)
    minus = (1 - eta) ** 2 / (4 * eta)
    return max(0.0, float(xlogy(plus, plus) - xlogy(minus, minus)) / _LN2)


def _entropy_term(nu: np.ndarray) -> np.ndarray:
    plus = (nu + 1) / 2
    minus = np.clip((nu - 1) / 2, 0, None)
    return (xlogy(plus, plus) - xlogy(minus, minus)) / _LN2


def block_entropy(g: GaussianState, modes: Iterable[int]) -> float:
    """Von Neumann entropy (bits) of the reduction to `modes`, a nonempty proper subset."""
    selected = check_modes(modes, g.n_modes)
    if len(selected) >= g.n_modes:
        raise IndexOutOfRange("block_entropy needs a proper subset of the modes.")
    nu = symplectic_eigenvalues(reduce(g, selected).cm)
    return float(np.sum(_entropy_term(np.clip(nu, 1, None))))


def block_entropies(g: GaussianState) -> list[float]:
    """Entropy of the contiguous blocks {0..K-1}, K = 1..N-1."""
    return [block_entropy(g, range(k)) for k in range(1, g.n_modes)]


def local_purity(g: GaussianState, mode: int) -> float:
    single = reduce(g, [mode])
    return float(np.linalg.det(single.entries) ** -0.5)


def ring_separation(i: int, j: int, n: int) -> int:
    d = abs(i - j) % n
    return min(d, n - d)


def pair_eta(g: GaussianState, i: int, j: int) -> float:
    return ppt_eta(reduce(g, [i, j]))


def _check_pair_symmetry(pair: GaussianState, tol: float) -> None:
    a, b, _ = _mode_blocks(pair)
    det_a, det_b = np.linalg.det(a), np.linalg.det(b)
    if abs(det_a - det_b) > tol * max(1.0, abs(det_a)):
        raise BrokenSymmetry(
            f"Pair is not symmetric (single-mode determinants {det_a:.9g} and {det_b:.9g}); "
            "its E_F is not defined here."
        )


def distribution(
    g: GaussianState,
    *,
    decision_tol: float | None = None,
    symmetry_tol: float | None = None,
) -> list[EntanglementRecord]:
    """One record per unordered pair of ring modes, sorted by separation then i."""
    decision_tol = numerics.decision_tol if decision_tol is None else decision_tol
    symmetry_tol = numerics.symmetry_tol if symmetry_tol is None else symmetry_tol
    n = g.n_modes
    if n < 2:
        raise WrongModeCount("A distribution needs at least two modes.")
    # no comparison can be finer than the accuracy the CM carries
    floor = g.tolerance(0.0)
    symmetry_tol = max(symmetry_tol, floor)

    records = []
    for i in range(n):
        for j in range(i + 1, n):
            pair = reduce(g, [i, j])
            _check_pair_symmetry(pair, max(numerics.pair_symmetry_tol, floor))
            eta = ppt_eta(pair)
            entangled = eta < 1 - decision_tol
            records.append(
                EntanglementRecord(
                    i=i,
                    j=j,
                    separation=ring_separation(i, j, n),
                    eta=eta,
                    eof=eof(eta) if entangled else 0.0,
                    entangled=entangled,
                )
            )
    records.sort(key=lambda r: (r.separation, r.i, r.j))

    for sep in {r.separation for r in records}:
        etas = [r.eta for r in records if r.separation == sep]
        spread = max(etas) - min(etas)
        if spread > symmetry_tol:
            raise BrokenSymmetry(f"State is not translation invariant: eta spread {spread:.2e} at separation {sep}.")
    return records


def by_separation(records: list[EntanglementRecord]) -> list[EntanglementRecord]:
    """First record of each separation class."""
    seen: dict[int, EntanglementRecord] = {}
    for r in records:
        seen.setdefault(r.separation, r)
    return [seen[k] for k in sorted(seen)]


def separation_eta(spec: RingSpec, k: int) -> float:
    return pair_eta(build_mps(spec), 0, k)


def threshold(
    k: int,
    x: float,
    n_sites: int,
    bond: BondSpec,
    *,
    width: float | None = None,
    s_cap: float | None = None,
) -> ThresholdResult:
    """
    Smallest s at which modes k sites apart become entangled, by bisection on
    eta_{0,k}(s) = 1. The upper end starts at 2 s_min and doubles until the pair
    is entangled; eta is nonincreasing in s, so the bracket stays valid.
    """
    width = numerics.bisection_width if width is None else width
    s_cap = numerics.s_cap if s_cap is None else s_cap
    if not 1 <= k <= n_sites // 2:
        raise IndexOutOfRange(f"Separation k = {k} is outside 1..{n_sites // 2} for N = {n_sites}.")
    lo = s_min(x)

    def eta_at(s: float) -> float:
        return separation_eta(RingSpec(n_sites=n_sites, block=BuildingBlockParams(s=s, x=x), bond=bond), k)

    def result(s_k: float, bracket: tuple[float, float]) -> ThresholdResult:
        return ThresholdResult(
            k=k, x=x, n_sites=n_sites, bond=bond, s_k=s_k, bracket=bracket, residual=abs(eta_at(s_k) - 1)
        )

    if k == 1:
        return result(lo, (lo, lo))
    if not x > 1:
        raise Unphysical("x = 1 gives a product state; thresholds need x > 1.")

    if eta_at(lo) < 1:
        logger.info("[threshold k=%d]: already entangled at s_min = %g.", k, lo)
        return result(lo, (lo, lo))

    hi = 2 * lo
    while eta_at(hi) >= 1:
        lo = hi
        hi *= 2
        if hi > s_cap:
            raise NoThreshold(
                f"Separation {k} stays separable up to s = {s_cap:g} (x = {x:g}, N = {n_sites}, bond = {bond.label()})."
            )

    steps = 0
    while hi - lo > width:
        mid = (lo + hi) / 2
        if eta_at(mid) < 1:
            hi = mid
        else:
            lo = mid
        steps += 1
    s_k = (lo + hi) / 2
    logger.debug("[threshold k=%d]: x = %g, s_k = %.10g after %d bisection steps.", k, x, s_k, steps)
    return result(s_k, (lo, hi))


def squeezing_db(r: float) -> SqueezingLevels:
    """Bond squeezing in dB, as variance ratio e^{2r} and as cosh 2r."""
    if not r >= 0:
        raise Unphysical(f"Squeezing r = {r} must be nonnegative.")
    return SqueezingLevels(
        r=r,
        variance_ratio_db=20 * r / math.log(10),
        cosh_db=10 * math.log10(math.cosh(2 * r)),
    )


def port_entanglement(p: BuildingBlockParams) -> PortEntanglement:
    block = building_block(p)
    eta_ss = ppt_eta(reduce(block, [0, 1]))
    return PortEntanglement(
        eta_ss=eta_ss,
        eta_sx=ppt_eta(reduce(block, [0, 2])),
        eof_ss=eof(eta_ss),
    )


def nearest_neighbor_asymptote(n_sites: int) -> float:
    """eta_{i,i+1} at s = s_min as x -> inf: (N-2)/N for even N, its square root for odd N."""
    if n_sites < 3:
        raise Unphysical(f"A ring needs at least 3 sites, got {n_sites}.")
    ratio = (n_sites - 2) / n_sites
    return ratio if n_sites % 2 == 0 else math.sqrt(ratio)
