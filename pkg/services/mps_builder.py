"""
Gaussian matrix-product states on an N-site ring.

Every site carries a copy of the three-mode building block. Its modes 0 and
1 (input port) are projected, together with one half of the neighbouring
bonds each, onto EPR states; the N output-port modes are left in the state

    Gamma_out = Gamma_x - Gamma_sx^T (Gamma_ss + theta Gamma_in theta)^-1 Gamma_sx

which for standard-form blocks is C^-1 (q-sector) + C (p-sector) with C circulant,
the ground state of H = (sum p^2 + q^T V q) / 2 with V = C^2.
"""

import logging
import math

import numpy as np
from scipy import linalg

from config import numerics
from schemas.matrix_schemas import BondLimitForm, ChainAssembly, CirculantPair, GaussianState, SymMatrix
from schemas.state_schemas import BondSpec, RingSpec
from services.errors import NotCirculantForm, NotPositiveDefinite, Unphysical
from services.gaussian_states import building_block
from services.symplectic_core import (
    direct_sum,
    limit_schur_complement,
    mode_indices,
    penalized_schur_complement,
)

logger = logging.getLogger(__name__)


def bond_pairs(n_sites: int, *, swap_ports: bool = False) -> list[tuple[int, int]]:
    """
    Input-port modes joined by each bond. Input-port mode 2i is block mode 0
    of site i and 2i + 1 is block mode 1. Bond i runs from site i to site i + 1:
    by default block mode 0 takes the half of bond (i - 1, i) and block mode 1
    the half of bond (i, i + 1).
    """
    if n_sites < 3:
        raise Unphysical(f"A ring needs at least 3 sites, got {n_sites}.")
    if swap_ports:
        return [(2 * i, 2 * ((i + 1) % n_sites) + 1) for i in range(n_sites)]
    return [(2 * i + 1, 2 * ((i + 1) % n_sites)) for i in range(n_sites)]


def bond_decomposition(n_sites: int, bond: BondSpec, *, swap_ports: bool = False) -> BondLimitForm:
    """
    The bonds as D_finite + lam P on the 2N bond modes, bond mode j being the
    half attached to input-port mode j. P projects onto the squeezed-up
    directions, (q_a + q_b) and (p_a - p_b) of each pair, so
    sigma(r) = e^{2r} P + e^{-2r} (I - P) and the r -> inf limit keeps D_finite = 0.
    """
    m = 2 * n_sites
    p = np.zeros((2 * m, 2 * m))
    for a, b in bond_pairs(n_sites, swap_ports=swap_ports):
        p[np.ix_([a, b], [a, b])] = 0.5
        p[np.ix_([m + a, m + b], [m + a, m + b])] = [[0.5, -0.5], [-0.5, 0.5]]
    projector = SymMatrix(entries=p)
    if bond.is_infinite:
        return BondLimitForm(n_modes=m, d_finite=SymMatrix(entries=np.zeros_like(p)), projector=projector)
    assert bond.r is not None
    d_finite = math.exp(-2 * bond.r) * (np.eye(2 * m) - p)
    return BondLimitForm(
        n_modes=m, d_finite=SymMatrix(entries=d_finite), projector=projector, scale=math.exp(2 * bond.r)
    )


def assemble_bonds(n_sites: int, bond: BondSpec) -> GaussianState | BondLimitForm:
    form = bond_decomposition(n_sites, bond)
    if form.is_limit:
        return form
    assert form.scale is not None
    return GaussianState.of(form.d_finite.entries + form.scale * form.projector.entries)


def assemble_chain(spec: RingSpec) -> ChainAssembly:
    block = building_block(spec.block)
    chain = direct_sum([block.cm] * spec.n_sites)
    n = spec.n_sites
    return ChainAssembly(
        state=GaussianState.of(chain),
        input_modes=tuple(m for i in range(n) for m in (3 * i, 3 * i + 1)),
        output_modes=tuple(3 * i + 2 for i in range(n)),
    )


def build_mps(spec: RingSpec, *, swap_ports: bool = False, cross_check: bool = False) -> GaussianState:
    n = spec.n_sites
    chain = assemble_chain(spec)
    entries = chain.state.entries
    total = 3 * n
    inp = mode_indices(chain.input_modes, total)
    out = mode_indices(chain.output_modes, total)
    gamma_x = entries[np.ix_(out, out)]
    gamma_sx_t = entries[np.ix_(out, inp)]
    gamma_ss = entries[np.ix_(inp, inp)]

    bonds = bond_decomposition(n, spec.bond, swap_ports=swap_ports)
    theta = np.diag(np.r_[np.ones(2 * n), -np.ones(2 * n)])
    projector = theta @ bonds.projector.entries @ theta
    d_finite = gamma_ss + theta @ bonds.d_finite.entries @ theta

    logger.debug("[build N=%d]: s = %g, x = %g, bond = %s", n, spec.block.s, spec.block.x, spec.bond.label())
    if bonds.scale is None:
        result = limit_schur_complement(gamma_x, gamma_sx_t, d_finite, projector)
        if cross_check:
            finite = penalized_schur_complement(
                gamma_x, gamma_sx_t, d_finite, projector, numerics.cross_check_scale
            )
            deviation = float(np.max(np.abs(finite.entries - result.entries)))
            if deviation > numerics.cross_check_tol:
                logger.warning(
                    "[build N=%d]: limit and lam = %.0e evaluations differ by %.2e.",
                    n, numerics.cross_check_scale, deviation,
                )
    else:
        result = penalized_schur_complement(gamma_x, gamma_sx_t, d_finite, projector, bonds.scale)

    # the input block sets the attainable accuracy near s -> inf
    floor = np.finfo(float).eps * np.linalg.cond(gamma_ss)
    try:
        return GaussianState.of(result, accuracy=floor)
    except Unphysical as e:
        raise Unphysical(f"MPS output for N = {n} is unphysical; the bond pairing is inconsistent.") from e


def translation_residual(g: GaussianState) -> float:
    """Largest entry change when every mode k is relabeled k + 1 (mod N)."""
    n = g.n_modes
    shift = mode_indices(np.roll(np.arange(n), 1), n)
    e = g.entries
    return float(np.max(np.abs(e[np.ix_(shift, shift)] - e)))


def long_range_cm(n_sites: int, x: float) -> GaussianState:
    """
    The s -> inf limit: C^-1 with diagonal a_q = (N - 1 + x^2)/(N x) and
    off-diagonal c_q = (x^2 - 1)/(N x); C with diagonal a_p = (1 + (N - 1) x^2)/(N x)
    and off-diagonal c_p = -c_q.
    """
    if n_sites < 3:
        raise Unphysical(f"A ring needs at least 3 sites, got {n_sites}.")
    if not x >= 1:
        raise Unphysical(f"x = {x} is below 1.")
    n = n_sites
    a_q = ((n - 1) + x * x) / (n * x)
    c_q = (x * x - 1) / (n * x)
    a_p = (1 + (n - 1) * x * x) / (n * x)
    c_p = -c_q
    c_inv = linalg.circulant(np.r_[a_q, np.full(n - 1, c_q)])
    c = linalg.circulant(np.r_[a_p, np.full(n - 1, c_p)])
    return GaussianState.of(linalg.block_diag(c_inv, c))


def _is_circulant(m: np.ndarray, tol: float) -> bool:
    return bool(np.max(np.abs(m - linalg.circulant(m[:, 0]))) <= tol)


def extract_circulant(g: GaussianState, *, tol: float | None = None) -> CirculantPair:
    tol = numerics.circulant_tol if tol is None else tol
    cm = g.cm
    cross = float(np.max(np.abs(cm.qp_block)))
    if cross > tol:
        raise NotCirculantForm(f"CM has q-p correlations up to {cross:.2e}.")
    c_inv, c = cm.q_block, cm.p_block
    inverse_error = float(np.max(np.abs(c_inv @ c - np.eye(g.n_modes))))
    if inverse_error > tol:
        raise NotCirculantForm(f"q-block times p-block deviates from I by {inverse_error:.2e}.")
    if not (_is_circulant(c, tol) and _is_circulant(c_inv, tol)):
        raise NotCirculantForm("Covariance blocks are not circulant.")
    return CirculantPair(c=SymMatrix(entries=c), c_inv=SymMatrix(entries=c_inv))


def potential_matrix(cp: CirculantPair) -> SymMatrix:
    c = cp.c.entries
    return SymMatrix(entries=c @ c)


def ground_state_cm(v: SymMatrix) -> GaussianState:
    """Ground state of H = (sum p^2 + q^T V q) / 2: V^-1/2 (q-sector) + V^1/2 (p-sector)."""
    v = SymMatrix.of(v)
    w, u = linalg.eigh(v.entries)
    if w.min() <= 0:
        raise NotPositiveDefinite(f"Potential matrix has eigenvalue {w.min():.3e}.")
    root = (u * np.sqrt(w)) @ u.T
    inv_root = (u / np.sqrt(w)) @ u.T
    return GaussianState.of(linalg.block_diag(inv_root, root))
