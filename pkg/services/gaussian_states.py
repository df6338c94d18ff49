import logging
import math
from collections.abc import Iterable

import numpy as np

from schemas.matrix_schemas import GaussianState, SymMatrix
from schemas.state_schemas import BuildingBlockParams
from services.errors import Unphysical
from services.symplectic_core import check_modes, select_modes

logger = logging.getLogger(__name__)


def vacuum(n_modes: int) -> GaussianState:
    return GaussianState.of(np.eye(2 * n_modes))


def _block_s(p: BuildingBlockParams) -> float:
    # s within rounding of s_min is taken as s_min exactly
    return p.s if p.d > 0 else p.s_min


def block_covariances(p: BuildingBlockParams) -> tuple[float, float, float, float]:
    """
    (t_plus, t_minus, u_plus, u_minus) of the bisymmetric block.

    The radicands are factored and written through d = s - s_min,
    2s - x - 1 = 2d and 2s - x + 1 = 2d + 2, so they vanish exactly at s = s_min
    instead of leaving a rounding residue under the square root.
    """
    x, d = p.x, p.d
    s = _block_s(p)
    root_t = math.sqrt(2 * d * (2 * s + x + 1) * (2 * d + 2) * (2 * s + x - 1))
    t_plus = (x * x - 1 + root_t) / (4 * s)
    t_minus = (x * x - 1 - root_t) / (4 * s)

    root_minus = math.sqrt(2 * d * (2 * d + 2))
    root_plus = math.sqrt((x + 2 * s - 1) * (x + 2 * s + 1))
    prefactor = math.sqrt((x * x - 1) / (s * x)) / 4
    u_plus = prefactor * (root_minus + root_plus)
    u_minus = prefactor * (root_minus - root_plus)
    return t_plus, t_minus, u_plus, u_minus


def building_block(p: BuildingBlockParams) -> GaussianState:
    """
    Three-mode CM: modes 0 and 1 form the input port with q-block
    [[s, t+], [t+, s]] and p-block [[s, t-], [t-, s]]; mode 2 is the output
    port with diag(x, x); u+ (q-sector) and u- (p-sector) couple each input
    mode to the output mode. There are no q-p correlations.
    """
    t_plus, t_minus, u_plus, u_minus = block_covariances(p)
    s, x = _block_s(p), p.x
    q_block = np.array([[s, t_plus, u_plus], [t_plus, s, u_plus], [u_plus, u_plus, x]])
    p_block = np.array([[s, t_minus, u_minus], [t_minus, s, u_minus], [u_minus, u_minus, x]])
    cm = np.zeros((6, 6))
    cm[:3, :3] = q_block
    cm[3:, 3:] = p_block
    try:
        return GaussianState.of(cm)
    except Unphysical as e:
        raise Unphysical(f"Building block at s = {s:g}, x = {x:g} is not a physical state: {e.detail}") from e


def tmss(r: float) -> GaussianState:
    """Two-mode squeezed state; q-correlation +sinh 2r, p-correlation -sinh 2r."""
    if not r >= 0:
        raise Unphysical(f"Squeezing r = {r} must be nonnegative.")
    c, sh = math.cosh(2 * r), math.sinh(2 * r)
    cm = np.zeros((4, 4))
    cm[:2, :2] = [[c, sh], [sh, c]]
    cm[2:, 2:] = [[c, -sh], [-sh, c]]
    return GaussianState.of(cm)


def reduce(g: GaussianState, modes: Iterable[int]) -> GaussianState:
    """Marginal on the listed modes, in the listed order."""
    # a marginal inherits the accuracy of its parent
    return GaussianState.of(select_modes(g.cm, modes), accuracy=g.tolerance(0.0))


def partial_transpose(g: GaussianState | SymMatrix, modes: Iterable[int]) -> SymMatrix:
    """
    theta G theta with theta flipping p of the listed modes. The result need
    not be a valid CM; a violation of the uncertainty principle is the
    entanglement signal.
    """
    cm = g.cm if isinstance(g, GaussianState) else SymMatrix.of(g)
    n = cm.n_modes
    signs = np.ones(2 * n)
    for m in check_modes(modes, n):
        signs[n + m] = -1.0
    return SymMatrix(entries=cm.entries * np.outer(signs, signs))
