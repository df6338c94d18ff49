"""
Matrix substrate for covariance matrices in all-q-then-all-p ordering:
direct sums over modes, Schur complements (finite, penalized and in the
infinite-penalty limit), symplectic spectra and the uncertainty test.
"""

import logging
from collections.abc import Iterable, Sequence

import numpy as np
from scipy import linalg

from config import numerics
from schemas.matrix_schemas import SymMatrix, SymplecticForm
from services.errors import (
    DegenerateLimit,
    IndexOutOfRange,
    NotPositiveDefinite,
    SingularBlock,
    WrongModeCount,
)

logger = logging.getLogger(__name__)


def mode_indices(modes: Sequence[int], n_modes: int) -> np.ndarray:
    """Row/column indices of the given modes: their q entries, then their p entries."""
    m = np.asarray(modes, dtype=int)
    return np.concatenate([m, m + n_modes])


def check_modes(modes: Iterable[int], n_modes: int) -> tuple[int, ...]:
    selected = tuple(int(m) for m in modes)
    if not selected:
        raise IndexOutOfRange("Mode selection is empty.")
    if len(set(selected)) != len(selected):
        raise IndexOutOfRange(f"Mode selection {selected} repeats a mode.")
    bad = [m for m in selected if not 0 <= m < n_modes]
    if bad:
        raise IndexOutOfRange(f"Modes {bad} are outside 0..{n_modes - 1}.")
    return selected


def select_modes(g: SymMatrix, modes: Iterable[int]) -> SymMatrix:
    n = g.n_modes
    idx = mode_indices(check_modes(modes, n), n)
    return SymMatrix(entries=g.entries[np.ix_(idx, idx)])


def direct_sum(blocks: Sequence[SymMatrix]) -> SymMatrix:
    """
    Direct sum over mode labels. Block k occupies the modes following
    those of block k-1, so under all-q-then-all-p ordering its q and p
    sectors are embedded separately rather than stacked diagonally.
    """
    if not blocks:
        raise WrongModeCount("direct_sum needs at least one block.")
    sizes = [SymMatrix.of(b).n_modes for b in blocks]
    n = sum(sizes)
    out = np.zeros((2 * n, 2 * n))
    offset = 0
    for block, k in zip(blocks, sizes, strict=True):
        idx = mode_indices(range(offset, offset + k), n)
        out[np.ix_(idx, idx)] = SymMatrix.of(block).entries
        offset += k
    return SymMatrix(entries=out)


def _solve_checked(d: np.ndarray, rhs: np.ndarray, cond_cap: float) -> np.ndarray:
    cond = np.linalg.cond(d)
    if not np.isfinite(cond) or cond > cond_cap:
        raise SingularBlock(
            f"Discarded block has condition number {cond:.3e} above the cap {cond_cap:.1e}; "
            "use the limit path."
        )
    return linalg.solve(d, rhs, assume_a="sym")


def _schur(a: np.ndarray, b: np.ndarray, d: np.ndarray, cond_cap: float) -> np.ndarray:
    if d.size == 0:
        return a
    return a - b @ _solve_checked(d, b.T, cond_cap)


def schur_complement(m: SymMatrix, keep: Iterable[int], *, cond_cap: float | None = None) -> SymMatrix:
    """
    A - B D^-1 B^T with A the block of the kept modes, D the block of the
    discarded modes and B the cross block. The result is ordered like `keep`.
    """
    m = SymMatrix.of(m)
    n = m.n_modes
    kept = check_modes(keep, n)
    dropped = [k for k in range(n) if k not in kept]
    ki = mode_indices(kept, n)
    di = mode_indices(dropped, n) if dropped else np.array([], dtype=int)
    e = m.entries
    a = e[np.ix_(ki, ki)]
    b = e[np.ix_(ki, di)]
    d = e[np.ix_(di, di)]
    return SymMatrix(entries=_schur(a, b, d, cond_cap or numerics.cond_cap))


def _as_projector(p, dim: int) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.shape != (dim, dim):
        raise WrongModeCount(f"Projector of shape {p.shape} does not match a {dim}x{dim} block.")
    if not (np.allclose(p, p.T, atol=1e-12) and np.allclose(p @ p, p, atol=1e-9)):
        raise DegenerateLimit("P is not an orthogonal projector.")
    return p


def _blocks(a, b, d_finite) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    a = SymMatrix.of(a).entries
    d = SymMatrix.of(d_finite).entries
    b = np.asarray(b, dtype=float)
    if b.shape != (a.shape[0], d.shape[0]):
        raise WrongModeCount(f"Cross block of shape {b.shape} does not fit A {a.shape} and D {d.shape}.")
    return a, b, d


def limit_schur_complement(
    a: SymMatrix,
    b: np.ndarray,
    d_finite: SymMatrix,
    p: np.ndarray,
    *,
    rank_rtol: float | None = None,
    cond_cap: float | None = None,
) -> SymMatrix:
    """
    lim_{lam -> inf} A - B (D_finite + lam P)^-1 B^T for an orthogonal projector P.

    The diverging directions range(P) drop out; what remains is the inverse
    of D_finite restricted to range(I - P), A - B U (U^T D U)^-1 U^T B^T with
    U an orthonormal basis of range(I - P).
    """
    a, b, d = _blocks(a, b, d_finite)
    p = _as_projector(p, d.shape[0])
    cap = cond_cap or numerics.cond_cap

    if not np.any(p):
        return SymMatrix(entries=_schur(a, b, d, cap))

    u = linalg.null_space(p)
    if u.shape[1] == 0:
        return SymMatrix(entries=a)

    restricted = u.T @ d @ u
    restricted = (restricted + restricted.T) / 2
    ev = np.abs(linalg.eigvalsh(restricted))
    rtol = rank_rtol if rank_rtol is not None else numerics.rank_rtol
    if rtol is None:
        rtol = max(restricted.shape) * np.finfo(float).eps
    if ev.min() <= rtol * ev.max():
        raise DegenerateLimit(
            f"D_finite restricted to range(I - P) is singular "
            f"(eigenvalues {ev.min():.2e} to {ev.max():.2e})."
        )
    bu = b @ u
    return SymMatrix(entries=a - bu @ linalg.solve(restricted, bu.T, assume_a="sym"))


def penalized_schur_complement(
    a: SymMatrix,
    b: np.ndarray,
    d_finite: SymMatrix,
    p: np.ndarray,
    lam: float,
    *,
    cond_cap: float | None = None,
) -> SymMatrix:
    """
    A - B (D_finite + lam P)^-1 B^T at finite lam.

    range(P) is eliminated first, where the lam I term keeps the block well
    conditioned, then range(I - P); the large matrix D_finite + lam P is
    never factorized as a whole.
    """
    a, b, d = _blocks(a, b, d_finite)
    p = _as_projector(p, d.shape[0])
    cap = cond_cap or numerics.cond_cap

    v = linalg.orth(p) if np.any(p) else np.zeros((d.shape[0], 0))
    if v.shape[1] == 0:
        return SymMatrix(entries=_schur(a, b, d, cap))
    u = linalg.null_space(p)

    d_vv = v.T @ d @ v + lam * np.eye(v.shape[1])
    d_vu = v.T @ d @ u
    d_uu = u.T @ d @ u
    b_v = b @ v
    b_u = b @ u

    y = _solve_checked((d_vv + d_vv.T) / 2, np.hstack([b_v.T, d_vu]), cap)
    y_b, y_d = y[:, : a.shape[0]], y[:, a.shape[0] :]
    a1 = a - b_v @ y_b
    if u.shape[1] == 0:
        return SymMatrix(entries=a1)
    b1 = b_u - b_v @ y_d
    d1 = d_uu - d_vu.T @ y_d
    return SymMatrix(entries=_schur(a1, b1, (d1 + d1.T) / 2, cap))


def symplectic_eigenvalues(g: SymMatrix) -> np.ndarray:
    """
    Symplectic spectrum, ascending, each value reported once.

    K = G^1/2 Omega G^1/2 is real antisymmetric and similar to Omega G, so
    K^T K is symmetric with eigenvalues nu_i^2, each twice.
    """
    g = SymMatrix.of(g)
    n = g.n_modes
    w, v = linalg.eigh(g.entries)
    if w.min() <= 0:
        raise NotPositiveDefinite(f"Matrix has a non-positive eigenvalue {w.min():.3e}.")
    root = (v * np.sqrt(w)) @ v.T
    k = root @ SymplecticForm(n_modes=n).matrix @ root
    nu2 = linalg.eigvalsh(k.T @ k)
    return np.sqrt(np.clip(nu2, 0, None).reshape(n, 2).mean(axis=1))


def symplectic_eigenvalues_eig(g: SymMatrix) -> np.ndarray:
    """Same spectrum from the moduli of the eigenvalues of i Omega G (general eigensolver)."""
    g = SymMatrix.of(g)
    n = g.n_modes
    if linalg.eigvalsh(g.entries).min() <= 0:
        raise NotPositiveDefinite("Matrix is not positive definite.")
    moduli = np.sort(np.abs(linalg.eigvals(1j * SymplecticForm(n_modes=n).matrix @ g.entries)))
    return moduli.reshape(n, 2).mean(axis=1)


def is_valid_cm(g: SymMatrix, tol: float | None = None) -> bool:
    tol = numerics.validity_tol if tol is None else tol
    try:
        nu = symplectic_eigenvalues(g)
    except NotPositiveDefinite:
        return False
    return bool(nu.min() >= 1 - tol)
