from functools import lru_cache

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from config import numerics
from services.errors import Unphysical, WrongModeCount


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


class SymMatrix(BaseModel):
    """
    Real symmetric matrix. Entries are symmetrized on construction,
    (M + M^T) / 2, so entries[i, j] == entries[j, i] holds bit for bit.

    As a covariance matrix the ordering is all-q-then-all-p:
    (q_0, ..., q_{N-1}, p_0, ..., p_{N-1}).
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    entries: np.ndarray

    @field_validator("entries", mode="before")
    @classmethod
    def _symmetrize(cls, value):
        a = np.array(value, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
            raise WrongModeCount(f"Expected a nonempty square matrix, got shape {a.shape}.")
        if not np.all(np.isfinite(a)):
            raise Unphysical("Matrix has non-finite entries.")
        return _frozen((a + a.T) / 2)

    @classmethod
    def of(cls, value) -> "SymMatrix":
        if isinstance(value, SymMatrix):
            return value
        return cls(entries=value)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def n_modes(self) -> int:
        if self.dim % 2:
            raise WrongModeCount(f"A covariance matrix needs an even dimension, got {self.dim}.")
        return self.dim // 2

    @property
    def q_block(self) -> np.ndarray:
        n = self.n_modes
        return self.entries[:n, :n]

    @property
    def p_block(self) -> np.ndarray:
        n = self.n_modes
        return self.entries[n:, n:]

    @property
    def qp_block(self) -> np.ndarray:
        n = self.n_modes
        return self.entries[:n, n:]


@lru_cache(maxsize=128)
def _omega(n_modes: int) -> np.ndarray:
    eye = np.eye(n_modes)
    zero = np.zeros((n_modes, n_modes))
    return _frozen(np.block([[zero, eye], [-eye, zero]]))


class SymplecticForm(BaseModel):
    """Omega = [[0, I], [-I, 0]] under all-q-then-all-p ordering."""

    model_config = ConfigDict(frozen=True)

    n_modes: int = Field(..., gt=0)

    @property
    def matrix(self) -> np.ndarray:
        return _omega(self.n_modes)


class GaussianState(BaseModel):
    """
    Zero-mean Gaussian state, fully described by its covariance matrix.
    Construction checks the uncertainty principle. `accuracy` is the absolute
    error the entries are known to carry; it widens every later tolerance.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    cm: SymMatrix
    n_modes: int = Field(..., gt=0)
    accuracy: float = Field(0.0, ge=0)

    @model_validator(mode="after")
    def _check_physical(self):
        from services.symplectic_core import is_valid_cm

        if self.cm.dim != 2 * self.n_modes:
            raise WrongModeCount(
                f"CM of dimension {self.cm.dim} does not describe {self.n_modes} modes."
            )
        if not is_valid_cm(self.cm, self.tolerance(numerics.validity_tol)):
            raise Unphysical("Covariance matrix violates the uncertainty principle.")
        return self

    @classmethod
    def of(cls, cm, *, accuracy: float = 0.0) -> "GaussianState":
        sym = SymMatrix.of(cm)
        return cls(cm=sym, n_modes=sym.n_modes, accuracy=accuracy)

    def tolerance(self, tol: float) -> float:
        """`tol`, widened to what the entries can resolve."""
        # symplectic eigenvalues carry a relative error of order eps * cond(cm)
        return max(tol, self.accuracy, np.finfo(float).eps * np.linalg.cond(self.cm.entries))

    @property
    def entries(self) -> np.ndarray:
        return self.cm.entries


class CirculantPair(BaseModel):
    """C and its inverse for a CM of the form C^-1 (q-sector) + C (p-sector)."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    c: SymMatrix
    c_inv: SymMatrix

    @property
    def n_sites(self) -> int:
        return self.c.dim


class BondLimitForm(BaseModel):
    """
    Bond state written as D_finite + scale * P with P an orthogonal projector.
    scale is None in the infinite-squeezing limit.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n_modes: int = Field(..., gt=0)
    d_finite: SymMatrix
    projector: SymMatrix
    scale: float | None = None

    @property
    def is_limit(self) -> bool:
        return self.scale is None


class ChainAssembly(BaseModel):
    """Direct sum of the building blocks with the port partition of its modes."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    state: GaussianState
    input_modes: tuple[int, ...]
    output_modes: tuple[int, ...]
