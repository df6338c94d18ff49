import numpy as np
import pytest
from scipy import linalg

from schemas.matrix_schemas import GaussianState, SymplecticForm


@pytest.fixture
def rng():
    """Seeded generator so every random instance is reproducible."""
    return np.random.default_rng(20240517)


@pytest.fixture
def random_symplectic(rng):
    """S = expm(Omega H) with H symmetric is symplectic."""

    def make(n_modes: int, scale: float = 0.3) -> np.ndarray:
        h = rng.normal(scale=scale, size=(2 * n_modes, 2 * n_modes))
        return linalg.expm(SymplecticForm(n_modes=n_modes).matrix @ (h + h.T) / 2)

    return make


@pytest.fixture
def random_state(rng, random_symplectic):
    """Random valid CM: S diag(nu, nu) S^T with symplectic eigenvalues nu in [1, 3]."""

    def make(n_modes: int, *, pure: bool = False) -> GaussianState:
        nu = np.ones(n_modes) if pure else rng.uniform(1, 3, size=n_modes)
        s = random_symplectic(n_modes)
        return GaussianState.of(s @ np.diag(np.r_[nu, nu]) @ s.T)

    return make
