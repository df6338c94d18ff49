from pydantic import BaseModel, ConfigDict, Field


class NumericsConfig(BaseModel):
    """
    Tolerances and caps shared by every service module.
    Functions accept per-call overrides; these are the fallbacks.
    """

    model_config = ConfigDict(frozen=True)

    cond_cap: float = Field(1e12, gt=1, description="Largest condition number accepted by schur_complement.")
    # None selects the matrix_rank convention max(dim) * eps
    rank_rtol: float | None = Field(None, gt=0, description="Relative rank cutoff of the limit Schur complement.")
    validity_tol: float = Field(1e-9, ge=0, description="Slack on symplectic eigenvalues >= 1.")
    decision_tol: float = Field(1e-9, ge=0, description="eta < 1 - decision_tol counts as entangled.")
    symmetry_tol: float = Field(1e-6, ge=0, description="Equal-eta check across pairs of equal separation.")
    pair_symmetry_tol: float = Field(1e-6, ge=0, description="Equal single-mode determinants required for E_F.")
    circulant_tol: float = Field(1e-7, ge=0)
    bisection_width: float = Field(1e-8, gt=0)
    s_cap: float = Field(1e6, gt=1, description="Upper end of the threshold bracket search.")
    r_cap: float = Field(18.0, gt=0, description="Largest finite bond squeezing.")
    cross_check_scale: float = Field(1e8, gt=1)
    cross_check_tol: float = Field(1e-6, gt=0)
    roundtrip_tol: float = Field(1e-8, gt=0, description="Parent-Hamiltonian ground state vs MPS CM.")
    max_sites: int = Field(64, ge=3, description="CLI cap on ring size unless --allow-large is given.")


numerics = NumericsConfig()
