from pydantic import BaseModel, ConfigDict, Field, model_validator

from schemas.state_schemas import BondSpec


class EntanglementRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    i: int = Field(..., ge=0)
    j: int = Field(..., ge=0)
    separation: int = Field(..., ge=1, description="Ring distance min(|i-j|, N-|i-j|).")
    eta: float = Field(..., gt=0, description="Smallest symplectic eigenvalue of the partial transpose.")
    eof: float = Field(..., ge=0, description="Entanglement of formation in ebits.")
    entangled: bool


class ThresholdResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    k: int = Field(..., ge=1)
    x: float
    n_sites: int
    bond: BondSpec
    s_k: float
    bracket: tuple[float, float]
    residual: float = Field(..., ge=0, description="|eta - 1| at s_k.")

    @model_validator(mode="after")
    def _check_bracket(self):
        lo, hi = self.bracket
        if not lo <= self.s_k <= hi:
            raise ValueError(f"s_k = {self.s_k} lies outside its bracket [{lo}, {hi}].")
        return self

    @property
    def width(self) -> float:
        return self.bracket[1] - self.bracket[0]


class SqueezingLevels(BaseModel):
    model_config = ConfigDict(frozen=True)

    r: float
    variance_ratio_db: float = Field(..., description="10 log10(e^{2r}).")
    cosh_db: float = Field(..., description="10 log10(cosh 2r).")


class PortEntanglement(BaseModel):
    """Pairwise entanglement inside a building block."""

    model_config = ConfigDict(frozen=True)

    eta_ss: float = Field(..., description="Modes 0 and 1 (input port).")
    eta_sx: float = Field(..., description="Mode 0 against mode 2 (input against output port).")
    # the (0, 2) pair is not symmetric, so only the input port gets an E_F
    eof_ss: float = Field(..., ge=0)
