import logging
import math
import sys

from pydantic import BaseModel, ConfigDict, Field, model_validator

from config import numerics
from services.errors import Unphysical

logger = logging.getLogger(__name__)


def s_min(x: float) -> float:
    return (x + 1) / 2


def s_min_slack(x: float) -> float:
    """Rounding slack of s_min(x); offsets below it count as s = s_min."""
    return 4 * sys.float_info.epsilon * (x + 1)


class BuildingBlockParams(BaseModel):
    """
    Pure bisymmetric three-mode block: s is the local mixedness of modes 0 and 1
    (the input port), x that of mode 2 (the output port).
    """

    model_config = ConfigDict(frozen=True)

    s: float = Field(..., description="sqrt(det) of the single-mode reduced CM of mode 0 (equal for mode 1).")
    x: float = Field(..., description="sqrt(det) of the single-mode reduced CM of mode 2.")

    @model_validator(mode="after")
    def _check_bounds(self):
        if not (math.isfinite(self.s) and math.isfinite(self.x)):
            raise Unphysical("s and x must be finite.")
        if self.x < 1:
            raise Unphysical(f"x = {self.x:g} is below 1.")
        if self.s < self.s_min - s_min_slack(self.x):
            raise Unphysical(f"s = {self.s:g} below s_min = {self.s_min:g}.")
        return self

    @property
    def s_min(self) -> float:
        return s_min(self.x)

    @property
    def d(self) -> float:
        """Distance above the physicality bound, s - s_min, snapped to 0 within rounding."""
        d = self.s - self.s_min
        return 0.0 if d <= s_min_slack(self.x) else d

    @classmethod
    def at_offset(cls, x: float, d: float) -> "BuildingBlockParams":
        if d < 0:
            raise Unphysical(f"d = {d:g} must be nonnegative.")
        return cls(s=s_min(x) + d, x=x)


class BondSpec(BaseModel):
    """Two-mode squeezed bond. r = None is the infinite-squeezing (EPR) limit."""

    model_config = ConfigDict(frozen=True)

    r: float | None = None

    @model_validator(mode="after")
    def _check_squeezing(self):
        if self.r is None:
            return self
        if not math.isfinite(self.r) or self.r < 0:
            raise Unphysical(f"Bond squeezing r = {self.r} must be a nonnegative number.")
        if self.r > numerics.r_cap:
            raise Unphysical(
                f"Bond squeezing r = {self.r:g} exceeds r_cap = {numerics.r_cap:g}; use the infinite bond."
            )
        return self

    @property
    def is_infinite(self) -> bool:
        return self.r is None

    @classmethod
    def infinite(cls) -> "BondSpec":
        return cls(r=None)

    @classmethod
    def finite(cls, r: float) -> "BondSpec":
        return cls(r=r)

    @classmethod
    def from_value(cls, r: float) -> "BondSpec":
        if math.isinf(r) and r > 0:
            return cls.infinite()
        if r > numerics.r_cap:
            logger.warning(
                "[bond]: r = %g exceeds r_cap = %g, using the infinite-squeezing limit.", r, numerics.r_cap
            )
            return cls.infinite()
        return cls.finite(r)

    @classmethod
    def parse(cls, text: str) -> "BondSpec":
        """Accepts "inf" or a decimal squeezing parameter."""
        token = text.strip().lower()
        if token in ("inf", "infinite", "epr"):
            return cls.infinite()
        try:
            r = float(token)
        except ValueError as e:
            raise Unphysical(f'Bond must be "inf" or a number, got "{text}".') from e
        return cls.from_value(r)

    def label(self) -> str:
        return "inf" if self.r is None else f"{self.r:g}"


class RingSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    n_sites: int = Field(..., ge=3, description="Ring size; site N is identified with site 0.")
    block: BuildingBlockParams
    bond: BondSpec = Field(default_factory=BondSpec.infinite)

    @classmethod
    def of(cls, n_sites: int, s: float, x: float, bond: BondSpec | None = None) -> "RingSpec":
        return cls(
            n_sites=n_sites,
            block=BuildingBlockParams(s=s, x=x),
            bond=bond if bond is not None else BondSpec.infinite(),
        )
