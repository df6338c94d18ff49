from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, model_validator

from config import numerics
from schemas.state_schemas import BondSpec, BuildingBlockParams, RingSpec
from services.errors import Unphysical


class Command(str, Enum):
    BLOCK = "block"
    BUILD = "build"
    DISTRIBUTION = "distribution"
    THRESHOLDS = "thresholds"
    SCAN_EOF = "scan-eof"
    HAMILTONIAN = "hamiltonian"
    LONGRANGE = "longrange"


class OutputFormat(str, Enum):
    CSV = "csv"
    MATRIX_TEXT = "matrix-text"


class RunConfig(BaseModel):
    """
    Validated parameters of one CLI invocation. Physicality bounds are
    checked here, before any command runs.
    """

    model_config = ConfigDict(frozen=True)

    command: Command
    n: int | None = Field(None, ge=3)
    x: float | None = Field(None, ge=1)
    s: float | None = None
    bond: BondSpec = Field(default_factory=BondSpec.infinite)
    tol: float = Field(numerics.decision_tol, gt=0, lt=1)
    output: str | None = Field(None, description="File path; None writes to standard output.")
    format: OutputFormat | None = Field(None, description="None picks the command default.")
    x_grid: tuple[float, ...] = ()
    d_grid: tuple[float, ...] = ()
    k_list: tuple[int, ...] = ()
    header: bool = False
    workers: int = Field(1, ge=1)
    allow_large: bool = False
    from_file: str | None = None
    entropies: bool = False

    @model_validator(mode="after")
    def _check_physical(self):
        if self.x is not None and self.s is not None:
            # raises Unphysical with the s_min message
            BuildingBlockParams(s=self.s, x=self.x)
        if any(x < 1 for x in self.x_grid):
            raise Unphysical("Every x in the grid must be at least 1.")
        if any(d < 0 for d in self.d_grid):
            raise Unphysical("Every d in the grid must be nonnegative.")
        if any(k < 1 for k in self.k_list):
            raise Unphysical("Separations k start at 1.")
        if self.n is not None and self.n > numerics.max_sites and not self.allow_large:
            raise Unphysical(
                f"n = {self.n} exceeds the default cap of {numerics.max_sites}; pass --allow-large."
            )
        return self

    @property
    def block(self) -> BuildingBlockParams:
        if self.s is None or self.x is None:
            raise Unphysical(f"Command {self.command.value} needs both --x and --s.")
        return BuildingBlockParams(s=self.s, x=self.x)

    @property
    def ring(self) -> RingSpec:
        self.require("n")
        assert self.n is not None
        return RingSpec(n_sites=self.n, block=self.block, bond=self.bond)

    def require(self, *names: str) -> None:
        missing = [name for name in names if getattr(self, name) in (None, ())]
        if missing:
            flags = ", ".join("--" + name.replace("_", "-") for name in missing)
            raise Unphysical(f"Command {self.command.value} needs {flags}.")

    def output_format(self, default: OutputFormat) -> OutputFormat:
        return self.format or default
