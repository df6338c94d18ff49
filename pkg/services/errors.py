class GmpsError(Exception):
    """
    Base error of the library. Carries a human-readable detail and the
    process exit code the CLI reports for it.
    """

    exit_code = 3

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class InputError(GmpsError):
    exit_code = 2


class NumericalError(GmpsError):
    exit_code = 3


class Unphysical(InputError):
    pass


class IndexOutOfRange(InputError):
    pass


class WrongModeCount(InputError):
    pass


class NonPositiveEta(InputError):
    pass


class BrokenSymmetry(InputError):
    """A state lacks the pair or ring symmetry an analysis relies on."""


class SingularBlock(NumericalError):
    pass


class DegenerateLimit(NumericalError):
    pass


class NotPositiveDefinite(NumericalError):
    pass


class NotCirculantForm(NumericalError):
    pass


class NoThreshold(NumericalError):
    pass
