"""Exception hierarchy shared by all nsaclab modules."""


class NsacError(Exception):
    """Base class for library errors."""


class DomainError(NsacError, ValueError):
    """Input lies outside the admissible thermodynamic or geometric domain."""


class RangeError(DomainError):
    """Pressure outside the range of -f' on (tau1, inf)."""


class ConvergenceError(NsacError, RuntimeError):
    """An iterative solver failed to converge or to bracket a root."""


class StructureError(NsacError):
    """The landscape lacks the required critical-point structure."""


class StateError(NsacError):
    """A simulation state lost positivity or left the admissible c-range."""

    def __init__(self, message, cell=None):
        super().__init__(message)
        self.cell = cell


class MeasureError(NsacError):
    """A diagnostic measurement could not be taken."""
