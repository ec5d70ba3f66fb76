"""Exception hierarchy shared by the library and the command-line front end."""


class InfogeomError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class SchemaError(InfogeomError, ValueError):
    """Malformed input data (shapes, JSON layout, parameter ranges)."""

    exit_code = 2


class DimensionError(SchemaError):
    """Operands with incompatible dimensions."""


class RankError(InfogeomError, ValueError):
    """A full-rank state was required but the input is (numerically) singular."""

    exit_code = 3


class SingularOperatorError(RankError):
    """A superoperator inverse was requested where a denominator vanishes."""


class UnsupportedMeasureError(InfogeomError, NotImplementedError):
    """The monotone carries no integral measure, so the operation is unavailable."""

    exit_code = 4


class VerdictError(InfogeomError):
    """A check requested in assert mode did not pass."""

    exit_code = 5


class ConvergenceError(InfogeomError, RuntimeError):
    """An iterative numerical routine failed."""


class StepSizeError(InfogeomError, RuntimeError):
    """The integrator drifted beyond tolerance; reduce the time step."""


class UnidentifiableError(InfogeomError, ValueError):
    """The parameter leaves the state unchanged, so its Fisher information vanishes."""

    exit_code = 3


class DegeneracyError(InfogeomError, ValueError):
    """The reference state has a degenerate spectrum, so sector bookkeeping is ambiguous."""

    exit_code = 4
