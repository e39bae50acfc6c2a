"""Exception hierarchy shared by the whole package.

The CLI maps these onto exit codes: schema problems exit 2, precondition
violations exit 3.
"""


class IglError(Exception):
    """Base class for all errors raised by this package."""


class SchemaError(IglError):
    """An instance file or payload does not match its documented schema."""


class PreconditionError(IglError):
    """An operation was invoked outside its stated hypotheses."""


class DiagramError(PreconditionError):
    """A diagram input is ill-posed: a row is not exact, a square does not
    commute, or a claimed internal direct-sum decomposition fails."""


class MalformedTraceError(PreconditionError):
    """A survival trace is inconsistent: non-monotone, failing at stage
    zero, or claiming a first failure at a limit ordinal."""
