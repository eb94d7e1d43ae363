"""Exception hierarchy shared by the library and the command line tool."""


class CStarInvError(Exception):
    """Base class for every error raised by :mod:`cstar_inv`."""


class ShapeMismatch(CStarInvError, ValueError):
    """Raised when two objects live over different algebras or module ranks."""


class CornerSupportViolation(CStarInvError, ValueError):
    """Raised when a block handed to :func:`assemble_from_blocks` leaks out of its corner."""


class PreconditionFailed(CStarInvError):
    """Raised when the hypotheses of a construction are not met.

    ``residual`` and ``threshold`` record the failing measurement when there is one.
    """

    def __init__(self, msg, residual=None, threshold=None):
        super().__init__(msg)
        self.residual = residual
        self.threshold = threshold


class NotSolvable(PreconditionFailed):
    """Raised by the Douglas solver when ``Ran(S)`` is not inside ``Ran(T)``."""


class NotInvariant(PreconditionFailed):
    """Raised when a submodule is required to be invariant but is not."""


class NotSpectral(PreconditionFailed):
    """Raised when a requested eigenvalue is not in the spectrum."""


class NotUnitary(PreconditionFailed):
    """Raised when an operator expected to be unitary is not."""


class ScalarOperator(PreconditionFailed):
    """Raised when a hyperinvariant submodule is requested for ``λI``."""


class ZeroOperator(PreconditionFailed):
    """Raised when a hyperinvariant submodule is requested for the zero operator."""


class ParseError(CStarInvError):
    """Malformed problem or report document."""


class ValidationError(CStarInvError):
    """Well-formed document whose contents are inconsistent.

    ``path`` points into the offending document, e.g. ``operators.T[0][1]``.
    """

    def __init__(self, msg, path=""):
        super().__init__(f"{path}: {msg}" if path else msg)
        self.path = path


class UnknownName(CStarInvError, KeyError):
    """A command referenced an operator or submodule missing from the problem."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""
