"""Exception hierarchy shared by all modules."""


class ProdMatrixError(Exception):
    """Base class for every error raised by this package."""


class PoleError(ProdMatrixError, ValueError):
    """A Gamma function was evaluated at (or too close to) a pole."""


class NonConvergence(ProdMatrixError, ArithmeticError):
    """A series did not reach its tolerance before the term cap."""


class QuadratureFailure(ProdMatrixError, ArithmeticError):
    """A quadrature rule failed to meet its error target after refinement."""


class DomainError(ProdMatrixError, ValueError):
    """An argument lies outside the supported domain."""


class SeparationError(ProdMatrixError, ValueError):
    """Two integration contours are closer than the allowed minimum."""


class NumericalRankError(ProdMatrixError, ArithmeticError):
    """A computed squared singular value is non-positive beyond tolerance."""


class SignError(ProdMatrixError, ArithmeticError):
    """A determinant that must be positive came out non-positive."""


class LogSpaceOverflow(ProdMatrixError, OverflowError):
    """Exponentiating a log-space quantity would overflow double precision."""


class ConfigError(ProdMatrixError, ValueError):
    """A configuration file or CLI argument is invalid."""


class EmptyGrid(ProdMatrixError, ValueError):
    """A binning grid has fewer than two edges or is not increasing."""
