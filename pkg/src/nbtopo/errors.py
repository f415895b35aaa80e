"""Exception types shared across the toolkit."""


class NBTopoError(Exception):
    """Base class for all toolkit errors."""


class DegeneratePolynomialError(NBTopoError, ValueError):
    """All coefficients beyond the constant term vanish."""


class InsufficientSeedError(NBTopoError, RuntimeError):
    """Too few energies satisfy the equal-modulus condition.

    Signals a gapless (TSM) regime or an unreasonable tolerance.
    """


class NotApplicableError(NBTopoError, ValueError):
    """Closed-form result requested outside its parameter domain."""


class SingularRadiusError(NBTopoError, ValueError):
    """Circular contour radius diverges (|t1| == |gamma|)."""


class SingularReferenceError(NBTopoError, ValueError):
    """Reference energy sits on (or too close to) the Bloch spectrum."""


class NearDefectiveError(NBTopoError, RuntimeError):
    """Eigenvector completeness residual too large; exceptional point nearby."""


class HalfFillingError(NBTopoError, RuntimeError):
    """Energies straddle the zero line; occupied set is ambiguous."""


class EPContourError(NBTopoError, RuntimeError):
    """A biorthogonal overlap on the contour collapsed to zero."""


class AmbiguousLocalizationError(NBTopoError, RuntimeError):
    """A degenerate-subspace occupation trace is far from any integer."""


class PairingViolationError(NBTopoError, RuntimeError):
    """Imaginary residue incompatible with chiral spectral pairing."""


class ConfigError(NBTopoError, ValueError):
    """Invalid run configuration."""
