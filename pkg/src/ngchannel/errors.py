"""Exception hierarchy shared by all modules."""


class NGChannelError(Exception):
    """Base class for package errors."""


class InvalidParameterError(NGChannelError, ValueError):
    """A parameter is out of its admissible domain."""


class InvalidStateError(NGChannelError, ValueError):
    """The requested state does not exist (non-positive normalization)."""


class ZeroNormError(InvalidStateError):
    """The unnormalized state has zero trace."""


class DivergentIntegralError(NGChannelError, ArithmeticError):
    """A Gaussian integral or kappa-ordered function does not converge."""


class SingularExpansionError(NGChannelError, ArithmeticError):
    """A truncated series cannot be formed at the requested point."""


class NonFiniteError(NGChannelError, ArithmeticError):
    """A computation produced NaN or infinity."""


class BracketError(NGChannelError, RuntimeError):
    """A root search could not bracket a sign change."""


class OracleError(NGChannelError, RuntimeError):
    """The truncated Fock oracle failed its own accuracy checks."""


class SeriesConvergenceError(NGChannelError, ArithmeticError):
    """An infinite series did not meet its truncation criterion in time."""


class UndefinedStatisticError(NGChannelError, ValueError):
    """A photon-statistics ratio is undefined (zero mean photon number)."""


class NotApplicableError(NGChannelError, ValueError):
    """The requested analysis does not apply to this state."""
