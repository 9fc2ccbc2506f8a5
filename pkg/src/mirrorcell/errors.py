"""Exception types raised across the package."""


class InvalidParameterError(ValueError):
    """Parameters violate an operation's preconditions."""


class VerificationError(RuntimeError):
    """A numerical verification step produced an out-of-tolerance result."""


class SamplingError(VerificationError):
    """Fiber sampling could not produce the requested number of points."""


class OracleInconclusiveError(RuntimeError):
    """The Riemann-Hurwitz oracle could not separate its branch values; resample."""
