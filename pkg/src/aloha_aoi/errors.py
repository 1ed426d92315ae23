"""Exception types shared across the package."""


class AlohaAoiError(Exception):
    """Base class for all package errors."""


class DegenerateProcessError(AlohaAoiError, ValueError):
    """No AoI refresh can ever happen (rho * omega == 0, or alpha == 0)."""


class ImproperDistributionError(AlohaAoiError, ValueError):
    """A generating function does not sum to one at x = 1."""


class PoleAtOneError(AlohaAoiError, ValueError):
    """A generating function's denominator vanishes at x = 1."""


class NoPathError(AlohaAoiError, ValueError):
    """The sink of a flow graph is not reachable from the source."""


class NotBracketedError(AlohaAoiError, ValueError):
    """A root-finding target lies outside the attainable range."""


class ConfigurationError(AlohaAoiError, ValueError):
    """Invalid or unsupported configuration."""
