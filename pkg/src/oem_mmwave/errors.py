"""Exception types shared across the toolkit."""


class OemError(Exception):
    """Base class for all toolkit errors."""


class InvalidConfigError(OemError, ValueError):
    """A configuration or design input violates its invariants."""


class DomainError(OemError, ValueError):
    """A numeric argument is outside the supported domain."""


class AliasRiskError(OemError, ValueError):
    """Mode decomposition requested with fewer receive elements than modes."""


class RankDeficientError(OemError, ValueError):
    """A per-mode channel matrix is too ill-conditioned to invert."""


class NumericSingularityError(OemError, ArithmeticError):
    """A closed-form expression hit a vanishing denominator."""


class BisectionError(OemError, RuntimeError):
    """The multiplier search failed to meet the power budget."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (final relative residual {residual:.3e})")
        self.residual = residual
