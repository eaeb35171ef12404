"""Exception types shared across the package."""


class DomainError(ValueError):
    """Arguments outside the mathematical domain of an operation."""


class SpectralPoleError(DomainError):
    """Spectral density evaluated exactly at a pole (lambda = 0, cos(omega) = u, d > 0)."""
