"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where a quantity is defined."""


class PointBudgetExceeded(RuntimeError):
    """A sampling request would produce more points than the configured budget."""


class ConvergenceError(RuntimeError):
    """A numerical estimator could not produce a trustworthy answer."""


class FactorizationError(RuntimeError):
    """A covariance matrix could not be factorized even with jitter."""
