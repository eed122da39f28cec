"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Malformed input (spec field, parameter range, jet shape)."""


class EvaluationError(RuntimeError):
    """A sequence evaluator cannot produce a value for the requested index."""


class QuadratureError(RuntimeError):
    """A quadrature did not converge to the requested tolerance."""


class InternalInvariantError(RuntimeError):
    """A mathematically impossible combination of results was produced."""
