"""Model parameters and the two elementary distributions.

The bulk environment is Bernoulli(p).  The stationary boundary version adds
a parameter u in (p, 1]: Bernoulli(u) weights on the horizontal axis and
Geometric(rho) weights on the vertical axis, where rho = (u-p)/(u(1-p)).
Geometric(rho) lives on {0, 1, 2, ...} with pmf rho*(1-rho)**k and mean
(1-rho)/rho.

Extended-real results use ``math.inf``; no operation returns NaN for
in-range arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import OutOfRangeError

__all__ = [
    "ModelParams",
    "validate_params",
    "bernoulli_cgf",
    "geometric_cgf",
    "bernoulli_rate",
    "geometric_rate",
    "geometric_mean",
]


@dataclass(frozen=True)
class ModelParams:
    """Validated (p, u) pair with the derived geometric boundary parameter rho.

    rho is present iff u is; u = 1 gives rho = 1, the point mass at zero on
    the vertical boundary.
    """

    p: float
    u: float | None = None
    rho: float | None = None

    @property
    def has_boundary(self) -> bool:
        return self.u is not None


def rho_from(p: float, u: float) -> float:
    """Geometric boundary parameter (u-p)/(u(1-p))."""
    return (u - p) / (u * (1.0 - p))


def validate_params(p: float, u: float | None = None) -> ModelParams:
    """Validate raw (p, u) input and derive rho.

    Raises OutOfRangeError unless 0 < p < 1 and, when given, p < u <= 1.
    """
    p = float(p)
    if not (0.0 < p < 1.0) or math.isnan(p):
        raise OutOfRangeError(f"p must lie in (0,1), got {p}")
    if u is None:
        return ModelParams(p=p)
    u = float(u)
    if not (p < u <= 1.0) or math.isnan(u):
        raise OutOfRangeError(f"u must lie in (p,1] = ({p},1], got {u}")
    return ModelParams(p=p, u=u, rho=rho_from(p, u))


def bernoulli_cgf(q: float, xi: float) -> float:
    """log E[exp(xi*X)] for X ~ Bernoulli(q), finite for all real xi.

    q = 1 is the point mass at one, giving xi itself.
    """
    if not (0.0 < q <= 1.0):
        raise OutOfRangeError(f"q must lie in (0,1], got {q}")
    if q == 1.0:
        return xi
    if xi >= 0.0:
        # factor out exp(xi) so large xi cannot overflow
        return xi + math.log1p((1.0 - q) * math.expm1(-xi))
    return math.log1p(q * math.expm1(xi))


def geometric_cgf(rho: float, xi: float) -> float:
    """log E[exp(xi*X)] for X ~ Geometric(rho) on {0,1,...}.

    Finite iff xi < -log(1-rho); returns inf at and beyond the pole
    (closed on the infinite side).  rho = 1 is the point mass at zero.
    """
    if not (0.0 < rho <= 1.0):
        raise OutOfRangeError(f"rho must lie in (0,1], got {rho}")
    if rho == 1.0 or xi == 0.0:
        return 0.0
    if xi >= -math.log1p(-rho):
        return math.inf
    return math.log(rho) - math.log1p(-(1.0 - rho) * math.exp(xi))


def bernoulli_rate(q: float, r: float) -> float:
    """Right-tail rate of Bernoulli(q) sample means at level r.

    Zero at and below the mean, r*log(r/q) + (1-r)*log((1-r)/(1-q)) on
    [q, 1] (with the analytic r=1 limit), infinite above 1.
    """
    if not (0.0 < q < 1.0):
        raise OutOfRangeError(f"q must lie in (0,1), got {q}")
    if r <= q:
        return 0.0
    if r > 1.0:
        return math.inf
    if r == 1.0:
        return -math.log(q)
    return r * math.log(r / q) + (1.0 - r) * math.log((1.0 - r) / (1.0 - q))


def geometric_mean(rho: float) -> float:
    """Mean (1-rho)/rho of Geometric(rho) on {0,1,...}."""
    return (1.0 - rho) / rho


def geometric_rate(rho: float, r: float) -> float:
    """Right-tail rate of Geometric(rho) sample means at level r.

    Zero at and below the mean (1-rho)/rho, infinite for r < 0 (the sums
    are nonnegative), and r*log(r/((1-rho)(1+r))) - log((1+r)*rho) above
    the mean.  rho = 1 degenerates to the point mass at zero.
    """
    if not (0.0 < rho <= 1.0):
        raise OutOfRangeError(f"rho must lie in (0,1], got {rho}")
    if r < 0.0:
        return math.inf
    if rho == 1.0:
        return 0.0 if r == 0.0 else math.inf
    if r <= geometric_mean(rho):
        return 0.0
    return r * math.log(r / ((1.0 - rho) * (1.0 + r))) - math.log((1.0 + r) * rho)
