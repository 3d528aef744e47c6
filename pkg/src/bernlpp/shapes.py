"""Law-of-large-numbers limits of the passage time and their variational form.

All shape functions are 1-homogeneous in the direction (s, t).  The i.i.d.
limit is strictly concave below the critical slope t/s = (1-p)/p and linear
(flat edge, value s) above it.  The boundary-model limit is linear in (s, t)
for every u, dominates the i.i.d. limit, and touches it at a single u that
marks the characteristic direction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

from .errors import MissingBoundaryParamError, NonFiniteError, OutOfRangeError
from .params import ModelParams

__all__ = [
    "ShapeResult",
    "MinimizeResult",
    "gpp",
    "gpp_boundary",
    "gpp_restricted",
    "characteristic_direction",
    "characteristic_slope",
    "minimize_scalarized",
    "variational_gpp",
    "translate_first_passage",
]

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ShapeResult:
    value: float
    branch: str  # strict_concave | flat_edge | boundary_dominated | bulk_dominated
    minimizer_u: float | None = None


class MinimizeResult(NamedTuple):
    value: float
    argmin: float
    at_boundary: bool  # objective decreasing on the whole interval, argmin = b


def _check_direction(s: float, t: float, p: float) -> None:
    if not (0.0 < p < 1.0):
        raise OutOfRangeError(f"p must lie in (0,1), got {p}")
    if s < 0.0 or t < 0.0 or (s == 0.0 and t == 0.0):
        raise OutOfRangeError(f"direction must be in the closed quadrant minus the origin, got ({s},{t})")


def gpp(s: float, t: float, p: float) -> ShapeResult:
    """Limiting passage time per unit of N in direction (s, t), i.i.d. model.

    (sqrt(p s) + sqrt((1-p) t))**2 - t below the critical slope, s on the
    flat edge t >= s(1-p)/p.
    """
    _check_direction(s, t, p)
    if t * p >= s * (1.0 - p):
        return ShapeResult(value=float(s), branch="flat_edge")
    value = (math.sqrt(p * s) + math.sqrt((1.0 - p) * t)) ** 2 - t
    return ShapeResult(value=value, branch="strict_concave")


def gpp_boundary(s: float, t: float, params: ModelParams) -> float:
    """Limiting passage time of the boundary model: s*u + t*p(1-u)/(u-p)."""
    if not params.has_boundary:
        raise MissingBoundaryParamError("boundary shape requires the u parameter")
    if s < 0.0 or t < 0.0:
        raise OutOfRangeError("direction must lie in the closed quadrant")
    p, u = params.p, float(params.u)
    return s * u + t * p * (1.0 - u) / (u - p)


def characteristic_slope(params: ModelParams) -> float:
    """(u-p)**2 / (p(1-p)): where the boundary and i.i.d. shapes coincide."""
    if not params.has_boundary:
        raise MissingBoundaryParamError("characteristic direction requires the u parameter")
    p, u = params.p, float(params.u)
    return (u - p) ** 2 / (p * (1.0 - p))


def characteristic_direction(params: ModelParams) -> tuple[float, float]:
    """Macroscopic characteristic direction (1, (u-p)^2 / (p(1-p)))."""
    return (1.0, characteristic_slope(params))


def gpp_restricted(s: float, t: float, params: ModelParams, first_step: str) -> float:
    """Limit of the passage time restricted to a fixed first step.

    Below the characteristic slope the e1-restricted paths feel the
    horizontal boundary (boundary shape); above it they behave like the
    bulk.  The e2 restriction is the mirror case.
    """
    if not params.has_boundary:
        raise MissingBoundaryParamError("first-step shapes require the u parameter")
    if first_step not in ("e1", "e2"):
        raise OutOfRangeError(f"first_step must be 'e1' or 'e2', got {first_step!r}")
    _check_direction(s, t, params.p)
    crit = characteristic_slope(params) * s
    if first_step == "e1":
        boundary = t < crit
    else:
        boundary = t > crit
    if boundary:
        return gpp_boundary(s, t, params)
    return gpp(s, t, params.p).value


def minimize_scalarized(
    h: Callable[[float], float],
    g: Callable[[float], float],
    s: float,
    t: float,
    interval: tuple[float, float],
    tol: float = 1e-10,
) -> MinimizeResult:
    """Minimize f(v) = s*h(v) + t*g(v) over the half-open interval (a, b].

    Assumes h increasing, g decreasing, and f strictly convex (caller
    asserted).  Detects the critical-line case where f is decreasing on the
    whole interval and the minimum sits at the right endpoint b.
    """
    a, b = interval
    if not b > a:
        raise OutOfRangeError(f"empty interval ({a},{b}]")

    def f(v: float) -> float:
        return s * h(v) + t * g(v)

    fb = f(b)
    if not math.isfinite(fb) and not math.isfinite(f(0.5 * (a + b))):
        raise NonFiniteError("objective is infinite on the interval")
    # decreasing at b means decreasing throughout (convexity)
    delta = max(tol, 1e-9 * (b - a))
    if f(b - delta) >= fb:
        return MinimizeResult(value=fb, argmin=b, at_boundary=True)

    lo = a + 1e-12 * (b - a)
    hi = b
    x1 = hi - _INVPHI * (hi - lo)
    x2 = lo + _INVPHI * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(300):
        if hi - lo <= tol:
            break
        if f1 <= f2 or not math.isfinite(f2):
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _INVPHI * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _INVPHI * (hi - lo)
            f2 = f(x2)
    xm = 0.5 * (lo + hi)
    fm = f(xm)
    if fb < fm:
        return MinimizeResult(value=fb, argmin=b, at_boundary=True)
    return MinimizeResult(value=fm, argmin=xm, at_boundary=False)


def variational_gpp(s: float, t: float, p: float) -> ShapeResult:
    """i.i.d. shape recovered as the infimum of boundary shapes over u.

    The value comes from the numeric minimizer; the reported minimizer is
    the closed form min(p + sqrt(t p (1-p) / s), 1), which hits 1 exactly
    on the flat edge.
    """
    _check_direction(s, t, p)
    if s == 0.0:
        return ShapeResult(value=0.0, branch="flat_edge", minimizer_u=1.0)
    res = minimize_scalarized(
        lambda u: u,
        lambda u: p * (1.0 - u) / (u - p),
        s,
        t,
        (p, 1.0),
    )
    u_star = min(p + math.sqrt(t * p * (1.0 - p) / s), 1.0)
    branch = gpp(s, t, p).branch
    return ShapeResult(value=res.value, branch=branch, minimizer_u=u_star)


def translate_first_passage(
    g_value: float, kappa: float, lam: float, tau0: float, m: float, n: float
) -> float:
    """Map a last-passage value to the first-passage cost scale.

    With horizontal costs kappa > lam and vertical cost tau0 per step, the
    optimal cost is (lam - kappa) * g + kappa * m + tau0 * n.
    """
    if kappa <= lam:
        raise OutOfRangeError(f"need kappa > lambda, got kappa={kappa}, lambda={lam}")
    return (lam - kappa) * g_value + kappa * m + tau0 * n
