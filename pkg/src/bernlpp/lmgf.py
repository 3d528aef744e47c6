"""Limiting log-moment generating functions of the boundary model.

For xi > 0 the scaled log-MGF of the boundary passage time is piecewise
linear in (s, t): below a critical slope the horizontal boundary dominates
(s*C_B(u; xi) - t*C_G(rho; -xi)), above it the vertical one
(t*C_G(rho; xi) - s*C_B(u; -xi)), and at or beyond the geometric pole
xi = log(u(1-p)/(p(1-u))) it is infinite.  The first-step-restricted
versions switch instead between a boundary branch and the bulk value at
slopes given by ratios of u-derivatives of the two cumulant generating
functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, MissingBoundaryParamError, OutOfRangeError
from .ldp import istar
from .params import ModelParams, bernoulli_cgf, geometric_cgf
from .shapes import characteristic_slope

__all__ = [
    "LmgfResult",
    "pole_xi",
    "k_threshold",
    "ell_threshold",
    "lambda_boundary",
]

_POLE_PAD = 1e-12  # values this close to the pole are reported infinite


@dataclass(frozen=True)
class LmgfResult:
    value: float
    regime: str  # boundary_hor | boundary_ver | bulk | infinite
    thresholds: tuple[float, float, float]  # (k_plus, k_minus, ell)


def _require_u(params: ModelParams) -> tuple[float, float, float]:
    if not params.has_boundary:
        raise MissingBoundaryParamError("boundary log-MGF requires the u parameter")
    return params.p, float(params.u), float(params.rho)


def pole_xi(params: ModelParams) -> float:
    """Pole log(u(1-p)/(p(1-u))) of the vertical-boundary MGF; inf at u=1."""
    _, _, rho = _require_u(params)
    if rho >= 1.0:
        return math.inf
    return -math.log1p(-rho)


def _dcb_du(u: float, y: float) -> float:
    """u-derivative of the Bernoulli cumulant generating function at y."""
    em = math.expm1(y)
    return em / (1.0 + u * em)


def _dcg_du(p: float, u: float, y: float) -> float:
    """u-derivative of C_G(rho(u); y); requires y below the pole."""
    return 1.0 / (u - p) - (1.0 - p + p * math.exp(y)) / (u * (1.0 - p) - p * (1.0 - u) * math.exp(y))


def k_threshold(params: ModelParams, xi: float, sign: str) -> float:
    """Critical slope t/s where a first-step-restricted log-MGF changes branch.

    sign='plus' gives the horizontal-restriction slope
    dC_B(u; xi)/du / dC_G(rho(u); -xi)/du, sign='minus' the vertical one with
    the arguments negated.  At xi = 0 both degenerate to the characteristic
    slope, which is returned as the documented limit.  Closed-form
    derivatives; finite differences serve as a test oracle only.
    """
    p, u, _ = _require_u(params)
    if sign not in ("plus", "minus"):
        raise OutOfRangeError(f"sign must be 'plus' or 'minus', got {sign!r}")
    if xi < 0.0:
        raise OutOfRangeError("xi must be nonnegative")
    if xi == 0.0:
        return characteristic_slope(params)
    if sign == "plus":
        return _dcb_du(u, xi) / _dcg_du(p, u, -xi)
    if xi >= pole_xi(params):
        raise DomainError("k(-xi) is undefined at and beyond the geometric pole")
    return _dcb_du(u, -xi) / _dcg_du(p, u, xi)


def ell_threshold(params: ModelParams, xi: float) -> float:
    """Crossover slope of the full boundary log-MGF:
    (C_B(xi)+C_B(-xi)) / (C_G(xi)+C_G(-xi)).

    Sandwiched between k(-xi) and k(xi); tends to the characteristic slope
    as xi -> 0 (returned at xi = 0) and to the flat-edge slope (1-p)/p as
    u -> 1 (returned at u = 1, where both branches coincide anyway).
    """
    p, u, rho = _require_u(params)
    if xi < 0.0:
        raise OutOfRangeError("xi must be nonnegative")
    if xi == 0.0:
        return characteristic_slope(params)
    if rho >= 1.0:
        return (1.0 - p) / p
    if xi >= pole_xi(params):
        raise DomainError("ell is undefined at and beyond the geometric pole")
    num = bernoulli_cgf(u, xi) + bernoulli_cgf(u, -xi)
    den = geometric_cgf(rho, xi) + geometric_cgf(rho, -xi)
    return num / den


def lambda_boundary(
    s: float, t: float, params: ModelParams, xi: float, part: str = "full"
) -> LmgfResult:
    """Limiting scaled log-MGF of the boundary passage time at xi >= 0.

    part='hor'/'ver' restrict the first step to e1/e2; 'full' is their
    pointwise maximum.  The vertical and full versions are infinite at and
    beyond the geometric pole (and within 1e-12 of it, to avoid overflow
    artifacts); the horizontal one stays finite for every xi.
    """
    p, u, rho = _require_u(params)
    if part not in ("hor", "ver", "full"):
        raise OutOfRangeError(f"part must be 'hor', 'ver' or 'full', got {part!r}")
    if s < 0.0 or t < 0.0:
        raise OutOfRangeError("direction must lie in the closed quadrant")
    if xi < 0.0:
        raise OutOfRangeError("xi must be nonnegative")

    pole = pole_xi(params)
    below_pole = xi < pole - _POLE_PAD
    k_plus = k_threshold(params, xi, "plus")
    k_minus = k_threshold(params, xi, "minus") if below_pole else math.nan
    ell = ell_threshold(params, xi) if (below_pole or rho >= 1.0) else math.nan
    thresholds = (k_plus, k_minus, ell)

    if xi == 0.0:
        return LmgfResult(value=0.0, regime="bulk", thresholds=thresholds)

    hor_formula = s * bernoulli_cgf(u, xi) - t * geometric_cgf(rho, -xi)

    if part == "hor":
        if t < k_plus * s:
            return LmgfResult(value=hor_formula, regime="boundary_hor", thresholds=thresholds)
        return LmgfResult(value=istar(s, t, p, xi), regime="bulk", thresholds=thresholds)

    if not below_pole and rho < 1.0:
        return LmgfResult(value=math.inf, regime="infinite", thresholds=thresholds)

    ver_formula = t * geometric_cgf(rho, xi) - s * bernoulli_cgf(u, -xi)

    if part == "ver":
        if t > k_minus * s:
            return LmgfResult(value=ver_formula, regime="boundary_ver", thresholds=thresholds)
        return LmgfResult(value=istar(s, t, p, xi), regime="bulk", thresholds=thresholds)

    # full
    if t < ell * s:
        return LmgfResult(value=hor_formula, regime="boundary_hor", thresholds=thresholds)
    return LmgfResult(value=ver_formula, regime="boundary_ver", thresholds=thresholds)
