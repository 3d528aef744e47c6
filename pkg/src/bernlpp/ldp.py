"""Right-tail rate-function calculus for the i.i.d. model.

The scaled log-moment generating function of the passage time has the
closed form (for xi >= 0, below the flat edge)

    jstar = s*log((A + 2s + sqrt(D)) / (2s(1-p(1-exp(-xi)))))
          + t*log((A + sqrt(D))(1-p(1-exp(-xi))) / (p(1-p)(t-s)E + sqrt(D)))

with E = exp(xi)+exp(-xi)-2, A = p(1-p)(s+t)E and discriminant
D = p(1-p)E(p(1-p)(s+t)**2 E + 4st); it equals the infimum over u in (p,1]
of s*C_B(u; xi) - t*C_G(rho(u); -xi), attained at the explicit point
``ustar``.  The large-deviation rate function is recovered by Legendre
inversion; the kappa-duals, infimal convolutions and the two-parameter
rate H tie the boundary increments to the bulk rate and are closed by the
consistency identity checked in ``rlem_gap``.

Monotone 1-D problems are solved by derivative-sign bisection; sampled
functions use fixed grids.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import (
    FlatRegimeError,
    GridMismatchError,
    MissingBoundaryParamError,
    OutOfRangeError,
)
from .params import (
    bernoulli_cgf,
    bernoulli_rate,
    geometric_cgf,
    rho_from,
    validate_params,
)
from .shapes import gpp, minimize_scalarized

__all__ = [
    "JstarResult",
    "jstar",
    "ustar",
    "istar",
    "rate_I",
    "rate_I_detail",
    "kappa_dual",
    "m_kappa",
    "kappa_rate",
    "inf_convolution",
    "H_rate",
    "rlem_gap",
]

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


class JstarResult(NamedTuple):
    value: float
    u_star: float | None


def _cosh_shift(xi: float) -> float:
    """exp(xi)+exp(-xi)-2 as (2 sinh(xi/2))**2, exact near zero."""
    return (2.0 * math.sinh(0.5 * xi)) ** 2


def _is_flat(s: float, t: float, p: float) -> bool:
    return t * p >= s * (1.0 - p)


def _jstar_closed(s: float, t: float, p: float, xi: float) -> JstarResult:
    e = _cosh_shift(xi)
    q = 1.0 - p * (1.0 - math.exp(-xi))  # 1-p+p*exp(-xi)
    a = p * (1.0 - p) * (s + t) * e
    delta = p * (1.0 - p) * e * (p * (1.0 - p) * (s + t) ** 2 * e + 4.0 * s * t)
    sq = math.sqrt(delta)
    term1 = s * math.log((a + 2.0 * s + sq) / (2.0 * s * q))
    if t == 0.0:
        term2 = 0.0
    else:
        term2 = t * math.log((a + sq) * q / (p * (1.0 - p) * (t - s) * e + sq))
    return JstarResult(value=term1 + term2, u_star=ustar(s, t, p, xi))


def _jstar_variational(s: float, t: float, p: float, xi: float) -> JstarResult:
    res = minimize_scalarized(
        lambda u: bernoulli_cgf(u, xi),
        lambda u: -geometric_cgf(rho_from(p, u), -xi),
        s,
        t,
        (p, 1.0),
    )
    return JstarResult(value=res.value, u_star=res.argmin)


def jstar(s: float, t: float, p: float, xi: float, method: str = "closed") -> JstarResult:
    """Limiting scaled log-MGF of the passage time at xi >= 0.

    ``closed`` evaluates the explicit formula, ``variational`` minimizes
    s*C_B(u; xi) - t*C_G(rho(u); -xi) over u in (p, 1] numerically; the two
    agree to well below 1e-8.  On the flat edge the value is s*xi with the
    minimizing u equal to 1.
    """
    if xi < 0.0:
        raise OutOfRangeError("jstar is defined for xi >= 0 (use istar for xi < 0)")
    if not (0.0 < p < 1.0):
        raise OutOfRangeError(f"p must lie in (0,1), got {p}")
    if s < 0.0 or t < 0.0:
        raise OutOfRangeError("direction must lie in the closed quadrant")
    if xi == 0.0:
        return JstarResult(value=0.0, u_star=None)
    if _is_flat(s, t, p):
        return JstarResult(value=s * xi, u_star=1.0)
    if method == "closed":
        return _jstar_closed(s, t, p, xi)
    if method == "variational":
        return _jstar_variational(s, t, p, xi)
    raise OutOfRangeError(f"method must be 'closed' or 'variational', got {method!r}")


def ustar(s: float, t: float, p: float, xi: float) -> float:
    """Minimizing boundary parameter of the variational form of ``jstar``.

    Defined below the flat edge for xi > 0; always lies in (p, 1].
    """
    if _is_flat(s, t, p):
        raise FlatRegimeError("no interior minimizer on the flat edge")
    if xi <= 0.0:
        raise OutOfRangeError("ustar requires xi > 0")
    e = _cosh_shift(xi)
    delta = p * (1.0 - p) * e * (p * (1.0 - p) * (s + t) ** 2 * e + 4.0 * s * t)
    num = p * (1.0 - p) * (s + t) * e + 2.0 * s * p * (1.0 - math.exp(-xi)) + math.sqrt(delta)
    den = 2.0 * s * ((1.0 - p) * (math.exp(xi) - 1.0) + p * (1.0 - math.exp(-xi)))
    return num / den


def istar(s: float, t: float, p: float, xi: float) -> float:
    """Legendre dual of the full rate function: jstar for xi > 0, 0 at 0,
    xi * gpp for xi < 0."""
    if xi > 0.0:
        return jstar(s, t, p, xi).value
    if xi == 0.0:
        return 0.0
    return xi * gpp(s, t, p).value


def _jstar_prime(s: float, t: float, p: float, xi: float) -> float:
    """d/dxi jstar via the envelope theorem: the xi-derivative of the
    variational objective at the minimizing u."""
    if _is_flat(s, t, p):
        return s
    if xi == 0.0:
        return gpp(s, t, p).value
    u = ustar(s, t, p, xi)
    rho = rho_from(p, u)
    qexp = (1.0 - rho) * math.exp(-xi)
    return s * u * math.exp(xi) / (1.0 - u + u * math.exp(xi)) + t * qexp / (1.0 - qexp)


class RateDetail(NamedTuple):
    value: float
    xi_argmax: float
    saturated: bool  # maximizer hit xi_max (r approaching its supremum s)


def rate_I_detail(s: float, t: float, p: float, r: float, xi_max: float = 50.0) -> RateDetail:
    """Full rate function with the maximizing xi of the Legendre supremum."""
    if xi_max <= 0.0:
        raise OutOfRangeError("xi_max must be positive")
    g0 = gpp(s, t, p).value
    if r < g0 or r > s:
        return RateDetail(value=math.inf, xi_argmax=math.nan, saturated=False)
    if t == 0.0:
        return RateDetail(value=s * bernoulli_rate(p, r / s), xi_argmax=math.nan, saturated=False)
    if r <= g0:
        return RateDetail(value=0.0, xi_argmax=0.0, saturated=False)
    if r >= _jstar_prime(s, t, p, xi_max):
        value = r * xi_max - jstar(s, t, p, xi_max).value
        return RateDetail(value=value, xi_argmax=xi_max, saturated=True)
    lo, hi = 0.0, xi_max
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _jstar_prime(s, t, p, mid) < r:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-14 * max(1.0, hi):
            break
    xi = 0.5 * (lo + hi)
    return RateDetail(value=max(r * xi - jstar(s, t, p, xi).value, 0.0), xi_argmax=xi, saturated=False)


def rate_I(s: float, t: float, p: float, r: float, xi_max: float = 50.0) -> float:
    """Full large-deviation rate of the passage time at speed N.

    Infinite outside [gpp(s,t), s]; on that interval it is the right-tail
    rate, recovered as sup over xi in [0, xi_max] of r*xi - jstar(xi).
    """
    return rate_I_detail(s, t, p, r, xi_max).value


def _rate_J(s: float, t: float, p: float, x: float, xi_max: float = 50.0) -> float:
    """Right-tail rate on the rectangle (s, t): zero at and below gpp."""
    if s == 0.0:
        return 0.0 if x <= 0.0 else math.inf
    if x > s:
        return math.inf
    if t == 0.0:
        return s * bernoulli_rate(p, x / s)
    if x <= gpp(s, t, p).value:
        return 0.0
    return rate_I_detail(s, t, p, x, xi_max).value


def _check_boundary(p: float, u: float | None) -> float:
    if u is None:
        raise MissingBoundaryParamError("operation requires the boundary parameter u")
    validate_params(p, u)
    return float(u)


def kappa_dual(a: float, t: float, p: float, u: float | None, xi: float) -> float:
    """Scaled log-MGF of the boundary-increment difference process.

    For a <= 0 the process is minus a geometric sum over a stretch t+a; for
    a > 0 it adds an independent Bernoulli(u) sum of length a.  Infinite at
    and below the geometric pole xi = log(p(1-u)/(u(1-p))).
    """
    u = _check_boundary(p, u)
    if a < -t:
        raise OutOfRangeError(f"need a >= -t, got a={a}, t={t}")
    if a <= 0.0 and t + a == 0.0:
        return 0.0  # empty stretch: the process is identically zero
    rho = rho_from(p, u)
    if rho < 1.0 and xi <= math.log1p(-rho):
        return math.inf
    geo = geometric_cgf(rho, -xi)
    if a <= 0.0:
        return (t + a) * geo
    return t * geo + a * bernoulli_cgf(u, xi)


def m_kappa(a: float, t: float, p: float, u: float | None) -> float:
    """Law-of-large-numbers limit (rightmost zero of the rate) of the
    boundary-increment difference: -(t+a)E[J] for a <= 0, a*u - t*E[J] for
    a > 0, with E[J] = p(1-u)/(u-p)."""
    u = _check_boundary(p, u)
    if a < -t:
        raise OutOfRangeError(f"need a >= -t, got a={a}, t={t}")
    ej = p * (1.0 - u) / (u - p)
    if a <= 0.0:
        return -(t + a) * ej
    return a * u - t * ej


def _kappa_support_max(a: float) -> float:
    return 0.0 if a <= 0.0 else a


def kappa_rate(a: float, t: float, p: float, u: float | None, x: float) -> float:
    """Rate function of the boundary-increment difference: numeric Legendre
    transform of ``kappa_dual`` by derivative-sign bisection.

    The supremum of the support (0 for a <= 0, else a) is handled by its
    analytic limit; beyond it the rate is infinite.
    """
    u = _check_boundary(p, u)
    if a < -t:
        raise OutOfRangeError(f"need a >= -t, got a={a}, t={t}")
    rho = rho_from(p, u)
    xmax = _kappa_support_max(a)
    if x > xmax:
        return math.inf
    if a <= 0.0 and t + a == 0.0:
        return 0.0  # empty stretch
    if rho >= 1.0:
        return 0.0 if a <= 0.0 or x < xmax else -a * math.log(u)
    if x == xmax:
        if a <= 0.0:
            return -(t + a) * math.log(rho)
        return -a * math.log(u) - t * math.log(rho)

    def dual_prime(xi: float) -> float:
        q = (1.0 - rho) * math.exp(-xi)
        geo = -q / (1.0 - q)
        if a <= 0.0:
            return (t + a) * geo
        return t * geo + a * u * math.exp(xi) / (1.0 - u + u * math.exp(xi))

    lo = math.log1p(-rho) + 1e-13
    hi = 1.0
    while dual_prime(hi) < x and hi < 700.0:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if dual_prime(mid) < x:
            lo = mid
        else:
            hi = mid
    xi = 0.5 * (lo + hi)
    return max(x * xi - kappa_dual(a, t, p, u, xi), 0.0)


def inf_convolution(grid: np.ndarray, f: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Infimal convolution of two sampled extended-real functions.

    Both functions must be sampled on the same uniform grid containing 0;
    each needs a zero somewhere on the grid.  Below the sum of the two
    rightmost zeros the result is 0; elsewhere the search is restricted to
    the window [rightmost zero of f, sup supp f  ^  (r - rightmost zero of g)].
    Points of g falling off the grid count as +inf.
    """
    grid = np.asarray(grid, dtype=float)
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    if grid.ndim != 1 or grid.size < 2 or f.shape != grid.shape or g.shape != grid.shape:
        raise GridMismatchError("grid, f, g must be equal-length 1-D arrays")
    h = grid[1] - grid[0]
    if h <= 0 or np.max(np.abs(np.diff(grid) - h)) > 1e-9 * max(h, 1.0):
        raise GridMismatchError("grid must be uniform and increasing")
    k0 = int(round(-grid[0] / h))
    if not (0 <= k0 < grid.size) or abs(grid[k0]) > 1e-9 * max(h, 1.0):
        raise GridMismatchError("grid must contain 0")

    zf = np.nonzero(f == 0.0)[0]
    zg = np.nonzero(g == 0.0)[0]
    if zf.size == 0 or zg.size == 0:
        raise OutOfRangeError("both functions need a zero on the grid")
    ia_f, ia_g = zf[-1], zg[-1]
    finite_f = np.nonzero(np.isfinite(f))[0]
    ib = finite_f[-1]

    out = np.full(grid.size, math.inf)
    for k in range(grid.size):
        j_hi = min(ib, k - ia_g + k0)
        if grid[k] <= grid[ia_f] + grid[ia_g]:
            out[k] = 0.0
            continue
        if j_hi < ia_f:
            continue
        js = np.arange(ia_f, j_hi + 1)
        ig = k - js + k0
        ok = (ig >= 0) & (ig < grid.size)
        if not ok.any():
            continue
        out[k] = np.min(f[js[ok]] + g[ig[ok]])
    return out


def _vbar_rect(b: float, s: float, t: float) -> tuple[float, float]:
    """Rectangle left after removing the macroscopic exit segment of b."""
    if b <= 0.0:
        return s, t + b
    return s - b, t


def _golden_min(fn, lo: float, hi: float, tol: float = 1e-11) -> float:
    if hi <= lo:
        return fn(lo)
    x1 = hi - _INVPHI * (hi - lo)
    x2 = lo + _INVPHI * (hi - lo)
    f1, f2 = fn(x1), fn(x2)
    for _ in range(300):
        if hi - lo <= tol:
            break
        if f1 <= f2 or not math.isfinite(f2):
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _INVPHI * (hi - lo)
            f1 = fn(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _INVPHI * (hi - lo)
            f2 = fn(x2)
    return min(fn(0.5 * (lo + hi)), fn(lo), fn(hi))


def H_rate(
    a: float,
    b: float,
    s: float,
    t: float,
    p: float,
    u: float | None,
    r: float,
    xi_max: float = 50.0,
) -> float:
    """Rate of the sum of a boundary-increment difference (parameter a) and
    an independent bulk passage time on the rectangle shrunk by the exit b.

    Zero below the sum of the two means; otherwise the infimal convolution
    of ``kappa_rate`` and the right-tail bulk rate over the admissible
    window, solved by golden-section on the convex integrand.
    """
    u = _check_boundary(p, u)
    if not (-t <= a <= s) or not (-t <= b <= s):
        raise OutOfRangeError(f"a and b must lie in [-t, s], got a={a}, b={b}")
    s2, t2 = _vbar_rect(b, s, t)
    if s2 == 0.0 and t2 == 0.0:
        m_j = 0.0
    else:
        m_j = gpp(s2, t2, p).value if s2 > 0.0 else 0.0
    m_k = m_kappa(a, t, p, u)
    if r < m_k + m_j:
        return 0.0
    xlo = max(m_k, r - s2)
    xhi = min(_kappa_support_max(a), r - m_j)
    if xhi < xlo:
        return math.inf

    def objective(x: float) -> float:
        return kappa_rate(a, t, p, u, x) + _rate_J(s2, t2, p, r - x, xi_max)

    return _golden_min(objective, xlo, xhi)


def rlem_gap(
    s: float,
    t: float,
    p: float,
    u: float | None,
    r: float,
    a_grid_size: int = 400,
    xi_max: float = 50.0,
) -> float:
    """Whole-pipeline consistency metric.

    Distance between the direct Bernoulli(u) row rate s*I_B(r/s) and the
    same quantity reassembled from the kappa/bulk decomposition, minimized
    over an exit grid of the given size.  Converges to zero as the grid
    refines.
    """
    u = _check_boundary(p, u)
    if not (0.0 <= r <= s):
        raise OutOfRangeError(f"need r in [0, s], got {r}")
    lhs = s * bernoulli_rate(u, r / s)
    grid = np.linspace(-t, s, a_grid_size)
    rhs = min(H_rate(a, a, s, t, p, u, r, xi_max) for a in grid)
    return abs(lhs - rhs)
