"""Standard normal and Student-t distribution functions.

Kept dependency-free: the normal CDF goes through the complementary error
function, and the t CDF through the regularized incomplete beta function
evaluated with the modified Lentz continued fraction (Numerical Recipes
style), which is accurate well past the 1e-8 needed here.
"""

from __future__ import annotations

import math

_SQRT2 = math.sqrt(2.0)
_CF_EPS = 3e-16
_CF_FPMIN = 1e-300
_CF_MAXIT = 300


def normal_cdf(z: float) -> float:
    """Standard normal CDF via erfc: ``Phi(z) = erfc(-z/sqrt(2)) / 2``."""
    return 0.5 * math.erfc(-z / _SQRT2)


def normal_sf2(z: float) -> float:
    """Two-sided tail ``2*(1 - Phi(|z|))`` without cancellation for large z.

    Floored at the smallest positive float: a p-value of exactly 0 is never
    reported even where erfc underflows (|z| > ~38).
    """
    if math.isnan(z):
        return math.nan
    return max(math.erfc(abs(z) / _SQRT2), 5e-324)


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """``I_x(a, b)`` for a, b > 0 and x in [0, 1]."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    # continued fraction converges fastest on the side of the symmetry point
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def _betacf(a: float, b: float, x: float) -> float:
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_FPMIN:
        d = _CF_FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAXIT + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_FPMIN:
            d = _CF_FPMIN
        c = 1.0 + aa / c
        if abs(c) < _CF_FPMIN:
            c = _CF_FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_FPMIN:
            d = _CF_FPMIN
        c = 1.0 + aa / c
        if abs(c) < _CF_FPMIN:
            c = _CF_FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def student_t_cdf(t: float, df: int) -> float:
    """CDF of Student's t with *df* degrees of freedom."""
    if df < 1:
        raise ValueError(f"df must be >= 1, got {df}")
    if math.isnan(t):
        return math.nan
    if t == 0.0:
        return 0.5
    x = df / (df + t * t)
    tail = 0.5 * regularized_incomplete_beta(0.5 * df, 0.5, x)
    return 1.0 - tail if t > 0 else tail


def student_t_critical(level: float, df: int) -> float:
    """One-sided critical value: the t with ``CDF(t, df) == level``.

    Bisection on the CDF; *level* must be in (0.5, 1).
    """
    if not 0.5 < level < 1.0:
        raise ValueError(f"level must be in (0.5, 1), got {level}")
    lo, hi = 0.0, 2.0
    while student_t_cdf(hi, df) < level:
        hi *= 2.0
        if hi > 1e12:
            raise ArithmeticError("critical value bracket failed")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if student_t_cdf(mid, df) < level:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-13 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)
