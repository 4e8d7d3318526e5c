"""Ordinary least squares with Student-t inference."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

TRANSFORMS = ("identity", "log-x")

_EPS = 1e-16
_TINY = 1e-300


def _betacf(a: float, b: float, x: float, max_iter: int = 500) -> float:
    """Continued fraction for the incomplete beta function (modified Lentz)."""
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def betainc(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function I_x(a, b)."""
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    if x == 0.0 or x == 1.0:
        return x
    log_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                 + a * math.log(x) + b * math.log1p(-x))
    front = math.exp(log_front)
    # the fraction converges fast only below the mean; use symmetry above it
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def t_sf_two_sided(t: float, dof: float) -> float:
    """P(|T| > |t|) for Student's t with ``dof`` degrees of freedom."""
    if dof <= 0:
        raise ValueError("dof must be positive")
    if math.isnan(t):
        return math.nan
    if math.isinf(t):
        return 0.0
    return betainc(0.5 * dof, 0.5, dof / (dof + t * t))


def t_cdf(t: float, dof: float) -> float:
    tail = 0.5 * t_sf_two_sided(t, dof)
    return 1.0 - tail if t >= 0 else tail


@dataclass(frozen=True)
class RegressionReport:
    a: float
    b: float
    stderr_a: float
    stderr_b: float
    p_a: float
    p_b: float
    n: int
    transform: str
    r_squared: float

    def to_dict(self) -> dict:
        return asdict(self)


def _p_value(coef: float, stderr: float, dof: int) -> float:
    if stderr == 0.0:
        return 1.0 if coef == 0.0 else 0.0
    return min(1.0, max(0.0, t_sf_two_sided(coef / stderr, dof)))


def ols(x, y, transform: str = "identity") -> RegressionReport:
    """Fit ``y = a + b x`` (or ``y = a + b ln x``) with two-sided t-test p-values."""
    if transform not in TRANSFORMS:
        raise ValueError(f"transform must be one of {TRANSFORMS}, got {transform!r}")
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-d sequences of equal length")
    n = x.size
    if n < 3:
        raise ValueError(f"need at least 3 points, got {n}")
    if transform == "log-x":
        if np.any(x <= 0):
            raise ValueError("log-x transform needs x > 0")
        x = np.log(x)
    xm = x.mean()
    # an exactly constant y must give b == 0, not a rounding residue
    ym = y[0] if np.all(y == y[0]) else y.mean()
    dx, dy = x - xm, y - ym
    sxx = float(dx @ dx)
    if sxx == 0.0 or not np.any(x != x[0]):
        raise ValueError("x has zero variance")
    b = float(dx @ dy) / sxx
    a = float(ym - b * xm)
    resid = y - (a + b * x)
    sse = float(resid @ resid)
    dof = n - 2
    s2 = sse / dof
    stderr_b = math.sqrt(s2 / sxx)
    stderr_a = math.sqrt(s2 * (1.0 / n + xm * xm / sxx))
    syy = float(dy @ dy)
    r_squared = 1.0 - sse / syy if syy > 0 else 1.0
    return RegressionReport(
        a=a, b=b, stderr_a=stderr_a, stderr_b=stderr_b,
        p_a=_p_value(a, stderr_a, dof), p_b=_p_value(b, stderr_b, dof),
        n=n, transform=transform, r_squared=r_squared)
