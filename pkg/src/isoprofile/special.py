"""Closed-form constants: sphere volumes, unit-ball volumes, Euclidean
isoperimetric constants and the sine-power integral."""

from __future__ import annotations

import math

import numpy as np
from scipy.special import betainc, gammaln

__all__ = [
    "DomainError",
    "sphere_volume",
    "ball_volume",
    "euclidean_constant",
    "sin_power_integral",
    "sin_power_ratio",
]


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


def sphere_volume(m: int) -> float:
    """Volume V_m of the unit round sphere S^m (V_0 = 2 counts two points)."""
    if m < 0:
        raise DomainError(f"sphere dimension must be >= 0, got {m}")
    a = 0.5 * (m + 1)
    return 2.0 * math.exp(a * math.log(math.pi) - math.lgamma(a))


def ball_volume(n: int) -> float:
    """Volume of the unit disk D^n_1 in R^n."""
    if n < 1:
        raise DomainError(f"ball dimension must be >= 1, got {n}")
    return math.exp(0.5 * n * math.log(math.pi) - math.lgamma(0.5 * n + 1.0))


def euclidean_constant(n: int) -> float:
    """gamma_n = V_{n-1} / Vol(D^n_1)^{(n-1)/n}, so that I_{R^n}(v) = gamma_n v^{(n-1)/n}."""
    if n < 2:
        raise DomainError(f"Euclidean isoperimetric constant needs n >= 2, got {n}")
    return sphere_volume(n - 1) / ball_volume(n) ** ((n - 1) / n)


def _half_integral(k: int, y):
    # int_0^y sin^k for y in [0, pi/2] via the regularized incomplete beta function
    a = 0.5 * (k + 1)
    full_half = 0.5 * math.exp(gammaln(a) + gammaln(0.5) - gammaln(a + 0.5))
    return full_half * betainc(a, 0.5, np.sin(y) ** 2)


def sin_power_integral(k: int, y):
    """int_0^y sin^k(s) ds for y in [0, pi], vectorized.

    Uses the incomplete beta function with the reflection s -> pi - s past pi/2,
    so the value keeps full relative precision near both ends.
    """
    if k < 0:
        raise DomainError(f"sine power must be >= 0, got {k}")
    y = np.asarray(y, dtype=float)
    if k == 0:
        return y.copy() if y.ndim else float(y)
    total = math.exp(gammaln(0.5 * (k + 1)) + gammaln(0.5) - gammaln(0.5 * k + 1.0))
    lower = np.minimum(y, math.pi - y)
    val = _half_integral(k, lower)
    out = np.where(y <= 0.5 * math.pi, val, total - val)
    return out if out.ndim else float(out)


def sin_power_ratio(k: int, y):
    """int_0^y sin^k / sin^k(y), accurate as y -> 0 where both factors underflow."""
    y = np.asarray(y, dtype=float)
    small = y < 1e-4
    with np.errstate(divide="ignore", invalid="ignore", under="ignore"):
        direct = sin_power_integral(k, y) / np.sin(y) ** k
    series = y / (k + 1) * (1.0 + k * y * y / (3.0 * (k + 3)))
    out = np.where(small, series, direct)
    return out if out.ndim else float(out)
