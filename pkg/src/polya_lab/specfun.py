"""Bessel functions of the first kind and the zeros of J_m and J'_m.

Small arguments (``(x/2)**2 <= max(m, 1)``) use the power series, which is
free of cancellation there and keeps full relative accuracy for the tiny
values of high orders near the origin. Everywhere else the whole ladder
J_0 .. J_{m+1} comes from Miller's backward recurrence normalised with
``J_0 + 2 * sum(J_2k) = 1``.

Zeros are bracketed by a sign scan with a step smaller than the minimal
zero spacing of J_m and J'_m (both exceed 3), so no zero can be skipped, and
then polished with the safeguarded secant solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .numerics import Tolerance, root_find

MAX_ORDER = 200

_SCAN_STEP = 1.0
_ZERO_TOL = Tolerance(abs_tol=1e-16, rel_tol=1e-16, max_iter=200)


class BesselOrderError(ValueError):
    """Requested order is outside ``0 <= m <= MAX_ORDER``."""


@dataclass(frozen=True, order=True)
class BesselZero:
    """The ``j``-th positive zero of J_m (or of J'_m, depending on the producer)."""

    value: float
    m: int
    j: int

    def __post_init__(self):
        if not self.value > 0:
            raise ValueError("Bessel zero abscissa must be positive")
        if self.j < 1 or self.m < 0:
            raise ValueError(f"invalid zero label (m={self.m}, j={self.j})")


def _check_order(m):
    if int(m) != m or m < 0 or m > MAX_ORDER:
        raise BesselOrderError(f"order m={m} outside supported range 0..{MAX_ORDER}")


def _series(m: int, x: float) -> float:
    """Power series of J_m(x); intended for (x/2)^2 <= max(m, 1)."""
    q = 0.25 * x * x
    term = math.exp(m * math.log(0.5 * x) - math.lgamma(m + 1))
    total = term
    k = 0
    while True:
        k += 1
        term *= -q / (k * (k + m))
        total += term
        if abs(term) <= 1e-17 * abs(total):
            return total


def _miller(top: int, x: float) -> list[float]:
    """J_0(x) .. J_top(x) by normalised backward recurrence (x > 0)."""
    start = max(top, int(x)) + 20 + int(math.sqrt(50.0 * max(top, x, 1.0)))
    start += start % 2
    values = [0.0] * (top + 1)
    j_next, j_cur = 0.0, 1e-300
    norm = 0.0
    two_over_x = 2.0 / x
    for k in range(start, 0, -1):
        j_prev = k * two_over_x * j_cur - j_next
        j_next, j_cur = j_cur, j_prev
        if k - 1 <= top:
            values[k - 1] = j_cur
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2.0 * j_cur
        if abs(j_cur) > 1e250:
            j_cur *= 1e-250
            j_next *= 1e-250
            norm *= 1e-250
            for i in range(k - 1, top + 1):
                values[i] *= 1e-250
    norm += j_cur
    return [v / norm for v in values]


def _ladder(m: int, x: float) -> tuple[float, float, float]:
    """(J_{m-1}, J_m, J_{m+1}) at x > 0, with J_{-1} = -J_1."""
    if 0.25 * x * x <= max(m, 1):
        jm = _series(m, x)
        jp = _series(m + 1, x)
        jmm = _series(m - 1, x) if m >= 1 else -jp
        return jmm, jm, jp
    vals = _miller(m + 1, x)
    jmm = vals[m - 1] if m >= 1 else -vals[1]
    return jmm, vals[m], vals[m + 1]


def bessel_j(m: int, x: float) -> tuple[float, float]:
    """Return ``(J_m(x), J_m'(x))`` for integer ``0 <= m <= 200`` and ``x >= 0``."""
    _check_order(m)
    x = float(x)
    if x < 0:
        raise ValueError(f"bessel_j requires x >= 0, got {x}")
    if x == 0.0:
        return (1.0 if m == 0 else 0.0), (0.5 if m == 1 else 0.0)
    jmm, jm, jp = _ladder(m, x)
    return jm, 0.5 * (jmm - jp)


def bessel_jn(m: int, x: float) -> float:
    """J_m(x) only; also accepts negative orders via J_{-m} = (-1)^m J_m."""
    if m < 0:
        return (-1) ** m * bessel_j(-m, x)[0]
    return bessel_j(m, x)[0]


def _value(m, derivative):
    if derivative:
        return lambda x: bessel_j(m, x)[1]
    return lambda x: bessel_j(m, x)[0]


@lru_cache(maxsize=4096)
def _zeros(m: int, derivative: bool, count: int | None, xmax: float | None) -> tuple[float, ...]:
    f = _value(m, derivative)
    # first zero of J_m exceeds m; first nontrivial zero of J'_m is >= m
    lo = float(m) if m > 0 else (0.5 if derivative else 0.0)
    f_lo = f(lo)
    found: list[float] = []
    while True:
        if count is not None and len(found) >= count:
            return tuple(found)
        if xmax is not None and lo >= xmax:
            return tuple(z for z in found if z <= xmax)
        hi = lo + _SCAN_STEP
        f_hi = f(hi)
        if f_hi == 0.0:
            found.append(hi)
            hi = math.nextafter(hi, math.inf)
            f_hi = f(hi)
        elif f_lo * f_hi < 0:
            found.append(root_find(f, (lo, hi), _ZERO_TOL))
        lo, f_lo = hi, f_hi


def bessel_zeros(m: int, count: int) -> list[BesselZero]:
    """First ``count`` positive zeros of J_m, increasing."""
    _check_order(m)
    if count < 1:
        raise ValueError("count must be >= 1")
    return [BesselZero(z, m, j) for j, z in enumerate(_zeros(m, False, count, None), start=1)]


def bessel_prime_zeros(m: int, count: int) -> list[BesselZero]:
    """First ``count`` positive zeros of J'_m, increasing; x = 0 is never counted."""
    _check_order(m)
    if count < 1:
        raise ValueError("count must be >= 1")
    return [BesselZero(z, m, j) for j, z in enumerate(_zeros(m, True, count, None), start=1)]


def zeros_below(m: int, xmax: float, derivative: bool = False) -> list[float]:
    """All positive zeros of J_m (or J'_m) that do not exceed ``xmax``."""
    _check_order(m)
    return list(_zeros(m, derivative, None, float(xmax)))
