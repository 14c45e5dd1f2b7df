"""Numerical kernel: adaptive Runge-Kutta integration, bracketed root finding
and adaptive Gauss-Kronrod quadrature.

Everything here is a pure function of its inputs. The higher level modules
(Bessel functions, disc spectra, soliton profiles) are built on these three
primitives only.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "Tolerance",
    "Trajectory",
    "NumericsError",
    "StepSizeError",
    "NonFiniteError",
    "BracketError",
    "ConvergenceError",
    "ode_solve",
    "root_find",
    "integrate",
]


class NumericsError(RuntimeError):
    """Base class for failures of the numerical kernel."""


class StepSizeError(NumericsError):
    """The adaptive step size underflowed; ``t`` is the failing abscissa."""

    def __init__(self, t: float, h: float):
        super().__init__(f"step size underflow at t={t!r} (h={h:.3e})")
        self.t = t
        self.h = h


class NonFiniteError(NumericsError):
    """A right-hand side or integrand returned inf/nan."""

    def __init__(self, where: float, what: str = "rhs"):
        super().__init__(f"non-finite {what} value at {where!r}")
        self.where = where


class BracketError(NumericsError, ValueError):
    """Root bracket endpoints do not straddle a sign change."""


class ConvergenceError(NumericsError):
    """An iterative method ran out of iterations or refinement depth."""


@dataclass(frozen=True)
class Tolerance:
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_iter: int = 200

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError(f"abs_tol must be positive, got {self.abs_tol}")
        if not self.rel_tol > 0:
            raise ValueError(f"rel_tol must be positive, got {self.rel_tol}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ValueError(f"max_iter must be a positive integer, got {self.max_iter}")


DEFAULT_TOL = Tolerance()


# ---------------------------------------------------------------------------
# Dormand-Prince 5(4) with Shampine's free 4th order interpolant
# ---------------------------------------------------------------------------

_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0])
_A = [np.array(row) for row in [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
]]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
# difference between the 5th order and embedded 4th order weights (7 stages, FSAL)
_E = np.array([-71 / 57600, 0.0, 71 / 16695, -71 / 1920, 17253 / 339200, -22 / 525, 1 / 40])
_P = np.array([
    [1, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0, 0, 0, 0],
    [0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0


@dataclass(frozen=True)
class Trajectory:
    """Accepted integration nodes plus the per-step data for dense output.

    ``t`` has shape (N,), ``y`` has shape (N, dim). Calling the trajectory
    evaluates the continuous extension anywhere in ``[t[0], t[-1]]``.
    """

    t: np.ndarray
    y: np.ndarray
    _q: np.ndarray  # (N-1, dim, 4) interpolant coefficients per step

    @property
    def span(self) -> tuple[float, float]:
        return float(self.t[0]), float(self.t[-1])

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        lo, hi = self.span
        if np.any(t_arr < lo) or np.any(t_arr > hi):
            raise ValueError(f"dense evaluation outside the integration span [{lo}, {hi}]")
        idx = np.clip(np.searchsorted(self.t, t_arr, side="right") - 1, 0, len(self.t) - 2)
        h = self.t[idx + 1] - self.t[idx]
        theta = (t_arr - self.t[idx]) / h
        powers = np.stack([theta, theta**2, theta**3, theta**4], axis=-1)
        q = self._q[idx]
        out = self.y[idx] + np.einsum("...dk,...k->...d", q, powers)
        return out


def _rms_norm(x: np.ndarray) -> float:
    return math.sqrt(float(x @ x) / x.size)


def _initial_step(rhs, t0, y0, f0, direction_span, order, tol: Tolerance) -> float:
    # Hairer, Norsett & Wanner, starting step heuristic
    scale = tol.abs_tol + tol.rel_tol * np.abs(y0)
    d0 = _rms_norm(y0 / scale)
    d1 = _rms_norm(f0 / scale)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, direction_span)
    f1 = np.asarray(rhs(t0 + h0, y0 + h0 * f0), dtype=float)
    d2 = _rms_norm((f1 - f0) / scale) / h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1.0 / (order + 1))
    return min(100 * h0, h1, direction_span)


def ode_solve(
    rhs: Callable[[float, np.ndarray], Sequence[float]],
    y0,
    span: tuple[float, float],
    tol: Tolerance = DEFAULT_TOL,
    max_steps: int = 1_000_000,
) -> Trajectory:
    """Integrate ``y' = rhs(t, y)`` over ``span`` with an embedded RK 5(4) pair.

    The local error of every accepted step satisfies
    ``|err_i| <= abs_tol + rel_tol * |y_i|`` in the RMS sense.

    Raises
    ------
    StepSizeError
        If the step size underflows (stiffness or a singularity).
    NonFiniteError
        If ``rhs`` returns a non-finite value.
    """
    t_lo, t_hi = float(span[0]), float(span[1])
    if not t_lo < t_hi:
        raise ValueError(f"span must satisfy t_lo < t_hi, got {span}")
    y = np.atleast_1d(np.asarray(y0, dtype=float)).copy()
    dim = y.size

    def call(t, yy):
        return np.asarray(rhs(t, yy), dtype=float).reshape(dim)

    t = t_lo
    f = call(t, y)
    if not np.isfinite(f).all():
        raise NonFiniteError(t)
    h = _initial_step(call, t, y, f, t_hi - t_lo, 4, tol)

    ts = [t]
    ys = [y.copy()]
    qs = []
    K = np.empty((7, dim))
    steps = 0
    while t < t_hi:
        if steps >= max_steps:
            raise ConvergenceError(f"ode_solve exceeded {max_steps} steps at t={t!r}")
        min_step = 16 * np.spacing(max(abs(t), 1e-300))
        if h < min_step:
            raise StepSizeError(t, h)
        if t + h > t_hi or t_hi - (t + h) < min_step:
            h = t_hi - t

        K[0] = f
        for s in range(1, 6):
            K[s] = call(t + _C[s] * h, y + h * (_A[s] @ K[:s]))
        y_new = y + h * (_B @ K[:6])
        f_new = call(t + h, y_new)
        K[6] = f_new
        # a non-finite stage value always poisons the combined stages
        if not np.isfinite(K).all():
            bad = int(np.argmin(np.isfinite(K).all(axis=1)))
            raise NonFiniteError(t + (_C[bad] if bad < 6 else 1.0) * h)

        err = h * (_E @ K)
        scale = tol.abs_tol + tol.rel_tol * np.maximum(np.abs(y), np.abs(y_new))
        err_norm = _rms_norm(err / scale)

        if err_norm <= 1.0:
            qs.append(h * (K.T @ _P))
            t_new = t_hi if h == t_hi - t else t + h
            t, y, f = t_new, y_new, f_new
            ts.append(t)
            ys.append(y.copy())
            factor = _MAX_FACTOR if err_norm == 0 else min(_MAX_FACTOR, _SAFETY * err_norm**-0.2)
            h *= factor
        else:
            h *= max(_MIN_FACTOR, _SAFETY * err_norm**-0.2)
        steps += 1

    return Trajectory(np.array(ts), np.array(ys), np.array(qs).reshape(len(qs), dim, 4))


# ---------------------------------------------------------------------------
# Root finding
# ---------------------------------------------------------------------------

def root_find(
    f: Callable[[float], float],
    bracket: tuple[float, float],
    tol: Tolerance = DEFAULT_TOL,
) -> float:
    """Find a root of ``f`` inside ``bracket`` by safeguarded secant steps.

    Secant (false position with Illinois down-weighting) is used while it
    shrinks the bracket quickly; otherwise the step falls back to bisection,
    so convergence is guaranteed for any continuous ``f`` with a sign change.

    Returns ``x`` with ``|f(x)| <= abs_tol`` or a final bracket narrower than
    ``rel_tol * |x|``.
    """
    a, b = float(bracket[0]), float(bracket[1])
    if a > b:
        a, b = b, a
    fa, fb = float(f(a)), float(f(b))
    if not (math.isfinite(fa) and math.isfinite(fb)):
        raise NonFiniteError(a if not math.isfinite(fa) else b, "function")
    if abs(fa) <= tol.abs_tol:
        return a
    if abs(fb) <= tol.abs_tol:
        return b
    if fa * fb > 0:
        raise BracketError(f"f({a})={fa} and f({b})={fb} have the same sign")

    replaced = None
    width_mark = b - a
    bisect = False
    for it in range(tol.max_iter):
        x = 0.5 * (a + b) if bisect else (a * fb - b * fa) / (fb - fa)
        if not a < x < b:
            x = 0.5 * (a + b)
        fx = float(f(x))
        if not math.isfinite(fx):
            raise NonFiniteError(x, "function")
        if abs(fx) <= tol.abs_tol:
            return x
        if (fx < 0) == (fa < 0):
            a, fa = x, fx
            if replaced == "a":
                fb *= 0.5
            replaced = "a"
        else:
            b, fb = x, fx
            if replaced == "b":
                fa *= 0.5
            replaced = "b"
        width = b - a
        if width <= tol.rel_tol * abs(x) or width <= 4 * np.spacing(max(abs(a), abs(b))):
            return x
        # every second step must at least halve the bracket, else bisect
        bisect = False
        if it % 2 == 1:
            bisect = width > 0.5 * width_mark
            width_mark = width
    raise ConvergenceError(f"root_find did not converge in {tol.max_iter} iterations; bracket [{a}, {b}]")


# ---------------------------------------------------------------------------
# Adaptive Gauss-Kronrod (7/15) quadrature
# ---------------------------------------------------------------------------

_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
# full 15-point node set on [-1, 1] and the matching weights
GK_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
GK_KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
GK_GAUSS_WEIGHTS = np.zeros(15)
GK_GAUSS_WEIGHTS[[1, 3, 5]] = _WG[:3]
GK_GAUSS_WEIGHTS[[13, 11, 9]] = _WG[:3]
GK_GAUSS_WEIGHTS[7] = _WG[3]


def _gk15(f, a, b, vectorized=False):
    centre = 0.5 * (a + b)
    half = 0.5 * (b - a)
    x = centre + half * GK_NODES
    if vectorized:
        fx = np.asarray(f(x), dtype=float)
    else:
        fx = np.array([f(xi) for xi in x], dtype=float)
    if not np.all(np.isfinite(fx)):
        bad = x[~np.isfinite(fx)][0]
        raise NonFiniteError(float(bad), "integrand")
    kronrod = half * (GK_KRONROD_WEIGHTS @ fx)
    gauss = half * (GK_GAUSS_WEIGHTS @ fx)
    return kronrod, abs(kronrod - gauss)


def integrate(
    f: Callable[[float], float],
    span: tuple[float, float],
    tol: Tolerance = DEFAULT_TOL,
    breakpoints: Sequence[float] = (),
    vectorized: bool = False,
) -> float:
    """Adaptive G7/K15 quadrature of ``f`` over ``span``.

    The interval with the largest error estimate is bisected until the summed
    estimate drops below ``max(abs_tol, rel_tol * |result|)``. ``max_iter``
    bounds the number of bisections. Optional ``breakpoints`` seed the initial
    partition; ``vectorized=True`` passes all 15 nodes of a panel to ``f`` as
    one array.
    """
    a, b = float(span[0]), float(span[1])
    if a == b:
        return 0.0
    sign = 1.0
    if a > b:
        a, b = b, a
        sign = -1.0
    edges = sorted({a, b, *(float(p) for p in breakpoints if a < p < b)})
    heap = []
    total = 0.0
    err_total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, err = _gk15(f, lo, hi, vectorized)
        heapq.heappush(heap, (-err, lo, hi, val))
        total += val
        err_total += err

    for _ in range(tol.max_iter):
        if err_total <= max(tol.abs_tol, tol.rel_tol * abs(total)):
            return float(sign * total)
        neg_err, lo, hi, val = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        v1, e1 = _gk15(f, lo, mid, vectorized)
        v2, e2 = _gk15(f, mid, hi, vectorized)
        total += v1 + v2 - val
        err_total += e1 + e2 + neg_err
        heapq.heappush(heap, (-e1, lo, mid, v1))
        heapq.heappush(heap, (-e2, mid, hi, v2))
    # re-sum to shed accumulated cancellation before the final check
    total = sum(item[3] for item in heap)
    err_total = sum(-item[0] for item in heap)
    if err_total <= max(tol.abs_tol, tol.rel_tol * abs(total)):
        return float(sign * total)
    raise ConvergenceError(
        f"integrate did not converge after {tol.max_iter} bisections: "
        f"estimate {total!r}, error {err_total:.3e}"
    )
