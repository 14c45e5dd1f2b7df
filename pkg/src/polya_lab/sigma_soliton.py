"""Hedgehog solitons of the O(3) sigma model on a disc.

With ``phi = (sin f cos n theta, sin f sin n theta, cos f)`` the static field
equation reduces to

    f'' + f'/r - n^2 sin(2 f) / (2 r^2) = 0,    f(0) = pi.

In ``s = ln r`` this is autonomous and conserves ``f_s^2/2 + n^2 cos(2f)/4``;
regularity at the origin pins the conserved value and leaves only the
first-order flow ``f_s = -n sin f``, i.e. ``f = 2 arctan((r0/r)^n)``. That
family never reaches ``f = 0`` at finite radius, so the outer boundary value
is relaxed to a small ``eps = f(R0) > 0``.

Energies use the sigma-model normalisation ``V = (1/4) int |grad phi|^2``;
the radial functional ``E_profile = 2 pi int (f'^2 + n^2 sin^2 f / r^2) r dr``
equals ``4 V``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .numerics import ConvergenceError, NumericsError, Tolerance, integrate, ode_solve, root_find

SOLITON_SCHEMA = "soliton/v1"
SOLITON_COLUMNS = (
    "n", "R0", "eps_boundary", "a", "V", "E_profile",
    "Q_analytic", "Q_quadrature", "bogomolny_margin", "mean_energy_density",
)
START_FRACTION = 1e-6
DEFAULT_QUAD_GRID = (8000, 16)


class ShootingError(NumericsError):
    """The shooting parameter could not be bracketed or the target was missed."""


class ChargeMismatchError(NumericsError):
    """Analytic and quadrature charges disagree beyond the requested tolerance."""

    def __init__(self, q_analytic, q_quadrature, tolerance):
        super().__init__(
            f"|Q_analytic - Q_quadrature| = {abs(q_analytic - q_quadrature):.3e} "
            f"exceeds {tolerance:.1e}; refine the quadrature grid"
        )
        self.q_analytic = q_analytic
        self.q_quadrature = q_quadrature


# quintic Hermite basis in t on [0, 1]: value/slope/curvature at each end.
# rows are basis functions, columns are coefficients of t^0 .. t^5
_HERMITE5 = np.array([
    [1, 0, 0, -10, 15, -6],
    [0, 1, 0, -6, 8, -3],
    [0, 0, 0.5, -1.5, 1.5, -0.5],
    [0, 0, 0, 10, -15, 6],
    [0, 0, 0, -4, 7, -3],
    [0, 0, 0, 0.5, -1, 0.5],
])
_HERMITE5_D1 = _HERMITE5[:, 1:] * np.arange(1, 6)


@dataclass(frozen=True, eq=False)
class Profile:
    """Radial profile ``f(r)`` sampled on ``grid`` with three derivatives.

    Between grid points ``f`` is the quintic Hermite interpolant of
    (f, f', f'') and ``f'`` the one of (f', f'', f'''); ``f''`` is the slope
    of the latter. Node errors in ``f'`` are thus amplified by ``1/h`` only.
    Below ``grid[0]`` the series ``f = f0 - a r^n`` is used.
    """

    n: int
    R0: float
    a: float
    grid: np.ndarray
    f: np.ndarray
    f_prime: np.ndarray
    f_second: np.ndarray
    f_third: np.ndarray
    f0: float = math.pi

    @property
    def r_start(self) -> float:
        return float(self.grid[0])

    @property
    def eps_boundary(self) -> float:
        return float(self.f[-1])

    def check(self, start_tol: float = 1e-6) -> None:
        """Raise ``ValueError`` if the profile breaks the regular-soliton invariants."""
        g = self.grid
        if not (g[0] > 0 and np.all(np.diff(g) > 0) and abs(g[-1] - self.R0) <= 1e-12 * self.R0):
            raise ValueError("profile grid must increase from (0, R0] and end at R0")
        series = self.f0 - self.a * g[0] ** self.n
        if abs(self.f[0] - series) > start_tol:
            raise ValueError(f"f(r_start) = {self.f[0]} departs from the series value {series}")
        # next to pi consecutive f values may coincide in floating point
        if not (np.all(np.diff(self.f) <= 0) and np.all(self.f_prime < 0)):
            raise ValueError("profile must be strictly decreasing")
        if not 0 < self.eps_boundary < math.pi:
            raise ValueError(f"boundary value {self.eps_boundary} outside (0, pi)")

    def evaluate(self, r):
        """``(f, f', f'')`` at radii ``r`` in ``(0, R0]``."""
        r = np.asarray(r, dtype=float)
        if np.any(r <= 0) or np.any(r > self.R0 * (1 + 1e-12)):
            raise ValueError(f"profile evaluated outside (0, {self.R0}]")
        shape = r.shape
        r = np.minimum(r, self.grid[-1]).reshape(-1)
        g = self.grid
        idx = np.clip(np.searchsorted(g, r, side="right") - 1, 0, len(g) - 2)
        h = g[idx + 1] - g[idx]
        t = (r - g[idx]) / h
        tp = np.stack([t**k for k in range(6)], axis=-1)
        w0 = tp @ _HERMITE5.T
        w1 = tp[:, :5] @ _HERMITE5_D1.T
        lo, hi = idx, idx + 1
        d0 = np.stack([
            self.f[lo], h * self.f_prime[lo], h * h * self.f_second[lo],
            self.f[hi], h * self.f_prime[hi], h * h * self.f_second[hi],
        ], axis=-1)
        d1 = np.stack([
            self.f_prime[lo], h * self.f_second[lo], h * h * self.f_third[lo],
            self.f_prime[hi], h * self.f_second[hi], h * h * self.f_third[hi],
        ], axis=-1)
        f = np.sum(w0 * d0, axis=-1)
        fp = np.sum(w0 * d1, axis=-1)
        fpp = np.sum(w1 * d1, axis=-1) / h

        inner = r < g[0]
        if np.any(inner):
            ri = r[inner]
            n = self.n
            f[inner] = self.f0 - self.a * ri**n
            fp[inner] = -n * self.a * ri ** (n - 1)
            fpp[inner] = -n * (n - 1) * self.a * ri ** (n - 2) if n > 1 else 0.0
        return f.reshape(shape), fp.reshape(shape), fpp.reshape(shape)


def profile_rhs(n: int):
    """Right-hand side of the first-order system (f, f')."""
    half_n2 = 0.5 * n * n

    def rhs(r, y):
        f, fp = y
        return (fp, -fp / r + half_n2 * math.sin(2.0 * f) / (r * r))

    return rhs


def _higher_derivatives(n, r, f, fp):
    """f'' and f''' of a solution, read off the profile equation."""
    n2 = n * n
    sin2, cos2 = np.sin(2.0 * f), np.cos(2.0 * f)
    fpp = -fp / r + 0.5 * n2 * sin2 / (r * r)
    fppp = -fpp / r + fp / (r * r) + n2 * cos2 * fp / (r * r) - n2 * sin2 / r**3
    return fpp, fppp


def bps_profile(n: int, r0: float, R0: float = 1.0, num: int = 2001) -> Profile:
    """Closed-form regular solution ``f = 2 arctan((r0/r)^n)`` on a geometric grid."""
    if not r0 > 0:
        raise ValueError(f"r0 must be positive, got {r0}")
    r = np.geomspace(START_FRACTION * R0, R0, num)
    w = (r0 / r) ** n
    f = 2.0 * np.arctan(w)
    s, c = np.sin(f), np.cos(f)
    fp = -n * s / r
    fpp = n * s * (n * c + 1.0) / (r * r)
    fppp = n * (n * (c * c - s * s) + c) * fp / (r * r) - 2.0 * n * s * (n * c + 1.0) / r**3
    return Profile(n, R0, 2.0 / r0**n, r, f, fp, fpp, fppp)


def vacuum_profile(n: int, R0: float = 1.0, num: int = 201) -> Profile:
    """``f = 0`` everywhere; the trivial solution with no charge and no energy."""
    r = np.geomspace(START_FRACTION * R0, R0, num)
    zero = np.zeros_like(r)
    return Profile(n, R0, 0.0, r, zero, zero, zero, zero, f0=0.0)


def perturb_profile(profile: Profile, amplitude: float = 0.1) -> Profile:
    """Add ``amplitude * sin(pi r / R0)`` (and its derivatives) to a profile."""
    k = math.pi / profile.R0
    r = profile.grid
    sin, cos = np.sin(k * r), np.cos(k * r)
    return replace(
        profile,
        f=profile.f + amplitude * sin,
        f_prime=profile.f_prime + amplitude * k * cos,
        f_second=profile.f_second - amplitude * k**2 * sin,
        f_third=profile.f_third - amplitude * k**3 * cos,
    )


# the deviation from pi starts near (a r_start^n) ~ 1e-15 for n = 3, so the
# shooting integration is controlled by relative error only
_SHOOT_ODE_TOL = Tolerance(abs_tol=1e-300, rel_tol=1e-12)
_SHOOT_ROOT_TOL = Tolerance(abs_tol=1e-12, rel_tol=1e-14, max_iter=100)


def shoot_profile(
    n: int,
    R0: float,
    eps_target: float,
    tol: Tolerance = _SHOOT_ODE_TOL,
    root_tol: Tolerance = _SHOOT_ROOT_TOL,
) -> Profile:
    """Solve the profile equation with ``f(0) = pi`` and ``f(R0) = eps_target``.

    Integrates outward from ``r_start = 1e-6 R0`` with the regular series
    data ``f = pi - a r^n + a^3 r^(3n) / 12`` and root-finds ``log a`` until
    ``|f(R0) - eps_target| <= 1e-9``.

    The unknown actually integrated is ``g = pi - f``, which obeys the same
    equation; near the origin ``f`` itself would hold only the few digits of
    ``g`` that survive next to pi.
    """
    if int(n) != n or n < 1:
        raise ValueError(f"winding number must be a positive integer, got {n}")
    if not 0 < eps_target < 0.5 * math.pi:
        raise ValueError(f"eps_target must lie in (0, pi/2), got {eps_target}")
    r_start = START_FRACTION * R0
    rhs = profile_rhs(n)

    def integrate_from(log_a):
        a = math.exp(log_a)
        g = a * r_start**n
        if g > 0.1:
            raise ShootingError(
                f"shooting amplitude a={a:.3e} invalidates the series start at r={r_start:.1e}"
            )
        # regular series g = a r^n - (a^3/12) r^(3n) + O(r^(5n)); the cubic term
        # keeps the start on the regular orbit to O((a r^n)^6)
        y0 = (g - g**3 / 12.0, (n * g - 0.25 * n * g**3) / r_start)
        return ode_solve(rhs, y0, (r_start, R0), tol)

    def miss(log_a):
        return (math.pi - float(integrate_from(log_a).y[-1, 0])) - eps_target

    # scale estimate from the regular family: f(R0) = eps  <=>  a = 2 / (R0^n tan(eps/2))
    guess = math.log(2.0 / (R0**n * math.tan(0.5 * eps_target)))
    step = 0.01
    lo, hi = guess - step, guess + step
    m_lo, m_hi = miss(lo), miss(hi)
    for _ in range(60):
        if m_lo > 0 > m_hi:
            break
        step *= 2.0
        if m_lo <= 0:
            lo -= step
            m_lo = miss(lo)
        if m_hi >= 0:
            hi += step
            m_hi = miss(hi)
    else:
        raise ShootingError(f"no bracket for the shooting amplitude (n={n}, eps={eps_target})")

    try:
        log_a = root_find(miss, (lo, hi), root_tol)
    except ConvergenceError as exc:
        raise ShootingError(str(exc)) from exc
    traj = integrate_from(log_a)
    r = traj.t
    f, fp = math.pi - traj.y[:, 0], -traj.y[:, 1]
    profile = Profile(n, R0, math.exp(log_a), r, f, fp, *_higher_derivatives(n, r, f, fp))
    if abs(profile.eps_boundary - eps_target) > 1e-9:
        raise ShootingError(
            f"shooting missed the boundary target: f(R0)={profile.eps_boundary!r}, target {eps_target!r}"
        )
    profile.check()
    return profile


# ---------------------------------------------------------------------------
# field, projection
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Field3:
    """Hedgehog field ``phi(r, theta)`` on the unit sphere built from a profile."""

    profile: Profile

    def __call__(self, r, theta):
        return self.with_derivatives(r, theta)[0]

    def with_derivatives(self, r, theta):
        """``phi``, ``d phi / dr`` and ``d phi / d theta``, each shaped (..., 3)."""
        r, theta = np.broadcast_arrays(np.asarray(r, float), np.asarray(theta, float))
        f, fp, _ = self.profile.evaluate(r)
        n = self.profile.n
        s, c = np.sin(f), np.cos(f)
        C, S = np.cos(n * theta), np.sin(n * theta)
        phi = np.stack([s * C, s * S, c], axis=-1)
        phi_r = fp[..., None] * np.stack([c * C, c * S, -s], axis=-1)
        phi_t = n * np.stack([-s * S, s * C, np.zeros_like(s)], axis=-1)
        return phi, phi_r, phi_t


def hedgehog_field(profile: Profile) -> Field3:
    return Field3(profile)


_POLE_GAP = 1e-8


def stereographic_project(phi, convention: str = "tan") -> complex:
    """Complex coordinate of a unit 3-vector.

    ``"tan"`` projects from phi_3 = -1, ``u = (phi_1 + i phi_2) / (1 + phi_3)``,
    giving ``u = tan(f/2) exp(i n theta)`` on a hedgehog. ``"cot"`` projects
    from phi_3 = +1, ``u = (phi_1 + i phi_2) / (1 - phi_3)``, which gives
    ``cot(f/2) exp(i n theta)``.
    """
    p1, p2, p3 = (float(v) for v in phi)
    if convention == "tan":
        denom = 1.0 + p3
    elif convention == "cot":
        denom = 1.0 - p3
    else:
        raise ValueError(f"unknown projection convention {convention!r}")
    if denom < _POLE_GAP:
        raise ValueError(f"point {phi} lies within {_POLE_GAP} of the projection pole")
    return complex(p1, p2) / denom


def stereographic_inverse(u: complex, convention: str = "tan") -> np.ndarray:
    uu = (u * u.conjugate()).real
    base = np.array([2.0 * u.real, 2.0 * u.imag, 0.0]) / (1.0 + uu)
    if convention == "tan":
        base[2] = (1.0 - uu) / (1.0 + uu)
    elif convention == "cot":
        base[2] = (uu - 1.0) / (1.0 + uu)
    else:
        raise ValueError(f"unknown projection convention {convention!r}")
    return base


def stereographic_roundtrip(phi, convention: str = "tan") -> tuple[complex, np.ndarray]:
    u = stereographic_project(phi, convention)
    return u, stereographic_inverse(u, convention)


# ---------------------------------------------------------------------------
# energies, charge, equation-of-motion residual
# ---------------------------------------------------------------------------

_ENERGY_TOL = Tolerance(abs_tol=1e-11, rel_tol=1e-12, max_iter=20000)


def energy_density(profile: Profile, r) -> np.ndarray:
    """``|grad phi|^2 = f'^2 + n^2 sin^2 f / r^2``."""
    f, fp, _ = profile.evaluate(r)
    r = np.asarray(r, float)
    return fp * fp + profile.n**2 * np.sin(f) ** 2 / (r * r)


def profile_energies(profile: Profile, tol: Tolerance = _ENERGY_TOL) -> tuple[float, float]:
    """``(V, E_profile)`` with ``E_profile = 4 V``.

    The radial integral runs in ``s = ln r`` where the integrand
    ``(f' r)^2 + n^2 sin^2 f`` is smooth; the disc ``r < r_start`` contributes
    ``2 pi n a^2 r_start^(2n)`` from the series.
    """
    n = profile.n

    def integrand(s):
        r = np.exp(s)
        f, fp, _ = profile.evaluate(r)
        return (fp * r) ** 2 + n * n * np.sin(f) ** 2

    edges = np.log(profile.grid)
    body = integrate(integrand, (edges[0], edges[-1]), tol, breakpoints=edges[1:-1], vectorized=True)
    core = n * profile.a**2 * profile.r_start ** (2 * n)
    E = 2.0 * math.pi * (body + core)
    return E / 4.0, E


def topological_charge(
    profile: Profile,
    quad_grid: tuple[int, int] = DEFAULT_QUAD_GRID,
    tolerance: float | None = 1e-6,
) -> tuple[float, float]:
    """Signed degree of the hedgehog map, analytically and by 2D quadrature.

    The quadrature evaluates ``phi . (d_r phi x d_theta phi)`` on a tensor
    grid, midpoint rule in ``ln r`` times the periodic trapezoid rule in
    theta; the disc below ``r_start`` is added in closed form. With the
    orientation ``dx dy = r dr dtheta`` a profile falling from pi to eps has
    ``Q = -(n/2)(1 + cos eps)``.

    Raises ``ChargeMismatchError`` when the two values differ by more than
    ``tolerance`` (pass ``None`` to skip the check).
    """
    n = profile.n
    n_r, n_t = quad_grid
    if n_r < 1 or n_t < 1:
        raise ValueError(f"quadrature grid must be positive, got {quad_grid}")
    q_analytic = 0.5 * n * (math.cos(profile.f0) - math.cos(profile.eps_boundary))

    s_lo, s_hi = math.log(profile.r_start), math.log(profile.R0)
    h = (s_hi - s_lo) / n_r
    r = np.exp(s_lo + (np.arange(n_r) + 0.5) * h)
    theta = 2.0 * math.pi * np.arange(n_t) / n_t
    rr, tt = np.meshgrid(r, theta, indexing="ij")
    phi, phi_r, phi_t = hedgehog_field(profile).with_derivatives(rr, tt)
    density = np.einsum("...i,...i->...", phi, np.cross(phi_r, phi_t))
    body = np.sum(density * rr) * h * (2.0 * math.pi / n_t) / (4.0 * math.pi)
    core = 0.5 * n * (math.cos(profile.f0) - math.cos(profile.f[0]))
    q_quadrature = float(body + core)

    if tolerance is not None and abs(q_analytic - q_quadrature) > tolerance:
        raise ChargeMismatchError(q_analytic, q_quadrature, tolerance)
    return q_analytic, q_quadrature


def eom_residual(profile: Profile, sample_points) -> float:
    """Max over samples and components of ``|Lap phi_a + (grad phi_b . grad phi_b) phi_a|``.

    ``f''`` is the second derivative of the profile's own interpolant, so a
    profile that does not solve the radial equation shows up here.
    """
    pts = np.asarray(sample_points, dtype=float).reshape(-1, 2)
    if len(pts) == 0:
        return 0.0
    r, theta = pts[:, 0], pts[:, 1]
    n = profile.n
    f, fp, fpp = profile.evaluate(r)
    s, c = np.sin(f), np.cos(f)
    C, S = np.cos(n * theta), np.sin(n * theta)
    phi = np.stack([s * C, s * S, c], axis=-1)
    d_f = np.stack([c * C, c * S, -s], axis=-1)
    phi_r = fp[:, None] * d_f
    phi_rr = fpp[:, None] * d_f - (fp * fp)[:, None] * phi
    phi_tt = -n * n * np.stack([s * C, s * S, np.zeros_like(s)], axis=-1)
    lap = phi_rr + phi_r / r[:, None] + phi_tt / (r * r)[:, None]
    grad2 = fp * fp + n * n * s * s / (r * r)
    return float(np.max(np.abs(lap + grad2[:, None] * phi)))


def sample_points(profile: Profile, count: int = 20, seed: int = 0) -> np.ndarray:
    """Reproducible random ``(r, theta)`` pairs with r uniform in ``(r_start, R0)``."""
    rng = np.random.default_rng(seed)
    r = rng.uniform(profile.r_start, profile.R0, count)
    theta = rng.uniform(0.0, 2.0 * math.pi, count)
    return np.column_stack([r, theta])


# ---------------------------------------------------------------------------
# full solve
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SolitonResult:
    profile: Profile
    V: float
    E_profile: float
    Q_analytic: float
    Q_quadrature: float
    quad_grid: tuple[int, int] = DEFAULT_QUAD_GRID

    @property
    def bogomolny_margin(self) -> float:
        return self.V - 2.0 * math.pi * abs(self.Q_quadrature)

    @property
    def area(self) -> float:
        return math.pi * self.profile.R0**2

    @property
    def mean_energy_density(self) -> float:
        return 4.0 * self.V / self.area

    def row(self) -> dict:
        p = self.profile
        return {
            "n": p.n,
            "R0": p.R0,
            "eps_boundary": p.eps_boundary,
            "a": p.a,
            "V": self.V,
            "E_profile": self.E_profile,
            "Q_analytic": self.Q_analytic,
            "Q_quadrature": self.Q_quadrature,
            "bogomolny_margin": self.bogomolny_margin,
            "mean_energy_density": self.mean_energy_density,
        }


def solve_soliton(
    n: int,
    R0: float = 1.0,
    eps_target: float = 1e-3,
    tol: Tolerance = _SHOOT_ODE_TOL,
    quad_grid: tuple[int, int] = DEFAULT_QUAD_GRID,
) -> SolitonResult:
    profile = shoot_profile(n, R0, eps_target, tol)
    V, E = profile_energies(profile)
    qa, qq = topological_charge(profile, quad_grid)
    return SolitonResult(profile, V, E, qa, qq, tuple(quad_grid))


def solitons_to_json(results) -> dict:
    return {
        "schema": SOLITON_SCHEMA,
        "columns": list(SOLITON_COLUMNS),
        "rows": [res.row() for res in results],
    }


def radial_dump(profile: Profile) -> list[dict]:
    """Per-node ``(r, f, f', energy density)`` rows for external plotting."""
    dens = energy_density(profile, profile.grid)
    return [
        {"r": float(r), "f": float(f), "f_prime": float(fp), "energy_density": float(e)}
        for r, f, fp, e in zip(profile.grid, profile.f, profile.f_prime, dens)
    ]
