"""Dirichlet and Neumann spectra of the disc and the classical bounds on them.

Eigenfunctions are ``J_m(k r) (a cos m theta + b sin m theta)``; the wavenumber
is ``k = alpha / R0`` with ``alpha`` a zero of J_m (Dirichlet) or of J'_m
(Neumann), and the Laplacian eigenvalue is ``lambda = k**2``. Modes with
``m >= 1`` carry the cos/sin pair and therefore occupy two consecutive ranks.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .numerics import Tolerance, integrate
from .specfun import bessel_j, bessel_jn, bessel_zeros, zeros_below

SPECTRUM_SCHEMA = "spectrum/v1"
SPECTRUM_COLUMNS = (
    "rank", "m", "j", "boundary", "k", "lambda",
    "multiplicity_source", "polya_ratio", "liyau_margin",
)


class Boundary(str, enum.Enum):
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"


@dataclass(frozen=True)
class DiscGeometry:
    R0: float = 1.0

    def __post_init__(self):
        if not (self.R0 > 0 and math.isfinite(self.R0)):
            raise ValueError(f"disc radius must be positive, got {self.R0}")

    @property
    def A(self) -> float:
        return math.pi * self.R0 * self.R0

    @property
    def r_inradius(self) -> float:
        return self.R0


@dataclass(frozen=True)
class Mode:
    m: int
    j: int
    boundary: Boundary
    k: float

    @property
    def lam(self) -> float:
        return self.k * self.k

    @property
    def multiplicity(self) -> int:
        return 1 if self.m == 0 else 2


@dataclass(frozen=True)
class SpectrumEntry:
    rank: int
    mode: Mode
    copy: int  # 1 = cos partner, 2 = sin partner

    @property
    def lam(self) -> float:
        return self.mode.lam


@dataclass
class SpectrumTable:
    """The N lowest eigenvalues, expanded by multiplicity and ranked from 1.

    If N cuts a degenerate pair, only its first member is kept. The Neumann
    constant mode (mu = 0) is not ranked.
    """

    geometry: DiscGeometry
    boundary: Boundary
    entries: list[SpectrumEntry]
    polya_ratio: list[float] = field(default_factory=list)
    liyau_margin: list[float | None] = field(default_factory=list)

    @property
    def eigenvalues(self) -> list[float]:
        return [e.lam for e in self.entries]

    def __len__(self):
        return len(self.entries)

    def rows(self) -> list[dict]:
        out = []
        for e, ratio, margin in zip(self.entries, self.polya_ratio, self.liyau_margin):
            out.append({
                "rank": e.rank,
                "m": e.mode.m,
                "j": e.mode.j,
                "boundary": self.boundary.value,
                "k": e.mode.k,
                "lambda": e.lam,
                "multiplicity_source": f"{e.copy}/{e.mode.multiplicity}",
                "polya_ratio": ratio,
                "liyau_margin": margin,
            })
        return out

    def to_json(self) -> dict:
        return {
            "schema": SPECTRUM_SCHEMA,
            "R0": self.geometry.R0,
            "A": self.geometry.A,
            "boundary": self.boundary.value,
            "count": len(self.entries),
            "columns": list(SPECTRUM_COLUMNS),
            "rows": self.rows(),
        }


def _modes_below(alpha_max: float, boundary: Boundary) -> list[tuple[float, int, int]]:
    derivative = boundary is Boundary.NEUMANN
    found = []
    m = 0
    # zeros of J_m and nontrivial zeros of J'_m all exceed m
    while m <= alpha_max:
        zs = zeros_below(m, alpha_max, derivative=derivative)
        if not zs and m > 0:
            break
        found.extend((z, m, j) for j, z in enumerate(zs, start=1))
        m += 1
    return found


def enumerate_spectrum(geometry: DiscGeometry, boundary: Boundary | str, N: int) -> SpectrumTable:
    """The ``N`` smallest eigenvalues of the disc with the given boundary condition.

    Every zero below a cutoff is collected for every order that can have one,
    so the table is complete up to that cutoff; the cutoff starts from the
    Weyl estimate and grows until it covers ``N`` eigenvalues.
    """
    boundary = Boundary(boundary)
    if int(N) != N or N < 1:
        raise ValueError(f"N must be a positive integer, got {N}")
    # Weyl: lambda_N R0^2 ~ 4 N, plus margin for the boundary correction
    alpha_max = math.sqrt(4.0 * N) + 3.0 * N ** 0.25 + 4.0
    while True:
        modes = _modes_below(alpha_max, boundary)
        total = sum(1 if m == 0 else 2 for _, m, _ in modes)
        if total >= N:
            break
        alpha_max *= 1.25
    modes.sort(key=lambda t: (t[0], t[1], t[2]))

    entries: list[SpectrumEntry] = []
    for alpha, m, j in modes:
        mode = Mode(m, j, boundary, alpha / geometry.R0)
        for copy in range(1, mode.multiplicity + 1):
            if len(entries) == N:
                break
            entries.append(SpectrumEntry(len(entries) + 1, mode, copy))
        if len(entries) == N:
            break

    table = SpectrumTable(geometry, boundary, entries)
    table.polya_ratio = polya_ratios(table)
    table.liyau_margin = li_yau_margins(table) if boundary is Boundary.DIRICHLET else [None] * N
    return table


def polya_ratios(table: SpectrumTable) -> list[float]:
    """``lambda_n * A / (4 pi n)`` per rank; >= 1 is Polya's bound, <= 1 its Neumann form."""
    if not table.entries:
        raise ValueError("empty spectrum table")
    A = table.geometry.A
    return [e.lam * A / (4.0 * math.pi * e.rank) for e in table.entries]


def li_yau_margins(table: SpectrumTable) -> list[float]:
    """``sum_{j<=n} lambda_j - 2 pi n^2 / A`` per rank (Dirichlet only)."""
    if table.boundary is not Boundary.DIRICHLET:
        raise ValueError("Li-Yau margins are defined for Dirichlet tables only")
    A = table.geometry.A
    out = []
    partial = 0.0
    for e in table.entries:
        partial += e.lam
        out.append(partial - 2.0 * math.pi * e.rank**2 / A)
    return out


# ---------------------------------------------------------------------------
# radial energy functional
# ---------------------------------------------------------------------------

_ENERGY_TOL = Tolerance(abs_tol=1e-13, rel_tol=1e-12, max_iter=2000)


def _origin_piece(m: int, k: float, delta: float) -> float:
    # leading behaviour of the integrand on [0, delta]: R ~ (k r / 2)^m / m!
    if m == 0:
        return -0.5 * k * k * delta * delta + 0.1875 * k**4 * delta**4
    c = (0.5 * k) ** m / math.factorial(m)
    return m * c * c * delta ** (2 * m)


def radial_energy(m: int, k: float, geometry: DiscGeometry, tol: Tolerance = _ENERGY_TOL) -> float:
    """``int_0^R0 (R'^2 + (m^2/r^2 - k^2) R^2) r dr`` for ``R(r) = J_m(k r)``."""
    if not k > 0:
        raise ValueError(f"wavenumber must be positive, got {k}")
    R0 = geometry.R0
    delta = 1e-6 * R0

    def integrand(r):
        J, Jp = bessel_j(m, k * r)
        return (k * k * Jp * Jp + (m * m / (r * r) - k * k) * J * J) * r

    alpha = k * R0
    # panels about two radians of Bessel argument wide
    breaks = [delta + i * (R0 - delta) / math.ceil(alpha / 2.0) for i in range(1, math.ceil(alpha / 2.0))]
    return _origin_piece(m, k, delta) + integrate(integrand, (delta, R0), tol, breakpoints=breaks)


def bessel_energy_identity(m: int, j: int, geometry: DiscGeometry, tol: Tolerance = _ENERGY_TOL) -> tuple[float, float]:
    """Both sides of the Bessel-recurrence reduction of the eigenfunction energy.

    lhs integrates the energy of ``J_m(k r)`` with ``k`` the ``j``-th Dirichlet
    wavenumber; rhs is ``(1/2) int_0^alpha (J_{m-1}^2 + J_{m+1}^2 - 2 J_m^2) x dx``.
    Both vanish for eigen-wavenumbers.
    """
    alpha = bessel_zeros(m, j)[-1].value
    k = alpha / geometry.R0
    lhs = radial_energy(m, k, geometry, tol)

    def integrand(x):
        a, b, c = bessel_jn(m - 1, x), bessel_jn(m + 1, x), bessel_jn(m, x)
        return 0.5 * (a * a + b * b - 2.0 * c * c) * x

    breaks = [alpha * i / math.ceil(alpha / 2.0) for i in range(1, math.ceil(alpha / 2.0))]
    rhs = integrate(integrand, (0.0, alpha), tol, breakpoints=breaks)
    return lhs, rhs


def inradius_constant(table: SpectrumTable) -> float:
    """``lambda_1 * r_inradius**2`` (a pure number; (alpha_0^1)^2 for the disc)."""
    if table.boundary is not Boundary.DIRICHLET:
        raise ValueError("inradius constant uses the Dirichlet ground state")
    return table.entries[0].lam * table.geometry.r_inradius**2
