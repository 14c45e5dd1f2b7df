"""Wave/soliton comparison tables and the summary report.

Nothing here asserts the comparisons: each inequality is evaluated and its
truth value recorded. The mode-to-winding map and the meaning of the wave
energy are both open choices, so both are parameters.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

from .disc_spectrum import Boundary, SpectrumTable, inradius_constant
from .sigma_soliton import SolitonResult

REPORT_SCHEMA = "report/v1"
CHAIN_RTOL = 1e-6

DUALITY_COLUMNS = (
    "rank", "m", "j", "lambda", "N", "soliton_V", "soliton_mean_density",
    "e_wave", "e_soliton", "e_bound", "wave_ge_soliton", "soliton_ge_bound",
)
NEUMANN_SUM_COLUMNS = ("n", "lambda_plus_mu", "target", "deviation", "ratio")


class EWaveDefinition(str, enum.Enum):
    DENSITY = "density"
    DIMENSIONLESS = "dimensionless"


class MissingSolitonError(LookupError):
    def __init__(self, winding: int):
        super().__init__(f"no soliton with winding n={winding} supplied")
        self.winding = winding


class RankMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class MappingRule:
    """Maps a spectral rank and mode ``(m, j)`` to a soliton winding ``N >= 1``."""

    name: str
    rule: Callable[[int, int, int], int]

    def __call__(self, rank: int, m: int, j: int) -> int:
        N = self.rule(rank, m, j)
        if int(N) != N or N < 1:
            raise ValueError(f"mapping {self.name!r} produced invalid winding {N}")
        return int(N)


MAPPINGS = {
    "sequential": MappingRule("sequential", lambda rank, m, j: rank),
    "zero_index": MappingRule("zero_index", lambda rank, m, j: j),
    "order_plus_index": MappingRule("order_plus_index", lambda rank, m, j: m + j),
}


def get_mapping(name: str) -> MappingRule:
    try:
        return MAPPINGS[name]
    except KeyError:
        raise ValueError(f"unknown mapping {name!r}; choose from {sorted(MAPPINGS)}") from None


@dataclass(frozen=True)
class DualityRow:
    rank: int
    m: int
    j: int
    lam: float
    N: int
    soliton_V: float
    soliton_mean_density: float
    chain_values: tuple[float, float, float]
    chain_holds: tuple[bool, bool]

    def row(self) -> dict:
        e_wave, e_sol, bound = self.chain_values
        return {
            "rank": self.rank,
            "m": self.m,
            "j": self.j,
            "lambda": self.lam,
            "N": self.N,
            "soliton_V": self.soliton_V,
            "soliton_mean_density": self.soliton_mean_density,
            "e_wave": e_wave,
            "e_soliton": e_sol,
            "e_bound": bound,
            "wave_ge_soliton": self.chain_holds[0],
            "soliton_ge_bound": self.chain_holds[1],
        }


def _at_least(a: float, b: float) -> bool:
    return a >= b - CHAIN_RTOL * abs(b)


def _best_by_winding(solitons) -> dict[int, SolitonResult]:
    # the smallest boundary value is the closest to the strict f(R0) = 0 problem
    best: dict[int, SolitonResult] = {}
    for s in solitons:
        n = s.profile.n
        if n not in best or s.profile.eps_boundary < best[n].profile.eps_boundary:
            best[n] = s
    return best


def duality_table(
    spectrum: SpectrumTable,
    solitons,
    mapping: MappingRule,
    e_wave_definition: EWaveDefinition | str = EWaveDefinition.DENSITY,
) -> list[DualityRow]:
    """Evaluate ``E_wave >= E_soliton >= E_bound`` for every rank of ``spectrum``.

    density:       (lambda_n, 4V/A, 8 pi N/A), all with units 1/length^2
    dimensionless: (lambda_n A/4, V, 2 pi N)
    """
    definition = EWaveDefinition(e_wave_definition)
    if spectrum.boundary is not Boundary.DIRICHLET:
        raise ValueError("duality table needs a Dirichlet spectrum")
    A = spectrum.geometry.A
    best = _best_by_winding(solitons)
    rows = []
    for e in spectrum.entries:
        m, j = e.mode.m, e.mode.j
        N = mapping(e.rank, m, j)
        if N not in best:
            raise MissingSolitonError(N)
        sol = best[N]
        if definition is EWaveDefinition.DENSITY:
            chain = (e.lam, sol.mean_energy_density, 8.0 * math.pi * N / A)
        else:
            chain = (e.lam * A / 4.0, sol.V, 2.0 * math.pi * N)
        holds = (_at_least(chain[0], chain[1]), _at_least(chain[1], chain[2]))
        rows.append(DualityRow(e.rank, m, j, e.lam, N, sol.V, sol.mean_energy_density, chain, holds))
    return rows


def neumann_sum_table(dirichlet: SpectrumTable, neumann: SpectrumTable) -> list[dict]:
    """``lambda_n + mu_n`` against ``8 pi n / A`` rank by rank."""
    if dirichlet.boundary is not Boundary.DIRICHLET or neumann.boundary is not Boundary.NEUMANN:
        raise ValueError("expected a Dirichlet and a Neumann table")
    if len(dirichlet) != len(neumann):
        raise RankMismatchError(f"rank ranges differ: {len(dirichlet)} vs {len(neumann)}")
    if dirichlet.geometry != neumann.geometry:
        raise ValueError("tables belong to different discs")
    A = dirichlet.geometry.A
    out = []
    for d, nm in zip(dirichlet.entries, neumann.entries):
        total = d.lam + nm.lam
        target = 8.0 * math.pi * d.rank / A
        out.append({
            "n": d.rank,
            "lambda_plus_mu": total,
            "target": target,
            "deviation": total - target,
            "ratio": total / target,
        })
    return out


def summary_report(
    dirichlet: SpectrumTable,
    neumann: SpectrumTable | None = None,
    solitons=(),
    mapping: MappingRule | str = "sequential",
    e_wave_definition: EWaveDefinition | str = EWaveDefinition.DENSITY,
    provenance: dict | None = None,
) -> dict:
    """Collect every spectral and soliton diagnostic into one plain document.

    With no solitons only the spectral sections are filled in.
    """
    if dirichlet.boundary is not Boundary.DIRICHLET:
        raise ValueError("summary report needs a Dirichlet table")
    if isinstance(mapping, str):
        mapping = get_mapping(mapping)
    definition = EWaveDefinition(e_wave_definition)
    solitons = list(solitons)

    doc: dict = {
        "schema": REPORT_SCHEMA,
        "R0": dirichlet.geometry.R0,
        "A": dirichlet.geometry.A,
        "inradius_constant": inradius_constant(dirichlet),
        "dirichlet": {
            "count": len(dirichlet),
            "polya_ratio_min": min(dirichlet.polya_ratio),
            "polya_ratio_max": max(dirichlet.polya_ratio),
            "liyau_margin_min": min(dirichlet.liyau_margin),
        },
    }
    if neumann is not None:
        doc["neumann"] = {
            "count": len(neumann),
            "polya_ratio_min": min(neumann.polya_ratio),
            "polya_ratio_max": max(neumann.polya_ratio),
        }
        k = min(len(dirichlet), len(neumann))
        doc["neumann_sum"] = neumann_sum_table(_head(dirichlet, k), _head(neumann, k))

    if solitons:
        ordered = sorted(solitons, key=lambda s: (s.profile.n, -s.profile.eps_boundary))
        doc["solitons"] = [s.row() for s in ordered]
        doc["bogomolny_margins"] = [s.bogomolny_margin for s in ordered]
        windings = set(_best_by_winding(ordered))
        # only ranks whose winding is available enter the comparison
        usable = []
        for e in dirichlet.entries:
            if mapping(e.rank, e.mode.m, e.mode.j) not in windings:
                break
            usable.append(e)
        if usable:
            head = SpectrumTable(dirichlet.geometry, dirichlet.boundary, usable)
            doc["duality"] = [r.row() for r in duality_table(head, ordered, mapping, definition)]
        else:
            doc["duality"] = []

    doc["provenance"] = {
        "mapping": mapping.name,
        "e_wave_definition": definition.value,
        "chain_rtol": CHAIN_RTOL,
        **(provenance or {}),
    }
    return doc


def _head(table: SpectrumTable, k: int) -> SpectrumTable:
    return SpectrumTable(
        table.geometry, table.boundary, table.entries[:k],
        table.polya_ratio[:k], table.liyau_margin[:k],
    )
