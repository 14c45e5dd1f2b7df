"""Command-line front end: ``polya-lab {spectrum,soliton,duality,report}``.

Settings are resolved as defaults < ``--config`` file < command-line flags.
The config file holds one ``key = value`` per line with ``#`` comments; its
keys are the long flag names with dashes replaced by underscores.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .disc_spectrum import SPECTRUM_COLUMNS, Boundary, DiscGeometry, enumerate_spectrum
from .duality_report import (
    DUALITY_COLUMNS, MAPPINGS, NEUMANN_SUM_COLUMNS, EWaveDefinition, MissingSolitonError,
    summary_report,
)
from .numerics import NumericsError, Tolerance
from .sigma_soliton import (
    DEFAULT_QUAD_GRID, SOLITON_COLUMNS, radial_dump, solitons_to_json, solve_soliton,
)

SUBCOMMANDS = ("spectrum", "soliton", "duality", "report")
FORMATS = ("csv", "json", "both")


class UsageError(ValueError):
    pass


class StageError(RuntimeError):
    def __init__(self, stage: str, exc: BaseException):
        super().__init__(f"{stage}: {exc}")
        self.stage = stage


@dataclass
class RunConfig:
    radius: float = 1.0
    count: int = 1000
    winding: list[int] = field(default_factory=lambda: [1, 2, 3])
    eps: list[float] = field(default_factory=lambda: [1e-1, 1e-2, 1e-3])
    mapping: str = "sequential"
    e_wave: str = "density"
    boundary: str = "dirichlet"
    abs_tol: float = 1e-300
    rel_tol: float = 1e-12
    max_iter: int = 200
    quad_grid: list[int] = field(default_factory=lambda: list(DEFAULT_QUAD_GRID))
    radial_dump: bool = False
    out: str = "."
    format: str = "both"

    def validate(self) -> None:
        if not self.radius > 0:
            raise UsageError(f"radius must be positive, got {self.radius}")
        if self.count < 1:
            raise UsageError(f"count must be positive, got {self.count}")
        if not self.winding or any(n < 1 for n in self.winding):
            raise UsageError(f"windings must be positive integers, got {self.winding}")
        if not self.eps or any(not 0 < e < 1.5707963267948966 for e in self.eps):
            raise UsageError(f"eps targets must lie in (0, pi/2), got {self.eps}")
        if self.mapping not in MAPPINGS:
            raise UsageError(f"unknown mapping {self.mapping!r}; choose from {sorted(MAPPINGS)}")
        if self.e_wave not in {d.value for d in EWaveDefinition}:
            raise UsageError(f"unknown e-wave definition {self.e_wave!r}")
        if self.boundary not in {b.value for b in Boundary}:
            raise UsageError(f"unknown boundary {self.boundary!r}")
        if self.format not in FORMATS:
            raise UsageError(f"unknown format {self.format!r}")
        if len(self.quad_grid) != 2 or min(self.quad_grid) < 1:
            raise UsageError(f"quad grid needs two positive sizes, got {self.quad_grid}")
        try:
            self.tolerance
        except ValueError as exc:
            raise UsageError(str(exc)) from None

    @property
    def tolerance(self) -> Tolerance:
        return Tolerance(self.abs_tol, self.rel_tol, self.max_iter)


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

def _ints(text: str) -> list[int]:
    return [int(v) for v in text.replace(",", " ").split()]


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.replace(",", " ").split()]


def _bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


_CONVERTERS = {
    "radius": float, "count": int, "winding": _ints, "eps": _floats,
    "mapping": str, "e_wave": str, "boundary": str,
    "abs_tol": float, "rel_tol": float, "max_iter": int,
    "quad_grid": _ints, "radial_dump": _bool, "out": str, "format": str,
}


def read_config_file(path: str | os.PathLike) -> dict:
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key = value")
            key, value = (part.strip() for part in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in _CONVERTERS:
                raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                values[key] = _CONVERTERS[key](value)
            except ValueError as exc:
                raise UsageError(f"{path}:{lineno}: {exc}") from None
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polya-lab",
        description="Disc spectra, sigma-model solitons and their energy comparison.",
    )
    sub = parser.add_subparsers(dest="command", metavar="{" + ",".join(SUBCOMMANDS) + "}")
    helps = {
        "spectrum": "enumerate the disc spectrum with Polya and Li-Yau diagnostics",
        "soliton": "shoot hedgehog soliton profiles and check the Bogomolny bound",
        "duality": "tabulate the wave/soliton energy chain and the Neumann sum",
        "report": "run everything and write the combined report",
    }
    S = argparse.SUPPRESS
    for name in SUBCOMMANDS:
        p = sub.add_parser(name, help=helps[name], argument_default=S)
        p.add_argument("--config", help="key = value settings file")
        p.add_argument("--radius", type=float, help="disc radius R0 (default 1)")
        p.add_argument("--count", type=int, help="number of ranked eigenvalues (default 1000)")
        p.add_argument("--winding", type=_ints, help="winding numbers, comma separated (default 1,2,3)")
        p.add_argument("--eps", type=_floats, help="boundary targets f(R0) (default 1e-1,1e-2,1e-3)")
        p.add_argument("--mapping", choices=sorted(MAPPINGS), help="rank-to-winding rule")
        p.add_argument("--e-wave", dest="e_wave", choices=[d.value for d in EWaveDefinition],
                       help="wave energy definition (default density)")
        p.add_argument("--boundary", choices=[b.value for b in Boundary],
                       help="boundary condition for `spectrum` (default dirichlet)")
        p.add_argument("--abs-tol", dest="abs_tol", type=float, help="shooting ODE absolute tolerance")
        p.add_argument("--rel-tol", dest="rel_tol", type=float, help="shooting ODE relative tolerance")
        p.add_argument("--max-iter", dest="max_iter", type=int, help="iteration cap")
        p.add_argument("--quad-grid", dest="quad_grid", type=_ints, help="charge grid NR,NTHETA")
        p.add_argument("--radial-dump", dest="radial_dump", action="store_true",
                       help="also write per-profile (r, f, f', density) tables")
        p.add_argument("--out", help="output directory (default .)")
        p.add_argument("--format", choices=FORMATS, help="csv, json or both (default both)")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    values = asdict(RunConfig())
    if getattr(args, "config", None):
        try:
            values.update(read_config_file(args.config))
        except OSError as exc:
            raise UsageError(f"cannot read config file: {exc}") from None
    for f in fields(RunConfig):
        if hasattr(args, f.name):
            values[f.name] = getattr(args, f.name)
    cfg = RunConfig(**values)
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def to_csv(rows: list[dict], columns) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row[c]) for c in columns])
    return buf.getvalue()


def to_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def config_hash(command: str, cfg: RunConfig) -> str:
    echo = {"command": command, **_echo(cfg)}
    return hashlib.sha256(json.dumps(echo, sort_keys=True).encode()).hexdigest()[:12]


def _echo(cfg: RunConfig) -> dict:
    # output location does not change results, so it stays out of the hash
    d = asdict(cfg)
    d.pop("out")
    d.pop("format")
    return d


def write_outputs(command: str, tables: dict, cfg: RunConfig, document: dict | None = None) -> list[Path]:
    """Write each table as CSV and/or JSON; return the written paths.

    ``tables`` maps a table name to ``(rows, columns, json_doc)``. When
    ``document`` is given it is the single JSON output and per-table JSON is
    skipped.
    """
    out = Path(cfg.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc
    stem = f"{command}_{format(cfg.radius, 'g')}_{config_hash(command, cfg)}"
    single = len(tables) == 1 and document is None
    written = []

    def put(path: Path, text: str):
        try:
            path.write_text(text, encoding="utf-8", newline="")
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc}") from exc
        written.append(path)

    echo = {"command": command, **_echo(cfg)}
    for name, (rows, columns, doc) in tables.items():
        base = stem if single else f"{stem}_{name}"
        if cfg.format in ("csv", "both"):
            put(out / f"{base}.csv", to_csv(rows, columns))
        if cfg.format in ("json", "both") and document is None and doc is not None:
            put(out / f"{base}.json", to_json({**doc, "config": echo}))
    if document is not None and cfg.format in ("json", "both"):
        put(out / f"{stem}.json", to_json({**document, "config": echo}))
    return written


# ---------------------------------------------------------------------------
# pipeline
# ---------------------------------------------------------------------------

def worker_count() -> int:
    cap = os.environ.get("POLYA_LAB_THREADS", "").strip()
    n = os.cpu_count() or 1
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            raise UsageError(f"POLYA_LAB_THREADS must be an integer, got {cap!r}") from None
    return n


def _solve_one(job):
    n, radius, eps, tol, quad_grid = job
    return solve_soliton(n, radius, eps, tol, quad_grid)


def _solve_all(cfg: RunConfig):
    jobs = [(n, cfg.radius, e, cfg.tolerance, tuple(cfg.quad_grid))
            for n in sorted(set(cfg.winding)) for e in sorted(set(cfg.eps), reverse=True)]
    workers = min(worker_count(), len(jobs))
    if workers <= 1:
        return [_solve_one(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_solve_one, jobs))


def _stage(name, fn, *args):
    try:
        return fn(*args)
    except (NumericsError, MissingSolitonError, ArithmeticError) as exc:
        raise StageError(name, exc) from exc


def _spectrum_tables(cfg, boundaries):
    geometry = DiscGeometry(cfg.radius)
    return {b: _stage(f"spectrum[{b}]", enumerate_spectrum, geometry, b, cfg.count) for b in boundaries}


def _spectrum_entry(table):
    return table.rows(), SPECTRUM_COLUMNS, table.to_json()


def _soliton_entries(results, cfg) -> dict:
    tables = {"soliton": ([r.row() for r in results], SOLITON_COLUMNS, solitons_to_json(results))}
    if cfg.radial_dump:
        for r in results:
            p = r.profile
            name = f"profile_n{p.n}_eps{format(p.eps_boundary, '.3g')}"
            tables[name] = (radial_dump(p), ("r", "f", "f_prime", "energy_density"), None)
    return tables


def _report_document(cfg, spectra, results):
    provenance = {
        "shoot_tolerance": asdict(cfg.tolerance),
        "quad_grid": list(cfg.quad_grid),
        "count": cfg.count,
    }
    return _stage(
        "duality", summary_report,
        spectra["dirichlet"], spectra.get("neumann"), results,
        cfg.mapping, cfg.e_wave, provenance,
    )


def _report_tables(doc) -> dict:
    tables = {}
    if "duality" in doc:
        tables["duality"] = (doc["duality"], DUALITY_COLUMNS, None)
    if "neumann_sum" in doc:
        tables["neumann_sum"] = (doc["neumann_sum"], NEUMANN_SUM_COLUMNS, None)
    return tables


def run(command: str, cfg: RunConfig) -> list[Path]:
    if command == "spectrum":
        table = _spectrum_tables(cfg, [cfg.boundary])[cfg.boundary]
        return write_outputs(command, {"spectrum": _spectrum_entry(table)}, cfg)
    if command == "soliton":
        results = _stage("soliton", _solve_all, cfg)
        return write_outputs(command, _soliton_entries(results, cfg), cfg)
    spectra = _spectrum_tables(cfg, ["dirichlet", "neumann"])
    results = _stage("soliton", _solve_all, cfg)
    doc = _report_document(cfg, spectra, results)
    tables = _report_tables(doc)
    if command == "report":
        tables = {
            "spectrum_dirichlet": _spectrum_entry(spectra["dirichlet"]),
            "spectrum_neumann": _spectrum_entry(spectra["neumann"]),
            **_soliton_entries(results, cfg),
            **tables,
        }
    return write_outputs(command, tables, cfg, document=doc)


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    if not argv:
        parser.print_usage(sys.stderr)
        print("polya-lab: error: a subcommand is required", file=sys.stderr)
        return 2
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        cfg = resolve_config(args)
        paths = run(args.command, cfg)
    except UsageError as exc:
        print(f"polya-lab: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"polya-lab: error: {exc}", file=sys.stderr)
        return 2
    except StageError as exc:
        print(f"polya-lab: numerical failure in stage {exc}", file=sys.stderr)
        return 1
    for p in paths:
        print(p)
    return 0


if __name__ == "__main__":
    sys.exit(main())
