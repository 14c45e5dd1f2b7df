import csv
import json
import os

import pytest

from polya_lab.cli import RunConfig, UsageError, build_parser, main, read_config_file, resolve_config

FAST = ["--winding", "1", "--eps", "0.1", "--count", "20"]


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_no_arguments_prints_usage(capsys):
    assert main([]) == 2
    assert "usage" in capsys.readouterr().err


def test_unknown_flag(capsys):
    assert main(["spectrum", "--bogus"]) == 2
    assert "unrecognized" in capsys.readouterr().err


def test_invalid_range(tmp_path, capsys):
    assert main(["soliton", "--eps", "2.0", "--out", str(tmp_path)]) == 2
    assert "eps" in capsys.readouterr().err
    assert main(["spectrum", "--radius", "-1", "--out", str(tmp_path)]) == 2


def test_spectrum_csv(tmp_path):
    assert main(["spectrum", "--radius", "1", "--count", "6", "--format", "csv", "--out", str(tmp_path)]) == 0
    files = list(tmp_path.iterdir())
    assert len(files) == 1 and files[0].name.startswith("spectrum_1_") and files[0].suffix == ".csv"
    lam = [float(r["lambda"]) for r in _rows(files[0])]
    assert lam[0] == pytest.approx(5.7832, abs=1e-4)
    assert lam[1] == pytest.approx(14.6820, abs=1e-4)
    assert len(lam) == 6


def test_spectrum_both_formats(tmp_path):
    assert main(["spectrum", "--count", "4", "--boundary", "neumann", "--out", str(tmp_path)]) == 0
    names = sorted(p.suffix for p in tmp_path.iterdir())
    assert names == [".csv", ".json"]
    doc = json.loads(next(tmp_path.glob("*.json")).read_text())
    assert doc["schema"] == "spectrum/v1"
    assert doc["boundary"] == "neumann"
    assert doc["config"]["count"] == 4


def test_soliton_row(tmp_path):
    assert main(["soliton", "--winding", "1", "--eps", "1e-3", "--format", "csv", "--out", str(tmp_path)]) == 0
    (row,) = _rows(next(tmp_path.glob("*.csv")))
    assert -1e-6 <= float(row["bogomolny_margin"]) <= 1e-6


def test_radial_dump(tmp_path):
    assert main(["soliton", *FAST, "--radial-dump", "--format", "csv", "--out", str(tmp_path)]) == 0
    dumps = list(tmp_path.glob("*profile_n1*.csv"))
    assert len(dumps) == 1
    assert list(_rows(dumps[0])[0]) == ["r", "f", "f_prime", "energy_density"]


def test_csv_uses_17_digits(tmp_path):
    main(["spectrum", "--count", "1", "--format", "csv", "--out", str(tmp_path)])
    row = _rows(next(tmp_path.glob("*.csv")))[0]
    assert row["lambda"] == format(float(row["lambda"]), ".17g")


def test_config_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# test settings\nradius = 2.0\ncount = 7  # inline\nwinding = 1, 2\ne-wave = dimensionless\n")
    parser = build_parser()
    resolved = resolve_config(parser.parse_args(["spectrum", "--config", str(cfg), "--count", "9"]))
    assert resolved.radius == 2.0
    assert resolved.count == 9
    assert resolved.winding == [1, 2]
    assert resolved.e_wave == "dimensionless"
    assert resolve_config(parser.parse_args(["spectrum"])) == RunConfig()


def test_every_flag_has_config_key(tmp_path):
    parser = build_parser()
    sub = parser._subparsers._group_actions[0].choices["report"]
    dests = {a.dest for a in sub._actions if a.dest not in ("help", "config")}
    cfg = tmp_path / "all.cfg"
    cfg.write_text("\n".join([
        "radius = 1.5", "count = 3", "winding = 2", "eps = 0.2", "mapping = zero_index",
        "e_wave = dimensionless", "boundary = neumann", "abs_tol = 1e-20", "rel_tol = 1e-11",
        "max_iter = 50", "quad_grid = 100, 4", "radial_dump = true", f"out = {tmp_path}", "format = json",
    ]))
    values = read_config_file(cfg)
    assert dests <= set(values)
    resolved = resolve_config(parser.parse_args(["report", "--config", str(cfg)]))
    assert resolved.mapping == "zero_index" and resolved.quad_grid == [100, 4] and resolved.radial_dump


def test_bad_config(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    with pytest.raises(UsageError):
        read_config_file(cfg)
    assert main(["spectrum", "--config", str(cfg)]) == 2
    assert main(["spectrum", "--config", str(tmp_path / "missing.cfg")]) == 2


def test_numerical_failure_names_stage(tmp_path, capsys):
    # an absurdly coarse charge grid makes the quadrature disagree with the closed form
    assert main(["soliton", *FAST, "--quad-grid", "10,2", "--out", str(tmp_path)]) == 1
    assert "stage soliton" in capsys.readouterr().err


def test_unwritable_output(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["spectrum", "--count", "2", "--out", str(blocker / "sub")]) == 2
    assert "cannot" in capsys.readouterr().err


def test_duality_and_report_outputs(tmp_path):
    out = tmp_path / "d"
    assert main(["duality", *FAST, "--out", str(out)]) == 0
    names = sorted(p.name.split("_", 2)[-1] for p in out.iterdir())
    assert any(n.endswith("duality.csv") for n in names)
    assert any(n.endswith("neumann_sum.csv") for n in names)
    doc = json.loads(next(out.glob("*.json")).read_text())
    assert doc["schema"] == "report/v1"
    assert doc["provenance"]["e_wave_definition"] == "density"


def test_rerun_is_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert main(["report", *FAST, "--out", str(d)]) == 0
    files = sorted(p.name for p in a.iterdir())
    assert files == sorted(p.name for p in b.iterdir())
    for name in files:
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_thread_cap(tmp_path, monkeypatch):
    monkeypatch.setenv("POLYA_LAB_THREADS", "1")
    from polya_lab.cli import worker_count
    assert worker_count() == 1
    monkeypatch.setenv("POLYA_LAB_THREADS", "many")
    assert main(["soliton", *FAST, "--out", str(tmp_path)]) == 2


def test_module_entry_point():
    import subprocess
    import sys
    proc = subprocess.run([sys.executable, "-m", "polya_lab"], capture_output=True, text=True,
                          env={**os.environ})
    assert proc.returncode == 2
