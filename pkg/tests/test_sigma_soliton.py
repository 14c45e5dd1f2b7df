import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import EPS_TARGETS, WINDINGS, bps_radius
from polya_lab.sigma_soliton import (
    SOLITON_COLUMNS,
    SOLITON_SCHEMA,
    ChargeMismatchError,
    SolitonResult,
    bps_profile,
    eom_residual,
    hedgehog_field,
    perturb_profile,
    profile_energies,
    radial_dump,
    sample_points,
    shoot_profile,
    solitons_to_json,
    stereographic_inverse,
    stereographic_project,
    stereographic_roundtrip,
    topological_charge,
    vacuum_profile,
)


def closed_form(n, eps, r):
    return 2.0 * np.arctan((bps_radius(n, eps) / r) ** n)


@pytest.fixture(scope="module")
def results(shot_profiles):
    profiles, _ = shot_profiles
    out = {}
    for key, p in profiles.items():
        V, E = profile_energies(p)
        qa, qq = topological_charge(p)
        out[key] = SolitonResult(p, V, E, qa, qq)
    return out


def test_bps_residual_small():
    p = bps_profile(1, 0.3)
    assert eom_residual(p, sample_points(p, 20, seed=1)) <= 1e-8


def test_vacuum_residual_zero():
    p = vacuum_profile(2)
    assert eom_residual(p, sample_points(p)) == 0.0


def test_perturbed_residual_large():
    p = perturb_profile(bps_profile(1, 0.3))
    assert eom_residual(p, sample_points(p)) > 1e-2


def test_constraint_unit_norm():
    field = hedgehog_field(bps_profile(3, 0.2))
    rng = np.random.default_rng(7)
    r = rng.uniform(1e-6, 1.0, 10_000)
    theta = rng.uniform(0.0, 2.0 * math.pi, 10_000)
    phi = field(r, theta)
    assert np.max(np.abs(np.linalg.norm(phi, axis=-1) - 1.0)) <= 1e-12


@settings(max_examples=50, deadline=None)
@given(st.floats(0.05, 3.0), st.floats(0.0, 2 * math.pi), st.integers(1, 4))
def test_stereographic_conventions(f, theta, n):
    phi = np.array([math.sin(f) * math.cos(n * theta), math.sin(f) * math.sin(n * theta), math.cos(f)])
    phase = complex(math.cos(n * theta), math.sin(n * theta))
    u = stereographic_project(phi, "tan")
    assert abs(u - math.tan(0.5 * f) * phase) <= 1e-9 * max(1.0, abs(u))
    v = stereographic_project(phi, "cot")
    assert abs(v - phase / math.tan(0.5 * f)) <= 1e-9 * max(1.0, abs(v))
    for conv in ("tan", "cot"):
        _, back = stereographic_roundtrip(phi, conv)
        assert np.allclose(back, phi, atol=1e-12)


def test_stereographic_errors():
    with pytest.raises(ValueError):
        stereographic_project([0.0, 0.0, -1.0], "tan")
    with pytest.raises(ValueError):
        stereographic_project([0.0, 0.0, 1.0], "cot")
    with pytest.raises(ValueError):
        stereographic_project([1.0, 0.0, 0.0], "mercator")
    assert np.allclose(stereographic_inverse(0j, "tan"), [0.0, 0.0, 1.0])


def test_bps_energies_and_charge():
    n, eps = 2, 0.05
    p = bps_profile(n, bps_radius(n, eps), num=4001)
    V, E = profile_energies(p)
    exact = math.pi * n * (1.0 + math.cos(eps))
    assert V == pytest.approx(exact, rel=1e-9)
    assert E == pytest.approx(4.0 * V, rel=1e-15)
    qa, qq = topological_charge(p)
    assert qa == pytest.approx(-0.5 * n * (1.0 + math.cos(eps)), rel=1e-12)
    assert abs(qa - qq) <= 1e-6


def test_vacuum_has_no_energy():
    p = vacuum_profile(1)
    assert profile_energies(p) == (0.0, 0.0)
    assert topological_charge(p) == (0.0, 0.0)


def test_charge_quadrature_second_order():
    p = bps_profile(1, bps_radius(1, 0.1))
    errs = []
    for n_r in (400, 800, 1600):
        qa, qq = topological_charge(p, (n_r, 8), tolerance=None)
        errs.append(abs(qa - qq))
    assert errs[0] / errs[1] >= 4.0 * 0.95 and errs[1] / errs[2] >= 4.0 * 0.95


def test_coarse_grid_reported():
    p = bps_profile(1, bps_radius(1, 0.1))
    with pytest.raises(ChargeMismatchError):
        topological_charge(p, (20, 4))


@pytest.mark.parametrize("n", WINDINGS)
@pytest.mark.parametrize("eps", EPS_TARGETS)
def test_shooting_matches_closed_form(shot_profiles, n, eps):
    p = shot_profiles[0][(n, eps)]
    assert np.max(np.abs(p.f - closed_form(n, eps, p.grid))) <= 1e-6
    assert abs(p.eps_boundary - eps) <= 1e-9
    assert p.a == pytest.approx(2.0 / bps_radius(n, eps) ** n, rel=1e-5)


@pytest.mark.parametrize("n", WINDINGS)
@pytest.mark.parametrize("eps", EPS_TARGETS)
def test_bogomolny_saturation(results, n, eps):
    res = results[(n, eps)]
    assert -1e-6 <= res.bogomolny_margin <= 1e-6
    assert abs(res.Q_analytic - res.Q_quadrature) <= 1e-6
    assert res.V <= 2.0 * math.pi * n + 1e-6
    assert res.mean_energy_density == pytest.approx(8.0 * math.pi * abs(res.Q_quadrature) / res.area, rel=1e-6)


@pytest.mark.parametrize("n", WINDINGS)
def test_monotone_approach(results, n):
    Q = [abs(results[(n, e)].Q_quadrature) for e in EPS_TARGETS]
    V = [results[(n, e)].V for e in EPS_TARGETS]
    assert Q[0] < Q[1] < Q[2] and V[0] < V[1] < V[2]
    assert abs(Q[-1] - n) <= 1e-3


@pytest.mark.parametrize("n", WINDINGS)
@pytest.mark.parametrize("eps", EPS_TARGETS)
def test_shot_residual(shot_profiles, n, eps):
    p = shot_profiles[0][(n, eps)]
    assert eom_residual(p, sample_points(p)) <= 1e-6
    assert eom_residual(perturb_profile(p), sample_points(p)) >= 1e-2


def test_shooting_rejects_bad_input():
    with pytest.raises(ValueError):
        shoot_profile(0, 1.0, 0.1)
    with pytest.raises(ValueError):
        shoot_profile(1, 1.0, 0.0)
    with pytest.raises(ValueError):
        shoot_profile(1, 1.0, 2.0)


def test_shooting_scales_with_radius():
    p = shoot_profile(1, 2.5, 0.1)
    assert np.max(np.abs(p.f - 2.0 * np.arctan(2.5 * math.tan(0.05) / p.grid))) <= 1e-6


def test_profile_guards():
    p = bps_profile(1, 0.3)
    with pytest.raises(ValueError):
        p.evaluate(0.0)
    with pytest.raises(ValueError):
        p.evaluate(1.5)
    p.check()
    with pytest.raises(ValueError):
        perturb_profile(p, 5.0).check()


def test_rows_and_dump(results):
    res = results[(1, 0.1)]
    row = res.row()
    assert tuple(row) == SOLITON_COLUMNS
    assert row["E_profile"] == pytest.approx(4.0 * row["V"])
    doc = solitons_to_json([res])
    assert doc["schema"] == SOLITON_SCHEMA and len(doc["rows"]) == 1
    dump = radial_dump(res.profile)
    assert len(dump) == len(res.profile.grid)
    assert set(dump[0]) == {"r", "f", "f_prime", "energy_density"}
