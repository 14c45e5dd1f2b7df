import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polya_lab.disc_spectrum import (
    SPECTRUM_COLUMNS,
    SPECTRUM_SCHEMA,
    Boundary,
    DiscGeometry,
    bessel_energy_identity,
    enumerate_spectrum,
    inradius_constant,
    li_yau_margins,
    polya_ratios,
    radial_energy,
)
from polya_lab.specfun import bessel_j

UNIT = DiscGeometry(1.0)
# squared zeros from the 40-digit series + bisection oracle
LAMBDA_1 = 5.7831859629467845212
MU_1 = 3.3899577166718887269  # (j'_{1,1})^2


@pytest.fixture(scope="module")
def dirichlet():
    return enumerate_spectrum(UNIT, "dirichlet", 1000)


@pytest.fixture(scope="module")
def neumann():
    return enumerate_spectrum(UNIT, Boundary.NEUMANN, 200)


def test_geometry():
    g = DiscGeometry(2.0)
    assert g.A == pytest.approx(4.0 * math.pi)
    assert g.r_inradius == 2.0
    with pytest.raises(ValueError):
        DiscGeometry(0.0)


def test_leading_dirichlet_values(dirichlet):
    lam = dirichlet.eigenvalues[:6]
    assert lam[0] == pytest.approx(LAMBDA_1, rel=1e-13)
    assert lam[1] == lam[2] == pytest.approx(14.681970642123895, rel=1e-13)
    assert lam[3] == lam[4] == pytest.approx(26.374616427163392, rel=1e-13)
    assert lam[5] == pytest.approx(30.471262343662087, rel=1e-13)
    assert [(e.mode.m, e.mode.j, e.copy) for e in dirichlet.entries[:6]] == [
        (0, 1, 1), (1, 1, 1), (1, 1, 2), (2, 1, 1), (2, 1, 2), (0, 2, 1),
    ]


def test_ranks_sorted_and_complete(dirichlet):
    lam = dirichlet.eigenvalues
    assert len(lam) == 1000
    assert [e.rank for e in dirichlet.entries] == list(range(1, 1001))
    assert all(a <= b for a, b in zip(lam, lam[1:]))


def test_weyl_counting(dirichlet):
    # N(lambda) = A lambda / (4 pi) - L sqrt(lambda) / (4 pi) + O(lambda^1/3)
    lam = dirichlet.eigenvalues[-1]
    weyl = lam / 4.0 - 2.0 * math.pi * math.sqrt(lam) / (4.0 * math.pi)
    assert abs(1000 - weyl) < 3.0 * lam ** (1.0 / 3.0)


def test_truncation_inside_a_pair():
    table = enumerate_spectrum(UNIT, "dirichlet", 2)
    assert [(e.mode.m, e.copy) for e in table.entries] == [(0, 1), (1, 1)]
    with pytest.raises(ValueError):
        enumerate_spectrum(UNIT, "dirichlet", 0)
    with pytest.raises(ValueError):
        enumerate_spectrum(UNIT, "robin", 3)


def test_polya_and_liyau(dirichlet):
    assert dirichlet.polya_ratio[0] == pytest.approx(1.4457964907366961, rel=1e-12)
    assert min(dirichlet.polya_ratio) >= 1.0
    assert dirichlet.liyau_margin[0] == pytest.approx(3.7831859629467845, rel=1e-12)
    assert min(dirichlet.liyau_margin) > 0.0
    assert polya_ratios(dirichlet) == dirichlet.polya_ratio


def test_neumann_table(neumann):
    assert len(neumann) == 200
    assert neumann.eigenvalues[0] == pytest.approx(MU_1, rel=1e-13)
    assert neumann.polya_ratio[0] == pytest.approx(0.84748942916797218, rel=1e-12)
    assert max(neumann.polya_ratio) <= 1.0
    assert all(m is None for m in neumann.liyau_margin)
    with pytest.raises(ValueError):
        li_yau_margins(neumann)
    with pytest.raises(ValueError):
        inradius_constant(neumann)


def test_neumann_below_dirichlet(dirichlet, neumann):
    # mu_{n+1} <= lambda_n on convex domains
    for n in range(1, 199):
        assert neumann.eigenvalues[n] <= dirichlet.eigenvalues[n - 1] + 1e-12


@settings(max_examples=10, deadline=None)
@given(st.floats(0.2, 5.0), st.integers(1, 60))
def test_scale_invariance(R0, N):
    scaled = enumerate_spectrum(DiscGeometry(R0), "dirichlet", N)
    unit = enumerate_spectrum(UNIT, "dirichlet", N)
    for a, b in zip(scaled.polya_ratio, unit.polya_ratio):
        assert a == pytest.approx(b, rel=1e-12)
    assert scaled.eigenvalues[0] * R0**2 == pytest.approx(LAMBDA_1, rel=1e-12)


def test_rows_and_json(dirichlet):
    doc = dirichlet.to_json()
    assert doc["schema"] == SPECTRUM_SCHEMA
    assert doc["columns"] == list(SPECTRUM_COLUMNS)
    row = doc["rows"][2]
    assert set(row) == set(SPECTRUM_COLUMNS)
    assert row["multiplicity_source"] == "2/2"
    assert row["boundary"] == "dirichlet"


def test_inradius_constant(dirichlet):
    assert inradius_constant(dirichlet) == pytest.approx(LAMBDA_1, rel=1e-13)
    big = enumerate_spectrum(DiscGeometry(3.0), "dirichlet", 1)
    assert inradius_constant(big) == pytest.approx(LAMBDA_1, rel=1e-12)


def test_radial_energy_example():
    # boundary term R0 J_m(k R0) k J'_m(k R0) after integration by parts
    assert radial_energy(0, 1.0, UNIT) == pytest.approx(-0.33672569018050122043, rel=1e-10)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 6), st.floats(0.5, 20.0), st.floats(0.5, 2.0))
def test_radial_energy_boundary_term(m, k, R0):
    J, Jp = bessel_j(m, k * R0)
    expected = R0 * J * k * Jp
    assert radial_energy(m, k, DiscGeometry(R0)) == pytest.approx(expected, abs=1e-9)


@pytest.mark.parametrize("m", [0, 1, 2])
@pytest.mark.parametrize("j", [1, 2])
def test_energy_identity(m, j):
    lhs, rhs = bessel_energy_identity(m, j, UNIT)
    assert abs(lhs - rhs) <= 1e-8
    assert abs(lhs) <= 1e-8 and abs(rhs) <= 1e-8
