import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hardylab.grid import CircleGrid, FourierCoeffs, circle_angles
from hardylab.hardy import (
    AnnulusTrace,
    ArcSet,
    DomainError,
    LaurentSeries,
    annulus_defF,
    annulus_membership,
    annulus_split,
    boundary_norm,
    eval_interior,
    hardy_project_disk,
    least_power,
    outer_disk,
    szego_eval_bound,
    two_level_outer,
)


# --- projection and splitting ---------------------------------------------


def test_project_drops_negative_frequencies():
    c = FourierCoeffs.from_dict({-1: 1.0, 0: 1.0, 1: 1.0}, 8)
    out = hardy_project_disk(c)
    assert out[-1] == 0 and out[0] == 1 and out[1] == 1


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_projection_idempotent_and_contractive(seed):
    rng = np.random.default_rng(seed)
    c = FourierCoeffs(1.0, rng.standard_normal(32) + 1j * rng.standard_normal(32))
    p = hardy_project_disk(c)
    assert np.array_equal(hardy_project_disk(p).coeffs, p.coeffs)
    assert np.linalg.norm(p.coeffs) <= np.linalg.norm(c.coeffs)


@pytest.mark.parametrize("mapping,g_expect,h_expect", [
    ({1: 1.0}, {1: 1.0}, {}),
    ({-1: 1.0}, {}, {-1: 1.0}),
    ({1: 1.0, -1: 1.0}, {1: 1.0}, {-1: 1.0}),
])
def test_annulus_split_examples(mapping, g_expect, h_expect):
    f = LaurentSeries.from_dict(mapping, 0.5)
    g, h = annulus_split(f)
    for k in range(-2, 3):
        assert g.coefficient(k) == g_expect.get(k, 0.0)
        assert h.coefficient(k) == h_expect.get(k, 0.0)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_annulus_split_recombines_disjointly(seed):
    rng = np.random.default_rng(seed)
    f = LaurentSeries(0.4, rng.standard_normal(21) + 1j * rng.standard_normal(21))
    g, h = annulus_split(f)
    total = g + h
    assert np.array_equal(total.coeffs, f.coeffs)
    for k in range(-10, 11):
        assert g.coefficient(k) == 0 or h.coefficient(k) == 0


# --- membership ------------------------------------------------------------


@pytest.mark.parametrize("k", range(-20, 21))
def test_membership_monomials(k):
    ok, defect = annulus_membership(LaurentSeries.monomial(k, 0.5).annulus_trace(128))
    assert ok and defect < 1e-12


def test_membership_z_plus_inverse():
    ok, _ = annulus_membership(LaurentSeries.from_dict({1: 1, -1: 1}, 0.5).annulus_trace(64))
    assert ok


def test_membership_constructed_violation():
    t = AnnulusTrace.sample(lambda z: z, 0.5, 64)
    broken = AnnulusTrace(t.outer, CircleGrid(0.5, np.zeros(64)), 0.5)
    ok, defect = annulus_membership(broken)
    assert not ok
    assert defect == pytest.approx(0.5, abs=1e-14)


# --- norms and evaluation --------------------------------------------------


def test_boundary_norm_values():
    assert boundary_norm(CircleGrid(1.0, np.full(16, 3 - 4j)), 3.0) == pytest.approx(5.0)
    assert boundary_norm(CircleGrid.sample(lambda z: 1 + z, 64), 2.0) == pytest.approx(np.sqrt(2), abs=1e-14)
    tr = AnnulusTrace.sample(lambda z: z, 0.5, 64)
    assert boundary_norm(tr, 2.0) == pytest.approx(np.sqrt(1.25), abs=1e-14)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_boundary_norm_parseval(seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal(10) + 1j * rng.standard_normal(10)
    f = LaurentSeries.taylor(a)
    assert boundary_norm(f.trace(64), 2.0) == pytest.approx(np.linalg.norm(a), rel=1e-12)


def test_boundary_norm_rejects_endpoints():
    with pytest.raises(ValueError):
        boundary_norm(CircleGrid(1.0, np.ones(8)), 1.0)


def test_eval_interior_values_and_domain():
    assert eval_interior(LaurentSeries.monomial(2), 0.5) == pytest.approx(0.25)
    assert eval_interior(LaurentSeries.monomial(-1, 0.3), 0.5) == pytest.approx(2.0)
    with pytest.raises(DomainError):
        eval_interior(LaurentSeries.monomial(1), 1.0)
    with pytest.raises(DomainError):
        eval_interior(LaurentSeries.monomial(1, 0.5), 0.4)


def test_eval_interior_matches_horner():
    rng = np.random.default_rng(5)
    a = rng.standard_normal(12) + 1j * rng.standard_normal(12)
    z = 0.3 + 0.4j
    horner = 0j
    for c in a[::-1]:
        horner = horner * z + c
    assert abs(eval_interior(LaurentSeries.taylor(a), z) - horner) < 1e-14


def test_szego_bound():
    assert szego_eval_bound(0) == 1.0
    assert szego_eval_bound(0.9) == pytest.approx(2.294157338705618, abs=1e-12)
    vals = [szego_eval_bound(r) for r in np.linspace(0, 0.99, 30)]
    assert np.all(np.diff(vals) > 0)
    with pytest.raises(DomainError):
        szego_eval_bound(1.0)


# --- outer functions -------------------------------------------------------


def test_outer_disk_constant_data():
    f0 = outer_disk(CircleGrid(1.0, np.zeros(64)))
    assert abs(f0(0.3 + 0.2j) - 1) < 1e-14
    f1 = outer_disk(CircleGrid(1.0, np.ones(64)))
    assert abs(f1(-0.5j) - np.e) < 1e-13


def test_outer_disk_modulus_and_zero_free():
    t = circle_angles(256)
    log_mod = 0.3 * np.cos(t) - 0.2 * np.sin(3 * t) + 0.1
    F = outer_disk(CircleGrid(1.0, log_mod))
    rel = np.abs(np.abs(F(np.exp(1j * t))) / np.exp(log_mod) - 1)
    assert rel.max() < 1e-6
    r, th = np.meshgrid(np.linspace(0, 0.999, 40), t)
    assert np.abs(F(r * np.exp(1j * th))).min() > 0


def test_two_level_outer_origin_value():
    arcs = ArcSet([(0.0, np.pi / 2)])
    assert arcs.measure == pytest.approx(0.25)
    F = two_level_outer(arcs, 0.5)
    assert abs(F(0.0)) == pytest.approx(np.exp(0.75 * np.log(0.5)), abs=1e-12)  # 0.5946


def test_two_level_outer_boundary_levels():
    arcs = ArcSet([(0.0, np.pi / 2), (np.pi, 1.2 * np.pi)])
    F = two_level_outer(arcs, 0.5)
    t = np.linspace(0, 2 * np.pi, 1001)
    expected = np.where(arcs.contains(t), 1.0, 0.5)
    assert np.abs(F.outer_modulus(t) - expected).max() < 1e-12


def test_least_power_scan():
    assert least_power(0.5, 4.0) == 4
    assert least_power(0.5, 0.1) == 0


def test_annulus_defF_levels():
    arcs = ArcSet([(0.0, np.pi / 2)])
    F = annulus_defF(arcs, 0.5)
    t = np.linspace(0.05, np.pi / 2 - 0.05, 200)
    assert np.abs(np.abs(F.outer_trace(t)) - 1).max() < 1e-6
    t_all = circle_angles(2048)
    assert np.abs(F(0.5 * np.exp(1j * t_all))).max() <= 0.5 + 1e-6
    off = t_all[~arcs.contains(t_all) & (np.abs(t_all - np.pi / 2) > 1e-9) & (t_all > 0)]
    assert np.abs(F.outer_trace(off)).max() <= 0.5 + 1e-6
    assert np.isnan(F.outer_trace(np.array([np.pi / 2]))[0])  # no boundary value at a jump
    N, M = F.meta["N"], F.meta["M"]
    assert 0.5**N * M < 0.5 and (N == 0 or 0.5 ** (N - 1) * M >= 0.5)


def test_laurent_series_validation():
    with pytest.raises(ValueError):
        LaurentSeries(0.0, [1.0, 0.0, 0.0])  # negative power on the disk
    with pytest.raises(ValueError):
        LaurentSeries(0.5, [1.0, 2.0])  # even length
