import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hardylab.beltrami import AlphaField, NuField, dirichlet_disk
from hardylab.compop import (
    AnalyticSelfMap,
    DegenerateSymbolError,
    DiagnosticsReport,
    adjoint_identity_check,
    compact_proxy,
    counts_at,
    eval_functional_norm,
    eval_sweep,
    invertibility_check,
    isometry_check_annulus,
    isometry_check_disk,
    matrix_truncate,
    norm_bound_disk,
    norm_estimate,
    singular_values,
    winding_number,
)
from hardylab.grid import PolarMesh
from hardylab.hardy import LaurentSeries

R0 = 0.5


# --- symbols ---------------------------------------------------------------


def test_symbol_validation():
    with pytest.raises(ValueError):
        AnalyticSelfMap.moebius(1.0)
    with pytest.raises(ValueError):
        AnalyticSelfMap.rotation(1.1)
    with pytest.raises(ValueError):
        AnalyticSelfMap.inversion(1.0, 0.0)  # not an annulus
    with pytest.raises(ValueError):
        AnalyticSelfMap.general({0: 0.5, 1: 0.6})  # leaves the disk


def test_degenerate_symbol_has_no_bound():
    with pytest.raises(DegenerateSymbolError):
        norm_bound_disk(AnalyticSelfMap.constant(1j), 2.0)
    with pytest.raises(ValueError):
        AnalyticSelfMap.constant(0.2, "annulus", R0)  # outside the annulus


def test_moebius_values():
    phi = AnalyticSelfMap.moebius(0.3, 1j)
    t = np.linspace(0, 2 * np.pi, 50)
    assert np.abs(np.abs(phi(np.exp(1j * t))) - 1).max() < 1e-14
    assert abs(phi(np.array([-0.3]))[0]) < 1e-15


# --- matrices and singular values -----------------------------------------


def test_matrix_identity():
    E = matrix_truncate(AnalyticSelfMap.rotation(1.0), 16)
    assert np.abs(E.entries - np.eye(16)).max() < 1e-15
    assert E.max_tail < 1e-7


def test_matrix_square():
    E = matrix_truncate(AnalyticSelfMap.monomial(2), 16).entries
    expect = np.zeros((16, 16))
    for n in range(8):
        expect[2 * n, n] = 1
    assert np.abs(E - expect).max() < 1e-15


def test_matrix_half_is_diagonal():
    E = matrix_truncate(AnalyticSelfMap.general({1: 0.5}), 12).entries
    assert np.abs(E - np.diag(0.5 ** np.arange(12))).max() < 1e-15


def test_matrix_annulus_rotation_is_unitary_diagonal():
    lam = np.exp(0.4j)
    E = matrix_truncate(AnalyticSelfMap.rotation(lam, "annulus", R0), 16)
    assert np.abs(E.entries - np.diag(lam ** E.indices)).max() < 1e-12


def test_singular_values_keep_small_entries():
    s = singular_values(np.diag(0.5 ** np.arange(64)).astype(complex))
    assert np.allclose(s / 0.5 ** np.arange(64), 1, rtol=1e-12)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_singular_values_match_numpy(seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((9, 7)) + 1j * rng.standard_normal((9, 7))
    assert np.allclose(singular_values(A), np.linalg.svd(A, compute_uv=False), rtol=1e-12)


# --- norms -----------------------------------------------------------------


def test_norm_bound_values():
    assert norm_bound_disk(AnalyticSelfMap.moebius(0.0), 2) == pytest.approx(1)
    half = AnalyticSelfMap.general({0: 0.5, 1: 0.4})
    assert norm_bound_disk(half, 2) == pytest.approx(np.sqrt(3))
    assert norm_bound_disk(half, 4) == pytest.approx(3 ** 0.25)


@pytest.mark.parametrize("phi", [AnalyticSelfMap.rotation(1.0), AnalyticSelfMap.rotation(np.exp(1j))])
def test_norm_of_rotations_is_one(phi):
    assert norm_estimate(phi, 2.0, trials=5) == pytest.approx(1, abs=1e-10)
    assert norm_estimate(phi, 3.0, trials=5) == pytest.approx(1, abs=1e-10)


@pytest.mark.parametrize("a", [0.3, 0.5j, -0.6 + 0.2j])
def test_norm_estimate_below_bound(a):
    phi = AnalyticSelfMap.moebius(a)
    for p in (1.5, 2.0, 4.0):
        est = norm_estimate(phi, p, trials=5)
        assert 1 - 1e-9 <= est <= norm_bound_disk(phi, p) + 1e-6


# --- isometries ------------------------------------------------------------


def test_isometry_examples_disk():
    rep = isometry_check_disk(AnalyticSelfMap.monomial(2))
    assert rep.verdict is True and rep.verdicts["consistent"]
    bad = isometry_check_disk(AnalyticSelfMap.moebius(0.3))
    assert bad.verdict is False and bad.verdicts["consistent"]
    assert bad.certificates["empirical_deviation"] > 1e-3
    assert "witness" in bad.certificates


def test_isometry_with_nu_reports_necessary_conditions():
    mesh = PolarMesh.disk(33, 64)
    nu = NuField.from_function(mesh, lambda z: 0.2 * z.real, 0.2)
    rep = isometry_check_disk(AnalyticSelfMap.rotation(1j), nu=nu)
    assert rep.verdict == "NECESSARY-CONDITIONS-MET"
    rep = isometry_check_disk(AnalyticSelfMap.general({1: 0.5}), nu=nu)
    assert rep.verdict == "NECESSARY-CONDITIONS-VIOLATED"


@pytest.mark.parametrize("phi,kind", [
    (AnalyticSelfMap.rotation(np.exp(2j), "annulus", R0), "rotation_family"),
    (AnalyticSelfMap.inversion(np.exp(-1j), R0), "inversion_family"),
])
def test_isometry_examples_annulus(phi, kind):
    rep = isometry_check_annulus(phi)
    assert rep.verdict and rep.verdicts[kind] and rep.verdicts["consistent"]
    assert rep.certificates["eq1_defect"] < 1e-8


def test_annulus_non_isometry():
    phi = AnalyticSelfMap.general({0: 0.7, 1: 0.05}, "annulus", R0)
    rep = isometry_check_annulus(phi)
    assert rep.verdict is False and rep.verdicts["consistent"]


# --- invertibility ---------------------------------------------------------


def test_winding_number():
    t = np.linspace(0, 2 * np.pi, 256, endpoint=False)
    assert winding_number(np.exp(3j * t)) == 3
    assert winding_number(2 + np.exp(1j * t)) == 0


@pytest.mark.parametrize("phi,expect", [
    (AnalyticSelfMap.moebius(0.4 - 0.1j, 1j), True),
    (AnalyticSelfMap.monomial(2), False),
    (AnalyticSelfMap.general({1: 0.5}), False),
    (AnalyticSelfMap.inversion(1.0, R0), True),
])
def test_invertibility_examples(phi, expect):
    assert invertibility_check(phi).verdict is expect


def test_counts():
    assert counts_at(AnalyticSelfMap.monomial(3), [0.2, 0.5j]) == [3, 3]
    assert counts_at(AnalyticSelfMap.general({1: 0.5}), [0.1, 0.7]) == [1, 0]


# --- compactness -----------------------------------------------------------


def test_compact_examples():
    assert compact_proxy(AnalyticSelfMap.general({1: 0.5}), 32).verdict == "compact-like"
    assert compact_proxy(AnalyticSelfMap.rotation(1j), 32).verdict == "non-compact-like"
    rep = compact_proxy(AnalyticSelfMap.general({0: 0.1, 1: 0.5}), 32)
    assert np.all(np.diff(rep.series["singular_values"]) <= 0)


def test_compact_conjugation_bound():
    mesh = PolarMesh.disk(65, 128)
    alpha = AlphaField.constant(mesh, 0.2)
    rep = compact_proxy(AnalyticSelfMap.general({1: 0.5}), 16, alpha=alpha)
    assert rep.verdicts["conjugation_bound"]
    assert rep.certificates["max_ratio"] <= rep.certificates["distortion_bound"]


# --- evaluation functionals -----------------------------------------------


def test_eval_norm_values():
    assert eval_functional_norm(0.0) == pytest.approx(1)
    assert eval_functional_norm(0.5, M=200) == pytest.approx(1 / np.sqrt(0.75))
    with pytest.raises(ValueError):
        eval_functional_norm(1.0)


def test_eval_norm_basis_path_matches_kernel():
    # with nu negligible the span is {1, z^k, -i z^k}, so the answer is the truncated kernel value
    z = 0.4
    mesh = PolarMesh.disk(65, 128)
    nu = NuField.from_function(mesh, lambda w: 1e-300 * w.real, 0.1)
    got = eval_functional_norm(z, 2.0, nu)
    k = np.arange(1, 13)
    assert got == pytest.approx(np.sqrt(1 + np.sum(z ** (2 * k))), rel=1e-8)


def test_eval_norm_radial_nu_increases():
    mesh = PolarMesh.disk(33, 64)
    nu = NuField.from_function(mesh, lambda w: 0.2 * np.abs(w) ** 2, 0.2)
    rep = eval_sweep([0.2, 0.5, 0.8], 2.0, nu)
    assert rep.verdict


def test_eval_sweep_annulus():
    rep = eval_sweep(None, 2.0, None, 64, "annulus", R0)
    assert rep.verdict
    assert np.all(np.diff(rep.series["sweep"]["norm"]) > 0)


# --- adjoint identity ------------------------------------------------------


def test_adjoint_square_at_half():
    rep = adjoint_identity_check(AnalyticSelfMap.monomial(2), 0.5, LaurentSeries.monomial(1))
    assert rep.verdict
    assert rep.certificates["max_re_gap"] < 1e-14


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_adjoint_random(seed):
    rng = np.random.default_rng(seed)
    a = 0.5 * (rng.random() * np.exp(2j * np.pi * rng.random()))
    phi = AnalyticSelfMap.moebius(a, np.exp(1j * rng.random()))
    coeffs = (rng.standard_normal(10) + 1j * rng.standard_normal(10)) / np.arange(1, 11) ** 2
    z = 0.6 * rng.random(5) * np.exp(2j * np.pi * rng.random(5))
    assert adjoint_identity_check(phi, z, coeffs, M=96).verdict


def test_adjoint_with_nu_solution():
    mesh = PolarMesh.disk(65, 128)
    nu = NuField.from_function(mesh, lambda w: 0.2 * np.abs(w) ** 2, 0.2)
    f = dirichlet_disk(np.cos(mesh.theta), nu)
    rep = adjoint_identity_check(AnalyticSelfMap.general({1: 0.5}), [0.1, 0.3j], f)
    assert rep.certificates["max_re_gap"] < 1e-6


# --- reports ---------------------------------------------------------------


def test_report_needs_certificates():
    with pytest.raises(ValueError):
        DiagnosticsReport("x", {"main": True}, {})
    rep = DiagnosticsReport("x", {"main": True}, {"c": np.float64(1.0), "z": 1j}, series={"a": np.arange(3)})
    d = rep.as_dict()
    assert d["series"]["a"] == [0, 1, 2]
    assert isinstance(d["certificates"]["c"], float)


def test_eval_norm_minimization_path_is_continuous_in_p():
    z = 0.4
    k = np.arange(1, 13)
    gram = np.sqrt(1 + np.sum(z ** (2 * k)))
    assert eval_functional_norm(z, 2.0001) == pytest.approx(gram, rel=1e-3)
    vals = [eval_functional_norm(z, q) for q in (1.5, 2.0001, 3.0, 4.0)]
    assert np.all(np.diff(vals) < 0)  # larger p, larger boundary norms
