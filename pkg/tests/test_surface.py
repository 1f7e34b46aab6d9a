import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hardylab.grid import circle_angles
from hardylab.surface import (
    BoundaryDensity,
    Case,
    OmegaMeasures,
    classify_case,
    gauss_radii,
    harmonic_ext_annulus,
    harmonic_ext_modes,
    index_of,
    kernel_mass,
    lift,
    omega_measures,
    outer_annulus,
    sarason_K,
    sarason_K_rewritten,
    surface_constant,
)


def test_surface_constant():
    assert surface_constant(0.5) == pytest.approx(np.log(2))
    with pytest.raises(ValueError):
        surface_constant(1.0)


# --- kernel ----------------------------------------------------------------


@pytest.mark.parametrize("r0", [0.3, 0.5, 0.7])
def test_kernel_forms_agree(r0):
    r = np.linspace(r0, 1, 52)[1:-1]
    t = np.linspace(-6, 6, 50)
    R, T = np.meshgrid(r, t, indexing="ij")
    assert np.abs(sarason_K(R, T, r0, check=False) - sarason_K_rewritten(R, T, r0)).max() < 1e-12


@pytest.mark.parametrize("r0", [0.3, 0.5])
def test_kernel_centre_value(r0):
    assert sarason_K(np.sqrt(r0), 0.0, r0) == pytest.approx(1 / surface_constant(r0), rel=4e-16)


def test_kernel_positive_and_even():
    r0 = 0.4
    t = np.linspace(0.01, 5, 40)
    for r in (0.45, 0.7, 0.95):
        k = sarason_K(r, t, r0)
        assert np.all(k > 0)
        assert np.allclose(k, sarason_K(r, -t, r0), rtol=1e-14)


@pytest.mark.parametrize("r", [0.4, 0.55, 0.9])
def test_kernel_total_mass_is_two(r):
    # the pair K(r, .) + K(r0/r, .) integrates to 2 over the line
    assert kernel_mass(r, 0.3) == pytest.approx(2.0, abs=1e-10)


# --- harmonic extension ----------------------------------------------------


def test_constant_density_reproduces_itself():
    mu = BoundaryDensity.from_functions(lambda t: np.ones_like(t), lambda t: np.ones_like(t), 64)
    ext = harmonic_ext_annulus(mu, 0.5)
    assert np.abs(ext.values - 1).max() < 1e-12


def test_log_radius_data_extends_to_log_radius():
    r0 = 0.5
    mu = BoundaryDensity.from_functions(lambda t: np.zeros_like(t), lambda t: np.full_like(t, np.log(r0)), 64)
    ext = harmonic_ext_annulus(mu, r0)
    assert np.abs(ext.values - np.log(ext.radii)[:, None]).max() < 1e-12


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_convolution_matches_mode_oracle(seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal(6)

    def outer(t):
        return a[0] + a[1] * np.cos(t) + a[2] * np.sin(3 * t)

    def inner(t):
        return a[3] + a[4] * np.cos(2 * t) + a[5] * np.sin(t)

    r0 = 0.5
    mu = BoundaryDensity.from_functions(outer, inner, 64)
    radii = gauss_radii(r0)
    ext = harmonic_ext_annulus(mu, r0, radii, 64)
    oracle = harmonic_ext_modes(mu, r0, radii, 64)
    assert np.abs(ext.values - oracle).max() < 1e-10
    assert ext.residual < 1e-6


def test_density_validation():
    with pytest.raises(ValueError):
        BoundaryDensity(np.ones(8), np.ones(4))
    with pytest.raises(ValueError):
        BoundaryDensity(np.ones(8), np.full(8, np.nan))


# --- lifts and indices -----------------------------------------------------


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_lift_of_monomials_has_index_zero(k):
    F = lift(lambda z: z**k if k else np.ones_like(z), 0.5, periods=2)
    assert F.index == 0.0 and F.multiplier == 1
    idx = index_of(F)
    assert min(idx, 1 - idx) < 1e-10
    mod, mult = F.automorphy_defect()
    assert mod < 1e-10 and mult < 1e-10


def test_lift_values():
    F = lift(lambda z: z**2, 0.5)
    expect = F.radii[:, None] ** 2 * np.exp(2j * F.t)[None, :]
    assert np.abs(F.values - expect).max() < 1e-14


def test_index_from_raw_log_moduli():
    r0 = 0.5
    q0 = surface_constant(r0)
    t = circle_angles(64)
    assert index_of(np.zeros_like(t), np.full_like(t, -0.3 * q0), r0) == pytest.approx(0.3)


def test_outer_annulus_of_identity():
    r0 = 0.5
    t = circle_angles(64)
    F = outer_annulus(np.zeros_like(t), np.full_like(t, np.log(r0)), r0, periods=2)
    assert F.index == 0.0
    ratio = F.values / (F.radii[:, None] * np.exp(1j * F.t)[None, :])
    assert np.abs(ratio - ratio[0, 0]).max() < 1e-10
    assert abs(abs(ratio[0, 0]) - 1) < 1e-10


def test_outer_annulus_fractional_index():
    r0 = 0.5
    q0 = surface_constant(r0)
    t = circle_angles(64)
    lo = 0.2 * np.cos(t)
    li = np.full_like(t, -0.3 * q0)
    F = outer_annulus(lo, li, r0, periods=2)
    assert F.index == pytest.approx(0.3, abs=1e-12)
    assert F.multiplier == pytest.approx(np.exp(0.6j * np.pi))
    mod, mult = F.automorphy_defect()
    assert mod < 1e-10 and mult < 1e-10
    assert np.abs(np.log(np.abs(F.outer_line[:64])) - lo).max() < 1e-12
    assert F.meta["consistency"] < 1e-8


# --- omega measures and cases ---------------------------------------------


def test_omega_cases():
    r0 = 0.5
    assert classify_case(omega_measures(lambda z: z, r0)) is Case.CASE1
    assert classify_case(omega_measures(lambda z: r0 / z, r0)) is Case.CASE2
    const = omega_measures(lambda z: np.full_like(z, np.sqrt(r0)), r0)
    assert classify_case(const) is Case.NOT_ISOMETRY_CANDIDATE


def test_case3_pattern():
    m = OmegaMeasures(0.5, 0.5, 0.5, 0.5, 1e-4, True)
    assert classify_case(m) is Case.CASE3


@settings(max_examples=20, deadline=None)
@given(st.floats(0.0, 2 * np.pi), st.sampled_from([0.3, 0.5, 0.7]))
def test_measure_identity_for_rotations_and_inversions(angle, r0):
    for phi in (lambda z: np.exp(1j * angle) * z, lambda z: np.exp(1j * angle) * r0 / z):
        m = omega_measures(phi, r0)
        assert 0 <= m.m_r0 <= 2 and 0 <= m.m_1 <= 2
        assert abs(r0**2 * m.m_r0 + m.m_1 - (r0**2 + 1)) < 1e-8
