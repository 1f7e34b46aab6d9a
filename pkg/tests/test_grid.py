import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hardylab.grid import (
    AliasingError,
    CircleGrid,
    FourierCoeffs,
    PolarMesh,
    ResidualError,
    analyze,
    cauchy_area_transform,
    dbar_residual,
    laplacian,
    poisson_dirichlet0,
    synthesize,
    wirtinger,
)

DISK = PolarMesh.disk(33, 64)
ANN = PolarMesh.annulus(0.5, 33, 64)


def band_limited(seed, n=64, degree=20):
    rng = np.random.default_rng(seed)
    c = np.zeros(n, dtype=complex)
    idx = np.arange(-degree, degree + 1)
    c[idx % n] = rng.standard_normal(idx.size) + 1j * rng.standard_normal(idx.size)
    return CircleGrid(1.0, np.fft.ifft(c) * n)


# --- circles ---------------------------------------------------------------


def test_analyze_constant_is_delta():
    c = analyze(CircleGrid(1.0, np.ones(16)))
    assert c[0] == pytest.approx(1.0)
    assert np.abs(np.delete(c.coeffs, 8)).max() < 1e-15


def test_analyze_pure_mode():
    c = analyze(CircleGrid.sample(lambda z: z, 32))
    assert abs(c[1] - 1.0) < 1e-15
    assert np.abs(c.coeffs).sum() == pytest.approx(1.0, abs=1e-14)


def test_synthesize_deltas():
    one = synthesize(FourierCoeffs.from_dict({0: 1.0}, 16), 16)
    assert np.allclose(one.samples, 1.0, atol=1e-15)
    minus = synthesize(FourierCoeffs.from_dict({-1: 1.0}, 16), 16)
    assert np.abs(minus.samples - np.exp(-1j * minus.angles)).max() < 1e-14


def test_synthesize_reports_aliasing():
    with pytest.raises(AliasingError):
        synthesize(FourierCoeffs.from_dict({7: 1.0}, 16), 8)


def test_circle_grid_rejects_bad_sizes():
    with pytest.raises(ValueError):
        CircleGrid(1.0, np.ones(12))
    with pytest.raises(ValueError):
        CircleGrid(1.0, np.ones(4))
    with pytest.raises(ValueError):
        CircleGrid(0.0, np.ones(8))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(0, 31))
def test_round_trip_band_limited(seed, degree):
    g = band_limited(seed, 64, degree)
    back = synthesize(analyze(g), 64)
    assert np.abs(back.samples - g.samples).max() <= 1e-12 * np.abs(g.samples).max()


# --- Wirtinger derivatives -------------------------------------------------


@pytest.mark.parametrize("mesh", [DISK, ANN], ids=["disk", "annulus"])
def test_wirtinger_holomorphic_and_antiholomorphic(mesh):
    z = mesh.z
    d, dbar = wirtinger(mesh.grid(z))
    assert np.abs(d.values - 1).max() < 1e-10 and np.abs(dbar.values).max() < 1e-10
    d, dbar = wirtinger(mesh.grid(np.conj(z)))
    assert np.abs(d.values).max() < 1e-10 and np.abs(dbar.values - 1).max() < 1e-10


@pytest.mark.parametrize("mesh", [DISK, ANN], ids=["disk", "annulus"])
def test_wirtinger_modulus_squared(mesh):
    z = mesh.z
    d, dbar = wirtinger(mesh.grid(np.abs(z) ** 2 + 0j))
    assert np.abs(d.values - np.conj(z)).max() < 1e-10
    assert np.abs(dbar.values - z).max() < 1e-10


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_wirtinger_conjugation_symmetry(seed):
    rng = np.random.default_rng(seed)
    z = DISK.z
    f = sum(complex(*rng.standard_normal(2)) * z**a * np.conj(z) ** b for a in range(3) for b in range(3))
    d_conj, _ = wirtinger(DISK.grid(np.conj(f)))
    _, dbar = wirtinger(DISK.grid(f))
    assert np.abs(dbar.values - np.conj(d_conj.values)).max() < 1e-10


# --- Poisson solver --------------------------------------------------------


@pytest.mark.parametrize("mesh", [DISK, ANN], ids=["disk", "annulus"])
def test_poisson_zero_rhs(mesh):
    u = poisson_dirichlet0(mesh.grid(np.zeros((mesh.n_r, mesh.n_theta))))
    assert np.abs(u.values).max() == 0.0


def test_poisson_disk_constant_rhs():
    u = poisson_dirichlet0(DISK.grid(np.full((DISK.n_r, DISK.n_theta), 4.0)))
    assert np.abs(u.values - (np.abs(DISK.z) ** 2 - 1)).max() < 1e-12


def test_poisson_annulus_radial_matches_ode():
    # u'' + u'/r = 1 on (r0, 1), u(r0) = u(1) = 0: u = r^2/4 + A ln r + B
    r0 = 0.5
    u = poisson_dirichlet0(ANN.grid(np.ones((ANN.n_r, ANN.n_theta))))
    B = -0.25
    A = (-r0**2 / 4 - B) / np.log(r0)
    r = ANN.radii[:, None]
    exact = r**2 / 4 + A * np.log(r) + B
    assert np.abs(u.values - exact).max() < 1e-12


@pytest.mark.parametrize("mesh", [DISK, ANN], ids=["disk", "annulus"])
def test_poisson_boundary_and_laplacian(mesh):
    rng = np.random.default_rng(4)
    z = mesh.z
    rhs = (rng.standard_normal() * z.real**2 + rng.standard_normal() * z.imag + np.cos(3 * np.angle(z))
           * np.abs(z) ** 3).real
    u = poisson_dirichlet0(mesh.grid(rhs))
    for row in mesh.boundary_rows:
        assert np.abs(u.values[row]).max() < 1e-12
    lap = laplacian(u).values
    inner = slice(1, -1)
    assert np.abs(lap[inner] - rhs[inner]).max() <= 1e-6 * np.abs(rhs).max()


# --- Cauchy transform ------------------------------------------------------


@pytest.mark.parametrize("mesh", [DISK, ANN], ids=["disk", "annulus"])
def test_cauchy_zero_and_one(mesh):
    s0 = cauchy_area_transform(mesh.grid(np.zeros((mesh.n_r, mesh.n_theta), dtype=complex)))
    assert np.abs(s0.values).max() == 0.0
    g = mesh.grid(np.ones((mesh.n_r, mesh.n_theta), dtype=complex))
    s = cauchy_area_transform(g)
    assert dbar_residual(s, g) < 1e-6
    assert abs(np.mean(s.values[-1]).imag) < 1e-14


@pytest.mark.parametrize("mesh", [DISK, ANN], ids=["disk", "annulus"])
def test_cauchy_random_band_limited(mesh):
    rng = np.random.default_rng(9)
    z = mesh.z
    g = sum(complex(*rng.standard_normal(2)) * z**a * np.conj(z) ** b for a in range(4) for b in range(4))
    s = cauchy_area_transform(mesh.grid(g))
    assert dbar_residual(s, mesh.grid(g)) < 1e-6


def test_cauchy_reports_residual():
    g = np.zeros((DISK.n_r, DISK.n_theta), dtype=complex)
    g[:, ::2] = 1.0  # unresolved angular content
    with pytest.raises(ResidualError) as err:
        cauchy_area_transform(DISK.grid(g), tol=1e-14)
    assert err.value.residual > 0
