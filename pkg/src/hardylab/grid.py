"""Spectral representations on circles and polar grids.

Circles carry equispaced samples and their discrete Fourier coefficients.
Area fields on the disk or the annulus live on a tensor grid: equispaced in
the angle, Chebyshev in the radius.  Disk grids use the even/odd extension
of each angular mode across the origin (nodes of a Chebyshev grid on
[-1, 1] with an even number of points), so no node sits at r = 0.

All operations are pure functions of their inputs.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

from .config import TOL


class AliasingError(ValueError):
    """Requested sample count cannot represent the given coefficients."""


class SingularSystemError(RuntimeError):
    """A radial boundary-value system could not be solved."""


class ResidualError(RuntimeError):
    """A computed field fails its defining residual check."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


def _is_pow2(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


# ---------------------------------------------------------------------------
# circles


@dataclass
class CircleGrid:
    """Samples at angles t_k = 2 pi k / N on the circle of given radius."""

    radius: float
    samples: np.ndarray

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=complex)
        if self.samples.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        n = self.samples.size
        if n < 8 or not _is_pow2(n):
            raise ValueError(f"n_samples must be a power of two >= 8, got {n}")
        if not self.radius > 0:
            raise ValueError(f"radius must be positive, got {self.radius}")

    @property
    def n_samples(self) -> int:
        return self.samples.size

    @property
    def angles(self) -> np.ndarray:
        return circle_angles(self.n_samples)

    @property
    def points(self) -> np.ndarray:
        return self.radius * np.exp(1j * self.angles)

    @classmethod
    def sample(cls, func, n_samples: int, radius: float = 1.0) -> "CircleGrid":
        """Evaluate ``func`` at the points ``radius * exp(i t_k)``."""
        t = circle_angles(n_samples)
        return cls(radius, func(radius * np.exp(1j * t)))

    @classmethod
    def from_angles(cls, func, n_samples: int, radius: float = 1.0) -> "CircleGrid":
        """Evaluate ``func`` at the angles t_k themselves."""
        return cls(radius, func(circle_angles(n_samples)))


def circle_angles(n: int) -> np.ndarray:
    return 2 * np.pi * np.arange(n) / n


@dataclass
class FourierCoeffs:
    """Coefficients indexed n = -N/2 .. N/2-1 (stored in that order)."""

    radius: float
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex)

    @property
    def size(self) -> int:
        return self.coeffs.size

    @property
    def indices(self) -> np.ndarray:
        n = self.size
        return np.arange(-(n // 2), n - n // 2)

    def __getitem__(self, n: int) -> complex:
        k = n + self.size // 2
        if not 0 <= k < self.size:
            raise IndexError(f"index {n} outside [{-(self.size // 2)}, {self.size - self.size // 2 - 1}]")
        return self.coeffs[k]

    @classmethod
    def from_dict(cls, mapping: dict, size: int, radius: float = 1.0) -> "FourierCoeffs":
        out = cls(radius, np.zeros(size, dtype=complex))
        for n, value in mapping.items():
            k = n + size // 2
            if not 0 <= k < size:
                raise IndexError(f"index {n} does not fit in {size} coefficients")
            out.coeffs[k] = value
        return out


def analyze(g: CircleGrid) -> FourierCoeffs:
    """Discrete Fourier coefficients of the samples, (1/N) sum g_k e^{-i n t_k}."""
    c = np.fft.fftshift(np.fft.fft(g.samples)) / g.n_samples
    return FourierCoeffs(g.radius, c)


def synthesize(c: FourierCoeffs, n_samples: int) -> CircleGrid:
    """Evaluate the trigonometric polynomial at ``n_samples`` equispaced angles."""
    mags = np.abs(c.coeffs)
    if mags.max(initial=0.0) == 0.0:
        return CircleGrid(c.radius, np.zeros(n_samples, dtype=complex))
    live = mags > 1e-14 * mags.max()
    top = int(np.abs(c.indices[live]).max())
    if n_samples < 2 * top + 2:
        raise AliasingError(
            f"{n_samples} samples cannot resolve a mode of index {top} "
            f"(need at least {2 * top + 2})"
        )
    full = np.zeros(n_samples, dtype=complex)
    np.add.at(full, c.indices[live] % n_samples, c.coeffs[live])
    return CircleGrid(c.radius, np.fft.ifft(full) * n_samples)


def trig_eval(coeffs: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Evaluate FFT-ordered coefficients (length N) at arbitrary angles.

    The Nyquist mode is taken as a cosine so that real data interpolate
    to real values.
    """
    n = coeffs.shape[-1]
    m = np.fft.fftfreq(n, 1.0 / n)
    basis = np.exp(1j * np.outer(np.ravel(t), m))
    basis[:, n // 2] = np.cos(n / 2 * np.ravel(t))
    return basis @ coeffs


# ---------------------------------------------------------------------------
# radial discretization


def cheb(n: int):
    """Chebyshev–Lobatto nodes x_j = cos(pi j / n) and differentiation matrix."""
    x = np.cos(np.pi * np.arange(n + 1) / n)
    c = np.ones(n + 1)
    c[0] = c[-1] = 2.0
    c *= (-1.0) ** np.arange(n + 1)
    dx = x[:, None] - x[None, :]
    d = np.outer(c, 1.0 / c) / (dx + np.eye(n + 1))
    d -= np.diag(d.sum(axis=1))
    return d, x


def clencurt(n: int):
    """Clenshaw–Curtis weights on the Chebyshev–Lobatto nodes."""
    theta = np.pi * np.arange(n + 1) / n
    x = np.cos(theta)
    w = np.zeros(n + 1)
    ii = np.arange(1, n)
    v = np.ones(n - 1)
    if n % 2 == 0:
        w[0] = w[n] = 1.0 / (n**2 - 1)
        for k in range(1, n // 2):
            v -= 2 * np.cos(2 * k * theta[ii]) / (4 * k * k - 1)
        v -= np.cos(n * theta[ii]) / (n**2 - 1)
    else:
        w[0] = w[n] = 1.0 / n**2
        for k in range(1, (n - 1) // 2 + 1):
            v -= 2 * np.cos(2 * k * theta[ii]) / (4 * k * k - 1)
    w[ii] = 2 * v / n
    return x, w


@dataclass(frozen=True)
class _Radial:
    radii: np.ndarray          # increasing
    d1: dict                   # parity -> d/dr on the stored radii
    d2: dict
    area_weights: np.ndarray   # sum_j W_j * (2 pi / n) sum_k g_jk  ~  integral of g dA
    nodes: np.ndarray          # full Chebyshev nodes in [-1, 1] (descending)
    bary: np.ndarray           # barycentric weights on ``nodes``
    node_radius: np.ndarray    # index into ``radii`` for every node
    node_flip: np.ndarray      # True where the node is a mirrored (negative) disk node
    interior: np.ndarray       # indices of radii that are not on a boundary circle


@functools.lru_cache(maxsize=32)
def _radial(domain: str, r0: float, n_r: int) -> _Radial:
    if domain == "disk":
        n = 2 * n_r - 1
        d, x = cheb(n)
        _, w = clencurt(n)
        dd = d @ d
        pos = np.arange(n_r)
        mirror = n - pos
        rev = pos[::-1]
        d1, d2 = {}, {}
        for sigma in (1, -1):
            a = d[:n_r][:, pos] + sigma * d[:n_r][:, mirror]
            b = dd[:n_r][:, pos] + sigma * dd[:n_r][:, mirror]
            d1[sigma] = a[np.ix_(rev, rev)]
            d2[sigma] = b[np.ix_(rev, rev)]
        radii = x[:n_r][::-1].copy()
        weights = (w[:n_r] * x[:n_r])[::-1].copy()
        node_pos_index = np.where(np.arange(n + 1) < n_r, np.arange(n + 1), n - np.arange(n + 1))
        node_radius = n_r - 1 - node_pos_index
        node_flip = np.arange(n + 1) >= n_r
        interior = np.arange(n_r - 1)
        scale_nodes = x
    elif domain == "annulus":
        n = n_r - 1
        d, x = cheb(n)
        _, w = clencurt(n)
        scale = 2.0 / (1.0 - r0)
        dr = d * scale
        rev = np.arange(n_r)[::-1]
        dr = dr[np.ix_(rev, rev)]
        d1 = {1: dr, -1: dr}
        d2 = {1: dr @ dr, -1: dr @ dr}
        radii = (r0 + (1.0 - r0) * (x + 1.0) / 2.0)[::-1].copy()
        radii[0], radii[-1] = r0, 1.0
        weights = (w * (1.0 - r0) / 2.0)[::-1] * radii
        node_radius = n_r - 1 - np.arange(n + 1)
        node_flip = np.zeros(n + 1, dtype=bool)
        interior = np.arange(1, n_r - 1)
        scale_nodes = x
    else:
        raise ValueError(f"unknown domain {domain!r}")
    bary = (-1.0) ** np.arange(scale_nodes.size)
    bary[0] *= 0.5
    bary[-1] *= 0.5
    return _Radial(radii, d1, d2, weights, scale_nodes, bary, node_radius, node_flip, interior)


# ---------------------------------------------------------------------------
# polar grids


@dataclass(frozen=True)
class PolarMesh:
    """Geometry of a polar tensor grid on the disk (r0 = 0) or an annulus."""

    domain: str = "disk"
    r0: float = 0.0
    n_r: int = 129
    n_theta: int = 256

    def __post_init__(self):
        if self.domain not in ("disk", "annulus"):
            raise ValueError(f"domain must be 'disk' or 'annulus', got {self.domain!r}")
        if self.domain == "disk" and self.r0 != 0.0:
            object.__setattr__(self, "r0", 0.0)
        if self.domain == "annulus" and not 0.0 < self.r0 < 1.0:
            raise ValueError(f"annulus inner radius must lie in (0, 1), got {self.r0}")
        if self.n_theta < 8 or not _is_pow2(self.n_theta):
            raise ValueError(f"n_theta must be a power of two >= 8, got {self.n_theta}")
        if self.n_r < 4:
            raise ValueError("n_r must be at least 4")

    @classmethod
    def disk(cls, n_r: int = 129, n_theta: int = 256) -> "PolarMesh":
        return cls("disk", 0.0, n_r, n_theta)

    @classmethod
    def annulus(cls, r0: float, n_r: int = 129, n_theta: int = 256) -> "PolarMesh":
        return cls("annulus", float(r0), n_r, n_theta)

    @property
    def radial(self) -> _Radial:
        return _radial(self.domain, float(self.r0), self.n_r)

    @property
    def radii(self) -> np.ndarray:
        return self.radial.radii

    @property
    def theta(self) -> np.ndarray:
        return circle_angles(self.n_theta)

    @property
    def z(self) -> np.ndarray:
        return self.radii[:, None] * np.exp(1j * self.theta[None, :])

    @property
    def modes(self) -> np.ndarray:
        return np.fft.fftfreq(self.n_theta, 1.0 / self.n_theta).astype(int)

    @property
    def boundary_rows(self) -> list:
        return [self.n_r - 1] if self.domain == "disk" else [0, self.n_r - 1]

    def contains(self, z, slack: float = 0.0) -> np.ndarray:
        """Closed-domain membership with an absolute slack on the radii."""
        a = np.abs(np.asarray(z))
        inside = a <= 1.0 + slack
        if self.domain == "annulus":
            inside &= a >= self.r0 - slack
        return inside

    def grid(self, values) -> "PolarGrid":
        return PolarGrid(self, values)

    def sample(self, func) -> "PolarGrid":
        return PolarGrid(self, func(self.z))


@dataclass
class PolarGrid:
    """Values of an area field on a :class:`PolarMesh` (rows = radii)."""

    mesh: PolarMesh
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.values = np.asarray(self.values)
        shape = (self.mesh.n_r, self.mesh.n_theta)
        if self.values.shape != shape:
            raise ValueError(f"values must have shape {shape}, got {self.values.shape}")

    # convenience accessors mirroring the mesh
    @property
    def radii(self) -> np.ndarray:
        return self.mesh.radii

    @property
    def n_theta(self) -> int:
        return self.mesh.n_theta

    @property
    def outer(self) -> np.ndarray:
        return self.values[-1]

    @property
    def inner(self) -> np.ndarray:
        if self.mesh.domain != "annulus":
            raise ValueError("disk grids have no inner boundary circle")
        return self.values[0]

    def like(self, values) -> "PolarGrid":
        return PolarGrid(self.mesh, values)

    def norm(self) -> float:
        return area_norm(self.values, self.mesh)

    def interpolate(self, z) -> np.ndarray:
        return interpolate(self.values, self.mesh, z)


def area_norm(values: np.ndarray, mesh: PolarMesh) -> float:
    """L2 norm over the domain with area weights."""
    w = mesh.radial.area_weights
    per_row = np.sum(np.abs(values) ** 2, axis=1) * (2 * np.pi / mesh.n_theta)
    return float(np.sqrt(max(np.dot(w, per_row), 0.0)))


def _by_parity(mesh: PolarMesh, coeffs: np.ndarray, ops: dict) -> np.ndarray:
    out = np.empty_like(coeffs, dtype=complex)
    parity = np.where(mesh.modes % 2 == 0, 1, -1)
    for sigma in (1, -1):
        cols = parity == sigma
        out[:, cols] = ops[sigma] @ coeffs[:, cols]
    return out


def radial_derivative(values: np.ndarray, mesh: PolarMesh) -> np.ndarray:
    c = np.fft.fft(values, axis=1)
    return np.fft.ifft(_by_parity(mesh, c, mesh.radial.d1), axis=1)


def angular_derivative(values: np.ndarray, mesh: PolarMesh) -> np.ndarray:
    m = mesh.modes.astype(float)
    m[mesh.n_theta // 2] = 0.0
    c = np.fft.fft(values, axis=1)
    return np.fft.ifft(1j * m * c, axis=1)


def _wirtinger_arrays(values: np.ndarray, mesh: PolarMesh):
    fr = radial_derivative(values, mesh)
    ft = angular_derivative(values, mesh)
    r = mesh.radii[:, None]
    e = np.exp(1j * mesh.theta)[None, :]
    d = 0.5 / e * (fr - 1j * ft / r)
    dbar = 0.5 * e * (fr + 1j * ft / r)
    return d, dbar


def wirtinger(f: PolarGrid):
    """Return (df, dbarf) with d = (d_x - i d_y)/2 and dbar = (d_x + i d_y)/2."""
    d, dbar = _wirtinger_arrays(f.values, f.mesh)
    return f.like(d), f.like(dbar)


def laplacian(u: PolarGrid) -> PolarGrid:
    mesh = u.mesh
    c = np.fft.fft(u.values, axis=1)
    r = mesh.radii[:, None]
    m2 = mesh.modes.astype(float) ** 2
    out = _by_parity(mesh, c, mesh.radial.d2) + _by_parity(mesh, c, mesh.radial.d1) / r - m2 * c / r**2
    return u.like(np.fft.ifft(out, axis=1))


@functools.lru_cache(maxsize=16)
def _poisson_inverses(domain: str, r0: float, n_r: int, n_theta: int):
    rad = _radial(domain, r0, n_r)
    r = rad.radii
    inner = rad.interior
    inverses = []
    for m in range(n_theta // 2 + 1):
        sigma = 1 if m % 2 == 0 else -1
        op = rad.d2[sigma] + rad.d1[sigma] / r[:, None] - np.diag(m * m / r**2)
        block = op[np.ix_(inner, inner)]
        try:
            inv = np.linalg.inv(block)
        except np.linalg.LinAlgError as exc:
            raise SingularSystemError(f"radial system for mode {m} is singular") from exc
        cond = np.linalg.norm(block, 1) * np.linalg.norm(inv, 1)
        if not np.isfinite(cond) or cond > 1e14:
            raise SingularSystemError(f"radial system for mode {m} has condition {cond:.2e}")
        inverses.append(inv)
    return inner, inverses


def poisson_dirichlet0(rhs: PolarGrid) -> PolarGrid:
    """Solve Laplace(u) = rhs with u = 0 on every boundary circle.

    Each angular Fourier mode gives a radial two-point problem, solved by
    Chebyshev collocation.  Complex right-hand sides are accepted (the
    operator is real, so real and imaginary parts decouple).
    """
    mesh = rhs.mesh
    inner, inverses = _poisson_inverses(mesh.domain, float(mesh.r0), mesh.n_r, mesh.n_theta)
    c = np.fft.fft(rhs.values, axis=1)
    u = np.zeros_like(c, dtype=complex)
    absm = np.abs(mesh.modes)
    for m, inv in enumerate(inverses):
        cols = np.nonzero(absm == m)[0]
        u[np.ix_(inner, cols)] = inv @ c[np.ix_(inner, cols)]
    out = np.fft.ifft(u, axis=1)
    if np.isrealobj(rhs.values):
        out = out.real
    return rhs.like(out)


def dbar_residual(s: PolarGrid, g: PolarGrid) -> float:
    """Relative L2 defect ||dbar s - g|| / ||g|| (absolute when g = 0)."""
    _, dbar = _wirtinger_arrays(s.values, s.mesh)
    num = area_norm(dbar - g.values, s.mesh)
    den = area_norm(g.values, s.mesh)
    return num / den if den > 0 else num


def cauchy_area_transform(g: PolarGrid, *, check: bool = True, tol: float | None = None) -> PolarGrid:
    """A solution s of dbar s = g, normalized so Im(mean of s on the outer circle) = 0.

    Solves Laplace(v) = g with zero boundary values and returns s = 4 dv;
    since Laplace = 4 d dbar, dbar s = Laplace(v) = g.
    """
    tol = TOL.cauchy_residual if tol is None else tol
    v = poisson_dirichlet0(g.like(np.asarray(g.values, dtype=complex)))
    d, _ = _wirtinger_arrays(v.values, g.mesh)
    s = 4.0 * d
    s -= 1j * np.mean(s[-1]).imag
    out = g.like(s)
    if check:
        res = dbar_residual(out, g)
        if res > tol:
            raise ResidualError("Cauchy area transform above tolerance", res)
    return out


# ---------------------------------------------------------------------------
# interpolation


def interpolate(values: np.ndarray, mesh: PolarMesh, z, chunk: int = 2048) -> np.ndarray:
    """Spectral interpolation of grid values at arbitrary points of the closed domain.

    Trigonometric in the angle; barycentric Chebyshev in the radius (on the
    full diameter for disk grids).
    """
    z = np.asarray(z, dtype=complex)
    shape = z.shape
    z = z.ravel()
    rad = mesh.radial
    n = mesh.n_theta
    c = np.fft.fft(values, axis=1) / n
    m = mesh.modes
    sign = (-1.0) ** m
    out = np.empty(z.size, dtype=complex)
    if mesh.domain == "disk":
        xt_all = np.abs(z)
    else:
        xt_all = 2.0 * (np.abs(z) - mesh.r0) / (1.0 - mesh.r0) - 1.0
    for start in range(0, z.size, chunk):
        zz = z[start:start + chunk]
        th = np.angle(zz)
        basis = np.exp(1j * np.outer(th, m))
        basis[:, n // 2] = np.cos(n / 2 * th)
        along = basis @ c.T                      # (P, n_r) values at (r_j, theta)
        if mesh.domain == "disk":
            flipped = (basis * sign) @ c.T       # values at (r_j, theta + pi)
            node_vals = np.where(rad.node_flip[None, :], flipped[:, rad.node_radius], along[:, rad.node_radius])
        else:
            node_vals = along[:, rad.node_radius]
        xt = xt_all[start:start + chunk]
        diff = xt[:, None] - rad.nodes[None, :]
        exact = diff == 0.0
        diff[exact] = 1.0
        k = rad.bary[None, :] / diff
        vals = (k * node_vals).sum(axis=1) / k.sum(axis=1)
        hit = exact.any(axis=1)
        if hit.any():
            idx = np.argmax(exact[hit], axis=1)
            vals[hit] = node_vals[hit, idx]
        out[start:start + chunk] = vals
    if np.isrealobj(values):
        out = out.real
    return out.reshape(shape)
