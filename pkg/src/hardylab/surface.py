"""Analysis on the lifted annulus.

The universal cover of A = {r0 < |z| < 1} is parametrized by (r, t) with
psi(r, t) = r e^{it}, t real.  In the coordinate w = ln r + i t it is the
strip -q0 < Re w < 0, q0 = -ln r0, so harmonic functions are handled in
(x, t) = (ln r, t) throughout.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.polynomial import chebyshev as C

from .config import TOL
from .grid import circle_angles
from .hardy import DomainError

KERNEL_MASS = 2.0
"""Total t-mass of K(r, .) + K(r0/r, .); the harmonic extension divides by it."""


def surface_constant(r0: float) -> float:
    """q0 = -ln r0."""
    if not 0.0 < r0 < 1.0:
        raise ValueError(f"r0 must lie in (0, 1), got {r0}")
    return float(-np.log(r0))


def _snap_index(value: float) -> float:
    frac = float(np.mod(value, 1.0))
    if frac > 1.0 - 1e-12:
        frac = 0.0
    return frac


def gauss_radii(r0: float, n: int = 16) -> np.ndarray:
    """Chebyshev-Gauss nodes in x = ln r over (-q0, 0), returned as increasing radii."""
    q0 = surface_constant(r0)
    k = np.arange(n)
    x = -np.cos((2 * k + 1) * np.pi / (2 * n))            # increasing in (-1, 1)
    return np.exp(0.5 * q0 * (x - 1.0))


@dataclass
class LiftedFunction:
    """Samples of a function on the lifted surface.

    ``values[i, j]`` is F(radii[i], t[j]); ``outer_line`` and ``inner_line``
    hold the boundary values at r = 1 and r = r0 on the same t grid.  The t
    grid covers ``periods`` full turns with ``n_per_period`` points each.
    """

    r0: float
    radii: np.ndarray
    t: np.ndarray
    values: np.ndarray
    outer_line: np.ndarray
    inner_line: np.ndarray
    multiplier: complex = 1.0 + 0.0j
    index: float = 0.0
    periods: int = 1
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if abs(abs(self.multiplier) - 1.0) > 1e-12:
            raise ValueError("multiplier must have unit modulus")
        if not 0.0 <= self.index < 1.0:
            raise ValueError("index must lie in [0, 1)")
        if self.values.shape != (self.radii.size, self.t.size):
            raise ValueError("values must have shape (n_radii, n_t)")

    @property
    def n_per_period(self) -> int:
        return self.t.size // self.periods

    def automorphy_defect(self) -> tuple[float, float]:
        """(modulus defect, multiplier defect) between consecutive periods."""
        if self.periods < 2:
            return 0.0, 0.0
        n = self.n_per_period
        rows = [self.values, self.outer_line[None, :], self.inner_line[None, :]]
        mod = mult = 0.0
        for v in rows:
            a, b = v[:, :-n], v[:, n:]
            scale = max(1.0, np.abs(a).max())
            mod = max(mod, float(np.abs(np.abs(b) - np.abs(a)).max() / scale))
            mult = max(mult, float(np.abs(b - self.multiplier * a).max() / scale))
        return mod, mult


@dataclass
class BoundaryDensity:
    """Absolutely continuous densities on the two boundary lines, one period each.

    ``outer`` lives on r = 1, ``inner`` on r = r0.  Optional callables of t
    let quadratures sample the data exactly instead of interpolating.
    """

    outer: np.ndarray
    inner: np.ndarray
    outer_fn: Callable | None = None
    inner_fn: Callable | None = None

    def __post_init__(self):
        self.outer = np.asarray(self.outer, dtype=float)
        self.inner = np.asarray(self.inner, dtype=float)
        if self.outer.shape != self.inner.shape or self.outer.ndim != 1:
            raise ValueError("outer and inner densities need matching 1-d shapes")
        if not (np.all(np.isfinite(self.outer)) and np.all(np.isfinite(self.inner))):
            raise ValueError("densities must be finite")

    @property
    def n_samples(self) -> int:
        return self.outer.size

    @classmethod
    def from_functions(cls, outer_fn, inner_fn, n_samples: int = 256) -> "BoundaryDensity":
        t = circle_angles(n_samples)
        return cls(np.broadcast_to(outer_fn(t), t.shape).astype(float),
                   np.broadcast_to(inner_fn(t), t.shape).astype(float), outer_fn, inner_fn)

    def sample(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        """Both densities on n equispaced points (exact when callables are present)."""
        t = circle_angles(n)
        if self.outer_fn is not None and self.inner_fn is not None:
            return (np.broadcast_to(self.outer_fn(t), t.shape).astype(float),
                    np.broadcast_to(self.inner_fn(t), t.shape).astype(float))
        return _fourier_resample(self.outer, n), _fourier_resample(self.inner, n)


def _fourier_resample(v: np.ndarray, n: int) -> np.ndarray:
    m = v.size
    if n == m:
        return v.copy()
    c = np.fft.rfft(v)
    if n > m and m % 2 == 0:
        c[-1] *= 0.5
    return np.fft.irfft(c, n) * (n / m)


# ---------------------------------------------------------------------------
# the kernel


def _check_radius(r, r0):
    r = np.asarray(r, dtype=float)
    if np.any(r <= r0) or np.any(r >= 1.0):
        raise DomainError(f"radius must lie in ({r0}, 1)")
    return r


def sarason_K(r, t, r0: float, *, check: bool = True):
    """The strip kernel at (r, t).

    (1/q0) cos(b) / (cosh(pi t/q0) - sin(b)),  b = (pi/q0) ln(r / sqrt(r0)).

    The denominator is evaluated as 2 sinh^2(tau/2) + 2 sin^2(pi/4 - b/2),
    which keeps its relative accuracy when both terms are small.  With
    ``check`` the rewritten form is evaluated too and agreement to 1e-12
    (relative) is asserted.
    """
    q0 = surface_constant(r0)
    r = _check_radius(r, r0)
    t = np.asarray(t, dtype=float)
    b = (np.pi / q0) * (np.log(r) + 0.5 * q0)
    tau = np.pi * t / q0
    den = 2.0 * np.sinh(0.5 * tau) ** 2 + 2.0 * np.sin(0.25 * np.pi - 0.5 * b) ** 2
    with np.errstate(over="ignore"):
        k = np.cos(b) / (q0 * den)
    if check:
        alt = sarason_K_rewritten(r, t, r0)
        gap = np.abs(k - alt) / np.maximum(np.abs(alt), 1e-300)
        if np.any(gap > 1e-12):
            raise AssertionError(f"kernel forms disagree by {gap.max():.3e}")
    return k


def sarason_K_rewritten(r, t, r0: float):
    """(1/q0) (-sin a) / (cosh(pi t/q0) - cos a),  a = pi ln(r) / q0."""
    q0 = surface_constant(r0)
    r = _check_radius(r, r0)
    t = np.asarray(t, dtype=float)
    a = np.pi * np.log(r) / q0
    tau = np.pi * t / q0
    den = 2.0 * np.sinh(0.5 * tau) ** 2 + 2.0 * np.sin(0.5 * a) ** 2
    with np.errstate(over="ignore"):
        return -np.sin(a) / (q0 * den)


def _translates(q0: float) -> int:
    # tail of K beyond |t| > 2 pi k decays like e^{-2 pi^2 k / q0}; push it below e^{-30}
    return int(np.ceil(30.0 * q0 / (2.0 * np.pi**2))) + 2


def periodized_K(r: float, t, r0: float) -> np.ndarray:
    """sum_k K(r, t + 2 pi k), summed until the neglected tail is < 1e-12."""
    q0 = surface_constant(r0)
    t = np.asarray(t, dtype=float)
    kmax = _translates(q0)
    total = np.zeros(t.shape)
    for k in range(-kmax, kmax + 1):
        total += sarason_K(r, t + 2 * np.pi * k, r0, check=False)
    return total


def kernel_mass(r: float, r0: float, n: int | None = None) -> float:
    """int_R K(r, t) + K(r0/r, t) dt by periodized quadrature."""
    q0 = surface_constant(r0)
    delta = min(np.log(r) + q0, -np.log(r)) / q0
    n = n or _quad_size(delta)
    t = circle_angles(n)
    h = 2 * np.pi / n
    return float(h * (periodized_K(r, t, r0).sum() + periodized_K(r0 / r, t, r0).sum()))


def _quad_size(delta: float, floor: int = 256) -> int:
    need = max(floor, int(np.ceil(48.0 / max(delta, 1e-6))))
    return 1 << int(np.ceil(np.log2(need)))


# ---------------------------------------------------------------------------
# harmonic extension


@dataclass
class HarmonicExtension:
    """U(r, t) on radii x one period, with its Laplacian residual in (ln r, t)."""

    r0: float
    radii: np.ndarray
    t: np.ndarray
    values: np.ndarray
    residual: float


def _x_second_derivative(values: np.ndarray, radii: np.ndarray, q0: float) -> np.ndarray:
    """d^2/dx^2 along the radial axis by Chebyshev interpolation in x = ln r."""
    x = np.log(radii)
    s = 2.0 * x / q0 + 1.0                         # map (-q0, 0) -> (-1, 1)
    deg = radii.size - 1
    out = np.empty_like(values)
    for j in range(values.shape[1]):
        c = C.chebfit(s, values[:, j], deg)
        out[:, j] = C.chebval(s, C.chebder(c, 2)) * (2.0 / q0) ** 2
    return out


def laplacian_residual(values: np.ndarray, radii: np.ndarray, r0: float) -> float:
    """max |U_xx + U_tt| / max(1, max|U|) for U sampled on radii x one period."""
    q0 = surface_constant(r0)
    n = values.shape[1]
    m = np.fft.fftfreq(n, 1.0 / n)
    m[n // 2] = 0.0 if n % 2 == 0 else m[n // 2]
    utt = np.fft.ifft(-(m**2) * np.fft.fft(values, axis=1), axis=1)
    if np.isrealobj(values):
        utt = utt.real
    uxx = _x_second_derivative(values, radii, q0)
    return float(np.abs(uxx + utt).max() / max(1.0, np.abs(values).max()))


def harmonic_ext_annulus(mu: BoundaryDensity, r0: float, radii=None, n_t: int | None = None) -> HarmonicExtension:
    """Harmonic extension of boundary densities by convolution with the kernel.

    U(r, t) = [ int K(r, t-s) mu_outer(s) ds + int K(r0/r, t-s) mu_inner(s) ds ] / KERNEL_MASS,

    with each s-integral taken over one period of the periodized kernel.  The
    division by the kernel mass makes constant data reproduce itself.
    Quadrature is circular convolution on a grid fine enough to resolve the
    kernel at the radius closest to the boundary.
    """
    q0 = surface_constant(r0)
    radii = gauss_radii(r0) if radii is None else np.asarray(radii, dtype=float)
    _check_radius(radii, r0)
    n_t = n_t or mu.n_samples
    delta = float(np.min(np.minimum(np.log(radii) + q0, -np.log(radii)))) / q0
    n_q = max(_quad_size(delta), n_t)
    if n_q % n_t:
        raise ValueError("n_t must be a power of two")
    mo, mi = mu.sample(n_q)
    fo, fi = np.fft.rfft(mo), np.fft.rfft(mi)
    tq = circle_angles(n_q)
    h = 2 * np.pi / n_q
    values = np.empty((radii.size, n_t))
    step = n_q // n_t
    for i, r in enumerate(radii):
        ko = np.fft.rfft(periodized_K(r, tq, r0))
        ki = np.fft.rfft(periodized_K(r0 / r, tq, r0))
        u = np.fft.irfft(ko * fo + ki * fi, n_q) * h / KERNEL_MASS
        values[i] = u[::step]
    res = laplacian_residual(values, radii, r0)
    return HarmonicExtension(r0, radii, circle_angles(n_t), values, res)


def harmonic_ext_modes(mu: BoundaryDensity, r0: float, radii, n_t: int) -> np.ndarray:
    """Harmonic extension computed mode by mode in the strip (independent of the kernel).

    Mode m of U is [mu_o(m) sinh(m(x+q0)) - mu_i(m) sinh(m x)] / sinh(m q0),
    and the mean part interpolates linearly in x.
    """
    q0 = surface_constant(r0)
    x = np.log(np.asarray(radii, dtype=float))[:, None]
    mo, mi = mu.sample(n_t)
    co, ci = np.fft.rfft(mo) / n_t, np.fft.rfft(mi) / n_t
    m = np.arange(co.size)[None, :]
    with np.errstate(invalid="ignore", divide="ignore"):
        a = np.where(m > 0, np.exp(m * x) * (1 - np.exp(-2 * m * (x + q0))) / (1 - np.exp(-2 * m * q0)), 0.0)
        b = np.where(m > 0, np.exp(-m * (x + q0)) * (1 - np.exp(2 * m * x)) / (1 - np.exp(-2 * m * q0)), 0.0)
    # a = sinh(m(x+q0))/sinh(m q0), b = -sinh(m x)/sinh(m q0), written without overflow
    lin = (x + q0) / q0
    modes = co[None, :] * a + ci[None, :] * b
    modes[:, 0] = co[0] * lin[:, 0] + ci[0] * (1 - lin[:, 0])
    return np.fft.irfft(modes * n_t, n_t)


# ---------------------------------------------------------------------------
# lifting, index, outer functions


def lift(phi: Callable, r0: float, radii=None, n_t: int = 256, periods: int = 1) -> LiftedFunction:
    """phi o psi with psi(r, t) = r e^{it}; single-valued, so multiplier 1 and index 0."""
    surface_constant(r0)
    radii = gauss_radii(r0) if radii is None else np.asarray(radii, dtype=float)
    t = np.arange(n_t * periods) * (2 * np.pi / n_t)
    z = radii[:, None] * np.exp(1j * t)[None, :]
    vals = np.broadcast_to(np.asarray(phi(z), dtype=complex), z.shape).copy()
    outer = np.broadcast_to(np.asarray(phi(np.exp(1j * t)), dtype=complex), t.shape).copy()
    inner = np.broadcast_to(np.asarray(phi(r0 * np.exp(1j * t)), dtype=complex), t.shape).copy()
    return LiftedFunction(r0, radii, t, vals, outer, inner, 1.0 + 0.0j, 0.0, periods)


def index_of(log_outer, log_inner=None, r0: float | None = None) -> float:
    """Index in [0, 1): frac((mean ln|F| on r = 1 - mean ln|F| on r = r0) / q0).

    Accepts either a LiftedFunction or the two boundary log-moduli sampled
    over one period together with r0.
    """
    if isinstance(log_outer, LiftedFunction):
        f = log_outer
        n = f.n_per_period
        with np.errstate(divide="ignore"):
            lo = np.log(np.abs(f.outer_line[:n]))
            li = np.log(np.abs(f.inner_line[:n]))
        r0 = f.r0
    else:
        if log_inner is None or r0 is None:
            raise TypeError("give log_inner and r0 with raw log-moduli")
        lo, li = np.asarray(log_outer, float), np.asarray(log_inner, float)
    if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(li))):
        raise ValueError("log-moduli must be finite")
    q0 = surface_constant(r0)
    return _snap_index((lo.mean() - li.mean()) / q0)


def _analytic_completion(lo: np.ndarray, li: np.ndarray, q0: float):
    """Coefficients of the analytic G on the strip with Re G = lo at x = 0 and li at x = -q0.

    Returns (A, B, P, Q) where
    G(w) = A + B w + sum_{m>=1} [2 P_m e^{m w} + 2 conj(Q_m) e^{-m (w + q0)}].
    """
    n = lo.size
    co = np.fft.rfft(lo) / n
    ci = np.fft.rfft(li) / n
    if n % 2 == 0:
        co[-1] *= 0.5
        ci[-1] *= 0.5
    a = co[0].real
    b = (co[0].real - ci[0].real) / q0
    m = np.arange(1, co.size)
    e = np.exp(-m * q0)
    d = 1.0 - e * e
    p = (co[1:] - e * ci[1:]) / d
    q = (ci[1:] - e * co[1:]) / d
    return a, b, p, q


def _eval_completion(coef, q0: float, x, t) -> np.ndarray:
    a, b, p, q = coef
    x = np.asarray(x, dtype=float)[:, None]
    t = np.asarray(t, dtype=float)[None, :]
    w = x + 1j * t
    out = a + b * w
    m = np.arange(1, p.size + 1)
    em = np.exp(np.outer(np.ravel(x), m))                     # e^{m x}, x <= 0
    fm = np.exp(-np.outer(np.ravel(x) + q0, m))               # e^{-m (x + q0)}
    phase = np.exp(1j * np.outer(m, np.ravel(t)))             # e^{i m t}
    out = out + 2.0 * ((em * p) @ phase) + 2.0 * ((fm * np.conj(q)) @ np.conj(phase))
    return out


def outer_annulus(log_outer, log_inner, r0: float, radii=None, periods: int = 1,
                  outer_fn: Callable | None = None, inner_fn: Callable | None = None) -> LiftedFunction:
    """Modulus automorphic outer function F = exp(U + iV) with prescribed boundary moduli.

    U is the kernel extension of the log-moduli and V the conjugate obtained
    from the mode-wise analytic completion G.  Its mean part B w makes V grow
    by 2 pi B per period, so the multiplier is e^{2 pi i B} and the index is
    frac(B).  meta['consistency'] reports max |U - Re G| over the grid.
    """
    q0 = surface_constant(r0)
    lo = np.asarray(log_outer, dtype=float)
    li = np.asarray(log_inner, dtype=float)
    n = lo.size
    mu = BoundaryDensity(lo, li, outer_fn, inner_fn)
    ext = harmonic_ext_annulus(mu, r0, radii)
    coef = _analytic_completion(lo, li, q0)
    t = np.arange(n * periods) * (2 * np.pi / n)
    g = _eval_completion(coef, q0, np.log(ext.radii), t)
    u = np.tile(ext.values, (1, periods))
    values = np.exp(u + 1j * g.imag)
    gb = _eval_completion(coef, q0, np.array([0.0, -q0]), t)
    outer_line = np.exp(np.tile(lo, periods) + 1j * gb[0].imag)
    inner_line = np.exp(np.tile(li, periods) + 1j * gb[1].imag)
    b = coef[1]
    index = _snap_index(b)
    meta = {
        "consistency": float(np.abs(u - g.real).max()),
        "laplacian_residual": ext.residual,
        "flux": float(b),
    }
    return LiftedFunction(r0, ext.radii, t, values, outer_line, inner_line,
                          complex(np.exp(2j * np.pi * b)), index, periods, meta)


# ---------------------------------------------------------------------------
# omega sets and the case split


@dataclass(frozen=True)
class OmegaMeasures:
    """Normalized measures of {|phi*| = alpha} on each boundary circle, alpha in {r0, 1}."""

    m_r0_on_inner: float
    m_r0_on_outer: float
    m_1_on_inner: float
    m_1_on_outer: float
    tol: float
    reliable: bool = True

    @property
    def m_r0(self) -> float:
        return self.m_r0_on_inner + self.m_r0_on_outer

    @property
    def m_1(self) -> float:
        return self.m_1_on_inner + self.m_1_on_outer

    def as_dict(self) -> dict:
        return {
            "m_r0_on_inner": self.m_r0_on_inner,
            "m_r0_on_outer": self.m_r0_on_outer,
            "m_1_on_inner": self.m_1_on_inner,
            "m_1_on_outer": self.m_1_on_outer,
            "tol": self.tol,
            "reliable": self.reliable,
        }


EPSILONS = (1e-2, 1e-3, 1e-4)


def boundary_modulus(phi: Callable, radius: float, inward: float, t: np.ndarray, tol: float):
    """|phi*| on the circle of given radius from radii radius + inward * eps.

    Linear Richardson extrapolation on consecutive pairs of EPSILONS; the
    value is reliable when the two extrapolants agree to ``tol``.
    """
    e = np.asarray(EPSILONS)
    mods = [np.abs(phi((radius + inward * eps) * np.exp(1j * t))) for eps in e]
    ext1 = (e[0] * mods[1] - e[1] * mods[0]) / (e[0] - e[1])
    ext2 = (e[1] * mods[2] - e[2] * mods[1]) / (e[1] - e[2])
    gap = float(np.abs(ext2 - ext1).max())
    return ext2, gap <= tol, gap


def omega_measures(phi: Callable, r0: float, tol: float | None = None, n: int = 4096) -> OmegaMeasures:
    """Measure where |phi*| equals r0 or 1, split by boundary circle."""
    tol = TOL.omega if tol is None else tol
    surface_constant(r0)
    t = circle_angles(n)
    outer, ok_o, _ = boundary_modulus(phi, 1.0, -1.0, t, tol)
    inner, ok_i, _ = boundary_modulus(phi, r0, +1.0, t, tol)

    def frac(vals, level):
        return float(np.mean(np.abs(vals - level) <= tol))

    return OmegaMeasures(
        m_r0_on_inner=frac(inner, r0),
        m_r0_on_outer=frac(outer, r0),
        m_1_on_inner=frac(inner, 1.0),
        m_1_on_outer=frac(outer, 1.0),
        tol=tol,
        reliable=bool(ok_o and ok_i),
    )


class Case(enum.Enum):
    CASE1 = "Case1"
    CASE2 = "Case2"
    CASE3 = "Case3"
    NOT_ISOMETRY_CANDIDATE = "NotIsometryCandidate"


def classify_case(m: OmegaMeasures, tol: float | None = None, n: int = 4096) -> Case:
    """Which of the three admissible boundary patterns the measures follow.

    Measures come from n samples, so comparisons allow one sample of slack
    on top of ``tol``.
    """
    tol = m.tol if tol is None else tol
    slack = max(tol, 1.0 / n)

    def near(a, b):
        return abs(a - b) <= slack

    if near(m.m_r0_on_inner, 1.0) and near(m.m_1_on_outer, 1.0):
        return Case.CASE1
    if near(m.m_1_on_inner, 1.0) and near(m.m_r0_on_outer, 1.0):
        return Case.CASE2
    if near(m.m_r0_on_inner, 0.5) and near(m.m_r0_on_outer, 0.5):
        return Case.CASE3
    return Case.NOT_ISOMETRY_CANDIDATE
