"""Classical Hardy spaces of the disk and the annulus.

Functions are Laurent series on {rho < |z| < 1} (rho = 0 for the disk) and
are identified with their boundary traces.  Every boundary circle carries
the normalized measure dt / 2 pi; on the annulus the p-th powers of the two
circle norms add.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .config import TOL
from .grid import CircleGrid, FourierCoeffs, analyze, circle_angles


class DomainError(ValueError):
    """A point lies outside the domain required by the operation."""


@dataclass
class LaurentSeries:
    """sum_{n=-M}^{M} a_n z^n on {inner_radius < |z| < 1}.

    ``coeffs`` has length 2M + 1 and holds a_{-M} .. a_M.
    """

    inner_radius: float
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        if self.coeffs.ndim != 1 or self.coeffs.size % 2 == 0:
            raise ValueError("coeffs must be a 1-d array of odd length 2M+1")
        if not 0.0 <= self.inner_radius < 1.0:
            raise ValueError(f"inner radius must lie in [0, 1), got {self.inner_radius}")
        if self.inner_radius == 0.0 and np.any(self.coeffs[: self.order] != 0):
            raise ValueError("disk series cannot carry negative powers")

    @property
    def order(self) -> int:
        return self.coeffs.size // 2

    @property
    def indices(self) -> np.ndarray:
        return np.arange(-self.order, self.order + 1)

    @property
    def is_disk(self) -> bool:
        return self.inner_radius == 0.0

    def coefficient(self, n: int) -> complex:
        if abs(n) > self.order:
            return 0.0j
        return complex(self.coeffs[n + self.order])

    @classmethod
    def from_dict(cls, mapping: dict, inner_radius: float = 0.0) -> "LaurentSeries":
        order = max((abs(int(k)) for k in mapping), default=0)
        c = np.zeros(2 * order + 1, dtype=complex)
        for k, v in mapping.items():
            c[int(k) + order] += v
        return cls(inner_radius, c)

    @classmethod
    def monomial(cls, k: int, inner_radius: float = 0.0, scale: complex = 1.0) -> "LaurentSeries":
        return cls.from_dict({k: scale}, inner_radius)

    @classmethod
    def taylor(cls, coeffs, inner_radius: float = 0.0) -> "LaurentSeries":
        """Series from Taylor coefficients a_0, a_1, ..."""
        a = np.asarray(coeffs, dtype=complex)
        return cls(inner_radius, np.concatenate([np.zeros(a.size - 1, dtype=complex), a]))

    def tail_ratio(self, keep: int = 4) -> float:
        """Largest coefficient among the outermost ``keep`` orders relative to the largest one."""
        mags = np.abs(self.coeffs)
        top = mags.max(initial=0.0)
        if top == 0.0 or self.order < keep:
            return 0.0
        edge = np.concatenate([mags[:keep], mags[-keep:]])
        return float(edge.max() / top)

    def __call__(self, z):
        """Evaluate by Horner's rule in z and 1/z (no domain check)."""
        z = np.asarray(z, dtype=complex)
        m = self.order
        pos = np.polynomial.polynomial.polyval(z, self.coeffs[m:])
        if m == 0 or not np.any(self.coeffs[:m]):
            return pos
        with np.errstate(divide="ignore", invalid="ignore"):
            neg = np.polynomial.polynomial.polyval(1.0 / z, np.concatenate([[0.0], self.coeffs[:m][::-1]]))
        return pos + neg

    def derivative(self) -> "LaurentSeries":
        """Termwise derivative (the order grows by one when a_{-M} != 0)."""
        n = self.indices
        out = np.zeros_like(self.coeffs)
        out[:-1] = (n * self.coeffs)[1:]  # coefficient of z^k is (k+1) a_{k+1}
        if not self.is_disk and self.order > 0 and self.coeffs[0] != 0:
            # keep the z^{-M-1} term by widening the series by one order
            wide = np.concatenate([[-self.order * self.coeffs[0]], out, [0.0]])
            return LaurentSeries(self.inner_radius, wide)
        return LaurentSeries(self.inner_radius, out)

    def trace(self, n_samples: int, radius: float = 1.0) -> CircleGrid:
        return CircleGrid.sample(self, n_samples, radius)

    def annulus_trace(self, n_samples: int) -> "AnnulusTrace":
        if self.is_disk:
            raise ValueError("disk series has no inner boundary circle")
        return AnnulusTrace.sample(self, self.inner_radius, n_samples)

    def __add__(self, other: "LaurentSeries") -> "LaurentSeries":
        m = max(self.order, other.order)
        c = np.zeros(2 * m + 1, dtype=complex)
        c[m - self.order: m + self.order + 1] += self.coeffs
        c[m - other.order: m + other.order + 1] += other.coeffs
        return LaurentSeries(max(self.inner_radius, other.inner_radius), c)


@dataclass
class AnnulusTrace:
    """Boundary samples on the unit circle and on the circle of radius r0."""

    outer: CircleGrid
    inner: CircleGrid
    r0: float

    def __post_init__(self):
        if self.outer.n_samples != self.inner.n_samples:
            raise ValueError("both circles must carry the same number of samples")
        if not 0.0 < self.r0 < 1.0:
            raise ValueError(f"r0 must lie in (0, 1), got {self.r0}")

    @property
    def n_samples(self) -> int:
        return self.outer.n_samples

    @classmethod
    def sample(cls, func, r0: float, n_samples: int) -> "AnnulusTrace":
        return cls(CircleGrid.sample(func, n_samples, 1.0), CircleGrid.sample(func, n_samples, r0), r0)


@dataclass
class HardyFunction:
    """An element of H^p(D) or H^p(A).

    Either a plain ``series``, or z**shift * exp(exponent) when the function
    is built as an outer function (zero-free apart from the monomial).
    ``boundary_log_modulus`` gives log|tr F| on the unit circle in closed
    form when it is known exactly (piecewise-constant data).
    """

    series: LaurentSeries | None = None
    exponent: LaurentSeries | None = None
    shift: int = 0
    inner_radius: float = 0.0
    boundary_log_modulus: Callable | None = None
    boundary_conjugate: Callable | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if (self.series is None) == (self.exponent is None):
            raise ValueError("give exactly one of series / exponent")

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        if self.series is not None:
            return self.series(z)
        return z**self.shift * np.exp(self.exponent(z))

    def outer_trace(self, t) -> np.ndarray:
        """Values on the unit circle; exact when the log-modulus is known in closed form.

        Where the closed-form conjugate is singular (endpoints of a jump in the
        modulus) the boundary value does not exist and nan is returned.
        """
        t = np.asarray(t, dtype=float)
        if self.boundary_log_modulus is None or self.boundary_conjugate is None:
            return self(np.exp(1j * t))
        conj = self.boundary_conjugate(t)
        good = np.isfinite(conj)
        h = self.boundary_log_modulus(t) + 1j * np.where(good, conj, 0.0)
        return np.where(good, np.exp(1j * self.shift * t) * np.exp(h), np.nan + 0j)

    def outer_modulus(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.boundary_log_modulus is not None:
            return np.exp(self.boundary_log_modulus(t))
        return np.abs(self(np.exp(1j * t)))


# ---------------------------------------------------------------------------
# projections and membership


def hardy_project_disk(c: FourierCoeffs) -> FourierCoeffs:
    """Orthogonal projection of L2(T) onto H2(T): drop negative frequencies."""
    out = c.coeffs.copy()
    out[c.indices < 0] = 0.0
    return FourierCoeffs(c.radius, out)


def annulus_split(f: LaurentSeries):
    """Split f into its disk part (n >= 0) and its exterior part (n < 0)."""
    if f.is_disk:
        raise ValueError("annulus_split needs an annulus series (inner radius > 0)")
    m = f.order
    g = f.coeffs.copy()
    h = f.coeffs.copy()
    g[:m] = 0.0
    h[m:] = 0.0
    return LaurentSeries(f.inner_radius, g), LaurentSeries(f.inner_radius, h)


def annulus_membership(t: AnnulusTrace, tol: float | None = None):
    """Test whether a pair of circle traces comes from one analytic function on A.

    A Laurent series satisfies c_inner(n) = r0^n c_outer(n) for every n.  The
    returned defect is

        max_n |c_inner(n) - r0^n c_outer(n)| * min(1, r0^{-n}) / max(1, max|trace|),

    i.e. each relation is measured on the side where r0^{+-n} <= 1 and
    relative to the size of the data, which keeps round-off from the large
    powers of r0 out of the verdict.
    """
    tol = TOL.membership if tol is None else tol
    co = analyze(t.outer)
    ci = analyze(t.inner)
    n = co.indices
    logr = np.log(t.r0)
    scale = np.exp(logr * n)                     # r0^n
    weight = np.minimum(1.0, np.exp(-logr * n))  # min(1, r0^{-n})
    defect_n = np.abs(ci.coeffs - scale * co.coeffs) * weight
    size = max(1.0, np.abs(t.outer.samples).max(), np.abs(t.inner.samples).max())
    defect = float(defect_n.max() / size)
    return defect <= tol, defect


def boundary_norm(trace, p: float) -> float:
    """L^p norm of a trace on T (CircleGrid) or on the annulus boundary (AnnulusTrace)."""
    if not 1.0 < p < np.inf:
        raise ValueError(f"p must lie in (1, inf), got {p}")
    if isinstance(trace, AnnulusTrace):
        total = np.mean(np.abs(trace.outer.samples) ** p) + np.mean(np.abs(trace.inner.samples) ** p)
    else:
        total = np.mean(np.abs(np.asarray(getattr(trace, "samples", trace))) ** p)
    return float(total ** (1.0 / p))


def eval_interior(f: LaurentSeries, z) -> np.ndarray:
    """Evaluate at points of the open domain; raises DomainError otherwise."""
    z = np.asarray(z, dtype=complex)
    a = np.abs(z)
    if np.any(a >= 1.0) or np.any(a <= f.inner_radius):
        raise DomainError(f"points must satisfy {f.inner_radius} < |z| < 1")
    return f(z)


def szego_eval_bound(z: complex) -> float:
    """Norm of point evaluation on H2(D): (1 - |z|^2)^{-1/2}."""
    a = abs(z)
    if a >= 1.0:
        raise DomainError("evaluation point must lie in the open unit disk")
    return float(1.0 / np.sqrt(1.0 - a * a))


# ---------------------------------------------------------------------------
# outer functions


def _exponent_from_real_coeffs(c: FourierCoeffs) -> LaurentSeries:
    """Analytic h on D with Re h = the trigonometric polynomial on T, Im h(0) = 0."""
    n = c.size
    half = n // 2
    a = np.zeros(half + 1, dtype=complex)
    a[0] = c[0].real
    for k in range(1, half):
        a[k] = 2.0 * c[k]
    a[half] = c[-half].real  # Nyquist cosine
    return LaurentSeries.taylor(a)


def outer_disk(log_modulus: CircleGrid, oversample: int = 4) -> HardyFunction:
    """Outer function F on D with log|tr F| = the sampled data.

    The Herglotz integral is resummed in Fourier space:
    h = c_0 + 2 sum_{n>0} c_n z^n, F = exp(h).  The Taylor coefficients of F
    are recovered from exp(h) on a finer circle.
    """
    data = log_modulus.samples
    if np.abs(data.imag).max(initial=0.0) > 1e-12 * max(1.0, np.abs(data).max()):
        raise ValueError("log-modulus samples must be real")
    c = analyze(CircleGrid(1.0, data.real))
    h = _exponent_from_real_coeffs(c)
    n_fine = oversample * log_modulus.n_samples
    vals = np.exp(h(np.exp(1j * circle_angles(n_fine))))
    taylor = np.fft.fft(vals) / n_fine
    keep = taylor[: n_fine // 2]
    series = LaurentSeries.taylor(keep)
    out = HardyFunction(exponent=h)
    out.meta["series"] = series
    out.meta["aliasing"] = float(np.abs(taylor[n_fine // 2:]).max() / max(np.abs(keep).max(), 1e-300))
    return out


@dataclass
class ArcSet:
    """Finite union of arcs of T, stored as angle intervals (a, b) with a < b."""

    intervals: list

    def __post_init__(self):
        clean = []
        for a, b in self.intervals:
            a, b = float(a), float(b)
            if not b > a:
                raise ValueError(f"arc ({a}, {b}) must have b > a")
            if b - a > 2 * np.pi:
                raise ValueError("an arc cannot exceed a full turn")
            clean.append((a, b))
        self.intervals = clean

    @property
    def measure(self) -> float:
        """Normalized measure (full circle = 1)."""
        return sum(b - a for a, b in self.intervals) / (2 * np.pi)

    def contains(self, t) -> np.ndarray:
        t = np.mod(np.asarray(t, dtype=float), 2 * np.pi)
        out = np.zeros(t.shape, dtype=bool)
        for a, b in self.intervals:
            out |= np.mod(t - a, 2 * np.pi) < (b - a)
        return out

    def fourier(self, n_max: int) -> np.ndarray:
        """Exact coefficients (1/2pi) int_arcs e^{-int} dt for n = 0..n_max."""
        n = np.arange(1, n_max + 1)
        out = np.zeros(n_max + 1, dtype=complex)
        out[0] = self.measure
        for a, b in self.intervals:
            out[1:] += (np.exp(-1j * n * b) - np.exp(-1j * n * a)) / (-2j * np.pi * n)
        return out

    def conjugate(self, t) -> np.ndarray:
        """Harmonic conjugate of the indicator on T (vanishing mean)."""
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape)
        with np.errstate(divide="ignore"):
            for a, b in self.intervals:
                out += np.log(np.abs(np.sin((t - a) / 2) / np.sin((t - b) / 2))) / np.pi
        return out


def two_level_outer(arcs: ArcSet, low: float = 0.5, n_terms: int = 4096) -> HardyFunction:
    """Outer function on D with |tr F| = 1 on the arcs and ``low`` elsewhere."""
    if not 0.0 < low:
        raise ValueError("low level must be positive")
    lnlow = np.log(low)
    b = arcs.fourier(n_terms)
    u = -lnlow * b
    u[0] += lnlow                              # u = ln(low) * (1 - indicator)
    a = 2.0 * u
    a[0] = u[0].real
    h = LaurentSeries.taylor(a)
    return HardyFunction(
        exponent=h,
        boundary_log_modulus=lambda t: np.where(arcs.contains(t), 0.0, lnlow),
        boundary_conjugate=lambda t: -lnlow * arcs.conjugate(t),
        meta={"arcs": arcs.intervals, "low": low},
    )


def least_power(r0: float, m: float, bound: float = 0.5) -> int:
    """Least N >= 0 with r0**N * m < bound."""
    if not 0.0 < r0 < 1.0:
        raise ValueError("r0 must lie in (0, 1)")
    n = 0
    while r0**n * m >= bound:
        n += 1
    return n


def annulus_defF(arcs: ArcSet, r0: float, n_samples: int = 4096, n_terms: int = 4096) -> HardyFunction:
    """F = z^N g on A with |tr F| = 1 on the arcs of T and <= 1/2 on the rest of the boundary.

    g is the two-level disk outer function restricted to A and N is the
    least power with r0^N max_{|z|=r0}|g| < 1/2.
    """
    if arcs.measure <= 0.0:
        raise ValueError("arc set must have positive measure")
    g = two_level_outer(arcs, 0.5, n_terms)
    inner = np.abs(g(r0 * np.exp(1j * circle_angles(n_samples))))
    m = float(inner.max())
    n = least_power(r0, m)
    return HardyFunction(
        exponent=g.exponent,
        shift=n,
        inner_radius=r0,
        boundary_log_modulus=g.boundary_log_modulus,
        boundary_conjugate=g.boundary_conjugate,
        meta={"N": n, "M": m, "arcs": arcs.intervals},
    )
