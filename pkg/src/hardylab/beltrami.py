"""Conjugate Beltrami equations and their factorizations.

Two equations live on a polar grid (disk or annulus):

    dbar f = nu * conj(d f)        (f-type, nu real with |nu| <= kappa < 1)
    dbar w = alpha * conj(w)       (w-type, alpha complex and bounded)

and are linked pointwise by w = (f - nu conj f) / sqrt(1 - nu^2) when
alpha = -dbar nu / (1 - nu^2).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .config import TOL
from .grid import (
    PolarGrid,
    PolarMesh,
    ResidualError,
    area_norm,
    cauchy_area_transform,
    interpolate,
    wirtinger,
)


class ConvergenceError(RuntimeError):
    """A fixed-point iteration failed to settle; ``history`` holds the step sizes."""

    def __init__(self, message: str, history: list):
        super().__init__(message)
        self.history = list(history)


class UnsupportedInputError(ValueError):
    """Input outside the supported class (for instance a w with zeros on the grid)."""


class PreconditionError(ValueError):
    """A sampled precondition failed (for instance phi leaving the target domain)."""


# ---------------------------------------------------------------------------
# fields


@dataclass
class NuField:
    """Real dilation coefficient with |nu| <= kappa < 1.

    ``func`` (optional) evaluates nu exactly at arbitrary points and is used
    for compositions; otherwise grid values are interpolated.
    """

    values: PolarGrid
    kappa: float
    func: Callable | None = None

    def __post_init__(self):
        v = np.asarray(self.values.values)
        if np.iscomplexobj(v):
            if np.abs(v.imag).max(initial=0.0) > 0.0:
                raise ValueError("nu must be real-valued")
            self.values = self.values.like(v.real)
        if not 0.0 <= self.kappa < 1.0:
            raise ValueError(f"kappa must lie in [0, 1), got {self.kappa}")
        top = float(np.abs(self.values.values).max())
        if not np.isfinite(top) or top > self.kappa * (1.0 + 1e-12):
            raise ValueError(f"max |nu| = {top} exceeds kappa = {self.kappa}")

    @property
    def mesh(self) -> PolarMesh:
        return self.values.mesh

    @classmethod
    def from_function(cls, mesh: PolarMesh, func: Callable, kappa: float) -> "NuField":
        vals = np.broadcast_to(np.asarray(func(mesh.z), dtype=float), (mesh.n_r, mesh.n_theta))
        return cls(mesh.grid(vals.copy()), kappa, func)

    @classmethod
    def zero(cls, mesh: PolarMesh) -> "NuField":
        return cls.from_function(mesh, lambda z: np.zeros(np.shape(z)), 0.0)

    def lipschitz(self) -> float:
        """Grid estimate of max |grad nu| (= 2 max |dbar nu| for real nu)."""
        _, dbar = wirtinger(self.values.like(self.values.values.astype(complex)))
        return float(2.0 * np.abs(dbar.values).max())

    def at(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        if self.func is not None:
            return np.broadcast_to(np.asarray(self.func(z), dtype=float), z.shape)
        return interpolate(self.values.values, self.mesh, z).real

    def compose(self, phi: Callable, mesh: PolarMesh | None = None) -> "NuField":
        """nu o phi on ``mesh`` (default: the same mesh); the kappa bound carries over."""
        mesh = mesh or self.mesh
        w = np.asarray(phi(mesh.z), dtype=complex)
        _check_maps_into(w, self.mesh)
        vals = self.at(w)
        if self.func is None:
            over = np.abs(vals).max() - self.kappa
            if over > 1e-12:
                raise PreconditionError(f"interpolated nu exceeds kappa by {over:.2e}")
            vals = np.clip(vals, -self.kappa, self.kappa)
        func = None if self.func is None else (lambda z, f=self.func: f(phi(z)))
        return NuField(mesh.grid(np.asarray(vals, dtype=float)), self.kappa, func)


@dataclass
class AlphaField:
    """Bounded complex coefficient of the w-equation."""

    values: PolarGrid
    func: Callable | None = None

    def __post_init__(self):
        self.values = self.values.like(np.asarray(self.values.values, dtype=complex))
        if not np.all(np.isfinite(self.values.values)):
            raise ValueError("alpha must be finite")

    @property
    def sup_norm(self) -> float:
        return float(np.abs(self.values.values).max())

    @property
    def mesh(self) -> PolarMesh:
        return self.values.mesh

    @classmethod
    def from_function(cls, mesh: PolarMesh, func: Callable) -> "AlphaField":
        vals = np.broadcast_to(np.asarray(func(mesh.z), dtype=complex), (mesh.n_r, mesh.n_theta))
        return cls(mesh.grid(vals.copy()), func)

    @classmethod
    def constant(cls, mesh: PolarMesh, value: complex) -> "AlphaField":
        return cls.from_function(mesh, lambda z: np.full(np.shape(z), value, dtype=complex))

    def at(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        if self.func is not None:
            return np.broadcast_to(np.asarray(self.func(z), dtype=complex), z.shape)
        return interpolate(self.values.values, self.mesh, z)


@dataclass
class SField:
    """A factor s with its boundary real-part size."""

    values: PolarGrid
    boundary_real_max: float
    meta: dict = field(default_factory=dict)

    @property
    def sup_norm(self) -> float:
        return float(np.abs(self.values.values).max())


@dataclass
class GenHardyFunction:
    """Grid solution of the f-type or w-type equation with its residual."""

    kind: str
    values: PolarGrid
    coeff: PolarGrid
    residual: float
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("f", "w"):
            raise ValueError("kind must be 'f' or 'w'")

    @property
    def trace(self) -> dict:
        out = {"outer": self.values.values[-1]}
        if self.values.mesh.domain == "annulus":
            out["inner"] = self.values.values[0]
        return out

    def at(self, z) -> np.ndarray:
        return interpolate(self.values.values, self.values.mesh, z)


def _check_maps_into(w: np.ndarray, mesh: PolarMesh, slack: float = 1e-12):
    if not np.all(mesh.contains(w, slack)):
        bad = np.abs(w[~mesh.contains(w, slack)])
        raise PreconditionError(f"phi leaves the target domain (|phi| = {bad.min():.6g} .. {bad.max():.6g})")


def _as_grid(u, mesh: PolarMesh) -> PolarGrid:
    if isinstance(u, PolarGrid):
        return u
    if callable(u):
        return mesh.sample(u)
    return mesh.grid(np.asarray(u))


# ---------------------------------------------------------------------------
# residuals and the isomorphism


def pde_residual(u: PolarGrid, coeff, kind: str) -> float:
    """||dbar u - rhs|| / (1 + ||u||) in the area L2 norm.

    rhs = coeff * conj(d u) for kind 'f' and coeff * conj(u) for kind 'w'.
    ``coeff`` may be a PolarGrid, a field object or a scalar.
    """
    vals = np.asarray(u.values, dtype=complex)
    c = getattr(coeff, "values", coeff)
    c = np.asarray(getattr(c, "values", c))
    d, dbar = wirtinger(u.like(vals))
    if kind == "f":
        rhs = c * np.conj(d.values)
    elif kind == "w":
        rhs = c * np.conj(vals)
    else:
        raise ValueError("kind must be 'f' or 'w'")
    return area_norm(dbar.values - rhs, u.mesh) / (1.0 + area_norm(vals, u.mesh))


def alpha_from_nu(nu: NuField) -> AlphaField:
    """alpha = -dbar nu / (1 - nu^2)."""
    v = nu.values.values.astype(complex)
    _, dbar = wirtinger(nu.values.like(v))
    return AlphaField(nu.values.like(-dbar.values / (1.0 - nu.values.values**2)))


def _jmap_values(f, nu):
    return (f - nu * np.conj(f)) / np.sqrt(1.0 - nu * nu)


def _jinv_values(w, nu):
    return (w + nu * np.conj(w)) / np.sqrt(1.0 - nu * nu)


def jmap(f: GenHardyFunction, nu: NuField) -> GenHardyFunction:
    """w = (f - nu conj f) / sqrt(1 - nu^2), checked against alpha_from_nu(nu)."""
    w = f.values.like(_jmap_values(f.values.values, nu.values.values))
    alpha = alpha_from_nu(nu)
    return GenHardyFunction("w", w, alpha.values, pde_residual(w, alpha, "w"))


def jinv(w: GenHardyFunction, nu: NuField) -> GenHardyFunction:
    """f = (w + nu conj w) / sqrt(1 - nu^2), checked against nu."""
    f = w.values.like(_jinv_values(w.values.values, nu.values.values))
    return GenHardyFunction("f", f, nu.values, pde_residual(f, nu.values, "f"))


def as_solution(u, coeff, kind: str, mesh: PolarMesh | None = None) -> GenHardyFunction:
    """Wrap grid values (or a callable) as a GenHardyFunction, computing its residual."""
    c = getattr(coeff, "values", coeff)
    mesh = mesh or getattr(c, "mesh", None)
    grid = _as_grid(u, mesh)
    grid = grid.like(np.asarray(grid.values, dtype=complex))
    cgrid = c if isinstance(c, PolarGrid) else grid.like(np.broadcast_to(c, grid.values.shape))
    return GenHardyFunction(kind, grid, cgrid, pde_residual(grid, cgrid, kind))


def _derivative_of(phi):
    d = getattr(phi, "derivative", None)
    if d is None:
        raise TypeError("phi must expose a derivative (pass an AnalyticSelfMap or give dphi)")
    return d


def alpha_pullback(alpha: AlphaField, phi: Callable, mesh: PolarMesh | None = None,
                   dphi: Callable | None = None) -> AlphaField:
    """alpha~(z) = alpha(phi(z)) * conj(phi'(z)) on ``mesh`` (default: alpha's mesh)."""
    mesh = mesh or alpha.mesh
    dphi = dphi or _derivative_of(phi)
    w = np.asarray(phi(mesh.z), dtype=complex)
    _check_maps_into(w, alpha.mesh)
    vals = alpha.at(w) * np.conj(np.asarray(dphi(mesh.z), dtype=complex))
    func = None
    if alpha.func is not None:
        func = lambda z: alpha.func(phi(z)) * np.conj(dphi(z))  # noqa: E731
    return AlphaField(mesh.grid(vals), func)


# ---------------------------------------------------------------------------
# analytic completion of boundary data


def analytic_completion(mesh: PolarMesh, outer, inner=None) -> np.ndarray:
    """Analytic h on the grid with Re h = data on the boundary circle(s).

    On the disk only ``outer`` is used and Im h(0) = 0.  On the annulus the
    mean of Re h is shared by both circles, so the inner circle receives the
    outer mean (the mean difference cannot be matched by a single-valued
    analytic function); Im h has zero mean on the outer circle.
    """
    n = mesh.n_theta
    uo = np.asarray(outer, dtype=float)
    co = np.fft.fft(uo) / n
    half = n // 2
    r = mesh.radii[:, None]
    k = np.arange(1, half + 1)
    p = co[1:half + 1].copy()
    p[-1] *= 0.5                                   # Nyquist carries half of cos(n t / 2)
    out = np.zeros((mesh.n_r, n), dtype=complex)
    out[:, 0] = co[0].real
    if mesh.domain == "disk":
        q = np.zeros_like(p)
    else:
        ui = np.asarray(inner, dtype=float)
        ci = np.fft.fft(ui) / n
        qi = ci[1:half + 1].copy()
        qi[-1] *= 0.5
        e = mesh.r0**k
        d = 1.0 - e * e
        p, q = (p - e * qi) / d, (qi - e * p) / d
    rk = r**k[None, :]
    out[:, 1:half + 1] += 2.0 * p[None, :] * rk
    if mesh.domain == "annulus":
        sk = (mesh.r0 / r) ** k[None, :]
        neg = 2.0 * np.conj(q)[None, :] * sk       # coefficient of e^{-ikt}
        out[:, n - k[:-1]] += neg[:, :-1]
        out[:, half] += neg[:, -1]
    return np.fft.ifft(out * n, axis=1)


def _boundary_real_max(s: np.ndarray, mesh: PolarMesh) -> float:
    return float(max(np.abs(s[row].real).max() for row in mesh.boundary_rows))


# ---------------------------------------------------------------------------
# factorizations


@dataclass
class EasyFactorization:
    """w = e^s F with F analytic; unpacks as (s, F)."""

    s: SField
    F: PolarGrid
    c_outer: float
    c_inner: float | None
    analytic_residual: float
    identity_error: float
    norm_ratio: float

    def __iter__(self):
        return iter((self.s, self.F))


def _zero_free(w: np.ndarray, tol: float):
    mags = np.abs(w)
    if mags.min() <= tol * max(mags.max(), 1e-300):
        raise UnsupportedInputError(f"w vanishes on the grid (min |w| = {mags.min():.3e}); only zero-free w is supported")


def easy_factorize(w, alpha: AlphaField, normalization: str = "imag",
                   tol: float | None = None) -> EasyFactorization:
    """Write w = e^s F with dbar s = alpha conj(w) / w and F analytic.

    normalization 'imag': Im s is constant on each boundary circle, with the
    outer constant 0 (the inner constant is whatever the flux of s forces).
    normalization 'real': Re s vanishes on the outer circle and is constant
    on the inner one.
    """
    tol = TOL.pde_residual if tol is None else tol
    mesh = alpha.mesh
    wv = np.asarray(_as_grid(getattr(w, "values", w), mesh).values, dtype=complex)
    _zero_free(wv, TOL.zero_free)
    g = mesh.grid(alpha.values.values * np.conj(wv) / wv)
    s0 = cauchy_area_transform(g).values
    inner_row = s0[0] if mesh.domain == "annulus" else None
    if normalization == "imag":
        h = 1j * analytic_completion(mesh, -s0[-1].imag, None if inner_row is None else -inner_row.imag)
        s = s0 + h
        s -= 1j * np.mean(s[-1].imag)
        c_outer, c_inner = 0.0, None if inner_row is None else float(np.mean(s[0].imag))
    elif normalization == "real":
        h = -analytic_completion(mesh, s0[-1].real, None if inner_row is None else inner_row.real)
        s = s0 + h
        s -= 1j * np.mean(s[-1].imag)
        c_outer, c_inner = 0.0, None if inner_row is None else float(np.mean(s[0].real))
    else:
        raise ValueError("normalization must be 'imag' or 'real'")
    F = mesh.grid(wv * np.exp(-s))
    _, dbar = wirtinger(F)
    analytic_res = area_norm(dbar.values, mesh) / (1.0 + area_norm(F.values, mesh))
    ident = float(np.abs(np.exp(s) * F.values - wv).max())
    sfield = SField(mesh.grid(s), _boundary_real_max(s, mesh),
                    {"normalization": normalization, "c_outer": c_outer, "c_inner": c_inner})
    ratio = float(np.abs(s).max() / alpha.sup_norm) if alpha.sup_norm > 0 else 0.0
    if analytic_res > tol:
        raise ResidualError("factor F is not analytic to tolerance", analytic_res)
    return EasyFactorization(sfield, F, c_outer, c_inner, analytic_res, ident, ratio)


def _picard(mesh: PolarMesh, alpha_f: np.ndarray, c: float, b: np.ndarray,
            step_tol: float, max_iter: int):
    """Iterate b <- Im s with the outer mean of Im s pinned to c.

    Returns (s, b, history, flux) where flux is the mean of Re s on the
    outer circle minus its mean on the inner one (zero on the disk).
    """
    annulus = mesh.domain == "annulus"
    history: list = []
    s = np.zeros(b.shape, dtype=complex)
    t_r = s
    for _ in range(max_iter):
        t_r = cauchy_area_transform(mesh.grid(alpha_f * np.exp(-2j * b)), check=False).values
        h = -analytic_completion(mesh, t_r[-1].real, t_r[0].real if annulus else None)
        s = t_r + h
        s = s - 1j * np.mean(s[-1].imag) + 1j * c
        step = float(np.abs(s.imag - b).max())
        history.append(step)
        b = s.imag.copy()
        if not np.isfinite(step) or step > 1e6:
            raise ConvergenceError("fixed-point iteration diverged", history)
        if step < step_tol:
            break
    else:
        raise ConvergenceError(f"no convergence in {max_iter} iterations (last step {history[-1]:.3e})", history)
    flux = float(np.mean(t_r[-1].real) - np.mean(t_r[0].real)) if annulus else 0.0
    return s, b, history, flux


def _flux_root(mesh, alpha_f, step_tol, max_iter):
    """Imaginary constant c in [-pi/2, pi/2] at which the flux of Re s vanishes.

    The flux is pi-periodic in c.  A scan over eight sub-intervals looks for
    a sign change (the bracket nearest c = 0 wins) and Brent's method
    refines it.  Returns (c, found, scanned values).
    """
    from scipy.optimize import brentq

    warm = {"b": np.zeros((mesh.n_r, mesh.n_theta))}
    loose = max(step_tol, 1e-12)

    def flux(c, tol=loose):
        _, b, _, fx = _picard(mesh, alpha_f, c, warm["b"] - np.mean(warm["b"][-1]) + c, tol, max_iter)
        warm["b"] = b
        return fx

    grid = np.linspace(-0.5 * np.pi, 0.5 * np.pi, 9)
    vals = np.array([flux(c, 1e-8) for c in grid])
    scan = list(zip(grid.tolist(), vals.tolist()))
    exact = np.nonzero(vals == 0.0)[0]
    if exact.size:
        return float(grid[exact[np.argmin(np.abs(grid[exact]))]]), True, scan
    brackets = [j for j in range(8) if vals[j] * vals[j + 1] < 0]
    if not brackets:
        return float(grid[np.argmin(np.abs(vals))]), False, scan
    j = min(brackets, key=lambda j: abs(grid[j] + grid[j + 1]))
    c = brentq(flux, grid[j], grid[j + 1], xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=200)
    return float(c), True, scan


def hard_factorize(F, alpha: AlphaField, *, check: bool = True, tol: float | None = None,
                   step_tol: float | None = None, max_iter: int | None = None) -> SField:
    """Find s with Re s = 0 on the boundary such that w = e^s F solves dbar w = alpha conj(w).

    With b = Im s the equation reads dbar s = R(b), R(b) = alpha_F e^{-2ib},
    alpha_F = alpha conj(F) / F.  Picard iteration from b = 0:
    s = T(R(b)) + h + i c, where T is the Cauchy area transform and h is the
    analytic function cancelling Re T(R) on the boundary.  On the disk c = 0.
    On the annulus a single-valued h cannot remove the difference of the
    means of Re T(R) on the two circles (the flux); c is then chosen by a
    scalar root search so that the flux vanishes.  When no such c exists
    the inner circle keeps a constant real part, reported in
    meta['inner_real_constant'].
    """
    tol = TOL.pde_residual if tol is None else tol
    step_tol = TOL.fixed_point_step if step_tol is None else step_tol
    max_iter = TOL.fixed_point_max_iter if max_iter is None else max_iter
    mesh = alpha.mesh
    fv = np.asarray(_as_grid(getattr(F, "values", F), mesh).values, dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(fv != 0, np.conj(fv) / fv, 1.0)
    alpha_f = alpha.values.values * ratio
    meta: dict = {}
    c = 0.0
    if mesh.domain == "annulus" and np.any(alpha_f):
        c, found, scan = _flux_root(mesh, alpha_f, step_tol, max_iter)
        meta.update(flux_free=found, flux_scan=scan)
    b0 = np.full((mesh.n_r, mesh.n_theta), c)
    s, _, history, flux = _picard(mesh, alpha_f, c, b0, step_tol, max_iter)
    w = mesh.grid(np.exp(s) * fv)
    res = pde_residual(w, alpha.values, "w")
    breal = _boundary_real_max(s, mesh)
    meta.update({
        "iterations": len(history),
        "history": history,
        "w_residual": res,
        "norm_ratio": float(np.abs(s).max() / alpha.sup_norm) if alpha.sup_norm > 0 else 0.0,
        "imag_constant": c,
        "inner_real_constant": float(np.mean(s[0].real)) if mesh.domain == "annulus" else None,
    })
    out = SField(mesh.grid(s), breal, meta)
    if check:
        if res > tol:
            raise ResidualError("e^s F misses the w-equation", res)
        if breal > TOL.boundary_real_part:
            raise ResidualError("Re s does not vanish on the boundary", breal)
    return out


@dataclass
class Refactorization:
    """w1 = e^s w2 with w2 solving the alpha2 equation; unpacks as (s, w2)."""

    s: SField
    w2: GenHardyFunction
    identity_error: float
    inner_real_constant: float | None

    def __iter__(self):
        return iter((self.s, self.w2))


def refactor_alpha(w1, alpha1: AlphaField, alpha2: AlphaField, check: bool = True) -> Refactorization:
    """Pass from the alpha1 equation to the alpha2 equation: w1 = e^s w2.

    w1 = e^{s1} F (Re s1 = 0 on the outer circle), then w2 = e^{s2} F from
    hard_factorize against alpha2, and s = s1 - s2.
    """
    mesh = alpha1.mesh
    wv = np.asarray(_as_grid(getattr(w1, "values", w1), mesh).values, dtype=complex)
    fac = easy_factorize(wv, alpha1, normalization="real")
    s2 = hard_factorize(fac.F, alpha2, check=check)
    s = fac.s.values.values - s2.values.values
    w2v = np.exp(s2.values.values) * fac.F.values
    w2 = GenHardyFunction("w", mesh.grid(w2v), alpha2.values, pde_residual(mesh.grid(w2v), alpha2.values, "w"))
    ident = float(np.abs(np.exp(s) * w2v - wv).max())
    sf = SField(mesh.grid(s), _boundary_real_max(s, mesh), {"s2_iterations": s2.meta["iterations"]})
    return Refactorization(sf, w2, ident, fac.c_inner)


# ---------------------------------------------------------------------------
# Dirichlet problem and point separation


def dirichlet_disk(psi, nu: NuField, *, step_tol: float | None = None,
                   max_iter: int | None = None, check: bool = True) -> GenHardyFunction:
    """f-type solution on the disk with Re tr f = psi and Im f(0) = 0.

    Picard iteration f <- T(nu conj(d f)) + h with h analytic restoring the
    boundary real part; ``psi`` is a real array (or CircleGrid) on the grid
    angles.
    """
    step_tol = TOL.fixed_point_step if step_tol is None else step_tol
    max_iter = TOL.dirichlet_max_iter if max_iter is None else max_iter
    mesh = nu.mesh
    if mesh.domain != "disk":
        raise ValueError("dirichlet_disk needs a disk mesh")
    data = np.asarray(getattr(psi, "samples", psi))
    if data.shape != (mesh.n_theta,):
        raise ValueError(f"psi must have {mesh.n_theta} samples")
    if np.iscomplexobj(data):
        if np.abs(data.imag).max() > 0:
            raise ValueError("psi must be real")
        data = data.real
    nuv = nu.values.values
    origin = np.array([0.0 + 0.0j])

    def normalize(f):
        f0 = interpolate(f, mesh, origin)[0]
        return f - 1j * f0.imag

    f = normalize(analytic_completion(mesh, data))
    history: list = []
    converged = not np.any(nuv)
    while not converged and len(history) < max_iter:
        d, _ = wirtinger(mesh.grid(f))
        t = cauchy_area_transform(mesh.grid(nuv * np.conj(d.values)), check=False).values
        new = normalize(t + analytic_completion(mesh, data - t[-1].real))
        step = float(np.abs(new - f).max())
        history.append(step)
        f = new
        if not np.isfinite(step) or step > 1e6:
            raise ConvergenceError("Dirichlet iteration diverged", history)
        converged = step < step_tol
    if not converged:
        raise ConvergenceError(f"no convergence in {max_iter} iterations", history)
    grid = mesh.grid(f)
    res = pde_residual(grid, nu.values, "f")
    defect = float(np.abs(f[-1].real - data).max())
    out = GenHardyFunction("f", grid, nu.values, res, {"iterations": len(history), "history": history,
                                                       "trace_defect": defect})
    if check and res > TOL.pde_residual:
        raise ResidualError("Dirichlet solution misses the f-equation", res)
    return out


def separation_witness(z1: complex, z2: complex, nu: NuField) -> GenHardyFunction:
    """An f-type function vanishing at z1 but not at z2, built from F(z) = z - z1.

    alpha_F has a jump at z1, so the residual checks of hard_factorize are
    switched off; the pointwise values are exact products.
    """
    mesh = nu.mesh
    z1, z2 = complex(z1), complex(z2)
    if z1 == z2:
        raise ValueError("z1 and z2 must differ")
    for z in (z1, z2):
        if not mesh.contains(np.array([z]))[0] or abs(z) >= 1.0 or (mesh.domain == "annulus" and abs(z) <= mesh.r0):
            raise PreconditionError(f"{z} is not an interior point")
    alpha = alpha_from_nu(nu)
    F = mesh.z - z1
    s = hard_factorize(F, alpha, check=False)
    w = mesh.grid(np.exp(s.values.values) * F)
    f = w.like(_jinv_values(w.values, nu.values.values))
    pts = np.array([z1, z2])
    s_pts = interpolate(s.values.values, mesh, pts)
    w_pts = np.exp(s_pts) * (pts - z1)
    nu_pts = nu.at(pts)
    f_pts = _jinv_values(w_pts, nu_pts)
    bound = (1.0 - nu.kappa) * abs(np.exp(s_pts[1])) * abs(z2 - z1)
    if abs(f_pts[0]) >= 1e-8:
        raise ResidualError("witness does not vanish at z1", abs(f_pts[0]))
    if not abs(f_pts[1]) >= bound * (1.0 - 1e-12) or abs(f_pts[1]) == 0.0:
        raise ResidualError("witness too small at z2", abs(f_pts[1]))
    return GenHardyFunction("f", f, nu.values, pde_residual(f, nu.values, "f"),
                            {"f_z1": complex(f_pts[0]), "f_z2": complex(f_pts[1]), "lower_bound": bound,
                             "s_iterations": s.meta["iterations"]})
