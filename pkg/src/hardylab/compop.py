"""Composition operators f -> f o phi and their diagnostics.

Every diagnostic returns a :class:`DiagnosticsReport` whose verdicts are
backed by numeric certificates; thresholds come from :mod:`hardylab.config`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.linalg import lapack
from scipy.optimize import minimize

from .beltrami import (
    AlphaField,
    GenHardyFunction,
    NuField,
    PreconditionError,
    UnsupportedInputError,
    dirichlet_disk,
    hard_factorize,
)
from .config import TOL
from .grid import PolarMesh, circle_angles, interpolate
from .hardy import LaurentSeries
from .surface import classify_case, omega_measures


class DegenerateSymbolError(ValueError):
    """The symbol sends the origin to the boundary (|phi(0)| = 1)."""


# ---------------------------------------------------------------------------
# symbols


KINDS = ("rotation", "inversion", "monomial", "moebius", "constant", "general")


@dataclass
class AnalyticSelfMap:
    """An analytic map between two disks or two annuli with the same r0.

    ``kind`` selects a closed form: rotation (lam z), inversion (mu r0 / z),
    monomial (z^k), moebius (lam (z + a) / (1 + conj(a) z)), constant (c) or
    general (Laurent coefficients ``coeffs`` as {n: a_n}).
    """

    kind: str
    params: dict = field(default_factory=dict)
    domain: str = "disk"
    r0: float = 0.0
    check_samples: int = 1024

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown symbol kind {self.kind!r}; expected one of {KINDS}")
        if self.domain not in ("disk", "annulus"):
            raise ValueError("domain must be 'disk' or 'annulus'")
        if self.domain == "disk":
            self.r0 = 0.0
        elif not 0.0 < self.r0 < 1.0:
            raise ValueError("annulus symbols need 0 < r0 < 1")
        p = self.params
        if self.kind in ("rotation", "inversion"):
            key = "lam" if self.kind == "rotation" else "mu"
            v = complex(p.get(key, 1.0))
            if abs(abs(v) - 1.0) > 1e-12:
                raise ValueError(f"{self.kind} constant must be unimodular, |{key}| = {abs(v)!r}")
            p[key] = v
            if self.kind == "inversion" and self.domain != "annulus":
                raise ValueError("inversion needs an annulus domain")
        elif self.kind == "monomial":
            k = int(p.get("k", 1))
            if k < 0 or (self.domain == "annulus" and k != 1):
                raise ValueError("monomial power must be >= 0 (and 1 on the annulus)")
            p["k"] = k
        elif self.kind == "moebius":
            a = complex(p.get("a", 0.0))
            if abs(a) >= 1.0:
                raise ValueError("moebius parameter must satisfy |a| < 1")
            lam = complex(p.get("lam", 1.0))
            if abs(abs(lam) - 1.0) > 1e-12:
                raise ValueError("moebius rotation must be unimodular")
            if self.domain != "disk":
                raise ValueError("moebius symbols live on the disk")
            p.update(a=a, lam=lam)
        elif self.kind == "constant":
            p["c"] = complex(p.get("c", 0.0))
        else:
            coeffs = {int(k): complex(v) for k, v in dict(p.get("coeffs", {})).items()}
            if self.domain == "disk" and any(k < 0 for k in coeffs):
                raise ValueError("disk symbols cannot carry negative powers")
            p["coeffs"] = coeffs
        ok, sup, inf = self.image_bounds(self.check_samples)
        if not ok:
            raise PreconditionError(f"symbol leaves the closed codomain (sup {sup:.12g}, inf {inf:.12g})")

    # constructors ---------------------------------------------------------
    @classmethod
    def rotation(cls, lam: complex, domain: str = "disk", r0: float = 0.0) -> "AnalyticSelfMap":
        return cls("rotation", {"lam": lam}, domain, r0)

    @classmethod
    def inversion(cls, mu: complex, r0: float) -> "AnalyticSelfMap":
        return cls("inversion", {"mu": mu}, "annulus", r0)

    @classmethod
    def monomial(cls, k: int, domain: str = "disk", r0: float = 0.0) -> "AnalyticSelfMap":
        return cls("monomial", {"k": k}, domain, r0)

    @classmethod
    def moebius(cls, a: complex, lam: complex = 1.0) -> "AnalyticSelfMap":
        return cls("moebius", {"a": a, "lam": lam})

    @classmethod
    def constant(cls, c: complex, domain: str = "disk", r0: float = 0.0) -> "AnalyticSelfMap":
        return cls("constant", {"c": c}, domain, r0)

    @classmethod
    def general(cls, coeffs: dict, domain: str = "disk", r0: float = 0.0) -> "AnalyticSelfMap":
        return cls("general", {"coeffs": coeffs}, domain, r0)

    # evaluation -----------------------------------------------------------
    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        p = self.params
        if self.kind == "rotation":
            return p["lam"] * z
        if self.kind == "inversion":
            return p["mu"] * self.r0 / z
        if self.kind == "monomial":
            return z ** p["k"]
        if self.kind == "moebius":
            a = p["a"]
            return p["lam"] * (z + a) / (1.0 + np.conj(a) * z)
        if self.kind == "constant":
            return np.full(z.shape, p["c"], dtype=complex)
        return self.laurent()(z)

    def derivative(self, z):
        z = np.asarray(z, dtype=complex)
        p = self.params
        if self.kind == "rotation":
            return np.full(z.shape, p["lam"], dtype=complex)
        if self.kind == "inversion":
            return -p["mu"] * self.r0 / z**2
        if self.kind == "monomial":
            k = p["k"]
            return k * z ** (k - 1) if k else np.zeros(z.shape, dtype=complex)
        if self.kind == "moebius":
            a = p["a"]
            return p["lam"] * (1.0 - abs(a) ** 2) / (1.0 + np.conj(a) * z) ** 2
        if self.kind == "constant":
            return np.zeros(z.shape, dtype=complex)
        return self.laurent().derivative()(z)

    def laurent(self, order: int = 64) -> LaurentSeries:
        """Laurent (Taylor on the disk) coefficients, exact except for the moebius tail."""
        p = self.params
        if self.kind == "rotation":
            d = {1: p["lam"]}
        elif self.kind == "inversion":
            d = {-1: p["mu"] * self.r0}
        elif self.kind == "monomial":
            d = {p["k"]: 1.0}
        elif self.kind == "constant":
            d = {0: p["c"]}
        elif self.kind == "general":
            d = dict(p["coeffs"]) or {0: 0.0}
        else:
            a, lam = p["a"], p["lam"]
            n = np.arange(1, order)
            taylor = np.concatenate([[lam * a], lam * (-np.conj(a)) ** (n - 1) * (1.0 - abs(a) ** 2)])
            return LaurentSeries.taylor(taylor)
        return LaurentSeries.from_dict(d, self.r0)

    def taylor(self, m: int) -> np.ndarray:
        """First m Taylor coefficients (disk symbols)."""
        if self.domain != "disk":
            raise ValueError("Taylor coefficients need a disk symbol")
        s = self.laurent(max(m, 2))
        out = np.zeros(m, dtype=complex)
        for k in range(min(m, s.order + 1)):
            out[k] = s.coefficient(k)
        return out

    def boundary_points(self, n: int) -> np.ndarray:
        t = circle_angles(n)
        pts = [np.exp(1j * t)]
        if self.domain == "annulus":
            pts.append(self.r0 * np.exp(1j * t))
        return np.concatenate(pts)

    def image_bounds(self, n: int = 1024):
        vals = np.abs(self(self.boundary_points(n)))
        sup, inf = float(vals.max()), float(vals.min())
        ok = sup <= 1.0 + TOL.sup_slack
        if self.domain == "annulus":
            ok &= inf >= self.r0 - TOL.sup_slack
        return bool(ok), sup, inf

    def describe(self) -> dict:
        out = {"kind": self.kind, "domain": self.domain}
        if self.domain == "annulus":
            out["r0"] = self.r0
        for k, v in self.params.items():
            if k == "coeffs":
                out[k] = {str(n): _cnum(a) for n, a in sorted(v.items())}
            else:
                out[k] = _cnum(v) if isinstance(v, complex) else v
        return out


def _cnum(v):
    v = complex(v)
    return [v.real, v.imag]


# ---------------------------------------------------------------------------
# reports


@dataclass
class DiagnosticsReport:
    """Verdicts with the numbers that back them."""

    name: str
    verdicts: dict
    certificates: dict
    tolerances: dict = field(default_factory=dict)
    series: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def __post_init__(self):
        if self.verdicts and not self.certificates:
            raise ValueError("every verdict needs at least one certificate")

    @property
    def verdict(self):
        return self.verdicts.get("main")

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "verdicts": _plain(self.verdicts),
            "certificates": _plain(self.certificates),
            "tolerances": _plain(self.tolerances),
            "series": _plain(self.series),
            "notes": list(self.notes),
        }


def _plain(obj):
    """Recursively convert numpy scalars/arrays and complex numbers to JSON types."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


# ---------------------------------------------------------------------------
# composition and norms


def _boundary_p_norm(samples: np.ndarray, p: float, n: int) -> float:
    """(sum over circles of mean |f|^p)^{1/p}; ``samples`` stacks circles of n points."""
    circles = np.asarray(samples).reshape(-1, n)
    return float(np.sum(np.mean(np.abs(circles) ** p, axis=1)) ** (1.0 / p))


def compose_trace(f, phi: AnalyticSelfMap, n: int = 1024) -> np.ndarray:
    """Samples of f o phi on the boundary of the source domain (outer circle first).

    ``f`` is a callable analytic function (LaurentSeries, HardyFunction) or a
    grid solution (GenHardyFunction), evaluated by spectral interpolation.
    """
    pts = phi(phi.boundary_points(n))
    target = PolarMesh.disk(8, 8) if phi.domain == "disk" else PolarMesh.annulus(phi.r0, 8, 8)
    if not np.all(target.contains(pts, TOL.sup_slack)):
        raise PreconditionError("phi maps boundary points outside the closed domain of f")
    if isinstance(f, GenHardyFunction):
        return f.at(pts)
    return np.asarray(f(pts), dtype=complex)


def norm_bound_disk(phi: AnalyticSelfMap, p: float) -> float:
    """((1 + |phi(0)|) / (1 - |phi(0)|))^{1/p}."""
    if phi.domain != "disk":
        raise ValueError("norm_bound_disk needs a disk symbol")
    if not 1.0 < p < np.inf:
        raise ValueError("p must lie in (1, inf)")
    a = float(abs(phi(np.array([0.0]))[0]))
    if a >= 1.0:
        raise DegenerateSymbolError("|phi(0)| = 1")
    return float(((1.0 + a) / (1.0 - a)) ** (1.0 / p))


def random_polynomial(rng: np.random.Generator, max_degree: int = 32, low: int = 0) -> np.ndarray:
    """Coefficients uniform in the unit disk; degree drawn from [1, max_degree].

    With low < 0 the result is a Laurent polynomial on indices low..high and
    is returned as a dict.
    """
    if low >= 0:
        deg = int(rng.integers(1, max_degree + 1))
        r = np.sqrt(rng.random(deg + 1))
        return r * np.exp(2j * np.pi * rng.random(deg + 1))
    idx = np.arange(low, max_degree + low + 1)
    r = np.sqrt(rng.random(idx.size))
    return dict(zip(idx.tolist(), (r * np.exp(2j * np.pi * rng.random(idx.size))).tolist()))


def _series_of(coeffs, r0: float) -> LaurentSeries:
    if isinstance(coeffs, dict):
        return LaurentSeries.from_dict(coeffs, r0)
    return LaurentSeries.taylor(coeffs)


def _ratio(f: Callable, phi: AnalyticSelfMap, p: float, n: int) -> tuple[float, float]:
    base = _boundary_p_norm(f(phi.boundary_points(n)), p, n)
    comp = _boundary_p_norm(compose_trace(f, phi, n), p, n)
    return comp, base


@dataclass
class OperatorMatrix:
    """Truncated matrix of C_phi in an orthonormal monomial basis (p = 2)."""

    size: int
    entries: np.ndarray
    indices: np.ndarray
    tail: np.ndarray

    @property
    def max_tail(self) -> float:
        return float(self.tail.max(initial=0.0))


def matrix_truncate(phi: AnalyticSelfMap, M: int, n_quad: int | None = None) -> OperatorMatrix:
    """Matrix of C_phi on span{z^n}.

    Disk: column n holds the first M Taylor coefficients of phi^n, built by
    truncated repeated convolution (exact for the kept entries).  Annulus:
    indices |n| <= M/2, orthonormalized by sqrt(1 + r0^{2n}); Laurent
    coefficients of phi^n come from the FFT on the unit circle.
    """
    if M < 1:
        raise ValueError("M must be positive")
    n_quad = n_quad or max(1024, 1 << int(np.ceil(np.log2(8 * M))))
    t = circle_angles(n_quad)
    if phi.domain == "disk":
        b = phi.taylor(M)
        E = np.zeros((M, M), dtype=complex)
        col = np.zeros(M, dtype=complex)
        col[0] = 1.0
        for n in range(M):
            E[:, n] = col
            col = np.convolve(col, b)[:M]
        vals = phi(np.exp(1j * t))
        total = np.array([np.mean(np.abs(vals) ** (2 * n)) for n in range(M)])
        tail = np.sqrt(np.maximum(total - np.sum(np.abs(E) ** 2, axis=0), 0.0))
        return OperatorMatrix(M, E, np.arange(M), tail)
    half = M // 2
    idx = np.arange(-half, half + 1)
    w = np.sqrt(1.0 + phi.r0 ** (2.0 * idx))
    vals = phi(np.exp(1j * t))
    with np.errstate(divide="ignore", invalid="ignore"):
        powers = vals[None, :] ** idx[:, None]
    coeffs = np.fft.fft(powers, axis=1) / n_quad              # row j: coefficients of phi^{idx[j]}
    E = coeffs[:, idx % n_quad].T * w[:, None] / w[None, :]   # E[k, n] = c_k(phi^n) w_k / w_n
    inner = phi(phi.r0 * np.exp(1j * t))
    with np.errstate(divide="ignore", invalid="ignore"):
        full = np.mean(np.abs(vals[None, :] ** idx[:, None]) ** 2, axis=1) + \
            np.mean(np.abs(inner[None, :] ** idx[:, None]) ** 2, axis=1)
    tail = np.sqrt(np.maximum(full / w**2 - np.sum(np.abs(E) ** 2, axis=0), 0.0))
    return OperatorMatrix(M + 1, E, idx, tail)


def singular_values(A: np.ndarray) -> np.ndarray:
    """Singular values with high relative accuracy (LAPACK Jacobi SVD).

    Complex input goes through the real embedding [[Re, -Im], [Im, Re]],
    whose singular values are those of A, each repeated twice.
    """
    A = np.asarray(A)
    if A.shape[0] < A.shape[1]:
        A = A.conj().T
    if np.iscomplexobj(A):
        R = np.block([[A.real, -A.imag], [A.imag, A.real]])
        twice = True
    else:
        R, twice = A.astype(float), False
    if not np.any(R):
        return np.zeros(A.shape[1])
    sva, _, _, work, _, info = lapack.dgejsv(R, joba=3, jobu=3, jobv=3)
    if info != 0:
        raise RuntimeError(f"dgejsv failed with info = {info}")
    s = np.sort(sva * (work[0] / work[1]))[::-1]
    return s[::2] if twice else s


def norm_estimate(phi: AnalyticSelfMap, p: float = 2.0, nu: NuField | None = None,
                  trials: int = 20, seed: int = 0, n: int = 4096, M: int = 128) -> float:
    """Lower bound for ||C_phi|| from test inputs.

    p = 2 without nu: the norm of the truncated matrix (a compression of the
    operator).  Otherwise the best ratio over seeded random polynomials and,
    on the disk, normalized kernels ((1 - |b|^2) / (1 - conj(b) z)^2)^{1/p}.
    With ``nu`` the inputs are Dirichlet solutions with random trigonometric
    boundary data.
    """
    rng = np.random.default_rng(seed)
    best = 0.0
    if nu is not None:
        mesh = nu.mesh
        for _ in range(trials):
            k = np.arange(1, 9)
            psi = rng.standard_normal() + sum(
                (rng.standard_normal() * np.cos(j * mesh.theta) + rng.standard_normal() * np.sin(j * mesh.theta)) / j
                for j in k)
            f = dirichlet_disk(psi, nu)
            num = _boundary_p_norm(compose_trace(f, phi, mesh.n_theta), p, mesh.n_theta)
            den = _boundary_p_norm(f.values.values[-1], p, mesh.n_theta)
            best = max(best, num / den)
        return float(best)
    if p == 2.0:
        best = float(np.linalg.norm(matrix_truncate(phi, M).entries, 2))
    low = -16 if phi.domain == "annulus" else 0
    for _ in range(trials):
        f = _series_of(random_polynomial(rng, 32, low), phi.r0)
        num, den = _ratio(f, phi, p, n)
        best = max(best, num / den)
    if phi.domain == "disk":
        for rad in (0.0, 0.3, 0.6, 0.8, 0.9, 0.95):
            for ang in circle_angles(16):
                b = rad * np.exp(1j * ang)
                f = lambda z, b=b: ((1.0 - abs(b) ** 2) / (1.0 - np.conj(b) * z) ** 2) ** (1.0 / p)  # noqa: E731
                num, den = _ratio(f, phi, p, n)
                best = max(best, num / den)
    return float(best)


# ---------------------------------------------------------------------------
# isometries


def _empirical_deviation(phi: AnalyticSelfMap, p: float, trials: int, seed: int, n: int):
    rng = np.random.default_rng(seed)
    low = -16 if phi.domain == "annulus" else 0
    worst, witness, mean_gap = 0.0, None, 0.0
    for _ in range(trials):
        coeffs = random_polynomial(rng, 32, low)
        f = _series_of(coeffs, phi.r0)
        num, den = _ratio(f, phi, p, n)
        dev = abs(num - den) / den
        if phi.domain == "disk":
            comp = compose_trace(f, phi, n)
            mean_gap = max(mean_gap, float(abs(np.mean(comp) - np.mean(f(np.exp(1j * circle_angles(n)))))))
        if dev >= worst:
            worst, witness = dev, coeffs
    return worst, witness, mean_gap


def _witness_plain(w):
    if isinstance(w, dict):
        return {str(k): _cnum(v) for k, v in w.items()}
    return [_cnum(v) for v in np.asarray(w)]


def isometry_check_disk(phi: AnalyticSelfMap, p: float = 2.0, trials: int = 20, seed: int = 0,
                        n: int = 1024, nu: NuField | None = None, tol=None) -> DiagnosticsReport:
    """Isometry of C_phi on the disk: phi(0) = 0 and |phi| = 1 on T.

    Without nu these two conditions decide the verdict; the empirical norm
    deviation and the mean identity are consistency certificates.  With a
    non-zero nu only necessary conditions are known, and the verdict is
    'NECESSARY-CONDITIONS-MET' or 'NECESSARY-CONDITIONS-VIOLATED'.
    """
    tol = tol or TOL
    if phi.domain != "disk":
        raise ValueError("isometry_check_disk needs a disk symbol")
    origin = float(abs(phi(np.array([0.0]))[0]))
    t = circle_angles(n)
    mods = np.abs(phi(np.exp(1j * t)))
    inner_gap = float(np.abs(mods - 1.0).max())
    cond_a = origin < tol.symbol_origin
    cond_b = float(mods.min()) > 1.0 - tol.symbol_boundary and inner_gap < tol.symbol_boundary
    worst, witness, mean_gap = _empirical_deviation(phi, p, trials, seed, n)
    certs = {"phi0_modulus": origin, "boundary_modulus_gap": inner_gap, "min_boundary_modulus": float(mods.min()),
             "empirical_deviation": worst, "mean_identity_gap": mean_gap, "trials": trials, "p": p}
    notes = []
    verdicts = {}
    generalized = nu is not None and np.any(nu.values.values != 0)
    if generalized:
        verdicts["main"] = "NECESSARY-CONDITIONS-MET" if (cond_a and cond_b) else "NECESSARY-CONDITIONS-VIOLATED"
        notes.append("sufficiency is not characterized for non-zero nu; necessary conditions only")
    else:
        verdicts["main"] = bool(cond_a and cond_b)
    verdicts["origin_fixed"] = bool(cond_a)
    verdicts["inner"] = bool(cond_b)
    if cond_a and cond_b:
        consistent = worst < tol.isometry_norm and mean_gap < tol.isometry_norm
        verdicts["consistent"] = bool(consistent)
        if not consistent:
            notes.append("characterization and empirical certificates disagree")
    else:
        verdicts["consistent"] = bool(worst > tol.isometry_witness)
        certs["witness"] = _witness_plain(witness)
        if worst <= tol.isometry_witness:
            notes.append("no witness with deviation above the witness threshold was found")
    return DiagnosticsReport("isometry_disk", verdicts, certs, {
        "symbol_origin": tol.symbol_origin, "symbol_boundary": tol.symbol_boundary,
        "isometry_norm": tol.isometry_norm, "isometry_witness": tol.isometry_witness}, notes=notes)


def _family_distance(phi: AnalyticSelfMap, basis: np.ndarray, vals: np.ndarray):
    """Best unimodular c with phi ~ c * basis on the samples, and the sup distance."""
    num = np.vdot(basis, vals)
    if abs(num) == 0.0:
        return 1.0 + 0.0j, float(np.abs(vals - basis).max())
    c = num / abs(num)
    return complex(c), float(np.abs(vals - c * basis).max())


def isometry_check_annulus(phi: AnalyticSelfMap, p: float = 2.0, trials: int = 20, seed: int = 0,
                           n: int = 1024, tol=None) -> DiagnosticsReport:
    """Isometry of C_phi on the annulus: phi must be lam z or mu r0 / z with |lam| = |mu| = 1."""
    tol = tol or TOL
    if phi.domain != "annulus":
        raise ValueError("isometry_check_annulus needs an annulus symbol")
    pts = phi.boundary_points(n)
    vals = phi(pts)
    lam, d_rot = _family_distance(phi, pts, vals)
    mu, d_inv = _family_distance(phi, phi.r0 / pts, vals)
    om = omega_measures(phi, phi.r0, tol.omega)
    case = classify_case(om)
    worst, witness, _ = _empirical_deviation(phi, p, trials, seed, n)
    fit = min(d_rot, d_inv) < tol.family_fit
    certs = {"rotation_distance": d_rot, "rotation_constant": _cnum(lam),
             "inversion_distance": d_inv, "inversion_constant": _cnum(mu),
             "omega": om.as_dict(), "case": case.value,
             "eq1_defect": abs(phi.r0**p * om.m_r0 + om.m_1 - (phi.r0**p + 1.0)),
             "empirical_deviation": worst, "trials": trials, "p": p}
    verdicts = {"main": bool(fit), "rotation_family": bool(d_rot < tol.family_fit),
                "inversion_family": bool(d_inv < tol.family_fit)}
    notes = []
    if fit:
        verdicts["consistent"] = bool(worst < tol.isometry_norm)
    else:
        verdicts["consistent"] = bool(worst > tol.isometry_witness)
        certs["witness"] = _witness_plain(witness)
    if not verdicts["consistent"]:
        notes.append("characterization and empirical certificates disagree")
    return DiagnosticsReport("isometry_annulus", verdicts, certs, {
        "family_fit": tol.family_fit, "omega": tol.omega, "isometry_norm": tol.isometry_norm,
        "isometry_witness": tol.isometry_witness}, notes=notes)


# ---------------------------------------------------------------------------
# invertibility


def winding_number(values: np.ndarray) -> int:
    """Winding of a closed sampled curve around 0 by argument accumulation."""
    v = np.asarray(values)
    steps = np.angle(np.roll(v, -1) / v)
    return int(np.rint(steps.sum() / (2 * np.pi)))


def target_lattice(domain: str, r0: float = 0.0) -> np.ndarray:
    """Polar lattice of test targets (includes the positive real axis)."""
    ang = np.exp(1j * circle_angles(16))
    if domain == "disk":
        radii = np.arange(1, 20) / 20.0
        return np.concatenate([[0.0], (radii[:, None] * ang[None, :]).ravel()])
    radii = r0 + (1.0 - r0) * (np.arange(10) + 0.5) / 10.0
    return (radii[:, None] * ang[None, :]).ravel()


def invertibility_check(phi: AnalyticSelfMap, n: int | None = None, targets=None,
                        tol=None) -> DiagnosticsReport:
    """Preimage counts of lattice targets by the argument principle.

    The boundary of the source is the unit circle counterclockwise and, on
    the annulus, the inner circle clockwise.  Targets within the skip
    distance of the boundary image are reported and left out.
    """
    tol = tol or TOL
    n = n or 4096
    targets = target_lattice(phi.domain, phi.r0) if targets is None else np.asarray(targets, dtype=complex)
    t = circle_angles(n)
    outer = phi(np.exp(1j * t))
    inner = phi(phi.r0 * np.exp(1j * t)) if phi.domain == "annulus" else None
    image = outer if inner is None else np.concatenate([outer, inner])
    counts, used, skipped = [], [], []
    for a in targets:
        if np.abs(image - a).min() < tol.winding_skip:
            skipped.append(a)
            continue
        c = winding_number(outer - a)
        if inner is not None:
            c -= winding_number(inner - a)
        counts.append(c)
        used.append(a)
    counts = np.asarray(counts, dtype=int)
    used = np.asarray(used)
    injective = bool(counts.size and counts.max() <= 1)
    surjective = bool(counts.size and counts.min() >= 1)
    certs = {"n_targets": int(targets.size), "n_skipped": len(skipped),
             "min_count": int(counts.min()) if counts.size else None,
             "max_count": int(counts.max()) if counts.size else None,
             "histogram": {str(k): int(v) for k, v in zip(*np.unique(counts, return_counts=True))}}
    for label, sel in (("overcounted_target", counts > 1), ("missed_target", counts < 1)):
        if np.any(sel):
            j = int(np.argmin(np.abs(used[sel])))
            certs[label] = _cnum(used[sel][j])
            certs[label.replace("target", "count")] = int(counts[sel][j])
    return DiagnosticsReport("invertibility", {"main": injective and surjective, "injective": injective,
                                               "surjective": surjective}, certs,
                             {"winding_skip": tol.winding_skip, "n_boundary": n},
                             series={"lattice": {"target": used, "count": counts}})


def counts_at(phi: AnalyticSelfMap, targets, n: int = 4096) -> list:
    """Preimage counts at explicit targets (no skipping)."""
    rep = invertibility_check(phi, n, targets, TOL.updated(winding_skip=0.0))
    return rep.series["lattice"]["count"].tolist()


# ---------------------------------------------------------------------------
# compactness


def _classify_decay(sigma: np.ndarray) -> tuple[str, float, float]:
    m = sigma.size
    top = sigma[0] if m else 0.0
    keep = sigma > 1e-14 * top
    k = np.nonzero(keep)[0]
    rho = float("nan")
    if k.size >= 2:
        slope = np.polyfit(k, np.log(sigma[k]), 1)[0]
        rho = float(np.exp(slope))
    quarter = float(sigma[m // 4] / top) if top > 0 else 0.0
    return ("non-compact-like" if quarter > 0.1 else "compact-like"), rho, quarter


def compact_proxy(phi: AnalyticSelfMap, M: int = 64, alpha: AlphaField | None = None,
                  n_boundary: int | None = None) -> DiagnosticsReport:
    """Singular values of the truncated operator and their decay class.

    With ``alpha`` the operator is conjugated to the analytic one: with
    s = hard_factorize(1, alpha), the columns e^{s o phi} phi^n are compared
    with phi^n on the boundary.  Multiplication by e^{s o phi} distorts each
    singular value by at most e^{+-||s||_inf}.
    """
    E = matrix_truncate(phi, M)
    sigma = singular_values(E.entries)
    kind, rho, quarter = _classify_decay(sigma)
    certs = {"sigma_max": float(sigma[0]), "sigma_min": float(sigma[-1]), "geometric_ratio": rho,
             "quarter_ratio": quarter, "truncation_tail": E.max_tail, "M": M}
    verdicts = {"main": kind}
    series = {"singular_values": sigma}
    notes = ["decay classification is a truncation proxy, not a proof of compactness"]
    if alpha is not None and np.any(alpha.values.values):
        mesh = alpha.mesh
        s = hard_factorize(np.ones((mesh.n_r, mesh.n_theta), dtype=complex), alpha)
        n_b = n_boundary or max(256, 1 << int(np.ceil(np.log2(4 * M))))
        zeta = phi.boundary_points(n_b)
        img = phi(zeta)
        weight = np.exp(interpolate(s.values.values, mesh, img))
        idx = E.indices
        with np.errstate(divide="ignore", invalid="ignore"):
            cols = img[:, None] ** idx[None, :]
        if phi.domain == "annulus":
            cols = cols / np.sqrt(1.0 + phi.r0 ** (2.0 * idx))[None, :]
        A0 = cols / np.sqrt(n_b)
        A1 = weight[:, None] * A0
        s0, s1 = singular_values(A0), singular_values(A1)
        bound = float(np.exp(s.sup_norm))
        floor = 1e-300
        ratio = (s1 + floor) / (s0 + floor)
        within = bool(np.all(ratio <= bound * (1 + 1e-9)) and np.all(ratio >= (1 - 1e-9) / bound))
        verdicts["conjugation_bound"] = within
        certs.update(s_sup_norm=s.sup_norm, distortion_bound=bound, max_ratio=float(ratio.max()),
                     min_ratio=float(ratio.min()), s_iterations=s.meta["iterations"])
        series.update(analytic_boundary_singular_values=s0, weighted_singular_values=s1)
    return DiagnosticsReport("compact_proxy", verdicts, certs, {"decay_quarter_ratio": 0.1}, series, notes)


# ---------------------------------------------------------------------------
# evaluation functionals


def eval_functional_norm(z: complex, p: float = 2.0, nu: NuField | None = None, M: int = 256,
                         domain: str = "disk", r0: float = 0.0, n_modes: int = 12) -> float:
    """sup{|Re f(z)| : ||tr f||_p <= 1} over a truncated basis.

    p = 2, nu = 0: the reproducing kernel value sqrt(sum_{n<M} |z|^{2n})
    (annulus: weights 1 / (1 + r0^{2n}) over |n| <= M/2).  Otherwise, on the
    disk, the real span of Dirichlet solutions for the boundary data
    1, cos kt, sin kt (k <= n_modes) is searched: exactly via its Gram
    matrix when p = 2, by numerical minimization of the norm on the slice
    Re f(z) = 1 when p != 2.
    """
    z = complex(z)
    generalized = nu is not None and np.any(nu.values.values != 0)
    if domain == "annulus":
        if generalized or p != 2.0:
            raise UnsupportedInputError("annulus evaluation norms are available for p = 2, nu = 0 only")
        if not r0 < abs(z) < 1.0:
            raise PreconditionError("z must lie in the open annulus")
        n = np.arange(-(M // 2), M // 2 + 1)
        return float(np.sqrt(np.sum(abs(z) ** (2.0 * n) / (1.0 + r0 ** (2.0 * n)))))
    if abs(z) >= 1.0:
        raise PreconditionError("z must lie in the open disk")
    if not generalized and p == 2.0:
        return float(np.sqrt(np.sum(abs(z) ** (2.0 * np.arange(M)))))
    if nu is None:
        nu = NuField.zero(PolarMesh.disk(65, 128))
    mesh = nu.mesh
    th = mesh.theta
    data = [np.ones_like(th)]
    for k in range(1, n_modes + 1):
        data += [np.cos(k * th), np.sin(k * th)]
    sols = [dirichlet_disk(psi, nu) for psi in data]
    traces = np.stack([s.values.values[-1] for s in sols])            # (B, n_theta)
    v = np.array([s.at(np.array([z]))[0].real for s in sols])
    if p == 2.0:
        G = (traces.conj() @ traces.T).real / mesh.n_theta
        return float(np.sqrt(v @ np.linalg.solve(G, v)))
    # minimize ||sum c_j tr f_j||_p subject to v . c = 1
    c0 = v / (v @ v)
    Q, _ = np.linalg.qr(np.column_stack([v, np.eye(v.size)]))
    N = Q[:, 1:v.size]

    def norm(y):
        c = c0 + N @ y
        return _boundary_p_norm(c @ traces, p, mesh.n_theta)

    res = minimize(norm, np.zeros(N.shape[1]), method="BFGS", options={"gtol": 1e-10})
    return float(1.0 / res.fun)


def adjoint_identity_check(phi: AnalyticSelfMap, z, f, M: int = 64) -> DiagnosticsReport:
    """(f o phi)(z) two ways: compose first and evaluate, or evaluate f at phi(z).

    For an analytic f the composition is formed as a power series through the
    truncated operator matrix; for a grid solution it is formed on the grid
    and interpolated.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    direct_pts = phi(z)
    if isinstance(f, GenHardyFunction):
        mesh = f.values.mesh
        composed = mesh.grid(f.at(phi(mesh.z)))
        path1 = interpolate(composed.values, mesh, z)
        path2 = f.at(direct_pts)
    else:
        coeffs = f.coeffs[f.order:] if isinstance(f, LaurentSeries) else np.asarray(f, dtype=complex)
        if phi.domain != "disk":
            raise ValueError("series composition is implemented for disk symbols")
        m = max(M, coeffs.size)
        E = matrix_truncate(phi, m).entries
        c = np.zeros(m, dtype=complex)
        c[:coeffs.size] = coeffs
        composed = LaurentSeries.taylor(E @ c)
        path1 = composed(z)
        path2 = np.polynomial.polynomial.polyval(direct_pts, coeffs)
    gap_re = float(np.abs(path1.real - path2.real).max())
    gap_im = float(np.abs(path1.imag - path2.imag).max())
    return DiagnosticsReport("adjoint_identity", {"main": bool(max(gap_re, gap_im) < 1e-10)},
                             {"max_re_gap": gap_re, "max_im_gap": gap_im, "n_points": int(z.size)},
                             {"adjoint": 1e-10})


# ---------------------------------------------------------------------------
# report wrappers used by the scenario runner


def norm_report(phi: AnalyticSelfMap, p: float = 2.0, nu: NuField | None = None, trials: int = 20,
                seed: int = 0) -> DiagnosticsReport:
    """Empirical norm against the disk bound (disk) or against 1 (annulus isometry families)."""
    est = norm_estimate(phi, p, nu, trials=trials, seed=seed)
    certs = {"estimate": est, "p": p, "trials": trials}
    if phi.domain == "disk":
        bound = norm_bound_disk(phi, p)
        certs.update(bound=bound, gap=est - bound)
        verdicts = {"main": bool(est <= bound + 1e-6)}
    else:
        verdicts = {"main": bool(np.isfinite(est))}
        certs["note"] = "no closed-form bound on the annulus"
    return DiagnosticsReport("norm", verdicts, certs, {"bound_slack": 1e-6})


def omega_report(phi: AnalyticSelfMap, p: float = 2.0, tol=None) -> DiagnosticsReport:
    """Boundary measures, the case pattern and the measure identity."""
    tol = tol or TOL
    if phi.domain != "annulus":
        raise ValueError("omega measures need an annulus symbol")
    om = omega_measures(phi, phi.r0, tol.omega)
    case = classify_case(om)
    defect = abs(phi.r0**p * om.m_r0 + om.m_1 - (phi.r0**p + 1.0))
    return DiagnosticsReport("omega", {"main": case.value, "identity": bool(defect < 1e-8)},
                             {"measures": om.as_dict(), "identity_defect": defect, "p": p},
                             {"omega": tol.omega})


def eval_sweep(points=None, p: float = 2.0, nu: NuField | None = None, M: int = 256,
               domain: str = "disk", r0: float = 0.0) -> DiagnosticsReport:
    """Evaluation-functional norms along a radial sweep (default z = 1 - 2^-j, j = 1..8)."""
    if points is None:
        points = [1.0 - 2.0**-j for j in range(1, 9)] if domain == "disk" else \
            [1.0 - (1.0 - r0) * 2.0**-j for j in range(1, 9)]
    pts = np.asarray(points, dtype=complex)
    norms = np.array([eval_functional_norm(z, p, nu, M, domain, r0) for z in pts])
    order = np.argsort(np.abs(pts), kind="stable")
    increasing = bool(np.all(np.diff(norms[order]) > 0))
    return DiagnosticsReport("eval", {"main": increasing},
                             {"max_norm": float(norms.max()), "min_norm": float(norms.min()), "M": M, "p": p},
                             series={"sweep": {"modulus": np.abs(pts)[order], "norm": norms[order]}})
