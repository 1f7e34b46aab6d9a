"""The acceptance suite: thirteen end-to-end checks with fixed targets.

Each ``criterion_<k>`` returns a :class:`CriterionResult`; :func:`run_all`
runs a selection.  The same functions back ``hardylab selftest`` and the
test-suite, so both report identical numbers.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import beltrami
from .beltrami import AlphaField, NuField, dirichlet_disk, hard_factorize, jinv, jmap, refactor_alpha
from .compop import (
    AnalyticSelfMap,
    compact_proxy,
    eval_functional_norm,
    invertibility_check,
    isometry_check_annulus,
    isometry_check_disk,
    norm_bound_disk,
    norm_estimate,
)
from .grid import PolarMesh, interpolate
from .hardy import LaurentSeries, annulus_membership, szego_eval_bound
from .surface import (
    index_of,
    kernel_mass,
    lift,
    omega_measures,
    sarason_K,
    sarason_K_rewritten,
    surface_constant,
)


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        return f"criterion {self.number:2d} [{'PASS' if self.passed else 'FAIL'}] {self.title}"

    def as_dict(self) -> dict:
        return {"number": self.number, "title": self.title, "passed": self.passed, "details": self.details}


def _result(number, title, checks: dict, details: dict) -> CriterionResult:
    details = dict(details)
    details["checks"] = {k: bool(v) for k, v in checks.items()}
    return CriterionResult(number, title, all(checks.values()), details)


# ---------------------------------------------------------------------------


def criterion_1() -> CriterionResult:
    start = time.perf_counter()
    phi = AnalyticSelfMap.monomial(2)
    devs = {}
    verdicts = {}
    for p in (2.0, 4.0):
        rep = isometry_check_disk(phi, p, trials=20, seed=1, n=1024)
        devs[p] = rep.certificates["empirical_deviation"]
        verdicts[p] = rep.verdict
    elapsed = time.perf_counter() - start
    checks = {"verdicts": all(verdicts.values()), "deviation": max(devs.values()) < 1e-8, "runtime": elapsed < 5.0}
    return _result(1, "z^2 preserves H^p(D) norms", checks,
                   {"max_deviation": max(devs.values()), "elapsed": elapsed})


def criterion_2() -> CriterionResult:
    r0 = 0.5
    rot = AnalyticSelfMap.rotation(np.exp(1j * np.pi / 7), "annulus", r0)
    inv = AnalyticSelfMap.inversion(np.exp(1j), r0)
    const = AnalyticSelfMap.constant(np.sqrt(r0), "annulus", r0)
    worst, cases, reject = 0.0, {}, []
    for name, phi, case in (("rotation", rot, "Case1"), ("inversion", inv, "Case2")):
        for p in (2.0, 4.0):
            rep = isometry_check_annulus(phi, p, trials=20, seed=2)
            worst = max(worst, rep.certificates["empirical_deviation"])
            cases[f"{name}_p{int(p)}"] = (rep.verdict, rep.certificates["case"] == case)
    for p in (2.0, 4.0):
        rep = isometry_check_annulus(const, p, trials=20, seed=2)
        reject.append((rep.verdict, rep.certificates["empirical_deviation"]))
    checks = {
        "norm_preservation": worst < 1e-8,
        "verdicts_and_cases": all(v and c for v, c in cases.values()),
        "constant_rejected": all((not v) and d > 0.05 for v, d in reject),
    }
    return _result(2, "annulus rotations and inversions are isometries", checks,
                   {"max_deviation": worst, "constant_deviation": min(d for _, d in reject)})


def criterion_3(count: int = 50) -> CriterionResult:
    rng = np.random.default_rng(3)
    worst_gap = -np.inf
    for _ in range(count):
        a = 0.9 * np.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random())
        phi = AnalyticSelfMap.moebius(a, np.exp(2j * np.pi * rng.random()))
        for p in (2.0, 4.0):
            est = norm_estimate(phi, p, trials=5, seed=int(rng.integers(1 << 30)), n=1024)
            worst_gap = max(worst_gap, est - norm_bound_disk(phi, p))
    return _result(3, "norm estimates respect the disk bound", {"bound": worst_gap <= 1e-6},
                   {"max_estimate_minus_bound": worst_gap, "symbols": count})


def criterion_4() -> CriterionResult:
    worst = 0.0
    for r0 in (0.3, 0.5, 0.7):
        for k in range(-20, 21):
            _, d = annulus_membership(LaurentSeries.monomial(k, r0).annulus_trace(128))
            worst = max(worst, d)
    return _result(4, "Laurent monomials satisfy the annulus trace relation", {"defect": worst < 1e-12},
                   {"max_defect": worst})


def criterion_5() -> CriterionResult:
    r0 = 0.3
    r = np.linspace(r0, 1.0, 102)[1:-1]
    t = np.linspace(-np.pi, np.pi, 100)
    R, T = np.meshgrid(r, t, indexing="ij")
    a, b = sarason_K(R, T, r0, check=False), sarason_K_rewritten(R, T, r0)
    agree = float(np.abs(a - b).max())
    masses = {rr: kernel_mass(rr, r0) for rr in (0.4, 0.55, 0.9)}
    q0 = surface_constant(r0)
    centre = float(sarason_K(np.sqrt(r0), 0.0, r0))
    checks = {
        "forms_agree": agree < 1e-12,
        "normalization": all(abs(m - 1.0) < 1e-6 for m in masses.values()),
        "centre_value": abs(centre - 1.0 / q0) <= 4 * np.finfo(float).eps / q0,
    }
    return _result(5, "kernel forms, normalization and centre value", checks,
                   {"max_form_gap": agree, "masses": {str(k): v for k, v in masses.items()},
                    "centre_gap": abs(centre - 1.0 / q0)})


def criterion_6() -> CriterionResult:
    worst = 0.0
    for k in range(4):
        idx = index_of(lift(lambda z, k=k: z**k if k else np.ones_like(z), 0.5))
        worst = max(worst, min(idx, 1.0 - idx) if idx else 0.0)
    return _result(6, "lifted monomials have index 0", {"index": worst < 1e-10}, {"max_frac": worst})


def _bump(z):
    x, y = z.real, z.imag
    return 0.3 * np.exp(1j * x) * (0.5 + 0.5 * np.cos(y))


def criterion_7() -> CriterionResult:
    details, checks = {}, {}
    disk = PolarMesh.disk(65, 128)
    ann = PolarMesh.annulus(0.5, 33, 128)
    cases = {
        "disk": (disk, AlphaField.constant(disk, 0.3), AlphaField.from_function(disk, lambda z: 0.2 * np.conj(z))),
        "annulus": (ann, AlphaField.from_function(ann, _bump),
                    AlphaField.from_function(ann, lambda z: 0.5 * _bump(z))),
    }
    for name, (mesh, alpha, alpha2) in cases.items():
        F = 1.0 + mesh.z / 2.0
        s = hard_factorize(F, alpha, check=False)
        w1 = np.exp(s.values.values) * F
        ref = refactor_alpha(w1, alpha, alpha2, check=False)
        ok = {
            "iterations": s.meta["iterations"] <= 200,
            "w_residual": s.meta["w_residual"] < 1e-6,
            "boundary_real": s.boundary_real_max < 1e-8,
            "sup_ratio": s.sup_norm <= 4 * alpha.sup_norm,
            "refactor": ref.identity_error < 1e-8,
        }
        checks.update({f"{name}_{k}": v for k, v in ok.items()})
        details[name] = {"iterations": s.meta["iterations"], "w_residual": s.meta["w_residual"],
                         "boundary_real": s.boundary_real_max, "sup_ratio": s.sup_norm / alpha.sup_norm,
                         "refactor_error": ref.identity_error}
    return _result(7, "hard factorization and refactorization", checks, details)


def _random_nu(rng, mesh, kappa):
    a, b, c = rng.standard_normal(3)
    scale = kappa / (abs(a) + abs(b) + abs(c))

    def func(z):
        z = np.asarray(z, dtype=complex)
        return scale * (a * z.real + b * z.imag + c * np.abs(z) ** 2)

    return NuField.from_function(mesh, func, kappa)


def criterion_8(cases: int = 10) -> CriterionResult:
    kappa = 0.3
    mesh = PolarMesh.disk(65, 128)
    # closed-form coefficient for nu = kappa x: dbar nu = kappa / 2
    nu_lin = NuField.from_function(mesh, lambda z: kappa * np.asarray(z).real, kappa)
    exact = -(kappa / 2.0) / (1.0 - (kappa * mesh.z.real) ** 2)
    alpha_gap = float(np.abs(beltrami.alpha_from_nu(nu_lin).values.values - exact).max())
    rng = np.random.default_rng(8)
    trip, diagram, w_res = 0.0, 0.0, 0.0
    for _ in range(cases):
        nu = _random_nu(rng, mesh, kappa)
        a = 0.5 * np.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random())
        phi = AnalyticSelfMap.moebius(a, np.exp(2j * np.pi * rng.random()))
        k = np.arange(1, 5)
        psi = sum((rng.standard_normal() * np.cos(j * mesh.theta) + rng.standard_normal() * np.sin(j * mesh.theta))
                  / j**2 for j in k)
        f = dirichlet_disk(psi, nu)
        w = jmap(f, nu)
        w_res = max(w_res, w.residual)
        trip = max(trip, float(np.abs(jinv(w, nu).values.values - f.values.values).max()))
        img = phi(mesh.z)
        lhs = beltrami._jmap_values(f.at(img), nu.compose(phi).values.values)
        rhs = interpolate(w.values.values, mesh, img)
        diagram = max(diagram, float(np.abs(lhs - rhs).max()))
    checks = {"alpha_from_nu": alpha_gap < 1e-10, "w_residual": w_res < 1e-6,
              "round_trip": trip < 1e-12, "diagram": diagram < 1e-10}
    return _result(8, "J isomorphism and the composition diagram", checks,
                   {"alpha_gap": alpha_gap, "max_w_residual": w_res, "round_trip": trip, "diagram": diagram})


def criterion_9() -> CriterionResult:
    half = compact_proxy(AnalyticSelfMap.general({1: 0.5}), 64)
    sig = half.series["singular_values"]
    rel = float(np.max(np.abs(sig - 2.0 ** -np.arange(64)) / 2.0 ** -np.arange(64)))
    sq = compact_proxy(AnalyticSelfMap.monomial(2), 64).series["singular_values"]
    mesh = PolarMesh.disk(65, 128)
    conj = compact_proxy(AnalyticSelfMap.general({1: 0.5}), 64, AlphaField.constant(mesh, 0.3))
    checks = {"half_spectrum": rel < 1e-10, "square_spectrum": bool(np.all(sq[:16] >= 0.999)),
              "conjugation_bound": conj.verdicts["conjugation_bound"]}
    return _result(9, "compactness proxy spectra", checks,
                   {"half_rel_error": rel, "square_min16": float(sq[:16].min()),
                    "ratio_range": [conj.certificates["min_ratio"], conj.certificates["max_ratio"]],
                    "distortion_bound": conj.certificates["distortion_bound"]})


def criterion_10() -> CriterionResult:
    gaps = {m: abs(eval_functional_norm(m, 2.0, M=256) - szego_eval_bound(m)) for m in (0.0, 0.5, 0.9)}
    sweep = [eval_functional_norm(1.0 - 2.0**-j, 2.0, M=256) for j in range(1, 9)]
    checks = {"szego": max(gaps.values()) < 1e-3, "monotone": bool(np.all(np.diff(sweep) > 0))}
    return _result(10, "evaluation functional norms", checks,
                   {"max_gap": max(gaps.values()), "sweep": sweep})


def boundary_preserving_builtins(r0: float) -> list:
    """Rotations and inversions at a few unimodular constants."""
    consts = [1.0, np.exp(1j * np.pi / 7), np.exp(1j), -1j]
    return ([AnalyticSelfMap.rotation(c, "annulus", r0) for c in consts]
            + [AnalyticSelfMap.inversion(c, r0) for c in consts])


def criterion_11() -> CriterionResult:
    r0, p = 0.5, 2.0
    worst = 0.0
    for phi in boundary_preserving_builtins(r0):
        m = omega_measures(phi, r0)
        worst = max(worst, abs(r0**p * m.m_r0 + m.m_1 - (r0**p + 1.0)))
    return _result(11, "measure identity for boundary-preserving symbols", {"identity": worst < 1e-8},
                   {"max_defect": worst})


def criterion_12() -> CriterionResult:
    mesh = PolarMesh.disk(65, 128)
    f0 = dirichlet_disk(np.cos(mesh.theta), NuField.zero(mesh))
    err0 = float(np.abs(f0.values.values - mesh.z).max())
    nu = NuField.from_function(mesh, lambda z: 0.2 * np.abs(z) ** 2, 0.2)
    f = dirichlet_disk(np.cos(mesh.theta) + 0.5 * np.sin(2 * mesh.theta), nu)
    checks = {"recover_z": err0 < 1e-10, "residual": f.residual < 1e-6,
              "trace": f.meta["trace_defect"] < 1e-8, "iterations": f.meta["iterations"] <= 100}
    return _result(12, "Dirichlet problem on the disk", checks,
                   {"z_error": err0, "residual": f.residual, "trace_defect": f.meta["trace_defect"],
                    "iterations": f.meta["iterations"]})


def criterion_13() -> CriterionResult:
    r0 = 0.5
    bijections = [AnalyticSelfMap.rotation(np.exp(0.7j)), AnalyticSelfMap.rotation(-1j, "annulus", r0),
                  AnalyticSelfMap.inversion(np.exp(1j), r0)]
    ones = True
    for phi in bijections:
        hist = invertibility_check(phi).certificates["histogram"]
        ones &= set(hist) == {"1"}
    sq = invertibility_check(AnalyticSelfMap.monomial(2)).certificates["max_count"]
    half = invertibility_check(AnalyticSelfMap.general({1: 0.5})).certificates["min_count"]
    checks = {"bijections": ones, "square_count_2": sq == 2, "half_count_0": half == 0}
    return _result(13, "winding counts detect bijectivity", checks, {"square_max": sq, "half_min": half})


CRITERIA = {k: globals()[f"criterion_{k}"] for k in range(1, 14)}


def run(number: int) -> CriterionResult:
    start = time.perf_counter()
    try:
        res = CRITERIA[number]()
    except Exception as exc:  # a crash is a failure of that criterion only
        res = CriterionResult(number, CRITERIA[number].__name__, False, {"error": f"{type(exc).__name__}: {exc}"})
    res.seconds = time.perf_counter() - start
    return res


def run_all(numbers=None) -> list:
    return [run(k) for k in (numbers or sorted(CRITERIA))]
