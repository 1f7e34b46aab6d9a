"""Scenario configuration (TOML) and the runner that executes diagnostics.

Schema (every table except [domain] and [symbol] is optional)::

    [domain]
    kind = "disk" | "annulus"
    r0 = 0.5                      # annulus only

    [symbol]
    kind = "rotation" | "inversion" | "monomial" | "moebius" | "constant" | "general"
    lam = "polar(1, pi/7)"        # rotation, moebius
    mu = "polar(1, 1)"            # inversion
    k = 2                         # monomial
    a = "0.3"                     # moebius
    c = "0.5"                     # constant
    coeffs = { "1" = "1/2" }      # general: power -> coefficient

    [coefficient]
    field = "nu" | "alpha"
    family = "constant" | "affine" | "radial"
    kappa = 0.2                   # nu: sup bound, must be < 1
    sup_norm = 0.3                # alpha: sup norm
    phase = "1"                   # alpha: unimodular factor
    direction = "1"               # affine: gradient direction

    [run]
    p = 2
    seed = 0
    trials = 20
    diagnostics = ["isometry", "omega", "norm", "invertibility", "compact", "eval", "adjoint"]
    eval_points = ["0.5", "0.9"]
    adjoint_points = ["0.3", "0.5j"]

    [grid]
    n_r = 65
    n_theta = 128
    M = 64

    [tolerances]                  # any field of hardylab.config.Tolerances
    omega = 1e-4

Complex values are numbers, [re, im] pairs or literal strings built from
numbers, ``pi``, ``e``, ``j``, + - * / **, and the functions ``polar(r, t)``,
``sqrt``, ``exp``, ``cos`` and ``sin``.
"""

from __future__ import annotations

import ast
import cmath
import math
import re
import sys
import time
from dataclasses import dataclass, field

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from . import __version__
from .beltrami import AlphaField, NuField, UnsupportedInputError, alpha_from_nu, dirichlet_disk
from .compop import (
    AnalyticSelfMap,
    adjoint_identity_check,
    compact_proxy,
    eval_sweep,
    invertibility_check,
    isometry_check_annulus,
    isometry_check_disk,
    norm_report,
    omega_report,
    random_polynomial,
)
from .config import TOL, Tolerances
from .grid import PolarMesh
from .hardy import LaurentSeries


class ConfigError(ValueError):
    """Invalid scenario configuration; the message names the file position."""


DIAGNOSTICS = ("isometry", "omega", "norm", "invertibility", "compact", "eval", "adjoint")

SCHEMA = {
    "domain": {"kind": str, "r0": float},
    "symbol": {"kind": str, "lam": "complex", "mu": "complex", "k": int, "a": "complex", "c": "complex",
               "coeffs": dict},
    "coefficient": {"field": str, "family": str, "kappa": float, "sup_norm": float, "phase": "complex",
                    "direction": "complex"},
    "run": {"p": float, "seed": int, "trials": int, "diagnostics": list, "eval_points": list,
            "adjoint_points": list},
    "grid": {"n_r": int, "n_theta": int, "M": int},
    "tolerances": {f: float for f in Tolerances.__dataclass_fields__},
}
REQUIRED = ("domain", "symbol")


# ---------------------------------------------------------------------------
# literals

_FUNCS = {
    "polar": lambda r, t: complex(r) * cmath.exp(1j * complex(t).real),
    "sqrt": cmath.sqrt,
    "exp": cmath.exp,
    "cos": cmath.cos,
    "sin": cmath.sin,
}
_NAMES = {"pi": math.pi, "e": math.e, "j": 1j}
_BINOPS = {ast.Add: lambda a, b: a + b, ast.Sub: lambda a, b: a - b, ast.Mult: lambda a, b: a * b,
           ast.Div: lambda a, b: a / b, ast.Pow: lambda a, b: a**b}


def parse_literal(text) -> complex:
    """Evaluate a restricted arithmetic literal such as ``"polar(1, pi/7)"``."""
    if isinstance(text, bool):
        raise ValueError("booleans are not numbers")
    if isinstance(text, (int, float)):
        return complex(text)
    if isinstance(text, list):
        if len(text) != 2:
            raise ValueError("complex pairs need exactly two entries [re, im]")
        return complex(parse_literal(text[0]).real, parse_literal(text[1]).real)
    if not isinstance(text, str):
        raise ValueError(f"cannot read {text!r} as a number")
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"malformed literal {text!r}") from exc

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float, complex)) \
                and not isinstance(node.value, bool):
            return complex(node.value)
        if isinstance(node, ast.Name) and node.id in _NAMES:
            return complex(_NAMES[node.id])
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS \
                and not node.keywords:
            return complex(_FUNCS[node.func.id](*[ev(a) for a in node.args]))
        raise ValueError(f"unsupported element in literal {text!r}")

    return ev(tree)


# ---------------------------------------------------------------------------
# parsing


@dataclass
class ScenarioConfig:
    """A fully resolved scenario."""

    domain: str
    r0: float
    symbol: dict
    coefficient: dict | None
    p: float = 2.0
    seed: int = 0
    trials: int = 20
    diagnostics: list = field(default_factory=lambda: ["isometry"])
    eval_points: list | None = None
    adjoint_points: list | None = None
    n_r: int = 65
    n_theta: int = 128
    M: int = 64
    tolerances: Tolerances = TOL

    def echo(self) -> dict:
        """Canonical, JSON-ready view of the resolved configuration."""
        sym = {k: ([v.real, v.imag] if isinstance(v, complex) else v) for k, v in self.symbol.items()}
        if "coeffs" in sym:
            sym["coeffs"] = {str(n): [c.real, c.imag] for n, c in sorted(sym["coeffs"].items())}
        coef = None
        if self.coefficient is not None:
            coef = {k: ([v.real, v.imag] if isinstance(v, complex) else v) for k, v in self.coefficient.items()}
        pts = lambda v: None if v is None else [[z.real, z.imag] for z in v]  # noqa: E731
        return {"domain": {"kind": self.domain, "r0": self.r0}, "symbol": sym, "coefficient": coef,
                "run": {"p": self.p, "seed": self.seed, "trials": self.trials, "diagnostics": list(self.diagnostics),
                        "eval_points": pts(self.eval_points), "adjoint_points": pts(self.adjoint_points)},
                "grid": {"n_r": self.n_r, "n_theta": self.n_theta, "M": self.M},
                "tolerances": self.tolerances.as_dict()}


def _locate(text: str, table: str, key: str | None = None) -> int | None:
    """Line number (1-based) of ``key`` inside ``[table]``, or of the header."""
    current = None
    header = re.compile(r"^\s*\[\s*([A-Za-z0-9_.\-]+)\s*\]")
    for i, line in enumerate(text.splitlines(), 1):
        m = header.match(line)
        if m:
            current = m.group(1)
            if key is None and current == table:
                return i
            continue
        if current == table and key is not None and re.match(rf"^\s*{re.escape(key)}\s*=", line):
            return i
    return None


class _Reader:
    def __init__(self, text: str, source: str):
        self.text, self.source = text, source

    def fail(self, msg: str, table: str | None = None, key: str | None = None):
        line = _locate(self.text, table, key) if table else None
        if line is None and table and key:
            line = _locate(self.text, table)
        where = f"{self.source}:{line}" if line else self.source
        path = ".".join(x for x in (table, key) if x)
        raise ConfigError(f"{where}: {path + ': ' if path else ''}{msg}")


def _typed(reader: _Reader, table: str, key: str, value, kind):
    try:
        if kind == "complex":
            return parse_literal(value)
        if kind is float:
            if isinstance(value, bool):
                raise ValueError("expected a number")
            v = parse_literal(value)
            if v.imag != 0:
                raise ValueError("expected a real number")
            return float(v.real)
        if kind is int:
            if isinstance(value, bool) or not isinstance(value, int):
                raise ValueError("expected an integer")
            return int(value)
        if not isinstance(value, kind):
            raise ValueError(f"expected {kind.__name__}")
        return value
    except ValueError as exc:
        reader.fail(str(exc), table, key)


def parse_config(text: str, source: str = "<config>") -> ScenarioConfig:
    """Parse TOML text into a :class:`ScenarioConfig` or raise :class:`ConfigError`."""
    reader = _Reader(text, source)
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    for table in raw:
        if table not in SCHEMA:
            reader.fail("unknown table", table)
        if not isinstance(raw[table], dict):
            reader.fail("expected a table", table)
        for key in raw[table]:
            if key not in SCHEMA[table]:
                reader.fail("unknown key", table, key)
    for table in REQUIRED:
        if table not in raw:
            raise ConfigError(f"{source}: missing required table [{table}]")
    vals = {t: {k: _typed(reader, t, k, v, SCHEMA[t][k]) for k, v in raw[t].items()} for t in raw}

    dom = vals["domain"]
    kind = dom.get("kind")
    if kind not in ("disk", "annulus"):
        reader.fail("kind must be 'disk' or 'annulus'", "domain", "kind")
    r0 = dom.get("r0", 0.0)
    if kind == "annulus" and not 0.0 < r0 < 1.0:
        reader.fail("annulus needs 0 < r0 < 1", "domain", "r0")
    if kind == "disk" and "r0" in dom:
        reader.fail("r0 is only meaningful for an annulus", "domain", "r0")

    sym = dict(vals["symbol"])
    if sym.get("kind") not in ("rotation", "inversion", "monomial", "moebius", "constant", "general"):
        reader.fail("unknown symbol kind", "symbol", "kind")
    if "coeffs" in sym:
        coeffs = {}
        for n, v in sym["coeffs"].items():
            try:
                coeffs[int(n)] = parse_literal(v)
            except ValueError as exc:
                reader.fail(f"coefficient {n!r}: {exc}", "symbol", "coeffs")
        sym["coeffs"] = coeffs

    coef = vals.get("coefficient")
    if coef is not None:
        if coef.get("field") not in ("nu", "alpha"):
            reader.fail("field must be 'nu' or 'alpha'", "coefficient", "field")
        if coef.get("family") not in ("constant", "affine", "radial"):
            reader.fail("family must be 'constant', 'affine' or 'radial'", "coefficient", "family")
        if coef["field"] == "nu":
            kappa = coef.get("kappa")
            if kappa is None:
                reader.fail("nu needs kappa", "coefficient")
            if not 0.0 <= kappa < 1.0:
                reader.fail(f"kappa must satisfy 0 <= kappa < 1, got {kappa}", "coefficient", "kappa")
            if "sup_norm" in coef or "phase" in coef:
                reader.fail("sup_norm/phase belong to alpha fields", "coefficient")
        else:
            if "kappa" in coef:
                reader.fail("kappa belongs to nu fields", "coefficient", "kappa")
            if coef.get("sup_norm", 0.0) < 0.0:
                reader.fail("sup_norm must be non-negative", "coefficient", "sup_norm")
        if coef["family"] == "affine" and coef.get("direction", 1.0) == 0:
            reader.fail("direction must be non-zero", "coefficient", "direction")

    run = vals.get("run", {})
    diags = run.get("diagnostics", ["isometry"])
    for d in diags:
        if d not in DIAGNOSTICS:
            reader.fail(f"unknown diagnostic {d!r}; expected one of {list(DIAGNOSTICS)}", "run", "diagnostics")
    p = run.get("p", 2.0)
    if not 1.0 < p < math.inf:
        reader.fail("p must lie in (1, inf)", "run", "p")
    pts = {}
    for name in ("eval_points", "adjoint_points"):
        if name in run:
            try:
                pts[name] = [parse_literal(v) for v in run[name]]
            except ValueError as exc:
                reader.fail(str(exc), "run", name)
    grid = vals.get("grid", {})
    n_theta = grid.get("n_theta", 128)
    if n_theta < 8 or n_theta & (n_theta - 1):
        reader.fail("n_theta must be a power of two >= 8", "grid", "n_theta")
    if grid.get("n_r", 65) < 5:
        reader.fail("n_r must be >= 5", "grid", "n_r")
    if grid.get("M", 64) < 2:
        reader.fail("M must be >= 2", "grid", "M")
    tol = TOL.updated(**vals.get("tolerances", {})) if "tolerances" in vals else TOL
    if run.get("trials", 20) < 1:
        reader.fail("trials must be positive", "run", "trials")
    cfg = ScenarioConfig(kind, r0 if kind == "annulus" else 0.0, sym, coef, p, run.get("seed", 0),
                         run.get("trials", 20), list(diags), pts.get("eval_points"), pts.get("adjoint_points"),
                         grid.get("n_r", 65), n_theta, grid.get("M", 64), tol)
    try:
        build_symbol(cfg)
    except (ValueError, TypeError) as exc:
        reader.fail(str(exc), "symbol")
    return cfg


def load_config(path) -> ScenarioConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from exc
    return parse_config(text, str(path))


# ---------------------------------------------------------------------------
# building objects


def build_symbol(cfg: ScenarioConfig) -> AnalyticSelfMap:
    s = dict(cfg.symbol)
    kind = s.pop("kind")
    params = {k: v for k, v in s.items()}
    if kind == "inversion" and cfg.domain != "annulus":
        raise ValueError("inversion symbols need an annulus domain")
    return AnalyticSelfMap(kind, params, cfg.domain, cfg.r0)


def build_mesh(cfg: ScenarioConfig) -> PolarMesh:
    if cfg.domain == "disk":
        return PolarMesh.disk(cfg.n_r, cfg.n_theta)
    return PolarMesh.annulus(cfg.r0, cfg.n_r, cfg.n_theta)


def build_coefficient(cfg: ScenarioConfig, mesh: PolarMesh):
    """The configured NuField or AlphaField (None without a [coefficient] table)."""
    c = cfg.coefficient
    if c is None:
        return None
    d = complex(c.get("direction", 1.0))
    d = d / abs(d)
    shapes = {
        "constant": lambda z: np.ones(np.shape(z)),
        "affine": lambda z: (np.conj(d) * np.asarray(z)).real,
        "radial": lambda z: np.abs(z) ** 2,
    }
    shape = shapes[c["family"]]
    if c["field"] == "nu":
        kappa = c["kappa"]
        return NuField.from_function(mesh, lambda z: kappa * shape(z), kappa)
    amp = c.get("sup_norm", 0.0) * complex(c.get("phase", 1.0))
    return AlphaField.from_function(mesh, lambda z: amp * shape(z).astype(complex))


# ---------------------------------------------------------------------------
# running

CHECK_VERDICTS = {"consistent", "conjugation_bound"}
MAIN_IS_CHECK = {"norm", "adjoint"}


def failed_checks(name: str, report: dict) -> list:
    """Verdicts that signal a failed consistency check (not a negative answer)."""
    v = report.get("verdicts", {})
    bad = [k for k in CHECK_VERDICTS if v.get(k) is False]
    if name in MAIN_IS_CHECK and v.get("main") is False:
        bad.append("main")
    return sorted(bad)


def _run_one(name: str, cfg: ScenarioConfig, phi: AnalyticSelfMap, coef, mesh):
    tol = cfg.tolerances
    nu = coef if isinstance(coef, NuField) else None
    if name == "isometry":
        if phi.domain == "disk":
            return isometry_check_disk(phi, cfg.p, cfg.trials, cfg.seed, nu=nu, tol=tol)
        if nu is not None:
            raise UnsupportedInputError("annulus isometry checks are for nu = 0")
        return isometry_check_annulus(phi, cfg.p, cfg.trials, cfg.seed, tol=tol)
    if name == "omega":
        return omega_report(phi, cfg.p, tol)
    if name == "norm":
        return norm_report(phi, cfg.p, nu, cfg.trials, cfg.seed)
    if name == "invertibility":
        return invertibility_check(phi, tol=tol)
    if name == "compact":
        alpha = coef if isinstance(coef, AlphaField) else (alpha_from_nu(nu) if nu is not None else None)
        return compact_proxy(phi, cfg.M, alpha)
    if name == "eval":
        return eval_sweep(cfg.eval_points, cfg.p, nu, 256, phi.domain, phi.r0)
    if name == "adjoint":
        if phi.domain != "disk":
            raise UnsupportedInputError("the adjoint identity check is implemented on the disk")
        pts = cfg.adjoint_points or [0.3, 0.5j, -0.2 + 0.1j]
        if nu is not None:
            rng = np.random.default_rng(cfg.seed)
            th = mesh.theta
            psi = sum(rng.standard_normal() * np.cos(k * th) / k**2 for k in range(1, 5))
            f = dirichlet_disk(psi, nu)
        else:
            f = LaurentSeries.taylor(random_polynomial(np.random.default_rng(cfg.seed), 16))
        return adjoint_identity_check(phi, pts, f)
    raise ValueError(f"unknown diagnostic {name!r}")


def run_scenario(cfg: ScenarioConfig) -> dict:
    """Execute the configured diagnostics in order; failures are recorded and the run continues."""
    phi = build_symbol(cfg)
    mesh = build_mesh(cfg)
    coef = build_coefficient(cfg, mesh)
    diags, timings, failures = {}, {}, []
    for name in cfg.diagnostics:
        start = time.perf_counter()
        try:
            rep = _run_one(name, cfg, phi, coef, mesh).as_dict()
            bad = failed_checks(name, rep)
            entry = {"status": "failed" if bad else "ok", "report": rep}
            if bad:
                entry["failed_checks"] = bad
                failures.append(name)
        except Exception as exc:  # recorded per diagnostic so the rest still run
            entry = {"status": "error", "error": f"{type(exc).__name__}: {exc}"}
            failures.append(name)
        timings[name] = time.perf_counter() - start
        diags[name] = entry
    return {
        "tool": {"name": "hardylab", "version": __version__},
        "config": cfg.echo(),
        "order": list(cfg.diagnostics),
        "diagnostics": diags,
        "status": "failed" if failures else "ok",
        "failures": failures,
        "timings": timings,
    }


DEMO_CONFIG = """
[domain]
kind = "disk"

[symbol]
kind = "general"
coeffs = { "1" = "1/2" }

[run]
diagnostics = ["compact", "eval", "norm", "invertibility"]
"""
