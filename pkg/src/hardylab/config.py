"""Central tolerance and resolution defaults.

Every numeric threshold that influences a verdict lives here so that
reports can echo the exact values used.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace


@dataclass(frozen=True)
class Tolerances:
    roundtrip: float = 1e-12
    membership: float = 1e-10
    boundary_zero: float = 1e-12
    poisson_residual: float = 1e-6
    cauchy_residual: float = 1e-6
    pde_residual: float = 1e-6
    fixed_point_step: float = 1e-10
    fixed_point_max_iter: int = 200
    dirichlet_max_iter: int = 100
    boundary_real_part: float = 1e-8
    factor_identity: float = 1e-8
    omega: float = 1e-4
    isometry_norm: float = 1e-8
    isometry_witness: float = 1e-3
    symbol_origin: float = 1e-10
    symbol_boundary: float = 1e-8
    family_fit: float = 1e-8
    winding_skip: float = 1e-3
    sup_slack: float = 1e-10
    zero_free: float = 1e-8

    def as_dict(self) -> dict:
        return asdict(self)

    def updated(self, **changes) -> "Tolerances":
        known = {f.name for f in fields(self)}
        unknown = set(changes) - known
        if unknown:
            raise KeyError(f"unknown tolerance(s): {sorted(unknown)}")
        return replace(self, **changes)


@dataclass(frozen=True)
class GridDefaults:
    n_theta: int = 256
    n_r: int = 129
    n_boundary: int = 1024
    n_winding: int = 4096
    n_omega: int = 4096


TOL = Tolerances()
GRID = GridDefaults()
