"""Numerical laboratory for classical and generalized Hardy spaces on the disk
and the annulus, and for composition operators between them."""

from .config import GRID, TOL, GridDefaults, Tolerances
from .grid import AliasingError, PolarGrid, PolarMesh, ResidualError, SingularSystemError
from .hardy import DomainError, HardyFunction, LaurentSeries
from .beltrami import (
    AlphaField,
    ConvergenceError,
    GenHardyFunction,
    NuField,
    PreconditionError,
    UnsupportedInputError,
)
from .compop import AnalyticSelfMap, DegenerateSymbolError, DiagnosticsReport

__version__ = "0.1.0"

__all__ = [
    "GRID", "TOL", "GridDefaults", "Tolerances",
    "AliasingError", "PolarGrid", "PolarMesh", "ResidualError", "SingularSystemError",
    "DomainError", "HardyFunction", "LaurentSeries",
    "AlphaField", "ConvergenceError", "GenHardyFunction", "NuField", "PreconditionError",
    "UnsupportedInputError",
    "AnalyticSelfMap", "DegenerateSymbolError", "DiagnosticsReport",
    "__version__",
]
