"""Numerical laboratory for the SWKB quantization condition on shape-invariant
superpotentials."""

from .errors import (
    BoxTooSmall,
    BracketError,
    DomainError,
    NoZeroCrossing,
    NotConventional,
    NotConverged,
    QuadratureError,
    SwkbLabError,
    UnknownParameter,
    ValidityError,
)
from .oracle import OracleConfig, OracleReport, isospectrality_check, solve_spectrum
from .shape_invariance import (
    classify,
    residual_pde1,
    residual_pde2,
    residual_sic,
    standard_grid,
)
from .spectrum import SpectrumModel, dE_dhbar, energy
from .superpotentials import (
    DomainInterval,
    SIClass,
    SuperpotentialSpec,
    catalog,
    eval_V,
    eval_W,
    eval_W_prime,
    get_entry,
    make_spec,
    mirror,
)
from .swkb import (
    QuadratureConfig,
    SwkbResult,
    TurningPoints,
    conventional_wkb_integral,
    dI_dhbar,
    find_turning_points,
    swkb_integral,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "BoxTooSmall", "BracketError", "DomainError", "NoZeroCrossing", "NotConventional",
    "NotConverged", "QuadratureError", "SwkbLabError", "UnknownParameter", "ValidityError",
    "OracleConfig", "OracleReport", "isospectrality_check", "solve_spectrum",
    "classify", "residual_pde1", "residual_pde2", "residual_sic", "standard_grid",
    "SpectrumModel", "dE_dhbar", "energy",
    "DomainInterval", "SIClass", "SuperpotentialSpec", "catalog", "eval_V", "eval_W",
    "eval_W_prime", "get_entry", "make_spec", "mirror",
    "QuadratureConfig", "SwkbResult", "TurningPoints", "conventional_wkb_integral",
    "dI_dhbar", "find_turning_points", "swkb_integral",
]
