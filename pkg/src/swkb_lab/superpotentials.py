"""Superpotentials, partner potentials and the catalog of conventional examples.

Every superpotential is written in the regrouped general form

    W(x, a) = c(a) * f1(x) + f2(x) + u(a)

with ``c(a) = a`` for all conventional entries.  Class I entries carry no
``f1``, Class II entries no ``f2``.  The mass convention is ``2m = 1``.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Mapping

import numpy as np
from scipy.integrate import quad

from .errors import DomainError, NoZeroCrossing, UnknownParameter, ValidityError
from .roots import expand_bracket, solve_bracketed

__all__ = [
    "SIClass",
    "DomainInterval",
    "Shape",
    "SuperpotentialSpec",
    "CatalogEntry",
    "eval_W",
    "eval_W_prime",
    "eval_dW_da",
    "eval_V",
    "zero_of_W",
    "ground_state_log_density",
    "mirror",
    "catalog",
    "catalog_entries",
    "conventional_names",
    "get_entry",
    "make_spec",
    "catalog_document",
]


class SIClass(str, Enum):
    IA = "IA"
    IB = "IB"
    IIA = "IIA"
    IIB = "IIB"
    IIIa = "IIIa"
    IIIb = "IIIb"
    NonConventional = "NonConventional"

    @property
    def conventional(self) -> bool:
        return self is not SIClass.NonConventional

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class DomainInterval:
    left: float
    right: float
    left_open: bool = True
    right_open: bool = True

    def __post_init__(self):
        if not self.left < self.right:
            raise ValueError(f"empty domain: left={self.left} right={self.right}")
        if math.isinf(self.left) and not self.left_open:
            raise ValueError("an infinite endpoint must be open")
        if math.isinf(self.right) and not self.right_open:
            raise ValueError("an infinite endpoint must be open")

    @property
    def finite(self) -> bool:
        return math.isfinite(self.left) and math.isfinite(self.right)

    def contains(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        ok = np.isfinite(x)
        ok &= (x > self.left) if self.left_open else (x >= self.left)
        ok &= (x < self.right) if self.right_open else (x <= self.right)
        return ok

    def check(self, x) -> None:
        ok = self.contains(x)
        if not np.all(ok):
            bad = np.asarray(x, dtype=float)[~ok] if np.ndim(x) else np.asarray([x], dtype=float)
            raise DomainError(
                f"x={bad.flat[0]!r} is outside the domain {self.describe()}"
            )

    def mirrored(self) -> "DomainInterval":
        return DomainInterval(-self.right, -self.left, self.right_open, self.left_open)

    def seed(self) -> float:
        """A convenient interior starting point for bracket searches."""
        if self.finite:
            return 0.5 * (self.left + self.right)
        if math.isfinite(self.left):
            return self.left + 1.0
        if math.isfinite(self.right):
            return self.right - 1.0
        return 0.0

    def describe(self) -> str:
        lb = "(" if self.left_open else "["
        rb = ")" if self.right_open else "]"
        return f"{lb}{self.left:g}, {self.right:g}{rb}"

    def to_dict(self) -> dict:
        return {
            "left": _json_float(self.left),
            "right": _json_float(self.right),
            "left_open": self.left_open,
            "right_open": self.right_open,
        }


def _json_float(v: float):
    if math.isinf(v):
        return "-inf" if v < 0 else "inf"
    return v


def _zero(a, spec):
    return 0.0


def _one(a, spec):
    return 1.0


def _identity(a, spec):
    return a


@dataclass(frozen=True)
class Shape:
    """Component functions of the general form, each called as ``f(x, spec)``.

    ``u``/``du`` and ``coef``/``dcoef``/``d2coef`` are called as ``g(a, spec)``.
    ``validate`` returns the list of violated constraint descriptions.
    """

    f1: Callable | None = None
    df1: Callable | None = None
    f2: Callable | None = None
    df2: Callable | None = None
    u: Callable = _zero
    du: Callable = _zero
    coef: Callable = _identity
    dcoef: Callable = _one
    d2coef: Callable = _zero
    hbar_dependent: bool = False
    validate: Callable | None = None


@dataclass(frozen=True)
class SuperpotentialSpec:
    name: str
    si_class: SIClass
    a: float
    hbar: float
    constants: tuple = ()
    domain: DomainInterval = DomainInterval(-math.inf, math.inf)
    shape: Shape = field(default_factory=Shape)
    perturbation_amplitude: float = 0.0
    # conventional family used to supply g(a) for a non-conventional control
    reference_class: SIClass | None = None
    mirrored: bool = False

    def __post_init__(self):
        if isinstance(self.constants, Mapping):
            object.__setattr__(self, "constants", tuple(sorted(
                (str(k), float(v)) for k, v in self.constants.items())))
        object.__setattr__(self, "si_class", SIClass(self.si_class))
        if not self.hbar > 0:
            raise ValidityError(f"hbar must be positive, got {self.hbar}")
        if self.shape.validate is not None:
            problems = self.shape.validate(self)
            if problems:
                raise ValidityError(
                    f"{self.name}: parameter constraints violated: " + "; ".join(problems)
                )
        if self.shape.f1 is not None or self.shape.f2 is not None:
            try:
                zero_of_W(self)
            except NoZeroCrossing as exc:
                raise ValidityError(
                    f"{self.name}: W does not change sign (broken supersymmetry)"
                ) from exc

    def const(self, key: str) -> float:
        for k, v in self.constants:
            if k == key:
                return v
        raise UnknownParameter(f"{self.name}: constant {key!r} is not defined")

    @property
    def constants_dict(self) -> dict:
        return dict(self.constants)

    @property
    def g_class(self) -> SIClass:
        """Class whose g(a) governs this spec (the reference class for controls)."""
        if self.si_class.conventional:
            return self.si_class
        if self.reference_class is None:
            raise ValidityError(f"{self.name} has no reference class for g(a)")
        return self.reference_class

    def replace(self, **changes) -> "SuperpotentialSpec":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "class": self.si_class.value,
            "a": self.a,
            "hbar": self.hbar,
            "constants": self.constants_dict,
            "domain": self.domain.to_dict(),
            "perturbation_amplitude": self.perturbation_amplitude,
            "mirrored": self.mirrored,
        }


# --- evaluation ---------------------------------------------------------

def _out(x, value):
    return float(value) if np.ndim(x) == 0 else value


def _raw(spec: SuperpotentialSpec, x: np.ndarray, a: float, which: str) -> np.ndarray:
    sh = spec.shape
    if which == "W":
        val = np.full_like(x, sh.u(a, spec), dtype=float)
        if sh.f1 is not None:
            val = val + sh.coef(a, spec) * sh.f1(x, spec)
        if sh.f2 is not None:
            val = val + sh.f2(x, spec)
        return val
    if which == "dx":
        val = np.zeros_like(x, dtype=float)
        if sh.df1 is not None:
            val = val + sh.coef(a, spec) * sh.df1(x, spec)
        if sh.df2 is not None:
            val = val + sh.df2(x, spec)
        return val
    if which == "da":
        val = np.full_like(x, sh.du(a, spec), dtype=float)
        if sh.f1 is not None:
            val = val + sh.dcoef(a, spec) * sh.f1(x, spec)
        return val
    raise ValueError(which)


def _evaluate(spec, x, a_eff, which, check=True):
    a = spec.a if a_eff is None else float(a_eff)
    xa = np.asarray(x, dtype=float)
    if check:
        spec.domain.check(xa)
    if spec.mirrored:
        val = _raw(spec, -xa, a, which)
        if which != "dx":
            val = -val
    else:
        val = _raw(spec, xa, a, which)
    return _out(x, val)


def eval_W(spec: SuperpotentialSpec, x, a_eff: float | None = None):
    """Superpotential at ``x`` for parameter ``a_eff`` (defaults to ``spec.a``)."""
    return _evaluate(spec, x, a_eff, "W")


def eval_W_prime(spec: SuperpotentialSpec, x, a_eff: float | None = None):
    """Closed-form dW/dx."""
    return _evaluate(spec, x, a_eff, "dx")


def eval_dW_da(spec: SuperpotentialSpec, x, a_eff: float | None = None):
    """Closed-form dW/da from the class form."""
    return _evaluate(spec, x, a_eff, "da")


def eval_V(spec: SuperpotentialSpec, x, a_eff: float | None = None, sign: str = "minus"):
    """Partner potential ``W**2 -/+ hbar*W'`` for ``sign`` = minus/plus."""
    if sign not in ("minus", "plus"):
        raise ValueError(f"sign must be 'minus' or 'plus', got {sign!r}")
    w = np.asarray(eval_W(spec, x, a_eff))
    wp = np.asarray(eval_W_prime(spec, x, a_eff))
    s = -1.0 if sign == "minus" else 1.0
    return _out(x, w * w + s * spec.hbar * wp)


def zero_of_W(spec: SuperpotentialSpec, a_eff: float | None = None) -> float:
    """The point where W changes sign from negative to positive."""
    dom = spec.domain

    def w(x):
        return float(_evaluate(spec, x, a_eff, "W", check=False))

    seed = dom.seed()
    w0 = w(seed)
    if w0 == 0:
        return seed
    try:
        if w0 < 0:
            lo, hi = expand_bracket(w, seed, +1, dom.right, edge_open=dom.right_open)
        else:
            lo, hi = expand_bracket(w, seed, -1, dom.left, edge_open=dom.left_open)
    except Exception as exc:
        raise NoZeroCrossing(f"{spec.name}: W has no zero on {dom.describe()}") from exc
    return solve_bracketed(w, lo, hi)


def ground_state_log_density(spec: SuperpotentialSpec, x: float) -> float:
    """Unnormalised log of the ground state, ``-(1/hbar) * int_{x0}^{x} W``.

    ``x0`` is the zero of W, so the result is maximal (zero) there.
    """
    spec.domain.check(x)
    x_ref = zero_of_W(spec)
    if x == x_ref:
        return 0.0
    val, _ = quad(lambda y: eval_W(spec, y), x_ref, float(x),
                  epsabs=0.0, epsrel=1e-12, limit=200)
    return -val / spec.hbar


def mirror(spec: SuperpotentialSpec) -> SuperpotentialSpec:
    """The spec with ``W(x) -> -W(-x)`` on the reflected domain."""
    return spec.replace(mirrored=not spec.mirrored, domain=spec.domain.mirrored())


# --- catalog --------------------------------------------------------------

@dataclass(frozen=True)
class CatalogEntry:
    name: str
    si_class: SIClass
    description: str
    formula: str
    a: float
    hbar: float
    constants: Mapping[str, float]
    domain: DomainInterval
    shape: Shape
    constraints: tuple[str, ...]
    free_parameters: tuple[str, ...]
    derived: Callable[[dict], dict] | None = None
    perturbation_amplitude: float = 0.0
    reference_class: SIClass | None = None
    si_window: tuple[float, float] = (-5.0, 5.0)
    si_a_range: tuple[float, float] = (0.5, 2.0)
    oracle_box: tuple[float, float] = (-12.0, 12.0)
    oracle_tolerance: float = 1e-5

    def build(self, overrides: Mapping[str, float] | None = None) -> SuperpotentialSpec:
        overrides = dict(overrides or {})
        a = self.a
        hbar = self.hbar
        amp = self.perturbation_amplitude
        consts = dict(self.constants)
        for key, value in overrides.items():
            value = float(value)
            if key == "a":
                a = value
            elif key == "hbar":
                hbar = value
            elif key in ("amplitude", "perturbation_amplitude") and "amplitude" in self.free_parameters:
                amp = value
            elif key in self.free_parameters and key in consts:
                consts[key] = value
            else:
                allowed = ", ".join(("a", "hbar") + self.free_parameters)
                raise UnknownParameter(
                    f"{self.name}: cannot override {key!r} (allowed: {allowed})"
                )
        if self.derived is not None:
            consts.update(self.derived(consts))
        return SuperpotentialSpec(
            name=self.name,
            si_class=self.si_class,
            a=a,
            hbar=hbar,
            constants=consts,
            domain=self.domain,
            shape=self.shape,
            perturbation_amplitude=amp,
            reference_class=self.reference_class,
        )

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "class": self.si_class.value,
            "description": self.description,
            "W": self.formula,
            "a": self.a,
            "hbar": self.hbar,
            "constants": dict(sorted(self.constants.items())),
            "perturbation_amplitude": self.perturbation_amplitude,
            "domain": self.domain.to_dict(),
            "constraints": list(self.constraints),
            "free_parameters": ["a", "hbar", *self.free_parameters],
            "si_window": list(self.si_window),
            "si_a_range": list(self.si_a_range),
            "oracle_box": list(self.oracle_box),
            "oracle_tolerance": self.oracle_tolerance,
        }


def _c(spec, key):
    return spec.const(key)


def _violations(*checks: tuple[bool, str]) -> list[str]:
    return [msg for ok, msg in checks if not ok]


# harmonic: W = (omega/2) x
def _harm_f2(x, s):
    return 0.5 * _c(s, "omega") * x


def _harm_df2(x, s):
    return np.full_like(x, 0.5 * _c(s, "omega"), dtype=float)


# morse: W = alpha*a - exp(alpha*x)
def _morse_f2(x, s):
    return -np.exp(_c(s, "alpha") * x)


def _morse_df2(x, s):
    al = _c(s, "alpha")
    return -al * np.exp(al * x)


def _lin_u(a, s):
    return _c(s, "alpha") * a


def _lin_du(a, s):
    return _c(s, "alpha")


# f1 = -1/x
def _inv_f1(x, s):
    return -1.0 / x


def _inv_df1(x, s):
    return 1.0 / (x * x)


def _b_u(a, s):
    return _c(s, "B") / a


def _b_du(a, s):
    return -_c(s, "B") / (a * a)


# f1 = -coth x  (lambda = 1)
def _coth_f1(x, s):
    return -1.0 / np.tanh(x)


def _coth_df1(x, s):
    sh = np.sinh(x)
    return 1.0 / (sh * sh)


# radial oscillator: f2 = (epsilon/2)/f1
def _rad_f2(x, s):
    return 0.5 * _c(s, "epsilon") / _inv_f1(x, s)


def _rad_df2(x, s):
    f1 = _inv_f1(x, s)
    return -0.5 * _c(s, "epsilon") * _inv_df1(x, s) / (f1 * f1)


# scarf I: f1 = tan x, f2 = beta*sqrt(f1^2 + 1) = beta*sec x
def _tan_f1(x, s):
    return np.tan(x)


def _tan_df1(x, s):
    c = np.cos(x)
    return 1.0 / (c * c)


def _sec_f2(x, s):
    return _c(s, "beta") / np.cos(x)


def _sec_df2(x, s):
    c = np.cos(x)
    return _c(s, "beta") * np.sin(x) / (c * c)


# perturbed harmonic: W = x + A*hbar*x/(1+x^2)
def _pert_f2(x, s):
    return x + s.perturbation_amplitude * s.hbar * x / (1.0 + x * x)


def _pert_df2(x, s):
    x2 = x * x
    return 1.0 + s.perturbation_amplitude * s.hbar * (1.0 - x2) / ((1.0 + x2) ** 2)


_HARMONIC = Shape(
    f2=_harm_f2, df2=_harm_df2,
    validate=lambda s: _violations((_c(s, "omega") > 0, "omega > 0")),
)
_MORSE = Shape(
    f2=_morse_f2, df2=_morse_df2, u=_lin_u, du=_lin_du,
    validate=lambda s: _violations(
        (_c(s, "alpha") < 0, "alpha < 0"), (s.a < 0, "a < 0")),
)
_COULOMB = Shape(
    f1=_inv_f1, df1=_inv_df1, u=_b_u, du=_b_du,
    validate=lambda s: _violations((_c(s, "B") > 0, "B > 0"), (s.a > 0, "a > 0")),
)
_ECKART = Shape(
    f1=_coth_f1, df1=_coth_df1, u=_b_u, du=_b_du,
    validate=lambda s: _violations(
        (s.a > 0, "a > 0"),
        (_c(s, "B") > 0, "B > 0"),
        (_c(s, "B") ** 2 > _c(s, "lambda") * s.a ** 4, "B**2 > lambda*a**4")),
)
_RADIAL = Shape(
    f1=_inv_f1, df1=_inv_df1, f2=_rad_f2, df2=_rad_df2,
    validate=lambda s: _violations((_c(s, "omega") > 0, "omega > 0"), (s.a > 0, "a > 0")),
)
_SCARF = Shape(
    f1=_tan_f1, df1=_tan_df1, f2=_sec_f2, df2=_sec_df2,
    validate=lambda s: _violations(
        (_c(s, "lambda") * s.a < 0, "lambda*a < 0"),
        (abs(_c(s, "beta")) < s.a, "|beta| < a")),
)
_PERTURBED = Shape(
    f2=_pert_f2, df2=_pert_df2, hbar_dependent=True,
    validate=lambda s: _violations(
        (-1.0 < s.perturbation_amplitude * s.hbar < 8.0, "-1 < amplitude*hbar < 8")),
)

_INF = math.inf

_ENTRIES: tuple[CatalogEntry, ...] = (
    CatalogEntry(
        name="harmonic", si_class=SIClass.IA,
        description="harmonic oscillator",
        formula="(omega/2)*x",
        a=0.0, hbar=1.0, constants={"omega": 2.0, "epsilon": -1.0},
        derived=lambda c: {"epsilon": -0.5 * c["omega"]},
        domain=DomainInterval(-_INF, _INF), shape=_HARMONIC,
        constraints=("omega > 0", "epsilon = -omega/2"),
        free_parameters=("omega",),
        si_window=(-5.0, 5.0), si_a_range=(0.0, 2.0),
        oracle_box=(-12.0, 12.0), oracle_tolerance=1e-5,
    ),
    CatalogEntry(
        name="morse", si_class=SIClass.IB,
        description="Morse",
        formula="alpha*a - exp(alpha*x)",
        a=-3.0, hbar=1.0, constants={"alpha": -1.0, "epsilon": 0.0},
        domain=DomainInterval(-_INF, _INF), shape=_MORSE,
        constraints=("alpha < 0", "a < 0", "a + n*hbar < 0 for every bound state n"),
        free_parameters=("alpha",),
        si_window=(-2.0, 6.0), si_a_range=(-3.0, -1.5),
        oracle_box=(-6.0, 25.0), oracle_tolerance=1e-4,
    ),
    CatalogEntry(
        name="coulomb", si_class=SIClass.IIA,
        description="Coulomb (l = 0 radial)",
        formula="-a/x + B/a",
        a=1.0, hbar=1.0, constants={"B": 1.0, "lambda": 0.0},
        domain=DomainInterval(0.0, _INF), shape=_COULOMB,
        constraints=("lambda = 0", "B > 0", "a > 0"),
        free_parameters=("B",),
        si_window=(0.1, 20.0), si_a_range=(0.5, 2.0),
        oracle_box=(0.0, 200.0), oracle_tolerance=1e-5,
    ),
    CatalogEntry(
        name="eckart_like", si_class=SIClass.IIB,
        description="Eckart-type (hyperbolic Class II)",
        formula="-a*coth(x) + B/a",
        a=1.0, hbar=1.0, constants={"B": 20.0, "lambda": 1.0},
        domain=DomainInterval(0.0, _INF), shape=_ECKART,
        constraints=("lambda = 1", "a > 0", "B**2 > lambda*a**4",
                     "B > sqrt(lambda)*(a + n*hbar)**2 for every bound state n",
                     "branch a < 0, B**2 < lambda*a**4 not supported"),
        free_parameters=("B",),
        si_window=(0.05, 10.0), si_a_range=(0.5, 1.5),
        oracle_box=(0.0, 40.0), oracle_tolerance=1e-4,
    ),
    CatalogEntry(
        name="radial_oscillator", si_class=SIClass.IIIa,
        description="3D oscillator radial problem",
        formula="-a/x + (omega/2)*x",
        a=1.0, hbar=1.0, constants={"omega": 1.0, "epsilon": -1.0},
        derived=lambda c: {"epsilon": -c["omega"]},
        domain=DomainInterval(0.0, _INF), shape=_RADIAL,
        constraints=("lambda = 0", "epsilon = -omega < 0", "a > 0"),
        free_parameters=("omega",),
        si_window=(0.05, 10.0), si_a_range=(0.5, 2.0),
        oracle_box=(0.0, 16.0), oracle_tolerance=1e-5,
    ),
    CatalogEntry(
        name="scarf_I", si_class=SIClass.IIIb,
        description="trigonometric Scarf I",
        formula="a*tan(x) + beta*sec(x)",
        a=3.0, hbar=1.0, constants={"beta": 1.0, "lambda": -1.0, "epsilon": 0.0},
        domain=DomainInterval(-math.pi / 2, math.pi / 2), shape=_SCARF,
        constraints=("lambda = -1", "lambda*(a + n*hbar) < 0", "|beta| < a"),
        free_parameters=("beta",),
        si_window=(-1.5, 1.5), si_a_range=(0.5, 3.0),
        oracle_box=(-math.pi / 2, math.pi / 2), oracle_tolerance=1e-5,
    ),
    CatalogEntry(
        name="perturbed_harmonic", si_class=SIClass.NonConventional,
        description="harmonic oscillator with an explicit hbar-dependent term (negative control)",
        formula="x + amplitude*hbar*x/(1 + x**2)",
        a=0.0, hbar=1.0, constants={"omega": 2.0, "epsilon": -1.0},
        domain=DomainInterval(-_INF, _INF), shape=_PERTURBED,
        perturbation_amplitude=0.1, reference_class=SIClass.IA,
        constraints=("-1 < amplitude*hbar < 8", "explicitly hbar-dependent: outside the theorem"),
        free_parameters=("amplitude",),
        si_window=(-5.0, 5.0), si_a_range=(0.0, 2.0),
        oracle_box=(-12.0, 12.0), oracle_tolerance=1e-5,
    ),
)

_BY_NAME = {e.name: e for e in _ENTRIES}


def catalog_entries() -> list[CatalogEntry]:
    return list(_ENTRIES)


def get_entry(name: str) -> CatalogEntry:
    try:
        return _BY_NAME[name]
    except KeyError:
        raise UnknownParameter(
            f"no catalog entry named {name!r}; known: {', '.join(_BY_NAME)}"
        ) from None


def make_spec(name: str, **overrides) -> SuperpotentialSpec:
    """Build a catalog spec, applying keyword overrides (``a``, ``hbar``, constants)."""
    return get_entry(name).build(overrides)


def catalog() -> list[SuperpotentialSpec]:
    """Every catalog entry at its documented default parameters."""
    return [e.build() for e in _ENTRIES]


def conventional_names() -> list[str]:
    return [e.name for e in _ENTRIES if e.si_class.conventional]


def catalog_document(names: Iterable[str] | None = None) -> dict:
    entries = _ENTRIES if names is None else [get_entry(n) for n in names]
    return {
        "schema": "swkb_lab.catalog/1",
        "mass_convention": "2m = 1",
        "entries": [e.to_dict() for e in entries],
    }
