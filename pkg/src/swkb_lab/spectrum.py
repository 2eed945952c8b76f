"""Algebraic spectra ``E_n = g(a + n*hbar) - g(a)`` for additive shape invariance.

Conventions for the additive constant in g (energies are differences, so the
choice is unobservable):

    IA    g = omega * a
    IB    g = -alpha**2 * a**2 - 2*epsilon*a
    II    g = -B**2 / a**2 - lambda * a**2
    IIIa  g = -2 * epsilon * a
    IIIb  g = -lambda * a**2
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import NotConventional, UnknownParameter, ValidityError
from .superpotentials import SIClass, SuperpotentialSpec

__all__ = [
    "SpectrumModel",
    "g_of_a",
    "dg_da",
    "energy",
    "dE_dhbar",
    "partner_check_pairs",
    "spectrum_rows",
    "DEFAULT_LADDER_CAP",
]

DEFAULT_LADDER_CAP = 12

_REQUIRED = {
    SIClass.IA: ("omega",),
    SIClass.IB: ("alpha",),
    SIClass.IIA: ("B", "lambda"),
    SIClass.IIB: ("B", "lambda"),
    SIClass.IIIa: ("epsilon",),
    SIClass.IIIb: ("lambda",),
}


@dataclass(frozen=True)
class SpectrumModel:
    si_class: SIClass
    constants: tuple
    a: float
    hbar: float
    n_max: int = -1

    def __post_init__(self):
        cls = SIClass(self.si_class)
        object.__setattr__(self, "si_class", cls)
        if not cls.conventional:
            raise NotConventional("no algebraic spectrum for a non-conventional class")
        if isinstance(self.constants, dict):
            object.__setattr__(self, "constants", tuple(sorted(self.constants.items())))
        for key in _REQUIRED[cls]:
            self.const(key)
        if not self.hbar > 0:
            raise ValidityError("hbar must be positive")
        _check_valid(self, self.a)
        if self.n_max < 0:
            object.__setattr__(self, "n_max", _default_n_max(self))

    def const(self, key: str, default: float | None = None) -> float:
        for k, v in self.constants:
            if k == key:
                return v
        if default is not None:
            return default
        raise UnknownParameter(f"class {self.si_class} needs constant {key!r}")

    @classmethod
    def from_spec(cls, spec: SuperpotentialSpec, *, use_reference: bool = False,
                  n_max: int = -1) -> "SpectrumModel":
        """Model for a spec; ``use_reference`` admits a control's reference class."""
        si = spec.g_class if use_reference else spec.si_class
        if not si.conventional:
            raise NotConventional(f"{spec.name} is not a conventional superpotential")
        return cls(si, spec.constants, spec.a, spec.hbar, n_max)

    def shifted(self, steps: int = 1) -> "SpectrumModel":
        return SpectrumModel(self.si_class, self.constants, self.a + steps * self.hbar,
                             self.hbar, max(self.n_max - steps, 0))


def _raw_g(model: SpectrumModel, a: float) -> float:
    c = model.si_class
    if c is SIClass.IA:
        return model.const("omega") * a
    if c is SIClass.IB:
        al = model.const("alpha")
        return -al * al * a * a - 2.0 * model.const("epsilon", 0.0) * a
    if c in (SIClass.IIA, SIClass.IIB):
        b = model.const("B")
        return -b * b / (a * a) - model.const("lambda") * a * a
    if c is SIClass.IIIa:
        return -2.0 * model.const("epsilon") * a
    if c is SIClass.IIIb:
        return -model.const("lambda") * a * a
    raise NotConventional(str(c))


def _raw_dg(model: SpectrumModel, a: float) -> float:
    c = model.si_class
    if c is SIClass.IA:
        return model.const("omega")
    if c is SIClass.IB:
        al = model.const("alpha")
        return -2.0 * al * al * a - 2.0 * model.const("epsilon", 0.0)
    if c in (SIClass.IIA, SIClass.IIB):
        b = model.const("B")
        return 2.0 * b * b / a ** 3 - 2.0 * model.const("lambda") * a
    if c is SIClass.IIIa:
        return -2.0 * model.const("epsilon")
    if c is SIClass.IIIb:
        return -2.0 * model.const("lambda") * a
    raise NotConventional(str(c))


def _violation(model: SpectrumModel, a: float) -> str | None:
    c = model.si_class
    if c in (SIClass.IIA, SIClass.IIB):
        if a == 0:
            return "a = 0 is singular for Class II"
        if a < 0:
            return "a < 0 (second Class II branch) is not supported"
    if c is SIClass.IIIa and not a > 0:
        return "Class IIIa requires a > 0"
    if c is SIClass.IIIb and not model.const("lambda") * a < 0:
        return "Class IIIb requires lambda*a < 0"
    if not _raw_dg(model, a) > 0:
        return "dg/da must be positive"
    return None


def _check_valid(model: SpectrumModel, a: float) -> None:
    problem = _violation(model, a)
    if problem is not None:
        raise ValidityError(f"parameter a={a:g} outside the validity region: {problem}")


def _default_n_max(model: SpectrumModel) -> int:
    n = 0
    while n < DEFAULT_LADDER_CAP and _violation(model, model.a + (n + 1) * model.hbar) is None:
        n += 1
    return n


def g_of_a(model: SpectrumModel, a_eff: float) -> float:
    _check_valid(model, a_eff)
    return _raw_g(model, a_eff)


def dg_da(model: SpectrumModel, a_eff: float) -> float:
    _check_valid(model, a_eff)
    return _raw_dg(model, a_eff)


def energy(model: SpectrumModel, n: int) -> float:
    """``g(a + n*hbar) - g(a)``; exactly zero for n = 0."""
    if n < 0:
        raise ValidityError(f"level index must be non-negative, got {n}")
    if n == 0:
        return 0.0
    return g_of_a(model, model.a + n * model.hbar) - g_of_a(model, model.a)


def dE_dhbar(model: SpectrumModel, n: int) -> float:
    """``n * g'(a + n*hbar)``, the hbar-derivative at fixed a."""
    if n < 0:
        raise ValidityError(f"level index must be non-negative, got {n}")
    if n == 0:
        return 0.0
    return n * dg_da(model, model.a + n * model.hbar)


def partner_check_pairs(model: SpectrumModel) -> list[tuple[float, float]]:
    """Pairs ``(E^-_{n+1}, E^+_n)`` for n < n_max.

    ``E^+`` comes from the model at ``a + hbar`` plus the g-shift, since
    ``V_+(x, a) = V_-(x, a + hbar) + g(a + hbar) - g(a)``.
    """
    up = model.shifted(1)
    shift = g_of_a(model, up.a) - g_of_a(model, model.a)
    return [(energy(model, n + 1), energy(up, n) + shift) for n in range(model.n_max)]


def spectrum_rows(name: str, model: SpectrumModel, ns) -> list[dict]:
    return [
        {"name": name, "class": model.si_class.value, "n": n,
         "E_n": energy(model, n), "dE_dhbar": dE_dhbar(model, n)}
        for n in ns
    ]
