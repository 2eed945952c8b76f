"""Turning points and the SWKB integral ``I(a, n, hbar) = int sqrt(E_n - W^2) dx``.

Energies are never solved for here: conventional entries take ``E_n`` from
the algebraic spectrum, the non-conventional control from a direct eigensolve.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import oracle
from .errors import BracketError, QuadratureError, ValidityError
from .quadrature import QuadratureOutcome, sine_gauss, tanh_sinh
from .roots import expand_bracket, solve_bracketed
from .spectrum import SpectrumModel, dE_dhbar as _model_dE_dhbar, energy as _model_energy
from .superpotentials import SuperpotentialSpec, eval_V, eval_W, eval_W_prime, zero_of_W

__all__ = [
    "QuadratureConfig",
    "TurningPoints",
    "SwkbResult",
    "level_energy",
    "level_dE_dhbar",
    "find_turning_points",
    "swkb_integral",
    "dI_dhbar",
    "conventional_wkb_integral",
    "integrand_samples",
]

METHODS = ("sine_substitution_gauss", "tanh_sinh")
RADICAND_ROUNDING = 1e-13
# fraction of the interval within which the reduced mode rebuilds the vanishing factor
NEAR_ENDPOINT = 1e-6
ENERGY_FD_STEP = 1e-4
REFERENCE_LEVELS = 6


@dataclass(frozen=True)
class QuadratureConfig:
    method: str = "sine_substitution_gauss"
    base_nodes: int = 64
    max_refinements: int = 8
    rel_tol: float = 1e-10
    root_tol: float = 1e-12

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown quadrature method {self.method!r}")
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if self.base_nodes < 16:
            raise ValueError("base_nodes must be at least 16")
        if self.max_refinements < 1:
            raise ValueError("max_refinements must be at least 1")
        if not self.root_tol > 0:
            raise ValueError("root_tol must be positive")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class TurningPoints:
    x1: float
    x2: float
    f_at_x1: float
    f_at_x2: float
    degenerate: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class SwkbResult:
    name: str
    si_class: str
    n: int
    hbar: float
    E_n: float
    turning: TurningPoints
    integral: float
    residual: float
    converged: bool
    refinements_used: int
    error_estimate: float
    method: str

    @property
    def target(self) -> float:
        return self.n * math.pi * self.hbar

    def within(self, rel: float = 1e-8) -> bool:
        return self.converged and abs(self.residual) <= rel * max(self.target, self.hbar)

    def to_row(self) -> dict:
        return {
            "name": self.name, "class": self.si_class, "n": self.n,
            "E_n": self.E_n, "x1": self.turning.x1, "x2": self.turning.x2,
            "integral": self.integral, "residual": self.residual,
            "converged": self.converged,
        }

    def to_dict(self) -> dict:
        d = asdict(self)
        d["target"] = self.target
        return d


def level_energy(spec: SuperpotentialSpec, n: int) -> float:
    if spec.si_class.conventional:
        return _model_energy(SpectrumModel.from_spec(spec), n)
    if n < 0:
        raise ValidityError(f"level index must be non-negative, got {n}")
    if n == 0:
        # unbroken SUSY: exp(-int W / hbar) is normalisable, so E_0 = 0 exactly
        return 0.0
    # one cached solve serves all low levels
    return oracle.reference_energies(spec, max(n + 1, REFERENCE_LEVELS))[n]


def level_dE_dhbar(spec: SuperpotentialSpec, n: int) -> float:
    if spec.si_class.conventional:
        return _model_dE_dhbar(SpectrumModel.from_spec(spec), n)
    if n == 0:
        return 0.0
    step = ENERGY_FD_STEP * spec.hbar
    up = level_energy(spec.replace(hbar=spec.hbar + step), n)
    down = level_energy(spec.replace(hbar=spec.hbar - step), n)
    return (up - down) / (2.0 * step)


def _root_ok(resid: float, x: float, slope: float, tol: float) -> bool:
    # a residual at the floating-point resolution of x is not a bracketing failure
    return abs(resid) <= max(tol, 16.0 * math.ulp(x) * abs(slope))


def find_turning_points(spec: SuperpotentialSpec, E: float,
                        config: QuadratureConfig | None = None) -> TurningPoints:
    """Roots of ``W = -sqrt(E)`` (left of W's zero) and ``W = +sqrt(E)`` (right)."""
    config = config or QuadratureConfig()
    if E < 0:
        raise ValidityError(f"energy must be non-negative, got {E}")
    x0 = zero_of_W(spec)
    if E == 0:
        w0 = eval_W(spec, x0)
        return TurningPoints(x0, x0, w0, w0)
    se = math.sqrt(E)
    dom = spec.domain

    def lower(x):
        return eval_W(spec, x) + se

    def upper(x):
        return eval_W(spec, x) - se

    lo, hi = expand_bracket(lower, x0, -1, dom.left, edge_open=dom.left_open)
    x1 = solve_bracketed(lower, lo, hi)
    lo, hi = expand_bracket(upper, x0, +1, dom.right, edge_open=dom.right_open)
    x2 = solve_bracketed(upper, lo, hi)
    r1, r2 = lower(x1), upper(x2)
    s1, s2 = eval_W_prime(spec, x1), eval_W_prime(spec, x2)
    for x, r, s in ((x1, r1, s1), (x2, r2, s2)):
        if not _root_ok(r, x, s, config.root_tol):
            raise BracketError(f"turning point at x={x:.17g} has residual {r:.3e}")
    return TurningPoints(x1, x2, r1, r2, degenerate=bool(s1 <= 0 or s2 <= 0))


def _radicand(spec, se, x, E, tp: TurningPoints | None = None, d_left=None, d_right=None):
    """``(sqrt(E) - W)(sqrt(E) + W)``, negative rounding noise clipped to zero.

    With the turning points and exact endpoint distances supplied, the factor
    that vanishes at a turning point is rebuilt as
    ``W(x) - W(x1) ~ d_left * W'(x1 + d_left/2)`` very close to it, where the
    direct difference has lost most of its digits.
    """
    w = eval_W(spec, x)
    lower = se + w
    upper = se - w
    if tp is not None:
        span = d_left + d_right
        near_l = d_left < NEAR_ENDPOINT * span
        near_r = d_right < NEAR_ENDPOINT * span
        if np.any(near_l):
            dl = d_left[near_l]
            lower[near_l] = dl * eval_W_prime(spec, tp.x1 + 0.5 * dl) + tp.f_at_x1
        if np.any(near_r):
            dr = d_right[near_r]
            upper[near_r] = dr * eval_W_prime(spec, tp.x2 - 0.5 * dr) - tp.f_at_x2
    rad = upper * lower
    floor = RADICAND_ROUNDING * max(1.0, E)
    if np.any(rad < -floor):
        worst = float(np.min(rad))
        raise QuadratureError(f"{spec.name}: negative radicand {worst:.3e} inside the turning points")
    return np.maximum(rad, 0.0)


def _integrate(method, f, x1, x2, config, scale) -> QuadratureOutcome:
    rule = sine_gauss if method == "sine_substitution_gauss" else tanh_sinh
    return rule(f, x1, x2, base_nodes=config.base_nodes,
                max_refinements=config.max_refinements, rel_tol=config.rel_tol, scale=scale)


def swkb_integral(spec: SuperpotentialSpec, n: int, config: QuadratureConfig | None = None,
                  *, energy: float | None = None) -> SwkbResult:
    """Evaluate ``I(a, n, hbar)`` and its residual against ``n*pi*hbar``."""
    config = config or QuadratureConfig()
    E = level_energy(spec, n) if energy is None else float(energy)
    tp = find_turning_points(spec, E, config)
    common = dict(name=spec.name, si_class=spec.si_class.value, n=n, hbar=spec.hbar,
                  E_n=E, turning=tp, method=config.method)
    if tp.x1 == tp.x2:
        return SwkbResult(integral=0.0, residual=0.0 - n * math.pi * spec.hbar, converged=True,
                          refinements_used=0, error_estimate=0.0, **common)
    se = math.sqrt(E)

    def f(x, dl, dr):
        return np.sqrt(_radicand(spec, se, x, E))

    out = _integrate(config.method, f, tp.x1, tp.x2, config, spec.hbar)
    return SwkbResult(integral=out.value, residual=out.value - n * math.pi * spec.hbar,
                      converged=out.converged, refinements_used=out.refinements_used,
                      error_estimate=out.error_estimate, **common)


def dI_dhbar(spec: SuperpotentialSpec, n: int, config: QuadratureConfig | None = None,
             mode: str = "finite_difference") -> float:
    """dI/dhbar either by central differences of I (``mode="finite_difference"``)
    or from the reduced derivative formula ``(1/2) dE/dhbar * int dx / sqrt(E - W^2)``
    (``mode="reduced"``), which holds when W does not depend on hbar."""
    config = config or QuadratureConfig()
    if n == 0:
        return 0.0
    if mode == "finite_difference":
        step = 1e-4 * spec.hbar
        up = swkb_integral(spec.replace(hbar=spec.hbar + step), n, config).integral
        down = swkb_integral(spec.replace(hbar=spec.hbar - step), n, config).integral
        return (up - down) / (2.0 * step)
    if mode != "reduced":
        raise ValueError(f"unknown mode {mode!r}")
    E = level_energy(spec, n)
    dE = level_dE_dhbar(spec, n)
    tp = find_turning_points(spec, E, config)
    se = math.sqrt(E)

    def f(x, dl, dr):
        rad = _radicand(spec, se, x, E, tp, dl, dr)
        out = np.zeros_like(rad)
        pos = rad > 0
        out[pos] = 1.0 / np.sqrt(rad[pos])
        return out

    tconf = QuadratureConfig("tanh_sinh", config.base_nodes, config.max_refinements,
                             config.rel_tol, config.root_tol)
    out = _integrate("tanh_sinh", f, tp.x1, tp.x2, tconf, 1.0)
    return 0.5 * dE * out.value


def _allowed_edge(spec, func, start, direction):
    dom = spec.domain
    edge = dom.right if direction > 0 else dom.left
    edge_open = dom.right_open if direction > 0 else dom.left_open
    try:
        lo, hi = expand_bracket(func, start, direction, edge, edge_open=edge_open)
    except BracketError:
        if math.isfinite(edge):
            return edge
        raise BracketError(f"{spec.name}: classically allowed region is unbounded") from None
    return solve_bracketed(func, lo, hi)


def conventional_wkb_integral(spec: SuperpotentialSpec, n: int,
                              config: QuadratureConfig | None = None, *,
                              energy: float | None = None) -> float:
    """Lowest-order WKB action ``int sqrt(E_n - V_-) dx`` over the allowed region.

    A finite domain endpoint where ``V_-`` stays below ``E_n`` (an attractive
    singularity) closes the region.
    """
    config = config or QuadratureConfig()
    E = level_energy(spec, n) if energy is None else float(energy)

    def g(x):
        # walking into an attractive singularity overflows harmlessly
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            return eval_V(spec, x, sign="minus") - E

    start = zero_of_W(spec)
    if g(start) >= 0:
        lo = max(spec.domain.left, start - 50.0)
        hi = min(spec.domain.right, start + 50.0)
        xs = np.linspace(lo, hi, 4003)[1:-1]
        vals = eval_V(spec, xs, sign="minus") - E
        if not np.any(vals < 0):
            raise BracketError(f"{spec.name}: E={E:g} lies below the minimum of V_-")
        start = float(xs[int(np.argmin(vals))])
    xl = _allowed_edge(spec, g, start, -1)
    xr = _allowed_edge(spec, g, start, +1)

    def f(x, dl, dr):
        rad = E - eval_V(spec, x, sign="minus")
        return np.sqrt(np.maximum(rad, 0.0))

    out = tanh_sinh(f, xl, xr, base_nodes=config.base_nodes,
                    max_refinements=config.max_refinements, rel_tol=config.rel_tol,
                    scale=spec.hbar)
    return out.value


def integrand_samples(spec: SuperpotentialSpec, n: int, count: int = 201,
                      config: QuadratureConfig | None = None) -> list[tuple[float, float]]:
    """``(x, sqrt(E_n - W^2))`` on a uniform grid between the turning points."""
    E = level_energy(spec, n)
    tp = find_turning_points(spec, E, config)
    if tp.x1 == tp.x2:
        return [(tp.x1, 0.0)]
    xs = np.linspace(tp.x1, tp.x2, count)
    inner = xs[1:-1]
    w = eval_W(spec, inner)
    vals = np.sqrt(np.maximum(E - w * w, 0.0))
    return [(tp.x1, 0.0)] + [(float(x), float(v)) for x, v in zip(inner, vals)] + [(tp.x2, 0.0)]

