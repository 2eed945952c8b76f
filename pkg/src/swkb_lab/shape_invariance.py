"""Pointwise checks of additive shape invariance and its two PDE reductions.

All a-derivatives come from the class form; nothing here is finite-differenced.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import spectrum as spec_mod
from .superpotentials import (
    SIClass,
    SuperpotentialSpec,
    eval_dW_da,
    eval_W,
    eval_W_prime,
    get_entry,
)

__all__ = [
    "ResidualReport",
    "standard_grid",
    "residual_sic",
    "residual_sic_from_pde1",
    "residual_pde1",
    "residual_pde2",
    "classify",
    "CONSTANCY_RTOL",
]

CONSTANCY_RTOL = 1e-8
ENDPOINT_MARGIN = 1e-3


@dataclass(frozen=True)
class ResidualReport:
    max_abs_residual: float
    rms_residual: float
    sample_count: int
    worst_point: tuple[float, float]

    @classmethod
    def from_samples(cls, xs, as_, res) -> "ResidualReport":
        res = np.abs(np.asarray(res, dtype=float))
        i = int(np.argmax(res))
        return cls(
            max_abs_residual=float(res[i]),
            rms_residual=float(np.sqrt(np.mean(res * res))),
            sample_count=int(res.size),
            worst_point=(float(xs[i]), float(as_[i])),
        )

    def to_dict(self) -> dict:
        d = asdict(self)
        d["worst_point"] = {"x": self.worst_point[0], "a": self.worst_point[1]}
        return d


def standard_grid(spec: SuperpotentialSpec, nx: int = 20, na: int = 10,
                  x_range=None, a_range=None) -> list[tuple[float, float]]:
    """Tensor grid over the entry's documented window, clear of open endpoints."""
    if x_range is None or a_range is None:
        entry = get_entry(spec.name)
        x_range = entry.si_window if x_range is None else x_range
        a_range = entry.si_a_range if a_range is None else a_range
    lo, hi = map(float, x_range)
    dom = spec.domain
    if lo < dom.left or hi > dom.right:
        raise ValueError(f"x range {tuple(x_range)} extends outside {dom.describe()}")
    if math.isfinite(dom.left) and dom.left_open:
        lo = max(lo, dom.left + ENDPOINT_MARGIN)
    if math.isfinite(dom.right) and dom.right_open:
        hi = min(hi, dom.right - ENDPOINT_MARGIN)
    if not (lo < hi) or not dom.contains(lo) or not dom.contains(hi):
        raise ValueError(f"x range {x_range} does not fit inside {dom.describe()}")
    if nx < 1 or na < 1:
        raise ValueError("grid needs at least one point per axis")
    xs = np.linspace(lo, hi, nx)
    as_ = np.linspace(float(a_range[0]), float(a_range[1]), na)
    return [(float(x), float(a)) for a in as_ for x in xs]


def _split(grid):
    arr = np.asarray(grid, dtype=float).reshape(-1, 2)
    return arr[:, 0], arr[:, 1]


def _g_model(spec: SuperpotentialSpec):
    return spec_mod.SpectrumModel.from_spec(spec, use_reference=True, n_max=0)


def residual_sic(spec: SuperpotentialSpec, grid) -> ResidualReport:
    """``W^2 + hW' + g`` at a minus ``W^2 - hW' + g`` at a + hbar."""
    xs, as_ = _split(grid)
    model = _g_model(spec)
    h = spec.hbar
    res = np.empty_like(xs)
    for i, (x, a) in enumerate(zip(xs, as_)):
        w0, d0 = eval_W(spec, x, a), eval_W_prime(spec, x, a)
        w1, d1 = eval_W(spec, x, a + h), eval_W_prime(spec, x, a + h)
        lhs = w0 * w0 + h * d0 + spec_mod.g_of_a(model, a)
        rhs = w1 * w1 - h * d1 + spec_mod.g_of_a(model, a + h)
        res[i] = lhs - rhs
    return ResidualReport.from_samples(xs, as_, res)


def _pde1_pointwise(spec, model, x, a):
    w = eval_W(spec, x, a)
    return w * eval_dW_da(spec, x, a) - eval_W_prime(spec, x, a) + 0.5 * spec_mod.dg_da(model, a)


def residual_pde1(spec: SuperpotentialSpec, grid) -> ResidualReport:
    """``W dW/da - dW/dx + g'(a)/2``."""
    xs, as_ = _split(grid)
    model = _g_model(spec)
    res = np.array([_pde1_pointwise(spec, model, x, a) for x, a in zip(xs, as_)])
    return ResidualReport.from_samples(xs, as_, res)


def residual_pde2(spec: SuperpotentialSpec, grid) -> ResidualReport:
    """Mixed derivative d^3 W / da^2 dx, from c''(a) f1'(x)."""
    xs, as_ = _split(grid)
    sh = spec.shape
    res = np.zeros_like(xs)
    if sh.df1 is not None:
        for i, (x, a) in enumerate(zip(xs, as_)):
            spec.domain.check(x)
            xe = -x if spec.mirrored else x
            res[i] = sh.d2coef(a, spec) * sh.df1(np.asarray(xe), spec)
    else:
        spec.domain.check(xs)
    return ResidualReport.from_samples(xs, as_, res)


def residual_sic_from_pde1(spec: SuperpotentialSpec, grid, nodes: int = 32) -> ResidualReport:
    """Shape-invariance residual rebuilt by integrating the PDE1 residual in a.

    With ``R7 = W W_a - W' + g'/2`` one has
    ``R5(x, a) = -int_a^{a+h} (2 R7 + 2 W') da' + h (W'(a) + W'(a+h))``.
    """
    xs, as_ = _split(grid)
    model = _g_model(spec)
    h = spec.hbar
    t, wts = np.polynomial.legendre.leggauss(nodes)
    res = np.empty_like(xs)
    for i, (x, a) in enumerate(zip(xs, as_)):
        pts = a + 0.5 * h * (t + 1.0)
        integrand = [2.0 * _pde1_pointwise(spec, model, x, p) + 2.0 * eval_W_prime(spec, x, p)
                     for p in pts]
        integral = 0.5 * h * float(np.dot(wts, integrand))
        res[i] = -integral + h * (eval_W_prime(spec, x, a) + eval_W_prime(spec, x, a + h))
    return ResidualReport.from_samples(xs, as_, res)


def _constant(values) -> tuple[bool, float]:
    v = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(v)):
        return False, math.nan
    mean = float(np.mean(v))
    return float(np.max(v) - np.min(v)) <= CONSTANCY_RTOL * (1.0 + abs(mean)), mean


def _snap(v: float) -> float:
    return 0.0 if abs(v) <= CONSTANCY_RTOL else v


def _sample_points(spec: SuperpotentialSpec, window, count: int) -> np.ndarray:
    if window is None:
        try:
            window = get_entry(spec.name).si_window
        except LookupError:
            window = (-5.0, 5.0)
    grid = standard_grid(spec, nx=count, na=1, x_range=window, a_range=(spec.a, spec.a))
    return np.array([p[0] for p in grid])


def classify(spec: SuperpotentialSpec, window=None, samples: int = 64) -> tuple[SIClass, dict]:
    """Identify the class from the f1/f2 decomposition and fit its constants.

    The decomposition is also evaluated at a second hbar; any change marks the
    superpotential as hbar-dependent and hence non-conventional.
    """
    sh = spec.shape
    # raw components are sampled in unmirrored coordinates
    base = spec.replace(mirrored=False, domain=spec.domain.mirrored()) if spec.mirrored else spec
    xs = _sample_points(base, window, max(samples, 50))
    non = (SIClass.NonConventional, {})

    other = spec.replace(hbar=2.0 * spec.hbar)
    for f in (sh.f1, sh.f2):
        if f is not None and not np.allclose(f(xs, spec), f(xs, other), rtol=0, atol=0):
            return non
    if float(sh.d2coef(spec.a, spec)) != 0.0:
        return non

    # mirroring maps f -> -f(-x) and leaves f'(-x) unchanged
    sign = -1.0 if spec.mirrored else 1.0

    def fx(f):
        return None if f is None else sign * f(xs, spec)

    f1, df1 = fx(sh.f1), (None if sh.df1 is None else sh.df1(xs, spec))
    f2, df2 = fx(sh.f2), (None if sh.df2 is None else sh.df2(xs, spec))

    if f1 is None and f2 is not None:
        ok, slope = _constant(df2)
        if ok:
            eps = _snap(-slope)
            return SIClass.IA, {"alpha": 0.0, "epsilon": eps, "omega": -2.0 * eps}
        A = np.vstack([f2, -np.ones_like(f2)]).T
        (alpha, _), *_ = np.linalg.lstsq(A, df2, rcond=None)
        ok, eps = _constant(alpha * f2 - df2)
        if ok and alpha != 0:
            return SIClass.IB, {"alpha": float(alpha), "epsilon": _snap(eps)}
        return non

    if f1 is not None and f2 is None:
        ok, lam = _constant(f1 * f1 - df1)
        if not ok:
            return non
        lam = _snap(lam)
        b = sign * float(sh.u(spec.a, spec)) * spec.a
        return (SIClass.IIA if lam == 0.0 else SIClass.IIB), {"lambda": lam, "B": b}

    if f1 is not None and f2 is not None:
        ok1, lam = _constant(f1 * f1 - df1)
        ok2, eps = _constant(f1 * f2 - df2)
        if not (ok1 and ok2):
            return non
        lam, eps = _snap(lam), _snap(eps)
        if lam == 0.0:
            return SIClass.IIIa, {"lambda": 0.0, "epsilon": eps, "omega": -eps}
        okb, beta = _constant(f2 / np.sqrt(f1 * f1 - lam))
        if not okb:
            return non
        return SIClass.IIIb, {"lambda": lam, "epsilon": eps, "beta": beta}

    return non
