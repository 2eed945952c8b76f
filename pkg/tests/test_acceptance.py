"""Acceptance suite: one check per headline criterion, each at its stated tolerance.

Every check returns ``(passed, detail)``.  Under pytest each becomes a test and
the outcome is also collected into ``RESULTS`` so that ``conftest.py`` can
print one PASS/FAIL line per criterion at the end of the session.  Running the
file directly (``python3 tests/test_acceptance.py``) prints the same lines.
"""

from __future__ import annotations

import math
import time

import numpy as np
import pytest

from swkb_lab.errors import NotConverged
from swkb_lab.oracle import OracleConfig, isospectrality_check, solve_spectrum
from swkb_lab.shape_invariance import (
    classify,
    residual_pde1,
    residual_pde2,
    residual_sic,
    standard_grid,
)
from swkb_lab.spectrum import SpectrumModel, energy
from swkb_lab.superpotentials import SIClass, conventional_names, make_spec
from swkb_lab.swkb import QuadratureConfig, dI_dhbar, find_turning_points, swkb_integral

CRITERIA: list[tuple[str, callable]] = []
RESULTS: dict[str, tuple[bool, str]] = {}


def criterion(title):
    def register(func):
        CRITERIA.append((title, func))
        return func
    return register


def _levels(spec, cap):
    return range(min(SpectrumModel.from_spec(spec).n_max, cap) + 1)


@criterion("SWKB exactness, six conventional entries, n <= 10, tol 1e-8*max(n*pi*hbar, hbar)")
def exactness():
    start = time.perf_counter()
    worst, where = 0.0, None
    for name in conventional_names():
        s = make_spec(name)
        for n in _levels(s, 10):
            r = swkb_integral(s, n)
            scaled = abs(r.residual) / max(n * math.pi * s.hbar, s.hbar)
            if not r.converged:
                return False, f"{name} n={n} did not converge"
            if scaled >= worst:
                worst, where = scaled, (name, n)
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-8 and elapsed < 10.0
    return ok, f"worst scaled residual {worst:.2e} at {where}; {elapsed:.2f} s (limit 10 s)"


@criterion("n = 0 gives exactly zero via coincident turning points")
def ground_zero():
    bad = []
    for name in conventional_names():
        s = make_spec(name)
        r = swkb_integral(s, 0)
        tp = find_turning_points(s, 0.0)
        if not (r.integral == 0.0 and r.residual == 0.0 and tp.x1 == tp.x2):
            bad.append(name)
    return not bad, "all six entries exact" if not bad else f"nonzero for {bad}"


@criterion("dI/dhbar = n*pi in both modes (1e-4) and modes agree (1e-4), n <= 5")
def derivative():
    worst_target, worst_pair = 0.0, 0.0
    for name in conventional_names():
        s = make_spec(name)
        for n in _levels(s, 5):
            fd = dI_dhbar(s, n, mode="finite_difference")
            red = dI_dhbar(s, n, mode="reduced")
            worst_target = max(worst_target, abs(fd - n * math.pi), abs(red - n * math.pi))
            worst_pair = max(worst_pair, abs(fd - red))
    ok = worst_target <= 1e-4 and worst_pair <= 1e-4
    return ok, f"max |dI/dhbar - n*pi| {worst_target:.2e}; max mode gap {worst_pair:.2e}"


@criterion("I/hbar constant to 1e-8 over hbar in {0.5, 1, 2} (harmonic, coulomb)")
def hbar_linearity():
    worst = 0.0
    for name in ("harmonic", "coulomb"):
        for n in range(1, 6):
            ratios = np.array([swkb_integral(make_spec(name, hbar=h), n).integral / h
                               for h in (0.5, 1.0, 2.0)])
            worst = max(worst, float(np.ptp(ratios) / np.max(np.abs(ratios))))
    return worst <= 1e-8, f"max relative spread of I/hbar {worst:.2e} (n = 1..5)"


@criterion("shape-invariance residuals <= 1e-8 on the standard grid; classifier to 1e-8")
def shape_invariance():
    worst_res, worst_const, mismatched = 0.0, 0.0, []
    for name in conventional_names():
        s = make_spec(name)
        grid = standard_grid(s)
        for check in (residual_sic, residual_pde1, residual_pde2):
            worst_res = max(worst_res, check(s, grid).max_abs_residual)
        cls, consts = classify(s)
        if cls is not s.si_class:
            mismatched.append(name)
        for key, value in s.constants_dict.items():
            worst_const = max(worst_const, abs(consts[key] - value))
    ok = worst_res <= 1e-8 and worst_const <= 1e-8 and not mismatched
    detail = f"max residual {worst_res:.2e}; max constant error {worst_const:.2e}"
    return ok, detail + (f"; class mismatch {mismatched}" if mismatched else "")


def _class_formula(cls, c, a, h, n):
    an = a + n * h
    if cls is SIClass.IA:
        return n * c["omega"] * h
    if cls is SIClass.IB:
        return c["alpha"] ** 2 * (a * a - an * an) - 2 * c["epsilon"] * n * h
    if cls in (SIClass.IIA, SIClass.IIB):
        return c["B"] ** 2 * (1 / (a * a) - 1 / (an * an)) + c["lambda"] * (a * a - an * an)
    if cls is SIClass.IIIa:
        return -2 * c["epsilon"] * n * h
    return c["lambda"] * (a * a - an * an)


@criterion("closed-form energies for IA/IB/II/IIIa/IIIb to 1e-12 relative")
def closed_forms():
    rng = np.random.default_rng(7)
    cases = [(SIClass.IA, {"omega": 2.0}, 0.0, 1.0), (SIClass.IIIb, {"lambda": -1.0}, 1.0, 1.0)]
    for _ in range(40):
        h = rng.uniform(0.2, 2.0)
        cases += [
            (SIClass.IA, {"omega": rng.uniform(0.1, 5)}, rng.uniform(-3, 3), h),
            (SIClass.IB, {"alpha": rng.uniform(0.3, 2), "epsilon": rng.uniform(-1, 1)},
             -rng.uniform(12, 20), h),
            (SIClass.IIA, {"B": rng.uniform(0.3, 5), "lambda": 0.0}, rng.uniform(0.3, 3), h),
            (SIClass.IIB, {"B": rng.uniform(20, 40), "lambda": 1.0}, rng.uniform(0.3, 1), h),
            (SIClass.IIIa, {"epsilon": -rng.uniform(0.1, 3)}, rng.uniform(0.1, 3), h),
            (SIClass.IIIb, {"lambda": -rng.uniform(0.1, 3)}, rng.uniform(0.1, 3), h),
        ]
    worst = 0.0
    for cls, c, a, h in cases:
        model = SpectrumModel(cls, c, a, h)
        for n in range(min(model.n_max, 3) + 1):
            ref = _class_formula(cls, c, a, h, n)
            worst = max(worst, abs(energy(model, n) - ref) / max(abs(ref), 1e-300))
    examples = {
        ("morse", 1): 5.0,
        ("scarf_I", 2): 8.0,
        ("harmonic", 3): 6.0,
        ("coulomb", 1): 0.75,
    }
    for (name, n), want in examples.items():
        kw = {"a": 1.0, "beta": 0.5} if name == "scarf_I" else {}
        got = energy(SpectrumModel.from_spec(make_spec(name, **kw)), n)
        worst = max(worst, abs(got - want) / want)
    return worst <= 1e-12, f"max relative error {worst:.2e} over {len(cases)} models + examples"


ORACLE_RUNS = [
    ("harmonic", 4, 1e-5), ("coulomb", 4, 1e-5), ("radial_oscillator", 4, 1e-5),
    ("scarf_I", 4, 1e-5),
    # morse holds three bound states at its defaults; eckart_like holds four
    ("morse", 3, 1e-4), ("eckart_like", 4, 1e-4),
]


@criterion("oracle agrees with the algebraic spectrum (1e-5 / 1e-4), |E0| <= 1e-6, < 60 s")
def oracle_agreement():
    start = time.perf_counter()
    parts, ok = [], True
    for name, k, tol in ORACLE_RUNS:
        r = solve_spectrum(make_spec(name), "minus", OracleConfig(eigen_count=k))
        good = r.max_rel_deviation <= tol and abs(r.eigenvalues[0]) <= 1e-6
        ok &= good
        parts.append(f"{name} {r.max_rel_deviation:.1e}")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 60.0
    return ok, "; ".join(parts) + f"; {elapsed:.1f} s (limit 60 s)"


@criterion("partner isospectrality gap <= 1e-5 (harmonic, scarf_I)")
def isospectrality():
    gaps = {name: isospectrality_check(make_spec(name), OracleConfig(eigen_count=4))
            for name in ("harmonic", "scarf_I")}
    return max(gaps.values()) <= 1e-5, "; ".join(f"{k} {v:.1e}" for k, v in gaps.items())


@criterion("negative control: amplitude 0.1 breaks exactness (>1e-3), amplitude 0 restores (<=1e-8)")
def negative_control():
    broken = max(abs(swkb_integral(make_spec("perturbed_harmonic"), n).residual)
                 for n in range(1, 6))
    restored = max(abs(swkb_integral(make_spec("perturbed_harmonic", amplitude=0.0), n).residual)
                   for n in range(0, 6))
    ok = broken > 1e-3 and restored <= 1e-8
    return ok, f"max |residual| at 0.1: {broken:.3e}; at 0: {restored:.2e}"


@criterion("sine-substituted Gauss and tanh-sinh agree to 1e-9 relative")
def method_agreement():
    tanh = QuadratureConfig(method="tanh_sinh")
    worst = 0.0
    for name in conventional_names():
        s = make_spec(name)
        for n in _levels(s, 10):
            a = swkb_integral(s, n).integral
            b = swkb_integral(s, n, tanh).integral
            worst = max(worst, abs(a - b) / max(abs(a), s.hbar))
    return worst <= 1e-9, f"max relative disagreement {worst:.2e}"


def critical_scarf_note() -> str:
    """Informational only: the oracle at scarf_I a = 1, beta = 0.5.

    There ``V_-`` behaves like ``-1/(4u^2)`` at the left wall, the grid
    converges logarithmically and the eigensolve cannot meet its tolerance.
    The catalog default therefore uses a = 3, beta = 1.
    """
    s = make_spec("scarf_I", a=1.0, beta=0.5)
    try:
        r = solve_spectrum(s, "minus", OracleConfig(eigen_count=4))
        state = "converged"
    except NotConverged as exc:
        r, state = exc.report, "not converged"
    return (f"scarf_I at a=1, beta=0.5 (not gating): {state}, E0 = {r.eigenvalues[0]:.3e}, "
            f"max rel deviation {r.max_rel_deviation:.2e}")


NOTES: list[str] = []


@pytest.mark.parametrize("title, check", CRITERIA, ids=[f.__name__ for _, f in CRITERIA])
def test_criterion(title, check):
    ok, detail = check()
    RESULTS[title] = (ok, detail)
    assert ok, detail


def test_critical_scarf_note():
    NOTES.append(critical_scarf_note())


def format_line(title: str, ok: bool, detail: str) -> str:
    return f"{'PASS' if ok else 'FAIL'}  {title} -- {detail}"


def report_lines() -> list[str]:
    return [format_line(title, *RESULTS[title]) if title in RESULTS
            else f"SKIP  {title} -- not run" for title, _ in CRITERIA] + [
        f"INFO  {note}" for note in NOTES]


if __name__ == "__main__":
    for title, check in CRITERIA:
        try:
            RESULTS[title] = check()
        except Exception as exc:  # report and keep going
            RESULTS[title] = (False, f"{type(exc).__name__}: {exc}")
        print(format_line(title, *RESULTS[title]), flush=True)
    print(f"INFO  {critical_scarf_note()}")
    raise SystemExit(0 if all(ok for ok, _ in RESULTS.values()) else 1)
