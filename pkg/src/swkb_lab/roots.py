"""Bracketing root search on a (possibly half-infinite) interval.

Brackets are grown geometrically from a starting point toward one side of the
domain. Near a finite endpoint the step is replaced by repeated halving of the
remaining gap so that the open endpoint itself is never evaluated.
"""

from __future__ import annotations

import math
from typing import Callable

from scipy.optimize import brentq

from .errors import BracketError

MAX_STEPS = 2000
MAX_DOUBLINGS = 200


def _sign(v: float) -> int:
    if v > 0:
        return 1
    if v < 0:
        return -1
    return 0


def expand_bracket(
    func: Callable[[float], float],
    start: float,
    direction: int,
    edge: float,
    *,
    edge_open: bool = True,
    width: float = 0.1,
    factor: float = 2.0,
) -> tuple[float, float]:
    """Walk from ``start`` toward ``edge`` until ``func`` changes sign.

    Returns an ordered pair ``(lo, hi)`` with a sign change (or an exact zero)
    between them.  ``edge`` may be infinite.
    """
    if direction not in (-1, 1):
        raise ValueError("direction must be +1 or -1")
    prev = float(start)
    s0 = _sign(func(prev))
    if s0 == 0:
        return prev, prev
    step = width
    doublings = 0
    for _ in range(MAX_STEPS):
        cand = prev + direction * step
        beyond = math.isfinite(edge) and (cand - edge) * direction >= 0
        if beyond:
            if not edge_open:
                cand = edge
            else:
                cand = prev + 0.5 * (edge - prev)
                if cand == prev:
                    break
        else:
            step *= factor
            doublings += 1
            if not math.isfinite(edge) and doublings > MAX_DOUBLINGS:
                break
        fc = func(cand)
        if not math.isnan(fc) and _sign(fc) != s0:
            return (prev, cand) if prev < cand else (cand, prev)
        if beyond and not edge_open:
            break
        prev = cand
    raise BracketError(
        f"no sign change found walking from x={start:g} toward {edge:g}"
    )


def solve_bracketed(func: Callable[[float], float], lo: float, hi: float) -> float:
    """Brent's method on a bracket, converged to a few ulps."""
    if lo == hi:
        return lo
    flo, fhi = func(lo), func(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    return brentq(func, lo, hi, xtol=1e-300, rtol=4.0 * 2.220446049250313e-16, maxiter=2000)
