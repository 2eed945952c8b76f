"""Direct finite-difference eigensolver for the partner Hamiltonians.

``H = -hbar^2 d^2/dx^2 + V_(-/+)`` is discretised with the three-point stencil
on a uniform grid with Dirichlet edges.  The grid is doubled until the
Richardson-extrapolated eigenvalues of successive pairs agree, and a second
solve on an enlarged box guards against truncation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import BoxTooSmall, NotConverged, ValidityError
from .spectrum import SpectrumModel, energy as model_energy
from .superpotentials import DomainInterval, SuperpotentialSpec, eval_V, get_entry

__all__ = [
    "OracleConfig",
    "OracleReport",
    "fd_eigenvalues",
    "solve_spectrum",
    "isospectrality_check",
    "reference_energies",
    "default_box",
]


@dataclass(frozen=True)
class OracleConfig:
    grid_points: int = 2000
    box: DomainInterval | None = None
    eigen_count: int = 4
    convergence_rel_tol: float = 1e-8
    max_refinements: int = 7
    check_box: bool = True

    def __post_init__(self):
        if self.grid_points < 500:
            raise ValueError("grid_points must be at least 500")
        if self.eigen_count < 1:
            raise ValueError("eigen_count must be at least 1")
        if not self.convergence_rel_tol > 0:
            raise ValueError("convergence_rel_tol must be positive")
        if self.max_refinements < 2:
            raise ValueError("max_refinements must be at least 2")
        if self.box is not None and not self.box.finite:
            raise ValueError("the oracle box must be finite")

    def to_dict(self) -> dict:
        return {
            "grid_points": self.grid_points,
            "box": None if self.box is None else [self.box.left, self.box.right],
            "eigen_count": self.eigen_count,
            "convergence_rel_tol": self.convergence_rel_tol,
            "max_refinements": self.max_refinements,
            "check_box": self.check_box,
        }


@dataclass
class OracleReport:
    name: str
    sign: str
    eigenvalues: list[float]
    algebraic: list[float] | None
    deviations: list[float] | None
    max_rel_deviation: float | None
    grid_points_used: int
    box: tuple[float, float]
    converged: bool = True
    box_shift: float | None = None
    edge_amplitude: float | None = None
    finest_raw: list[float] = field(default_factory=list)

    def rows(self) -> list[dict]:
        out = []
        for n, e in enumerate(self.eigenvalues):
            alg = None if self.algebraic is None else self.algebraic[n]
            dev = None if self.deviations is None else self.deviations[n]
            out.append({"name": self.name, "sign": self.sign, "n": n,
                        "algebraic": alg, "numerical": e, "rel_deviation": dev})
        return out

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "sign": self.sign,
            "eigenvalues": self.eigenvalues,
            "algebraic": self.algebraic,
            "deviations": self.deviations,
            "max_rel_deviation": self.max_rel_deviation,
            "grid_points_used": self.grid_points_used,
            "box": list(self.box),
            "converged": self.converged,
            "box_shift": self.box_shift,
            "edge_amplitude": self.edge_amplitude,
            "finest_raw": self.finest_raw,
        }


def default_box(spec: SuperpotentialSpec) -> DomainInterval:
    lo, hi = get_entry(spec.name).oracle_box
    if spec.mirrored:
        lo, hi = -hi, -lo
    return DomainInterval(lo, hi, False, False)


def _check_box(spec: SuperpotentialSpec, box: DomainInterval) -> None:
    dom = spec.domain
    if box.left < dom.left or box.right > dom.right:
        raise ValidityError(f"box {box.describe()} extends outside the domain {dom.describe()}")


def fd_eigenvalues(spec: SuperpotentialSpec, sign: str, box: DomainInterval, intervals: int,
                   count: int, vectors: bool = False):
    """Lowest ``count`` eigenvalues of the three-point discretisation.

    Nodes sit strictly inside ``box``; the edges carry the Dirichlet condition.
    """
    h = (box.right - box.left) / intervals
    x = box.left + h * np.arange(1, intervals)
    hb2 = spec.hbar ** 2 / (h * h)
    diag = 2.0 * hb2 + eval_V(spec, x, sign=sign)
    off = np.full(intervals - 2, -hb2)
    res = eigh_tridiagonal(diag, off, select="i", select_range=(0, count - 1),
                           eigvals_only=not vectors)
    return res


def _algebraic(spec: SuperpotentialSpec, sign: str, count: int) -> list[float] | None:
    if not spec.si_class.conventional:
        return None
    model = SpectrumModel.from_spec(spec)
    offset = 0 if sign == "minus" else 1
    try:
        return [model_energy(model, n + offset) for n in range(count)]
    except ValidityError as exc:
        raise ValidityError(
            f"{spec.name}: fewer than {count} bound states for H_{sign} ({exc})"
        ) from None


WALL_FACTOR = 1e4


def _wall_stop(spec, sign, edge, target, v_cap) -> float:
    """Walk from ``edge`` towards ``target``; stop where ``V`` first exceeds ``v_cap``.

    Pushing a Dirichlet edge deeper into a steep wall changes nothing physical
    but ruins the conditioning of the matrix (Morse: ``V ~ exp(-2x)``).
    """
    xs = np.linspace(edge, target, 513)[1:]
    v = eval_V(spec, xs, sign=sign)
    over = np.nonzero(~(v <= v_cap))[0]
    if over.size == 0:
        return float(target)
    return float(xs[over[0] - 1]) if over[0] > 0 else float(edge)


def _enlarged(spec: SuperpotentialSpec, sign: str, box: DomainInterval,
              top: float) -> DomainInterval:
    dom = spec.domain
    width = box.right - box.left
    free_left = box.left > dom.left
    free_right = box.right < dom.right
    if free_left and free_right:
        lo, hi = box.left - 0.5 * width, box.right + 0.5 * width
    else:
        lo = box.left - width if free_left else box.left
        hi = box.right + width if free_right else box.right
    lo = max(lo, dom.left)
    hi = min(hi, dom.right)
    v_cap = WALL_FACTOR * max(abs(top), spec.hbar)
    if free_left:
        lo = _wall_stop(spec, sign, box.left, lo, max(v_cap, float(eval_V(spec, box.left, sign=sign))))
    if free_right:
        hi = _wall_stop(spec, sign, box.right, hi, max(v_cap, float(eval_V(spec, box.right, sign=sign))))
    return DomainInterval(lo, hi, False, False)


def _rel(a: np.ndarray, b: np.ndarray, hbar: float) -> float:
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(a), hbar)))


ROUNDOFF_SAFETY = 64.0


def _roundoff_floor(spec: SuperpotentialSpec, box: DomainInterval, intervals: int,
                    eig: np.ndarray) -> float:
    # eigenvalues of the fine matrices carry an absolute error ~ eps * ||H||,
    # and ||H|| grows like 4 hbar^2 / h^2
    h = (box.right - box.left) / intervals
    norm = 4.0 * spec.hbar ** 2 / (h * h)
    scale = np.maximum(np.abs(eig), spec.hbar)
    return float(np.max(ROUNDOFF_SAFETY * np.finfo(float).eps * norm / scale))


def solve_spectrum(spec: SuperpotentialSpec, sign: str = "minus",
                   config: OracleConfig | None = None) -> OracleReport:
    config = config or OracleConfig()
    if sign not in ("minus", "plus"):
        raise ValueError(f"sign must be 'minus' or 'plus', got {sign!r}")
    box = config.box or default_box(spec)
    _check_box(spec, box)
    k = config.eigen_count
    algebraic = _algebraic(spec, sign, k)

    raw_prev = None
    rich_prev = None
    rich = None
    level1 = None
    converged = False
    n_used = config.grid_points
    for j in range(config.max_refinements + 1):
        n_used = config.grid_points * 2 ** j
        raw = fd_eigenvalues(spec, sign, box, n_used, k)
        if j == 1:
            level1 = (n_used, raw)
        if raw_prev is not None:
            rich = (4.0 * raw - raw_prev) / 3.0
            tol = max(config.convergence_rel_tol, _roundoff_floor(spec, box, n_used, rich))
            if rich_prev is not None and _rel(rich, rich_prev, spec.hbar) <= tol:
                converged = True
                break
            rich_prev = rich
        raw_prev = raw

    eig = rich
    if algebraic is not None:
        alg = np.asarray(algebraic)
        devs = (np.abs(eig - alg) / np.maximum(np.abs(alg), spec.hbar)).tolist()
        max_dev = float(max(devs))
    else:
        devs, max_dev = None, None

    _, vecs = fd_eigenvalues(spec, sign, box, config.grid_points, k, vectors=True)
    peak = np.max(np.abs(vecs), axis=0)
    # natural domain endpoints are legitimate zeros; only free edges are measured
    edge = np.zeros(k)
    if box.left > spec.domain.left:
        edge = np.maximum(edge, np.abs(vecs[0]) / peak)
    if box.right < spec.domain.right:
        edge = np.maximum(edge, np.abs(vecs[-1]) / peak)

    report = OracleReport(
        name=spec.name, sign=sign, eigenvalues=[float(v) for v in eig],
        algebraic=algebraic, deviations=devs, max_rel_deviation=max_dev,
        grid_points_used=n_used, box=(box.left, box.right), converged=converged,
        edge_amplitude=float(np.max(edge)), finest_raw=[float(v) for v in raw],
    )
    if not converged:
        raise NotConverged(f"{spec.name}: eigenvalues not converged after "
                           f"{config.max_refinements} grid doublings", report)

    if config.check_box:
        big = _enlarged(spec, sign, box, float(np.max(eig)))
        if (big.left, big.right) != (box.left, box.right):
            n1, e1 = level1
            h1 = (box.right - box.left) / n1
            nb = int(round((big.right - big.left) / h1))
            big = DomainInterval(big.left, big.left + nb * h1, False, False)
            if big.right > spec.domain.right:
                big = DomainInterval(big.left, spec.domain.right, False, False)
            e_big = fd_eigenvalues(spec, sign, big, nb, k)
            report.box_shift = _rel(e_big, e1, spec.hbar)
            limit = max(config.convergence_rel_tol, _roundoff_floor(spec, box, n1, e1))
            if report.box_shift > limit:
                raise BoxTooSmall(
                    f"{spec.name}: enlarging the box to {big.describe()} moved an eigenvalue by "
                    f"{report.box_shift:.3e} (relative)", report)
        else:
            report.box_shift = 0.0
    return report


def isospectrality_check(spec: SuperpotentialSpec, config: OracleConfig | None = None) -> float:
    """``max_n |E^-_{n+1} - E^+_n| / max(E^-_{n+1}, hbar)`` from two eigensolves."""
    config = config or OracleConfig()
    k = config.eigen_count
    minus = solve_spectrum(spec, "minus", _with_count(config, k + 1))
    plus = solve_spectrum(spec, "plus", _with_count(config, k))
    em = np.asarray(minus.eigenvalues[1:])
    ep = np.asarray(plus.eigenvalues)
    return float(np.max(np.abs(em - ep) / np.maximum(em, spec.hbar)))


def _with_count(config: OracleConfig, k: int) -> OracleConfig:
    return OracleConfig(config.grid_points, config.box, k, config.convergence_rel_tol,
                        config.max_refinements, config.check_box)


REFERENCE_CONFIG = OracleConfig(grid_points=2000, convergence_rel_tol=1e-11, max_refinements=7)


@lru_cache(maxsize=256)
def reference_energies(spec: SuperpotentialSpec, count: int) -> tuple[float, ...]:
    """High-accuracy eigenvalues of H_- used as level energies for non-conventional specs."""
    cfg = _with_count(REFERENCE_CONFIG, count)
    return tuple(solve_spectrum(spec, "minus", cfg).eigenvalues)
