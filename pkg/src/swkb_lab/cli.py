"""Command-line front end: ``swkb-lab <command> ...``.

Exit codes are shared by every command: 0 when all checks pass, 1 when the
checks ran and at least one failed, 2 for invalid input or configuration.

Reports are CSV (tables) or JSON (full records).  Each report embeds a run
manifest; CSV carries it in ``#`` header lines so the body stays
byte-identical between runs.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from . import oracle as oracle_mod
from . import shape_invariance as si
from . import spectrum as spectrum_mod
from . import swkb
from .errors import (
    BoxTooSmall,
    BracketError,
    NotConverged,
    QuadratureError,
    SwkbLabError,
    ValidityError,
)
from .superpotentials import (
    DomainInterval,
    SuperpotentialSpec,
    catalog_document,
    catalog_entries,
    get_entry,
)

EXIT_OK, EXIT_FAIL, EXIT_INVALID = 0, 1, 2
THREADS_ENV = "SWKB_LAB_THREADS"
DEFAULT_TOLERANCE = 1e-8
GROUND_STATE_TOL = 1e-6
DEFAULT_MAX_LEVEL = 10


class UsageError(ValueError):
    """Invalid command-line input detected after argparse."""


# --- manifest and output -------------------------------------------------

@dataclass
class RunManifest:
    command: str
    argv: list[str]
    spec_overrides: dict
    config: dict
    timestamp: str = field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds"))
    tool_version: str = __version__

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "argv": list(self.argv),
            "spec_overrides": dict(self.spec_overrides),
            "config": self.config,
            "timestamp": self.timestamp,
            "tool_version": self.tool_version,
        }


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def render_csv(rows: list[dict], manifest: RunManifest | None = None) -> str:
    buf = io.StringIO()
    if manifest is not None:
        buf.write("# manifest: " + json.dumps(manifest.to_dict(), sort_keys=True) + "\n")
    if rows:
        cols = list(rows[0])
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([_fmt(r.get(c)) for c in cols])
    return buf.getvalue()


def render_json(payload: dict, manifest: RunManifest) -> str:
    doc = {"manifest": manifest.to_dict(), **payload}
    return json.dumps(doc, indent=2, sort_keys=True, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, tuple):
        return list(o)
    raise TypeError(f"cannot serialise {type(o).__name__}")


def _emit(args, rows: list[dict], payload: dict, manifest: RunManifest, summary: str) -> None:
    text = render_csv(rows, manifest) if args.format == "csv" else render_json(payload, manifest)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
        print(summary)
    else:
        sys.stdout.write(text)
        print(summary, file=sys.stderr)


# --- argument helpers ----------------------------------------------------

def parse_n_range(text: str) -> list[int]:
    """``"3"`` or ``"0..10"`` (inclusive)."""
    try:
        if ".." in text:
            lo, hi = (int(p) for p in text.split("..", 1))
        else:
            lo = hi = int(text)
    except ValueError:
        raise UsageError(f"bad level range {text!r}; expected N or A..B") from None
    if lo < 0 or hi < lo:
        raise UsageError(f"bad level range {text!r}")
    return list(range(lo, hi + 1))


def parse_overrides(pairs: list[str] | None) -> dict[str, float]:
    out = {}
    for p in pairs or []:
        key, sep, value = p.partition("=")
        if not sep or not key:
            raise UsageError(f"override {p!r} must look like key=value")
        try:
            out[key.strip()] = float(value)
        except ValueError:
            raise UsageError(f"override {p!r}: value is not a number") from None
    return out


def parse_floats(text: str, count: int | None = None) -> list[float]:
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None
    if count is not None and len(vals) != count:
        raise UsageError(f"expected {count} comma-separated numbers, got {text!r}")
    return vals


def thread_count() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw == "":
        return min(4, os.cpu_count() or 1)
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


def _pmap(func, items):
    # results come back in input order regardless of completion order
    items = list(items)
    workers = min(thread_count(), max(len(items), 1))
    if workers == 1:
        return [func(i) for i in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


def _load_config_file(args) -> dict:
    snap = getattr(args, "config_snapshot", None)
    if snap is not None:
        return dict(snap)
    if not getattr(args, "config", None):
        return {}
    try:
        doc = json.loads(Path(args.config).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {args.config}: {exc}") from None
    if not isinstance(doc, dict):
        raise UsageError("config file must hold a JSON object")
    return doc


def quadrature_config(args) -> swkb.QuadratureConfig:
    doc = _load_config_file(args)
    doc = doc.get("quadrature", doc)
    fields = {k: doc[k] for k in ("method", "base_nodes", "max_refinements", "rel_tol", "root_tol")
              if k in doc}
    if getattr(args, "method", None):
        fields["method"] = args.method
    try:
        return swkb.QuadratureConfig(**fields)
    except TypeError as exc:
        raise UsageError(str(exc)) from None


def oracle_config(args) -> oracle_mod.OracleConfig:
    doc = _load_config_file(args)
    doc = dict(doc.get("oracle", doc))
    if doc.get("box") is not None:
        lo, hi = doc["box"]
        doc["box"] = DomainInterval(float(lo), float(hi), False, False)
    keys = ("grid_points", "box", "eigen_count", "convergence_rel_tol", "max_refinements",
            "check_box")
    fields = {k: doc[k] for k in keys if k in doc}
    if args.eigen_count is not None:
        fields["eigen_count"] = args.eigen_count
    if args.grid_points is not None:
        fields["grid_points"] = args.grid_points
    if args.box is not None:
        lo, hi = args.box
        if not lo < hi:
            raise UsageError(f"box {args.box} must satisfy lo < hi")
        fields["box"] = DomainInterval(lo, hi, False, False)
    return oracle_mod.OracleConfig(**fields)


def build_spec(args) -> tuple[SuperpotentialSpec, dict]:
    overrides = parse_overrides(args.set)
    spec = get_entry(args.potential).build(overrides)
    return spec, overrides


# --- commands ------------------------------------------------------------

def cmd_catalog_list(args, argv) -> int:
    names = [args.name] if args.name else None
    doc = catalog_document(names)
    if args.json:
        sys.stdout.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        return EXIT_OK
    entries = catalog_entries() if names is None else [get_entry(n) for n in names]
    for e in entries:
        consts = ", ".join(f"{k}={_fmt(v)}" for k, v in sorted(e.constants.items()))
        print(f"{e.name:20s} {e.si_class.value:16s} W = {e.formula}")
        print(f"{'':20s} a={_fmt(e.a)} hbar={_fmt(e.hbar)} {consts}")
        print(f"{'':20s} domain {e.domain.describe()}; " + "; ".join(e.constraints))
    return EXIT_OK


def cmd_verify(args, argv) -> int:
    spec, overrides = build_spec(args)
    config = quadrature_config(args)
    tol = args.tolerance
    if spec.si_class.conventional:
        model = spectrum_mod.SpectrumModel.from_spec(spec)
        ns = (parse_n_range(args.n) if args.n
              else list(range(min(model.n_max, DEFAULT_MAX_LEVEL) + 1)))
        for n in ns:
            try:
                spectrum_mod.energy(model, n)
            except ValidityError:
                raise UsageError(f"level n={n} lies outside the valid ladder of {spec.name} "
                                 f"(n_max = {model.n_max} at these parameters)") from None
    else:
        ns = parse_n_range(args.n) if args.n else list(range(6))
        swkb.level_energy(spec, max(ns))

    results = _pmap(lambda n: swkb.swkb_integral(spec, n, config), ns)
    results.sort(key=lambda r: r.n)
    rows = [r.to_row() for r in results]
    for row, r in zip(rows, results):
        row["target"] = r.target
        row["pass"] = r.within(tol)
    worst = max(abs(r.residual) for r in results)
    ok = all(row["pass"] for row in rows)
    manifest = RunManifest("verify", argv, overrides, {"quadrature": config.to_dict(),
                                                       "tolerance": tol})
    payload = {"spec": spec.to_dict(), "results": [r.to_dict() for r in results],
               "summary": {"max_abs_residual": worst, "passed": ok}}
    if args.plot_data:
        _write_plot_data(args.plot_data, spec, ns, config, manifest)
    summary = (f"verify {spec.name}: {len(results)} levels, max |I - n*pi*hbar| = "
               f"{worst:.3e} -> {'PASS' if ok else 'FAIL'} (tol {tol:g} relative)")
    _emit(args, rows, payload, manifest, summary)
    return EXIT_OK if ok else EXIT_FAIL


def _write_plot_data(path, spec, ns, config, manifest) -> None:
    rows = []
    for n in ns:
        for x, v in swkb.integrand_samples(spec, n, config=config):
            rows.append({"n": n, "x": x, "integrand": v})
    Path(path).write_text(render_csv(rows, manifest), encoding="utf-8")


def cmd_si_check(args, argv) -> int:
    spec, overrides = build_spec(args)
    x_range, a_range = args.x_range, args.a_range
    if a_range is not None and not a_range[0] <= a_range[1]:
        raise UsageError(f"a range {a_range} must satisfy lo <= hi")
    grid = si.standard_grid(spec, nx=args.nx, na=args.na, x_range=x_range, a_range=a_range)
    tol = args.tolerance
    reports = {
        "shape_invariance": si.residual_sic(spec, grid),
        "pde1": si.residual_pde1(spec, grid),
        "pde2": si.residual_pde2(spec, grid),
    }
    cls, consts = si.classify(spec)
    rows = []
    for key, rep in reports.items():
        rows.append({"name": spec.name, "check": key, "max_abs_residual": rep.max_abs_residual,
                     "rms_residual": rep.rms_residual, "samples": rep.sample_count,
                     "worst_x": rep.worst_point[0], "worst_a": rep.worst_point[1],
                     "pass": rep.max_abs_residual <= tol})
    class_ok = cls is spec.si_class
    ok = class_ok and all(r["pass"] for r in rows)
    manifest = RunManifest("si-check", argv, overrides, {
        "nx": args.nx, "na": args.na, "x_range": x_range, "a_range": a_range, "tolerance": tol})
    payload = {"spec": spec.to_dict(), "grid_size": len(grid),
               "residuals": {k: v.to_dict() for k, v in reports.items()},
               "classification": {"class": cls.value, "constants": consts,
                                  "matches_declared": class_ok},
               "summary": {"passed": ok}}
    worst = max(r["max_abs_residual"] for r in rows)
    summary = (f"si-check {spec.name}: max residual {worst:.3e}, classified as {cls.value} "
               f"-> {'PASS' if ok else 'FAIL'} (tol {tol:g})")
    _emit(args, rows, payload, manifest, summary)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_spectrum(args, argv) -> int:
    spec, overrides = build_spec(args)
    model = spectrum_mod.SpectrumModel.from_spec(spec)
    ns = parse_n_range(args.n) if args.n else list(range(model.n_max + 1))
    rows = spectrum_mod.spectrum_rows(spec.name, model, ns)
    manifest = RunManifest("spectrum", argv, overrides, {"n_max": model.n_max})
    payload = {"spec": spec.to_dict(), "n_max": model.n_max, "levels": rows}
    summary = f"spectrum {spec.name}: {len(rows)} levels (n_max = {model.n_max})"
    _emit(args, rows, payload, manifest, summary)
    return EXIT_OK


def cmd_sweep(args, argv) -> int:
    overrides = parse_overrides(args.set)
    if "hbar" in overrides:
        raise UsageError("use --hbar for the sweep values, not --set hbar=...")
    hbars = parse_floats(args.hbar)
    if not hbars:
        raise UsageError("--hbar needs at least one value")
    entry = get_entry(args.potential)
    specs = [entry.build({**overrides, "hbar": h}) for h in hbars]
    config = quadrature_config(args)
    n = args.n
    tol = args.tolerance
    results = _pmap(lambda s: swkb.swkb_integral(s, n, config), specs)
    rows = [{"name": s.name, "hbar": s.hbar, "n": n, "E_n": r.E_n, "integral": r.integral,
             "integral_over_hbar": r.integral / s.hbar, "residual": r.residual,
             "converged": r.converged} for s, r in zip(specs, results)]
    ratios = np.array([r["integral_over_hbar"] for r in rows])
    spread = float(np.max(ratios) - np.min(ratios))
    ok = spread <= tol * max(float(np.max(np.abs(ratios))), 1.0) and all(r.converged for r in results)
    manifest = RunManifest("sweep", argv, overrides, {"quadrature": config.to_dict(),
                                                      "hbar": hbars, "tolerance": tol})
    payload = {"spec": specs[0].to_dict(), "rows": rows,
               "summary": {"spread_integral_over_hbar": spread, "passed": ok}}
    summary = (f"sweep {entry.name} n={n}: I/hbar spread {spread:.3e} over "
               f"{len(hbars)} values -> {'PASS' if ok else 'FAIL'}")
    _emit(args, rows, payload, manifest, summary)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_oracle_compare(args, argv) -> int:
    spec, overrides = build_spec(args)
    config = oracle_config(args)
    tol = args.tolerance if args.tolerance is not None else get_entry(spec.name).oracle_tolerance
    manifest = RunManifest("oracle-compare", argv, overrides,
                           {"oracle": config.to_dict(), "sign": args.sign, "tolerance": tol})
    failure = None
    try:
        report = oracle_mod.solve_spectrum(spec, args.sign, config)
    except (BoxTooSmall, NotConverged) as exc:
        failure, report = exc, exc.report
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)

    checks = {}
    if report.max_rel_deviation is not None:
        checks["max_rel_deviation"] = report.max_rel_deviation <= tol
    if args.sign == "minus":
        checks["ground_state"] = abs(report.eigenvalues[0]) <= GROUND_STATE_TOL
    ok = failure is None and all(checks.values())
    payload = {"spec": spec.to_dict(), "report": report.to_dict(), "checks": checks,
               "error": None if failure is None else {"type": type(failure).__name__,
                                                      "message": str(failure)},
               "summary": {"passed": ok}}
    dev = report.max_rel_deviation
    dev_txt = "n/a" if dev is None else f"{dev:.3e}"
    detail = "" if failure is None else f" [{type(failure).__name__}]"
    summary = (f"oracle-compare {spec.name} H_{args.sign}: {len(report.eigenvalues)} levels, "
               f"max rel deviation {dev_txt} -> {'PASS' if ok else 'FAIL'}{detail} (tol {tol:g})")
    _emit(args, report.rows(), payload, manifest, summary)
    return EXIT_OK if ok else EXIT_FAIL


def _read_manifest(path: str) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read manifest {path}: {exc}") from None
    if text.startswith("# manifest: "):
        line = text.splitlines()[0]
        return json.loads(line[len("# manifest: "):])
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is neither a JSON report nor a CSV report: {exc}") from None
    doc = doc.get("manifest", doc)
    if "argv" not in doc:
        raise UsageError(f"{path} does not contain a run manifest")
    return doc


def cmd_replay(args, argv) -> int:
    manifest = _read_manifest(args.manifest)
    parser = build_parser()
    ns = parser.parse_args(manifest["argv"])
    if ns.func is cmd_replay:
        raise UsageError("a manifest cannot replay another replay")
    ns.output = args.output
    if hasattr(ns, "plot_data"):
        ns.plot_data = None
    if hasattr(ns, "config"):
        # the recorded snapshot wins over whatever the config file holds now
        ns.config_snapshot = manifest.get("config", {})
    return ns.func(ns, manifest["argv"])


# --- parser --------------------------------------------------------------

def _add_spec_args(p):
    p.add_argument("--potential", required=True, help="catalog entry name")
    p.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="override a, hbar, amplitude or a free constant (repeatable)")


def _add_output_args(p):
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", help="write the report here (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swkb-lab",
        description="Check the SWKB quantization condition on shape-invariant superpotentials.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    cat = sub.add_parser("catalog", help="inspect the superpotential catalog")
    cat_sub = cat.add_subparsers(dest="action", required=True)
    lst = cat_sub.add_parser("list", help="list catalog entries")
    lst.add_argument("--json", action="store_true", help="emit the catalog document as JSON")
    lst.add_argument("--name", help="show one entry only")
    lst.set_defaults(func=cmd_catalog_list)

    ver = sub.add_parser("verify", help="evaluate the SWKB integral for a range of levels")
    _add_spec_args(ver)
    ver.add_argument("--n", help="level or inclusive range A..B "
                     "(default: every valid level up to 10; 0..5 for the control)")
    ver.add_argument("--method", choices=swkb.METHODS)
    ver.add_argument("--config", help="JSON file with quadrature settings")
    ver.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE,
                     help="relative tolerance on I - n*pi*hbar (default 1e-8)")
    ver.add_argument("--plot-data", help="also write (n, x, integrand) samples as CSV")
    _add_output_args(ver)
    ver.set_defaults(func=cmd_verify)

    sic = sub.add_parser("si-check", help="shape-invariance and PDE residuals on a grid")
    _add_spec_args(sic)
    sic.add_argument("--nx", type=int, default=20)
    sic.add_argument("--na", type=int, default=10)
    sic.add_argument("--x-range", nargs=2, type=float, metavar=("LO", "HI"),
                     help="x window (default: the entry's window)")
    sic.add_argument("--a-range", nargs=2, type=float, metavar=("LO", "HI"),
                     help="a range (default: the entry's a range)")
    sic.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE)
    _add_output_args(sic)
    sic.set_defaults(func=cmd_si_check)

    spc = sub.add_parser("spectrum", help="algebraic energies and dE/dhbar")
    _add_spec_args(spc)
    spc.add_argument("--n", help="level or range A..B (default: the whole valid ladder)")
    _add_output_args(spc)
    spc.set_defaults(func=cmd_spectrum)

    swp = sub.add_parser("sweep", help="I and I/hbar across several hbar values")
    _add_spec_args(swp)
    swp.add_argument("--hbar", default="0.5,1,2", help="comma-separated values")
    swp.add_argument("--n", type=int, default=2)
    swp.add_argument("--method", choices=swkb.METHODS)
    swp.add_argument("--config", help="JSON file with quadrature settings")
    swp.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE)
    _add_output_args(swp)
    swp.set_defaults(func=cmd_sweep)

    orc = sub.add_parser("oracle-compare", help="finite-difference eigenvalues vs the algebraic spectrum")
    _add_spec_args(orc)
    orc.add_argument("--eigen-count", type=int)
    orc.add_argument("--sign", choices=("minus", "plus"), default="minus")
    orc.add_argument("--box", nargs=2, type=float, metavar=("LO", "HI"),
                     help="truncation box (default: per catalog entry)")
    orc.add_argument("--grid-points", type=int)
    orc.add_argument("--config", help="JSON file with oracle settings")
    orc.add_argument("--tolerance", type=float,
                     help="relative deviation threshold (default: per catalog entry)")
    _add_output_args(orc)
    orc.set_defaults(func=cmd_oracle_compare)

    rep = sub.add_parser("replay", help="re-run the command recorded in a report's manifest")
    rep.add_argument("manifest", help="JSON report, CSV report or bare manifest file")
    rep.add_argument("--output", help="write the replayed report here (default: stdout)")
    rep.set_defaults(func=cmd_replay)
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, argv)
    except (BracketError, QuadratureError, NotConverged, BoxTooSmall) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (SwkbLabError, UsageError, ValueError, LookupError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    raise SystemExit(main())
