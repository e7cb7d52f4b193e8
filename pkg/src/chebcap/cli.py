"""Batch driver: JSON experiment configs in, CSV/JSON artifacts out.

Exit codes: 0 success, 1 config/validation error, 2 solver failure,
3 a verify-theorems criterion failed. Outputs are deterministic for a given
config (no timestamps, no randomness), so re-runs are byte-identical.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, diagnostics, equilibrium, levin, suites, widom
from .errors import ChebcapError, SolverError, ValidationError
from .geometry import (CantorSpec, DiscretizedCurve, Disk, Polygon,
                       RealIntervalUnion, Segment, build_cantor,
                       discretize_boundary, normalize_to_I)
from .minimax import solve_complex_monic, solve_real_monic

TASKS = ("capacity", "green", "levin", "cheb", "series", "verify-theorems",
         "diagnostics")


def _need(d, key, where):
    if key not in d:
        raise ValidationError("missing required field", field=f"{where}.{key}")
    return d[key]


def _pair(v, where):
    if not (isinstance(v, (list, tuple)) and len(v) == 2):
        raise ValidationError("expected a [a, b] pair", field=where)
    return float(v[0]), float(v[1])


def parse_set(d, where="set"):
    """Turn a tagged set descriptor into geometry objects."""
    if not isinstance(d, dict):
        raise ValidationError("set descriptor must be an object", field=where)
    kind = _need(d, "kind", where)
    try:
        if kind == "interval-union":
            ivs = _need(d, "intervals", where)
            return RealIntervalUnion(tuple(_pair(p, f"{where}.intervals[{i}]")
                                           for i, p in enumerate(ivs)))
        if kind == "cantor":
            spec = CantorSpec(float(_need(d, "ratio", where)),
                              int(_need(d, "depth", where)),
                              _pair(d.get("base", [0.0, 1.0]), f"{where}.base"))
            K = build_cantor(spec)
            if d.get("normalize", True):
                K, _ = normalize_to_I(K)
            return K
        if kind == "disk":
            cx, cy = _pair(d.get("center", [0.0, 0.0]), f"{where}.center")
            shape = Disk(complex(cx, cy), float(_need(d, "radius", where)))
            m = int(d.get("nodes", 256))
            return discretize_boundary(shape, m, float(d.get("grading", 2.0)))
        if kind == "polygon":
            verts = [_pair(p, f"{where}.vertices[{i}]")
                     for i, p in enumerate(_need(d, "vertices", where))]
            shape = Polygon(np.array([complex(x, y) for x, y in verts]))
            m = int(d.get("nodes", 512))
            return discretize_boundary(shape, m, float(d.get("grading", 2.0)))
        if kind == "curve-file":
            path = Path(_need(d, "path", where))
            if not path.exists():
                raise ValidationError(f"file {path} does not exist", field=f"{where}.path")
            raw = json.loads(path.read_text())
            verts = [_pair(p, f"{where}.path:vertices[{i}]")
                     for i, p in enumerate(_need(raw, "vertices", f"{where}.path"))]
            return DiscretizedCurve(np.array([complex(x, y) for x, y in verts]),
                                    closed=bool(raw.get("closed", True)),
                                    grading=float(raw.get("grading", 1.0)))
        if kind == "mixed":
            comps = _need(d, "components", where)
            return [parse_set(c, f"{where}.components[{i}]")
                    for i, c in enumerate(comps)]
    except (TypeError, ValueError) as exc:
        raise ValidationError(str(exc), field=where) from exc
    raise ValidationError(f"unknown set kind {kind!r}", field=f"{where}.kind")


def _as_curve_list(obj, where="set"):
    if isinstance(obj, DiscretizedCurve):
        return [obj]
    if isinstance(obj, list) and all(isinstance(c, DiscretizedCurve) for c in obj):
        return obj
    raise ValidationError("this task needs curve-type components", field=where)


def _require_real(obj, where="set"):
    if not isinstance(obj, RealIntervalUnion):
        raise ValidationError("this task needs a real interval union", field=where)
    return obj


def _real_eq(K, params):
    return equilibrium.solve_real_equilibrium(K, int(params.get("quad_order", 64)))


def _n_list(params, where="params"):
    if "n_list" in params:
        return [int(n) for n in params["n_list"]]
    n_min = int(params.get("n_min", 1))
    n_max = int(_need(params, "n_max", where))
    step = int(params.get("n_step", 1))
    return list(range(n_min, n_max + 1, step))


# ---------------------------------------------------------------------------
# task runners (each returns a JSON-ready dict; may write extra files)


def _task_capacity(obj, params, outdir, prefix, files):
    if isinstance(obj, RealIntervalUnion):
        eq = _real_eq(obj, params)
        return {"capacity": eq.capacity, "robin": eq.robin,
                "method": "real-gap-polynomial"}
    bd = equilibrium.solve_symm(_as_curve_list(obj))
    return {"capacity": bd.capacity, "robin": bd.robin,
            "method": "boundary-integral"}


def _task_green(obj, params, outdir, prefix, files):
    K = _require_real(obj)
    eq = _real_eq(K, params)
    pts = [complex(*_pair(p, f"params.points[{i}]"))
           for i, p in enumerate(_need(params, "points", "params"))]
    vals = [float(equilibrium.green_eval(eq, z)) for z in pts]
    out = {"capacity": eq.capacity, "points": [[z.real, z.imag] for z in pts],
           "green": vals}
    if params.get("complex_parts", False):
        gc = [equilibrium.green_complex(eq, z) for z in pts]
        out["green_complex"] = [[g.real, g.imag] for g in gc]
    return out


def _task_levin(obj, params, outdir, prefix, files):
    K = _require_real(obj)
    eq = _real_eq(K, params)
    strip = levin.build_levin(eq)
    out = {
        "capacity": eq.capacity,
        "V": strip.V,
        "slits": [{"u": s.u, "v": s.v, "gap_index": s.gap_index}
                  for s in strip.slits],
    }
    if "sublevel_s" in params:
        trunc = []
        for s in params["sublevel_s"]:
            Kt = levin.sublevel_truncate(K, eq, float(s))
            eqt = equilibrium.solve_real_equilibrium(Kt, quad_order=256)
            trunc.append({"s": float(s), "intervals": [list(p) for p in Kt.intervals],
                          "capacity": eqt.capacity})
        out["truncations"] = trunc
    return out


def _task_cheb(obj, params, outdir, prefix, files):
    ns = _n_list(params)
    rows = []
    for n in ns:
        if isinstance(obj, RealIntervalUnion):
            T = solve_real_monic(obj, n)
            coeffs = [float(c) for c in T.cheb_coeffs]
            basis = "hull-chebyshev"
        else:
            T = solve_complex_monic(_as_curve_list(obj), n)
            coeffs = [[c.real, c.imag] for c in T.power]
            basis = "power"
        rows.append({"n": n, "norm_lo": T.norm_lo, "norm_hi": T.norm_hi,
                     "bracket": T.bracket_width, "basis": basis,
                     "coefficients": coeffs,
                     "extreme_count": int(T.extremes.shape[0])})
    return {"polynomials": rows}


def _task_series(obj, params, outdir, prefix, files):
    ns = _n_list(params)
    set_id = params.get("set_id", "set")
    if isinstance(obj, RealIntervalUnion):
        series = widom.run_series(obj, ns, set_id=set_id)
    else:
        series = widom.run_series(_as_curve_list(obj), ns, set_id=set_id)
    csv_path = outdir / f"{prefix}_series.csv"
    series.to_csv(csv_path)
    files.append(csv_path)
    out = {"log_capacity": series.log_capacity, "rows": len(series.rows),
           "failed_rows": len(series.rows) - len(series.ok_rows()),
           "csv": csv_path.name}
    window = params.get("fit_window")
    try:
        report = widom.fit_growth(series, tuple(window) if window else None)
        out["fit"] = {
            "verdict": report.verdict,
            "models": {k: {"params": f.params, "residual": f.residual}
                       for k, f in report.fits.items()},
        }
    except ValidationError:
        out["fit"] = None  # too few rows in the window
    return out


def _task_diagnostics(obj, params, outdir, prefix, files):
    out = {}
    if "holder" in params:
        p = params["holder"]
        K = _require_real(obj)
        eq = _real_eq(K, p)
        probes = diagnostics.holder_probes_real(
            K, int(p.get("n_per_family", 24)),
            tuple(p.get("rel_range", (2e-6, 2e-3))),
            families=p.get("families", "exterior"))
        fit = diagnostics.holder_fit(eq, probes)
        out["holder"] = {"alpha": fit.alpha, "c1": fit.c1,
                         "n_samples": fit.n_samples,
                         "d_range": list(fit.d_range),
                         "holdout_max_ratio": fit.holdout_max_ratio}
    if "perfectness" in params:
        p = params["perfectness"]
        K = _require_real(obj)
        rep = diagnostics.perfectness_check(K, _need(p, "centers", "params.perfectness"),
                                            _need(p, "radii", "params.perfectness"))
        out["perfectness"] = {"worst_ratio": rep.worst_ratio,
                              "n_samples": rep.n_samples, "grid": rep.grid}
    if "lemma31" in params:
        p = params["lemma31"]
        if isinstance(obj, RealIntervalUnion) and len(obj) == 1:
            a, b = obj.intervals[0]
            shape = Segment(complex(a), complex(b))
        elif isinstance(obj, list) and len(obj) == 1:
            raise ValidationError("lemma31 needs a segment or disk descriptor",
                                  field="set")
        elif isinstance(obj, DiscretizedCurve):
            raise ValidationError("lemma31 needs a segment or disk descriptor",
                                  field="set")
        else:
            shape = obj
        ns = [int(n) for n in _need(p, "n_values", "params.lemma31")]
        k = int(p.get("k", 1))
        out["lemma31"] = {"k": k,
                          "J": {str(n): diagnostics.lemma31_integral(shape, n, k)
                                for n in ns}}
    if not out:
        raise ValidationError("diagnostics task needs at least one of "
                              "holder/perfectness/lemma31", field="params")
    return out


def _task_verify(obj, params, outdir, prefix, files, quiet=False):
    suite = params.get("suite", "all")
    if suite not in suites.SUITES:
        raise ValidationError(f"unknown suite {suite!r}", field="params.suite")
    results = suites.run_suite(suite)
    crit = []
    for r in results:
        line = f"{'PASS' if r.passed else 'FAIL'} [criterion {r.cid}] {r.key}: {r.name}"
        if not quiet:
            print(line)
        crit.append({"id": r.cid, "key": r.key, "name": r.name,
                     "passed": r.passed, "details": _jsonable(r.details)})
    return {"suite": suite, "criteria": crit,
            "all_passed": all(r.passed for r in results)}


_RUNNERS = {
    "capacity": _task_capacity,
    "green": _task_green,
    "levin": _task_levin,
    "cheb": _task_cheb,
    "series": _task_series,
    "diagnostics": _task_diagnostics,
}


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    return x


def _load_config(path: Path):
    if not path.exists():
        raise ValidationError(f"config file {path} does not exist", field="--config")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config is not valid JSON: {exc}", field="--config") from exc
    if not isinstance(raw, dict):
        raise ValidationError("config must be a JSON object", field="--config")
    task = _need(raw, "task", "config")
    if task not in TASKS:
        raise ValidationError(f"unknown task {task!r}; known: {', '.join(TASKS)}",
                              field="config.task")
    if task != "verify-theorems":
        _need(raw, "set", "config")
    params = raw.get("params", {})
    if not isinstance(params, dict):
        raise ValidationError("params must be an object", field="config.params")
    return raw, task, params


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="chebcap",
        description="Capacity, Green-function, strip and minimax experiments "
                    "on compact planar sets.")
    ap.add_argument("--config", required=True, help="JSON experiment config")
    ap.add_argument("--out", default=None, help="output directory override")
    ap.add_argument("--task", default=None, help="override the config's task tag")
    ap.add_argument("--quiet", action="store_true", help="suppress progress output")
    args = ap.parse_args(argv)

    try:
        raw, task, params = _load_config(Path(args.config))
        if args.task is not None:
            if args.task not in TASKS:
                raise ValidationError(f"unknown task {args.task!r}", field="--task")
            task = args.task
        outdir = Path(args.out or os.environ.get("CHEBCAP_OUT")
                      or raw.get("output", {}).get("dir", "."))
        outdir.mkdir(parents=True, exist_ok=True)
        prefix = raw.get("output", {}).get("prefix", task)
        obj = parse_set(raw["set"]) if "set" in raw else None
        if task != "verify-theorems" and obj is None:
            raise ValidationError("missing required field", field="config.set")
    except ValidationError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1

    cfg_hash = hashlib.sha256(
        json.dumps(raw, sort_keys=True, separators=(",", ":")).encode()).hexdigest()
    files = []
    try:
        if task == "verify-theorems":
            results = _task_verify(obj, params, outdir, prefix, files, quiet=args.quiet)
        else:
            results = _RUNNERS[task](obj, params, outdir, prefix, files)
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 1
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 2
    except ChebcapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    envelope = {
        "toolkit_version": __version__,
        "config_sha256": cfg_hash,
        "task": task,
        "status": "ok",
        "results": _jsonable(results),
    }
    json_path = outdir / f"{prefix}.json"
    json_path.write_text(json.dumps(envelope, sort_keys=True, indent=2) + "\n")
    files.append(json_path)
    if not args.quiet:
        for f in files:
            print(f"wrote {f}")
    if task == "verify-theorems" and not results["all_passed"]:
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
