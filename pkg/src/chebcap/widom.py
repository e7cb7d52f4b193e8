"""Widom-factor series t_n = ||T_n|| / capacity^n and growth-law verdicts.

All capacity powers are handled in log space: with capacity below 1 the
direct power underflows near degree 700 and loses precision much earlier, so
rows carry log-capacity and log-norms and t is formed from exponent
differences. Growth fits compare a constant, a logarithmic and a power model
on the conservative upper bracket ends and pick the simplest model whose
residual is within 10% of the best.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .equilibrium import BoundaryDensity, EquilibriumReal, solve_real_equilibrium, solve_symm
from .errors import ChebcapError, SolverError, ValidationError
from .geometry import DiscretizedCurve, Disk, Polygon, RealIntervalUnion, discretize_boundary
from .levin import LevinStrip
from .minimax import SolverOptions, solve_complex_monic, solve_real_monic

CSV_HEADER = ["set_id", "n", "log_capacity", "log_norm_lo", "log_norm_hi",
              "t_lo", "t_hi", "status"]

_MODEL_ORDER = ("constant", "logarithmic", "power")
_SELECT_SLACK = 1.10  # prefer the simpler model within 10% of the best residual


@dataclass(frozen=True)
class SeriesRow:
    n: int
    log_norm_lo: float
    log_norm_hi: float
    t_lo: float
    t_hi: float
    status: str = "ok"


@dataclass(frozen=True, eq=False)
class SeriesResult:
    set_id: str
    set_descriptor: object
    log_capacity: float
    rows: tuple

    def __post_init__(self):
        ok = self.ok_rows()
        ns = [r.n for r in self.rows]
        if any(ns[i] >= ns[i + 1] for i in range(len(ns) - 1)):
            raise ValidationError("series rows must be strictly increasing in n")
        for r in ok:
            if not (r.t_hi >= r.t_lo >= 1.0 - 1e-6):
                raise SolverError(
                    f"row n={r.n} violates the Widom floor: t_lo={r.t_lo}, t_hi={r.t_hi}"
                )

    def ok_rows(self):
        return [r for r in self.rows if r.status == "ok"]

    @property
    def capacity(self) -> float:
        return math.exp(self.log_capacity)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_HEADER)
            for r in self.rows:
                w.writerow([
                    self.set_id, r.n,
                    f"{self.log_capacity:.17g}",
                    f"{r.log_norm_lo:.17g}", f"{r.log_norm_hi:.17g}",
                    f"{r.t_lo:.17g}", f"{r.t_hi:.17g}",
                    r.status,
                ])


def _is_real_set(K) -> bool:
    return isinstance(K, RealIntervalUnion)


def _as_curves(K, max_n: int):
    if isinstance(K, DiscretizedCurve):
        return [K]
    if isinstance(K, (Disk, Polygon)):
        m = max(256, 16 * max_n)
        m += m % 2
        return [discretize_boundary(K, m)]
    if isinstance(K, (list, tuple)):
        out = []
        for s in K:
            out.extend(_as_curves(s, max_n))
        return out
    raise ValidationError(f"unsupported set type {type(K).__name__} for a series run")


def run_series(K, n_list, opts: SolverOptions | None = None, *, set_id: str = "set",
               eq=None) -> SeriesResult:
    """One minimax solve per degree, with per-row failure tolerance.

    A row whose solve raises is recorded with status "failed" and the series
    continues; downstream fits use the surviving rows.
    """
    n_list = [int(n) for n in n_list]
    if not n_list:
        raise ValidationError("n_list must be non-empty")
    if any(n_list[i] >= n_list[i + 1] for i in range(len(n_list) - 1)):
        raise ValidationError("n_list must be strictly ascending")
    if opts is None:
        opts = SolverOptions()

    real = _is_real_set(K)
    curves = None
    if real:
        if eq is None:
            eq = solve_real_equilibrium(K)
        log_cap = -eq.robin
    else:
        curves = _as_curves(K, n_list[-1])
        if eq is None:
            eq = solve_symm(curves)
        log_cap = -eq.robin

    rows = []
    for n in n_list:
        try:
            if real:
                T = solve_real_monic(K, n, opts)
            else:
                T = solve_complex_monic(curves, n, opts, capacity_hint=eq.capacity)
            llo, lhi = math.log(T.norm_lo), math.log(T.norm_hi)
            rows.append(SeriesRow(
                n=n,
                log_norm_lo=llo,
                log_norm_hi=lhi,
                t_lo=math.exp(llo - n * log_cap),
                t_hi=math.exp(lhi - n * log_cap),
                status="ok",
            ))
        except ChebcapError:
            rows.append(SeriesRow(n=n, log_norm_lo=math.nan, log_norm_hi=math.nan,
                                  t_lo=math.nan, t_hi=math.nan, status="failed"))
    return SeriesResult(set_id=set_id, set_descriptor=K, log_capacity=log_cap,
                        rows=tuple(rows))


# ---------------------------------------------------------------------------
# growth fits


@dataclass(frozen=True)
class GrowthFit:
    model: str
    params: dict
    residual: float
    window: tuple


@dataclass(frozen=True)
class GrowthReport:
    verdict: str
    fits: dict
    window: tuple


def fit_growth(series: SeriesResult, window: tuple | None = None) -> GrowthReport:
    """Fit constant / a + b*log n / n^c models to the upper Widom factors.

    The default window starts at n = 8 to drop small-degree transients.
    Residuals are root-mean-square misfits in t space for all three models so
    they are directly comparable.
    """
    n_min = 8 if window is None else window[0]
    n_max = math.inf if window is None else window[1]
    rows = [r for r in series.ok_rows() if n_min <= r.n <= n_max]
    if len(rows) < 6:
        raise ValidationError(
            f"need at least 6 successful rows in the window, got {len(rows)}"
        )
    n = np.array([r.n for r in rows], dtype=float)
    t = np.array([r.t_hi for r in rows])
    win = (int(n[0]), int(n[-1]))

    fits = {}
    a = float(np.mean(t))
    fits["constant"] = GrowthFit("constant", {"a": a},
                                 float(np.sqrt(np.mean((t - a) ** 2))), win)

    basis = np.stack([np.ones_like(n), np.log(n)], axis=1)
    coef, *_ = np.linalg.lstsq(basis, t, rcond=None)
    pred = basis @ coef
    fits["logarithmic"] = GrowthFit(
        "logarithmic", {"a": float(coef[0]), "b": float(coef[1])},
        float(np.sqrt(np.mean((t - pred) ** 2))), win)

    lbasis = np.stack([np.log(n), np.ones_like(n)], axis=1)
    lcoef, *_ = np.linalg.lstsq(lbasis, np.log(t), rcond=None)
    ppred = np.exp(lbasis @ lcoef)
    fits["power"] = GrowthFit(
        "power", {"c": float(lcoef[0]), "d": float(lcoef[1])},
        float(np.sqrt(np.mean((t - ppred) ** 2))), win)

    best = min(f.residual for f in fits.values())
    verdict = next(m for m in _MODEL_ORDER
                   if fits[m].residual <= _SELECT_SLACK * best + 1e-15)
    return GrowthReport(verdict=verdict, fits=fits, window=win)


# ---------------------------------------------------------------------------
# norm bound against log(n+1) * exp(V)


@dataclass(frozen=True)
class BoundReport:
    constant: float
    v_sum: float
    ratios: tuple
    record_ns: tuple
    stable_tail: bool


def verify_bound_49(series: SeriesResult, strip: LevinStrip) -> BoundReport:
    """Minimal C with t_hi(n) <= C * log(n+1) * exp(V) across the series.

    `stable_tail` reports whether the per-row required constant sets no new
    record in the second half of the degree range, i.e. the early rows
    dominate and the bound's shape is compatible with the data.
    """
    if not isinstance(series.set_descriptor, RealIntervalUnion):
        raise ValidationError("bound check applies to real interval unions")
    if strip.intervals != series.set_descriptor:
        raise ValidationError("strip was built from a different set than the series")
    rows = series.ok_rows()
    if not rows:
        raise ValidationError("series has no successful rows")
    ev = math.exp(strip.V)
    ratios = [(r.n, r.t_hi / (math.log(r.n + 1.0) * ev)) for r in rows]
    c_min = max(v for _, v in ratios)
    records = []
    best = -math.inf
    for nn, v in ratios:
        if v > best:
            best = v
            records.append(nn)
    half = rows[len(rows) // 2].n
    stable = records[-1] <= half
    return BoundReport(constant=float(c_min), v_sum=strip.V, ratios=tuple(ratios),
                       record_ns=tuple(records), stable_tail=stable)
