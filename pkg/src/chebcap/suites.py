"""Packaged verification suites.

Each criterion function runs one end-to-end check of the toolkit against its
classical oracles and growth-law targets, returning a structured verdict.
The CLI's verify-theorems task and the acceptance test module both drive
these; a shared context caches the expensive solves so overlapping criteria
do not recompute them.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import diagnostics, equilibrium, levin, widom
from .geometry import (CantorSpec, Disk, Polygon, RealIntervalUnion, Segment,
                       build_cantor, discretize_boundary, normalize_to_I)
from .minimax import SolverOptions

SQUARE_CAPACITY = 1.1803406  # side-2 square, from the classical closed form
SQUARE_SIDE2 = Polygon(np.array([1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j]))


@dataclass
class CriterionResult:
    cid: int
    key: str
    name: str
    passed: bool
    details: dict
    elapsed: float


class SuiteContext:
    """Caches solves shared between criteria and registers every equilibrium
    solve so the invariant sweep can re-audit all of them."""

    def __init__(self, opts: SolverOptions | None = None):
        self.opts = opts or SolverOptions()
        self._cache = {}
        self.real_solves = []    # (label, EquilibriumReal)
        self.curve_solves = []   # (label, BoundaryDensity, shape, m, grading)

    # -- cached building blocks ------------------------------------------

    def _memo(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    def eq(self, label, K, quad_order=64):
        def solve():
            e = equilibrium.solve_real_equilibrium(K, quad_order)
            self.real_solves.append((label, e))
            return e
        return self._memo(("eq", label), solve)

    def bd(self, label, shape, m, grading=2.0):
        def solve():
            curve = discretize_boundary(shape, m, grading)
            b = equilibrium.solve_symm([curve])
            self.curve_solves.append((label, b, shape, m, grading))
            return b
        return self._memo(("bd", label, m, grading), solve)

    def cantor_normalized(self, depth):
        def build():
            K, _ = normalize_to_I(build_cantor(CantorSpec(1.0 / 3.0, depth, (0.0, 1.0))))
            return K
        return self._memo(("cantor", depth), build)

    def strip(self, label, K, quad_order=64):
        def build():
            return levin.build_levin(self.eq(label, K, quad_order))
        return self._memo(("strip", label), build)

    def two_interval(self, a):
        return RealIntervalUnion(((-1.0, -a), (a, 1.0)))

    def series_real(self, label, K, n_list):
        def run():
            eq = self.eq(label, K)
            return widom.run_series(K, n_list, self.opts, set_id=label, eq=eq)
        return self._memo(("series", label, n_list[0], n_list[-1], len(n_list)), run)

    def series_circle(self, n_list, m=256):
        def run():
            disk = Disk(0.0 + 0.0j, 1.0)
            curve = discretize_boundary(disk, m)
            bdens = equilibrium.solve_symm([curve])
            self.curve_solves.append(("unit-circle", bdens, disk, m, 2.0))
            return widom.run_series([curve], n_list, self.opts, set_id="unit-circle",
                                    eq=bdens)
        return self._memo(("series-circle", n_list[0], n_list[-1], m), run)


# ---------------------------------------------------------------------------
# criteria


def criterion_interval_baseline(ctx: SuiteContext) -> CriterionResult:
    t0 = time.perf_counter()
    K = RealIntervalUnion(((-1.0, 1.0),))
    series = ctx.series_real("interval", K, list(range(1, 31)))
    errs = [abs(r.t_hi - 2.0) for r in series.ok_rows()]
    elapsed = time.perf_counter() - t0
    ok = len(errs) == 30 and max(errs) <= 1e-6 and elapsed < 30.0
    return CriterionResult(1, "interval-baseline",
                           "t_n([-1,1]) = 2 to 1e-6 for n = 1..30",
                           ok, {"max_error": max(errs), "elapsed_s": elapsed}, elapsed)


def criterion_circle_baseline(ctx: SuiteContext) -> CriterionResult:
    t0 = time.perf_counter()
    series = ctx.series_circle(list(range(1, 21)))
    errs = [abs(r.t_hi - 1.0) for r in series.ok_rows()]
    elapsed = time.perf_counter() - t0
    ok = len(errs) == 20 and max(errs) <= 1e-6 and elapsed < 60.0
    return CriterionResult(2, "circle-baseline",
                           "t_n(unit circle) = 1 to 1e-6 for n = 1..20",
                           ok, {"max_error": max(errs), "elapsed_s": elapsed}, elapsed)


def criterion_capacity_exact(ctx: SuiteContext) -> CriterionResult:
    t0 = time.perf_counter()
    details = {}
    ok = True
    for a in (0.2, 0.5, 0.8):
        eq = ctx.eq(f"two-interval-{a}", ctx.two_interval(a))
        exact = math.sqrt(1.0 - a * a) / 2.0
        err = abs(eq.capacity - exact)
        details[f"two_interval_a{a}_err"] = err
        ok = ok and err <= 1e-8
    sq = ctx.bd("square-side2", SQUARE_SIDE2, 1024, grading=3.0)
    details["square_err"] = abs(sq.capacity - SQUARE_CAPACITY)
    ok = ok and details["square_err"] <= 1e-5
    circ = ctx.bd("circle-r2", Disk(0.0 + 0.0j, 2.0), 256)
    details["circle_r2_err"] = abs(circ.capacity - 2.0)
    ok = ok and details["circle_r2_err"] <= 1e-9
    elapsed = time.perf_counter() - t0
    return CriterionResult(3, "capacity-exact",
                           "capacities match classical closed forms",
                           ok, details, elapsed)


def criterion_two_interval_arcs(ctx: SuiteContext) -> CriterionResult:
    t0 = time.perf_counter()
    K = ctx.two_interval(0.5)
    series = ctx.series_real("two-interval-0.5", K, list(range(1, 61)))
    even_err = max(abs(r.t_hi - 2.0) for r in series.ok_rows()
                   if r.n % 2 == 0 and r.n <= 24)
    report = widom.fit_growth(series, (8, 60))
    slope = abs(report.fits["logarithmic"].params["b"])
    sup_t = max(r.t_hi for r in series.ok_rows())
    ok = (even_err <= 1e-5 and slope <= 0.05
          and report.verdict == "constant" and sup_t <= 10.0)
    elapsed = time.perf_counter() - t0
    return CriterionResult(4, "two-interval-arcs",
                           "bounded factors on the symmetric two-interval set",
                           ok, {"even_max_err": even_err, "log_slope": slope,
                                "verdict": report.verdict, "sup_t": sup_t}, elapsed)


def criterion_cantor_power(ctx: SuiteContext) -> CriterionResult:
    t0 = time.perf_counter()
    K = ctx.cantor_normalized(4)
    series = ctx.series_real("cantor-depth4", K, list(range(8, 97)))
    report = widom.fit_growth(series, (8, 96))
    c = report.fits["power"].params["c"]
    mean_t = float(np.mean([r.t_hi for r in series.ok_rows()]))
    resid = report.fits["power"].residual
    elapsed = time.perf_counter() - t0
    ok = (report.verdict == "power" and 0.0 < c < 2.0
          and resid < 0.05 * mean_t and elapsed < 600.0)
    return CriterionResult(5, "cantor-power",
                           "depth-4 Cantor factors fit a power law",
                           ok, {"verdict": report.verdict, "exponent": c,
                                "residual": resid, "mean_t": mean_t,
                                "elapsed_s": elapsed}, elapsed)


def criterion_levin_pipeline(ctx: SuiteContext) -> CriterionResult:
    t0 = time.perf_counter()
    K = ctx.cantor_normalized(3)
    eq = ctx.eq("cantor-depth3", K)
    details = {}
    ok = True
    for n in (5, 10, 20):
        Kt = levin.sublevel_truncate(K, eq, 1.0 / n)
        eqt = equilibrium.solve_real_equilibrium(Kt, quad_order=256)
        ctx.real_solves.append((f"cantor3-truncated-{n}", eqt))
        lo_ok = eqt.capacity >= eq.capacity - 1e-7
        hi_ok = eqt.capacity <= math.exp(1.0 / n) * eq.capacity + 1e-7
        details[f"sandwich_n{n}"] = (eq.capacity, eqt.capacity,
                                     math.exp(1.0 / n) * eq.capacity)
        ok = ok and lo_ok and hi_ok
    ns = np.array([4.0, 8.0, 16.0, 32.0, 64.0])
    vs = []
    for n in ns:
        Kt = levin.sublevel_truncate(K, eq, 1.0 / n)
        eqt = equilibrium.solve_real_equilibrium(Kt, quad_order=256)
        ctx.real_solves.append((f"cantor3-vfit-{int(n)}", eqt))
        vs.append(levin.build_levin(eqt).V)
    vs = np.array(vs)
    basis = np.stack([np.ones_like(ns), np.log(ns)], axis=1)
    coef, *_ = np.linalg.lstsq(basis, vs, rcond=None)
    rel_resid = float(np.sqrt(np.mean((vs - basis @ coef) ** 2)) / np.mean(vs))
    details["v_values"] = vs.tolist()
    details["v_log_slope"] = float(coef[1])
    details["v_rel_residual"] = rel_resid
    ok = ok and rel_resid < 0.10
    elapsed = time.perf_counter() - t0
    return CriterionResult(6, "levin-pipeline",
                           "capacity sandwich and log growth of truncated strip sums",
                           ok, details, elapsed)


def criterion_bound_49(ctx: SuiteContext) -> CriterionResult:
    t0 = time.perf_counter()
    K = ctx.two_interval(0.5)
    series = ctx.series_real("two-interval-0.5", K, list(range(1, 61)))
    sub = widom.SeriesResult(
        set_id=series.set_id, set_descriptor=series.set_descriptor,
        log_capacity=series.log_capacity,
        rows=tuple(r for r in series.rows if r.n >= 4),
    )
    strip = ctx.strip("two-interval-0.5", K)
    report = widom.verify_bound_49(sub, strip)
    elapsed = time.perf_counter() - t0
    return CriterionResult(7, "bound-49",
                           "norm bound constant has a non-increasing tail",
                           report.stable_tail,
                           {"constant": report.constant, "V": report.v_sum,
                            "record_ns": list(report.record_ns)}, elapsed)


def criterion_crosscut(ctx: SuiteContext) -> CriterionResult:
    t0 = time.perf_counter()
    consts = {}
    for depth in (2, 3, 4):
        K = ctx.cantor_normalized(depth)
        strip = ctx.strip(f"cantor-depth{depth}", K)
        vmax = strip.max_height
        heights = np.geomspace(vmax * 1e-3, vmax, 32)
        ratios = levin.crosscut_ratios(strip, heights)
        consts[depth] = max(r for _, r in ratios)
    spread = max(consts.values()) / min(consts.values())
    ok = spread < 2.0
    elapsed = time.perf_counter() - t0
    return CriterionResult(8, "crosscut-uniformity",
                           "crosscut height/width ratios uniform across depths",
                           ok, {"constants": consts, "spread": spread}, elapsed)


def criterion_holder(ctx: SuiteContext) -> CriterionResult:
    t0 = time.perf_counter()
    details = {}
    K = RealIntervalUnion(((-1.0, 1.0),))
    eq = ctx.eq("interval", K)
    probes = diagnostics.holder_probes_real(K, 24, (2e-6, 2e-3))
    fit_i = diagnostics.holder_fit(eq, probes)
    details["interval_alpha"] = fit_i.alpha
    ok = abs(fit_i.alpha - 0.5) <= 0.05

    bd = ctx.bd("circle-holder", Disk(0.0 + 0.0j, 1.0), 2048)
    d = np.geomspace(1e-2, 1e-1, 24)
    fit_d = diagnostics.holder_fit(bd, (1.0 + d).astype(complex))
    details["disk_alpha"] = fit_d.alpha
    ok = ok and abs(fit_d.alpha - 1.0) <= 0.05

    K4 = ctx.cantor_normalized(4)
    eq4 = ctx.eq("cantor-depth4", K4)
    probes4 = diagnostics.holder_probes_real(K4, 24, (1e-5, 5e-3), families="gaps")
    fit_c = diagnostics.holder_fit(eq4, probes4)
    details["cantor_alpha"] = fit_c.alpha
    ok = ok and fit_c.alpha > 0.05
    elapsed = time.perf_counter() - t0
    return CriterionResult(9, "holder",
                           "Green function Hoelder exponents match the geometry",
                           ok, details, elapsed)


def criterion_frostman(ctx: SuiteContext) -> CriterionResult:
    t0 = time.perf_counter()
    # seed the standard family so the sweep is meaningful when run standalone;
    # memoization makes these free inside the full suite
    ctx.eq("interval", RealIntervalUnion(((-1.0, 1.0),)))
    for a in (0.2, 0.5, 0.8):
        ctx.eq(f"two-interval-{a}", ctx.two_interval(a))
    for depth in (2, 3, 4):
        ctx.eq(f"cantor-depth{depth}", ctx.cantor_normalized(depth))
    ctx.bd("circle-r2", Disk(0.0 + 0.0j, 2.0), 256)
    ctx.bd("square-side2", SQUARE_SIDE2, 1024, grading=3.0)
    worst_mass_real = 0.0
    worst_pot_real = 0.0
    for _, eq in ctx.real_solves:
        worst_mass_real = max(worst_mass_real, abs(float(np.sum(eq.masses)) - 1.0))
        worst_pot_real = max(worst_pot_real, equilibrium.frostman_residual(eq))
    worst_mass_curve = 0.0
    worst_pot_curve = 0.0
    for _, bdn, shape, m, grading in ctx.curve_solves:
        worst_mass_curve = max(worst_mass_curve,
                               abs(float(bdn.sigma @ bdn.weights) - 1.0))
        probe = discretize_boundary(shape, 2 * m, grading)
        worst_pot_curve = max(worst_pot_curve,
                              equilibrium.boundary_potential_residual(bdn, [probe]))
    ok = (worst_mass_real <= 1e-10 and worst_mass_curve <= 1e-8
          and worst_pot_real <= 1e-7 and worst_pot_curve <= 1e-7
          and ctx.real_solves and ctx.curve_solves)
    elapsed = time.perf_counter() - t0
    return CriterionResult(10, "frostman-invariants",
                           "mass and potential-constancy hold for every solve",
                           bool(ok),
                           {"worst_mass_real": worst_mass_real,
                            "worst_mass_curve": worst_mass_curve,
                            "worst_potential_real": worst_pot_real,
                            "worst_potential_curve": worst_pot_curve,
                            "n_real": len(ctx.real_solves),
                            "n_curve": len(ctx.curve_solves)}, elapsed)


def criterion_lemma31(ctx: SuiteContext) -> CriterionResult:
    t0 = time.perf_counter()
    ns = (8, 16, 32, 64, 128, 256)
    seg = Segment(-1.0 + 0.0j, 1.0 + 0.0j)
    seg_ratio = [diagnostics.lemma31_integral(seg, n, 1) / math.log(n) for n in ns]
    med = float(np.median(seg_ratio))
    seg_ok = all(med / 2.0 <= r <= 2.0 * med for r in seg_ratio)
    disk = Disk(0.0 + 0.0j, 1.0)
    disk_j = [diagnostics.lemma31_integral(disk, n, 1) for n in ns]
    disk_ok = max(disk_j) / min(disk_j) <= 1.5
    elapsed = time.perf_counter() - t0
    return CriterionResult(11, "lemma31",
                           "level-curve integral grows like log n (segment), "
                           "stays bounded (disk)",
                           seg_ok and disk_ok,
                           {"segment_J_over_logn": seg_ratio, "disk_J": disk_j},
                           elapsed)


def criterion_affine_invariance(ctx: SuiteContext) -> CriterionResult:
    t0 = time.perf_counter()
    K = ctx.cantor_normalized(2)
    K2 = RealIntervalUnion(tuple((3.0 * a - 2.0, 3.0 * b - 2.0) for a, b in K.intervals))
    ns = list(range(1, 31))
    s1 = ctx.series_real("cantor-depth2", K, ns)
    s2 = ctx.series_real("cantor-depth2-affine", K2, ns)
    rel = max(abs(r1.t_hi - r2.t_hi) / r1.t_hi
              for r1, r2 in zip(s1.ok_rows(), s2.ok_rows()))
    ok = rel <= 1e-5 and len(s1.ok_rows()) == len(ns) == len(s2.ok_rows())
    elapsed = time.perf_counter() - t0
    return CriterionResult(12, "affine-invariance",
                           "factor series invariant under x -> 3x - 2",
                           ok, {"max_rel_row_diff": rel}, elapsed)


CRITERIA = {
    1: criterion_interval_baseline,
    2: criterion_circle_baseline,
    3: criterion_capacity_exact,
    4: criterion_two_interval_arcs,
    5: criterion_cantor_power,
    6: criterion_levin_pipeline,
    7: criterion_bound_49,
    8: criterion_crosscut,
    9: criterion_holder,
    10: criterion_frostman,
    11: criterion_lemma31,
    12: criterion_affine_invariance,
}

SUITES = {
    "interval-baseline": (1,),
    "circle-baseline": (2,),
    "capacity-exact": (3,),
    "two-interval-arcs": (4,),
    "cantor-power": (5,),
    "levin-pipeline": (6,),
    "bound-49": (7,),
    "crosscut-uniformity": (8,),
    "holder": (9,),
    "frostman-invariants": (10,),
    "lemma31": (11,),
    "affine-invariance": (12,),
    "all": tuple(range(1, 13)),
}


def run_suite(name: str, ctx: SuiteContext | None = None):
    """Run one packaged suite; criterion 10 audits every solve made before it."""
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; known: {', '.join(sorted(SUITES))}")
    ctx = ctx or SuiteContext()
    cids = SUITES[name]
    # the invariant sweep must run after the solves it audits
    ordered = sorted(cids, key=lambda c: (c == 10, c))
    results = [CRITERIA[c](ctx) for c in ordered]
    results.sort(key=lambda r: r.cid)
    return results
