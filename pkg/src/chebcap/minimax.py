"""Monic Chebyshev (minimax) polynomials with certified norm brackets.

Real interval unions: discrete linear minimax on clustered grids, solved by
a levelled-reference multiple-exchange iteration (polynomials form a Haar
system on any compact subset of the line, so the optimum is characterized by
n+2 alternations of the error; with the leading coefficient pinned the
levelling system has n+1 reference points). The levelled value on any
reference is a certified lower bound for the continuous optimum; the achieved
polynomial's verified maximum is the upper end of the bracket.

Curve families: iteratively reweighted least squares (Lawson) on boundary
samples, in an orthogonalized sample basis. The weighted-L2 optimum for unit
weights is a certified lower bound for the minimax value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import numpy.polynomial.chebyshev as npcheb

from . import _kernels as kernels
from .errors import SolverError, ValidationError
from .geometry import DiscretizedCurve, RealIntervalUnion


@dataclass(frozen=True)
class SolverOptions:
    grid_per_interval: int | None = None  # default 30*n + 200, set per solve
    refine_rounds: int = 3
    max_exchange_iters: int = 120
    exchange_tol: float = 1e-12
    bracket_tol_real: float = 1e-6
    bracket_tol_complex: float = 1e-4
    lawson_exponents: tuple = (1, 1, 2, 2, 3, 3, 4, 4)
    lawson_max_iters: int = 30000
    lawson_stall_tol: float = 1e-12
    lawson_stall_rounds: int = 10
    max_degree: int = 200
    verify_refine: int = 10
    complex_verify_refine: int = 4

    def __post_init__(self):
        for name in ("refine_rounds", "max_exchange_iters", "lawson_max_iters",
                     "max_degree", "verify_refine", "complex_verify_refine",
                     "lawson_stall_rounds"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"{name} must be positive")
        if self.grid_per_interval is not None and self.grid_per_interval < 8:
            raise ValidationError("grid_per_interval must be >= 8")
        if not all(e >= 1 for e in self.lawson_exponents):
            raise ValidationError("lawson exponents must be >= 1")


@dataclass(frozen=True, eq=False)
class MonicChebyshev:
    """A monic degree-n polynomial with a certified sup-norm bracket.

    Real sets store the hull-scaled Chebyshev expansion (the top coefficient
    is pinned so the power-basis leading coefficient is exactly 1). Curve
    sets store the orthogonalized sample basis plus the recovered power form.
    """

    degree: int
    norm_lo: float
    norm_hi: float
    extremes: np.ndarray
    iterations: dict
    basis: str
    hull: tuple | None = None
    cheb_coeffs: np.ndarray | None = None
    power: np.ndarray | None = None
    arnoldi: tuple | None = None  # (H, c, sample_scale)

    def __post_init__(self):
        if not self.norm_lo <= self.norm_hi * (1.0 + 1e-12):
            raise SolverError(f"invalid bracket [{self.norm_lo}, {self.norm_hi}]")

    @property
    def bracket_width(self) -> float:
        return (self.norm_hi - self.norm_lo) / self.norm_hi

    def power_coeffs(self) -> np.ndarray:
        """Monomial coefficients (ascending). Real case: converted from the
        hull Chebyshev form; intended for moderate degrees."""
        if self.power is not None:
            return self.power
        a, b = self.hull
        # T_k(tau(x)) with tau(x) = (2x - a - b)/(b - a)
        shifted = npcheb.Chebyshev(self.cheb_coeffs, domain=[a, b])
        return shifted.convert(kind=np.polynomial.polynomial.Polynomial).coef


def eval_poly(T: MonicChebyshev, z):
    """Stable evaluation in the stored basis."""
    if T.basis == "hull-chebyshev":
        a, b = T.hull
        zz = np.atleast_1d(np.asarray(z))
        tau = (2.0 * zz - a - b) / (b - a)
        if np.iscomplexobj(tau):
            out = npcheb.chebval(tau, T.cheb_coeffs)
        else:
            out = kernels.clenshaw_cheb(T.cheb_coeffs, np.asarray(tau, dtype=float))
        return out if out.shape[0] > 1 else out[0]
    H, c, scale = T.arnoldi
    zz = np.atleast_1d(np.asarray(z, dtype=complex)) / scale
    vals = _arnoldi_eval(H, zz, T.degree) @ c
    out = (zz ** T.degree - vals) * scale ** T.degree
    return out if out.shape[0] > 1 else out[0]


# ---------------------------------------------------------------------------
# real solver


def _monic_top(degree, hull):
    if degree == 0:
        return 1.0
    a, b = hull
    return 2.0 ** (1 - degree) * ((b - a) / 2.0) ** degree


def _tau(hull):
    a, b = hull
    return 2.0 / (b - a), -(b + a) / (b - a)


def _build_grid(K: RealIntervalUnion, per_interval: int):
    xs, slices = [], []
    start = 0
    for a, b in K.intervals:
        th = np.linspace(0.0, np.pi, per_interval)
        xs.append((a + b) / 2.0 - (b - a) / 2.0 * np.cos(th))
        slices.append((start, start + per_interval))
        start += per_interval
    return np.concatenate(xs), slices


def _cheb_rows(t, n):
    rows = np.empty((t.shape[0], n + 1))
    rows[:, 0] = 1.0
    if n >= 1:
        rows[:, 1] = t
    for k in range(2, n + 1):
        rows[:, k] = 2.0 * t * rows[:, k - 1] - rows[:, k - 2]
    return rows


def _levelled_solve(t_ref, n, q_top):
    rows = _cheb_rows(t_ref, n)
    m = np.empty((n + 1, n + 1))
    m[:, :n] = rows[:, :n]
    m[:, n] = -((-1.0) ** np.arange(n + 1))
    rhs = -q_top * rows[:, n]
    try:
        sol = np.linalg.solve(m, rhs)
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"levelling system singular: {exc}") from exc
    return np.append(sol[:n], q_top), sol[n]


def _local_max_indices(av, slices):
    out = []
    for lo, hi in slices:
        seg = av[lo:hi]
        k = seg.shape[0]
        if k == 1:
            out.append(lo)
            continue
        interior = np.nonzero((seg[1:-1] >= seg[:-2]) & (seg[1:-1] >= seg[2:]))[0] + 1
        idx = list(interior)
        if seg[0] >= seg[1]:
            idx.insert(0, 0)
        if seg[-1] >= seg[-2]:
            idx.append(k - 1)
        out.extend(lo + i for i in idx)
    return np.array(sorted(set(out)), dtype=int)


def _select_reference(pv, cand, need, comp_of):
    """Alternating reference of `need` points from extremum candidates.

    Consecutive same-sign candidates collapse to their largest member; the
    result always contains the global maximum. When trimming, the largest
    residual point of each component is kept where possible so small
    components are not starved of reference points.
    """
    signs = np.sign(pv[cand])
    keep = signs != 0.0
    cand, signs = cand[keep], signs[keep]
    if cand.shape[0] == 0:
        return None
    groups = []
    gstart = 0
    for i in range(1, cand.shape[0] + 1):
        if i == cand.shape[0] or signs[i] != signs[gstart]:
            seg = cand[gstart:i]
            groups.append(seg[np.argmax(np.abs(pv[seg]))])
            gstart = i
    alt = list(groups)
    if len(alt) < need:
        return None

    av = {i: abs(pv[i]) for i in alt}
    global_max = max(alt, key=av.get)
    comp_best = {}
    for i in alt:
        c = comp_of[i]
        if c not in comp_best or av[i] > av[comp_best[c]]:
            comp_best[c] = i
    protected_soft = set(comp_best.values())

    while len(alt) > need:
        excess = len(alt) - need
        options = []
        for pos in (0, len(alt) - 1):
            i = alt[pos]
            if i == global_max:
                continue
            options.append(((i in protected_soft, av[i]), "end", pos))
        if excess >= 2:
            for pos in range(1, len(alt) - 2):
                i, j = alt[pos], alt[pos + 1]
                if global_max in (i, j):
                    continue
                soft = (i in protected_soft) or (j in protected_soft)
                options.append(((soft, max(av[i], av[j])), "pair", pos))
        if not options:
            return None
        options.sort(key=lambda o: o[0])
        _, kind, pos = options[0]
        if kind == "end":
            del alt[pos]
        else:
            del alt[pos:pos + 2]
    return np.array(alt, dtype=int)


def _initial_reference(pv, slices, need, comp_of):
    cand = _local_max_indices(np.abs(pv), slices)
    ref = _select_reference(pv, cand, need, comp_of)
    if ref is not None:
        return ref
    total = slices[-1][1]
    idx = np.unique(np.round(np.linspace(0, total - 1, need)).astype(int))
    k = 0
    while idx.shape[0] < need and k < total:
        if k not in idx:
            idx = np.sort(np.append(idx, k))
        k += 1
    return idx[:need]


def _exchange(x, t_all, slices, comp_of, n, q_top, ref, opts):
    h = 0.0
    q_full = None
    for it in range(opts.max_exchange_iters):
        q_full, h = _levelled_solve(t_all[ref], n, q_top)
        pv = kernels.clenshaw_cheb(q_full, t_all)
        gmax = float(np.max(np.abs(pv)))
        if gmax <= abs(h) * (1.0 + opts.exchange_tol):
            return q_full, abs(h), ref, it + 1
        cand = _local_max_indices(np.abs(pv), slices)
        new_ref = _select_reference(pv, cand, n + 1, comp_of)
        if new_ref is None or np.array_equal(new_ref, ref):
            return q_full, abs(h), ref, it + 1
        ref = new_ref
    raise SolverError(
        f"exchange failed to converge in {opts.max_exchange_iters} iterations "
        f"at degree {n}"
    )


def _polish_extrema(q_full, hull, K, x, ref, slices):
    """Refine interior extremum locations by bisection on the derivative."""
    hs, ht = _tau(hull)
    dq = npcheb.chebder(q_full)

    def dp(xx):
        return kernels.clenshaw_cheb(dq, np.atleast_1d(hs * xx + ht))[0]

    ends = {lo for lo, hi in slices} | {hi - 1 for lo, hi in slices}
    out = []
    for i in ref:
        if i in ends:
            out.append(x[i])
            continue
        a, b = x[i - 1], x[i + 1]
        fa, fb = dp(a), dp(b)
        if fa == 0.0:
            out.append(a)
            continue
        if fa * fb >= 0.0:
            out.append(x[i])
            continue
        lo, hi, flo = a, b, fa
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            fm = dp(mid)
            if fm == 0.0:
                lo = hi = mid
                break
            if flo * fm < 0.0:
                hi = mid
            else:
                lo, flo = mid, fm
        out.append(0.5 * (lo + hi))
    return np.array(out)


def solve_real_monic(K: RealIntervalUnion, n: int, opts: SolverOptions | None = None
                     ) -> MonicChebyshev:
    """Monic minimax polynomial of degree n on a real interval union."""
    if opts is None:
        opts = SolverOptions()
    if not isinstance(K, RealIntervalUnion):
        raise ValidationError("expected a RealIntervalUnion")
    if not (isinstance(n, (int, np.integer)) and n >= 1):
        raise ValidationError(f"degree must be a positive integer, got {n}")
    if n > opts.max_degree:
        raise SolverError(f"degree {n} exceeds the conditioning cap {opts.max_degree}")

    hull = K.hull
    hs, ht = _tau(hull)
    q_top = _monic_top(n, hull)
    per = opts.grid_per_interval or (30 * n + 200)
    x, slices = _build_grid(K, per)
    comp_of = np.concatenate([np.full(hi - lo, c) for c, (lo, hi) in enumerate(slices)])

    # least-squares bootstrap for the initial reference
    t_all = hs * x + ht
    rows = _cheb_rows(t_all, n)
    c0, *_ = np.linalg.lstsq(rows[:, :n], -q_top * rows[:, n], rcond=None)
    pv0 = rows @ np.append(c0, q_top)
    ref = _initial_reference(pv0, slices, n + 1, comp_of)

    total_iters = 0
    q_full = None
    h = 0.0
    for rnd in range(opts.refine_rounds + 1):
        q_full, h, ref, its = _exchange(x, t_all, slices, comp_of, n, q_top, ref, opts)
        total_iters += its
        if rnd == opts.refine_rounds:
            break
        polished = _polish_extrema(q_full, hull, K, x, ref, slices)
        ref_x = x[ref]
        x_new = np.unique(np.concatenate([x, polished]))
        # rebuild per-component slices after insertion
        slices = []
        comp_parts = []
        pos = 0
        for ci, (a, b) in enumerate(K.intervals):
            cnt = int(np.sum((x_new >= a) & (x_new <= b)))
            slices.append((pos, pos + cnt))
            comp_parts.append(np.full(cnt, ci))
            pos += cnt
        comp_of = np.concatenate(comp_parts)
        x = x_new
        t_all = hs * x + ht
        ref = np.searchsorted(x, ref_x)
        ref = np.clip(ref, 0, x.shape[0] - 1)
        ref = np.unique(ref)
        if ref.shape[0] < n + 1:
            pv = kernels.clenshaw_cheb(q_full, t_all)
            ref = _initial_reference(pv, slices, n + 1, comp_of)

    norm_lo = abs(h)
    xv_parts = [x]
    for a, b in K.intervals:
        th = np.linspace(0.0, np.pi, opts.verify_refine * per)
        xv_parts.append((a + b) / 2.0 - (b - a) / 2.0 * np.cos(th))
    xv = np.unique(np.concatenate(xv_parts))
    pv = kernels.clenshaw_cheb(q_full, hs * xv + ht)
    av = np.abs(pv)
    norm_hi = max(float(np.max(av)), norm_lo)
    if (norm_hi - norm_lo) / norm_hi > opts.bracket_tol_real:
        raise SolverError(
            f"exchange bracket {(norm_hi - norm_lo) / norm_hi:.3e} exceeds "
            f"tolerance at degree {n}"
        )
    extremes = xv[av >= norm_hi * (1.0 - 1e-9)]
    if extremes.shape[0] > 1:
        keep = np.append(True, np.diff(extremes) > 1e-12 * K.diameter)
        extremes = extremes[keep]
    return MonicChebyshev(
        degree=n,
        norm_lo=norm_lo,
        norm_hi=norm_hi,
        extremes=extremes,
        iterations={"exchange_iterations": total_iters,
                    "rounds": opts.refine_rounds + 1,
                    "grid_points": int(x.shape[0])},
        basis="hull-chebyshev",
        hull=hull,
        cheb_coeffs=q_full,
    )


# ---------------------------------------------------------------------------
# complex solver


def _collinear(v: np.ndarray) -> bool:
    c = v - v.mean()
    m = np.stack([c.real, c.imag])
    s = np.linalg.svd(m, compute_uv=False)
    return s[1] <= 1e-12 * max(s[0], 1e-300)


def _arnoldi_basis(z, w, n):
    """Orthonormal polynomial sample basis of degrees 0..n-1 w.r.t. the
    discrete inner product with weights w (sum w = 1). Returns (B, H)."""
    s = z.shape[0]
    B = np.empty((s, n), dtype=complex)
    H = np.zeros((n, n - 1), dtype=complex) if n > 1 else np.zeros((1, 0), dtype=complex)
    B[:, 0] = 1.0
    for k in range(n - 1):
        t = z * B[:, k]
        for _ in range(2):  # one re-orthogonalization pass
            coef = (w * B[:, :k + 1].conj().T) @ t
            t = t - B[:, :k + 1] @ coef
            H[:k + 1, k] += coef
        nrm = math.sqrt(float(np.sum(w * np.abs(t) ** 2)))
        if nrm <= 1e-14 * max(1.0, float(np.max(np.abs(H)))):
            raise SolverError(f"sample basis broke down at degree {k + 1}")
        H[k + 1, k] = nrm
        B[:, k + 1] = t / nrm
    return B, H


def _arnoldi_eval(H, z, n):
    out = np.empty((z.shape[0], n), dtype=complex)
    out[:, 0] = 1.0
    for k in range(n - 1):
        t = z * out[:, k] - out[:, :k + 1] @ H[:k + 1, k]
        out[:, k + 1] = t / H[k + 1, k]
    return out


def _power_coeffs_from_arnoldi(H, c, n):
    """Monomial coefficients of z^n - sum c_k q_k(z) by forward recurrence."""
    cols = [np.array([1.0 + 0.0j])]
    for k in range(n - 1):
        prev = cols[k]
        t = np.zeros(k + 2, dtype=complex)
        t[1:] = prev  # multiply by z
        for i in range(k + 1):
            t[:i + 1] -= H[i, k] * cols[i]
        cols.append(t / H[k + 1, k])
    out = np.zeros(n + 1, dtype=complex)
    out[n] = 1.0
    for k in range(n):
        out[:k + 1] -= c[k] * cols[k]
    return out


def solve_complex_monic(curves, n: int, opts: SolverOptions | None = None, *,
                        capacity_hint: float | None = None,
                        verify_curves=None) -> MonicChebyshev:
    """Monic minimax polynomial of degree n on a family of closed curves.

    By the maximum principle the sup over the enclosed compact set equals the
    sup over the outer boundary, so boundary samples suffice. There is no
    equioscillation certificate in the plane; the bracket pairs the achieved
    norm on refined samples with the Lawson weighted-L2 dual bound (and the
    capacity floor when available).
    """
    if opts is None:
        opts = SolverOptions()
    if isinstance(curves, DiscretizedCurve):
        curves = [curves]
    curves = list(curves)
    if not (isinstance(n, (int, np.integer)) and n >= 1):
        raise ValidationError(f"degree must be a positive integer, got {n}")
    if n > opts.max_degree:
        raise SolverError(f"degree {n} exceeds the conditioning cap {opts.max_degree}")
    for c in curves:
        if not isinstance(c, DiscretizedCurve):
            raise ValidationError(f"expected DiscretizedCurve, got {type(c).__name__}")
        if _collinear(c.vertices):
            raise SolverError(
                "curve degenerates to a segment; use the real-line solver"
            )
    z = np.concatenate([c.vertices for c in curves])
    if z.shape[0] < 8 * n:
        raise ValidationError(
            f"need at least {8 * n} boundary samples for degree {n}, got {z.shape[0]}"
        )

    w0_parts = []
    for c in curves:
        sp = c.speeds
        if sp is None:
            v = c.vertices
            sp = np.abs(np.roll(v, -1) - np.roll(v, 1)) / 2.0
        w0_parts.append(np.maximum(np.asarray(sp, dtype=float), 1e-300))
    w0 = np.concatenate(w0_parts)
    w0 = w0 / w0.sum()

    scale = float(np.max(np.abs(z))) / 1.5
    zs = z / scale
    target = zs ** n
    B, H = _arnoldi_basis(zs, w0, max(n, 1))

    w = w0.copy()
    best_low = 0.0
    best_cur = math.inf
    best_c = np.zeros(n, dtype=complex)
    stall = 0
    phase = 0
    prev_cur = math.inf
    iters = 0
    Bc = B.conj()
    for iters in range(1, opts.lawson_max_iters + 1):
        # weighted least squares by normal equations; B is orthonormal in the
        # starting weights, so the Gram matrix stays benign
        bw = Bc * w[:, None]
        try:
            c_fit = np.linalg.solve(bw.T @ B, bw.T @ target)
        except np.linalg.LinAlgError:
            d = np.sqrt(w)
            c_fit, *_ = np.linalg.lstsq(B * d[:, None], target * d, rcond=None)
        r = target - B @ c_fit
        ar = np.abs(r)
        cur = float(np.max(ar))
        low = math.sqrt(float(np.sum(w * ar ** 2)))
        best_low = max(best_low, low)
        if cur < best_cur:
            best_cur, best_c = cur, c_fit
        if (best_cur - best_low) / best_cur <= opts.bracket_tol_complex * 0.5:
            break
        if abs(prev_cur - cur) <= opts.lawson_stall_tol * max(cur, 1e-300):
            stall += 1
        else:
            stall = 0
        prev_cur = cur
        if stall >= opts.lawson_stall_rounds:
            stall = 0
            phase += 1
            if phase >= len(opts.lawson_exponents):
                break
        expo = opts.lawson_exponents[min(phase, len(opts.lawson_exponents) - 1)]
        w = w * ar ** expo
        w = np.maximum(w, 1e-300)
        w = w / w.sum()

    if verify_curves is None:
        verify_curves = [c.resampled(opts.complex_verify_refine * len(c)) if c.closed
                         else c for c in curves]
    zv = np.concatenate([c.vertices for c in verify_curves]) / scale
    pv = zv ** n - _arnoldi_eval(H, zv, n) @ best_c
    apv = np.abs(pv)
    amp = scale ** n
    norm_hi = max(float(np.max(apv)), best_cur) * amp
    norm_lo = best_low * amp
    if capacity_hint is not None:
        cap_floor = math.exp(n * math.log(capacity_hint))
        if norm_hi < cap_floor - 1e-12:
            raise SolverError(
                f"achieved norm {norm_hi} fell below the capacity floor {cap_floor}"
            )
        norm_lo = max(norm_lo, cap_floor)
    norm_lo = min(norm_lo, norm_hi)
    if (norm_hi - norm_lo) / norm_hi > opts.bracket_tol_complex:
        raise SolverError(
            f"Lawson bracket {(norm_hi - norm_lo) / norm_hi:.3e} exceeds tolerance "
            f"at degree {n}"
        )

    power_scaled = _power_coeffs_from_arnoldi(H, best_c, n)
    power = power_scaled * scale ** (n - np.arange(n + 1))
    extremes = (zv * scale)[apv >= np.max(apv) * (1.0 - 1e-9)]
    return MonicChebyshev(
        degree=n,
        norm_lo=norm_lo,
        norm_hi=norm_hi,
        extremes=extremes,
        iterations={"lawson_iterations": iters, "samples": int(z.shape[0])},
        basis="orthogonal-samples",
        power=power,
        arnoldi=(H, best_c, scale),
    )
