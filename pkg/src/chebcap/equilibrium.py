"""Equilibrium measures, Robin constants, logarithmic capacity and Green
functions.

Real interval unions use the gap-polynomial representation: the equilibrium
density on K = U [a_j, b_j] is |Q(x)| / (pi * sqrt|R(x)|) with
R(x) = prod (x-a_j)(x-b_j) and Q the monic polynomial of degree p-1 whose
integral over every gap against 1/sqrt|R| vanishes. This gives spectral
accuracy and direct access to the gap structure.

Per component, the density is expanded in a Chebyshev cosine series (computed
by DCT from quadrature samples). Log-kernel integrals against the measure
then have closed forms in the exterior Joukowski variable, so potentials are
uniformly accurate arbitrarily close to (and on) the set.

Curve families use a first-kind boundary integral equation (single-layer
potential constant on the boundary, unit total mass) with spectral treatment
of the log singularity on each closed curve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.fft

from . import _kernels as kernels
from .errors import SolverError, ValidationError
from .geometry import DiscretizedCurve, RealIntervalUnion, gaps

_MASS_TOL_REAL = 1e-10
_MASS_TOL_CURVE = 1e-8
_MIN_GAP_FRACTION = 1e-8


# ---------------------------------------------------------------------------
# real interval unions


@dataclass(frozen=True, eq=False)
class EquilibriumReal:
    """Equilibrium data for a real interval union.

    `q_coeffs` holds the monic gap polynomial Q in the Chebyshev basis of the
    hull interval (degree = number of components - 1). `fcoefs[i]` is the
    cosine expansion of the density pulled back to angle coordinates on
    component i; `masses[i]` is that component's equilibrium mass.
    """

    intervals: RealIntervalUnion
    q_coeffs: np.ndarray
    robin: float
    capacity: float
    quad_order: int
    mids: np.ndarray
    rads: np.ndarray
    fcoefs: np.ndarray
    masses: np.ndarray
    x0: float

    def __post_init__(self):
        diam = self.intervals.diameter
        if not self.capacity > 0.0:
            raise SolverError("capacity must be positive")
        if self.capacity > diam / 4.0 + 1e-12 * max(1.0, diam):
            raise SolverError(
                f"capacity {self.capacity} exceeds the hull bound {diam / 4.0}"
            )
        mass = float(np.sum(self.masses))
        if abs(mass - 1.0) > _MASS_TOL_REAL:
            raise SolverError(f"equilibrium mass {mass} deviates from 1 beyond tolerance")

    @property
    def hull_map(self):
        a, b = self.intervals.hull
        return (2.0 / (b - a), -(b + a) / (b - a))

    def q_eval(self, x):
        """Evaluate the monic gap polynomial Q."""
        s, t = self.hull_map
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = kernels.clenshaw_cheb(self.q_coeffs, s * x + t)
        return out if out.shape[0] > 1 else float(out[0])


def _log_abs_product(x, points):
    """sum_k log|x - points_k| (vectorized over x), plus the sign parity."""
    d = np.asarray(x)[..., None] - points[None, :]
    logs = np.sum(np.log(np.abs(d)), axis=-1)
    neg = np.sum(d < 0.0, axis=-1)
    return logs, neg


def _cheb_basis(x, degree):
    """Matrix T_k(x) for k = 0..degree, x in [-1, 1]."""
    x = np.asarray(x)
    out = np.empty((x.shape[0], degree + 1))
    out[:, 0] = 1.0
    if degree >= 1:
        out[:, 1] = x
    for k in range(2, degree + 1):
        out[:, k] = 2.0 * x * out[:, k - 1] - out[:, k - 2]
    return out


def _monic_top_coeff(degree, hull):
    """Chebyshev coefficient making sum c_k T_k(tau(x)) monic of `degree`."""
    if degree == 0:
        return 1.0
    a, b = hull
    return 2.0 ** (1 - degree) * ((b - a) / 2.0) ** degree


def _assemble(K: RealIntervalUnion, M: int):
    p = len(K)
    d = p - 1
    ends = K.endpoints()
    hull = K.hull
    hs, ht = 2.0 / (hull[1] - hull[0]), -(hull[1] + hull[0]) / (hull[1] - hull[0])
    theta = (2.0 * np.arange(1, M + 1) - 1.0) * np.pi / (2.0 * M)
    cos_t = np.cos(theta)

    q_top = _monic_top_coeff(d, hull)
    glist = gaps(K)
    if d == 0:
        q_full = np.array([1.0])
    else:
        A = np.empty((d, d))
        rhs = np.empty(d)
        for j, (al, be) in enumerate(glist):
            gm, gr = (al + be) / 2.0, (be - al) / 2.0
            s = gm + gr * cos_t
            keep = np.ones(2 * p, dtype=bool)
            keep[2 * j + 1] = False  # right end of component j
            keep[2 * j + 2] = False  # left end of component j+1
            logs, neg = _log_abs_product(s, ends[keep])
            if np.any(neg % 2 == 0):
                raise SolverError("sign pattern broke in gap quadrature", gap_index=j)
            g_w = np.exp(-0.5 * logs)
            basis = _cheb_basis(hs * s + ht, d)
            A[j, :] = g_w @ basis[:, :d]
            rhs[j] = -q_top * (g_w @ basis[:, d])
        try:
            q_low = np.linalg.solve(A, rhs)
        except np.linalg.LinAlgError as exc:
            raise SolverError(f"gap system is singular: {exc}") from exc
        resid = np.max(np.abs(A @ q_low - rhs))
        scale = np.max(np.abs(rhs)) + np.max(np.abs(A)) * np.max(np.abs(q_low))
        if not np.isfinite(resid) or resid > 1e-8 * max(scale, 1e-300):
            raise SolverError("gap system is ill-conditioned")
        q_full = np.append(q_low, q_top)

    mids = np.array([(a + b) / 2.0 for a, b in K.intervals])
    rads = np.array([(b - a) / 2.0 for a, b in K.intervals])
    fcoefs = np.empty((p, M))
    masses = np.empty(p)
    for i in range(p):
        t = mids[i] + rads[i] * cos_t
        keep = np.ones(2 * p, dtype=bool)
        keep[2 * i] = False
        keep[2 * i + 1] = False
        logs, neg = _log_abs_product(t, ends[keep])
        if np.any(neg % 2 == 1):
            raise SolverError(f"sign pattern broke on component {i}")
        qv = kernels.clenshaw_cheb(q_full, hs * t + ht)
        f = np.abs(qv) * np.exp(-0.5 * logs) / np.pi
        a_m = scipy.fft.dct(f, type=2) / M
        fcoefs[i] = a_m
        masses[i] = np.pi * a_m[0] / 2.0

    # exactly one simple zero of Q inside every gap
    for j, (al, be) in enumerate(glist):
        sgrid = np.linspace(al, be, 64)
        qs = np.sign(kernels.clenshaw_cheb(q_full, hs * sgrid + ht))
        qs = qs[qs != 0.0]
        if np.count_nonzero(qs[1:] != qs[:-1]) != 1:
            raise SolverError("gap polynomial does not have a single zero in gap",
                              gap_index=j)

    return q_full, mids, rads, fcoefs, masses


def _potential_terms(mids, rads, fcoefs, masses, z):
    """Potential integral(s) of log|z - t| against the equilibrium measure."""
    out = np.zeros(z.shape[0])
    for i in range(mids.shape[0]):
        zeta = (z - mids[i]) / rads[i]
        v = zeta + np.sqrt(zeta - 1.0) * np.sqrt(zeta + 1.0)
        u = 1.0 / v
        a = fcoefs[i]
        b = a[1:] / np.arange(1, a.shape[0])
        series = np.real(u * kernels.horner(b, u))
        out += masses[i] * (math.log(rads[i] / 2.0) + np.log(np.abs(v))) - np.pi * series
    return out


def _potential(eq: EquilibriumReal, z):
    return _potential_terms(eq.mids, eq.rads, eq.fcoefs, eq.masses, z)


def solve_real_equilibrium(K: RealIntervalUnion, quad_order: int = 64) -> EquilibriumReal:
    """Solve for the equilibrium measure of a real interval union.

    The quadrature order doubles (up to three times) until the computed total
    mass matches 1 to 1e-10; failure to converge raises. Nearly closed gaps
    (below 1e-8 of the diameter) are rejected outright: the gap system sits on
    a conditioning cliff there and silent merging would hide modeling errors.
    """
    if not isinstance(K, RealIntervalUnion):
        raise ValidationError("expected a RealIntervalUnion")
    if quad_order < 32:
        raise ValidationError(f"quad_order must be >= 32, got {quad_order}")
    diam = K.diameter
    for j, (al, be) in enumerate(gaps(K)):
        if be - al < _MIN_GAP_FRACTION * diam:
            raise SolverError(
                f"gap of length {be - al:.3e} is nearly closed relative to "
                f"diameter {diam:.3e}; merge or widen it upstream",
                gap_index=j,
            )

    M = int(quad_order)
    mass_err = math.inf
    for _ in range(4):
        q_full, mids, rads, fcoefs, masses = _assemble(K, M)
        mass_err = abs(float(np.sum(masses)) - 1.0)
        if mass_err <= _MASS_TOL_REAL:
            break
        M *= 2
    if mass_err > _MASS_TOL_REAL:
        raise SolverError(
            f"quadrature non-convergence: mass deviates by {mass_err:.3e} at order {M // 2}"
        )

    i0 = int(np.argmax(rads))
    x0 = float(mids[i0])
    u0 = _potential_terms(mids, rads, fcoefs, masses, np.array([complex(x0)]))[0]
    robin = -u0
    return EquilibriumReal(
        intervals=K,
        q_coeffs=q_full,
        robin=float(robin),
        capacity=float(math.exp(-robin)),
        quad_order=M,
        mids=mids,
        rads=rads,
        fcoefs=fcoefs,
        masses=masses,
        x0=x0,
    )


def green_eval(eq: EquilibriumReal, z):
    """Green function of the complement with pole at infinity.

    Vectorized over complex points; values on K are clamped to exactly 0
    (computed values below -1e-12 indicate a broken solve and raise).
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    scalar = z.shape[0] == 1 and np.isscalar(z[0].real)
    zz = z.real + 1j * np.abs(z.imag)  # g is symmetric across the real axis
    g = _potential(eq, zz) + eq.robin
    if np.any(g < -1e-12):
        raise SolverError(f"green function negative beyond tolerance: min {g.min():.3e}")
    g = np.maximum(g, 0.0)
    return float(g[0]) if (scalar and z.ndim == 1 and z.shape[0] == 1) else g


def green_complex(eq: EquilibriumReal, z):
    """Complex log-potential integral log(z - t) d(mu) + Robin constant.

    Principal branch: for Im z >= 0 and real t the integrand's argument lies
    in [0, pi], so the imaginary part is continuous up to the real axis.
    Points with Im z < 0 are rejected.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if np.any(z.imag < 0.0):
        raise ValidationError("green_complex requires Im z >= 0")
    zz = z.real + 1j * np.maximum(z.imag, 0.0)  # normalize -0.0
    out = np.zeros(zz.shape[0], dtype=complex)
    for i in range(eq.mids.shape[0]):
        zeta = (zz - eq.mids[i]) / eq.rads[i]
        v = zeta + np.sqrt(zeta - 1.0) * np.sqrt(zeta + 1.0)
        u = 1.0 / v
        a = eq.fcoefs[i]
        b = a[1:] / np.arange(1, a.shape[0])
        series = u * kernels.horner(b, u)
        out += eq.masses[i] * (math.log(eq.rads[i] / 2.0) + np.log(v)) - np.pi * series
    out = out + eq.robin
    return out[0] if z.shape[0] == 1 else out


def frostman_residual(eq: EquilibriumReal, probes_per_interval: int = 129) -> float:
    """Max deviation of the equilibrium potential from -Robin on the set."""
    pts = []
    for (a, b) in eq.intervals.intervals:
        th = np.linspace(0.0, np.pi, probes_per_interval)
        pts.append((a + b) / 2.0 + (b - a) / 2.0 * np.cos(th))
    z = np.concatenate(pts).astype(complex)
    return float(np.max(np.abs(_potential(eq, z) + eq.robin)))


# ---------------------------------------------------------------------------
# curve families (boundary integral equation)


@dataclass(frozen=True, eq=False)
class BoundaryDensity:
    """Discrete equilibrium density on a family of closed curves.

    `sigma` is the density per unit arclength at each node and `weights` the
    matching arclength quadrature weights, so sigma @ weights integrates to
    the total mass 1.
    """

    curves: tuple
    nodes: np.ndarray
    weights: np.ndarray
    sigma: np.ndarray
    robin: float
    capacity: float
    psi: np.ndarray
    params: tuple
    speeds: tuple
    block_slices: tuple

    def __post_init__(self):
        mass = float(self.sigma @ self.weights)
        if abs(mass - 1.0) > _MASS_TOL_CURVE:
            raise SolverError(f"boundary mass {mass} deviates from 1 beyond tolerance")
        if np.min(self.sigma) < -1e-10:
            raise SolverError(
                f"boundary density dips to {np.min(self.sigma):.3e}; should be nonnegative"
            )

    def green(self, z):
        """Green function via the plain quadrature sum (valid away from the
        boundary relative to the node spacing)."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        g = kernels.log_abs_sum(self.nodes, self.sigma * self.weights, z) + self.robin
        return float(g[0]) if g.shape[0] == 1 else g


def capacity(sol) -> float:
    """Logarithmic capacity exp(-Robin constant) of a solved set."""
    if isinstance(sol, (EquilibriumReal, BoundaryDensity)):
        return sol.capacity
    raise ValidationError(f"unsupported solution type {type(sol).__name__}")


def _curve_params(curve: DiscretizedCurve):
    n = len(curve)
    return 2.0 * np.pi * np.arange(n) / n


def _fft_speeds(curve: DiscretizedCurve):
    n = len(curve)
    k = np.fft.fftfreq(n, d=1.0 / n)
    dz = np.fft.ifft(1j * k * np.fft.fft(curve.vertices))
    return np.abs(dz)


def _log_sin_weight_row(n: int):
    """W(2*pi*k/n) where W is the quadrature weight function for the periodic
    log|2 sin(u/2)| kernel, exact on trigonometric polynomials of degree < n/2."""
    k = np.arange(n)
    u = 2.0 * np.pi * k / n
    m = np.arange(1, n // 2)
    s = np.cos(np.outer(m, u)) / m[:, None]
    return -(2.0 * np.pi / n) * (s.sum(axis=0) + np.cos(n * u / 2.0) / n)


def _log_sin_weights_at(t, grid_params, n: int):
    """W(t - t_j) for off-grid parameters t (rows) against the node grid."""
    m = np.arange(1, n // 2)
    dt = t[:, None] - grid_params[None, :]
    cos_t = np.cos(np.outer(t, m))
    sin_t = np.sin(np.outer(t, m))
    cos_g = np.cos(np.outer(m, grid_params)) / m[:, None]
    sin_g = np.sin(np.outer(m, grid_params)) / m[:, None]
    s = cos_t @ cos_g + sin_t @ sin_g
    return -(2.0 * np.pi / n) * (s + np.cos(n * dt / 2.0) / n)


def solve_symm(curves) -> BoundaryDensity:
    """Equilibrium density on closed curves via a first-kind log-kernel
    boundary equation.

    The single-layer potential is collocated to a constant at every node with
    unit total mass; the log singularity on each curve is integrated with
    spectral product weights, so smooth curves converge geometrically. The
    geometry is pre-scaled to diameter 1 before solving (the classical
    first-kind equation degenerates at capacity 1) and rescaled afterwards.
    """
    if isinstance(curves, DiscretizedCurve):
        curves = [curves]
    curves = list(curves)
    if not curves:
        raise ValidationError("need at least one curve")
    for c in curves:
        if not isinstance(c, DiscretizedCurve):
            raise ValidationError(f"expected DiscretizedCurve, got {type(c).__name__}")
        if not c.closed:
            raise ValidationError("open arcs are not supported by the curve solver")
        if len(c) < 32:
            raise ValidationError(f"each curve needs >= 32 nodes, got {len(c)}")
        if len(c) % 2:
            raise ValidationError("curve node counts must be even")
    for i in range(len(curves)):
        for j in range(i + 1, len(curves)):
            d = np.min(np.abs(curves[i].vertices[:, None] - curves[j].vertices[None, :]))
            if not d > 0.0:
                raise ValidationError(f"curves {i} and {j} are not disjoint")

    all_nodes = np.concatenate([c.vertices for c in curves])
    diam = float(np.hypot(np.ptp(all_nodes.real), np.ptp(all_nodes.imag)))
    scale = 1.0 / diam

    params = [_curve_params(c) for c in curves]
    speeds = [c.speeds if c.speeds is not None else _fft_speeds(c) for c in curves]
    sizes = [len(c) for c in curves]
    total = sum(sizes)
    offs = np.concatenate([[0], np.cumsum(sizes)])

    A = np.empty((total + 1, total + 1))
    rhs = np.zeros(total + 1)
    rhs[-1] = 1.0
    A[-1, -1] = 0.0
    for bi, c in enumerate(curves):
        n = sizes[bi]
        sl_i = slice(offs[bi], offs[bi + 1])
        zi = c.vertices * scale
        dt = 2.0 * np.pi / n
        A[-1, sl_i] = dt
        A[sl_i, -1] = -1.0
        for bj, c2 in enumerate(curves):
            m = sizes[bj]
            sl_j = slice(offs[bj], offs[bj + 1])
            zj = c2.vertices * scale
            if bi == bj:
                idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
                w_row = _log_sin_weight_row(n)
                wmat = w_row[idx]
                dist = np.abs(zi[:, None] - zj[None, :])
                sinf = np.abs(2.0 * np.sin(np.pi * idx / n))
                np.fill_diagonal(dist, speeds[bi] * scale)
                np.fill_diagonal(sinf, 1.0)
                A[sl_i, sl_j] = wmat + dt * np.log(dist / sinf)
            else:
                dtj = 2.0 * np.pi / m
                A[sl_i, sl_j] = dtj * np.log(np.abs(zi[:, None] - zj[None, :]))

    try:
        sol = np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"boundary system is singular: {exc}") from exc
    resid = np.max(np.abs(A @ sol - rhs))
    if not np.isfinite(resid) or resid > 1e-9 * max(1.0, np.max(np.abs(sol))):
        raise SolverError(f"boundary system is ill-conditioned (residual {resid:.3e})")

    psi = sol[:-1]
    gamma_scaled = sol[-1]
    cap = diam * math.exp(gamma_scaled)
    robin = -math.log(cap)

    speed_cat = np.concatenate(speeds)
    dts = np.concatenate([np.full(sizes[b], 2.0 * np.pi / sizes[b]) for b in range(len(curves))])
    weights = dts * speed_cat
    with np.errstate(divide="ignore", invalid="ignore"):
        sigma = np.where(speed_cat > 0.0, psi / speed_cat, 0.0)
    return BoundaryDensity(
        curves=tuple(curves),
        nodes=all_nodes,
        weights=weights,
        sigma=sigma,
        robin=robin,
        capacity=cap,
        psi=psi,
        params=tuple(params),
        speeds=tuple(np.asarray(s) for s in speeds),
        block_slices=tuple(slice(offs[b], offs[b + 1]) for b in range(len(curves))),
    )


def boundary_potential_residual(bd: BoundaryDensity, probe_curves) -> float:
    """Max deviation of the single-layer potential from its boundary constant,
    evaluated at off-node boundary probes (exact geometry supplied by the
    caller, e.g. a 2x-refined discretization of the same shapes)."""
    if isinstance(probe_curves, DiscretizedCurve):
        probe_curves = [probe_curves]
    if len(probe_curves) != len(bd.curves):
        raise ValidationError("need one probe curve per solved curve")
    diam = float(np.hypot(np.ptp(bd.nodes.real), np.ptp(bd.nodes.imag)))
    scale = 1.0 / diam
    gamma_scaled = math.log(bd.capacity * scale)
    worst = 0.0
    for bi, probe in enumerate(probe_curves):
        tp = _curve_params(probe)
        zp = probe.vertices * scale
        u = np.zeros(len(probe))
        for bj in range(len(bd.curves)):
            n = len(bd.curves[bj])
            psi_j = bd.psi[bd.block_slices[bj]]
            zj = bd.curves[bj].vertices * scale
            if bi == bj:
                w = _log_sin_weights_at(tp, bd.params[bj], n)
                dist = np.abs(zp[:, None] - zj[None, :])
                sinf = np.abs(2.0 * np.sin((tp[:, None] - bd.params[bj][None, :]) / 2.0))
                u += w @ psi_j + (2.0 * np.pi / n) * (np.log(dist / sinf) @ psi_j)
            else:
                u += (2.0 * np.pi / n) * (np.log(np.abs(zp[:, None] - zj[None, :])) @ psi_j)
        worst = max(worst, float(np.max(np.abs(u - gamma_scaled))))
    return worst
