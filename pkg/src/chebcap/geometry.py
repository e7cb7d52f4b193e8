"""Compact planar sets the toolkit operates on.

Real-line sets are finite unions of disjoint closed intervals; planar sets
are disks, polygons and discretized Jordan curves. Cantor-type interval
unions are generated from a (ratio, depth, base) description.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class AffineMap:
    """Increasing affine map x -> scale*x + shift on the real line."""

    scale: float
    shift: float

    def __post_init__(self):
        if not (self.scale > 0.0 and math.isfinite(self.scale) and math.isfinite(self.shift)):
            raise ValidationError("affine map must have a positive finite scale")

    def __call__(self, x):
        return self.scale * np.asarray(x) + self.shift

    def inverse(self) -> "AffineMap":
        return AffineMap(1.0 / self.scale, -self.shift / self.scale)

    @property
    def is_identity(self) -> bool:
        return self.scale == 1.0 and self.shift == 0.0


@dataclass(frozen=True, eq=False)
class RealIntervalUnion:
    """Finite union of disjoint closed real intervals, kept sorted.

    Intervals are stored closed and validation is exact: touching or
    overlapping components are rejected rather than merged, so modeling
    errors surface instead of being silently absorbed.
    """

    intervals: tuple

    def __post_init__(self):
        ivs = tuple((float(a), float(b)) for a, b in self.intervals)
        if len(ivs) == 0:
            raise ValidationError("interval union must be non-empty")
        for j, (a, b) in enumerate(ivs):
            if not (math.isfinite(a) and math.isfinite(b)):
                raise ValidationError(f"interval {j} has non-finite endpoints")
            if not a < b:
                raise ValidationError(f"interval {j} must satisfy a < b, got ({a}, {b})")
        for j in range(len(ivs) - 1):
            if not ivs[j][1] < ivs[j + 1][0]:
                raise ValidationError(
                    f"intervals {j} and {j + 1} must be strictly disjoint and ordered"
                )
        object.__setattr__(self, "intervals", ivs)

    def __eq__(self, other):
        return isinstance(other, RealIntervalUnion) and self.intervals == other.intervals

    def __len__(self):
        return len(self.intervals)

    @property
    def min(self) -> float:
        return self.intervals[0][0]

    @property
    def max(self) -> float:
        return self.intervals[-1][1]

    @property
    def hull(self) -> tuple:
        return (self.min, self.max)

    @property
    def diameter(self) -> float:
        return self.max - self.min

    @property
    def lengths(self) -> np.ndarray:
        return np.array([b - a for a, b in self.intervals])

    @property
    def total_length(self) -> float:
        return float(np.sum(self.lengths))

    def endpoints(self) -> np.ndarray:
        """All 2p endpoints in increasing order."""
        return np.array([e for ab in self.intervals for e in ab])

    def contains(self, x, tol: float = 0.0) -> bool:
        x = float(x)
        return any(a - tol <= x <= b + tol for a, b in self.intervals)

    def distance(self, z):
        """Euclidean distance from complex point(s) to the union."""
        z = np.asarray(z, dtype=complex)
        x, y = z.real, np.abs(z.imag)
        best = np.full(z.shape, np.inf)
        for a, b in self.intervals:
            dx = np.maximum(np.maximum(a - x, x - b), 0.0)
            best = np.minimum(best, np.hypot(dx, y))
        return best if best.shape else float(best)

    def transform(self, m: AffineMap) -> "RealIntervalUnion":
        return RealIntervalUnion(tuple((m.scale * a + m.shift, m.scale * b + m.shift)
                                       for a, b in self.intervals))

    def intersect_window(self, lo: float, hi: float, *, min_length: float = 0.0
                         ) -> "RealIntervalUnion":
        """Exact intersection with the closed window [lo, hi].

        Components shorter than `min_length` (e.g. single touching points)
        are dropped. Raises if the intersection is empty or degenerate.
        """
        if not lo < hi:
            raise ValidationError(f"window must satisfy lo < hi, got ({lo}, {hi})")
        pieces = []
        for a, b in self.intervals:
            c, d = max(a, lo), min(b, hi)
            if d - c > min_length:
                pieces.append((c, d))
        if not pieces:
            raise ValidationError(
                f"window [{lo}, {hi}] meets the set only in a degenerate point set"
            )
        return RealIntervalUnion(tuple(pieces))


@dataclass(frozen=True)
class CantorSpec:
    """Generator for Cantor-type interval unions: keep the two outer
    `ratio`-fraction subintervals of every interval, `depth` times."""

    ratio: float
    depth: int
    base: tuple = (0.0, 1.0)

    def __post_init__(self):
        if not 0.0 < self.ratio < 0.5:
            raise ValidationError(f"ratio must lie in (0, 1/2), got {self.ratio}")
        if not (isinstance(self.depth, int) and self.depth >= 0):
            raise ValidationError(f"depth must be a non-negative integer, got {self.depth}")
        a, b = self.base
        if not a < b:
            raise ValidationError(f"base must satisfy a < b, got ({a}, {b})")


def build_cantor(spec: CantorSpec) -> RealIntervalUnion:
    """Depth-L Cantor iterate: 2^L intervals of length (b-a)*ratio^L."""
    ivs = [tuple(map(float, spec.base))]
    for _ in range(spec.depth):
        nxt = []
        for a, b in ivs:
            h = (b - a) * spec.ratio
            nxt.append((a, a + h))
            nxt.append((b - h, b))
        ivs = nxt
    return RealIntervalUnion(tuple(ivs))


def normalize_to_I(K: RealIntervalUnion):
    """Map K onto [-1, 1] by the unique increasing affine map with
    min(K) -> -1 and max(K) -> 1. Returns (image, map)."""
    lo, hi = K.min, K.max
    if not hi - lo > 0.0:
        raise ValidationError("cannot normalize a degenerate (single point) set")
    m = AffineMap(2.0 / (hi - lo), -(hi + lo) / (hi - lo))
    return K.transform(m), m


def gaps(K: RealIntervalUnion):
    """The open gaps (alpha_j, beta_j) between consecutive components."""
    return [(K.intervals[j][1], K.intervals[j + 1][0]) for j in range(len(K) - 1)]


# ---------------------------------------------------------------------------
# planar shapes


def _grading_map(tau, g):
    # symmetric algebraic grading on [0, 1]: w(t) ~ t^g near 0, 1-(1-t)^g near 1
    tg = tau ** g
    sg = (1.0 - tau) ** g
    return tg / (tg + sg)


def _grading_speed(tau, g):
    tg = tau ** g
    sg = (1.0 - tau) ** g
    return g * tau ** (g - 1.0) * (1.0 - tau) ** (g - 1.0) / (tg + sg) ** 2


@dataclass(frozen=True, eq=False)
class DiscretizedCurve:
    """Boundary curve sampled at equispaced parameter values.

    `speeds` holds |dz/dt| per node for the global parameter t in [0, 2pi)
    when the generating parametrization is known; it is None for raw vertex
    input, in which case downstream solvers recover it spectrally.
    """

    vertices: np.ndarray
    closed: bool = True
    grading: float = 1.0
    speeds: np.ndarray | None = None

    def __post_init__(self):
        v = np.ascontiguousarray(self.vertices, dtype=np.complex128)
        if v.ndim != 1 or v.shape[0] < 8:
            raise ValidationError("a discretized curve needs at least 8 vertices")
        dif = np.abs(np.diff(v))
        if self.closed:
            dif = np.append(dif, abs(v[0] - v[-1]))
            if v[0] == v[-1]:
                raise ValidationError("closed curves must not repeat the first vertex")
        if np.any(dif == 0.0):
            raise ValidationError("consecutive vertices must be distinct")
        if not self.grading >= 1.0:
            raise ValidationError("grading exponent must be >= 1")
        object.__setattr__(self, "vertices", v)
        if self.speeds is not None:
            s = np.ascontiguousarray(self.speeds, dtype=np.float64)
            if s.shape != v.shape:
                raise ValidationError("speeds must match vertices in length")
            object.__setattr__(self, "speeds", s)

    def __len__(self):
        return self.vertices.shape[0]

    @property
    def diameter(self) -> float:
        v = self.vertices
        # hull-corner bound is enough for scaling decisions
        return float(np.hypot(np.ptp(v.real), np.ptp(v.imag)))

    def distance(self, z):
        """Distance from complex point(s) to the vertex polyline."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        a = self.vertices
        b = np.roll(a, -1) if self.closed else a[1:]
        a = a if self.closed else a[:-1]
        seg = b - a
        ss = (seg.conj() * seg).real
        out = np.empty(z.shape[0])
        for i, zi in enumerate(z):
            t = np.clip(((zi - a).conj() * seg).real / ss, 0.0, 1.0)
            out[i] = np.min(np.abs(zi - (a + t * seg)))
        return out if out.shape[0] > 1 else float(out[0])

    def resampled(self, m: int) -> "DiscretizedCurve":
        """Trigonometric resampling of a closed curve to m vertices."""
        if not self.closed:
            raise ValidationError("resampling is only supported for closed curves")
        n = len(self)
        spec = np.fft.fft(self.vertices)
        out = np.zeros(m, dtype=complex)
        h = n // 2
        out[:h] = spec[:h]
        out[m - (n - h):] = spec[h:]
        v = np.fft.ifft(out) * (m / n)
        sp = None
        if self.speeds is not None:
            sspec = np.fft.fft(self.speeds)
            sout = np.zeros(m, dtype=complex)
            sout[:h] = sspec[:h]
            sout[m - (n - h):] = sspec[h:]
            sp = np.fft.ifft(sout).real * (m / n)
        return DiscretizedCurve(v, closed=True, grading=self.grading, speeds=sp)


@dataclass(frozen=True)
class Segment:
    """Straight segment; real-line machinery handles it, not the curve pipeline."""

    a: complex
    b: complex

    def __post_init__(self):
        if self.a == self.b:
            raise ValidationError("segment endpoints must be distinct")

    @property
    def diameter(self) -> float:
        return abs(self.b - self.a)

    def distance(self, z):
        z = np.asarray(z, dtype=complex)
        seg = self.b - self.a
        t = np.clip(((z - self.a) * np.conj(seg)).real / abs(seg) ** 2, 0.0, 1.0)
        d = np.abs(z - (self.a + t * seg))
        return d if d.shape else float(d)


@dataclass(frozen=True)
class Disk:
    center: complex
    radius: float

    def __post_init__(self):
        if not self.radius > 0.0:
            raise ValidationError("disk radius must be positive")

    @property
    def diameter(self) -> float:
        return 2.0 * self.radius

    def distance(self, z):
        """Distance to the closed disk (0 inside)."""
        z = np.asarray(z, dtype=complex)
        d = np.maximum(np.abs(z - self.center) - self.radius, 0.0)
        return d if d.shape else float(d)

    def boundary_distance(self, z):
        z = np.asarray(z, dtype=complex)
        d = np.abs(np.abs(z - self.center) - self.radius)
        return d if d.shape else float(d)


@dataclass(frozen=True, eq=False)
class Polygon:
    vertices: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(self.vertices, dtype=np.complex128)
        if v.ndim != 1 or v.shape[0] < 3:
            raise ValidationError("a polygon needs at least 3 vertices")
        if np.any(np.abs(np.diff(np.append(v, v[0]))) == 0.0):
            raise ValidationError("consecutive polygon vertices must be distinct")
        object.__setattr__(self, "vertices", v)

    @property
    def diameter(self) -> float:
        v = self.vertices
        return float(max(abs(a - b) for a in v for b in v))

    def distance(self, z):
        """Distance to the polygon boundary."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        a = self.vertices
        b = np.roll(a, -1)
        seg = b - a
        ss = (seg.conj() * seg).real
        out = np.empty(z.shape[0])
        for i, zi in enumerate(z):
            t = np.clip(((zi - a).conj() * seg).real / ss, 0.0, 1.0)
            out[i] = np.min(np.abs(zi - (a + t * seg)))
        return out if out.shape[0] > 1 else float(out[0])


@dataclass(frozen=True, eq=False)
class ShapeSet:
    """A family of pairwise-disjoint shapes (mixed planar/real components).

    Disjointness is validated at discretization resolution only; exact
    curve-curve separation tests are out of scope.
    """

    components: tuple

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise ValidationError("shape set must be non-empty")
        clouds = [_point_cloud(c) for c in comps]
        for i in range(len(comps)):
            for j in range(i + 1, len(comps)):
                d = np.min(np.abs(clouds[i][:, None] - clouds[j][None, :]))
                if not d > 0.0:
                    raise ValidationError(
                        f"components {i} and {j} are not disjoint at discretization resolution"
                    )
        object.__setattr__(self, "components", comps)


def _point_cloud(shape, m: int = 128) -> np.ndarray:
    if isinstance(shape, RealIntervalUnion):
        pts = [np.linspace(a, b, max(8, m // len(shape))) for a, b in shape.intervals]
        return np.concatenate(pts).astype(complex)
    if isinstance(shape, Segment):
        return shape.a + (shape.b - shape.a) * np.linspace(0.0, 1.0, m)
    if isinstance(shape, DiscretizedCurve):
        return shape.vertices
    if isinstance(shape, (Disk, Polygon)):
        return discretize_boundary(shape, max(16, m)).vertices
    raise ValidationError(f"unsupported shape {type(shape).__name__}")


def discretize_boundary(shape, m: int, grading: float = 2.0) -> DiscretizedCurve:
    """Sample m boundary points of a planar shape.

    Disks are sampled at uniform angles; polygon sides cluster algebraically
    toward corners with the given grading exponent (node distance from the
    corner scales like (i/m_side)^grading). Node speeds |dz/dt| for the
    global parameter are recorded for downstream quadrature.
    """
    if m < 16:
        raise ValidationError(f"need at least 16 boundary points, got {m}")
    if isinstance(shape, (Segment, RealIntervalUnion)):
        raise ValidationError(
            "segments and interval unions belong to the real-line pipeline; "
            "use solve_real_equilibrium / solve_real_monic"
        )
    if isinstance(shape, Disk):
        t = 2.0 * np.pi * np.arange(m) / m
        v = shape.center + shape.radius * np.exp(1j * t)
        return DiscretizedCurve(v, closed=True, grading=grading,
                                speeds=np.full(m, shape.radius))
    if isinstance(shape, Polygon):
        corners = shape.vertices
        p = corners.shape[0]
        counts = [m // p + (1 if i < m % p else 0) for i in range(p)]
        if min(counts) < 4:
            raise ValidationError(f"{m} points spread over {p} sides is too coarse")
        verts, speeds = [], []
        for i, cnt in enumerate(counts):
            a, b = corners[i], corners[(i + 1) % p]
            tau = (np.arange(cnt) + 0.5) / cnt
            verts.append(a + (b - a) * _grading_map(tau, grading))
            # side i spans a parameter length 2*pi*cnt/m
            speeds.append(abs(b - a) * _grading_speed(tau, grading) * m / (2.0 * np.pi * cnt))
        return DiscretizedCurve(np.concatenate(verts), closed=True, grading=grading,
                                speeds=np.concatenate(speeds))
    if isinstance(shape, DiscretizedCurve):
        return shape.resampled(m) if len(shape) != m else shape
    raise ValidationError(f"unsupported shape tag {type(shape).__name__}")
