"""Slit half-strip data for real interval unions.

The complement of K in the upper half-plane maps conformally onto a vertical
half-strip {0 < Re w < pi, Im w > 0} with one vertical slit per gap of K.
Slit positions u_j are pi times the equilibrium mass left of the gap; slit
heights v_j are the Green function maxima over the gaps, attained at the
zeros of the gap polynomial. Their sum V(K) controls the Widom factors, and
the set can be fattened by absorbing every gap below a Green level s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .equilibrium import EquilibriumReal, green_complex, green_eval
from .errors import SolverError, ValidationError
from .geometry import RealIntervalUnion, gaps

_NORMALIZED_TOL = 1e-12
_UCHECK_TOL = 1e-6


@dataclass(frozen=True)
class Slit:
    u: float
    v: float
    gap_index: int


@dataclass(frozen=True, eq=False)
class LevinStrip:
    """Strip data (u_j, v_j) for one normalized interval union."""

    slits: tuple
    V: float
    capacity: float
    gap_peaks: np.ndarray
    intervals: RealIntervalUnion

    def __post_init__(self):
        us = [s.u for s in self.slits]
        if any(not 0.0 < u < math.pi for u in us):
            raise SolverError("slit positions must lie strictly inside (0, pi)")
        if any(us[i] >= us[i + 1] for i in range(len(us) - 1)):
            raise SolverError("slit positions must be strictly increasing")
        if any(s.v <= 0.0 for s in self.slits):
            raise SolverError("slit heights must be positive")

    @property
    def max_height(self) -> float:
        return max((s.v for s in self.slits), default=0.0)


def _require_normalized(K: RealIntervalUnion):
    if abs(K.min + 1.0) > _NORMALIZED_TOL or abs(K.max - 1.0) > _NORMALIZED_TOL:
        raise ValidationError(
            f"set must be normalized to [-1, 1] with both endpoints attained, "
            f"got hull {K.hull}"
        )


def _gap_peak(eq: EquilibriumReal, al: float, be: float) -> float:
    """Zero of the gap polynomial inside (al, be), by bisection."""
    qa = eq.q_eval(al)
    qb = eq.q_eval(be)
    if qa == 0.0:
        return al
    if qb == 0.0:
        return be
    if qa * qb > 0.0:
        raise SolverError("gap polynomial zero is not bracketed in the gap")
    lo, hi = al, be
    flo = qa
    tol = 1e-13 * eq.intervals.diameter
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = eq.q_eval(mid)
        if fm == 0.0:
            return mid
        if flo * fm < 0.0:
            hi = mid
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


def build_levin(eq: EquilibriumReal) -> LevinStrip:
    """Slit data for the equilibrium of a normalized interval union.

    u_j is computed from the component masses; an independent bookkeeping of
    the complex log-potential's imaginary part must reproduce it to 1e-6, or
    the build fails loudly.
    """
    K = eq.intervals
    _require_normalized(K)
    glist = gaps(K)
    cum = np.cumsum(eq.masses)
    slits = []
    peaks = []
    for j, (al, be) in enumerate(glist):
        xh = _gap_peak(eq, al, be)
        peaks.append(xh)
        v = green_eval(eq, xh)
        u = math.pi * float(cum[j])
        u_check = math.pi - green_complex(eq, complex(xh)).imag
        if abs(u - u_check) > _UCHECK_TOL:
            raise SolverError(
                f"slit position cross-check failed: {u} vs {u_check}", gap_index=j
            )
        slits.append(Slit(u=u, v=float(v), gap_index=j))
    return LevinStrip(
        slits=tuple(slits),
        V=float(sum(s.v for s in slits)),
        capacity=eq.capacity,
        gap_peaks=np.array(peaks),
        intervals=K,
    )


def _bisect_level(eq: EquilibriumReal, s: float, lo: float, hi: float,
                  increasing: bool) -> float:
    """Point in [lo, hi] where the Green function crosses level s; g is
    strictly monotone on each half of a gap."""
    tol = 1e-14 * eq.intervals.diameter
    a, b = lo, hi
    while b - a > tol:
        mid = 0.5 * (a + b)
        gm = green_eval(eq, mid)
        above = gm > s
        if above == increasing:
            b = mid
        else:
            a = mid
    return 0.5 * (a + b)


def sublevel_truncate(K: RealIntervalUnion, eq: EquilibriumReal, s: float
                      ) -> RealIntervalUnion:
    """Fatten K by the sublevel set: gaps whose Green maximum is <= s close
    entirely; taller gaps shrink to the points where g equals s."""
    if K != eq.intervals:
        raise ValidationError("interval union does not match the equilibrium solve")
    _require_normalized(K)
    if not s > 0.0:
        raise ValidationError(f"level must be positive, got {s}")
    glist = gaps(K)
    ivs = list(K.intervals)
    out = []
    cur_a, cur_b = ivs[0]
    for j, (al, be) in enumerate(glist):
        xh = _gap_peak(eq, al, be)
        v = green_eval(eq, xh)
        if v <= s:
            cur_b = ivs[j + 1][1]  # absorb the gap
        else:
            l = _bisect_level(eq, s, al, xh, increasing=True)
            r = _bisect_level(eq, s, xh, be, increasing=False)
            out.append((cur_a, l))
            cur_a, cur_b = r, ivs[j + 1][1]
    out.append((cur_a, cur_b))
    return RealIntervalUnion(tuple(out))


def crosscut_ratios(strip: LevinStrip, heights):
    """Max height-to-width ratio of the horizontal strip crosscuts.

    At height b the crosscut walls are the strip sides {0, pi} plus every
    slit strictly taller than b; the reported ratio is b over the narrowest
    resulting corridor.
    """
    heights = list(heights)
    if not heights:
        raise ValidationError("heights list must be non-empty")
    vmax = strip.max_height
    if vmax == 0.0:
        raise ValidationError("strip has no slits; crosscut ratios are undefined")
    out = []
    for b in heights:
        if not 0.0 < b <= vmax:
            raise ValidationError(f"height {b} outside (0, max slit height {vmax}]")
        walls = [0.0] + [s.u for s in strip.slits if s.v > b] + [math.pi]
        widths = np.diff(walls)
        out.append((float(b), float(b / np.min(widths))))
    return out
