"""Stroboscopic section curve for the m = 2 trig family with C = 0.

Sampling the motion at t_k = k pi/omega freezes the coefficient at
alpha2 = A + B with alpha2' = 0 and alpha2'' = -4 omega^2 B, so the
invariant collapses to an algebraic curve in the (z, p) plane:

    (A+B) p^2 + omega^2 (A-B) z^2 + (2/3) (A+B)^(-3/2) z^3 = I0.

The admissible z-set is where the radicand of p(z) is nonnegative; its
topology changes at the critical level where the cubic acquires a
double root (see osclab.stability).  Sections with C != 0 are refused:
at t_k the coefficient derivative alpha2' no longer vanishes there and
no comparably simple curve exists.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .cubic import real_roots
from .errors import UnsupportedSourceError
from .model import OscillatorSpec, TrigFamily


@dataclass(frozen=True)
class SectionCurve:
    """Coefficients of c_p2 p^2 + c_z2 z^2 + c_z3 z^3 = I0 plus admissible set.

    ``admissible`` holds closed, disjoint, ascending z-intervals where
    the radicand is >= 0; the leftmost is always unbounded below
    (lo = -inf) because the cubic term dominates for z -> -inf.
    Zero-width intervals mark isolated tangency points.
    """

    c_p2: float
    c_z2: float
    c_z3: float
    I0: float
    admissible: tuple

    def __post_init__(self):
        if not (self.c_p2 > 0.0):
            raise ValueError(f"p^2 coefficient must be positive, got {self.c_p2}")

    def radicand(self, z: float) -> float:
        return (self.I0 - self.c_z2 * z * z - self.c_z3 * z * z * z) / self.c_p2

    def residual_at(self, z: float, p: float) -> float:
        return self.c_p2 * p * p + self.c_z2 * z * z + self.c_z3 * z * z * z - self.I0


def _admissible_intervals(c_z2: float, c_z3: float, I0: float):
    """Closed intervals where I0 - c_z2 z^2 - c_z3 z^3 >= 0 (c_z3 > 0)."""
    roots = real_roots(-c_z3, -c_z2, 0.0, I0)
    intervals = []
    sign = 1  # radicand sign left of the smallest root
    start = -math.inf
    for r, mult in roots:
        if mult % 2 == 1:
            if sign > 0:
                intervals.append((start, r))
            else:
                start = r
            sign = -sign
        elif sign < 0:
            intervals.append((r, r))
        # an even-multiplicity root inside a positive region is interior
    if sign > 0:
        intervals.append((start, math.inf))
    return tuple(intervals)


def section_curve(spec: OscillatorSpec, I0: float) -> SectionCurve:
    """Analytic strobe curve at level I0 for an m = 2, C = 0 trig system."""
    src = spec.g_source
    if not isinstance(src, TrigFamily):
        raise UnsupportedSourceError("section curves exist only for the trig family")
    if spec.m != 2:
        raise UnsupportedSourceError(f"section curve derived for m=2 only, got m={spec.m}")
    a = src.alpha
    if a.C != 0.0:
        raise UnsupportedSourceError(
            "sections require C = 0: with C != 0 the coefficient derivative "
            "does not vanish at the strobe times"
        )
    w2 = spec.omega * spec.omega
    c_p2 = a.A + a.B
    c_z2 = w2 * (a.A - a.B)
    c_z3 = (2.0 / 3.0) * c_p2 ** -1.5
    return SectionCurve(
        c_p2=c_p2,
        c_z2=c_z2,
        c_z3=c_z3,
        I0=I0,
        admissible=_admissible_intervals(c_z2, c_z3, I0),
    )


def curve_points(curve: SectionCurve, n: int):
    """(z, +p, -p) samples of the curve over its bounded admissible intervals.

    n points per interval, equally spaced including both endpoints where
    p vanishes up to root-solve roundoff.  The unbounded interval (the
    escape branch open toward z -> -inf) is skipped: it has no finite
    equal-spacing parameterization.  Returns [] when every admissible
    interval is unbounded.
    """
    if n < 2:
        raise ValueError(f"need n >= 2 points per interval, got {n}")
    out = []
    for lo, hi in curve.admissible:
        if math.isinf(lo) or math.isinf(hi):
            continue
        if hi == lo:
            zs = [lo]
        else:
            step = (hi - lo) / (n - 1)
            zs = [lo + k * step for k in range(n - 1)]
            zs.append(hi)
        for z in zs:
            rad = curve.radicand(z)
            if rad < 0.0:
                scale = (abs(curve.I0) + abs(curve.c_z2 * z * z)
                         + abs(curve.c_z3 * z * z * z) + 1e-30) / curve.c_p2
                if rad < -1e-10 * scale:
                    raise ValueError(f"negative radicand {rad} inside admissible interval")
                rad = 0.0
            p = math.sqrt(rad)
            out.append((z, p, -p))
    return out


def curve_loop(curve: SectionCurve, n: int, z_hint: float = None):
    """Closed (z, p) polyline around one bounded lobe, for plotting.

    Picks the bounded interval containing z_hint when given, else the
    first bounded one.  Returns [] if no bounded interval exists.
    """
    chosen = None
    for lo, hi in curve.admissible:
        if math.isinf(lo) or math.isinf(hi):
            continue
        if chosen is None:
            chosen = (lo, hi)
        if z_hint is not None and lo <= z_hint <= hi:
            chosen = (lo, hi)
            break
    if chosen is None:
        return []
    sub = SectionCurve(curve.c_p2, curve.c_z2, curve.c_z3, curve.I0, (chosen,))
    pts = curve_points(sub, n)
    upper = [(z, pp) for z, pp, _ in pts]
    lower = [(z, pm) for z, _, pm in reversed(pts)]
    return upper + lower[1:]


def section_residual(points, curve: SectionCurve) -> float:
    """Max relative defect of strobe points against the analytic curve."""
    denom = max(abs(curve.I0), 1e-30)
    worst = 0.0
    for s in points:
        r = abs(curve.residual_at(s.z, s.p)) / denom
        if r > worst:
            worst = r
    return worst
