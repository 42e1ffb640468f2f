"""Quadratic first integral I = a0(z,t) + a1(z,t) p + a2(z,t) p^2.

For the trig coefficient family (any integer m >= 2) and for the
five-parameter m = 2 family the coefficient functions are

    a2(z,t) = alpha2(t)
    a1(z,t) = -alpha2'(t) z + alpha1(t)
    a0(z,t) = omega^2 alpha2 z^2 + (2/(m+1)) alpha2 g z^(m+1)
              - alpha1'(t) z + (1/2) alpha2''(t) z^2

with alpha1 identically zero except in the five-parameter case.  The
additive constant alpha0 is fixed to zero: the defining relations only
force alpha0' = 0, and a constant shifts every level set equally.

This module evaluates I, measures its drift along trajectories, and
verifies the four defining relations

    -a1 (z f + z^m g) + da0/dt                 = 0
    -2 a2 (z f + z^m g) + da0/dz + da1/dt      = 0
    da1/dz + da2/dt                            = 0
    da2/dz                                     = 0

with the constant linear coefficient f = omega^2 hard-coded.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UnsupportedSourceError, ZeroReferenceError
from .model import (
    OscillatorSpec,
    Sampled,
    State,
    Trajectory,
    TrigFamily,
    g_exponent,
    int_pow,
    trig_alpha2_eval,
)


@dataclass(frozen=True)
class InvariantCoeffs:
    """Coefficient bundle; functions are derived on evaluation, not stored."""

    spec: OscillatorSpec
    alpha1_c: tuple = None
    alpha0: float = 0.0


def build_coeffs(spec: OscillatorSpec) -> InvariantCoeffs:
    src = spec.g_source
    if isinstance(src, TrigFamily):
        return InvariantCoeffs(spec=spec)
    if isinstance(src, Sampled):
        raise UnsupportedSourceError("a sampled g(t) carries no known invariant")
    from .family import FiveParamSpec

    if isinstance(src, FiveParamSpec):
        if spec.m != 2:
            raise UnsupportedSourceError(
                f"the five-parameter coefficient family exists only for m=2, got m={spec.m}"
            )
        return InvariantCoeffs(spec=spec, alpha1_c=(src.C1, src.C2))
    raise UnsupportedSourceError(f"unknown g source {type(src).__name__}")


def _parts(c: InvariantCoeffs, t: float):
    """(a2, d1, d2, d3, al1, al1p, al1pp, g, gp) at time t.

    d3 and the alpha1 values satisfy the coefficient relations of the
    family in question, so the residuals below cancel identically.
    """
    spec = c.spec
    src = spec.g_source
    w2 = spec.omega * spec.omega
    ex = g_exponent(spec.m)
    if isinstance(src, TrigFamily):
        a2, d1, d2, d3 = trig_alpha2_eval(src.alpha, t)
        g = a2 ** ex
        gp = ex * a2 ** (ex - 1.0) * d1
        return (a2, d1, d2, d3, 0.0, 0.0, 0.0, g, gp)
    from .family import alpha1_eval, alpha2_at

    a2, d1, d2 = alpha2_at(src, t)
    al1, al1p = alpha1_eval(src, t)
    al1pp = -w2 * al1
    g = a2 ** ex
    gp = ex * a2 ** (ex - 1.0) * d1
    d3 = -(4.0 * w2) * d1 + 2.0 * al1 * g
    return (a2, d1, d2, d3, al1, al1p, al1pp, g, gp)


def eval_invariant(c: InvariantCoeffs, s: State) -> float:
    spec = c.spec
    w2 = spec.omega * spec.omega
    a2, d1, d2, _, al1, al1p, _, g, _ = _parts(c, s.t)
    z, p = s.z, s.p
    zm1 = int_pow(z, spec.m + 1)
    return (
        a2 * p * p
        + (al1 - d1 * z) * p
        + (w2 * a2 + 0.5 * d2) * z * z
        + (2.0 / (spec.m + 1)) * a2 * g * zm1
        - al1p * z
        + c.alpha0
    )


def invariant_series(c: InvariantCoeffs, traj: Trajectory) -> np.ndarray:
    """I(t) along a whole trajectory, vectorized.

    Trig sources use the closed-form coefficient; a five-parameter
    source requires the augmented trajectory so that alpha2 and its two
    derivatives are read from columns 2..4 of the state.
    """
    spec = c.spec
    src = spec.g_source
    w2 = spec.omega * spec.omega
    ex = g_exponent(spec.m)
    ts = traj.ts
    z = traj.ys[:, 0]
    p = traj.ys[:, 1]
    if isinstance(src, TrigFamily):
        a = src.alpha
        th = (2.0 * a.omega) * ts
        cs = np.cos(th)
        sn = np.sin(th)
        osc = a.B * cs + a.C * sn
        a2 = a.A + osc
        d1 = (2.0 * a.omega) * (a.C * cs - a.B * sn)
        d2 = -(4.0 * a.omega * a.omega) * osc
        al1 = 0.0
        al1p = 0.0
    else:
        if traj.ys.shape[1] < 5:
            raise ValueError("five-parameter invariant needs the augmented (5-column) state")
        a2 = traj.ys[:, 2]
        d1 = traj.ys[:, 3]
        d2 = traj.ys[:, 4]
        half_w = 0.5 * spec.omega
        cs = np.cos(spec.omega * ts)
        sn = np.sin(spec.omega * ts)
        al1 = 0.5 * (src.C1 * cs + src.C2 * sn)
        al1p = half_w * (src.C2 * cs - src.C1 * sn)
    g = a2 ** ex
    return (
        a2 * p * p
        + (al1 - d1 * z) * p
        + (w2 * a2 + 0.5 * d2) * z * z
        + (2.0 / (spec.m + 1)) * a2 * g * z ** (spec.m + 1)
        - al1p * z
        + c.alpha0
    )


@dataclass(frozen=True)
class DriftReport:
    """Invariant drift along one trajectory.

    mode "relative": series = I/I0 - 1 and max_rel = max |series|.
    mode "absolute": series = I - I0 (used when I0 is exactly zero, for
    example the rest solution); max_rel then holds the absolute bound.
    """

    mode: str
    max_rel: float
    ts: np.ndarray
    series: np.ndarray


def drift(traj: Trajectory, c: InvariantCoeffs) -> DriftReport:
    series = invariant_series(c, traj)
    i0 = float(series[0])
    if abs(i0) < 1e-300:
        raise ZeroReferenceError(f"initial invariant {i0} too small for relative drift")
    rel = series / i0 - 1.0
    return DriftReport(mode="relative", max_rel=float(np.max(np.abs(rel))), ts=traj.ts, series=rel)


def drift_absolute(traj: Trajectory, c: InvariantCoeffs) -> DriftReport:
    series = invariant_series(c, traj)
    dev = series - float(series[0])
    return DriftReport(mode="absolute", max_rel=float(np.max(np.abs(dev))), ts=traj.ts, series=dev)


def _residuals(m, omega, z, a2, d1, d2, d3, al1, al1p, al1pp, g, gp):
    """The four defining relations, assembled term by term.

    Split out from pde_residual so tests can feed deliberately
    inconsistent parts (say, g evaluated from a perturbed coefficient)
    and watch the residuals move away from zero.
    """
    w2 = omega * omega
    zm = int_pow(z, m)
    zm1 = zm * z
    force = z * w2 + zm * g
    a1 = -d1 * z + al1
    da0_dt = (
        w2 * d1 * z * z
        + (2.0 / (m + 1)) * zm1 * (d1 * g + a2 * gp)
        - al1pp * z
        + 0.5 * d3 * z * z
    )
    da0_dz = 2.0 * w2 * a2 * z + 2.0 * a2 * g * zm - al1p + d2 * z
    da1_dt = -d2 * z + al1p
    da1_dz = -d1
    da2_dt = d1
    da2_dz = 0.0
    r_t = -a1 * force + da0_dt
    r_mixed = -2.0 * a2 * force + da0_dz + da1_dt
    r_shear = da1_dz + da2_dt
    r_p3 = da2_dz
    return (r_t, r_mixed, r_shear, r_p3)


def pde_residual(c: InvariantCoeffs, z: float, t: float):
    """Residuals of the four defining relations at one point (z, t).

    All four vanish up to roundoff for a correctly constructed
    invariant; their weighted sum r_t + r_mixed p + r_shear p^2 + r_p3 p^3
    is the total time derivative of I along the flow.
    """
    spec = c.spec
    a2, d1, d2, d3, al1, al1p, al1pp, g, gp = _parts(c, t)
    return _residuals(spec.m, spec.omega, z, a2, d1, d2, d3, al1, al1p, al1pp, g, gp)
