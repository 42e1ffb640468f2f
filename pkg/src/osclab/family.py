"""Five-parameter integrable family for the quadratic nonlinearity (m = 2).

Here the coefficient alpha2(t) is not closed-form: it solves

    alpha2''' + 4 omega^2 alpha2' - 2 alpha1(t) alpha2^(-5/2) = 0,
    alpha1(t) = (1/2) C1 cos(omega t) + (1/2) C2 sin(omega t),

a third-order nonlinear ODE, so three initial values (alpha2, alpha2',
alpha2'') join the two driving constants (C1, C2) to make five free
parameters.  g(t) = alpha2(t)^(-5/2) as always.

alpha2 is carried inside the integration state (a 5-component system
z, p, alpha2, alpha2', alpha2'') rather than precomputed on a grid:
the oscillator needs g at every internal stage time, and joint
integration keeps interpolation error out of the invariant test.

With C1 = C2 = 0 the coefficient ODE becomes linear and its solution is
exactly the trig family; ``to_trig_alpha`` maps initial values to
(A, B, C) for that case.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import CoefficientSingularError, ZeroReferenceError
from .integrate import AdaptiveConfig, integrate_adaptive
from .invariant import build_coeffs, drift, drift_absolute
from .model import EPS_POS, OscillatorSpec, TrigAlpha


@dataclass(frozen=True)
class FiveParamSpec:
    """Driving constants and initial coefficient values at t = 0."""

    omega: float
    C1: float
    C2: float
    alpha2_0: float
    alpha2p_0: float
    alpha2pp_0: float

    def __post_init__(self):
        if not (self.omega > 0.0):
            raise ValueError(f"omega must be positive, got {self.omega}")
        if not (self.alpha2_0 > EPS_POS):
            raise ValueError(f"alpha2(0) must exceed {EPS_POS}, got {self.alpha2_0}")


def fiveparam_from_json(obj: dict) -> FiveParamSpec:
    try:
        a20, a2p0, a2pp0 = (float(v) for v in obj["alpha2"])
        return FiveParamSpec(
            omega=float(obj["omega"]),
            C1=float(obj["C1"]),
            C2=float(obj["C2"]),
            alpha2_0=a20,
            alpha2p_0=a2p0,
            alpha2pp_0=a2pp0,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed five-parameter spec: {exc}") from exc


def fiveparam_to_json(fp: FiveParamSpec) -> dict:
    return {
        "omega": fp.omega,
        "C1": fp.C1,
        "C2": fp.C2,
        "alpha2": [fp.alpha2_0, fp.alpha2p_0, fp.alpha2pp_0],
    }


def to_trig_alpha(fp: FiveParamSpec) -> TrigAlpha:
    """Closed-form (A, B, C) matching the initial values when C1 = C2 = 0."""
    if fp.C1 != 0.0 or fp.C2 != 0.0:
        raise ValueError("the trig closed form requires C1 = C2 = 0")
    four_w2 = 4.0 * fp.omega * fp.omega
    A = fp.alpha2_0 + fp.alpha2pp_0 / four_w2
    B = -fp.alpha2pp_0 / four_w2
    C = fp.alpha2p_0 / (2.0 * fp.omega)
    return TrigAlpha(A=A, B=B, C=C, omega=fp.omega)


def alpha1_eval(fp: FiveParamSpec, t: float):
    """alpha1(t) and its derivative, both in closed form."""
    c = math.cos(fp.omega * t)
    s = math.sin(fp.omega * t)
    al1 = 0.5 * (fp.C1 * c + fp.C2 * s)
    al1p = 0.5 * fp.omega * (fp.C2 * c - fp.C1 * s)
    return (al1, al1p)


def augmented_field(fp: FiveParamSpec, t: float, y):
    """Joint derivatives of (z, p, alpha2, alpha2', alpha2'').

    The bracket 2*alpha1(t) in the coefficient ODE always comes through
    alpha1_eval, never from a re-derived expression.
    """
    z, p, a2, a2p, a2pp = y
    if a2 <= EPS_POS:
        raise CoefficientSingularError(f"alpha2(t={t}) = {a2} <= {EPS_POS}")
    w2 = fp.omega * fp.omega
    g = a2 ** -2.5
    al1, _ = alpha1_eval(fp, t)
    a2ppp = -(4.0 * w2) * a2p + 2.0 * al1 * g
    return (p, -w2 * z - g * (z * z), a2p, a2pp, a2ppp)


def make_augmented_field(fp: FiveParamSpec):
    """Closure over the spec for the integrator hot loop.

    The driving bracket is always 2*alpha1_eval(...), matching
    augmented_field exactly (2 * (1/2 * x) is exact in binary floats).
    """
    w2 = fp.omega * fp.omega
    four_w2 = 4.0 * w2

    def field(t, y):
        z, p, a2, a2p, a2pp = y
        if a2 <= EPS_POS:
            raise CoefficientSingularError(f"alpha2(t={t}) = {a2} <= {EPS_POS}")
        g = a2 ** -2.5
        al1, _ = alpha1_eval(fp, t)
        a2ppp = -four_w2 * a2p + 2.0 * al1 * g
        return (p, -w2 * z - g * (z * z), a2p, a2pp, a2ppp)

    return field


def alpha2_at(fp: FiveParamSpec, t: float, rtol: float = 1e-12, atol: float = 1e-14):
    """(alpha2, alpha2', alpha2'') at time t >= 0 by direct integration.

    Each call integrates the coefficient ODE from t = 0, so this is a
    diagnostic path; production runs carry alpha2 in the joint state.
    """
    if t < 0.0:
        raise ValueError("the coefficient state is defined by forward integration from t = 0")
    y0 = (fp.alpha2_0, fp.alpha2p_0, fp.alpha2pp_0)
    if t == 0.0:
        return y0
    # pad with two dummy oscillator components to satisfy the integrator
    field = make_augmented_field(fp)
    cfg = AdaptiveConfig(rtol=rtol, atol=atol, t_end=t, record=False)
    traj = integrate_adaptive(field, (0.0, 0.0) + y0, cfg)
    if traj.status != "completed":
        raise CoefficientSingularError(f"coefficient ODE terminated with status {traj.status}")
    a2, a2p, a2pp = traj.ys[-1, 2:]
    return (float(a2), float(a2p), float(a2pp))


def integrate_family(
    fp: FiveParamSpec,
    z0: float,
    p0: float,
    t_end: float,
    rtol: float = 1e-12,
    atol: float = 1e-12,
    escape_bound: float = math.inf,
    record: bool = True,
):
    """Integrate the joint system and report invariant drift.

    Returns (Trajectory, DriftReport).  The invariant uses the alpha2
    columns carried in the state.  When the initial invariant is exactly
    zero (for example z0 = p0 = 0) the drift falls back to absolute
    deviation, flagged by report.mode.
    """
    field = make_augmented_field(fp)
    y0 = (z0, p0, fp.alpha2_0, fp.alpha2p_0, fp.alpha2pp_0)
    cfg = AdaptiveConfig(
        rtol=rtol, atol=atol, t_end=t_end, escape_bound=escape_bound, record=record
    )
    traj = integrate_adaptive(field, y0, cfg)
    spec = OscillatorSpec(omega=fp.omega, m=2, g_source=fp)
    coeffs = build_coeffs(spec)
    try:
        report = drift(traj, coeffs)
    except ZeroReferenceError:
        report = drift_absolute(traj, coeffs)
    return traj, report
