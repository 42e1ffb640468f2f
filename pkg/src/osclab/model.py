"""Core model: the oscillator z'' + omega^2 z + g(t) z^m = 0 and its g(t) sources.

The forcing coefficient g(t) comes from one of three sources:

* ``TrigFamily`` -- g = alpha2(t)^(-(m+3)/2) with
  alpha2(t) = A + B cos(2 omega t) + C sin(2 omega t).  This is the
  closed-form coefficient family for which a quadratic first integral
  exists at every integer m >= 2.
* ``FiveParam`` -- the m = 2 family in which alpha2(t) solves a nonlinear
  third-order ODE driven by two extra constants (C1, C2); see
  :mod:`osclab.family`.
* ``Sampled`` -- tabulated (t, g) knots with cubic interpolation, for
  systems without a known invariant.

All types here are immutable value objects; every operation is a pure
function of its inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

from .errors import CoefficientSingularError

# Floor for alpha2: below this the negative half-integer power of alpha2
# amplifies roundoff catastrophically, so evaluation is refused instead.
EPS_POS = 1e-9


@dataclass(frozen=True)
class TrigAlpha:
    """Coefficient alpha2(t) = A + B cos(2 omega t) + C sin(2 omega t)."""

    A: float
    B: float
    C: float
    omega: float

    def __post_init__(self):
        if not (self.omega > 0.0):
            raise ValueError(f"omega must be positive, got {self.omega}")
        if not (self.A > math.hypot(self.B, self.C)):
            raise ValueError(
                "need A > sqrt(B^2 + C^2) so alpha2(t) stays positive; "
                f"got A={self.A}, R={math.hypot(self.B, self.C)}"
            )

    @property
    def R(self) -> float:
        """Oscillation amplitude sqrt(B^2 + C^2) of alpha2 about A."""
        return math.hypot(self.B, self.C)

    @property
    def phi(self) -> float:
        """Phase of the (B, C) pair, alpha2 = A + R cos(2 omega t - phi)."""
        return math.atan2(self.C, self.B)


@dataclass(frozen=True)
class TrigFamily:
    alpha: TrigAlpha


@dataclass(frozen=True)
class Sampled:
    """Tabulated g(t) on an increasing knot grid, cubic interpolation.

    Evaluation outside the knot range is refused rather than extrapolated.
    """

    ts: tuple
    gs: tuple

    def __post_init__(self):
        if len(self.ts) != len(self.gs):
            raise ValueError("knot abscissae and values differ in length")
        if len(self.ts) < 4:
            raise ValueError("cubic interpolation needs at least 4 knots")
        if any(b <= a for a, b in zip(self.ts, self.ts[1:])):
            raise ValueError("knot times must be strictly increasing")

    @cached_property
    def _spline(self):
        from scipy.interpolate import CubicSpline

        return CubicSpline(np.asarray(self.ts), np.asarray(self.gs))

    def value_at(self, t: float) -> float:
        if t < self.ts[0] or t > self.ts[-1]:
            raise CoefficientSingularError(
                f"t={t} outside sampled range [{self.ts[0]}, {self.ts[-1]}]")
        return float(self._spline(t))


@dataclass(frozen=True)
class OscillatorSpec:
    """One concrete system z'' + omega^2 z + g(t) z^m = 0."""

    omega: float
    m: int
    g_source: object

    def __post_init__(self):
        if not (self.omega > 0.0):
            raise ValueError(f"omega must be positive, got {self.omega}")
        if not (isinstance(self.m, int) and self.m >= 2):
            raise ValueError(f"m must be an integer >= 2, got {self.m!r}")
        src = self.g_source
        if isinstance(src, TrigFamily):
            if src.alpha.omega != self.omega:
                raise ValueError(
                    "trig coefficient must use the oscillator frequency: "
                    f"{src.alpha.omega} != {self.omega}"
                )
        else:
            src_omega = getattr(src, "omega", None)
            if src_omega is not None and src_omega != self.omega:
                raise ValueError(
                    f"g source frequency {src_omega} != oscillator frequency {self.omega}"
                )


def trig_spec(A: float, B: float, C: float, omega: float, m: int = 2) -> OscillatorSpec:
    """Convenience constructor for a trig-family oscillator."""
    return OscillatorSpec(omega=omega, m=m, g_source=TrigFamily(TrigAlpha(A, B, C, omega)))


@dataclass(frozen=True)
class State:
    t: float
    z: float
    p: float


@dataclass(frozen=True)
class Trajectory:
    """Time-ordered integrator output.

    ``ys`` has one row per recorded time and one column per state
    component; columns 0 and 1 are always (z, p).  ``status`` is one of
    "completed", "escaped", "coefficient_singular".  Exactly one of
    ``fixed_h`` / the accepted+rejected counters is meaningful, depending
    on which integrator produced the run.
    """

    ts: np.ndarray
    ys: np.ndarray
    status: str
    fixed_h: float = None
    n_accepted: int = 0
    n_rejected: int = 0

    def __post_init__(self):
        if self.ys.ndim != 2 or self.ys.shape[0] != self.ts.shape[0]:
            raise ValueError("state array must have one row per time")
        if self.ts.shape[0] == 0:
            raise ValueError("trajectory cannot be empty")
        if self.ts.shape[0] > 1 and not np.all(np.diff(self.ts) > 0.0):
            raise ValueError("trajectory times must be strictly increasing")
        if self.status not in ("completed", "escaped", "coefficient_singular"):
            raise ValueError(f"unknown status {self.status!r}")

    def __len__(self) -> int:
        return int(self.ts.shape[0])

    @property
    def t(self) -> np.ndarray:
        return self.ts

    @property
    def z(self) -> np.ndarray:
        return self.ys[:, 0]

    @property
    def p(self) -> np.ndarray:
        return self.ys[:, 1]

    def state(self, i: int) -> State:
        return State(float(self.ts[i]), float(self.ys[i, 0]), float(self.ys[i, 1]))

    def final_state(self) -> State:
        return self.state(len(self) - 1)


def int_pow(z: float, m: int) -> float:
    """z**m by repeated multiplication: exact sign semantics for odd m."""
    out = z
    for _ in range(m - 1):
        out *= z
    return out


def trig_alpha2_eval(a: TrigAlpha, t: float):
    """alpha2(t) and its first three derivatives, all in closed form.

    The third derivative is computed as -(4 omega^2) * d1 from the same
    product, so d3 + 4 omega^2 d1 == 0 holds exactly in floating point.
    """
    th = 2.0 * a.omega * t
    c = math.cos(th)
    s = math.sin(th)
    osc = a.B * c + a.C * s
    d1 = 2.0 * a.omega * (a.C * c - a.B * s)
    four_w2 = 4.0 * a.omega * a.omega
    return (a.A + osc, d1, -four_w2 * osc, -(four_w2 * d1))


def g_exponent(m: int) -> float:
    return -(m + 3) / 2.0


def g_eval(spec: OscillatorSpec, t: float) -> float:
    """Forcing coefficient g(t) = alpha2(t)^(-(m+3)/2) (or interpolated)."""
    src = spec.g_source
    if isinstance(src, TrigFamily):
        a2 = trig_alpha2_eval(src.alpha, t)[0]
        if a2 <= EPS_POS:
            raise CoefficientSingularError(f"alpha2(t={t}) = {a2} <= {EPS_POS}")
        return a2 ** g_exponent(spec.m)
    if isinstance(src, Sampled):
        return src.value_at(t)
    from .family import FiveParamSpec, alpha2_at

    if isinstance(src, FiveParamSpec):
        a2 = alpha2_at(src, t)[0]
        if a2 <= EPS_POS:
            raise CoefficientSingularError(f"alpha2(t={t}) = {a2} <= {EPS_POS}")
        return a2 ** g_exponent(spec.m)
    raise TypeError(f"unknown g source {type(src).__name__}")


def vector_field(spec: OscillatorSpec, s: State):
    """(dz/dt, dp/dt) at one state; p' = -omega^2 z - g(t) z^m."""
    g = g_eval(spec, s.t)
    return (s.p, -(spec.omega * spec.omega) * s.z - g * int_pow(s.z, spec.m))


def make_field(spec: OscillatorSpec) -> Callable:
    """Tuple-in, tuple-out field closure for the integrator hot loop.

    For trig sources all constants are hoisted out of the per-call path.
    FiveParam sources are not supported here: their g(t) requires the
    jointly integrated coefficient state (see osclab.family).
    """
    m = spec.m
    w2 = spec.omega * spec.omega
    src = spec.g_source

    if isinstance(src, TrigFamily):
        a = src.alpha
        A, B, C = a.A, a.B, a.C
        two_w = 2.0 * a.omega
        ex = g_exponent(m)
        cos, sin = math.cos, math.sin

        def field(t, y):
            z, p = y
            a2 = A + B * cos(two_w * t) + C * sin(two_w * t)
            if a2 <= EPS_POS:
                raise CoefficientSingularError(f"alpha2(t={t}) = {a2} <= {EPS_POS}")
            zm = z
            for _ in range(m - 1):
                zm *= z
            return (p, -w2 * z - a2 ** ex * zm)

        return field

    if isinstance(src, Sampled):
        value_at = src.value_at

        def field(t, y):
            z, p = y
            zm = z
            for _ in range(m - 1):
                zm *= z
            return (p, -w2 * z - value_at(t) * zm)

        return field

    raise ValueError(
        f"no direct field for g source {type(src).__name__}; "
        "use osclab.family for jointly integrated coefficient states"
    )


def spec_to_json(spec: OscillatorSpec) -> dict:
    src = spec.g_source
    if isinstance(src, TrigFamily):
        a = src.alpha
        g = {"kind": "trig", "A": a.A, "B": a.B, "C": a.C}
    elif isinstance(src, Sampled):
        g = {"kind": "sampled", "t": list(src.ts), "g": list(src.gs)}
    else:
        from .family import FiveParamSpec

        if not isinstance(src, FiveParamSpec):
            raise TypeError(f"unknown g source {type(src).__name__}")
        g = {
            "kind": "five_param",
            "C1": src.C1,
            "C2": src.C2,
            "alpha2": [src.alpha2_0, src.alpha2p_0, src.alpha2pp_0],
        }
    return {"omega": spec.omega, "m": spec.m, "g": g}


def spec_from_json(obj: dict) -> OscillatorSpec:
    try:
        omega = float(obj["omega"])
        m = int(obj["m"])
        g = obj["g"]
        kind = g["kind"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed oscillator spec: {exc}") from exc
    if kind == "trig":
        src = TrigFamily(TrigAlpha(float(g["A"]), float(g["B"]), float(g["C"]), omega))
    elif kind == "sampled":
        src = Sampled(tuple(float(v) for v in g["t"]), tuple(float(v) for v in g["g"]))
    elif kind == "five_param":
        from .family import FiveParamSpec

        a20, a2p0, a2pp0 = (float(v) for v in g["alpha2"])
        src = FiveParamSpec(omega, float(g["C1"]), float(g["C2"]), a20, a2p0, a2pp0)
    else:
        raise ValueError(f"unknown g source kind {kind!r}")
    return OscillatorSpec(omega=omega, m=m, g_source=src)
