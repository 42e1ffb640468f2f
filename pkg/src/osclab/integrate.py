"""Explicit Runge-Kutta integration over generic n-dimensional states.

Two integrators share one state convention (tuples of floats, n >= 2,
components 0 and 1 being z and p):

* ``integrate_fixed`` -- the classical 4th-order method with constant
  step, final step shortened to land exactly on t_end.
* ``integrate_adaptive`` -- the Dormand-Prince embedded 5(4) pair with
  standard error-per-step control.

Escape past a caller-supplied bound is an expected outcome in stability
scans, so it is reported as a trajectory status, never as an exception.
A field may abort a run by raising CoefficientSingularError; that too
becomes a status.  Genuine numerical failures (NaN states, step
underflow) raise.

Dormand-Prince 5(4) Butcher tableau (Dormand & Prince 1980, the RK45
pair used by most modern ODE suites).  Nodes c, stage matrix A, 5th
order weights b, and error weights e = b - b_hat against the embedded
4th order solution:

    c2..c7 = 1/5, 3/10, 4/5, 8/9, 1, 1
    a21 = 1/5
    a31, a32 = 3/40, 9/40
    a41..a43 = 44/45, -56/15, 32/9
    a51..a54 = 19372/6561, -25360/2187, 64448/6561, -212/729
    a61..a65 = 9017/3168, -355/33, 46732/5247, 49/176, -5103/18656
    b  = 35/384, 0, 500/1113, 125/192, -2187/6784, 11/84, 0
    e  = 71/57600, 0, -71/16695, 71/1920, -17253/339200, 22/525, -1/40

The last stage of an accepted step equals the first stage of the next
(FSAL), so an accepted step costs six field evaluations.
"""

from __future__ import annotations

import math
from array import array
from dataclasses import dataclass

import numpy as np

from .errors import CoefficientSingularError, NonfiniteStateError, StepUnderflowError
from .model import State, Trajectory

_C2, _C3, _C4, _C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
_A61, _A62, _A63, _A64, _A65 = (
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
)
_B1, _B3, _B4, _B5, _B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71.0 / 57600.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
)

_SAFETY = 0.9
_FAC_MIN = 0.2
_FAC_MAX = 5.0


@dataclass(frozen=True)
class FixedStepConfig:
    h: float
    t_end: float
    t_start: float = 0.0
    escape_bound: float = math.inf
    record: bool = True

    def __post_init__(self):
        if not (self.h > 0.0):
            raise ValueError(f"step size must be positive, got {self.h}")
        if not (self.t_end > self.t_start):
            raise ValueError(f"need t_end > t_start, got [{self.t_start}, {self.t_end}]")


@dataclass(frozen=True)
class AdaptiveConfig:
    rtol: float
    t_end: float
    atol: float = 1e-12
    h_init: float = 1e-4
    h_min: float = 1e-13
    t_start: float = 0.0
    escape_bound: float = math.inf
    record: bool = True

    def __post_init__(self):
        if not (self.rtol >= 1e-14):
            raise ValueError(f"rtol must be >= 1e-14, got {self.rtol}")
        if not (self.atol > 0.0):
            raise ValueError(f"atol must be positive, got {self.atol}")
        if not (0.0 < self.h_min <= self.h_init):
            raise ValueError(f"need 0 < h_min <= h_init, got {self.h_min}, {self.h_init}")
        if not (self.t_end > self.t_start):
            raise ValueError(f"need t_end > t_start, got [{self.t_start}, {self.t_end}]")


class _Recorder:
    """Accumulates accepted steps; with record=False keeps only endpoints."""

    def __init__(self, record: bool, t0: float, y0):
        self.record = record
        self.ndim = len(y0)
        if record:
            self.ts = array("d", [t0])
            self.buf = array("d", y0)
        else:
            self.first = (t0, tuple(y0))
            self.last = self.first

    def push(self, t, y):
        if self.record:
            self.ts.append(t)
            self.buf.extend(y)
        else:
            self.last = (t, tuple(y))

    def build(self, status, **meta) -> Trajectory:
        if self.record:
            ts = np.frombuffer(self.ts, dtype=float).copy()
            ys = np.frombuffer(self.buf, dtype=float).reshape(-1, self.ndim).copy()
        elif self.last[0] > self.first[0]:
            ts = np.array([self.first[0], self.last[0]])
            ys = np.array([self.first[1], self.last[1]])
        else:
            ts = np.array([self.first[0]])
            ys = np.array([self.first[1]])
        return Trajectory(ts=ts, ys=ys, status=status, **meta)


def _check_state(y):
    """Raise if any component is NaN/Inf; cheap in the all-finite case."""
    total = 0.0
    for v in y:
        total += v
    if not math.isfinite(total):
        if any(not math.isfinite(v) for v in y):
            raise NonfiniteStateError(f"nonfinite state {y}")
    # a finite-component sum can still overflow; that case falls through


def _escaped(y, bound):
    for v in y:
        if abs(v) > bound:
            return True
    return False


def _rk4_step(field, t, y, h, t_next):
    half = 0.5 * h
    sixth = h / 6.0
    k1 = field(t, y)
    y2 = tuple(yi + half * ki for yi, ki in zip(y, k1))
    k2 = field(t + half, y2)
    y3 = tuple(yi + half * ki for yi, ki in zip(y, k2))
    k3 = field(t + half, y3)
    y4 = tuple(yi + h * ki for yi, ki in zip(y, k3))
    k4 = field(t_next, y4)
    return tuple(
        yi + sixth * (a + 2.0 * (b + c) + d) for yi, a, b, c, d in zip(y, k1, k2, k3, k4)
    )


def integrate_fixed(field, y0, cfg: FixedStepConfig) -> Trajectory:
    """Classical RK4 with constant step h.

    Step times are t_start + k*h (multiplication, not accumulation); a
    final shortened step lands exactly on t_end when h does not divide
    the interval.
    """
    if len(y0) < 2:
        raise ValueError("state must have at least (z, p) components")
    t0, t_end, h = cfg.t_start, cfg.t_end, cfg.h
    y = tuple(float(v) for v in y0)
    rec = _Recorder(cfg.record, t0, y)
    bound = cfg.escape_bound
    check_escape = math.isfinite(bound)

    n_full = int(math.floor((t_end - t0) / h))
    while t0 + (n_full + 1) * h <= t_end:
        n_full += 1
    while n_full > 0 and t0 + n_full * h > t_end:
        n_full -= 1

    status = "completed"
    t = t0
    n_done = 0
    try:
        for k in range(n_full):
            t_next = t0 + (k + 1) * h
            y = _rk4_step(field, t, y, h, t_next)
            _check_state(y)
            t = t_next
            n_done += 1
            rec.push(t, y)
            if check_escape and _escaped(y, bound):
                status = "escaped"
                break
        else:
            rem = t_end - (t0 + n_full * h)
            if rem > 0.0:
                y = _rk4_step(field, t, y, rem, t_end)
                _check_state(y)
                t = t_end
                n_done += 1
                rec.push(t, y)
                if check_escape and _escaped(y, bound):
                    status = "escaped"
    except CoefficientSingularError:
        status = "coefficient_singular"
    return rec.build(status, fixed_h=h, n_accepted=n_done)


def _dp_attempt(field, t, y, h, f1):
    """One trial Dormand-Prince step; returns (y_new, f7, err_terms)."""
    y2 = tuple(yi + h * (_A21 * a) for yi, a in zip(y, f1))
    f2 = field(t + _C2 * h, y2)
    y3 = tuple(yi + h * (_A31 * a + _A32 * b) for yi, a, b in zip(y, f1, f2))
    f3 = field(t + _C3 * h, y3)
    y4 = tuple(yi + h * (_A41 * a + _A42 * b + _A43 * c) for yi, a, b, c in zip(y, f1, f2, f3))
    f4 = field(t + _C4 * h, y4)
    y5 = tuple(
        yi + h * (_A51 * a + _A52 * b + _A53 * c + _A54 * d)
        for yi, a, b, c, d in zip(y, f1, f2, f3, f4)
    )
    f5 = field(t + _C5 * h, y5)
    y6 = tuple(
        yi + h * (_A61 * a + _A62 * b + _A63 * c + _A64 * d + _A65 * e)
        for yi, a, b, c, d, e in zip(y, f1, f2, f3, f4, f5)
    )
    f6 = field(t + h, y6)
    y_new = tuple(
        yi + h * (_B1 * a + _B3 * c + _B4 * d + _B5 * e + _B6 * f)
        for yi, a, c, d, e, f in zip(y, f1, f3, f4, f5, f6)
    )
    f7 = field(t + h, y_new)
    errs = tuple(
        h * (_E1 * a + _E3 * c + _E4 * d + _E5 * e + _E6 * f + _E7 * g)
        for a, c, d, e, f, g in zip(f1, f3, f4, f5, f6, f7)
    )
    return y_new, f7, errs


def integrate_adaptive(field, y0, cfg: AdaptiveConfig) -> Trajectory:
    """Dormand-Prince 5(4) with error-per-step control.

    The per-component scale is atol + rtol*max(|y|, |y_new|); a step is
    accepted when the RMS of error/scale is <= 1, and the step factor
    0.9*err^(-1/5) is clamped to [0.2, 5].  A trial step with nonfinite
    result is treated as rejected.  StepUnderflowError signals that the
    controller was forced below h_min on a rejection.
    """
    if len(y0) < 2:
        raise ValueError("state must have at least (z, p) components")
    t0, t_end = cfg.t_start, cfg.t_end
    rtol, atol = cfg.rtol, cfg.atol
    y = tuple(float(v) for v in y0)
    rec = _Recorder(cfg.record, t0, y)
    bound = cfg.escape_bound
    check_escape = math.isfinite(bound)

    status = "completed"
    n_acc = 0
    n_rej = 0
    t = t0
    h = min(cfg.h_init, t_end - t0)
    try:
        f1 = field(t, y)
        while t < t_end:
            if t + h >= t_end:
                h_att = t_end - t
                t_next = t_end
            else:
                h_att = h
                t_next = t + h
            y_new, f7, errs = _dp_attempt(field, t, y, h_att, f1)

            err = 0.0
            finite = True
            for yi, yn, e in zip(y, y_new, errs):
                if not (math.isfinite(yn) and math.isfinite(e)):
                    finite = False
                    break
                scale = atol + rtol * max(abs(yi), abs(yn))
                r = e / scale
                err += r * r
            if finite:
                err = math.sqrt(err / len(y))
            else:
                err = math.inf

            if err <= 1.0:
                t = t_next
                y = y_new
                f1 = f7
                n_acc += 1
                rec.push(t, y)
                if check_escape and _escaped(y, bound):
                    status = "escaped"
                    break
                if err == 0.0:
                    fac = _FAC_MAX
                else:
                    fac = min(_FAC_MAX, max(_FAC_MIN, _SAFETY * err ** -0.2))
                h = max(h_att * fac, cfg.h_min)
            else:
                n_rej += 1
                if math.isinf(err):
                    fac = _FAC_MIN
                else:
                    fac = max(_FAC_MIN, _SAFETY * err ** -0.2)
                h = h_att * fac
                if h < cfg.h_min:
                    raise StepUnderflowError(
                        f"required step {h:.3e} < h_min {cfg.h_min:.3e} at t={t}"
                    )
    except CoefficientSingularError:
        status = "coefficient_singular"
    return rec.build(status, n_accepted=n_acc, n_rejected=n_rej)


@dataclass(frozen=True)
class StrobeResult:
    states: tuple
    status: str


def sample_strobe(
    field,
    y0,
    t_step: float,
    k_max: int,
    escape_bound: float = math.inf,
    h: float = None,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    t0: float = 0.0,
) -> StrobeResult:
    """States at t_k = t0 + k*t_step for k = 0..k_max, each hit exactly.

    Integration proceeds segment by segment so no substep ever straddles
    a strobe time; strobe times come from multiplication, never from
    repeated addition.  Pass h for fixed-step segments, otherwise the
    adaptive integrator is used at (rtol, atol).  On escape the result
    carries the points collected so far and status "escaped".
    """
    if t_step <= 0.0:
        raise ValueError(f"t_step must be positive, got {t_step}")
    if k_max < 0:
        raise ValueError(f"k_max must be >= 0, got {k_max}")
    y = tuple(float(v) for v in y0)
    states = [State(t0, y[0], y[1])]
    status = "completed"
    for k in range(1, k_max + 1):
        ta = t0 + (k - 1) * t_step
        tb = t0 + k * t_step
        if h is not None:
            seg = integrate_fixed(
                field, y, FixedStepConfig(h=h, t_start=ta, t_end=tb,
                                          escape_bound=escape_bound, record=False)
            )
        else:
            seg = integrate_adaptive(
                field, y, AdaptiveConfig(rtol=rtol, atol=atol, t_start=ta, t_end=tb,
                                         escape_bound=escape_bound, record=False)
            )
        y = tuple(float(v) for v in seg.ys[-1])
        if seg.status != "completed":
            status = seg.status
            break
        states.append(State(tb, y[0], y[1]))
    return StrobeResult(states=tuple(states), status=status)
