"""Reduction of a periodic Hill linear part to constant frequency.

Given z'' + f(t) z = 0 with f periodic of period T and stable (the
one-period transfer matrix M has |tr M| < 2), there is a periodic
envelope w(t) = sqrt(beta(t)) > 0 solving w'' + f w = 1/w^3.  The
change of variables

    y = z / w(t),        s = Phi(t) / omega_nf,
    Phi(t) = integral of d tau / w(tau)^2,   omega_nf = Phi(T) / (2 pi)

turns z'' + f(t) z + g(t) z^m = 0 into the constant-frequency form

    d2y/ds2 + omega_nf^2 y + omega_nf^2 g_nf(s) y^m = 0,
    g_nf(s) = g(t(s)) * w(t(s))^(m+3),

with s running through exactly 2 pi per period of f.

Convention note: the pair "Phi as new time" and "reduced frequency
omega_nf" cannot both hold literally; in Phi-time the reduced linear
frequency is always 1.  This module adopts the rescaled time
s = Phi/omega_nf throughout, which keeps the reduced period at 2 pi and
the reduced frequency at omega_nf, consistent with the oscillator
normal form used everywhere else in this package.  See README for the
same statement in user-facing terms.

The envelope is propagated from monodromy-derived initial values rather
than averaged, so its periodicity defect is a direct quality check and
is carried in the result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

from .errors import EnvelopeBlowupError, UnstableHillError
from .integrate import AdaptiveConfig, integrate_adaptive
from .model import int_pow

_W_FLOOR = 1e-6
_W_CEIL = 1e6


@dataclass(frozen=True)
class HillSpec:
    """Periodic linear coefficient f(t) with period T (f(t+T) = f(t))."""

    f: Callable
    T: float

    def __post_init__(self):
        if not (self.T > 0.0):
            raise ValueError(f"period must be positive, got {self.T}")


@dataclass(frozen=True)
class MonodromyResult:
    M: np.ndarray
    trace: float
    det: float
    stable: bool
    mu: float
    beta0: float
    alphaT: float
    gamma0: float


def _hill_field(h: HillSpec):
    f = h.f

    def field(t, y):
        z, v = y
        return (v, -f(t) * z)

    return field


def transfer_matrix(h: HillSpec, rtol: float = 1e-13, atol: float = 1e-15) -> np.ndarray:
    """One-period transfer matrix of (z, z') from the two fundamental runs."""
    field = _hill_field(h)
    cols = []
    for y0 in ((1.0, 0.0), (0.0, 1.0)):
        cfg = AdaptiveConfig(rtol=rtol, atol=atol, t_end=h.T, record=False)
        traj = integrate_adaptive(field, y0, cfg)
        cols.append(traj.ys[-1])
    return np.column_stack(cols)


def monodromy(h: HillSpec, rtol: float = 1e-13, atol: float = 1e-15) -> MonodromyResult:
    """Floquet analysis over one period.

    Raises UnstableHillError when |tr M| >= 2 - 1e-12 (the degenerate
    boundary included).  The default rtol must keep the trace error
    below that margin, or an exactly-degenerate system slips through as
    spuriously stable.  In the stable case the phase advance mu is
    placed in (0, 2 pi) with sin(mu) matching the sign of M[0,1], which
    makes beta0 = M[0,1]/sin(mu) positive.
    """
    M = transfer_matrix(h, rtol=rtol, atol=atol)
    tr = float(M[0, 0] + M[1, 1])
    det = float(M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0])
    if abs(tr) >= 2.0 - 1e-12:
        raise UnstableHillError(f"|trace| = {abs(tr)} >= 2: no stable periodic envelope")
    mu = math.acos(0.5 * tr)
    if M[0, 1] < 0.0:
        mu = 2.0 * math.pi - mu
    sin_mu = math.sin(mu)
    beta0 = float(M[0, 1]) / sin_mu
    alphaT = float(M[0, 0] - M[1, 1]) / (2.0 * sin_mu)
    gamma0 = (1.0 + alphaT * alphaT) / beta0
    return MonodromyResult(
        M=M, trace=tr, det=det, stable=True, mu=mu, beta0=beta0, alphaT=alphaT, gamma0=gamma0
    )


@dataclass(frozen=True, eq=False)
class EnvelopeResult:
    """Envelope and phase samples on a uniform t-grid over [0, T]."""

    ts: np.ndarray
    w: np.ndarray
    wp: np.ndarray
    phi: np.ndarray
    defect_w: float
    defect_wp: float

    @property
    def phi_T(self) -> float:
        return float(self.phi[-1])


def cs_envelope(h: HillSpec, mono: MonodromyResult, n_grid: int = 2001,
                rtol: float = 1e-12, atol: float = 1e-14) -> EnvelopeResult:
    """Propagate the envelope ODE w'' + f w = 1/w^3 jointly with Phi' = 1/w^2.

    Initial values come from the monodromy Twiss parameters:
    w(0) = sqrt(beta0), w'(0) = -alphaT/sqrt(beta0).  The grid times are
    j*T/(n_grid-1) and each is hit exactly.  The one-period defects
    |w(T)-w(0)|, |w'(T)-w'(0)| are returned for quality control.
    """
    if n_grid < 2:
        raise ValueError(f"need n_grid >= 2, got {n_grid}")
    f = h.f

    def field(t, y):
        w, wp, _ = y
        if w <= _W_FLOOR:
            raise EnvelopeBlowupError(f"envelope w = {w} at t = {t} below {_W_FLOOR}")
        w2 = w * w
        return (wp, 1.0 / (w2 * w) - f(t) * w, 1.0 / w2)

    w0 = math.sqrt(mono.beta0)
    y = (w0, -mono.alphaT / w0, 0.0)
    step = h.T / (n_grid - 1)
    ts = np.empty(n_grid)
    ws = np.empty(n_grid)
    wps = np.empty(n_grid)
    phis = np.empty(n_grid)
    ts[0], ws[0], wps[0], phis[0] = 0.0, y[0], y[1], y[2]
    for j in range(1, n_grid):
        ta = (j - 1) * step
        tb = h.T if j == n_grid - 1 else j * step
        cfg = AdaptiveConfig(rtol=rtol, atol=atol, t_start=ta, t_end=tb, record=False)
        seg = integrate_adaptive(field, y, cfg)
        y = tuple(float(v) for v in seg.ys[-1])
        if not (_W_FLOOR <= y[0] <= _W_CEIL):
            raise EnvelopeBlowupError(f"envelope w = {y[0]} at t = {tb} left the admissible range")
        ts[j], ws[j], wps[j], phis[j] = tb, y[0], y[1], y[2]
    return EnvelopeResult(
        ts=ts,
        w=ws,
        wp=wps,
        phi=phis,
        defect_w=abs(float(ws[-1]) - float(ws[0])),
        defect_wp=abs(float(wps[-1]) - float(wps[0])),
    )


@dataclass(frozen=True, eq=False)
class NormalFormResult:
    """Constant-frequency reduction of one Hill system plus nonlinearity.

    Grids: phase_grid is Phi sampled on t_grid; envelope_grid is w on
    t_grid; g_nf_grid is the reduced coefficient on the uniform s_grid
    over [0, 2 pi].  ``forward``/``inverse`` map states between the two
    charts within one period (t in [0, T], s in [0, 2 pi]).
    """

    omega_nf: float
    m: int
    t_grid: np.ndarray
    phase_grid: np.ndarray
    envelope_grid: np.ndarray
    envelope_slope_grid: np.ndarray
    s_grid: np.ndarray
    g_nf_grid: np.ndarray
    mono: MonodromyResult
    env: EnvelopeResult

    @cached_property
    def _w_spl(self):
        from scipy.interpolate import CubicSpline

        return CubicSpline(self.t_grid, self.envelope_grid)

    @cached_property
    def _wp_spl(self):
        from scipy.interpolate import CubicSpline

        return CubicSpline(self.t_grid, self.envelope_slope_grid)

    @cached_property
    def _phi_spl(self):
        from scipy.interpolate import CubicSpline

        return CubicSpline(self.t_grid, self.phase_grid)

    @cached_property
    def _t_of_phi(self):
        from scipy.interpolate import PchipInterpolator

        # Phi is strictly increasing, so the monotone interpolant of the
        # swapped grid inverts it without overshoot
        return PchipInterpolator(self.phase_grid, self.t_grid)

    def forward(self, z: float, zp: float, t: float):
        """(z, z', t) -> (y, dy/ds, s)."""
        w = float(self._w_spl(t))
        wp = float(self._wp_spl(t))
        s = float(self._phi_spl(t)) / self.omega_nf
        y = z / w
        dyds = self.omega_nf * (zp * w - wp * z)
        return (y, dyds, s)

    def inverse(self, y: float, dyds: float, s: float):
        """(y, dy/ds, s) -> (z, z', t)."""
        phi = self.omega_nf * s
        phi = min(max(phi, float(self.phase_grid[0])), float(self.phase_grid[-1]))
        t = float(self._t_of_phi(phi))
        w = float(self._w_spl(t))
        wp = float(self._wp_spl(t))
        z = y * w
        zp = dyds / (self.omega_nf * w) + wp * y
        return (z, zp, t)


def reduce(h: HillSpec, g: Callable, m: int, n_grid: int = 2001,
           rtol: float = 1e-12, atol: float = 1e-14) -> NormalFormResult:
    """Full reduction: monodromy, envelope, frequency, and g_nf on [0, 2 pi].

    g is evaluated at the grid preimages t(s); the reduced coefficient
    carries the envelope factor w^(m+3).
    """
    if not (isinstance(m, int) and m >= 2):
        raise ValueError(f"m must be an integer >= 2, got {m!r}")
    mono = monodromy(h, rtol=rtol, atol=atol)
    env = cs_envelope(h, mono, n_grid=n_grid, rtol=rtol, atol=atol)
    omega_nf = env.phi_T / (2.0 * math.pi)

    from scipy.interpolate import CubicSpline, PchipInterpolator

    t_of_phi = PchipInterpolator(env.phi, env.ts)
    w_spl = CubicSpline(env.ts, env.w)

    n = n_grid
    s_grid = np.array([j * (2.0 * math.pi) / (n - 1) for j in range(n)])
    phi_query = np.minimum(omega_nf * s_grid, env.phi_T)
    t_query = np.asarray(t_of_phi(phi_query), dtype=float)
    w_query = np.asarray(w_spl(t_query), dtype=float)
    g_vals = np.array([float(g(t)) for t in t_query])
    g_nf = g_vals * w_query ** (m + 3)

    return NormalFormResult(
        omega_nf=omega_nf,
        m=m,
        t_grid=env.ts,
        phase_grid=env.phi,
        envelope_grid=env.w,
        envelope_slope_grid=env.wp,
        s_grid=s_grid,
        g_nf_grid=g_nf,
        mono=mono,
        env=env,
    )


def make_reduced_field(res: NormalFormResult):
    """Field of the reduced system in s-time, for cross-checks.

    State (y, dy/ds); the reduced coefficient comes from a cubic spline
    over the stored g_nf samples (exact for constant g_nf).
    """
    from scipy.interpolate import CubicSpline

    g_spl = CubicSpline(res.s_grid, res.g_nf_grid)
    wnf2 = res.omega_nf * res.omega_nf
    m = res.m

    def field(s, y):
        yy, dy = y
        return (dy, -wnf2 * yy - wnf2 * float(g_spl(s)) * int_pow(yy, m))

    return field
