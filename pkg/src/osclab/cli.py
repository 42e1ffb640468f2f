"""Command-line surface: reproduction runs, scans, and reductions.

Subcommands
    simulate        integrate one system, write the trajectory
    drift           invariant drift along a fixed-step run
    poincare        stroboscopic section points plus the analytic curve
    stability-scan  boundedness scan over omega and z0 against z_crit
    crit            print the analytic critical amplitude
    family          five-parameter coefficient family run with drift
    reduce          Hill linear part to constant-frequency normal form

Every run writes ``summary.json`` into --out.  Exit codes: 0 on
success (escape during a scan or simulate is an expected outcome, not a
failure), 2 on configuration errors, 3 on numerical failures, with the
failing error name recorded in the summary.

Presets encode the demonstration parameter sets used throughout:
fig1/sec3ref (drift of the m=2 trig system at omega=1), fig2 (190
strobe points), fig3 (the six-omega boundary scan), fig4-bounded and
fig4-unbounded (one run just below and one just above the threshold).
"""

from __future__ import annotations

import argparse
import json
import math
from pathlib import Path

import numpy as np

from . import family as family_mod
from . import invariant as invariant_mod
from . import normalform as nf_mod
from . import poincare as poincare_mod
from . import stability as stability_mod
from .errors import ConfigError, OscLabError
from .integrate import AdaptiveConfig, FixedStepConfig, integrate_adaptive, integrate_fixed, sample_strobe
from .model import State, make_field, spec_from_json, trig_spec
from .output import decimate, svg_plot, write_csv, write_json

PRESETS = {
    "fig1": {
        "A": 1.3, "B": 0.9, "C": 0.0, "omega": 1.0, "m": 2,
        "z0": 0.1, "p0": 0.0, "tmax": 600.0, "h": 1e-3,
    },
    "sec3ref": {
        "A": 1.3, "B": 0.9, "C": 0.0, "omega": 1.0, "m": 2,
        "z0": 0.35, "p0": 0.0, "tmax": 600.0, "h": 1e-3,
    },
    "fig2": {
        "A": 1.3, "B": 0.9, "C": 0.0, "omega": 1.0, "m": 2,
        "z0": 0.1, "p0": 0.0, "points": 190, "h": 1e-3, "escape": 50.0,
    },
    "fig3": {
        "A": 1.3, "B": 0.9, "C": 0.0,
        "omegas": (0.8, 1.0, 1.2, 1.4, 1.6, 1.8),
        "dz0": 0.02, "tmax": 600.0, "escape": 50.0,
    },
    "fig4-bounded": {
        "A": 1.3, "B": 0.9, "C": 0.0, "omega": 1.4, "m": 2,
        "z0": 1.2, "p0": 0.0, "tmax": 600.0, "h": 1e-3, "escape": 50.0,
        "yrange": (-5.0, 5.0),
    },
    "fig4-unbounded": {
        "A": 1.3, "B": 0.9, "C": 0.0, "omega": 1.4, "m": 2,
        "z0": 1.4, "p0": 0.0, "tmax": 600.0, "h": 1e-3, "escape": 50.0,
        "yrange": (-5.0, 5.0),
    },
}

_CSV_ROW_CAP = 10000


def _preset(name: str) -> dict:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}")
    return dict(PRESETS[name])


def _read_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc


def _resolve_oscillator(args):
    """Oscillator spec plus merged run parameters from preset/file/flags."""
    if args.preset and args.spec:
        raise ConfigError("give either --preset or --spec, not both")
    params = {}
    if args.preset:
        params = _preset(args.preset)
        spec = trig_spec(params["A"], params["B"], params["C"],
                         params["omega"], params.get("m", 2))
    elif args.spec:
        try:
            spec = spec_from_json(_read_json(args.spec))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    else:
        raise ConfigError("a system is required: --preset <name> or --spec <file.json>")
    for key in ("z0", "p0", "h", "rtol", "atol", "tmax", "escape", "points"):
        v = getattr(args, key, None)
        if v is not None:
            params[key] = v
    return spec, params


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _stride_rows(ts, cols, cap=_CSV_ROW_CAP):
    step = decimate(len(ts), cap)
    idx = range(0, len(ts), step)
    rows = [tuple(c[i] for c in ([ts] + cols)) for i in idx]
    last = (len(ts) - 1)
    if last % step != 0:
        rows.append(tuple(c[last] for c in ([ts] + cols)))
    return rows


def _run_oscillator(spec, params):
    field = make_field(spec)
    y0 = (params.get("z0", 0.1), params.get("p0", 0.0))
    tmax = params.get("tmax", 600.0)
    escape = params.get("escape", math.inf)
    if params.get("rtol") is not None:
        cfg = AdaptiveConfig(rtol=params["rtol"], atol=params.get("atol") or 1e-12,
                             t_end=tmax, escape_bound=escape)
        return integrate_adaptive(field, y0, cfg), y0
    cfg = FixedStepConfig(h=params.get("h") or 1e-3, t_end=tmax, escape_bound=escape)
    return integrate_fixed(field, y0, cfg), y0


def cmd_simulate(args) -> int:
    spec, params = _resolve_oscillator(args)
    out = _out_dir(args)
    traj, y0 = _run_oscillator(spec, params)
    write_csv(out / "traj.csv", "t,z,p", _stride_rows(traj.ts, [traj.z, traj.p]))
    if args.svg:
        yrange = params.get("yrange")
        svg_plot(out / "traj.svg",
                 [{"kind": "line", "x": traj.ts, "y": traj.z}],
                 xlabel="t", ylabel="z", title="trajectory", ylim=yrange)
    summary = {
        "status": traj.status,
        "t_final": float(traj.ts[-1]),
        "z_final": float(traj.z[-1]),
        "p_final": float(traj.p[-1]),
        "n_recorded": len(traj),
        "z0": y0[0], "p0": y0[1],
    }
    write_json(out / "summary.json", summary)
    print(f"simulate: status={traj.status} t_final={traj.ts[-1]:.6g} z_final={traj.z[-1]:.6g}")
    if traj.status == "coefficient_singular":
        return 3
    return 0


def cmd_drift(args) -> int:
    spec, params = _resolve_oscillator(args)
    out = _out_dir(args)
    traj, y0 = _run_oscillator(spec, params)
    coeffs = invariant_mod.build_coeffs(spec)
    try:
        report = invariant_mod.drift(traj, coeffs)
    except OscLabError:
        report = invariant_mod.drift_absolute(traj, coeffs)
    write_csv(out / "drift.csv", "t,rel_drift", _stride_rows(report.ts, [report.series]))
    if args.svg:
        svg_plot(out / "drift.svg",
                 [{"kind": "line", "x": report.ts, "y": report.series}],
                 xlabel="t", ylabel="I/I0 - 1", title="invariant drift",
                 ylim=(-1e-5, 1e-5))
    i0 = invariant_mod.eval_invariant(coeffs, State(0.0, y0[0], y0[1]))
    summary = {
        "status": traj.status,
        "mode": report.mode,
        "max_rel_drift": report.max_rel,
        "i0": i0,
        "n_recorded": len(traj),
    }
    write_json(out / "summary.json", summary)
    print(f"drift: mode={report.mode} max={report.max_rel:.6e} status={traj.status}")
    if traj.status == "coefficient_singular":
        return 3
    return 0


def cmd_poincare(args) -> int:
    spec, params = _resolve_oscillator(args)
    out = _out_dir(args)
    z0 = params.get("z0", 0.1)
    p0 = params.get("p0", 0.0)
    n_points = int(params.get("points", 190))
    if n_points < 1:
        raise ConfigError(f"need at least one strobe point, got {n_points}")
    coeffs = invariant_mod.build_coeffs(spec)
    i0 = invariant_mod.eval_invariant(coeffs, State(0.0, z0, p0))
    curve = poincare_mod.section_curve(spec, i0)

    field = make_field(spec)
    t_step = math.pi / spec.omega
    strobe = sample_strobe(
        field, (z0, p0), t_step, n_points - 1,
        escape_bound=params.get("escape", math.inf),
        h=params.get("h") if params.get("rtol") is None else None,
        rtol=params.get("rtol") or 1e-10,
        atol=params.get("atol") or 1e-12,
    )
    residual = poincare_mod.section_residual(strobe.states, curve)
    write_csv(out / "strobe.csv", "z,p", [(s.z, s.p) for s in strobe.states])
    loop = poincare_mod.curve_loop(curve, 400, z_hint=z0)
    write_csv(out / "curve.csv", "z,p", loop)
    if args.svg:
        series = []
        if loop:
            closed = loop + [loop[0]]
            series.append({"kind": "line", "x": [q[0] for q in closed],
                           "y": [q[1] for q in closed]})
        series.append({"kind": "scatter", "x": [s.z for s in strobe.states],
                       "y": [s.p for s in strobe.states], "color": "#d62728"})
        svg_plot(out / "section.svg", series, xlabel="z", ylabel="p",
                 title="stroboscopic section")
    summary = {
        "status": strobe.status,
        "i0": i0,
        "n_points": len(strobe.states),
        "residual_max": residual,
        "admissible": [
            [None if math.isinf(lo) else lo, None if math.isinf(hi) else hi]
            for lo, hi in curve.admissible
        ],
    }
    write_json(out / "summary.json", summary)
    print(f"poincare: points={len(strobe.states)} residual_max={residual:.6e} "
          f"status={strobe.status}")
    if strobe.status == "coefficient_singular":
        return 3
    return 0


def _parse_omegas(text: str):
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"--omegas wants a:b:step, got {text!r}")
    try:
        a, b, step = (float(v) for v in parts)
    except ValueError as exc:
        raise ConfigError(f"--omegas wants numbers a:b:step, got {text!r}") from exc
    if step <= 0.0 or b < a:
        raise ConfigError(f"--omegas wants a <= b and step > 0, got {text!r}")
    n = int(math.floor((b - a) / step + 1e-9)) + 1
    return tuple(a + k * step for k in range(n))


def cmd_scan(args) -> int:
    if args.preset and args.spec:
        raise ConfigError("give either --preset or --spec, not both")
    params = {}
    if args.preset:
        params = _preset(args.preset)
        A, B, C = params["A"], params["B"], params["C"]
    elif args.spec:
        obj = _read_json(args.spec)
        g = obj.get("g", {})
        if g.get("kind") != "trig":
            raise ConfigError("stability-scan needs a trig-family spec")
        A, B, C = float(g["A"]), float(g["B"]), float(g["C"])
    else:
        raise ConfigError("a system is required: --preset fig3 or --spec <file.json>")
    omegas = params.get("omegas", ())
    if args.omegas:
        omegas = _parse_omegas(args.omegas)
    if not omegas:
        raise ConfigError("no omega values: pass --omegas a:b:step")
    dz0 = args.dz0 if args.dz0 is not None else params.get("dz0", 0.02)
    tmax = args.tmax if args.tmax is not None else params.get("tmax", 600.0)
    escape = args.escape if args.escape is not None else params.get("escape", 50.0)

    out = _out_dir(args)
    rows = stability_mod.scan(A, B, C, omegas, dz0=dz0, t_max=tmax,
                              z_escape=escape, workers=args.workers)
    write_csv(out / "scan.csv", "omega,z_last_bounded,z_crit",
              [(r.omega, r.z_last_bounded, r.z_crit_analytic) for r in rows])
    if args.svg:
        R = math.hypot(B, C)
        lo, hi = min(omegas), max(omegas)
        dense = [lo + (hi - lo) * k / 199 for k in range(200)]
        svg_plot(out / "scan.svg",
                 [{"kind": "line", "x": dense,
                   "y": [stability_mod.z_crit(A, R, w) for w in dense]},
                  {"kind": "scatter", "x": [r.omega for r in rows],
                   "y": [r.z_last_bounded for r in rows], "color": "#d62728"}],
                 xlabel="omega", ylabel="z0", title="stability boundary")
    summary = {
        "rows": [
            {"omega": r.omega, "z_last_bounded": r.z_last_bounded,
             "z_crit": r.z_crit_analytic, "agrees": r.agrees}
            for r in rows
        ],
        "all_agree": all(r.agrees for r in rows),
        "dz0": dz0,
    }
    write_json(out / "summary.json", summary)
    for r in rows:
        print(f"omega={r.omega:<6g} z_last_bounded={r.z_last_bounded:<8g} "
              f"z_crit={r.z_crit_analytic:.6f} agrees={r.agrees}")
    return 0


def cmd_crit(args) -> int:
    R = math.hypot(args.B, args.C)
    try:
        zc = stability_mod.z_crit(args.A, R, args.omega)
        ic = stability_mod.i0_crit(args.A, R, args.omega)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    print(f"z_crit = {zc:.2f}")
    print(f"  z_crit  (full) = {zc:.17g}")
    print(f"  i0_crit (full) = {ic:.17g}")
    if args.out:
        out = _out_dir(args)
        write_json(out / "summary.json",
                   {"A": args.A, "B": args.B, "C": args.C, "R": R,
                    "omega": args.omega, "z_crit": zc, "i0_crit": ic})
    return 0


def cmd_family(args) -> int:
    fp = family_mod.fiveparam_from_json(_read_json(args.spec))
    out = _out_dir(args)
    traj, report = family_mod.integrate_family(
        fp, args.z0, args.p0, args.tmax,
        rtol=args.rtol or 1e-12, atol=args.atol or 1e-12,
        escape_bound=args.escape if args.escape is not None else math.inf,
    )
    cols = [traj.ys[:, i] for i in range(5)]
    write_csv(out / "traj.csv", "t,z,p,alpha2,dalpha2,ddalpha2",
              _stride_rows(traj.ts, cols))
    write_csv(out / "drift.csv", "t,rel_drift", _stride_rows(report.ts, [report.series]))
    if args.svg:
        svg_plot(out / "family.svg",
                 [{"kind": "line", "x": traj.ts, "y": traj.ys[:, 2]}],
                 xlabel="t", ylabel="alpha2", title="coefficient evolution")
    summary = {
        "status": traj.status,
        "mode": report.mode,
        "max_rel_drift": report.max_rel,
        "n_recorded": len(traj),
    }
    write_json(out / "summary.json", summary)
    print(f"family: status={traj.status} drift mode={report.mode} max={report.max_rel:.6e}")
    if traj.status == "coefficient_singular":
        return 3
    return 0


def cmd_reduce(args) -> int:
    grid = _read_csv_columns(args.hill, ("t", "f", "g"))
    T = args.T
    f_fun, g_fun = _periodic_interpolants(grid, T)
    out = _out_dir(args)
    res = nf_mod.reduce(nf_mod.HillSpec(f=f_fun, T=T), g_fun, args.m,
                        n_grid=args.n_grid, rtol=args.rtol or 1e-12)
    write_csv(out / "envelope.csv", "t,phi,w,wp",
              zip(res.t_grid, res.phase_grid, res.envelope_grid, res.envelope_slope_grid))
    write_csv(out / "gnf.csv", "s,g_nf", zip(res.s_grid, res.g_nf_grid))
    if args.svg:
        svg_plot(out / "envelope.svg",
                 [{"kind": "line", "x": res.t_grid, "y": res.envelope_grid}],
                 xlabel="t", ylabel="w", title="envelope")
        svg_plot(out / "gnf.svg",
                 [{"kind": "line", "x": res.s_grid, "y": res.g_nf_grid}],
                 xlabel="s", ylabel="g_nf", title="reduced coefficient")
    summary = {
        "omega_nf": res.omega_nf,
        "mu": res.mono.mu,
        "beta0": res.mono.beta0,
        "alphaT": res.mono.alphaT,
        "gamma0": res.mono.gamma0,
        "trace": res.mono.trace,
        "det": res.mono.det,
        "defect_w": res.env.defect_w,
        "defect_wp": res.env.defect_wp,
        "m": res.m,
        "n_grid": args.n_grid,
    }
    write_json(out / "summary.json", summary)
    print(f"reduce: omega_nf={res.omega_nf:.12g} mu={res.mono.mu:.12g} "
          f"beta0={res.mono.beta0:.12g}")
    return 0


def _read_csv_columns(path: str, names):
    try:
        lines = Path(path).read_text().strip().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    if not lines:
        raise ConfigError(f"{path} is empty")
    header = [h.strip() for h in lines[0].split(",")]
    if header != list(names):
        raise ConfigError(f"{path} must have header {','.join(names)}, got {lines[0]!r}")
    cols = {n: [] for n in names}
    for ln, line in enumerate(lines[1:], start=2):
        vals = line.split(",")
        if len(vals) != len(names):
            raise ConfigError(f"{path}:{ln}: expected {len(names)} columns")
        try:
            for n, v in zip(names, vals):
                cols[n].append(float(v))
        except ValueError as exc:
            raise ConfigError(f"{path}:{ln}: {exc}") from exc
    if len(cols[names[0]]) < 4:
        raise ConfigError(f"{path}: need at least 4 rows for cubic interpolation")
    return cols


def _periodic_interpolants(grid, T: float):
    from scipy.interpolate import CubicSpline

    ts = np.asarray(grid["t"])
    if abs(ts[0]) > 1e-12 or abs(ts[-1] - T) > 1e-9 * max(1.0, T):
        raise ConfigError(f"hill grid must cover exactly [0, {T}], got [{ts[0]}, {ts[-1]}]")
    if np.any(np.diff(ts) <= 0.0):
        raise ConfigError("hill grid times must be strictly increasing")
    splines = {}
    for name in ("f", "g"):
        vals = np.asarray(grid[name], dtype=float)
        if abs(vals[0] - vals[-1]) > 1e-9 * (abs(vals[0]) + 1.0):
            raise ConfigError(f"column {name} must match at t=0 and t=T for periodicity")
        vals = vals.copy()
        vals[-1] = vals[0]
        splines[name] = CubicSpline(ts, vals, bc_type="periodic")

    def wrap(spl):
        def fun(t):
            return float(spl(t - T * math.floor(t / T)))

        return fun

    return wrap(splines["f"]), wrap(splines["g"])


def _add_common(p, *, svg=True):
    p.add_argument("--out", default=".", help="output directory (default: current)")
    if svg:
        p.add_argument("--svg", action=argparse.BooleanOptionalAction, default=True,
                       help="write SVG plots (default on; --no-svg disables)")


def _add_system(p):
    p.add_argument("--preset", help="named parameter set, e.g. fig1")
    p.add_argument("--spec", help="oscillator spec JSON file")
    p.add_argument("--z0", type=float, help="initial position")
    p.add_argument("--p0", type=float, help="initial momentum")
    p.add_argument("--h", type=float, help="fixed step size (default 1e-3)")
    p.add_argument("--rtol", type=float, help="use the adaptive integrator at this rtol")
    p.add_argument("--atol", type=float, help="adaptive absolute tolerance")
    p.add_argument("--tmax", type=float, help="integration horizon")
    p.add_argument("--escape", type=float, help="escape bound on |z|, |p|")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="osclab",
        description="Quadratic invariants, sections, and stability boundaries "
                    "of z'' + omega^2 z + g(t) z^m = 0",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate one system")
    _add_system(p)
    _add_common(p)
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("drift", help="invariant drift along a run")
    _add_system(p)
    _add_common(p)
    p.set_defaults(handler=cmd_drift)

    p = sub.add_parser("poincare", help="stroboscopic section and curve")
    _add_system(p)
    p.add_argument("--points", type=int, help="number of strobe points (default 190)")
    _add_common(p)
    p.set_defaults(handler=cmd_poincare)

    p = sub.add_parser("stability-scan", help="boundedness scan against z_crit")
    p.add_argument("--preset", help="named parameter set, e.g. fig3")
    p.add_argument("--spec", help="oscillator spec JSON (trig family)")
    p.add_argument("--omegas", help="grid a:b:step, e.g. 0.8:1.8:0.2")
    p.add_argument("--dz0", type=float, help="z0 grid step (default 0.02)")
    p.add_argument("--tmax", type=float, help="boundedness horizon (default 600)")
    p.add_argument("--escape", type=float, help="escape bound (default 50)")
    p.add_argument("--workers", type=int, help="process pool size "
                   "(default: OSC_LAB_THREADS or available parallelism)")
    _add_common(p)
    p.set_defaults(handler=cmd_scan)

    p = sub.add_parser("crit", help="print the critical amplitude")
    p.add_argument("--A", type=float, required=True)
    p.add_argument("--B", type=float, required=True)
    p.add_argument("--C", type=float, default=0.0)
    p.add_argument("--omega", type=float, required=True)
    p.add_argument("--out", default=None, help="optionally write summary.json here")
    p.set_defaults(handler=cmd_crit)

    p = sub.add_parser("family", help="five-parameter family run with drift")
    p.add_argument("--spec", required=True, help="five-parameter spec JSON file")
    p.add_argument("--z0", type=float, default=0.1)
    p.add_argument("--p0", type=float, default=0.0)
    p.add_argument("--tmax", type=float, default=100.0)
    p.add_argument("--rtol", type=float)
    p.add_argument("--atol", type=float)
    p.add_argument("--escape", type=float)
    _add_common(p)
    p.set_defaults(handler=cmd_family)

    p = sub.add_parser("reduce", help="Hill linear part to normal form")
    p.add_argument("--hill", required=True, help="CSV with columns t,f,g over one period")
    p.add_argument("--T", type=float, required=True, help="period of f")
    p.add_argument("--m", type=int, required=True, help="nonlinearity exponent")
    p.add_argument("--n-grid", type=int, default=2001, dest="n_grid")
    p.add_argument("--rtol", type=float)
    _add_common(p)
    p.set_defaults(handler=cmd_reduce)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"error: {exc}")
        return 2
    except OscLabError as exc:
        out = getattr(args, "out", None)
        if out:
            out_path = Path(out)
            out_path.mkdir(parents=True, exist_ok=True)
            write_json(out_path / "summary.json",
                       {"error": exc.name, "message": str(exc)})
        print(f"numerical failure [{exc.name}]: {exc}")
        return 3
    except ValueError as exc:
        print(f"error: {exc}")
        return 2
