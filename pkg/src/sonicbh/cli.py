"""Command-line front end: load a config, run a computation, emit a dataset.

Outputs are CSV (default) or JSON, written atomically, each carrying a
manifest line with the config hash, seed where stochastic, and the package
version.  Exit codes: 0 success, 2 config error, 3 numeric failure,
4 regime violation.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import __version__
from .correlations import build_correlation_grid, detect_peak, open_correction_er
from .decoherence import (diffusion_exact, diffusion_quadrature_oracle,
                          sweep_decoherence, v_coefficients, allowed_frequencies)
from .environment import EnvironmentSpec, effective_coupling
from .errors import ConfigError, RegimeError, SonicBHError
from .characteristics import entanglement_boundary
from .langevin import estimate_correlation
from .params import (DEFAULT_CONFIG_TEXT, derive, load_config, parse_kv_text)
from .profiles import (LineProfile, RingProfile, hawking_temperature_line,
                       hawking_temperature_ring)

CONFIG_ENV_VAR = "SONICBH_CONFIG"


def _read_config_text(path: str | None) -> str:
    if path is None:
        path = os.environ.get(CONFIG_ENV_VAR)
    if path is None:
        return DEFAULT_CONFIG_TEXT
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _load_all(path: str | None):
    text = _read_config_text(path)
    config = load_config(text)
    kv = parse_kv_text(text)
    derived = derive(config)
    gamma = float(kv.get("gamma", 0.0))
    coupling = float(kv["coupling_eff"]) if "coupling_eff" in kv else (
        effective_coupling(gamma, config, derived) if gamma else 0.0)
    env = EnvironmentSpec(coupling_eff=coupling,
                          cutoff=float(kv.get("cutoff", 1.0 / derived.tau)),
                          cutoff_shape=kv.get("cutoff_shape", "lorentzian"),
                          bath_temperature=float(kv.get("bath_temperature", 0.0)))
    line = LineProfile(a=float(kv.get("line_a", 1.0)),
                       kappa=float(kv.get("line_kappa", 0.1)),
                       tau=float(kv.get("line_tau", 1.0)))
    manifest = {"config_sha256": hashlib.sha256(text.encode()).hexdigest()[:16]}
    return config, derived, env, line, gamma, manifest


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def _write_atomic(path: str, payload: str):
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".sonicbh-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_table(path: str, columns, rows, manifest: dict, fmt: str):
    manifest = dict(manifest, version=__version__)
    if fmt == "csv":
        items = " ".join(f"{k}={manifest[k]}" for k in sorted(manifest))
        lines = [f"# manifest: {items}", ",".join(columns)]
        lines += [",".join(_fmt(v) for v in row) for row in rows]
        _write_atomic(path, "\n".join(lines) + "\n")
    elif fmt == "json":
        doc = {"manifest": manifest, "columns": list(columns),
               "rows": [[v if not isinstance(v, float) else float(_fmt(v))
                         for v in row] for row in rows]}
        _write_atomic(path, json.dumps(doc, sort_keys=True, indent=1) + "\n")
    else:
        raise ConfigError(f"unknown output format {fmt!r}")


def _beta_arg(raw: str) -> float:
    if raw.strip().lower() in ("inf", "infinity"):
        return math.inf
    value = float(raw)
    if value <= 0:
        raise argparse.ArgumentTypeError("beta must be positive or 'inf'")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sonicbh",
                                description="sonic-horizon open-system toolkit")
    p.add_argument("--config", help=f"config path (default: ${CONFIG_ENV_VAR} or built-in)")
    p.add_argument("--output", default=None, help="output file (default: <command>.csv/json)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    # accept the common options after the subcommand too
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS)
    common.add_argument("--output", default=argparse.SUPPRESS)
    common.add_argument("--format", choices=("csv", "json"), default=argparse.SUPPRESS)
    sub = p.add_subparsers(dest="command", required=True)

    def add_parser(name, **kw):
        return sub.add_parser(name, parents=[common], **kw)

    s = add_parser("hawking", help="Hawking temperatures of both geometries")

    s = add_parser("boundary", help="entanglement-wedge boundary x_pm(t)")
    s.add_argument("--t-max", type=float, default=200.0)
    s.add_argument("--points", type=int, default=400)

    s = add_parser("diffusion", help="normal diffusion coefficient D(t)")
    s.add_argument("--omega", type=float, required=True)
    s.add_argument("--t-min", type=float, required=True)
    s.add_argument("--t-max", type=float, required=True)
    s.add_argument("--points", type=int, default=50)
    s.add_argument("--oracle", action="store_true", help="include the nested-quadrature column")

    s = add_parser("vcoef", help="mode weights V1/V2 over allowed frequencies")
    s.add_argument("--epsilon", type=float, default=None)
    s.add_argument("--max-modes", type=int, default=40)

    s = add_parser("tdec-sweep", help="decoherence-time band sweep")
    s.add_argument("--axis", choices=("gamma", "v_min", "temperature"), required=True)
    s.add_argument("--from", dest="lo", type=float, required=True)
    s.add_argument("--to", dest="hi", type=float, required=True)
    s.add_argument("--points", type=int, default=20)
    s.add_argument("--log", action="store_true", help="log-spaced axis")
    s.add_argument("--gamma", type=float, default=None, help="override config gamma")

    s = add_parser("correlation", help="pair-correlation scan over x2")
    s.add_argument("--t", type=float, required=True)
    s.add_argument("--x1", type=float, required=True)
    s.add_argument("--beta", type=_beta_arg, default=math.inf)
    s.add_argument("--x2-min", type=float, default=None)
    s.add_argument("--x2-max", type=float, default=None)
    s.add_argument("--points", type=int, default=64)
    s.add_argument("--method", choices=("closed_form", "mode_sum_oracle"),
                   default="closed_form")

    s = add_parser("er", help="per-mode open-system relative correction")
    s.add_argument("--k", type=float, action="append", required=True)
    s.add_argument("--t-min", type=float, required=True)
    s.add_argument("--t-max", type=float, required=True)
    s.add_argument("--points", type=int, default=40)
    s.add_argument("--lam", type=float, default=1e-7)
    s.add_argument("--temperature", type=float, default=None,
                   help="default: 100 x line Hawking temperature")

    s = add_parser("langevin", help="Monte-Carlo correlation estimator")
    s.add_argument("--t", type=float, required=True)
    s.add_argument("--x1", type=float, required=True)
    s.add_argument("--temperature", type=float, default=0.0)
    s.add_argument("--realizations", type=int, default=2000)
    s.add_argument("--sites", type=int, default=512)
    s.add_argument("--seed", type=int, default=1234)
    s.add_argument("--x2-min", type=float, default=None)
    s.add_argument("--x2-max", type=float, default=None)
    s.add_argument("--points", type=int, default=48)
    s.add_argument("--transport", choices=("matched", "exact"), default="matched")
    return p


def _run(args) -> tuple[list, list, dict]:
    config, derived, env, line, gamma, manifest = _load_all(args.config)
    manifest["command"] = args.command

    if args.command == "hawking":
        ring = RingProfile.from_config(config)
        rows = [["ring", hawking_temperature_ring(ring)],
                ["line", hawking_temperature_line(line.v_max, line.v_min, line.a)]]
        return ["geometry", "t_hawking"], rows, manifest

    if args.command == "boundary":
        ts = np.linspace(0.0, args.t_max, args.points)
        rows = []
        for t in ts:
            xm, xp = entanglement_boundary(float(t), line)
            rows.append([float(t), xm, xp])
        return ["t", "x_minus", "x_plus"], rows, manifest

    if args.command == "diffusion":
        ts = np.geomspace(args.t_min, args.t_max, args.points)
        cols = ["t", "d_exact"] + (["d_oracle"] if args.oracle else [])
        rows = []
        for t in ts:
            row = [float(t), diffusion_exact(float(t), args.omega, env)]
            if args.oracle:
                row.append(diffusion_quadrature_oracle(float(t), args.omega, env))
            rows.append(row)
        return cols, rows, manifest

    if args.command == "vcoef":
        ring = RingProfile.from_config(config)
        omegas = allowed_frequencies(ring, "u", args.epsilon)[: args.max_modes]
        rows = []
        for om in omegas:
            vc = v_coefficients(ring, float(om), args.epsilon)
            rows.append([vc.omega, vc.v1_u, vc.v2_u, vc.v1_v, vc.v2_v, vc.epsilon])
        return ["omega", "v1_u", "v2_u", "v1_v", "v2_v", "epsilon"], rows, manifest

    if args.command == "tdec-sweep":
        g = args.gamma if args.gamma is not None else gamma
        if g <= 0:
            raise ConfigError("a positive gamma is required (config key or --gamma)")
        space = np.geomspace if args.log else np.linspace
        values = space(args.lo, args.hi, args.points)
        axis_gamma = g
        if args.axis == "gamma":
            rows_, errs = sweep_decoherence("gamma", values, config, axis_gamma)
        else:
            rows_, errs = sweep_decoherence(args.axis, values, config, g,
                                            temperature=env.bath_temperature
                                            if args.axis != "temperature" else 0.0)
        if errs:
            manifest["point_errors"] = len(errs)
        rows = [[r.axis_value, r.t_d_min, r.t_d_max, r.omega_min, r.omega_max]
                for r in rows_]
        return ["axis", "t_d_min", "t_d_max", "omega_min", "omega_max"], rows, manifest

    if args.command == "correlation":
        xm, xp = entanglement_boundary(args.t, line)
        lo = args.x2_min if args.x2_min is not None else line.a + 0.25 * (xp - line.a) / 10
        hi = args.x2_max if args.x2_max is not None else xp + 0.3 * (xp - line.a)
        x2 = np.linspace(lo, hi, args.points)
        grid = build_correlation_grid(args.x1, x2, args.t, args.beta, line,
                                      method=args.method)
        peak = detect_peak(grid)
        manifest.update(peak_location=_fmt(peak.location),
                        peak_present=str(peak.present).lower(),
                        peak_contrast=_fmt(peak.contrast))
        rows = [[float(x), float(v), r] for x, v, r in
                zip(grid.x2, grid.values, grid.regions)]
        return ["x2", "abs_corr", "region"], rows, manifest

    if args.command == "er":
        t_h = hawking_temperature_line(line.v_max, line.v_min, line.a)
        temp = args.temperature if args.temperature is not None else 100.0 * t_h
        ts = np.linspace(args.t_min, args.t_max, args.points)
        rows = []
        import warnings as _w
        for k in args.k:
            for t in ts:
                with _w.catch_warnings():
                    _w.simplefilter("ignore")
                    res = open_correction_er(k, float(t), args.lam, temp, line)
                rows.append([k, float(t), res.e_r])
        return ["k", "t", "e_r"], rows, manifest

    if args.command == "langevin":
        xm, xp = entanglement_boundary(args.t, line)
        lo = args.x2_min if args.x2_min is not None else line.a * 1.2
        hi = args.x2_max if args.x2_max is not None else xp * 1.2
        x2 = np.linspace(lo, hi, args.points)
        grid = estimate_correlation(args.realizations, args.x1, x2, args.t,
                                    args.temperature, line, seed=args.seed,
                                    n_sites=args.sites, transport=args.transport)
        manifest.update(seed=args.seed, realizations=args.realizations,
                        transport=args.transport)
        rows = [[float(x), float(v), float(s)] for x, v, s in
                zip(grid.x2, grid.values, grid.stderr)]
        return ["x2", "abs_corr", "stderr"], rows, manifest

    raise ConfigError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        columns, rows, manifest = _run(args)
        out = args.output or f"{args.command}.{args.format}"
        write_table(out, columns, rows, manifest, args.format)
        print(out)
        return 0
    except ConfigError as exc:
        _emit_error(exc)
        return 2
    except RegimeError as exc:
        _emit_error(exc)
        return 4
    except (SonicBHError, ValueError) as exc:
        _emit_error(exc)
        return 3


def _emit_error(exc: Exception):
    record = {"error": type(exc).__name__, "message": str(exc)}
    print(json.dumps(record, sort_keys=True), file=sys.stderr)


if __name__ == "__main__":
    raise SystemExit(main())
