"""Command-line entry point: reproducible, file-based experiment runs.

Every subcommand writes its data products (CSV/JSON) plus a run manifest
that echoes the command, the full parameter set, seeds, the tool version,
and a content hash over parameters and output digests.  Outputs carry no
timestamps, so identical invocations produce byte-identical files and a
stable manifest hash.

Exit codes: 0 success, 1 internal error, 2 validation error, 3 validation
suite failure (``validate`` only).
"""

from __future__ import annotations

import argparse
import configparser
import hashlib
import itertools
import json
import math
import os
import sys
import time
import warnings
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .core import PendulumConfig, SlowRateAdvisory, StokesState, ValidationError
from .dynamics import FlowKind, integrate
from .full_model import compare_reduced_full
from .quantum import spectrum_sweep
from .scenarios import EnsembleSpec, ZenoProtocol, squeeze_ensemble, zeno_run
from .stationary import critical_s0, stationary_points

THREAD_CAP_ENV = "STOKES_PENDULUM_MAX_THREADS"


def _thread_cap() -> int:
    try:
        return max(1, int(os.environ.get(THREAD_CAP_ENV, "1")))
    except ValueError:
        return 1


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    h.update(path.read_bytes())
    return h.hexdigest()


def _write_manifest(out_dir: Path, command: str, params: dict, seeds: dict,
                    outputs: list[Path], started: float) -> Path:
    entries = [
        {"path": p.name, "sha256": _sha256(p)} for p in sorted(outputs)
    ]
    hashed = {
        "command": command,
        "parameters": params,
        "seeds": seeds,
        "version": __version__,
        "outputs": entries,
    }
    digest = hashlib.sha256(
        json.dumps(hashed, sort_keys=True).encode()
    ).hexdigest()
    manifest = dict(hashed)
    manifest["manifest_hash"] = digest
    manifest["duration_seconds"] = time.time() - started
    path = out_dir / "manifest.json"
    with open(path, "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2)
        f.write("\n")
    return path


def _load_config(args) -> PendulumConfig:
    values = {
        "omega": 1.0,
        "delta_omega": 0.0,
        "Omega_rot": 0.0,
        "gamma_x": 0.0,
        "gamma_y": 0.0,
        "length": 1.0,
        "mass": 1.0,
    }
    if args.config is not None:
        parser = configparser.ConfigParser()
        read = parser.read(args.config)
        if not read:
            raise ValidationError(f"config file not found: {args.config}")
        if parser.has_section("pendulum"):
            for key in values:
                if parser.has_option("pendulum", key):
                    values[key] = parser.getfloat("pendulum", key)
    for key in values:
        override = getattr(args, key, None)
        if override is not None:
            values[key] = override
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SlowRateAdvisory)
        return PendulumConfig(**values)


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, default=None,
                   help="key=value config file with a [pendulum] section")
    for key in ("omega", "delta_omega", "Omega_rot", "gamma_x", "gamma_y",
                "length", "mass"):
        p.add_argument(f"--{key.replace('_', '-')}", dest=key, type=float,
                       default=None)
    p.add_argument("--out", type=Path, required=True, help="output directory")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def cmd_simulate(args) -> int:
    c = _load_config(args)
    started = time.time()
    s = StokesState(args.s1, args.s2, args.s3)
    kind = FlowKind(args.flow)
    traj = integrate(s, c, kind, args.t_end, args.dt)
    out_dir = args.out
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "trajectory.csv"
    traj.to_csv(csv_path)
    params = {
        "flow": kind.value, "s1": s.s1, "s2": s.s2, "s3": s.s3,
        "t_end": args.t_end, "dt": args.dt, **_config_dict(c),
    }
    _write_manifest(out_dir, "simulate", params, {}, [csv_path], started)
    s0_drift, h_drift = traj.max_relative_drift()
    print(f"steps={len(traj.times) - 1} s0_drift={s0_drift:.3e} H_drift={h_drift:.3e}")
    return 0


def cmd_stationary(args) -> int:
    c = _load_config(args)
    started = time.time()
    sset = stationary_points(c, args.s0)
    out_dir = args.out
    out_dir.mkdir(parents=True, exist_ok=True)
    json_path = out_dir / "stationary.json"
    sset.to_json(json_path)
    params = {"s0": args.s0, **_config_dict(c)}
    _write_manifest(out_dir, "stationary", params, {}, [json_path], started)
    print(f"regime={sset.regime.value} points={len(sset.points)}")
    return 0


def cmd_critical(args) -> int:
    c = _load_config(args)
    started = time.time()
    dws = np.linspace(args.dw_min, args.dw_max, args.grid)
    oms = np.linspace(args.om_min, args.om_max, args.grid)
    out_dir = args.out
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "critical_surface.csv"
    with open(path, "w", encoding="utf-8") as f:
        f.write("delta_omega,Omega_rot,s0_crit\n")
        for dw, om in itertools.product(dws, oms):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", SlowRateAdvisory)
                cc = replace(c, delta_omega=float(dw), Omega_rot=float(om))
            f.write(f"{dw:.17g},{om:.17g},{critical_s0(cc):.17g}\n")
    params = {
        "dw_min": args.dw_min, "dw_max": args.dw_max,
        "om_min": args.om_min, "om_max": args.om_max,
        "grid": args.grid, **_config_dict(c),
    }
    _write_manifest(out_dir, "critical", params, {}, [path], started)
    print(f"wrote {args.grid * args.grid} grid points")
    return 0


def cmd_spectrum(args) -> int:
    c = _load_config(args)
    started = time.time()
    dws = np.linspace(args.dw_min, args.dw_max, args.grid)
    results = spectrum_sweep(
        args.particles, c, dws, n_bins=args.bins,
        n_samples=args.samples, seed=args.seed,
    )
    out_dir = args.out
    out_dir.mkdir(parents=True, exist_ok=True)
    spath = out_dir / "spectrum.csv"
    with open(spath, "w", encoding="utf-8") as f:
        f.write("delta_omega,index,eigenvalue\n")
        for r in results:
            for i, ev in enumerate(r.eigenvalues):
                f.write(f"{r.delta_omega:.17g},{i},{ev:.17g}\n")
    outputs = [spath]
    if args.dos:
        dpath = out_dir / "dos.csv"
        with open(dpath, "w", encoding="utf-8") as f:
            f.write("delta_omega,bin_center,quantum_counts,classical_density\n")
            for r in results:
                centers = 0.5 * (r.bin_edges[:-1] + r.bin_edges[1:])
                for bc, q, cl in zip(centers, r.quantum_dos, r.classical_dos):
                    f.write(f"{r.delta_omega:.17g},{bc:.17g},{q},{cl:.17g}\n")
        outputs.append(dpath)
    params = {
        "particles": args.particles, "dw_min": args.dw_min,
        "dw_max": args.dw_max, "grid": args.grid, "bins": args.bins,
        "samples": args.samples, "dos": args.dos, **_config_dict(c),
    }
    _write_manifest(out_dir, "spectrum", params, {"master": args.seed}, outputs, started)
    print(f"diagonalized {len(results)} grid points at N={args.particles}")
    return 0


def cmd_dos(args) -> int:
    args.dos = True
    args.dw_min = args.delta_omega_value
    args.dw_max = args.delta_omega_value
    args.grid = 1
    return cmd_spectrum(args)


def cmd_zeno(args) -> int:
    started = time.time()
    protocol = ZenoProtocol(
        n_filters=args.filters,
        Omega_rot=args.protocol_omega,
        gamma_filter=args.gamma_filter,
        filter_duration=args.filter_duration,
    )
    fraction = zeno_run(protocol)
    out_dir = args.out
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "zeno.json"
    doc = {
        "n_filters": protocol.n_filters,
        "Omega_rot": protocol.Omega_rot,
        "gamma_filter": protocol.gamma_filter,
        "filter_duration": protocol.filter_duration,
        "transmitted_fraction": fraction,
    }
    with open(path, "w", encoding="utf-8") as f:
        json.dump(doc, f, indent=2)
        f.write("\n")
    _write_manifest(out_dir, "zeno", doc, {}, [path], started)
    print(f"transmitted fraction {fraction:.6g}")
    return 0


def cmd_squeeze(args) -> int:
    c = _load_config(args)
    started = time.time()
    spec = EnsembleSpec(
        n_members=args.members, s0=args.s0, spread=args.spread, seed=args.seed
    )
    result = squeeze_ensemble(spec, c, args.tau)
    out_dir = args.out
    out_dir.mkdir(parents=True, exist_ok=True)
    jpath = out_dir / "squeeze.json"
    result.to_json(jpath)
    cpath = out_dir / "ensemble.csv"
    with open(cpath, "w", encoding="utf-8") as f:
        f.write("member,s1,s2,s3\n")
        for i, row in enumerate(result.members):
            f.write(f"{i},{row[0]:.17g},{row[1]:.17g},{row[2]:.17g}\n")
    params = {
        "members": args.members, "s0": args.s0, "spread": args.spread,
        "tau": args.tau, **_config_dict(c),
    }
    _write_manifest(out_dir, "squeeze", params, {"ensemble": args.seed},
                    [jpath, cpath], started)
    print(
        f"delta_plus={result.delta_plus:.6g} delta_minus={result.delta_minus:.6g} "
        f"tilt={result.tilt_alpha:.6g}"
    )
    return 0


def cmd_validate(args) -> int:
    c_base = _load_config(args)
    started = time.time()
    period = 2.0 * math.pi / c_base.omega
    radii = [float(x) for x in args.radii.split(",")]
    rates = [float(x) for x in args.rates.split(",")]
    u3 = 0.5
    perp = math.sqrt(1.0 - u3 * u3)

    points = []
    for s0 in radii:
        s = StokesState(
            s0 * perp * math.cos(1.0), s0 * perp * math.sin(1.0), s0 * u3
        )
        for dw, om in itertools.product(rates, rates):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", SlowRateAdvisory)
                c = replace(
                    c_base,
                    delta_omega=dw * c_base.omega,
                    Omega_rot=om * c_base.omega,
                )
            points.append((s0, dw, om, s, c))

    def run_point(pt):
        s0, dw, om, s, c = pt
        rep = compare_reduced_full(s, c, args.periods * period)
        return s0, dw, om, rep.max_deviation

    cap = _thread_cap()
    if cap > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=cap) as pool:
            results = list(pool.map(run_point, points))
    else:
        results = [run_point(pt) for pt in points]

    rows = []
    failures = 0
    for s0, dw, om, dev in results:
        ok = dev < args.tolerance
        failures += 0 if ok else 1
        rows.append((s0, dw, om, dev, ok))

    out_dir = args.out
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "validate.csv"
    with open(path, "w", encoding="utf-8") as f:
        f.write("s0,delta_omega_ratio,Omega_ratio,max_deviation,pass\n")
        for s0, dw, om, dev, ok in rows:
            f.write(f"{s0:.17g},{dw:.17g},{om:.17g},{dev:.17g},{int(ok)}\n")
    params = {
        "radii": radii, "rates": rates, "periods": args.periods,
        "tolerance": args.tolerance, **_config_dict(c_base),
    }
    _write_manifest(out_dir, "validate", params, {}, [path], started)
    for s0, dw, om, dev, ok in rows:
        print(
            f"s0={s0:g} dw={dw:g} om={om:g}: deviation {dev:.4f} "
            f"{'PASS' if ok else 'FAIL'}"
        )
    print(f"{len(rows) - failures}/{len(rows)} points passed")
    return 0 if failures == 0 else 3


def cmd_sweep(args) -> int:
    c = _load_config(args)
    started = time.time()
    s0s = np.linspace(args.s0_min, args.s0_max, args.grid)
    out_dir = args.out
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "stationary_sweep.csv"
    with open(path, "w", encoding="utf-8") as f:
        f.write("s0,regime,n_points,separatrix_h\n")
        for s0 in s0s:
            sset = stationary_points(c, float(s0))
            sep = "" if sset.separatrix_h is None else f"{sset.separatrix_h:.17g}"
            f.write(f"{s0:.17g},{sset.regime.value},{len(sset.points)},{sep}\n")
    params = {
        "s0_min": args.s0_min, "s0_max": args.s0_max, "grid": args.grid,
        **_config_dict(c),
    }
    _write_manifest(out_dir, "sweep", params, {}, [path], started)
    print(f"swept {args.grid} radii")
    return 0


def _config_dict(c: PendulumConfig) -> dict:
    return {
        "omega": c.omega, "delta_omega": c.delta_omega,
        "Omega_rot": c.Omega_rot, "gamma_x": c.gamma_x,
        "gamma_y": c.gamma_y, "length": c.length, "mass": c.mass,
    }


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stokes-pendulum",
        description="Asymmetric Foucault pendulum toolkit in Stokes-parameter form",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate a reduced-flow trajectory")
    _add_config_flags(p)
    p.add_argument("--flow", choices=[k.value for k in FlowKind], default="combined")
    p.add_argument("--s1", type=float, required=True)
    p.add_argument("--s2", type=float, required=True)
    p.add_argument("--s3", type=float, required=True)
    p.add_argument("--t-end", dest="t_end", type=float, required=True)
    p.add_argument("--dt", type=float, required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("stationary", help="stationary points at one radius")
    _add_config_flags(p)
    p.add_argument("--s0", type=float, required=True)
    p.set_defaults(func=cmd_stationary)

    p = sub.add_parser("critical", help="critical-radius surface grid")
    _add_config_flags(p)
    p.add_argument("--dw-min", type=float, default=0.0)
    p.add_argument("--dw-max", type=float, default=0.05)
    p.add_argument("--om-min", type=float, default=0.0)
    p.add_argument("--om-max", type=float, default=0.05)
    p.add_argument("--grid", type=int, default=21)
    p.set_defaults(func=cmd_critical)

    p = sub.add_parser("spectrum", help="collective-spin spectra over a split grid")
    _add_config_flags(p)
    p.add_argument("--particles", type=int, default=50)
    p.add_argument("--dw-min", type=float, default=0.0)
    p.add_argument("--dw-max", type=float, default=None)
    p.add_argument("--grid", type=int, default=41)
    p.add_argument("--bins", type=int, default=200)
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--dos", action="store_true", help="also write binned densities")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("dos", help="densities of states at one split value")
    _add_config_flags(p)
    p.add_argument("--particles", type=int, default=50)
    p.add_argument("--delta-omega-value", dest="delta_omega_value", type=float,
                   required=True)
    p.add_argument("--bins", type=int, default=200)
    p.add_argument("--samples", type=int, default=1_000_000)
    p.set_defaults(func=cmd_dos)

    p = sub.add_parser("zeno", help="filtered quarter-turn transmission")
    _add_config_flags(p)
    p.add_argument("--filters", type=int, required=True)
    p.add_argument("--protocol-omega", type=float, default=0.01)
    p.add_argument("--gamma-filter", type=float, default=50.0)
    p.add_argument("--filter-duration", type=float, default=0.5)
    p.set_defaults(func=cmd_zeno)

    p = sub.add_parser("squeeze", help="classical squeezing of an ensemble")
    _add_config_flags(p)
    p.add_argument("--members", type=int, default=10_000)
    p.add_argument("--s0", type=float, default=0.2)
    p.add_argument("--spread", type=float, default=0.004)
    p.add_argument("--tau", type=float, default=66.0)
    p.set_defaults(func=cmd_squeeze)

    p = sub.add_parser("validate", help="reduced-vs-full deviation grid")
    _add_config_flags(p)
    p.add_argument("--radii", default="0.05,0.1")
    p.add_argument("--rates", default="0,0.01,0.02")
    p.add_argument("--periods", type=int, default=10)
    p.add_argument("--tolerance", type=float, default=0.05)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("sweep", help="stationary regime sweep over s0")
    _add_config_flags(p)
    p.add_argument("--s0-min", type=float, default=0.01)
    p.add_argument("--s0-max", type=float, default=1.0)
    p.add_argument("--grid", type=int, default=50)
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "spectrum" and getattr(args, "dw_max", None) is None:
        args.dw_max = 0.1875 * 1.5 * args.particles  # 1.5x the bifurcation scale
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
