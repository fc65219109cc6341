"""Command-line front end: experiment configuration, runs, and data export.

Every run writes one CSV per data series plus a JSON manifest.  The CSV
starts with a single '#'-prefixed JSON comment line carrying the run hash,
so each data file is traceable to the exact configuration that produced it;
identical configuration and seed reproduce byte-identical CSVs regardless
of the worker count.

Exit codes: 0 success, 1 oracle-check mismatch, 2 invalid configuration,
3 numerical positivity abort.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .model import ENERGY_SCALE, ConfigurationError, PositivityAbort, adiabaticity_index
from .dynamics import IntegratorParams
from .runs import (
    SimulationConfig,
    concurrence_of_tau_fn,
    curve_along_ramp,
    defect_vs_tau,
    endpoint_metrics,
    map_points,
    static_metrics,
    thread_count,
)
from .scaling import (
    DEFAULT_EPS_C,
    NoEntangledWindow,
    SweepSeries,
    estimate_tau_c,
    fit_log_scaling,
    fit_power_law,
    geometric_grid,
    max_concurrence_over_tau,
)

_DEFAULTS = {
    "n": 200,
    "hi": -30.0,
    "hf": 30.0,
    "tau": 10.0,
    "xi": 0.0,
    "noise": "white",
    "tau_n": 0.0,
    "seed": 1,
    "out": "out",
    "threads": 0,
    "points": 201,
    "tau_grid": "2:500:24",
    "xi_grid": "0.004,0.006,0.008,0.01",
    "dt_max": 1e-2,
    "safety": 1e-1,
    "method": "magnus",
}


def _parse_grid_spec(spec: str) -> np.ndarray:
    """Parse 'lo:hi:points-per-decade' into a geometric grid."""
    try:
        lo, hi, ppd = spec.split(":")
        return geometric_grid(float(lo), float(hi), int(ppd))
    except (ValueError, TypeError) as exc:
        raise ConfigurationError(f"bad grid spec {spec!r}: {exc}") from exc


def _parse_list(spec: str) -> list[float]:
    try:
        return [float(s) for s in spec.split(",") if s.strip()]
    except ValueError as exc:
        raise ConfigurationError(f"bad list spec {spec!r}: {exc}") from exc


def _load_config_file(path: str) -> dict:
    """Plain KEY = VALUE configuration file; '#' starts a comment."""
    values = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"bad config line {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _DEFAULTS:
            raise ConfigurationError(f"unknown config key {key!r}")
        values[key] = val
    return values


def _coerce(key: str, value):
    target = _DEFAULTS[key]
    if isinstance(target, bool):
        return str(value).lower() in ("1", "true", "yes")
    if isinstance(target, int):
        return int(value)
    if isinstance(target, float):
        return float(value)
    return str(value)


def _effective_config(args) -> dict:
    cfg = dict(_DEFAULTS)
    if getattr(args, "config", None):
        for k, v in _load_config_file(args.config).items():
            cfg[k] = _coerce(k, v)
    for key in cfg:
        arg = getattr(args, key, None)
        if arg is not None:
            cfg[key] = _coerce(key, arg)
    return cfg


def _ramp_diagnostics(cfg: dict, tau: float) -> dict:
    """Worst-case adiabaticity diagnostic over the ramp (gap minimum mode)."""
    import math
    eps_min = ENERGY_SCALE * math.sin(math.pi / cfg["n"])
    return {"peak_adiabaticity_index": adiabaticity_index(tau, eps_min)}


def _sim_config(cfg: dict) -> SimulationConfig:
    return SimulationConfig(
        n_sites=cfg["n"],
        h_i=cfg["hi"],
        h_f=cfg["hf"],
        integrator=IntegratorParams(
            dt_max=cfg["dt_max"], safety=cfg["safety"], method=cfg["method"]
        ),
    )


def _manifest_hash(payload: dict) -> str:
    canon = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def write_csv(
    out_dir: Path, name: str, columns: dict, cfg: dict, command: str,
    extra: dict | None = None, wall_time: float = 0.0,
) -> Path:
    """Write one CSV (with manifest comment line) and its JSON manifest."""
    out_dir.mkdir(parents=True, exist_ok=True)
    n_sites = cfg["n"]
    # output location and worker count do not affect the data: keep them out
    # of the hash so equal configurations reproduce byte-identical CSVs
    semantic = {k: cfg[k] for k in sorted(cfg) if k not in ("out", "threads")}
    deterministic = {
        "command": command,
        "name": name,
        "config": semantic,
        "grid": {"n_sites": n_sites, "n_modes": n_sites // 2},
        "seed": cfg.get("seed", 0),
        "code_version": __version__,
        "columns": list(columns),
    }
    run_hash = _manifest_hash(deterministic)
    manifest = dict(deterministic)
    manifest["hash"] = run_hash
    manifest["wall_time_s"] = round(wall_time, 3)
    if extra:
        manifest["diagnostics"] = extra

    csv_path = out_dir / f"{name}.csv"
    header = {"hash": run_hash, "command": command, "code_version": __version__}
    arrays = [np.asarray(v, dtype=float) for v in columns.values()]
    with open(csv_path, "w") as fh:
        fh.write("# " + json.dumps(header, sort_keys=True) + "\n")
        fh.write(",".join(columns) + "\n")
        for row in zip(*arrays):
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
    with open(out_dir / f"{name}.manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return csv_path


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_print_config(args) -> int:
    cfg = _effective_config(args)
    for key in sorted(cfg):
        print(f"{key} = {cfg[key]}")
    return 0


def _cmd_static(args) -> int:
    cfg = _effective_config(args)
    sim = _sim_config(cfg)
    t0 = time.perf_counter()
    h_values = np.linspace(cfg["hi"], cfg["hf"], cfg["points"])
    recs = [static_metrics(sim, float(h)) for h in h_values]
    write_csv(
        Path(cfg["out"]), "static",
        {
            "h0": h_values,
            "c_nn": [r.c_nn for r in recs],
            "c_nnn": [r.c_nnn for r in recs],
            "sz": [r.sz for r in recs],
        },
        cfg, "static", wall_time=time.perf_counter() - t0,
    )
    return 0


def _cmd_quench(args) -> int:
    cfg = _effective_config(args)
    _require_white(cfg)
    sim = _sim_config(cfg)
    t0 = time.perf_counter()
    if args.hf_scan:
        h_values = np.linspace(cfg["hi"], cfg["hf"], cfg["points"])[1:]
    else:
        h_values = np.array([cfg["hf"]])
    recs = curve_along_ramp(sim, cfg["tau"], cfg["xi"], h_values)
    name = f"quench_tau{cfg['tau']:g}_xi{cfg['xi']:g}"
    write_csv(
        Path(cfg["out"]), name,
        {
            "h0": h_values,
            "c_nn": [r.c_nn for r in recs],
            "c_nnn": [r.c_nnn for r in recs],
            "defect_density": [r.defect for r in recs],
            "sz": [r.sz for r in recs],
            "mean_purity": [r.purity for r in recs],
        },
        cfg, "quench",
        extra={"clamped_modes": int(sum(r.n_clamped for r in recs)),
               **_ramp_diagnostics(cfg, cfg["tau"])},
        wall_time=time.perf_counter() - t0,
    )
    return 0


def _cmd_sweep_tau(args) -> int:
    cfg = _effective_config(args)
    _require_white(cfg)
    sim = _sim_config(cfg)
    taus = _parse_grid_spec(cfg["tau_grid"])
    t0 = time.perf_counter()
    recs = map_points(sim, [(t, cfg["xi"]) for t in taus],
                      threads=thread_count(cfg["threads"] or None))
    name = f"sweep_tau_xi{cfg['xi']:g}_hf{cfg['hf']:g}"
    write_csv(
        Path(cfg["out"]), name,
        {
            "tau": taus,
            "c_nn": [r.c_nn for r in recs],
            "c_nnn": [r.c_nnn for r in recs],
            "defect_density": [r.defect for r in recs],
            "mean_purity": [r.purity for r in recs],
        },
        cfg, "sweep-tau",
        extra={"clamped_modes": int(sum(r.n_clamped for r in recs)),
               **_ramp_diagnostics(cfg, float(min(taus)))},
        wall_time=time.perf_counter() - t0,
    )
    return 0


def _cmd_sweep_xi(args) -> int:
    cfg = _effective_config(args)
    _require_white(cfg)
    sim = _sim_config(cfg)
    taus = _parse_grid_spec(cfg["tau_grid"])
    xis = _parse_list(cfg["xi_grid"])
    threads = thread_count(cfg["threads"] or None)
    t0 = time.perf_counter()
    tau_c, c_max, tau_at_max = [], [], []
    for xi in xis:
        recs = map_points(sim, [(t, xi) for t in taus], threads=threads)
        series = SweepSeries(
            np.asarray(taus, float), np.asarray([r.c_nnn for r in recs]),
            swept="tau", fixed={"xi": xi},
        )
        name = f"sweep_tau_xi{xi:g}_hf{cfg['hf']:g}"
        write_csv(
            Path(cfg["out"]), name,
            {
                "tau": series.x,
                "c_nn": [r.c_nn for r in recs],
                "c_nnn": series.y,
                "defect_density": [r.defect for r in recs],
                "mean_purity": [r.purity for r in recs],
            },
            {**cfg, "xi": xi}, "sweep-tau", wall_time=0.0,
        )
        cmax, tmax = max_concurrence_over_tau(series)
        c_max.append(cmax)
        tau_at_max.append(tmax)
        try:
            tau_c.append(estimate_tau_c(concurrence_of_tau_fn(sim, xi), taus))
        except (NoEntangledWindow, ValueError):
            tau_c.append(float("nan"))
    write_csv(
        Path(cfg["out"]), "sweep_xi",
        {
            "xi": xis,
            "xi2": [x**2 for x in xis],
            "tau_c": tau_c,
            "c_max": c_max,
            "tau_at_max": tau_at_max,
        },
        cfg, "sweep-xi", wall_time=time.perf_counter() - t0,
    )
    return 0


def _cmd_defects(args) -> int:
    cfg = _effective_config(args)
    _require_white(cfg)
    sim = _sim_config(cfg)
    taus = _parse_grid_spec(cfg["tau_grid"])
    t0 = time.perf_counter()
    series = defect_vs_tau(sim, taus, cfg["xi"],
                           threads=thread_count(cfg["threads"] or None))
    name = f"defects_xi{cfg['xi']:g}"
    write_csv(
        Path(cfg["out"]), name,
        {"tau": series.x, "defect_density": series.y},
        cfg, "defects",
        extra=_ramp_diagnostics(cfg, float(min(taus))),
        wall_time=time.perf_counter() - t0,
    )
    return 0


def _cmd_fit(args) -> int:
    cfg = _effective_config(args)
    path = Path(args.infile)
    if not path.exists():
        raise ConfigurationError(f"input CSV {path} does not exist")
    with open(path) as fh:
        first = fh.readline()
        if not first.startswith("#"):
            raise ConfigurationError(f"{path} lacks a manifest header line")
        names = fh.readline().strip().split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    table = {name: data[:, i] for i, name in enumerate(names)}
    for col in (args.x, args.y):
        if col not in table:
            raise ConfigurationError(f"column {col!r} not in {path} (has {names})")
    order = np.argsort(table[args.x])
    series = SweepSeries(table[args.x][order], table[args.y][order], swept=args.x)
    window = None
    if args.window:
        lo, hi = (float(s) for s in args.window.split(":"))
        window = (lo, hi)
    if args.kind == "power":
        mask = series.y > 0
        series = SweepSeries(series.x[mask], series.y[mask], swept=args.x)
        fit = fit_power_law(series, window)
    else:
        fit = fit_log_scaling(series, xi=cfg["xi"], window=window)
    out_dir = Path(cfg["out"])
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / f"fit_{args.kind}_{path.stem}.json"
    payload = json.loads(fit.to_json())
    payload["inputs_hash"] = hashlib.sha256(path.read_bytes()).hexdigest()[:16]
    payload["input_file"] = path.name
    out_path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    print(json.dumps(payload, sort_keys=True))
    return 0


def _cmd_oracle_check(args) -> int:
    from . import oracle
    from .correlators import (
        ab_correlators,
        spin_correlators_general,
        spin_correlators_r1,
        spin_correlators_r2,
    )
    from .dynamics import equilibrium_states, evolve_all_modes
    from .entanglement import concurrence_from_spin
    from .model import NoiseSpec, QuenchProtocol, build_grid

    cfg = _effective_config(args)
    n = cfg["n"] if cfg["n"] <= 10 else 8
    grid = build_grid(n)
    rows = []

    for h0 in (0.2, 0.5, 1.0, 1.5, 3.0):
        states = equilibrium_states(grid, h0)
        corr = ab_correlators(states, r_max=3)
        s1 = spin_correlators_r1(corr)
        s2 = spin_correlators_r2(corr)
        s3 = spin_correlators_general(corr, 3)
        gs = oracle.ed_ground_state(n, h0)
        checks = {
            "xx_r1": (s1.xx, oracle.ed_spin_correlator(gs, "x", "x", 1)),
            "yy_r1": (s1.yy, oracle.ed_spin_correlator(gs, "y", "y", 1)),
            "zz_r1": (s1.zz, oracle.ed_spin_correlator(gs, "z", "z", 1)),
            "xx_r2": (s2.xx, oracle.ed_spin_correlator(gs, "x", "x", 2)),
            "zz_r2": (s2.zz, oracle.ed_spin_correlator(gs, "z", "z", 2)),
            "xx_r3": (s3.xx, oracle.ed_spin_correlator(gs, "x", "x", 3)),
            "sz": (s1.sz, oracle.ed_onsite_sz(gs)),
            "c_nn": (concurrence_from_spin(s1), oracle.ed_concurrence(gs, 1)),
            "c_nnn": (concurrence_from_spin(s2), oracle.ed_concurrence(gs, 2)),
        }
        for label, (a, b) in checks.items():
            rows.append((f"static h0={h0} {label}", abs(a - b), 1e-6))

    for tau in (0.5, 5.0):
        prot = QuenchProtocol(h_i=-5.0, h_f=5.0, tau=tau)
        states = evolve_all_modes(grid, prot, NoiseSpec("white", 0.0), prot.t_f)
        corr = ab_correlators(states, r_max=2)
        c1 = concurrence_from_spin(spin_correlators_r1(corr))
        c2 = concurrence_from_spin(spin_correlators_r2(corr))
        fin = oracle.ed_evolve(oracle.ed_ground_state(n, -5.0), prot, dt=1e-3)
        rows.append((f"ramp tau={tau} c_nn", abs(c1 - oracle.ed_concurrence(fin, 1)), 1e-5))
        rows.append((f"ramp tau={tau} c_nnn", abs(c2 - oracle.ed_concurrence(fin, 2)), 1e-5))

    failed = 0
    for label, dev, tol in rows:
        ok = dev <= tol
        failed += not ok
        print(f"{'PASS' if ok else 'FAIL'}  {label:30s}  deviation={dev:.3e}  tol={tol:g}")
    print(f"oracle-check: {len(rows) - failed}/{len(rows)} checks passed (N={n})")
    return 1 if failed else 0


def _require_white(cfg: dict):
    if cfg["noise"] not in ("white", "ou"):
        raise ConfigurationError(f"unknown noise kind {cfg['noise']!r}")
    if cfg["noise"] == "ou" and cfg["xi"] > 0:
        raise ConfigurationError(
            "ornstein-uhlenbeck noise is only supported by the trajectory "
            "oracle; grid experiments require white noise"
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quenchlab",
        description="Noisy linear quenches across the transverse-field Ising "
                    "critical points: runs, sweeps, and scaling fits.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="KEY = VALUE configuration file")
        p.add_argument("--n", type=int, help="number of sites (even)")
        p.add_argument("--hi", type=float, help="initial field")
        p.add_argument("--hf", type=float, help="final field")
        p.add_argument("--tau", type=float, help="quench time scale")
        p.add_argument("--tau-grid", dest="tau_grid", help="lo:hi:points-per-decade")
        p.add_argument("--xi", type=float, help="white-noise intensity")
        p.add_argument("--xi-grid", dest="xi_grid", help="comma-separated xi values")
        p.add_argument("--noise", choices=["white", "ou"], help="noise kind")
        p.add_argument("--tau-n", dest="tau_n", type=float, help="noise correlation time")
        p.add_argument("--seed", type=int, help="random seed (trajectory sampling)")
        p.add_argument("--out", help="output directory")
        p.add_argument("--threads", type=int,
                       help="worker count (QUENCHLAB_THREADS as fallback)")
        p.add_argument("--points", type=int, help="curve resolution")
        p.add_argument("--dt-max", dest="dt_max", type=float, help="max step size")
        p.add_argument("--safety", type=float, help="step-size safety factor")
        p.add_argument("--method", choices=["magnus", "rk4"], help="integrator")

    for name, fn, extra in (
        ("static", _cmd_static, None),
        ("quench", _cmd_quench, "scan"),
        ("sweep-tau", _cmd_sweep_tau, None),
        ("sweep-xi", _cmd_sweep_xi, None),
        ("defects", _cmd_defects, None),
        ("oracle-check", _cmd_oracle_check, None),
        ("print-config", _cmd_print_config, None),
    ):
        p = sub.add_parser(name)
        add_common(p)
        if extra == "scan":
            p.add_argument("--hf-scan", action="store_true",
                           help="emit the whole curve along the ramp")
        p.set_defaults(fn=fn)

    p = sub.add_parser("fit")
    add_common(p)
    p.add_argument("--kind", choices=["power", "log"], required=True)
    p.add_argument("--in", dest="infile", required=True, help="input CSV")
    p.add_argument("--x", default="tau", help="x column name")
    p.add_argument("--y", default="c_nnn", help="y column name")
    p.add_argument("--window", help="fit window lo:hi")
    p.set_defaults(fn=_cmd_fit)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except PositivityAbort as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
