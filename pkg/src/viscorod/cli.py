"""Command-line front end.

Subcommands
-----------
relax   compute the step-response fields u_H and sigma_H on a grid, write
        a combined CSV, a reproducibility manifest, and relaxation figures
poles   build and cache the pole family for (a, b, N)
check   compare field values against the independent inverse-transform
        oracle on a sparse grid
nondim  rescale a physical record to the dimensionless system

Exit codes: 0 success, 1 config/usage error, 2 numerical failure.  All
defaults reproduce the reference relaxation experiment (a = 0.045,
b = 0.5, unit step, cut truncated at 1000, 400 residues), so ``viscorod
relax`` with no arguments regenerates the published curves' data.
"""

from __future__ import annotations

import argparse
import copy
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ViscorodError
from .fields import (
    FieldGrid,
    ForcingSpec,
    SolverConfig,
    compute_sigma_H,
    compute_u_H,
    nondimensionalize,
)
from .kernel import MaterialParams, eval_P_tilde, eval_T_tilde
from .oracle import OracleConfig, invert
from .poles import asymptotic_guess, build_pole_set, save_pole_set

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2

DEFAULT_CONFIG = {
    "a": 0.045,
    "b": 0.5,
    "upsilon0": 1.0,
    "forcing": {"kind": "none", "c": 0.0, "tau": 1.0},
    "solver": {
        "q_max": 1000.0,
        "rel_tol": 1e-9,
        "abs_tol": 1e-12,
        "max_subdivisions": 400,
        "n_residues": 400,
        "root_tol": 1e-12,
    },
    "grid": {
        "displacement": {"xs": [0.25, 0.75], "t_start": 1.0, "t_stop": 10.0, "n_t": 181},
        "stress": {"xs": [0.25, 0.75], "t_start": 1.0, "t_stop": 15.0, "n_t": 281},
    },
    "check": {
        "xs": [0.25, 0.5, 0.75],
        "ts": [1.0, 5.0, 10.0],
        "tolerance": 1e-4,
        "oracle_nodes": 60,
        "fields": ["u_H", "sigma_H"],
    },
    "physical": None,
}


class ConfigError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def load_config(path: str | None) -> dict:
    cfg = copy.deepcopy(DEFAULT_CONFIG)
    if path is not None:
        try:
            user = json.loads(Path(path).read_text())
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}")
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}")
        if not isinstance(user, dict):
            raise ConfigError("config root must be a JSON object")
        cfg = _merge(cfg, user)
    return cfg


def _validate(cfg: dict):
    try:
        MaterialParams(cfg["a"], cfg["b"])
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"a/b: {exc}")
    s = cfg["solver"]
    for key in ("q_max", "rel_tol", "abs_tol", "root_tol"):
        if not (isinstance(s.get(key), (int, float)) and s[key] > 0):
            raise ConfigError(f"solver.{key} must be a positive number")
    for key in ("max_subdivisions", "n_residues"):
        if not (isinstance(s.get(key), int) and s[key] >= 1):
            raise ConfigError(f"solver.{key} must be a positive integer")
    for gname, g in cfg["grid"].items():
        if not g["xs"]:
            raise ConfigError(f"grid.{gname}.xs must be non-empty")
        if any(not 0.0 <= x <= 1.0 for x in g["xs"]):
            raise ConfigError(f"grid.{gname}.xs must lie in [0, 1]")
        if not (g["n_t"] >= 1 and g["t_stop"] >= g["t_start"] > 0.0):
            raise ConfigError(f"grid.{gname} time window is invalid")
    try:
        ForcingSpec(cfg["upsilon0"], cfg["forcing"]["kind"],
                    cfg["forcing"]["c"], cfg["forcing"]["tau"])
    except ValueError as exc:
        raise ConfigError(f"forcing: {exc}")


def _solver_from(cfg: dict) -> SolverConfig:
    return SolverConfig.from_dict(cfg["solver"])


def _grid_ts(g: dict) -> list[float]:
    return [float(v) for v in np.linspace(g["t_start"], g["t_stop"], g["n_t"])]


def _evaluate_grid(name, fn, xs, ts, threads: int, solver: SolverConfig) -> FieldGrid:
    tasks = [(i, j, x, t) for i, x in enumerate(xs) for j, t in enumerate(ts)]
    samples = [[None] * len(ts) for _ in xs]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = pool.map(lambda it: (it[0], it[1], fn(it[2], it[3])), tasks)
            for i, j, sample in results:
                samples[i][j] = sample
    else:
        for i, j, x, t in tasks:
            samples[i][j] = fn(x, t)
    return FieldGrid(name, list(xs), list(ts), samples, solver)


def _write_combined_csv(path: Path, grids: list[FieldGrid]):
    with open(path, "w") as fh:
        fh.write("field,x,t,value,cut_part,residue_part,error_estimate\n")
        for g in grids:
            for row in g.rows():
                fh.write(g.name + "," + ",".join(repr(float(v)) for v in row) + "\n")


def cmd_relax(args) -> int:
    cfg = load_config(args.config)
    if args.qmax is not None:
        cfg["solver"]["q_max"] = args.qmax
    if args.nres is not None:
        cfg["solver"]["n_residues"] = args.nres
    if args.tol is not None:
        cfg["solver"]["rel_tol"] = args.tol
    _validate(cfg)
    solver = _solver_from(cfg)
    params = MaterialParams(cfg["a"], cfg["b"])
    upsilon0 = float(cfg["upsilon0"])
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)

    start = time.perf_counter()
    pole_set = build_pole_set(solver.n_residues, params, solver.root_tol)

    gu = cfg["grid"]["displacement"]
    gs = cfg["grid"]["stress"]
    u_grid = _evaluate_grid(
        "u_H", lambda x, t: compute_u_H(x, t, upsilon0, params, pole_set, solver),
        gu["xs"], _grid_ts(gu), args.threads, solver)
    s_grid = _evaluate_grid(
        "sigma_H", lambda x, t: compute_sigma_H(x, t, upsilon0, params, pole_set, solver),
        gs["xs"], _grid_ts(gs), args.threads, solver)

    csv_path = outdir / "relax.csv"
    _write_combined_csv(csv_path, [u_grid, s_grid])
    figures: list[str] = []
    if not args.no_plot:
        from .plotting import render_relax_figures

        figures = render_relax_figures(u_grid, s_grid, outdir)
    manifest = {
        "tool": "viscorod",
        "version": __version__,
        "params": {"a": params.a, "b": params.b},
        "upsilon0": upsilon0,
        "forcing": cfg["forcing"],
        "solver": solver.to_dict(),
        "grid": cfg["grid"],
        "threads": args.threads,
        "wall_clock_s": time.perf_counter() - start,
        "outputs": {"csv": csv_path.name, "figures": [Path(f).name for f in figures]},
        "diagnostics": {
            g.name: {
                "samples": len(g.xs) * len(g.ts),
                "max_error_estimate": max(s.error_estimate for r in g.samples for s in r),
                "n_residues": solver.n_residues,
            }
            for g in (u_grid, s_grid)
        },
    }
    (outdir / "manifest.json").write_text(json.dumps(manifest, indent=2))
    print(f"wrote {csv_path} ({sum(len(g.xs) * len(g.ts) for g in (u_grid, s_grid))} samples)")
    for f in figures:
        print(f"wrote {f}")
    print(f"wrote {outdir / 'manifest.json'}")
    return EXIT_OK


def cmd_poles(args) -> int:
    cfg = load_config(args.config)
    a = args.a if args.a is not None else cfg["a"]
    b = args.b if args.b is not None else cfg["b"]
    tol = args.tol if args.tol is not None else cfg["solver"]["root_tol"]
    if args.n < 1:
        raise ConfigError("N must be >= 1")
    try:
        params = MaterialParams(a, b)
    except ValueError as exc:
        raise ConfigError(str(exc))
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    ps = build_pole_set(args.n, params, tol)
    path = outdir / f"poles_{a:g}_{b:g}_{args.n}.json"
    save_pole_set(ps, path)
    print(f"n{'':>6} location{'':>34} residual{'':>8} guess_gap")
    for i in range(len(ps)):
        p = ps[i]
        guess = asymptotic_guess(p.index, params)
        gap = abs(p.location - guess) / abs(p.location)
        print(f"{p.index:7d} {p.location.real:+.12e}{p.location.imag:+.12e}j "
              f"{p.residual:.3e} {gap:.3e}")
    print(f"wrote {path}")
    return EXIT_OK


def cmd_check(args) -> int:
    cfg = load_config(args.config)
    if args.qmax is not None:
        cfg["solver"]["q_max"] = args.qmax
    if args.nres is not None:
        cfg["solver"]["n_residues"] = args.nres
    if args.tol is not None:
        cfg["check"]["tolerance"] = args.tol
    _validate(cfg)
    chk = cfg["check"]
    if not chk["xs"] or not chk["ts"]:
        raise ConfigError("check.xs and check.ts must be non-empty")
    solver = _solver_from(cfg)
    params = MaterialParams(cfg["a"], cfg["b"])
    upsilon0 = float(cfg["upsilon0"])
    tol = float(chk["tolerance"])
    ocfg = OracleConfig(nodes=int(chk.get("oracle_nodes", 60)))

    which = chk.get("fields", ["u_H", "sigma_H"])
    bad = [f for f in which if f not in ("u_H", "sigma_H")]
    if bad:
        raise ConfigError(f"check.fields entries unknown: {bad}")

    pole_set = build_pole_set(solver.n_residues, params, solver.root_tol)
    worst = 0.0
    failures = 0
    print(f"field{'':>4} x{'':>6} t{'':>8} value{'':>16} oracle{'':>15} rel_diff")
    for x in chk["xs"]:
        for t in chk["ts"]:
            rows = []
            if "u_H" in which:
                def u_hat(s, _x=x):
                    return upsilon0 * np.asarray(eval_P_tilde(_x, s, params).value) / s

                rows.append(("u_H", compute_u_H(x, t, upsilon0, params, pole_set,
                                                solver), u_hat))
            if "sigma_H" in which:
                def s_hat(s, _x=x):
                    return upsilon0 * np.asarray(eval_T_tilde(_x, s, params).value)

                rows.append(("sigma_H", compute_sigma_H(x, t, upsilon0, params,
                                                        pole_set, solver), s_hat))
            for name, sample, transform in rows:
                try:
                    oracle = invert(transform, t, ocfg)
                except ViscorodError as exc:
                    print(f"{name:<7} {x:<7g} {t:<9g} oracle failure: {exc}")
                    failures += 1
                    continue
                diff = abs(sample.value - oracle.value) / max(abs(oracle.value), 1e-30)
                worst = max(worst, diff)
                print(f"{name:<7} {x:<7g} {t:<9g} {sample.value:+.12e} "
                      f"{oracle.value:+.12e} {diff:.3e}")
    status = "PASS" if worst < tol and failures == 0 else "FAIL"
    print(f"max relative discrepancy: {worst:.3e} (tolerance {tol:g}) -> {status}")
    return EXIT_OK if status == "PASS" else EXIT_NUMERICAL


def cmd_nondim(args) -> int:
    cfg = load_config(args.config)
    phys = cfg.get("physical")
    if phys is None:
        raise ConfigError('nondim needs a "physical" record in the config')
    try:
        out = nondimensionalize(phys)
    except ValueError as exc:
        raise ConfigError(str(exc))
    print(json.dumps(out, indent=2))
    return EXIT_OK


def _build_parser() -> _Parser:
    p = _Parser(prog="viscorod",
                description="distributed-order viscoelastic rod: stress relaxation fields")
    p.add_argument("--version", action="version", version=f"viscorod {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="JSON config file")
    common.add_argument("--out", default="out", help="output directory")
    common.add_argument("--qmax", type=float, default=None, help="cut truncation")
    common.add_argument("--nres", type=int, default=None, help="residue count")
    common.add_argument("--tol", type=float, default=None,
                        help="rel_tol (relax) / root tol (poles) / check tolerance")
    common.add_argument("--threads", type=int, default=1, help="grid evaluation threads")

    pr = sub.add_parser("relax", parents=[common],
                        help="step-response displacement and stress grids")
    pr.add_argument("--no-plot", action="store_true", help="skip figure rendering")
    pr.set_defaults(fn=cmd_relax)

    pp = sub.add_parser("poles", parents=[common], help="build and cache the pole family")
    pp.add_argument("-n", "--n", type=int, required=True, help="number of pole pairs")
    pp.add_argument("-a", type=float, default=None)
    pp.add_argument("-b", type=float, default=None)
    pp.set_defaults(fn=cmd_poles)

    pc = sub.add_parser("check", parents=[common], help="compare fields against the oracle")
    pc.set_defaults(fn=cmd_check)

    pn = sub.add_parser("nondim", parents=[common], help="nondimensionalize a physical record")
    pn.set_defaults(fn=cmd_nondim)
    return p


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ViscorodError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    raise SystemExit(main())
