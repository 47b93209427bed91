"""Command-line interface: profile, poisson, initdata, simulate, selfsim,
fit, verify, pe, run, sweep.

Output locations default under the directory named by COLDION_OUT (falling
back to the working directory).  All file formats are the CSV/JSON schemas
described in the experiment module.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import burgers, diagnostics, experiment, initdata, pressureless, verify
from .experiment import read_csv, write_csv, write_json
from .grids import Grid1D
from .poisson import solve_greens_iteration, solve_newton


def _out_path(p: str) -> Path:
    root = os.environ.get("COLDION_OUT", ".")
    path = Path(p)
    return path if path.is_absolute() else Path(root) / path


def cmd_profile(args) -> int:
    table = burgers.profile_table(args.ymin, args.ymax, args.n)
    write_csv(_out_path(args.out), ["y", "Ubar", "d1", "d2", "d3", "d4"], table.T)
    print(f"wrote {args.n} profile samples to {args.out}")
    return 0


def cmd_poisson(args) -> int:
    cols = read_csv(_out_path(args.rho_file))
    x = cols["x"]
    grid = Grid1D(x0=float(x[0]), dx=float(x[1] - x[0]), n=x.size)
    rho = cols["rho"]
    if args.solver == "newton":
        sol = solve_newton(rho, grid, tol=args.tol)
    else:
        sol = solve_greens_iteration(rho - 1.0, grid, tol=args.tol)
    write_csv(_out_path(args.out), ["x", "rho", "phi", "phi_x", "phi_xx"],
              [x, rho, sol.phi, sol.phi_x, sol.phi_xx])
    print(f"{args.solver}: {sol.iterations} iterations, residual {sol.residual:.3e}")
    return 0


def cmd_initdata(args) -> int:
    if args.action == "compute-A":
        a_val, sup_i = initdata.compute_A(args.tol)
        print(json.dumps({"A": a_val, "sup_I": sup_i}))
        return 0
    data = experiment.make_initial_data(
        experiment.InitSpec(kind=args.kind, eps=args.eps, path=args.file))
    experiment.write_init_table(data, (-args.L, args.L), args.n, _out_path(args.out))
    print(f"wrote initial data table to {args.out}")
    if args.validate:
        rep = initdata.validate(data, data.eps, (-args.L, args.L))
        for name, c in rep.conditions.items():
            print(f"  {name}: {'pass' if c.passed else 'FAIL'} (margin {c.margin:.3e})")
        out_json = _out_path(args.out).with_suffix(".admissibility.json")
        write_json(out_json, rep.as_dict())
    return 0


def cmd_simulate(args) -> int:
    cfg = experiment.ExperimentConfig(
        init=experiment.InitSpec(kind=args.init, eps=args.eps, path=args.file),
        grid=experiment.GridSpec(L=args.L, n=args.n),
        solver=experiment.SolverSpec(
            dt_max=args.dt_max, w_stop=args.wstop, snap_every=args.snap_every,
            t_max=args.tmax, field_mode=args.field_mode, frozen_m=args.frozen_m,
            particle_mult=args.mult, particle_pad=args.pad,
            particle_window=args.window),
        out_dir=str(_out_path(args.out)),
        stages=("initdata", "simulate"),
    )
    manifest = experiment.run_experiment(cfg)
    status = {k: v["status"] for k, v in manifest["stages"].items()}
    print(json.dumps(status))
    return 0 if all(v == "ok" for v in status.values()) else 1


def cmd_selfsim(args) -> int:
    run = experiment.load_run(_out_path(args.run))
    if args.A is None:
        a_val, _ = initdata.compute_A(1e-6)
    else:
        a_val = args.A
    cfg = experiment.ExperimentConfig(
        frame=experiment.FrameSpec(y_max=args.ymax, n_y=args.ny, M=args.M))
    out = _out_path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    mon = experiment.selfsim_stage(cfg, run, a_val, out)
    n_res = sum(1 for r in mon["rows"] if r["resolved"])
    print(f"monitored {len(mon['rows'])} snapshots ({n_res} resolved); wrote {args.out}")
    return 0


def cmd_fit(args) -> int:
    run = experiment.load_run(_out_path(args.run))
    betas = [float(b) for b in args.betas.split(",")]
    cfg = experiment.ExperimentConfig(diag=experiment.DiagSpec(betas=betas))
    report = experiment.fit_stage(cfg, run, _out_path(args.out).parent)
    target = _out_path(args.out)
    write_json(target, report.as_dict())
    print(f"t* = {report.t_star:.6g}, spatial slope = {report.spatial_fit.exponent:.4f}")
    return 0


def cmd_verify(args) -> int:
    if args.action == "inequalities":
        reports = verify.check_profile_inequalities()
        write_json(_out_path(args.out), {"reports": [r.as_dict() for r in reports]})
        for r in reports:
            lam = f" lambda={r.lambda_found:.3f}" if r.lambda_found else ""
            print(f"  {r.name}: {'pass' if r.passed else 'FAIL'}{lam}")
        return 0 if all(r.passed for r in reports) else 1
    draws = verify.run_max_principle_draws(seed=args.seed, n_draws=args.draws)
    decay = verify.run_decay_check()
    write_json(_out_path(args.out), {
        "max_principle": draws,
        "decay": {"passed": decay["passed"]},
    })
    ok = draws["all_passed"] and decay["passed"]
    print(f"transport checks: {'pass' if ok else 'FAIL'}")
    return 0 if ok else 1


def cmd_pe(args) -> int:
    name = args.v0.split(":", 1)[1] if ":" in args.v0 else args.v0
    data = pressureless.preset(name)
    al = np.linspace(-args.half_width, args.half_width, args.n)
    # --t is elapsed time from the initial slice (lifespan units).
    x, v, n = pressureless.exact_state(data, data.t0 + args.t, al)
    write_csv(_out_path(args.out), ["alpha", "x", "v", "n"], [al, x, v, n])
    print(f"lifespan = {pressureless.lifespan(data):.9g}")
    return 0


def cmd_run(args) -> int:
    if args.config:
        cfg = experiment.config_from_file(args.config)
        if args.out:
            cfg.out_dir = str(_out_path(args.out))
    else:
        cfg = experiment.preset(args.preset, eps=args.eps,
                                out_dir=str(_out_path(args.out)) if args.out else None)
    manifest = experiment.run_experiment(cfg)
    status = {k: v["status"] for k, v in manifest["stages"].items()}
    print(json.dumps(status))
    return 0 if all(v == "ok" for v in status.values()) else 1


def cmd_sweep(args) -> int:
    base = experiment.preset(args.preset, out_dir=str(_out_path(args.out)))
    eps_values = [float(e) for e in args.eps_list.split(",")]
    manifests = experiment.run_sweep(base, eps_values, workers=args.workers)
    ok = all(all(v["status"] == "ok" for v in m["stages"].values()) for m in manifests)
    print(f"sweep finished: {len(manifests)} runs, {'all ok' if ok else 'with errors'}")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="coldion",
                                description="Delta-shock formation in cold-ion Euler-Poisson flow")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("profile", help="tabulate the Burgers blow-up profile")
    q.add_argument("--ymin", type=float, default=-10.0)
    q.add_argument("--ymax", type=float, default=10.0)
    q.add_argument("--n", type=int, default=1001)
    q.add_argument("--out", default="profile.csv")
    q.set_defaults(func=cmd_profile)

    q = sub.add_parser("poisson", help="solve the Boltzmann-Poisson equation")
    q.add_argument("--rho-file", required=True)
    q.add_argument("--solver", choices=["newton", "greens"], default="newton")
    q.add_argument("--tol", type=float, default=1e-10)
    q.add_argument("--out", default="field.csv")
    q.set_defaults(func=cmd_poisson)

    q = sub.add_parser("initdata", help="build and validate initial data")
    q.add_argument("action", nargs="?", choices=["table", "compute-A"], default="table")
    q.add_argument("--kind", choices=["canonical", "figure1", "file"], default="canonical")
    q.add_argument("--eps", type=float, default=0.05)
    q.add_argument("--file")
    q.add_argument("--L", type=float, default=20.0)
    q.add_argument("--n", type=int, default=4001)
    q.add_argument("--validate", action="store_true")
    q.add_argument("--tol", type=float, default=1e-6, help="quadrature tolerance for compute-A")
    q.add_argument("--out", default="init.csv")
    q.set_defaults(func=cmd_initdata)

    q = sub.add_parser("simulate", help="run the Lagrangian solver until blow-up")
    q.add_argument("--init", choices=["canonical", "figure1", "file"], default="figure1")
    q.add_argument("--eps", type=float, default=0.05)
    q.add_argument("--file")
    q.add_argument("--n", type=int, default=4001)
    q.add_argument("--L", type=float, default=20.0)
    q.add_argument("--wstop", type=float, default=1e-3)
    q.add_argument("--snap-every", type=float, default=0.01)
    q.add_argument("--dt-max", type=float, default=1e-3)
    q.add_argument("--tmax", type=float, default=10.0)
    q.add_argument("--field-mode", choices=["full", "none", "frozen"], default="full")
    q.add_argument("--frozen-m", type=float, default=1.0)
    q.add_argument("--mult", type=int, default=1)
    q.add_argument("--pad", type=float, default=0.0)
    q.add_argument("--window", type=float, default=None)
    q.add_argument("--out", default="run")
    q.set_defaults(func=cmd_simulate)

    q = sub.add_parser("selfsim", help="transform a run into the self-similar frame")
    q.add_argument("--run", required=True)
    q.add_argument("--ymax", type=float, default=50.0)
    q.add_argument("--ny", type=int, default=2001)
    q.add_argument("--M", type=float, default=1e4)
    q.add_argument("--A", type=float, default=None)
    q.add_argument("--out", default="frames")
    q.set_defaults(func=cmd_selfsim)

    q = sub.add_parser("fit", help="fit blow-up rates and profiles")
    q.add_argument("--run", required=True)
    q.add_argument("--betas", default="0.333333,0.5,0.666667")
    q.add_argument("--out", default="report.json")
    q.set_defaults(func=cmd_fit)

    q = sub.add_parser("verify", help="inequality and transport-lemma checks")
    q.add_argument("action", choices=["inequalities", "transport"])
    q.add_argument("--seed", type=int, default=7)
    q.add_argument("--draws", type=int, default=20)
    q.add_argument("--out", default="verify.json")
    q.set_defaults(func=cmd_verify)

    q = sub.add_parser("pe", help="exact pressureless-Euler solution")
    q.add_argument("action", choices=["exact"])
    q.add_argument("--v0", default="preset:gauss")
    q.add_argument("--t", type=float, default=0.5,
                   help="elapsed time from the initial slice")
    q.add_argument("--n", type=int, default=4001)
    q.add_argument("--half-width", type=float, default=10.0)
    q.add_argument("--out", default="pe.csv")
    q.set_defaults(func=cmd_pe)

    q = sub.add_parser("run", help="full experiment pipeline from a preset or config file")
    q.add_argument("--preset", choices=["figure1", "canonical"], default="figure1")
    q.add_argument("--config", default=None,
                   help="sectioned key-value config; overrides --preset")
    q.add_argument("--eps", type=float, default=0.05)
    q.add_argument("--out", default=None)
    q.set_defaults(func=cmd_run)

    q = sub.add_parser("sweep", help="fan out experiments over eps values")
    q.add_argument("--preset", choices=["canonical"], default="canonical")
    q.add_argument("--eps-list", required=True)
    q.add_argument("--out", default="sweep")
    q.add_argument("--workers", type=int, default=1)
    q.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
