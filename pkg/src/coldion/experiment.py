"""End-to-end experiment pipeline: data, simulation, frame, fits, manifest.

Stages run in order (initdata, validate, simulate, selfsim, fit, verify),
short-circuiting on errors; every artifact lands in the output directory and
is listed in manifest.json with its sha256.  All files are plain CSV (with a
"# schema=1" header line) or JSON, written with fixed float formatting so
identical configs produce byte-identical artifacts.
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import burgers, diagnostics, initdata, lagrangian, selfsimilar, verify
from .grids import Grid1D
from .lagrangian import RunResult, Snapshot, SolverConfig

SCHEMA_LINE = "# schema=1"


# ---------------------------------------------------------------------------
# Configuration.

@dataclass
class InitSpec:
    kind: str = "figure1"  # canonical | figure1 | file
    eps: float = 0.05
    path: Optional[str] = None


@dataclass
class GridSpec:
    L: float = 20.0
    n: int = 4001


@dataclass
class SolverSpec:
    dt_max: float = 2e-3
    c_cfl: float = 0.2
    w_stop: float = 1e-3
    t_max: float = 10.0
    poisson_tol: float = 1e-10
    snap_every: float = 0.01
    snap_geo: float = 0.9
    field_mode: str = "full"
    frozen_m: float = 1.0
    particle_mult: int = 1
    particle_pad: float = 0.0
    particle_window: Optional[float] = None
    n_particles: int = 0  # explicit marker count; 0 derives from particle_mult


@dataclass
class FrameSpec:
    y_max: float = 50.0
    n_y: int = 2001
    M: float = 1e4


@dataclass
class DiagSpec:
    betas: Sequence[float] = (1.0 / 3.0, 0.5, 2.0 / 3.0)
    dominance: float = 10.0
    # Outer radius of the spatial-fit window; None picks
    # r_inner * 10^1.25 (the -2/3 law holds "sufficiently close" only, so
    # the window must shrink with the stop time).
    r_outer: Optional[float] = None
    drop_last: int = 3


@dataclass
class ExperimentConfig:
    init: InitSpec = field(default_factory=InitSpec)
    grid: GridSpec = field(default_factory=GridSpec)
    solver: SolverSpec = field(default_factory=SolverSpec)
    frame: FrameSpec = field(default_factory=FrameSpec)
    diag: DiagSpec = field(default_factory=DiagSpec)
    out_dir: str = "run"
    seed: int = 7
    stages: Sequence[str] = ("initdata", "validate", "simulate", "selfsim", "fit", "verify")

    def validate_config(self):
        errors = []
        if self.init.kind not in ("canonical", "figure1", "file"):
            errors.append(f"init.kind: unknown kind {self.init.kind!r}")
        if self.init.kind == "canonical" and not (0.0 < self.init.eps <= 0.2):
            errors.append(f"init.eps: must lie in (0, 0.2], got {self.init.eps}")
        if self.grid.L <= 0:
            errors.append("grid.L: must be positive")
        if self.grid.n % 2 == 0 or self.grid.n < 3:
            errors.append("grid.n: must be odd and >= 3")
        for name in ("dt_max", "c_cfl", "w_stop", "poisson_tol", "snap_every"):
            if getattr(self.solver, name) <= 0:
                errors.append(f"solver.{name}: must be positive")
        if not (0 < self.solver.w_stop <= 0.1):
            errors.append("solver.w_stop: must lie in (0, 0.1]")
        if self.frame.y_max < 10:
            errors.append("frame.y_max: must be >= 10")
        if any(not (0 < b <= 1) for b in self.diag.betas):
            errors.append("diag.betas: every beta must lie in (0, 1]")
        if errors:
            raise ValueError("invalid config: " + "; ".join(errors))

    def as_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["diag"]["betas"] = list(self.diag.betas)
        d["stages"] = list(self.stages)
        return d


def config_from_file(path: str) -> ExperimentConfig:
    """Flat sectioned key-value config; every key defaults from the dataclasses.

    Sections [init], [grid], [solver], [frame], [diag], [output] with keys
    named after the spec fields, e.g.

        [init]
        kind = canonical
        eps = 0.05
        [grid]
        L = 4.0
        n = 8001
        [output]
        out_dir = run_custom
    """
    import ast
    import configparser

    parser = configparser.ConfigParser()
    parser.optionxform = str  # keys are case-sensitive field names (e.g. L)
    read = parser.read(path)
    if not read:
        raise ValueError(f"config file not found: {path}")
    cfg = ExperimentConfig()

    def coerce(raw: str):
        try:
            return ast.literal_eval(raw)
        except (ValueError, SyntaxError):
            return raw

    targets = {"init": cfg.init, "grid": cfg.grid, "solver": cfg.solver,
               "frame": cfg.frame, "diag": cfg.diag}
    for section, obj in targets.items():
        if not parser.has_section(section):
            continue
        for key, raw in parser.items(section):
            if not hasattr(obj, key):
                raise ValueError(f"config [{section}] has unknown key {key!r}")
            setattr(obj, key, coerce(raw))
    if parser.has_section("output"):
        if parser.has_option("output", "out_dir"):
            cfg.out_dir = parser.get("output", "out_dir")
        if parser.has_option("output", "stages"):
            cfg.stages = tuple(
                s.strip() for s in parser.get("output", "stages").split(",") if s.strip()
            )
    return cfg


def preset(name: str, eps: float = 0.05, out_dir: Optional[str] = None) -> ExperimentConfig:
    """Built-in experiment configurations."""
    if name == "figure1":
        cfg = ExperimentConfig(
            init=InitSpec(kind="figure1"),
            grid=GridSpec(L=20.0, n=4001),
            solver=SolverSpec(dt_max=1e-3, w_stop=1e-3, snap_every=0.01,
                              particle_mult=2, particle_window=6.0),
            out_dir=out_dir or "run_figure1",
        )
        return cfg
    if name == "canonical":
        # The core shrinks like eps^(3/2); the grid must resolve it and the
        # markers must stay dense in frame units deep into the run.
        L = 4.0
        n = 8001
        dx = 2 * L / (n - 1)
        pad = 0.3
        n_part = int(round(2 * (L + pad) / 1.25e-4)) + 1
        return ExperimentConfig(
            init=InitSpec(kind="canonical", eps=eps),
            grid=GridSpec(L=L, n=n),
            solver=SolverSpec(dt_max=2e-4, w_stop=2e-3, snap_every=2e-3,
                              snap_geo=0.88, particle_pad=pad,
                              particle_window=2.0, t_max=1.0,
                              n_particles=n_part),
            frame=FrameSpec(y_max=50.0, n_y=2001),
            out_dir=out_dir or "run_canonical",
        )
    raise ValueError(f"unknown preset {name!r}")


# ---------------------------------------------------------------------------
# Artifact I/O.

def write_csv(path: Path, header: Sequence[str], columns: Sequence[np.ndarray]):
    arr = np.column_stack([np.asarray(c, dtype=float) for c in columns])
    with open(path, "w") as f:
        f.write(SCHEMA_LINE + "\n")
        f.write(",".join(header) + "\n")
        np.savetxt(f, arr, fmt="%.17g", delimiter=",")


def read_csv(path: Path) -> Dict[str, np.ndarray]:
    with open(path) as f:
        first = f.readline().strip()
        if not first.startswith("# schema="):
            raise ValueError(f"{path}: missing schema header")
        header = f.readline().strip().split(",")
        data = np.loadtxt(f, delimiter=",", ndmin=2)
    return {h: data[:, i] for i, h in enumerate(header)}


def _jsonable(obj):
    """Strict-JSON form: non-finite floats become null (json.dump would emit
    bare NaN literals, which strict parsers reject)."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def write_json(path: Path, obj: dict):
    with open(path, "w") as f:
        json.dump(_jsonable(obj), f, indent=1, sort_keys=True, allow_nan=False)
        f.write("\n")


def sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def make_initial_data(spec: InitSpec) -> initdata.InitialData:
    if spec.kind == "canonical":
        return initdata.canonical_data(spec.eps)
    if spec.kind == "figure1":
        return initdata.figure1_data()
    if spec.kind == "file":
        cols = read_csv(Path(spec.path))
        return initdata.data_from_samples(cols["x"], cols["rho0"], cols["u0"])
    raise ValueError(f"unknown init kind {spec.kind!r}")


def write_init_table(data: initdata.InitialData, domain, n: int, path: Path):
    x = np.linspace(domain[0], domain[1], n)
    cols = [x, data.rho0(x), data.u0(x)]
    headers = ["x", "rho0", "u0"]
    for k in range(1, 5):
        if k in data.velocity:
            cols.append(data.du0(x, k))
            headers.append(f"d{k}u0")
    write_csv(path, headers, cols)


def save_run(run: RunResult, out: Path):
    (out / "snapshots").mkdir(parents=True, exist_ok=True)
    (out / "particles").mkdir(exist_ok=True)
    write_csv(out / "series.csv",
              list(run.series.keys()), [run.series[k] for k in run.series])
    for i, sn in enumerate(run.snapshots):
        write_csv(out / "snapshots" / f"snap_{i:04d}.csv",
                  ["x", "rho", "u", "phi", "w"],
                  [sn.grid.x, sn.rho, sn.u, sn.phi, sn.w_grid])
        write_csv(out / "particles" / f"part_{i:04d}.csv",
                  ["alpha", "x", "u", "w", "wd", "rho0"],
                  [sn.particles[k] for k in ("alpha", "x", "u", "w", "wd", "rho0")])
    times = {"snapshot_times": [sn.t for sn in run.snapshots],
             "snapshot_min_w": [sn.min_w for sn in run.snapshots],
             "timeout": run.timeout}
    if run.event is not None:
        times["event"] = dataclasses.asdict(run.event)
    write_json(out / "event.json", times)


def load_run(run_dir: Path) -> RunResult:
    run_dir = Path(run_dir)
    if not (run_dir / "event.json").exists():
        raise FileNotFoundError(f"{run_dir} holds no run (missing event.json)")
    meta = json.load(open(run_dir / "event.json"))
    series = read_csv(run_dir / "series.csv")
    snaps = []
    snap_files = sorted((run_dir / "snapshots").glob("snap_*.csv"))
    part_files = sorted((run_dir / "particles").glob("part_*.csv"))
    if not snap_files or len(snap_files) != len(part_files):
        raise FileNotFoundError(
            f"{run_dir}: {len(snap_files)} snapshot vs {len(part_files)} particle files")
    for i, (sf, pf) in enumerate(zip(snap_files, part_files)):
        cols = read_csv(sf)
        parts = read_csv(pf)
        x = cols["x"]
        grid = Grid1D(x0=float(x[0]), dx=float(x[1] - x[0]), n=x.size)
        snaps.append(Snapshot(
            t=meta["snapshot_times"][i], grid=grid, rho=cols["rho"], u=cols["u"],
            phi=cols["phi"], w_grid=cols["w"], particles=parts,
            min_w=meta["snapshot_min_w"][i],
        ))
    event = None
    if "event" in meta:
        event = lagrangian.BlowupEvent(**meta["event"])
    return RunResult(series=series, snapshots=snaps, event=event,
                     timeout=meta["timeout"], grid=snaps[0].grid if snaps else None)


# ---------------------------------------------------------------------------
# Stage implementations.

def simulate_stage(cfg: ExperimentConfig, data: initdata.InitialData, out: Path) -> RunResult:
    g = cfg.grid
    s = cfg.solver
    n_part = s.n_particles or (g.n - 1) * max(s.particle_mult, 1) + 1
    span = (-g.L - s.particle_pad, g.L + s.particle_pad)
    ens = lagrangian.init_particles(data, span, n_part)
    solver_cfg = SolverConfig(
        L=g.L, n_grid=g.n, dt_max=s.dt_max, c_cfl=s.c_cfl, w_stop=s.w_stop,
        t_max=s.t_max, poisson_tol=s.poisson_tol, snap_every=s.snap_every,
        snap_geo=s.snap_geo, field_mode=s.field_mode, frozen_m=s.frozen_m,
        particle_window=s.particle_window, particle_pad=s.particle_pad,
    )
    run = lagrangian.run_until_blowup(ens, solver_cfg, data)
    save_run(run, out)
    return run


def selfsim_stage(cfg: ExperimentConfig, run: RunResult, A: float, out: Path) -> dict:
    mon = selfsimilar.monitor_run(run, A=A, M=cfg.frame.M,
                                  y_max=cfg.frame.y_max, n_y=cfg.frame.n_y)
    rows = mon["rows"]
    if rows:
        keys = list(rows[0].keys())
        write_csv(out / "monitor.csv", keys,
                  [np.array([float(r[k]) for r in rows]) for k in keys])
    frames_dir = out / "frames"
    frames_dir.mkdir(exist_ok=True)
    y_grid = np.linspace(-cfg.frame.y_max, cfg.frame.y_max, cfg.frame.n_y)
    mods = mon["modulation"]
    for i, (sn, mod) in enumerate(zip(run.snapshots, mods)):
        try:
            fr = selfsimilar.to_selfsimilar(sn, mod, y_grid, warn_truncation=False)
        except selfsimilar.BlowupReachedError:
            break
        ubar = burgers.eval_profile(fr.y)
        write_csv(frames_dir / f"frame_{i:04d}.csv",
                  ["y", "U", "P", "Phi", "Ubar", "U_minus_Ubar"],
                  [fr.y, fr.U, fr.P, fr.Phi, ubar, fr.U - ubar])
    return mon


def fit_stage(cfg: ExperimentConfig, run: RunResult, out: Path) -> diagnostics.BlowupReport:
    if run.event is None:
        raise RuntimeError("no blow-up event; nothing to fit")
    t_star = run.event.t_star
    x_star = run.event.x_star
    ts_fit, fit_ux = diagnostics.estimate_tstar(run.series["t"], run.series["max_ux"])

    # Hoelder series from snapshot markers over the final resolved window.
    snaps = [sn for sn in run.snapshots if sn.t < t_star]
    taus = np.array([t_star - sn.t for sn in snaps])
    sel = taus <= 10.0 ** 1.5 * taus.min()
    chosen = [sn for sn, keep in zip(snaps, sel) if keep]
    temporal = {}
    seminorm_series: Dict[str, list] = {}
    series_t = [sn.t for sn in chosen]
    for beta in cfg.diag.betas:
        vals = [diagnostics.holder_seminorm(sn.particles["x"], sn.particles["u"], beta)
                for sn in chosen]
        seminorm_series[f"{beta}"] = vals
        try:
            temporal[beta] = diagnostics.fit_temporal_rate(
                series_t, vals, t_star, beta, drop_last=cfg.diag.drop_last)
        except diagnostics.InsufficientDataError as exc:
            temporal[beta] = diagnostics.FitResult(
                math.nan, math.nan, math.nan, (min(series_t), max(series_t)),
                status=str(exc))

    last = chosen[-1] if chosen else snaps[-1]
    p = last.particles
    rho_p = p["rho0"] / p["w"]
    r_outer = cfg.diag.r_outer
    if r_outer is None:
        r_inner = (cfg.diag.dominance * (t_star - last.t)) ** 1.5
        r_outer = r_inner * 10.0**1.25
    spatial, twopar = diagnostics.fit_spatial_profile(
        p["x"], rho_p, last.t, t_star, x_star,
        dominance=cfg.diag.dominance, r_outer=r_outer)
    report = diagnostics.BlowupReport(
        t_star=t_star, x_star=x_star, temporal_fits=temporal,
        spatial_fit=spatial, spatial_fit_twoparam=twopar, ux_inverse_fit=fit_ux,
        notes={"t_star_from_ux_fit": ts_fit,
               "t_star_from_w_fit": t_star,
               "t_star_gap": abs(ts_fit - t_star)},
    )
    payload = report.as_dict()
    # Underlying series, so rate plots need no recomputation downstream.
    payload["series"] = {"t": series_t, "seminorms": seminorm_series}
    write_json(out / "report.json", payload)
    return report


def run_experiment(cfg: ExperimentConfig) -> dict:
    """Execute the configured stages; returns the manifest dictionary."""
    cfg.validate_config()
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest: dict = {"config": cfg.as_dict(), "stages": {}, "artifacts": {}}

    def record(stage, status, error=None):
        manifest["stages"][stage] = {"status": status}
        if error is not None:
            manifest["stages"][stage]["error"] = str(error)

    data = None
    run = None
    a_val, sup_i = initdata.compute_A(1e-6)
    manifest["A"] = a_val
    manifest["sup_I"] = sup_i
    for stage in cfg.stages:
        try:
            if stage == "initdata":
                data = make_initial_data(cfg.init)
                write_init_table(data, (-cfg.grid.L, cfg.grid.L), min(cfg.grid.n, 4001),
                                 out / "init.csv")
            elif stage == "validate":
                rep = initdata.validate(data, data.eps, (-cfg.grid.L, cfg.grid.L),
                                        A_value=a_val, sup_I=sup_i)
                write_json(out / "admissibility.json", rep.as_dict())
            elif stage == "simulate":
                run = simulate_stage(cfg, data, out)
            elif stage == "selfsim":
                selfsim_stage(cfg, run, a_val, out)
            elif stage == "fit":
                fit_stage(cfg, run, out)
            elif stage == "verify":
                reports = verify.check_profile_inequalities()
                write_json(out / "ineq.json", {"reports": [r.as_dict() for r in reports]})
            else:
                raise ValueError(f"unknown stage {stage!r}")
            record(stage, "ok")
        except Exception as exc:  # noqa: BLE001 - stage errors land in the manifest
            record(stage, "error", exc)
            break

    for p in sorted(out.rglob("*")):
        if p.is_file() and p.name != "manifest.json":
            manifest["artifacts"][str(p.relative_to(out))] = sha256_file(p)
    write_json(out / "manifest.json", manifest)
    return manifest


def run_sweep(base: ExperimentConfig, eps_values: Sequence[float], workers: int = 1) -> List[dict]:
    """Independent experiments across eps values, optionally in parallel."""
    configs = []
    for eps in eps_values:
        cfg = dataclasses.replace(base)
        cfg.init = dataclasses.replace(base.init, eps=eps)
        cfg.out_dir = str(Path(base.out_dir) / f"eps_{eps:g}")
        configs.append(cfg)
    if workers <= 1:
        return [run_experiment(c) for c in configs]
    import concurrent.futures

    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_experiment, configs))
