import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from coldion import experiment
from coldion.cli import main
from coldion.experiment import read_csv


def run_cli(args, cwd):
    return main([str(a) for a in args])


class TestProfileCommand:
    def test_writes_table(self, tmp_path):
        out = tmp_path / "profile.csv"
        assert run_cli(["profile", "--ymin", -5, "--ymax", 5, "--n", 101,
                        "--out", out], tmp_path) == 0
        cols = read_csv(out)
        assert set(cols) == {"y", "Ubar", "d1", "d2", "d3", "d4"}
        mid = 50
        assert cols["Ubar"][mid] == pytest.approx(0.0, abs=1e-12)
        assert cols["d1"][mid] == pytest.approx(-1.0, abs=1e-12)


class TestPoissonCommand:
    def test_newton_and_greens(self, tmp_path):
        x = np.linspace(-20, 20, 2001)
        rho = 1.0 + 0.1 * np.exp(-(x**2))
        rho_file = tmp_path / "rho.csv"
        experiment.write_csv(rho_file, ["x", "rho"], [x, rho])
        out_n = tmp_path / "newton.csv"
        out_g = tmp_path / "greens.csv"
        assert run_cli(["poisson", "--rho-file", rho_file, "--solver", "newton",
                        "--tol", 1e-12, "--out", out_n], tmp_path) == 0
        assert run_cli(["poisson", "--rho-file", rho_file, "--solver", "greens",
                        "--tol", 1e-12, "--out", out_g], tmp_path) == 0
        a = read_csv(out_n)
        b = read_csv(out_g)
        assert np.max(np.abs(a["phi"] - b["phi"])) < 1e-8


class TestInitdataCommand:
    def test_compute_A(self, capsys, tmp_path):
        assert run_cli(["initdata", "compute-A", "--tol", 1e-4], tmp_path) == 0
        out = json.loads(capsys.readouterr().out)
        assert 0.01 < out["A"] < 0.03
        assert 6.0 < out["sup_I"] < 7.5

    def test_table_with_validation(self, tmp_path, capsys):
        out = tmp_path / "init.csv"
        assert run_cli(["initdata", "--kind", "canonical", "--eps", 0.05,
                        "--validate", "--L", 10, "--n", 801, "--out", out],
                       tmp_path) == 0
        cols = read_csv(out)
        assert "d4u0" in cols
        rep = json.loads((tmp_path / "init.admissibility.json").read_text())
        assert rep["conditions"]["center_normalization"]["passed"]


class TestPeCommand:
    def test_exact_solution(self, tmp_path, capsys):
        out = tmp_path / "pe.csv"
        assert run_cli(["pe", "exact", "--v0", "preset:gauss", "--t", 0.9,
                        "--n", 1001, "--out", out], tmp_path) == 0
        assert "lifespan = 1" in capsys.readouterr().out
        cols = read_csv(out)
        # Center characteristic density: 1/(1 - 0.9) = 10.
        i0 = np.argmin(np.abs(cols["alpha"]))
        assert cols["n"][i0] == pytest.approx(10.0, rel=1e-9)


class TestPipeline:
    @pytest.fixture(scope="class")
    @staticmethod
    def tiny_run(tmp_path_factory):
        # Tiny figure-1-style run exercising the whole stage chain.
        root = tmp_path_factory.mktemp("exp")
        cfg = experiment.ExperimentConfig(
            init=experiment.InitSpec(kind="figure1"),
            grid=experiment.GridSpec(L=12.0, n=1201),
            solver=experiment.SolverSpec(dt_max=2e-3, w_stop=2e-3,
                                         snap_every=0.02, particle_mult=2,
                                         particle_window=6.0),
            diag=experiment.DiagSpec(betas=(1.0 / 3.0, 0.5)),
            out_dir=str(root / "run"),
        )
        manifest = experiment.run_experiment(cfg)
        return root / "run", manifest

    def test_all_stages_ok(self, tiny_run):
        _, manifest = tiny_run
        assert all(v["status"] == "ok" for v in manifest["stages"].values()), manifest["stages"]

    def test_manifest_lists_every_artifact(self, tiny_run):
        run_dir, manifest = tiny_run
        files = {str(p.relative_to(run_dir)) for p in run_dir.rglob("*")
                 if p.is_file() and p.name != "manifest.json"}
        assert files == set(manifest["artifacts"])

    def test_report_contents(self, tiny_run):
        run_dir, _ = tiny_run
        rep = json.loads((run_dir / "report.json").read_text())
        # Figure-1 runs start at t0 = -1/2; elapsed lifespan is near 0.52.
        assert -0.1 < rep["t_star"] < 0.3
        # Structural check only at this coarse tiny-run scale; the
        # acceptance suite measures the slope at production resolution.
        assert -1.1 < rep["spatial_fit"]["exponent"] < -0.4
        assert rep["ux_inverse_fit"]["r2"] > 0.99
        assert rep["temporal_fits"]["0.3333333333333333"]["status"] == "bounded seminorm"

    def test_selfsim_and_fit_from_disk(self, tiny_run, tmp_path):
        run_dir, _ = tiny_run
        assert run_cli(["selfsim", "--run", run_dir, "--ymax", 20, "--ny", 401,
                        "--A", 0.0166, "--out", tmp_path / "frames"], tmp_path) == 0
        assert (tmp_path / "frames" / "monitor.csv").exists()
        assert run_cli(["fit", "--run", run_dir, "--betas", "0.5",
                        "--out", tmp_path / "report.json"], tmp_path) == 0
        rep = json.loads((tmp_path / "report.json").read_text())
        assert "0.5" in rep["temporal_fits"]

    def test_validation_error_names_field(self):
        cfg = experiment.ExperimentConfig(
            init=experiment.InitSpec(kind="canonical", eps=-0.1))
        with pytest.raises(ValueError, match="init.eps"):
            experiment.run_experiment(cfg)

    def test_determinism_byte_identical(self, tmp_path):
        outs = []
        for sub in ("a", "b"):
            cfg = experiment.ExperimentConfig(
                init=experiment.InitSpec(kind="figure1"),
                grid=experiment.GridSpec(L=10.0, n=401),
                solver=experiment.SolverSpec(dt_max=5e-3, w_stop=5e-2,
                                             snap_every=0.05),
                stages=("initdata", "simulate"),
                out_dir=str(tmp_path / sub),
            )
            experiment.run_experiment(cfg)
            outs.append(tmp_path / sub)
        for rel in ("series.csv", "snapshots/snap_0000.csv", "event.json"):
            assert (outs[0] / rel).read_bytes() == (outs[1] / rel).read_bytes()


class TestConfigFile:
    def test_run_from_config_file(self, tmp_path):
        cfg_text = "\n".join([
            "[init]", "kind = figure1",
            "[grid]", "L = 10.0", "n = 401",
            "[solver]", "dt_max = 5e-3", "w_stop = 5e-2", "snap_every = 0.05",
            "[output]", f"out_dir = {tmp_path / 'out'}",
            "stages = initdata, simulate",
        ])
        cfg_path = tmp_path / "exp.cfg"
        cfg_path.write_text(cfg_text)
        assert run_cli(["run", "--config", cfg_path], tmp_path) == 0
        assert (tmp_path / "out" / "series.csv").exists()

    def test_unknown_key_rejected(self, tmp_path):
        cfg_path = tmp_path / "bad.cfg"
        cfg_path.write_text("[grid]\nwavelength = 3\n")
        with pytest.raises(ValueError, match="wavelength"):
            experiment.config_from_file(str(cfg_path))

    def test_missing_file_rejected(self):
        with pytest.raises(ValueError, match="not found"):
            experiment.config_from_file("/nonexistent/exp.cfg")


class TestSweep:
    def test_sweep_over_eps(self, tmp_path):
        base = experiment.ExperimentConfig(
            init=experiment.InitSpec(kind="canonical", eps=0.1),
            grid=experiment.GridSpec(L=2.0, n=2001),
            solver=experiment.SolverSpec(dt_max=1e-3, w_stop=5e-2, snap_every=0.01,
                                         particle_pad=0.2, particle_mult=2,
                                         particle_window=1.0, t_max=0.5),
            stages=("initdata", "simulate"),
            out_dir=str(tmp_path / "sweep"),
        )
        manifests = experiment.run_sweep(base, [0.1, 0.12], workers=1)
        assert len(manifests) == 2
        for m, eps in zip(manifests, (0.1, 0.12)):
            assert m["config"]["init"]["eps"] == eps
            assert all(v["status"] == "ok" for v in m["stages"].values())
        assert (tmp_path / "sweep" / "eps_0.1" / "series.csv").exists()


class TestProductionPreset:
    def test_run_preset_figure1_manifest(self, tmp_path):
        # Full production pipeline through every stage; the manifest must
        # list each artifact and the report must carry the spatial law.
        cfg = experiment.preset("figure1", out_dir=str(tmp_path / "fig1"))
        manifest = experiment.run_experiment(cfg)
        assert all(v["status"] == "ok" for v in manifest["stages"].values()), manifest["stages"]
        rep = json.loads((tmp_path / "fig1" / "report.json").read_text())
        assert rep["spatial_fit"]["exponent"] == pytest.approx(-2.0 / 3.0, abs=0.1)
        assert rep["ux_inverse_fit"]["r2"] > 0.99
        files = {str(p.relative_to(tmp_path / "fig1"))
                 for p in (tmp_path / "fig1").rglob("*")
                 if p.is_file() and p.name != "manifest.json"}
        assert files == set(manifest["artifacts"])
        mon = experiment.read_csv(tmp_path / "fig1" / "monitor.csv")
        assert mon["s"].size > 10
        ineq = json.loads((tmp_path / "fig1" / "ineq.json").read_text())
        assert all(r["passed"] for r in ineq["reports"])


class TestRoundTrip:
    def test_save_load_run(self, tmp_path):
        cfg = experiment.ExperimentConfig(
            init=experiment.InitSpec(kind="figure1"),
            grid=experiment.GridSpec(L=10.0, n=401),
            solver=experiment.SolverSpec(dt_max=5e-3, w_stop=5e-2, snap_every=0.05),
            stages=("initdata", "simulate"),
            out_dir=str(tmp_path / "run"),
        )
        experiment.run_experiment(cfg)
        run = experiment.load_run(tmp_path / "run")
        assert run.event is not None
        assert len(run.snapshots) >= 2
        assert run.snapshots[0].particles["alpha"].size > 100
