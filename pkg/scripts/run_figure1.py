#!/usr/bin/env python3
"""Full figure-1 experiment: sech-dip velocity on a flat density.

Runs the whole pipeline (init, validate, simulate, selfsim, fit, verify)
at the production grid and prints the headline numbers.
"""
import json
import sys
from pathlib import Path

from coldion import experiment


def main(out_dir="run_figure1"):
    cfg = experiment.preset("figure1", out_dir=out_dir)
    manifest = experiment.run_experiment(cfg)
    print(json.dumps({k: v["status"] for k, v in manifest["stages"].items()}))
    report_path = Path(out_dir) / "report.json"
    if report_path.exists():
        rep = json.loads(report_path.read_text())
        print(f"t*           = {rep['t_star']:.6f}")
        print(f"x*           = {rep['x_star']:.6f}")
        print(f"spatial fit  = {rep['spatial_fit']['exponent']:.4f} (expect -2/3)")
        print(f"1/|u_x| r^2  = {rep['ux_inverse_fit']['r2']:.6f}")
        print(f"T* gap (w-fit vs u_x-fit) = {rep['notes']['t_star_gap']:.2e}")
    return 0


if __name__ == "__main__":
    sys.exit(main(*sys.argv[1:]))
