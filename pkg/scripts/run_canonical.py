#!/usr/bin/env python3
"""Canonical rescaled-profile experiment with the bootstrap monitor.

The initial velocity realizes the self-similar ansatz exactly, so the
frame quantities start on the Burgers profile; the monitor tracks the
weighted suprema V1..V7, the y = 0 constraints, and the modulation decay.
"""
import json
import sys
from pathlib import Path

import numpy as np

from coldion import experiment


def main(eps="0.05", out_dir="run_canonical"):
    cfg = experiment.preset("canonical", eps=float(eps), out_dir=out_dir)
    manifest = experiment.run_experiment(cfg)
    print(json.dumps({k: v["status"] for k, v in manifest["stages"].items()}))
    mon_path = Path(out_dir) / "monitor.csv"
    if mon_path.exists():
        mon = experiment.read_csv(mon_path)
        res = mon["resolved"] > 0.5
        print(f"resolved s range: [{mon['s'][res].min():.3f}, {mon['s'][res].max():.3f}]")
        for i in (1, 2, 3, 7):
            v = mon[f"V{i}"][res]
            k = mon[f"K{i}"][res][0]
            flag = "ok" if v.max() < k else "EXCEEDS"
            print(f"V{i}: max {v.max():.4f} vs K{i} = {k:.4f}  [{flag}]")
        worst = max(mon["res_U0"][res].max(), mon["res_Uy0_plus_1"][res].max(),
                    mon["res_Uyy0"][res].max())
        print(f"constraint residuals <= {worst:.2e}")
        print(f"tau: final {mon['tau'][res][-1]:.3e} (eps^2 = {float(eps)**2:.1e})")
    return 0


if __name__ == "__main__":
    sys.exit(main(*sys.argv[1:]))
