#!/usr/bin/env python3
"""Standalone verification pass: profile inequalities and transport lemmas."""
import sys

from coldion import verify


def main():
    print("profile inequalities:")
    for r in verify.check_profile_inequalities():
        lam = f"  lambda = {r.lambda_found:.3f}" if r.lambda_found else ""
        print(f"  {r.name:32s} {'pass' if r.passed else 'FAIL'}"
              f"  margin {r.min_margin:+.3e}{lam}")
    print("nonlocal maximum principle (20 draws):")
    draws = verify.run_max_principle_draws()
    for d in draws["draws"][:5]:
        print(f"  sup|f| {d['sup_f']:.3f} <= 2 m0 = {d['bound']:.3f}"
              f"  (lambda_D {d['lambda_D']:.2f}, delta {d['delta']:.2f})")
    print(f"  ... all {len(draws['draws'])} draws: "
          f"{'pass' if draws['all_passed'] else 'FAIL'}")
    decay = verify.run_decay_check()
    print(f"far-field decay estimate: {'pass' if decay['passed'] else 'FAIL'}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
