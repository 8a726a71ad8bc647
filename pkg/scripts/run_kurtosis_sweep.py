#!/usr/bin/env python3
"""MVM error vs weight-distribution tail weight under whole-matrix scaling.

Weights are drawn from generalized normal distributions whose shape
parameter beta sweeps from heavy-tailed (beta < 2, positive excess
kurtosis) to near-uniform (beta > 2, negative excess kurtosis). With one
global scale per matrix, heavy tails push most devices toward the
low-conductance floor where relative programming error is worst, so the
error grows with kurtosis; column-wise scaling largely removes the effect.
"""

import argparse

from scipy.special import gamma as G

from aimcsim import kurtosis_drift_scan


def analytic_excess_kurtosis(beta: float) -> float:
    return G(5.0 / beta) * G(1.0 / beta) / G(3.0 / beta) ** 2 - 3.0


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--betas", default="0.5,0.75,1,1.5,2,4,8")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--repeats", type=int, default=10)
    parser.add_argument("--t-eval", type=float, default=3600.0)
    parser.add_argument("--per-column", action="store_true",
                        help="column-wise scaling instead of whole-matrix")
    args = parser.parse_args()

    betas = [float(b) for b in args.betas.split(",")]
    for mode in ([False, True] if not args.per_column else [True]):
        label = "column-wise" if mode else "whole-matrix"
        print(f"--- {label} scaling ---")
        out = kurtosis_drift_scan(betas, seed=args.seed,
                                  t_eval=args.t_eval,
                                  n_realizations=args.repeats,
                                  per_column=mode)
        for rec in out:
            kurt = analytic_excess_kurtosis(rec["beta"])
            print(f"beta {rec['beta']:5.2f}  excess kurtosis {kurt:8.3f}  "
                  f"epsilon = {rec['epsilon']:.4f} +- {rec['sem']:.4f}")


if __name__ == "__main__":
    main()
