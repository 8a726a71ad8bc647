#!/usr/bin/env python3
"""Hardware-aware training vs direct mapping on the spirals task.

Trains a float-precision reference network, maps it directly onto the
analog tiles (clipped column-wise scaling, calibrated input ranges), then
retrains the same architecture with injected programming noise and learned
scales, and compares test error at several times after programming.
"""

import argparse
import time

import numpy as np

from aimcsim import (AnalogMlp, FpMlp, HwaSchedule, calibrate_input_ranges,
                     evaluate_at_time, make_dataset, mapped_from_fp,
                     mapped_from_trained, stream, train_hwa)
from aimcsim.pcm import PcmModelParams
from aimcsim.tile import TileConfig

DIMS = [2, 576, 3]
T_EVALS = [1.0, 3600.0, 86400.0, 365.25 * 86400.0]


def run_seed(seed: int, cfg, par, args):
    ds = make_dataset("spirals")
    fp = FpMlp(DIMS, stream(seed, "train-init"))
    fp.train_sgd(ds.x_train, ds.y_train, epochs=args.fp_epochs, lr=0.05,
                 batch_size=32, momentum=0.9,
                 rng=stream(seed, "data-shuffle", 1))
    fp_err = fp.error_rate(ds.x_test, ds.y_test)

    direct = mapped_from_fp(fp, ds.x_train[:256], cfg)
    direct_rows = evaluate_at_time(direct, ds.x_test, ds.y_test, T_EVALS,
                                   cfg, par, seed=seed, n_repeats=args.repeats)

    sched = HwaSchedule(noise_ramp_epochs=5, prog_noise_scale_final=3.0)
    net = AnalogMlp(DIMS, cfg, par, sched)
    net.init_from_fp(fp)
    calibrate_input_ranges(net, ds.x_train, 32, sched)
    train_hwa(net, ds.x_train, ds.y_train, epochs=args.epochs, lr=0.01,
              batch_size=32, seed=seed, x_val=ds.x_val, y_val=ds.y_val)
    hwa_rows = evaluate_at_time(mapped_from_trained(net), ds.x_test,
                                ds.y_test, T_EVALS, cfg, par, seed=seed,
                                n_repeats=args.repeats)
    return fp_err, direct_rows, hwa_rows


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seeds", default="0,1,2")
    parser.add_argument("--fp-epochs", type=int, default=150)
    parser.add_argument("--epochs", type=int, default=50)
    parser.add_argument("--repeats", type=int, default=8)
    args = parser.parse_args()

    cfg, par = TileConfig(), PcmModelParams()
    seeds = [int(s) for s in args.seeds.split(",")]
    fp_errs, direct_all, hwa_all = [], [], []
    for seed in seeds:
        t0 = time.time()
        fp_err, d_rows, h_rows = run_seed(seed, cfg, par, args)
        fp_errs.append(fp_err)
        direct_all.append([r["err_mean"] for r in d_rows])
        hwa_all.append([r["err_mean"] for r in h_rows])
        print(f"seed {seed}: FP {fp_err:.4f}, "
              f"direct@1h {d_rows[1]['err_mean']:.4f}, "
              f"HWA@1h {h_rows[1]['err_mean']:.4f} "
              f"({time.time() - t0:.1f} s)")

    direct_m = np.mean(direct_all, axis=0)
    hwa_m = np.mean(hwa_all, axis=0)
    print(f"\nmean over {len(seeds)} seeds (FP reference "
          f"{np.mean(fp_errs):.4f}):")
    print(f"{'t_eval':>12s} {'direct':>8s} {'HWA':>8s}")
    for t, d, h in zip(T_EVALS, direct_m, hwa_m):
        print(f"{t:12.0f} {d:8.4f} {h:8.4f}")


if __name__ == "__main__":
    main()
