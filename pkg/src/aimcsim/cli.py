"""Command-line front end.

Every subcommand resolves its parameters from (in order of precedence)
command-line flags, the ``--config`` file, and the built-in standard
defaults; expands the single ``--seed`` into named random streams; and
emits a deterministic CSV (RFC-4180 quoting, one ``# config_hash=...``
metadata comment, no timestamps) plus a plain-text summary.

Exit codes: 0 success, 2 configuration key errors, 3 numeric/value errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path

import numpy as np

from . import analysis, datasets, hwa, tensorio
from .config import (ConfigBundle, ConfigKeyError, ConfigValueError,
                     bundle_with_overrides, default_bundle, load_config)
from .mapping import map_weights, sample_gennorm, GenNormSpec
from .pcm import PcmModelParams
from .streams import stream
from .tile import TileConfig, ir_drop_approx, ir_drop_exact

YEAR_SECONDS = 365.25 * 86400.0
DESK_DIMS = {"spirals": (2, 576, 3), "digits64": (64, 576, 128, 10)}


# --- output helpers ---------------------------------------------------------

def _write_csv(out_path: str | None, header: list[str], rows: list[list],
               bundle: ConfigBundle, subcommand: str, seed: int) -> str:
    """Render the CSV; write it if a path was given; return the text."""
    buf = io.StringIO()
    buf.write(f"# config_hash={bundle.config_hash} subcommand={subcommand} "
              f"seed={seed}\r\n")
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    text = buf.getvalue()
    if out_path:
        Path(out_path).write_text(text, newline="")
    return text


def _fmt(v):
    if isinstance(v, float):      # incl. np.float64, whose repr differs
        return repr(float(v))
    return v


def _emit_summary(lines: list[str], out_path: str | None) -> None:
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if out_path:
        Path(out_path).with_suffix(".txt").write_text(text)


def _resolve(args, bundle: ConfigBundle) -> ConfigBundle:
    return bundle_with_overrides(
        bundle,
        seed=args.seed, repeats=args.repeats, threads=args.threads,
        t_eval=getattr(args, "t_eval", None),
        n_inputs=getattr(args, "n_inputs", None),
    )


def _run_value(bundle: ConfigBundle, key: str, default):
    return bundle.run.get(key, default)


def _models(bundle: ConfigBundle, disable_all: bool):
    if disable_all:
        return TileConfig.ideal(), PcmModelParams.ideal(), None
    return bundle.tile, bundle.pcm, bundle.faults


# --- subcommands ------------------------------------------------------------

def _cmd_mvm_error(args, bundle: ConfigBundle) -> int:
    bundle = _resolve(args, bundle)
    seed = _run_value(bundle, "seed", 0)
    t_eval = _run_value(bundle, "t_eval", analysis.STANDARD_T_EVAL)
    comp = _run_value(bundle, "drift_compensation", not args.no_drift_comp)
    if args.no_drift_comp or args.disable_all:
        comp = False
    cfg, par, faults = _models(bundle, args.disable_all)
    rep = analysis.standard_mvm_error(
        cfg, par, t_eval=t_eval, seed=seed,
        n_inputs=_run_value(bundle, "n_inputs", 100),
        n_realizations=_run_value(bundle, "repeats", 10),
        drift_compensation=comp, faults=faults,
        threads=_run_value(bundle, "threads", 1),
    )
    rows = [["epsilon_star", -1, t_eval, rep.epsilon, rep.sem, seed]]
    for i, e in enumerate(rep.per_realization):
        rows.append(["epsilon_realization", i, t_eval, float(e), 0.0, seed])
    _write_csv(args.out, ["metric", "realization", "t_eval_s", "epsilon",
                          "sem", "seed"], rows, bundle, "mvm-error", seed)
    _emit_summary([
        f"standard MVM error: epsilon* = {rep.epsilon:.6f} +- {rep.sem:.6f}",
        f"  t_eval = {t_eval} s, drift compensation = "
        f"{'on' if comp and t_eval > 0 else 'off'}",
        f"  {len(rep.per_realization)} realizations x "
        f"{rep.n_mvm // max(len(rep.per_realization), 1)} inputs, seed {seed}",
    ], args.out)
    return 0


def _cmd_fixed_point(args, bundle: ConfigBundle) -> int:
    bundle = _resolve(args, bundle)
    seed = _run_value(bundle, "seed", 0)
    bits_list = [int(b) for b in args.bits.split(",")]
    rows, lines = [], ["fixed-point reference baselines:"]
    for bits in bits_list:
        rep = analysis.fixed_point_baseline(
            bits, args.what, seed=seed,
            n_inputs=_run_value(bundle, "n_inputs", 100),
            n_realizations=_run_value(bundle, "repeats", 10),
        )
        rows.append([bits, args.what, rep.epsilon, rep.sem, seed])
        lines.append(f"  {bits:2d} bit ({args.what}): epsilon = "
                     f"{rep.epsilon:.6f} +- {rep.sem:.6f}")
    _write_csv(args.out, ["bits", "quantized", "epsilon", "sem", "seed"],
               rows, bundle, "fixed-point", seed)
    _emit_summary(lines, args.out)
    return 0


def _cmd_sensitivity(args, bundle: ConfigBundle) -> int:
    bundle = _resolve(args, bundle)
    seed = _run_value(bundle, "seed", 0)
    params = (list(analysis.SENSITIVITY_PARAMS) if args.param == "all"
              else [args.param])
    for p in params:
        if p not in analysis.SENSITIVITY_PARAMS:
            raise ConfigKeyError(
                f"unknown sensitivity parameter {p!r}; choose from "
                f"{', '.join(analysis.SENSITIVITY_PARAMS)}")
    rows, lines = [], [f"boost factors to epsilon* = {args.target}:"]
    for p in params:
        res = analysis.boost_to_target(
            p, args.target, seed=seed,
            tile_config=bundle.tile, pcm_params=bundle.pcm,
            faults=bundle.faults,
            n_realizations=_run_value(bundle, "repeats", 5),
            n_inputs=_run_value(bundle, "n_inputs", 100),
        )
        basis_t = analysis.SENSITIVITY_BASIS_T.get(
            p, analysis.SENSITIVITY_BASIS_DEFAULT_T)
        rows.append([p, res.boost_factor, res.achieved_epsilon,
                     res.converged, basis_t, seed])
        note = ""
        if p == "inp_res" and np.isfinite(res.boost_factor):
            eff = analysis.effective_bits(bundle.tile.dac_bits,
                                          res.boost_factor)
            note = f" (effective DAC {eff:.2f} bit)"
        if p == "out_res" and np.isfinite(res.boost_factor):
            eff = analysis.effective_bits(bundle.tile.adc_bits,
                                          res.boost_factor)
            note = f" (effective ADC {eff:.2f} bit)"
        state = "" if res.converged else "  [not converged]"
        lines.append(f"  {p:13s} x{res.boost_factor:10.3f} -> epsilon "
                     f"{res.achieved_epsilon:.4f}{note}{state}")
    _write_csv(args.out, ["parameter", "boost_factor", "achieved_epsilon",
                          "converged", "basis_t_eval_s", "seed"],
               rows, bundle, "sensitivity", seed)
    _emit_summary(lines, args.out)
    return 0


def _cmd_threshold(args, bundle: ConfigBundle) -> int:
    bundle = _resolve(args, bundle)
    seed = _run_value(bundle, "seed", 0)
    if args.param not in analysis.SENSITIVITY_PARAMS:
        raise ConfigKeyError(
            f"unknown sensitivity parameter {args.param!r}; choose from "
            f"{', '.join(analysis.SENSITIVITY_PARAMS)}")
    ds = datasets.make_dataset(args.dataset)
    dims = list(DESK_DIMS[args.dataset])
    fp = hwa.FpMlp(dims, stream(seed, "train-init"))
    fp.train_sgd(ds.x_train, ds.y_train, epochs=args.fp_epochs, lr=0.05,
                 batch_size=32, momentum=0.9,
                 rng=stream(seed, "data-shuffle", 1))
    n_repeats = _run_value(bundle, "repeats", 3)
    chance_acc = 1.0 / ds.n_classes

    def accuracy_at(scale: float) -> float:
        cfg, par, faults = analysis.boosted_models(
            args.param, scale, bundle.tile, bundle.pcm, bundle.faults)
        mapped = hwa.mapped_from_fp(fp, ds.x_train[:256], cfg)
        rows = hwa.evaluate_at_time(
            mapped, ds.x_test, ds.y_test, [args.t_eval], cfg, par,
            seed=seed, n_repeats=n_repeats, faults=faults)
        return 1.0 - rows[0]["err_mean"]

    baseline_acc = accuracy_at(1.0)
    grid = np.logspace(0.0, np.log10(args.max_scale), args.grid_points)
    res = analysis.threshold_scan(args.param, accuracy_at, baseline_acc,
                                  chance_acc=chance_acc, grid=grid,
                                  threshold=args.threshold)
    rows = [[args.param, float(k), float(a), seed]
            for k, a in res.details["scan"]]
    _write_csv(args.out, ["parameter", "scale", "normalized_accuracy", "seed"],
               rows, bundle, "threshold", seed)
    if res.x_star is not None:
        verdict = f"x* = {res.x_star:.3f}"
    else:
        verdict = (f"no {args.threshold:.0%} crossing up to scale "
                   f"{args.max_scale:g} (x* > {grid[-1]:.3f})")
    _emit_summary([
        f"threshold scan for {args.param} on {args.dataset} "
        f"(t = {args.t_eval} s): {verdict}",
        f"  unboosted accuracy {baseline_acc:.4f}, chance {chance_acc:.4f}",
    ], args.out)
    return 0


def _cmd_kurtosis(args, bundle: ConfigBundle) -> int:
    bundle = _resolve(args, bundle)
    seed = _run_value(bundle, "seed", 0)
    betas = [float(b) for b in args.betas.split(",")]
    out = analysis.kurtosis_drift_scan(
        betas, seed=seed,
        t_eval=_run_value(bundle, "t_eval", analysis.STANDARD_T_EVAL),
        n_realizations=_run_value(bundle, "repeats", 20),
        n_inputs=_run_value(bundle, "n_inputs", 100),
        tile_config=bundle.tile, pcm_params=bundle.pcm,
    )
    from scipy.special import gamma as _G
    rows, lines = [], ["MVM error by weight-distribution shape:"]
    for rec in out:
        b = rec["beta"]
        kurt = _G(5.0 / b) * _G(1.0 / b) / _G(3.0 / b) ** 2 - 3.0
        rows.append([b, kurt, rec["epsilon"], rec["sem"], seed])
        lines.append(f"  beta {b:4.1f} (excess kurtosis {kurt:8.3f}): "
                     f"epsilon = {rec['epsilon']:.4f} +- {rec['sem']:.4f}")
    _write_csv(args.out, ["beta", "excess_kurtosis", "epsilon", "sem", "seed"],
               rows, bundle, "kurtosis", seed)
    _emit_summary(lines, args.out)
    return 0


def _cmd_irdrop_check(args, bundle: ConfigBundle) -> int:
    bundle = _resolve(args, bundle)
    seed = _run_value(bundle, "seed", 0)
    n_inst = _run_value(bundle, "repeats", args.instances)
    gamma_wire = bundle.tile.ir_gamma
    n = args.rows
    rows = []
    ratios = []
    exact_meds = []
    for i in range(n_inst):
        w = stream(seed, "weight-gen", i).normal(0.0, 0.246, (args.cols, n))
        mapping = map_weights(w, max_rows=n, max_cols=args.cols)
        x = stream(seed, "input-gen", i).uniform(-1.0, 1.0, (1, n))
        d_exact = ir_drop_exact(mapping.w_norm, x, gamma_wire)
        d_approx = ir_drop_approx(mapping.w_norm, x, gamma_wire)
        med_e = float(np.median(np.abs(d_exact)))
        med_d = float(np.median(np.abs(d_approx - d_exact)))
        ratio = med_d / med_e if med_e > 0 else float("inf")
        ratios.append(ratio)
        exact_meds.append(med_e)
        rows.append([i, "random", med_e, med_d, ratio, seed])
    # Worst-case geometry: linear weight grade, full-scale constant input.
    w_graded = np.tile(np.linspace(-1.0, 1.0, n), (args.cols, 1))
    x_const = np.ones((1, n))
    d_exact = ir_drop_exact(w_graded, x_const, gamma_wire)
    d_approx = ir_drop_approx(w_graded, x_const, gamma_wire)
    graded_mag = float(np.median(np.abs(d_exact)))
    rows.append([n_inst, "graded", graded_mag,
                 float(np.median(np.abs(d_approx - d_exact))),
                 float(np.median(np.abs(d_approx - d_exact)) / graded_mag),
                 seed])
    _write_csv(args.out, ["instance", "kind", "median_abs_exact",
                          "median_abs_gap", "ratio", "seed"],
               rows, bundle, "irdrop-check", seed)
    med_ratio = float(np.median(ratios))
    blow_up = graded_mag / float(np.median(exact_meds))
    _emit_summary([
        f"IR-drop quadratic approximation vs exact solve "
        f"({n_inst} random {n}x{args.cols} instances):",
        f"  median relative deviation = {med_ratio:.4f}",
        f"  graded-weight/constant-input deviation magnitude = "
        f"{graded_mag:.4f} ({blow_up:.1f}x the random-case median)",
    ], args.out)
    return 0


def _desk_setup(args, bundle: ConfigBundle, seed: int):
    name = bundle.hwa.get("dataset", args.dataset)
    ds = datasets.load_dataset(args.data_dir, name) if args.data_dir else \
        datasets.make_dataset(name)
    dims = list(bundle.hwa.get("dims", DESK_DIMS[name]))
    fp = hwa.FpMlp(dims, stream(seed, "train-init"))
    fp.train_sgd(
        ds.x_train, ds.y_train,
        epochs=bundle.hwa.get("fp_epochs", args.fp_epochs),
        lr=bundle.hwa.get("fp_lr", 0.05), batch_size=32, momentum=0.9,
        rng=stream(seed, "data-shuffle", 1))
    return ds, dims, fp


def _eval_rows_to_csv(args, bundle, seed, tag, rows, extra_lines=()):
    csv_rows = [[tag, r["t_eval"], r["err_mean"], r["err_sem"],
                 r["n_repeats"], seed] for r in rows]
    _write_csv(args.out, ["model", "t_eval_s", "test_error", "sem",
                          "repeats", "seed"], csv_rows, bundle,
               args.subcommand, seed)
    lines = [f"{tag} test error over time:"]
    for r in rows:
        lines.append(f"  t = {r['t_eval']:12.0f} s: {r['err_mean']:.4f} "
                     f"+- {r['err_sem']:.4f}")
    lines.extend(extra_lines)
    _emit_summary(lines, args.out)


def _cmd_hwa_train(args, bundle: ConfigBundle) -> int:
    bundle = _resolve(args, bundle)
    seed = _run_value(bundle, "seed", 0)
    ds, dims, fp = _desk_setup(args, bundle, seed)
    h = bundle.hwa
    sched = hwa.HwaSchedule(
        noise_ramp_epochs=h.get("noise_ramp_epochs", 5),
        prog_noise_scale_final=h.get("prog_noise_scale_final", 3.0),
        remap_every=h.get("remap_every", 0),
        input_range_decay=h.get("input_range_decay", 1e-3),
        input_range_init_batches=h.get("input_range_init_batches", 20),
        input_range_cap=h.get("input_range_cap", 10.0),
        drop_connect=h.get("drop_connect", 0.0),
        noise_refresh_per_batch=h.get("noise_refresh_per_batch", 1),
        kappa_decay=h.get("kappa_decay", 1e-4),
        learn_gamma_tilde=h.get("learn_gamma_tilde", True),
        learn_kappa=h.get("learn_kappa", True),
        learn_input_range=h.get("learn_input_range", True),
        dynamic_range_management=h.get("dynamic_range_management", False),
    )
    net = hwa.AnalogMlp(dims, bundle.tile, bundle.pcm, sched)
    net.init_from_fp(fp)
    hwa.calibrate_input_ranges(net, ds.x_train, 32, sched)
    distill = None
    if h.get("distill", False):
        distill = hwa.DistillSpec(h.get("distill_temperature", 10.0),
                                  h.get("distill_mixture", 0.75))
    hwa.train_hwa(
        net, ds.x_train, ds.y_train,
        epochs=h.get("epochs", args.epochs), lr=h.get("lr", 0.01),
        batch_size=h.get("batch_size", 32), seed=seed,
        momentum=h.get("momentum", 0.9),
        x_val=ds.x_val, y_val=ds.y_val, distill=distill,
        teacher=fp if distill else None)
    mapped = hwa.mapped_from_trained(net)
    if args.checkpoint:
        _save_mapped(args.checkpoint, mapped, dims, ds.name, "hwa")
    t_evals = list(h.get("eval_times", (1.0, 3600.0)))
    rows = hwa.evaluate_at_time(
        mapped, ds.x_test, ds.y_test, t_evals, bundle.tile, bundle.pcm,
        seed=seed, n_repeats=h.get("eval_repeats", 8))
    fp_err = fp.error_rate(ds.x_test, ds.y_test)
    _eval_rows_to_csv(args, bundle, seed, "hwa", rows,
                      [f"FP reference test error: {fp_err:.4f}"])
    return 0


def _cmd_direct_map(args, bundle: ConfigBundle) -> int:
    bundle = _resolve(args, bundle)
    seed = _run_value(bundle, "seed", 0)
    ds, dims, fp = _desk_setup(args, bundle, seed)
    mapped = hwa.mapped_from_fp(
        fp, ds.x_train[:256], bundle.tile,
        clip_sigmas=bundle.hwa.get("clip_sigmas_direct", 2.5))
    if args.checkpoint:
        _save_mapped(args.checkpoint, mapped, dims, ds.name, "direct")
    t_evals = list(bundle.hwa.get("eval_times", (1.0, 3600.0)))
    rows = hwa.evaluate_at_time(
        mapped, ds.x_test, ds.y_test, t_evals, bundle.tile, bundle.pcm,
        seed=seed, n_repeats=bundle.hwa.get("eval_repeats", 8))
    fp_err = fp.error_rate(ds.x_test, ds.y_test)
    _eval_rows_to_csv(args, bundle, seed, "direct", rows,
                      [f"FP reference test error: {fp_err:.4f}"])
    return 0


def _cmd_evaluate(args, bundle: ConfigBundle) -> int:
    bundle = _resolve(args, bundle)
    seed = _run_value(bundle, "seed", 0)
    mapped, manifest = _load_mapped(args.checkpoint, bundle.tile)
    ds = datasets.load_dataset(args.data_dir, manifest["dataset"]) \
        if args.data_dir else datasets.make_dataset(manifest["dataset"])
    t_evals = [float(t) for t in args.times.split(",")]
    rows = hwa.evaluate_at_time(
        mapped, ds.x_test, ds.y_test, t_evals, bundle.tile, bundle.pcm,
        seed=seed, n_repeats=_run_value(bundle, "repeats", 8))
    _eval_rows_to_csv(args, bundle, seed, manifest.get("kind", "model"), rows)
    return 0


def _save_mapped(path, mapped: "hwa.MappedNetwork", dims, dataset: str,
                 kind: str) -> None:
    tensors = {}
    for i, m in enumerate(mapped.mappings):
        tensors[f"layer{i}/w_norm"] = m.w_norm
        tensors[f"layer{i}/gamma"] = m.gamma
        tensors[f"layer{i}/beta"] = mapped.betas[i]
    manifest = {
        "dims": list(dims), "dataset": dataset, "kind": kind,
        "alphas": [float(a) for a in mapped.alphas],
        "n_layers": len(mapped.mappings),
    }
    tensorio.save_checkpoint(path, tensors, manifest)


def _load_mapped(path, cfg: TileConfig):
    from .mapping import WeightMapping, even_slices
    tensors, manifest = tensorio.load_checkpoint(path)
    mappings, betas = [], []
    for i in range(manifest["n_layers"]):
        w = tensors[f"layer{i}/w_norm"]
        mappings.append(WeightMapping(
            w_norm=w, gamma=tensors[f"layer{i}/gamma"],
            alpha_hint=manifest["alphas"][i],
            row_slices=even_slices(w.shape[1], cfg.max_rows),
            col_slices=even_slices(w.shape[0], cfg.max_cols)))
        betas.append(tensors[f"layer{i}/beta"])
    return hwa.MappedNetwork(mappings, manifest["alphas"], betas), manifest


# --- argument parsing -------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aimcsim",
        description="Analog in-memory-computing crossbar simulator: MVM "
                    "error benchmarks, nonideality sensitivity, and "
                    "hardware-aware training on built-in tasks.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, t_eval=False, n_inputs=False):
        p.add_argument("--config", help="INI config file (strict keys)")
        p.add_argument("--seed", type=int, default=None,
                       help="global seed (default 0)")
        p.add_argument("--out", help="CSV output path (summary goes to .txt)")
        p.add_argument("--repeats", type=int, default=None,
                       help="realizations / repeats / instances")
        p.add_argument("--threads", type=int, default=None)
        if t_eval:
            p.add_argument("--t-eval", dest="t_eval", type=float, default=None,
                           help="evaluation time after programming, seconds")
        if n_inputs:
            p.add_argument("--n-inputs", dest="n_inputs", type=int,
                           default=None)

    p = sub.add_parser("mvm-error", help="standard-protocol MVM error")
    common(p, t_eval=True, n_inputs=True)
    p.add_argument("--no-drift-comp", action="store_true")
    p.add_argument("--disable-all", action="store_true",
                   help="all nonidealities off, quantizers bypassed")
    p.set_defaults(func=_cmd_mvm_error)

    p = sub.add_parser("fixed-point", help="digital quantized baselines")
    common(p, n_inputs=True)
    p.add_argument("--bits", default="2,3,4,5,6,8")
    p.add_argument("--what", default="weights",
                   choices=["weights", "inputs", "both"])
    p.set_defaults(func=_cmd_fixed_point)

    p = sub.add_parser("sensitivity",
                       help="boost one nonideality to a target error")
    common(p, n_inputs=True)
    p.add_argument("--param", required=True,
                   help="registered parameter name or 'all'")
    p.add_argument("--target", type=float, default=0.20)
    p.set_defaults(func=_cmd_sensitivity)

    p = sub.add_parser("threshold",
                       help="accuracy-threshold scan on a desk task")
    common(p)
    p.add_argument("--param", required=True)
    p.add_argument("--dataset", default="spirals",
                   choices=sorted(DESK_DIMS))
    p.add_argument("--fp-epochs", type=int, default=150)
    p.add_argument("--t-eval", dest="t_eval", type=float, default=3600.0)
    p.add_argument("--threshold", type=float, default=0.99)
    p.add_argument("--grid-points", type=int, default=13)
    p.add_argument("--max-scale", type=float, default=1e4)
    p.set_defaults(func=_cmd_threshold)

    p = sub.add_parser("kurtosis",
                       help="MVM error across weight-distribution shapes")
    common(p, t_eval=True, n_inputs=True)
    p.add_argument("--betas", default="0.5,1,2,4,8")
    p.set_defaults(func=_cmd_kurtosis)

    p = sub.add_parser("irdrop-check",
                       help="quadratic IR-drop model vs exact solve")
    common(p)
    p.add_argument("--instances", type=int, default=200)
    p.add_argument("--rows", type=int, default=512)
    p.add_argument("--cols", type=int, default=512)
    p.set_defaults(func=_cmd_irdrop_check)

    p = sub.add_parser("hwa-train",
                       help="hardware-aware training on a built-in task")
    common(p)
    p.add_argument("--dataset", default="spirals", choices=sorted(DESK_DIMS))
    p.add_argument("--fp-epochs", type=int, default=150)
    p.add_argument("--epochs", type=int, default=50)
    p.add_argument("--checkpoint", help="write trained network here")
    p.add_argument("--data-dir", help="directory of exported CSV datasets")
    p.set_defaults(func=_cmd_hwa_train)

    p = sub.add_parser("direct-map",
                       help="map the FP-trained network without retraining")
    common(p)
    p.add_argument("--dataset", default="spirals", choices=sorted(DESK_DIMS))
    p.add_argument("--fp-epochs", type=int, default=150)
    p.add_argument("--checkpoint", help="write mapped network here")
    p.add_argument("--data-dir", help="directory of exported CSV datasets")
    p.set_defaults(func=_cmd_direct_map)

    p = sub.add_parser("evaluate", help="evaluate a checkpoint over time")
    common(p)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--times", default=f"1,3600,86400,{YEAR_SECONDS}")
    p.add_argument("--data-dir", help="directory of exported CSV datasets")
    p.set_defaults(func=_cmd_evaluate)

    return parser


def run(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        bundle = load_config(args.config) if args.config else default_bundle()
        return args.func(args, bundle)
    except ConfigKeyError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ConfigValueError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
