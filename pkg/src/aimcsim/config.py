"""Strict INI-style configuration for the simulator and training recipes.

Keys mirror the standard parameter table's names where such names exist
(inp_res, out_res, out_noise, out_bound, w_noise, ir_drop,
ir_drop_g_ratio, max_input_size, ...). Parsing is strict: any unknown
section or key is an error, so a typo can never silently leave a
nonideality at its default.

Error taxonomy: :class:`ConfigKeyError` for unknown/conflicting keys
(CLI exit code 2), :class:`ConfigValueError` for unparsable values
(CLI exit code 3).
"""

from __future__ import annotations

import configparser
import hashlib
from dataclasses import dataclass, field
from pathlib import Path

from .pcm import ClippedLinearFit, DeviceFaultSpec, PcmModelParams
from .tile import TileConfig


class ConfigKeyError(Exception):
    """Unknown or conflicting configuration key."""


class ConfigValueError(Exception):
    """Configuration value failed to parse or validate."""


_BOOL = {"true": True, "yes": True, "1": True, "on": True,
         "false": False, "no": False, "0": False, "off": False}


def _parse_bool(raw: str, where: str) -> bool:
    try:
        return _BOOL[raw.strip().lower()]
    except KeyError:
        raise ConfigValueError(f"{where}: expected a boolean, got {raw!r}") from None


def _parse_float(raw: str, where: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ConfigValueError(f"{where}: expected a number, got {raw!r}") from None


def _parse_int(raw: str, where: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ConfigValueError(f"{where}: expected an integer, got {raw!r}") from None


def _parse_bits(raw: str, where: str) -> int | None:
    if raw.strip().lower() in ("none", "off"):
        return None
    return _parse_int(raw, where)


def _parse_floats(raw: str, where: str) -> tuple[float, ...]:
    return tuple(_parse_float(p, where) for p in raw.split(",") if p.strip())


def _parse_ints(raw: str, where: str) -> tuple[int, ...]:
    return tuple(_parse_int(p, where) for p in raw.split(",") if p.strip())


# section -> key -> (TileConfig/PcmModelParams field or tag, parser kind)
_TILE_KEYS = {
    "inp_res": ("dac_bits", "bits"),
    "out_res": ("adc_bits", "bits"),
    "out_bound": ("out_bound", "float"),
    "out_noise": ("out_noise", "float"),
    "w_noise": ("w_noise0", "float"),
    "ir_drop": ("ir_drop_scale", "float"),
    "ir_drop_g_ratio": ("ir_drop_g_ratio", "ratio"),
    "ir_gamma": ("ir_gamma", "float"),
    "s_shape_mu": ("s_shape_mu", "float"),
    "s_shape_sigma": ("s_shape_sigma", "float"),
    "polarity_sigma": ("polarity_sigma", "float"),
    "max_input_size": ("max_rows", "int"),
    "max_output_size": ("max_cols", "int"),
    "v_read": ("v_read", "float"),
    "dac_step_scale": ("dac_step_scale", "float"),
    "adc_step_scale": ("adc_step_scale", "float"),
}

_PCM_KEYS = {
    "g_max": ("g_max", "float"),
    "g_min": ("g_min", "float"),
    "t0": ("t0", "float"),
    "t_read": ("t_read", "float"),
    "prog_c0": ("prog_c0", "float"),
    "prog_c1": ("prog_c1", "float"),
    "prog_c2": ("prog_c2", "float"),
    "prog_noise_scale": ("prog_noise_scale", "float"),
    "read_noise_scale": ("read_noise_scale", "float"),
    "drift_scale": ("drift_scale", "float"),
    "read_c1": ("readnoise_c1", "float"),
    "read_c2": ("readnoise_c2", "float"),
    "read_c3": ("readnoise_c3", "float"),
    "mu_nu_fit": ("mu_nu_fit", "fit"),
    "sigma_nu_fit": ("sigma_nu_fit", "fit"),
}

_FAULT_KEYS = {
    "stuck_reset": ("frac_stuck_reset", "float"),
    "stuck_set": ("frac_stuck_set", "float"),
    "stuck_random": ("frac_stuck_random", "float"),
}

_RUN_KEYS = {
    "seed": "int", "repeats": "int", "n_inputs": "int", "threads": "int",
    "t_eval": "float", "drift_compensation": "bool",
}

_HWA_KEYS = {
    "dataset": "str", "dims": "ints",
    "fp_epochs": "int", "fp_lr": "float",
    "epochs": "int", "lr": "float", "momentum": "float", "batch_size": "int",
    "noise_ramp_epochs": "int", "prog_noise_scale_final": "float",
    "remap_every": "int", "input_range_decay": "float",
    "input_range_init_batches": "int", "input_range_cap": "float",
    "drop_connect": "float", "noise_refresh_per_batch": "int",
    "kappa_decay": "float",
    "learn_gamma_tilde": "bool", "learn_kappa": "bool",
    "learn_input_range": "bool", "dynamic_range_management": "bool",
    "distill": "bool", "distill_temperature": "float",
    "distill_mixture": "float",
    "eval_repeats": "int", "eval_times": "floats",
    "clip_sigmas_direct": "float",
}

_SECTIONS = {"tile": _TILE_KEYS, "pcm": _PCM_KEYS, "faults": _FAULT_KEYS,
             "run": _RUN_KEYS, "hwa": _HWA_KEYS}


@dataclass
class ConfigBundle:
    tile: TileConfig
    pcm: PcmModelParams
    faults: DeviceFaultSpec | None
    run: dict = field(default_factory=dict)
    hwa: dict = field(default_factory=dict)
    config_hash: str = ""
    source: str = "<defaults>"


def _parse_value(kind: str, raw: str, where: str):
    if kind == "float":
        return _parse_float(raw, where)
    if kind == "int":
        return _parse_int(raw, where)
    if kind == "bits":
        return _parse_bits(raw, where)
    if kind == "bool":
        return _parse_bool(raw, where)
    if kind == "str":
        return raw.strip()
    if kind == "floats":
        return _parse_floats(raw, where)
    if kind == "ints":
        return _parse_ints(raw, where)
    if kind == "fit":
        vals = _parse_floats(raw, where)
        if len(vals) != 4:
            raise ConfigValueError(
                f"{where}: a fit needs 4 numbers (slope, offset, min, max)")
        return ClippedLinearFit(*vals)
    if kind == "ratio":
        v = _parse_float(raw, where)
        if v <= 0.0:
            raise ConfigValueError(f"{where}: ratio must be > 0")
        return v
    raise AssertionError(kind)


def load_config(path) -> ConfigBundle:
    """Parse a config file into model objects; strict on keys and values."""
    path = Path(path)
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with path.open() as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigValueError(f"{path}: {exc}") from None

    tile_kwargs: dict = {}
    pcm_kwargs: dict = {}
    fault_kwargs: dict = {}
    run: dict = {}
    hwa: dict = {}
    hash_items: list[str] = []

    for section in parser.sections():
        if section not in _SECTIONS:
            raise ConfigKeyError(f"{path}: unknown section [{section}]")
        schema = _SECTIONS[section]
        for key, raw in parser.items(section):
            if key not in schema:
                raise ConfigKeyError(f"{path}: unknown key '{key}' in [{section}]")
            where = f"{path} [{section}] {key}"
            if section == "tile":
                dest, kind = schema[key]
                value = _parse_value(kind, raw, where)
                if dest == "ir_drop_g_ratio":
                    dest, value = "ir_gamma", 1.0 / value
                if dest in tile_kwargs:
                    raise ConfigKeyError(
                        f"{where}: conflicts with an earlier key setting the "
                        f"same parameter")
                tile_kwargs[dest] = value
            elif section == "pcm":
                dest, kind = schema[key]
                pcm_kwargs[dest] = _parse_value(kind, raw, where)
            elif section == "faults":
                dest, kind = schema[key]
                fault_kwargs[dest] = _parse_value(kind, raw, where)
            elif section == "run":
                run[key] = _parse_value(schema[key], raw, where)
            else:
                hwa[key] = _parse_value(schema[key], raw, where)
            if key != "threads":
                hash_items.append(f"{section}.{key}={raw.strip()}")

    try:
        tile = TileConfig(**tile_kwargs)
        pcm = PcmModelParams(**pcm_kwargs)
        faults = DeviceFaultSpec(**fault_kwargs) if fault_kwargs else None
    except ValueError as exc:
        raise ConfigValueError(f"{path}: {exc}") from None

    return ConfigBundle(
        tile=tile, pcm=pcm, faults=faults, run=run, hwa=hwa,
        config_hash=hash_of(hash_items), source=str(path),
    )


def default_bundle() -> ConfigBundle:
    return ConfigBundle(tile=TileConfig(), pcm=PcmModelParams(), faults=None,
                        config_hash=hash_of([]))


def hash_of(items: list[str]) -> str:
    digest = hashlib.sha256("\n".join(sorted(items)).encode()).hexdigest()
    return digest[:16]


def bundle_with_overrides(bundle: ConfigBundle, **run_overrides) -> ConfigBundle:
    """Fold CLI-level overrides into the run table and refresh the hash."""
    run = dict(bundle.run)
    run.update({k: v for k, v in run_overrides.items() if v is not None})
    items = [f"override.{k}={v}" for k, v in sorted(run.items())
             if k != "threads"]
    items.append(f"base={bundle.config_hash}")
    return ConfigBundle(
        tile=bundle.tile, pcm=bundle.pcm, faults=bundle.faults,
        run=run, hwa=dict(bundle.hwa),
        config_hash=hash_of(items), source=bundle.source,
    )
