"""Analog in-memory-computing crossbar simulator.

Models matrix-vector multiplication on phase-change-memory crossbar tiles
(programming noise, conductance drift, read noise, IR drop, converter
quantization, dynamic-range clipping), the surrounding digital periphery
(scales, drift compensation), standardized error benchmarks, nonideality
sensitivity analysis, and hardware-aware network training.
"""

from .pcm import (ClippedLinearFit, DeviceFaultSpec, PcmModelParams,
                  ProgrammedState, drift_conductance, program_conductances,
                  program_devices, programming_noise_std, read_noise_std,
                  realize_conductances, sample_drift_coefficients)
from .tile import (ProgrammedTile, TileConfig, analog_mvm, clip,
                   drift_comp_apply, drift_comp_calibrate, ir_drop_approx,
                   ir_drop_exact, make_drift_probes, program_tile, quantize,
                   realize_tile, s_shape_adc, tile_forward)
from .mapping import (AnalogLayer, GenNormSpec, WeightMapping,
                      apply_layer_comp, calibrate_layer, even_slices,
                      excess_kurtosis, ideal_layer_output, layer_forward,
                      map_weights, program_layer, realize_layer,
                      remap_weights, renormalize_columns, sample_gennorm)
from .analysis import (MvmErrorReport, SensitivityResult, SENSITIVITY_PARAMS,
                       boost_to_target, boosted_models, effective_bits,
                       fixed_point_baseline, kurtosis_drift_scan, mvm_error,
                       normalized_accuracy, standard_mvm_error,
                       threshold_scan)
from .hwa import (AnalogMlp, DistillSpec, FpMlp, HwaSchedule, MappedNetwork,
                  TrainableAnalogLayer, calibrate_input_ranges, distill_loss,
                  evaluate_at_time, hwa_backward, hwa_forward,
                  init_input_range, mapped_from_fp, mapped_from_trained,
                  softmax_cross_entropy, train_hwa)
from .datasets import (Dataset, export_dataset, load_dataset, make_dataset,
                       make_digits, make_spirals)
from .streams import STREAM_IDS, RngPool, stream
from .config import (ConfigBundle, ConfigKeyError, ConfigValueError,
                     default_bundle, load_config)

__version__ = "0.1.0"

__all__ = [
    "ClippedLinearFit", "DeviceFaultSpec", "PcmModelParams",
    "ProgrammedState", "drift_conductance", "program_conductances",
    "program_devices", "programming_noise_std", "read_noise_std",
    "realize_conductances", "sample_drift_coefficients",
    "ProgrammedTile", "TileConfig", "analog_mvm", "clip",
    "drift_comp_apply", "drift_comp_calibrate", "ir_drop_approx",
    "ir_drop_exact", "make_drift_probes", "program_tile", "quantize",
    "realize_tile", "s_shape_adc", "tile_forward",
    "AnalogLayer", "GenNormSpec", "WeightMapping", "apply_layer_comp",
    "calibrate_layer", "even_slices", "excess_kurtosis",
    "ideal_layer_output", "layer_forward", "map_weights", "program_layer",
    "realize_layer", "remap_weights", "renormalize_columns",
    "sample_gennorm",
    "MvmErrorReport", "SensitivityResult", "SENSITIVITY_PARAMS",
    "boost_to_target", "boosted_models", "effective_bits",
    "fixed_point_baseline", "kurtosis_drift_scan", "mvm_error",
    "normalized_accuracy", "standard_mvm_error", "threshold_scan",
    "AnalogMlp", "DistillSpec", "FpMlp", "HwaSchedule", "MappedNetwork",
    "TrainableAnalogLayer", "calibrate_input_ranges", "distill_loss",
    "evaluate_at_time", "hwa_backward", "hwa_forward", "init_input_range",
    "mapped_from_fp", "mapped_from_trained", "softmax_cross_entropy",
    "train_hwa",
    "Dataset", "export_dataset", "load_dataset", "make_dataset",
    "make_digits", "make_spirals",
    "STREAM_IDS", "RngPool", "stream",
    "ConfigBundle", "ConfigKeyError", "ConfigValueError", "default_bundle",
    "load_config",
    "__version__",
]
