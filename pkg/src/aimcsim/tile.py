"""Crossbar tile model: converter quantization, parasitic wire-resistance
(IR) drop, ADC saturation nonlinearity, phase asymmetry, and the composed
noisy matrix-vector multiply.

Conventions. A tile computes ``y_i = sum_j w_ij x_j`` for outputs
``i < n_out`` (bitline columns) and inputs ``j < n_rows`` (word lines).
Normalized weights ``w`` carry sign and satisfy ``|w| <= 1``; the physical
device conductance is ``|w| * g_max``. Inputs after the DAC live in
``[-1, 1]``; analog outputs are in units where one fully-on row at weight
1 contributes 1. Row index 0 sits nearest the output periphery, and
partially filled tiles are occupied starting from that edge.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .pcm import (
    DeviceFaultSpec,
    PcmModelParams,
    ProgrammedState,
    conductances_at,
    program_devices,
)


@dataclass(frozen=True)
class TileConfig:
    """Peripheral and parasitic parameters of one crossbar tile.

    ``dac_bits`` / ``adc_bits`` of ``None`` bypass rounding (the bound clip
    still applies; use an infinite ``out_bound`` for a fully transparent
    ADC). ``ir_gamma`` is the ratio of unit wire resistance to device
    resistance at full conductance; 0 disables IR drop. The ``*_step_scale``
    factors widen the converter steps continuously for sensitivity studies.
    """

    dac_bits: int | None = 8
    adc_bits: int | None = 8
    out_bound: float = 10.0
    out_noise: float = 0.04
    w_noise0: float = 0.0175
    ir_drop_scale: float = 1.0
    ir_gamma: float = 1.75e-6
    s_shape_mu: float = 0.0
    s_shape_sigma: float = 0.0
    polarity_sigma: float = 0.0
    max_rows: int = 512
    max_cols: int = 512
    v_read: float = 0.2
    dac_step_scale: float = 1.0
    adc_step_scale: float = 1.0

    def __post_init__(self):
        for name in ("dac_bits", "adc_bits"):
            bits = getattr(self, name)
            if bits is not None and bits < 2:
                raise ValueError(f"{name} must be None or >= 2")
        if self.out_bound <= 0:
            raise ValueError("out_bound must be positive")
        if self.adc_bits is not None and not np.isfinite(self.out_bound):
            raise ValueError("quantizing ADC needs a finite out_bound")
        for name in ("out_noise", "w_noise0", "s_shape_sigma", "polarity_sigma"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if not np.isfinite(self.ir_gamma) or self.ir_gamma < 0:
            raise ValueError("ir_gamma must be finite and >= 0 (zero wire "
                             "conductance is out of the model's domain)")
        if self.max_rows < 1 or self.max_cols < 1:
            raise ValueError("tile dimensions must be >= 1")
        if self.v_read <= 0:
            raise ValueError("v_read must be positive")
        if self.dac_step_scale <= 0 or self.adc_step_scale <= 0:
            raise ValueError("step scales must be positive")

    @classmethod
    def ideal(cls, **overrides) -> "TileConfig":
        """Transparent periphery: no noise, no IR drop, no conversion."""
        kwargs = dict(
            dac_bits=None, adc_bits=None, out_bound=float("inf"),
            out_noise=0.0, w_noise0=0.0, ir_drop_scale=0.0,
            s_shape_mu=0.0, s_shape_sigma=0.0, polarity_sigma=0.0,
        )
        kwargs.update(overrides)
        return cls(**kwargs)


def clip(z, lo: float, hi: float):
    """Saturate ``z`` into ``[lo, hi]``."""
    if lo > hi:
        raise ValueError("clip needs lo <= hi")
    return np.clip(z, lo, hi)


def quantize(z, bound: float, bits: int | None, step_scale: float = 1.0):
    """Symmetric uniform quantizer with saturation.

    Step ``delta = step_scale * 2 * bound / (2**bits - 2)``, which places
    ``2**bits - 1`` levels symmetrically around zero with the extreme levels
    exactly at ``+-bound`` (for ``step_scale`` 1). Ties round away from zero
    on every platform. ``bits=None`` only applies the bound clip.
    """
    if bound <= 0:
        raise ValueError("quantizer bound must be positive")
    if bits is None:
        return clip(z, -bound, bound)
    if bits < 2:
        raise ValueError("quantizer needs bits >= 2")
    if not np.isfinite(bound):
        raise ValueError("quantizer needs a finite bound")
    z = np.asarray(z, dtype=float)
    delta = step_scale * 2.0 * bound / (2.0 ** bits - 2.0)
    q = np.sign(z) * np.floor(np.abs(z) / delta + 0.5) * delta
    return clip(q, -bound, bound)


def s_shape_adc(z, zeta):
    """Saturating ADC transfer curve with per-column severity ``zeta``.

    ``f(z) = (1 + 2*mean(|zeta|))**2 * z / (1 + |zeta_i * z|)``; the shared
    prefactor restores the average small-signal gain across the converters.
    With all-zero ``zeta`` this is the identity.
    """
    zeta = np.asarray(zeta, dtype=float)
    z = np.asarray(z, dtype=float)
    gain = (1.0 + 2.0 * np.mean(np.abs(zeta))) ** 2
    return gain * z / (1.0 + np.abs(zeta * z))


def ir_drop_exact(weights, x, ir_gamma: float):
    """Output deviation from wire resistance, by solving each bitline's
    node equations exactly.

    Every occupied row adds one node; the tridiagonal system couples
    neighbouring nodes through the wire conductance ``r = 1 / ir_gamma``
    (in device-full-scale units) and each device injects current against
    its row input. Returns ``y_actual - y_ideal`` per output, shaped like
    ``x @ weights.T``. A non-finite ``ir_gamma`` (zero wire conductance)
    is rejected; ``ir_gamma == 0`` means ideal wires and returns zeros.
    """
    weights = np.atleast_2d(np.asarray(weights, dtype=float))
    x = np.asarray(x, dtype=float)
    squeeze = x.ndim == 1
    xb = np.atleast_2d(x)
    n_out, n = weights.shape
    if xb.shape[-1] != n:
        raise ValueError("input length does not match weight rows")
    if not np.isfinite(ir_gamma) or ir_gamma < 0:
        raise ValueError("ir_gamma must be finite and >= 0")
    out = np.zeros((xb.shape[0], n_out))
    if ir_gamma == 0.0:
        return out[0] if squeeze else out
    r = 1.0 / ir_gamma
    ab = np.zeros((3, n))
    for i in range(n_out):
        w = weights[i]
        absw = np.abs(w)
        ab[0, 1:] = -r                      # superdiagonal
        ab[2, :-1] = -r                     # subdiagonal
        ab[1, :] = 2.0 * r + absw           # diagonal
        ab[1, -1] = r + absw[-1]            # open end at the top row
        for b in range(xb.shape[0]):
            u = solve_banded((1, 1), ab, w * xb[b])
            out[b, i] = -absw @ u
    return out[0] if squeeze else out


def ir_drop_approx(weights, x, ir_gamma: float):
    """Closed-form quadratic estimate of the IR-drop output deviation.

    The per-output load ``a_i = ir_gamma * n * sum_j |w_ij| |x_j|`` sets an
    attenuation ``c(a) = 0.05 a^3 - 0.2 a^2 + 0.5 a``, applied to the ideal
    products weighted by the quadratic voltage profile of the bitline
    (rows far from the periphery see the full deviation, near rows almost
    none). Shapes as in :func:`ir_drop_exact`.
    """
    weights = np.atleast_2d(np.asarray(weights, dtype=float))
    x = np.asarray(x, dtype=float)
    squeeze = x.ndim == 1
    xb = np.atleast_2d(x)
    n_out, n = weights.shape
    if xb.shape[-1] != n:
        raise ValueError("input length does not match weight rows")
    if not np.isfinite(ir_gamma) or ir_gamma < 0:
        raise ValueError("ir_gamma must be finite and >= 0")
    if ir_gamma == 0.0:
        out = np.zeros((xb.shape[0], n_out))
        return out[0] if squeeze else out
    absw = np.abs(weights)
    a = ir_gamma * n * (np.abs(xb) @ absw.T)
    c = 0.05 * a ** 3 - 0.2 * a ** 2 + 0.5 * a
    j = np.arange(1, n + 1)
    profile = 1.0 - (1.0 - j / n) ** 2
    dy = -c * ((xb * profile) @ weights.T)
    return dy[0] if squeeze else dy


@dataclass
class ProgrammedTile:
    """A tile whose devices have been programmed once.

    Long-term state (programming errors, faults, drift exponents, phase
    asymmetry factors, ADC shape draws) is frozen at programming time.
    ``realize_tile`` then fixes the effective weights for one evaluation
    time; MVMs only redraw the fast per-read noise.
    """

    config: TileConfig
    params: PcmModelParams
    signs: np.ndarray
    g_targets: np.ndarray
    state: ProgrammedState
    zeta: np.ndarray
    polarity: np.ndarray | None = None
    weights: np.ndarray | None = None
    t_eval: float | None = None
    drift_comp_ref: float | None = None
    drift_comp_factor: float = 1.0

    @property
    def n_out(self) -> int:
        return self.g_targets.shape[0]

    @property
    def n_rows(self) -> int:
        return self.g_targets.shape[1]


def program_tile(
    weights_signed,
    config: TileConfig,
    params: PcmModelParams,
    rng: np.random.Generator,
    faults: DeviceFaultSpec | None = None,
    drift_rng: np.random.Generator | None = None,
    fault_rng: np.random.Generator | None = None,
    polarity_rng: np.random.Generator | None = None,
    shape_rng: np.random.Generator | None = None,
) -> ProgrammedTile:
    """Program normalized signed weights (``|w| <= 1``) onto one tile."""
    w = np.atleast_2d(np.asarray(weights_signed, dtype=float))
    if np.any(np.abs(w) > 1.0 + 1e-12):
        raise ValueError("normalized weights must satisfy |w| <= 1")
    n_out, n_rows = w.shape
    if n_out > config.max_cols or n_rows > config.max_rows:
        raise ValueError(
            f"tile of {n_out}x{n_rows} exceeds limits "
            f"{config.max_cols}x{config.max_rows}"
        )
    signs = np.where(w < 0, -1.0, 1.0)
    g_targets = np.abs(w) * params.g_max
    state = program_devices(
        g_targets, params, rng, faults=faults,
        drift_rng=drift_rng, fault_rng=fault_rng,
    )
    if config.s_shape_mu != 0.0 or config.s_shape_sigma != 0.0:
        sr = shape_rng if shape_rng is not None else rng
        zeta = config.s_shape_mu * (
            1.0 + config.s_shape_sigma * sr.standard_normal(n_out)
        )
    else:
        zeta = np.zeros(n_out)
    polarity = None
    if config.polarity_sigma > 0.0:
        pr = polarity_rng if polarity_rng is not None else rng
        polarity = config.polarity_sigma * pr.standard_normal((n_out, n_rows))
    return ProgrammedTile(
        config=config, params=params, signs=signs, g_targets=g_targets,
        state=state, zeta=zeta, polarity=polarity,
    )


def realize_tile(
    tile: ProgrammedTile, t_eval: float, rng: np.random.Generator
) -> np.ndarray:
    """Fix the tile's effective weights for an evaluation at ``t_eval``:
    apply drift decay and one long-term read-noise draw to the programmed
    conductances. Returns the signed normalized weights."""
    g = conductances_at(tile.state, t_eval, tile.params, rng)
    tile.weights = tile.signs * g / tile.params.g_max
    tile.t_eval = t_eval
    return tile.weights


def _phase_terms(weights, x, config: TileConfig, rng: np.random.Generator):
    """Ideal products + IR drop + conductance-fluctuation noise for one
    polarity phase with effective weight matrix ``weights``."""
    z = x @ weights.T
    if config.ir_drop_scale != 0.0 and config.ir_gamma > 0.0:
        z = z + config.ir_drop_scale * ir_drop_approx(weights, x, config.ir_gamma)
    if config.w_noise0 > 0.0:
        var = (x ** 2) @ np.abs(weights).T
        z = z + config.w_noise0 * np.sqrt(var) * rng.standard_normal(z.shape)
    return z


def analog_mvm(
    tile: ProgrammedTile, x_analog, rng: np.random.Generator
) -> np.ndarray:
    """Noisy analog accumulation of one tile, before ADC quantization.

    ``x_analog`` holds DAC-domain inputs in ``[-1, 1]``, one vector per
    row. Per call, fresh draws are made for the conductance-fluctuation
    (read) noise and the additive output noise; long-term weight state is
    whatever :func:`realize_tile` fixed. With phase-asymmetry factors
    present the two input polarities are accumulated separately and the
    negative phase sees the perturbed weights.
    """
    if tile.weights is None:
        raise RuntimeError("tile must be realized at an evaluation time "
                           "before running MVMs")
    x = np.asarray(x_analog, dtype=float)
    squeeze = x.ndim == 1
    xb = np.atleast_2d(x)
    if xb.shape[-1] != tile.n_rows:
        raise ValueError("input length does not match tile rows")
    cfg = tile.config
    if tile.polarity is None:
        z = _phase_terms(tile.weights, xb, cfg, rng)
    else:
        w_neg = tile.weights * (1.0 + tile.polarity)
        z = _phase_terms(tile.weights, np.maximum(xb, 0.0), cfg, rng)
        z = z + _phase_terms(w_neg, np.minimum(xb, 0.0), cfg, rng)
    if np.any(tile.zeta):
        z = s_shape_adc(z, tile.zeta)
    if cfg.out_noise > 0.0:
        z = z + cfg.out_noise * rng.standard_normal(z.shape)
    return z[0] if squeeze else z


def tile_forward(
    tile: ProgrammedTile,
    x,
    alpha: float,
    gamma,
    beta,
    rng: np.random.Generator,
) -> np.ndarray:
    """Full digital-to-digital pass of one tile.

    ``out = beta + alpha * gamma_i * comp * Q_adc(analog(Q_dac(x / alpha)))``
    where ``comp`` is the tile's drift-compensation factor (1 until
    :func:`drift_comp_apply` sets it).
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    cfg = tile.config
    x_an = quantize(np.asarray(x, dtype=float) / alpha, 1.0, cfg.dac_bits,
                    cfg.dac_step_scale)
    y_an = analog_mvm(tile, x_an, rng)
    y_adc = quantize(y_an, cfg.out_bound, cfg.adc_bits, cfg.adc_step_scale)
    scale = alpha * np.asarray(gamma, dtype=float) * tile.drift_comp_factor
    return np.asarray(beta, dtype=float) + scale * y_adc


def make_drift_probes(
    n_rows: int, rng: np.random.Generator, n_probes: int = 10
) -> np.ndarray:
    """Default compensation probe set: uniform vectors in ``[-1, 1]``."""
    return rng.uniform(-1.0, 1.0, size=(n_probes, n_rows))


def _comp_measure(tile: ProgrammedTile, probes, rng: np.random.Generator) -> float:
    cfg = tile.config
    x_an = quantize(probes, 1.0, cfg.dac_bits, cfg.dac_step_scale)
    y = quantize(analog_mvm(tile, x_an, rng), cfg.out_bound, cfg.adc_bits,
                 cfg.adc_step_scale)
    return float(np.sum(np.abs(y)))


def drift_comp_calibrate(
    tile: ProgrammedTile, probes, rng: np.random.Generator
) -> float:
    """Record the reference output magnitude right after programming.

    Run with the tile realized at (or near) time 0; the summed absolute
    ADC outputs over the probe set become the compensation reference.
    """
    tile.drift_comp_ref = _comp_measure(tile, probes, rng)
    return tile.drift_comp_ref


def drift_comp_apply(
    tile: ProgrammedTile,
    probes,
    rng: np.random.Generator,
    cap: float = 10.0,
) -> float:
    """Set the tile's global drift-compensation factor at its current
    evaluation time: reference magnitude over current magnitude, measured
    with the same probes, capped at ``cap`` (a collapsed measurement of 0
    also yields ``cap``). Requires a prior calibration."""
    if tile.drift_comp_ref is None:
        raise RuntimeError("drift_comp_calibrate must run before apply")
    if cap <= 0:
        raise ValueError("cap must be positive")
    s_ref = tile.drift_comp_ref
    if s_ref == 0.0:
        tile.drift_comp_factor = 1.0
        return tile.drift_comp_factor
    s_now = _comp_measure(tile, probes, rng)
    factor = cap if s_now == 0.0 else min(s_ref / s_now, cap)
    tile.drift_comp_factor = factor
    return factor


def physical_output_current(y_analog, g_max_us: float, v_read: float):
    """Convert normalized analog outputs to amperes for a given full-scale
    device conductance (µS) and read voltage (V)."""
    return np.asarray(y_analog, dtype=float) * g_max_us * 1e-6 * v_read
