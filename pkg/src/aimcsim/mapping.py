"""Mapping logical weight matrices onto crossbar tiles.

A logical matrix ``W`` (outputs x inputs) is scaled column-wise: each
output ``i`` gets a digital factor ``gamma_i = max_j |W_ij|`` so that the
normalized weights fill the available conductance range, then the input
dimension is split into roughly equal chunks of at most ``max_rows`` rows
(and the output dimension likewise into chunks of at most ``max_cols``).
The logical operation is ``y_i = gamma_i * sum_j w_ij x_j`` summed over
row chunks at full precision.

Also home to the generalized-normal sampler and the excess-kurtosis
statistic used to study how weight-distribution shape interacts with the
mapping.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pcm import DeviceFaultSpec, PcmModelParams
from .tile import (
    ProgrammedTile,
    TileConfig,
    make_drift_probes,
    drift_comp_apply,
    drift_comp_calibrate,
    program_tile,
    realize_tile,
    tile_forward,
)


def even_slices(n: int, max_size: int) -> list[slice]:
    """Split ``range(n)`` into ``ceil(n / max_size)`` roughly equal slices
    (sizes differ by at most one)."""
    if n < 1:
        raise ValueError("dimension must be >= 1")
    parts = -(-n // max_size)
    bounds = [round(k * n / parts) for k in range(parts + 1)]
    return [slice(bounds[k], bounds[k + 1]) for k in range(parts)]


@dataclass
class WeightMapping:
    """Normalized weights plus the digital scales that undo the mapping."""

    w_norm: np.ndarray
    gamma: np.ndarray
    alpha_hint: float
    row_slices: list[slice]
    col_slices: list[slice]

    @property
    def n_out(self) -> int:
        return self.w_norm.shape[0]

    @property
    def n_in(self) -> int:
        return self.w_norm.shape[1]


def map_weights(
    weights,
    max_rows: int = 512,
    max_cols: int = 512,
    per_column: bool = True,
    clip_sigmas: float | None = None,
) -> WeightMapping:
    """Scale a logical matrix into normalized tile weights.

    ``per_column=False`` uses one global scale (the matrix max-abs) for
    every output instead; long-tailed weight distributions then squeeze
    most devices into the low-conductance regime. ``clip_sigmas`` clips
    the matrix at that many standard deviations before mapping, which is
    only sensible for direct (training-free) conversion of a pretrained
    matrix. Columns that are entirely zero keep ``gamma = 1``.
    """
    w = np.atleast_2d(np.asarray(weights, dtype=float))
    if clip_sigmas is not None:
        if clip_sigmas <= 0:
            raise ValueError("clip_sigmas must be positive")
        bound = clip_sigmas * float(np.std(w))
        if bound > 0:
            w = np.clip(w, -bound, bound)
    if per_column:
        gamma = np.max(np.abs(w), axis=1)
        gamma = np.where(gamma > 0, gamma, 1.0)
    else:
        g = float(np.max(np.abs(w)))
        gamma = np.full(w.shape[0], g if g > 0 else 1.0)
    w_norm = w / gamma[:, None]
    return WeightMapping(
        w_norm=w_norm,
        gamma=gamma,
        alpha_hint=1.0,
        row_slices=even_slices(w.shape[1], max_rows),
        col_slices=even_slices(w.shape[0], max_cols),
    )


def renormalize_columns(w_norm, gamma):
    """Rescale each output column of ``w_norm`` back to max-abs 1, folding
    the change into ``gamma`` so the logical products ``gamma_i * w_ij``
    are preserved (to float round-off). Zero columns are left alone."""
    w = np.asarray(w_norm, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    m = np.max(np.abs(w), axis=1)
    m = np.where(m > 0, m, 1.0)
    return w / m[:, None], gamma * m


def remap_weights(mapping: WeightMapping) -> WeightMapping:
    """Return a mapping with every column renormalized to max-abs 1."""
    w2, g2 = renormalize_columns(mapping.w_norm, mapping.gamma)
    return WeightMapping(
        w_norm=w2, gamma=g2, alpha_hint=mapping.alpha_hint,
        row_slices=list(mapping.row_slices), col_slices=list(mapping.col_slices),
    )


@dataclass
class AnalogLayer:
    """A programmed logical layer: a grid of tiles plus digital periphery.

    ``tiles[ci][ri]`` covers output chunk ``ci`` and input chunk ``ri``.
    Row chunks are summed at full precision after per-tile scaling; the
    bias is digital and added once.
    """

    config: TileConfig
    params: PcmModelParams
    tiles: list[list[ProgrammedTile]]
    row_slices: list[slice]
    col_slices: list[slice]
    gamma: np.ndarray
    alpha: float
    beta: np.ndarray
    comp_probes: list[np.ndarray] | None = None
    # Optional record of the trained decomposition gamma = gamma_tilde*kappa*c_aws.
    gamma_tilde: np.ndarray | None = None
    kappa: float | None = None
    c_aws: float | None = None

    @property
    def n_out(self) -> int:
        return self.gamma.shape[0]


def program_layer(
    mapping: WeightMapping,
    config: TileConfig,
    params: PcmModelParams,
    rng: np.random.Generator,
    alpha: float = 1.0,
    beta=None,
    faults: DeviceFaultSpec | None = None,
    drift_rng: np.random.Generator | None = None,
    fault_rng: np.random.Generator | None = None,
    polarity_rng: np.random.Generator | None = None,
    shape_rng: np.random.Generator | None = None,
) -> AnalogLayer:
    """Program every tile of a mapped layer (fresh device draws)."""
    if beta is None:
        beta = np.zeros(mapping.n_out)
    tiles = []
    for cs in mapping.col_slices:
        row = []
        for rs in mapping.row_slices:
            row.append(program_tile(
                mapping.w_norm[cs, rs], config, params, rng, faults=faults,
                drift_rng=drift_rng, fault_rng=fault_rng,
                polarity_rng=polarity_rng, shape_rng=shape_rng,
            ))
        tiles.append(row)
    return AnalogLayer(
        config=config, params=params, tiles=tiles,
        row_slices=list(mapping.row_slices), col_slices=list(mapping.col_slices),
        gamma=np.asarray(mapping.gamma, dtype=float), alpha=float(alpha),
        beta=np.asarray(beta, dtype=float),
    )


def realize_layer(layer: AnalogLayer, t_eval: float, rng: np.random.Generator):
    """Fix every tile's weights for an evaluation at ``t_eval``."""
    for row in layer.tiles:
        for tile in row:
            realize_tile(tile, t_eval, rng)


def calibrate_layer(
    layer: AnalogLayer,
    rng: np.random.Generator,
    probe_rng: np.random.Generator | None = None,
    n_probes: int = 10,
):
    """Measure and store each tile's drift-compensation reference.

    The probe vectors (one set per input chunk, shared by the output
    chunks) are stored on the layer so the later correction uses the same
    probes. Tiles must be realized at (or near) time 0 first.
    """
    pr = probe_rng if probe_rng is not None else rng
    probes = [make_drift_probes(rs.stop - rs.start, pr, n_probes)
              for rs in layer.row_slices]
    layer.comp_probes = probes
    for row in layer.tiles:
        for ri, tile in enumerate(row):
            drift_comp_calibrate(tile, probes[ri], rng)


def apply_layer_comp(layer: AnalogLayer, rng: np.random.Generator, cap: float = 10.0):
    """Set every tile's drift-compensation factor at its current time."""
    if layer.comp_probes is None:
        raise RuntimeError("calibrate_layer must run before apply_layer_comp")
    for row in layer.tiles:
        for ri, tile in enumerate(row):
            drift_comp_apply(tile, layer.comp_probes[ri], rng, cap=cap)


def layer_forward(layer: AnalogLayer, x, rng: np.random.Generator) -> np.ndarray:
    """Run the programmed layer: per-tile digital passes, full-precision
    summation over input chunks, then the digital bias."""
    x = np.asarray(x, dtype=float)
    squeeze = x.ndim == 1
    xb = np.atleast_2d(x)
    out = np.zeros((xb.shape[0], layer.n_out))
    for ci, cs in enumerate(layer.col_slices):
        for ri, rs in enumerate(layer.row_slices):
            out[:, cs] += tile_forward(
                layer.tiles[ci][ri], xb[:, rs], layer.alpha,
                layer.gamma[cs], 0.0, rng,
            )
    out += layer.beta
    return out[0] if squeeze else out


def ideal_layer_output(mapping: WeightMapping, x, alpha: float = 1.0, beta=None):
    """Reference full-precision output of a mapped layer (no hardware)."""
    x = np.asarray(x, dtype=float)
    logical = (mapping.gamma[:, None] * mapping.w_norm)
    out = x @ logical.T
    if beta is not None:
        out = out + np.asarray(beta, dtype=float)
    return out


@dataclass(frozen=True)
class GenNormSpec:
    """Generalized normal distribution: density proportional to
    ``exp(-(|x - mu| / alpha) ** beta_shape)``. ``beta_shape`` 2 is
    Gaussian, 1 Laplace, large values approach uniform."""

    beta_shape: float
    alpha: float = 1.0
    mu: float = 0.0

    def __post_init__(self):
        if self.beta_shape <= 0:
            raise ValueError("beta_shape must be positive")
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")


def sample_gennorm(spec: GenNormSpec, size, rng: np.random.Generator) -> np.ndarray:
    """Draw from the generalized normal via the gamma transform:
    ``|X| = alpha * G ** (1 / beta)`` with ``G ~ Gamma(1 / beta, 1)`` and a
    random sign."""
    g = rng.gamma(1.0 / spec.beta_shape, 1.0, size=size)
    signs = np.where(rng.random(size=size) < 0.5, -1.0, 1.0)
    return spec.mu + spec.alpha * signs * g ** (1.0 / spec.beta_shape)


def excess_kurtosis(samples) -> float:
    """Fourth central moment over squared variance, minus 3 (Gaussian 0).

    Population moments, no small-sample correction. Needs at least 4
    samples and nonzero variance.
    """
    x = np.asarray(samples, dtype=float).ravel()
    if x.size < 4:
        raise ValueError("kurtosis needs at least 4 samples")
    d = x - x.mean()
    m2 = np.mean(d ** 2)
    if m2 == 0:
        raise ValueError("kurtosis undefined for zero variance")
    return float(np.mean(d ** 4) / m2 ** 2 - 3.0)
