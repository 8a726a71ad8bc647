"""Hardware-aware (HWA) training for small MLPs built from analog linear
layers.

The forward pass runs the nonideal MVM pipeline (input range clipping,
DAC/ADC quantization, injected programming-error weight perturbations
redrawn once per mini-batch, short-term weight noise, output noise; no
drift during training). The backward pass is plain floating point with a
straight-through contract: quantizers and clips pass gradients unchanged
inside their linear region and zero outside, and the perturbed weights
used in the forward pass are reused for the gradient computation while
updates always apply to the unperturbed reference weights.

Per-column output scales factor as gamma_i = gamma_tilde_i * c_aws * kappa
with kappa = kappa_tilde / b_out; c_aws = sqrt(3 / n_in) equalizes the
learned parameters' magnitudes across layer sizes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import mapping as _mapping
from .mapping import WeightMapping, even_slices
from .pcm import PcmModelParams, programming_noise_std
from .streams import stream
from .tile import TileConfig, quantize


@dataclass
class HwaSchedule:
    """Knobs of the HWA training recipe."""
    noise_ramp_epochs: int = 5
    prog_noise_scale_final: float = 2.0
    remap_every: int = 0                 # epochs between remaps; 0 disables
    input_range_decay: float = 1e-3
    input_range_init_batches: int = 20
    input_range_cap: float = 10.0
    drop_connect: float = 0.0            # fraction of weights zeroed per draw
    noise_refresh_per_batch: int = 1
    kappa_decay: float = 1e-4
    learn_gamma_tilde: bool = True
    learn_kappa: bool = True
    learn_input_range: bool = True
    # Stub for adaptive output-range management; not modeled.
    dynamic_range_management: bool = False

    def __post_init__(self) -> None:
        if self.noise_ramp_epochs < 0 or self.remap_every < 0:
            raise ValueError("schedule counts must be >= 0")
        if not 0.0 <= self.drop_connect < 1.0:
            raise ValueError("drop_connect must be in [0, 1)")
        if self.noise_refresh_per_batch < 1:
            raise ValueError("noise_refresh_per_batch must be >= 1")


@dataclass
class DistillSpec:
    temperature: float = 10.0
    mixture: float = 0.75

    def __post_init__(self) -> None:
        if self.temperature <= 0.0:
            raise ValueError("temperature must be > 0")
        if not 0.0 <= self.mixture <= 1.0:
            raise ValueError("mixture must be in [0, 1]")


class TrainableAnalogLayer:
    """Analog linear layer with live normalized weights in [-1, 1].

    ``w`` holds the reference (unperturbed) normalized weights; the
    per-mini-batch perturbation cache stores drawn values, so repeated
    forwards of the same batch without a refresh see identical perturbed
    weights.
    """

    def __init__(
        self,
        n_in: int,
        n_out: int,
        config: TileConfig,
        pcm_params: PcmModelParams,
        learn_gamma_tilde: bool = True,
        learn_kappa: bool = True,
    ) -> None:
        self.n_in = int(n_in)
        self.n_out = int(n_out)
        self.config = config
        self.params = pcm_params
        self.learn_gamma_tilde = learn_gamma_tilde
        self.learn_kappa = learn_kappa
        self.c_aws = float(np.sqrt(3.0 / n_in))
        self.w = np.zeros((n_out, n_in))
        self.gamma_tilde = np.ones(n_out)
        b_out = config.out_bound if np.isfinite(config.out_bound) else 1.0
        self.out_bound_ref = float(b_out)
        self.kappa_tilde = float(b_out)
        self.alpha = 1.0
        self.beta = np.zeros(n_out)
        self.row_slices = even_slices(n_in, config.max_rows)
        self._cache: dict | None = None
        self._ctx: dict | None = None

    # -- scale decomposition --------------------------------------------

    @property
    def kappa(self) -> float:
        return self.kappa_tilde / self.out_bound_ref if self.learn_kappa else 1.0

    @property
    def gamma(self) -> np.ndarray:
        return self.gamma_tilde * (self.c_aws * self.kappa)

    def set_gamma(self, gamma: np.ndarray) -> None:
        """Store per-column scales, folding out the fixed factors."""
        self.gamma_tilde = np.asarray(gamma, dtype=float) / (self.c_aws * self.kappa)

    def init_from_fp(self, weights: np.ndarray, bias: np.ndarray | None = None) -> None:
        """Column-wise max-abs mapping of FP weights into [-1, 1]."""
        w = np.asarray(weights, dtype=float)
        if w.shape != (self.n_out, self.n_in):
            raise ValueError("weight shape mismatch")
        gamma = np.max(np.abs(w), axis=1)
        gamma = np.where(gamma > 0.0, gamma, 1.0)
        self.w = w / gamma[:, None]
        self.set_gamma(gamma)
        if bias is not None:
            self.beta = np.asarray(bias, dtype=float).copy()

    def fp_weights(self) -> np.ndarray:
        """Logical layer matrix gamma_i * w_ij."""
        return self.gamma[:, None] * self.w

    # -- noise cache -----------------------------------------------------

    def refresh_noise(self, epoch_fraction: float, rng, drop_connect: float = 0.0,
                      noise_scale_final: float = 1.0) -> None:
        """Redraw the per-mini-batch weight perturbation and drop mask.

        The injected perturbation follows the conductance-dependent
        programming-error law evaluated at the current normalized weight
        magnitudes, scaled by the linear ramp value times the final scale.
        """
        ramp = float(np.clip(epoch_fraction, 0.0, 1.0))
        scale = ramp * noise_scale_final
        g_target = np.abs(self.w) * self.params.g_max
        sigma_w = programming_noise_std(g_target, self.params) / self.params.g_max
        dw = scale * sigma_w * rng.standard_normal(self.w.shape)
        if drop_connect > 0.0:
            keep = rng.random(self.w.shape) >= drop_connect
        else:
            keep = None
        self._cache = {"dw": dw, "keep": keep, "epoch_fraction": ramp}

    # -- forward / backward ---------------------------------------------

    def forward(self, x: np.ndarray, epoch_fraction: float, rng,
                refresh: bool = True, drop_connect: float = 0.0,
                noise_scale_final: float = 1.0) -> np.ndarray:
        cfg = self.config
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if refresh or self._cache is None:
            self.refresh_noise(epoch_fraction, rng, drop_connect, noise_scale_final)
        dw = self._cache["dw"]
        keep = self._cache["keep"]
        w_pert = self.w + dw
        if keep is not None:
            w_pert = w_pert * keep
        x_scaled = x / self.alpha
        dac_mask = np.abs(x_scaled) < 1.0
        x_dig = quantize(x_scaled, 1.0, cfg.dac_bits, cfg.dac_step_scale)
        adc_sum = np.zeros((x.shape[0], self.n_out))
        adc_masks = []
        for sl in self.row_slices:
            wp = w_pert[:, sl]
            z = x_dig[:, sl] @ wp.T
            if cfg.w_noise0 > 0.0:
                var = (x_dig[:, sl] ** 2) @ (np.abs(wp).T)
                z = z + cfg.w_noise0 * np.sqrt(var) * rng.standard_normal(z.shape)
            if cfg.out_noise > 0.0:
                z = z + cfg.out_noise * rng.standard_normal(z.shape)
            adc_masks.append(np.abs(z) < cfg.out_bound)
            adc_sum += quantize(z, cfg.out_bound, cfg.adc_bits, cfg.adc_step_scale)
        y = self.beta + self.alpha * self.gamma * adc_sum
        self._ctx = {
            "x": x, "x_scaled": x_scaled, "x_dig": x_dig,
            "dac_mask": dac_mask, "adc_masks": adc_masks,
            "w_pert": w_pert, "keep": keep, "adc_sum": adc_sum,
            "batch_shape": x.shape,
        }
        return y

    def backward(self, grad_out: np.ndarray) -> dict:
        """Straight-through gradients; see the module docstring.

        The dependence of noise magnitudes on |w| is treated as constant,
        as is standard for injected-noise regularizers.
        """
        if self._ctx is None:
            raise RuntimeError("backward called without a matching forward")
        ctx = self._ctx
        g = np.atleast_2d(np.asarray(grad_out, dtype=float))
        if g.shape != (ctx["batch_shape"][0], self.n_out):
            raise RuntimeError("gradient shape does not match saved context")
        gamma = self.gamma
        pref = self.alpha * gamma            # d y / d adc_sum
        grad_w = np.zeros_like(self.w)
        grad_x_scaled = np.zeros_like(ctx["x_scaled"])
        for sl, adc_mask in zip(self.row_slices, ctx["adc_masks"]):
            gz = g * pref * adc_mask
            grad_w[:, sl] = gz.T @ ctx["x_dig"][:, sl]
            grad_x_scaled[:, sl] += gz @ ctx["w_pert"][:, sl]
        grad_x_scaled *= ctx["dac_mask"]
        if ctx["keep"] is not None:
            grad_w *= ctx["keep"]
        grad_x = grad_x_scaled / self.alpha
        grad_beta = g.sum(axis=0)
        # alpha routes: output prefactor and the shrinking input scale.
        grad_alpha = float(np.sum(g * gamma * ctx["adc_sum"]))
        grad_alpha += float(np.sum(grad_x_scaled * (-ctx["x"] / self.alpha ** 2)))
        grad_gamma = (g * ctx["adc_sum"]).sum(axis=0) * self.alpha
        grad_gamma_tilde = grad_gamma * (self.c_aws * self.kappa)
        if self.learn_kappa:
            grad_kappa_tilde = float(
                np.sum(grad_gamma * self.gamma_tilde) * self.c_aws / self.out_bound_ref
            )
        else:
            grad_kappa_tilde = 0.0
        return {
            "x": grad_x, "w": grad_w, "beta": grad_beta,
            "alpha": grad_alpha, "gamma_tilde": grad_gamma_tilde,
            "kappa_tilde": grad_kappa_tilde,
        }

    def clip_weights(self) -> None:
        np.clip(self.w, -1.0, 1.0, out=self.w)

    def remap(self) -> None:
        """Fold per-column max-abs into gamma, keeping gamma_i*w_ij fixed."""
        w_norm, gamma = _mapping.renormalize_columns(self.w, self.gamma)
        self.w = w_norm
        self.set_gamma(gamma)


def hwa_forward(layer: TrainableAnalogLayer, x_batch, epoch_fraction: float,
                rng, refresh: bool = True, drop_connect: float = 0.0,
                noise_scale_final: float = 1.0):
    """Functional entry point; returns (outputs, saved context)."""
    y = layer.forward(x_batch, epoch_fraction, rng, refresh,
                      drop_connect, noise_scale_final)
    return y, layer._ctx


def hwa_backward(layer: TrainableAnalogLayer, ctx, grad_out) -> dict:
    if ctx is not layer._ctx:
        raise RuntimeError("context does not belong to this layer's last forward")
    return layer.backward(grad_out)


def init_input_range(batches, cap: float = 10.0) -> float:
    """Average per-vector max magnitude over calibration batches, capped."""
    maxima = []
    for b in batches:
        b = np.atleast_2d(np.asarray(b, dtype=float))
        maxima.append(np.max(np.abs(b), axis=1))
    if not maxima:
        raise ValueError("need at least one calibration batch")
    m = float(np.mean(np.concatenate(maxima)))
    if m == 0.0:
        return 1.0
    return min(m, cap)


# --- losses -----------------------------------------------------------------

def _log_softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=1, keepdims=True)
    return z - np.log(np.sum(np.exp(z), axis=1, keepdims=True))


def softmax_cross_entropy(logits: np.ndarray, labels: np.ndarray):
    """Mean cross-entropy and its logits gradient."""
    logits = np.atleast_2d(logits)
    n = logits.shape[0]
    logp = _log_softmax(logits)
    loss = float(-np.mean(logp[np.arange(n), labels]))
    grad = np.exp(logp)
    grad[np.arange(n), labels] -= 1.0
    return loss, grad / n


def distill_loss(student_logits, teacher_logits, labels, spec: DistillSpec):
    """Temperature-softened teacher matching mixed with the labeled loss.

    loss = mix * T^2 * KL(teacher_T || student_T) + (1 - mix) * CE
    Returns (loss, gradient w.r.t. student logits).
    """
    s = np.atleast_2d(np.asarray(student_logits, dtype=float))
    t = np.atleast_2d(np.asarray(teacher_logits, dtype=float))
    if s.shape != t.shape:
        raise ValueError("student and teacher logits must have the same shape")
    n = s.shape[0]
    T, mix = spec.temperature, spec.mixture
    ce, ce_grad = softmax_cross_entropy(s, labels)
    logp_s = _log_softmax(s / T)
    logp_t = _log_softmax(t / T)
    p_t = np.exp(logp_t)
    kl = float(np.mean(np.sum(p_t * (logp_t - logp_s), axis=1)))
    kl_grad = T * (np.exp(logp_s) - p_t) / n     # T^2 * d(mean KL)/ds
    loss = mix * T * T * kl + (1.0 - mix) * ce
    grad = mix * kl_grad + (1.0 - mix) * ce_grad
    return loss, grad


# --- plain FP reference network ---------------------------------------------

class FpMlp:
    """Dense ReLU MLP trained in floating point; teacher and baseline."""

    def __init__(self, dims: list[int], rng) -> None:
        self.weights = []
        self.biases = []
        for n_in, n_out in zip(dims[:-1], dims[1:]):
            bound = np.sqrt(6.0 / (n_in + n_out))
            self.weights.append(rng.uniform(-bound, bound, (n_out, n_in)))
            self.biases.append(np.zeros(n_out))

    def forward(self, x: np.ndarray) -> np.ndarray:
        h = np.atleast_2d(x)
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            h = h @ w.T + b
            if i < len(self.weights) - 1:
                h = np.maximum(h, 0.0)
        return h

    def train_sgd(self, x, y, epochs: int, lr: float, batch_size: int,
                  momentum: float, rng) -> list[dict]:
        n = x.shape[0]
        vel_w = [np.zeros_like(w) for w in self.weights]
        vel_b = [np.zeros_like(b) for b in self.biases]
        history = []
        for epoch in range(epochs):
            order = rng.permutation(n)
            losses = []
            for start in range(0, n, batch_size):
                idx = order[start:start + batch_size]
                xb, yb = x[idx], y[idx]
                acts = [xb]
                h = xb
                for i, (w, b) in enumerate(zip(self.weights, self.biases)):
                    h = h @ w.T + b
                    if i < len(self.weights) - 1:
                        h = np.maximum(h, 0.0)
                    acts.append(h)
                loss, g = softmax_cross_entropy(h, yb)
                losses.append(loss)
                for i in reversed(range(len(self.weights))):
                    if i < len(self.weights) - 1:
                        g = g * (acts[i + 1] > 0.0)
                    gw = g.T @ acts[i]
                    gb = g.sum(axis=0)
                    g = g @ self.weights[i]
                    vel_w[i] = momentum * vel_w[i] - lr * gw
                    vel_b[i] = momentum * vel_b[i] - lr * gb
                    self.weights[i] += vel_w[i]
                    self.biases[i] += vel_b[i]
            history.append({"epoch": epoch, "train_loss": float(np.mean(losses))})
        return history

    def error_rate(self, x, y) -> float:
        pred = np.argmax(self.forward(x), axis=1)
        return float(np.mean(pred != y))


# --- analog network ----------------------------------------------------------

class AnalogMlp:
    """Stack of trainable analog layers with ReLU between them."""

    def __init__(self, dims: list[int], config: TileConfig,
                 pcm_params: PcmModelParams, schedule: HwaSchedule) -> None:
        self.schedule = schedule
        self.layers = [
            TrainableAnalogLayer(n_in, n_out, config, pcm_params,
                                 learn_gamma_tilde=schedule.learn_gamma_tilde,
                                 learn_kappa=schedule.learn_kappa)
            for n_in, n_out in zip(dims[:-1], dims[1:])
        ]
        self._relu_masks: list[np.ndarray] = []

    def init_from_fp(self, fp_net: FpMlp) -> None:
        for layer, w, b in zip(self.layers, fp_net.weights, fp_net.biases):
            layer.init_from_fp(w, b)

    def forward(self, x, epoch_fraction: float, rng, refresh: bool = True) -> np.ndarray:
        sched = self.schedule
        h = x
        self._relu_masks = []
        for i, layer in enumerate(self.layers):
            h = layer.forward(h, epoch_fraction, rng, refresh,
                              sched.drop_connect, sched.prog_noise_scale_final)
            if i < len(self.layers) - 1:
                mask = h > 0.0
                self._relu_masks.append(mask)
                h = h * mask
        return h

    def backward(self, grad_logits) -> list[dict]:
        grads = [None] * len(self.layers)
        g = grad_logits
        for i in reversed(range(len(self.layers))):
            if i < len(self.layers) - 1:
                g = g * self._relu_masks[i]
            grads[i] = self.layers[i].backward(g)
            g = grads[i]["x"]
        return grads

    def fp_logits(self, x) -> np.ndarray:
        """Noise-free logical function of the current weights."""
        h = np.atleast_2d(x)
        for i, layer in enumerate(self.layers):
            h = h @ layer.fp_weights().T + layer.beta
            if i < len(self.layers) - 1:
                h = np.maximum(h, 0.0)
        return h


def train_hwa(
    net: AnalogMlp,
    x_train: np.ndarray,
    y_train: np.ndarray,
    epochs: int,
    lr: float,
    batch_size: int,
    seed: int,
    momentum: float = 0.9,
    x_val: np.ndarray | None = None,
    y_val: np.ndarray | None = None,
    distill: DistillSpec | None = None,
    teacher: FpMlp | None = None,
) -> list[dict]:
    """SGD with momentum over the nonideal forward pass.

    Per update: gradients through the straight-through contract, weight
    clip to [-1, 1], alpha update augmented by the current value and
    decayed, kappa_tilde weight-decayed. Remapping (if scheduled) folds
    column maxima into the scales between epochs. Raises on NaN loss.
    """
    sched = net.schedule
    if sched.dynamic_range_management:
        raise NotImplementedError("dynamic range management is not modeled")
    if distill is not None and teacher is None:
        raise ValueError("distillation requires a teacher network")
    shuffle_rng = stream(seed, "data-shuffle")
    noise_rng = stream(seed, "train-noise")
    n = x_train.shape[0]
    vel: dict[tuple[int, str], np.ndarray | float] = {}
    history = []
    updates_per_epoch = max(1, int(np.ceil(n / batch_size)))
    for epoch in range(epochs):
        order = shuffle_rng.permutation(n)
        losses = []
        for b_idx, start in enumerate(range(0, n, batch_size)):
            idx = order[start:start + batch_size]
            xb, yb = x_train[idx], y_train[idx]
            if sched.noise_ramp_epochs > 0:
                progress = epoch + b_idx / updates_per_epoch
                epoch_fraction = min(progress / sched.noise_ramp_epochs, 1.0)
            else:
                epoch_fraction = 1.0
            for sub in range(sched.noise_refresh_per_batch):
                logits = net.forward(xb, epoch_fraction, noise_rng, refresh=True)
                if distill is not None:
                    loss, g = distill_loss(logits, teacher.forward(xb), yb, distill)
                else:
                    loss, g = softmax_cross_entropy(logits, yb)
                if not np.isfinite(loss):
                    raise RuntimeError(
                        f"training diverged: non-finite loss at epoch {epoch}, "
                        f"batch {b_idx}")
                losses.append(loss)
                if sched.noise_refresh_per_batch > 1:
                    g = g / sched.noise_refresh_per_batch
                grads = net.backward(g)
                for li, (layer, gr) in enumerate(zip(net.layers, grads)):
                    _sgd_step(layer, gr, lr, momentum, vel, li, sched)
        if sched.remap_every > 0 and (epoch + 1) % sched.remap_every == 0:
            for layer in net.layers:
                layer.remap()
        row = {"epoch": epoch, "train_loss": float(np.mean(losses))}
        if x_val is not None:
            pred = np.argmax(net.fp_logits(x_val), axis=1)
            row["val_err"] = float(np.mean(pred != y_val))
        history.append(row)
    return history


def _sgd_step(layer: TrainableAnalogLayer, grads: dict, lr: float,
              momentum: float, vel: dict, li: int, sched: HwaSchedule) -> None:
    def step(name: str, param, grad):
        key = (li, name)
        v = vel.get(key, 0.0)
        v = momentum * v - lr * grad
        vel[key] = v
        return param + v

    layer.w = step("w", layer.w, grads["w"])
    layer.clip_weights()
    layer.beta = step("beta", layer.beta, grads["beta"])
    if layer.learn_gamma_tilde:
        layer.gamma_tilde = step("gamma_tilde", layer.gamma_tilde,
                                 grads["gamma_tilde"])
    if layer.learn_kappa:
        layer.kappa_tilde = step(
            "kappa_tilde", layer.kappa_tilde,
            grads["kappa_tilde"] + sched.kappa_decay * layer.kappa_tilde)
    if sched.learn_input_range:
        g_alpha = layer.alpha * grads["alpha"] + sched.input_range_decay * layer.alpha
        layer.alpha = max(float(step("alpha", layer.alpha, g_alpha)), 1e-6)


def calibrate_input_ranges(net: AnalogMlp, x_calib: np.ndarray,
                           batch_size: int, schedule: HwaSchedule) -> None:
    """Set each layer's alpha from the noise-free activations feeding it."""
    n_batches = max(1, schedule.input_range_init_batches)
    batches = [x_calib[i:i + batch_size]
               for i in range(0, min(len(x_calib), n_batches * batch_size),
                              batch_size)]
    h_batches = batches
    for i, layer in enumerate(net.layers):
        layer.alpha = init_input_range(h_batches, schedule.input_range_cap)
        if i < len(net.layers) - 1:
            h_batches = [np.maximum(b @ layer.fp_weights().T + layer.beta, 0.0)
                         for b in h_batches]


# --- inference-time programming and evaluation -------------------------------

@dataclass
class MappedNetwork:
    """Weights and scales of a network ready to program into tiles."""
    mappings: list[WeightMapping]
    alphas: list[float]
    betas: list[np.ndarray]


def mapped_from_trained(net: AnalogMlp) -> MappedNetwork:
    cfg = net.layers[0].config
    mappings, alphas, betas = [], [], []
    for layer in net.layers:
        n_out, n_in = layer.w.shape
        mappings.append(WeightMapping(
            w_norm=layer.w.copy(), gamma=layer.gamma.copy(),
            alpha_hint=layer.alpha,
            row_slices=even_slices(n_in, cfg.max_rows),
            col_slices=even_slices(n_out, cfg.max_cols),
        ))
        alphas.append(layer.alpha)
        betas.append(layer.beta.copy())
    return MappedNetwork(mappings, alphas, betas)


def mapped_from_fp(
    fp_net: FpMlp,
    x_calib: np.ndarray,
    config: TileConfig,
    clip_sigmas: float | None = 2.5,
    input_range_cap: float = 10.0,
) -> MappedNetwork:
    """Direct conductance mapping of an FP network (no retraining).

    Raw weights are clipped at ``clip_sigmas`` standard deviations before
    column-wise scaling; input ranges come from the FP activations.
    """
    mappings, alphas, betas = [], [], []
    h = np.atleast_2d(x_calib)
    for i, (w, b) in enumerate(zip(fp_net.weights, fp_net.biases)):
        mappings.append(_mapping.map_weights(
            w, max_rows=config.max_rows, max_cols=config.max_cols,
            per_column=True, clip_sigmas=clip_sigmas))
        alphas.append(init_input_range([h], input_range_cap))
        betas.append(np.asarray(b, dtype=float).copy())
        h = h @ w.T + b
        if i < len(fp_net.weights) - 1:
            h = np.maximum(h, 0.0)
    return MappedNetwork(mappings, alphas, betas)


def evaluate_at_time(
    mapped: MappedNetwork,
    x_test: np.ndarray,
    y_test: np.ndarray,
    t_evals,
    config: TileConfig,
    pcm_params: PcmModelParams,
    seed: int = 0,
    n_repeats: int = 5,
    drift_compensation: bool = True,
    faults=None,
) -> list[dict]:
    """Program the network freshly per repeat, then report classification
    error at each evaluation time with drift and read noise applied and
    the global compensation factor refreshed per time point."""
    results = {float(t): [] for t in t_evals}
    n_layers = len(mapped.mappings)
    for rep in range(n_repeats):
        layers = []
        rngs = []
        for li, mapping in enumerate(mapped.mappings):
            idx = rep * n_layers + li
            layer = _mapping.program_layer(
                mapping, config, pcm_params,
                stream(seed, "programming", idx),
                faults=faults,
                drift_rng=stream(seed, "drift", idx),
                fault_rng=stream(seed, "faults", idx),
                polarity_rng=stream(seed, "polarity", idx),
                shape_rng=stream(seed, "s-shape", idx),
            )
            layer.alpha = mapped.alphas[li]
            layer.beta = mapped.betas[li]
            read_rng = stream(seed, "read-noise", idx)
            mvm_rng = stream(seed, "output-noise", idx)
            if drift_compensation:
                _mapping.realize_layer(layer, 0.0, read_rng)
                _mapping.calibrate_layer(
                    layer, mvm_rng, probe_rng=stream(seed, "drift-probes", idx))
            layers.append(layer)
            rngs.append((read_rng, mvm_rng))
        for t in results:
            h = x_test
            for li, layer in enumerate(layers):
                read_rng, mvm_rng = rngs[li]
                _mapping.realize_layer(layer, t, read_rng)
                if drift_compensation:
                    _mapping.apply_layer_comp(layer, mvm_rng)
                h = _mapping.layer_forward(layer, h, mvm_rng)
                if li < len(layers) - 1:
                    h = np.maximum(h, 0.0)
            pred = np.argmax(h, axis=1)
            results[t].append(float(np.mean(pred != y_test)))
    rows = []
    for t in sorted(results):
        errs = np.array(results[t])
        sem = float(errs.std(ddof=1) / np.sqrt(len(errs))) if len(errs) > 1 else 0.0
        rows.append({"t_eval": t, "err_mean": float(errs.mean()),
                     "err_sem": sem, "n_repeats": n_repeats})
    return rows
