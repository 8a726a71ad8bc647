"""Phase-change-memory conductance statistics: programming error, drift,
and accumulated low-frequency read noise.

Conductances are in microsiemens, times in seconds. Target conductances
live in ``[0, g_max]``; the fitted statistics are all expressed in terms of
the normalized target ``x = g_target / g_max``. The three ``*_scale`` knobs
multiply the corresponding random contribution and exist for sensitivity
studies (1.0 is the calibrated default, 0.0 disables the effect).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Normalized conductances below this floor are clamped before taking logs.
LOG_FLOOR = 1e-6


@dataclass(frozen=True)
class ClippedLinearFit:
    """``y = clip(a * ln(x) + b, y_min, y_max)`` evaluated at ``max(x, 1e-6)``."""

    a: float
    b: float
    y_min: float
    y_max: float

    def __post_init__(self):
        if self.y_min > self.y_max:
            raise ValueError("ClippedLinearFit needs y_min <= y_max")

    def __call__(self, x):
        x = np.maximum(np.asarray(x, dtype=float), LOG_FLOOR)
        return np.clip(self.a * np.log(x) + self.b, self.y_min, self.y_max)


@dataclass(frozen=True)
class PcmModelParams:
    """Calibrated device-statistics parameters.

    ``prog_c0/c1/c2`` are the quadratic programming-error coefficients in
    microsiemens, evaluated on the normalized target. ``mu_nu_fit`` and
    ``sigma_nu_fit`` give mean and spread of the drift exponent. Read noise
    uses ``q_s = clip(c1 * x**c2, 0, c3)`` accumulated from ``t_read`` on.
    """

    g_max: float = 25.0
    g_min: float = 0.0
    prog_c0: float = 0.26348
    prog_c1: float = 1.9650
    prog_c2: float = -1.1731
    t0: float = 20.0
    t_read: float = 250.0e-9
    mu_nu_fit: ClippedLinearFit = field(
        default=ClippedLinearFit(-0.0155, 0.0244, 0.049, 0.1)
    )
    sigma_nu_fit: ClippedLinearFit = field(
        default=ClippedLinearFit(-0.0125, -0.0059, 0.008, 0.045)
    )
    readnoise_c1: float = 0.0088
    readnoise_c2: float = -0.65
    readnoise_c3: float = 0.2
    prog_noise_scale: float = 1.0
    read_noise_scale: float = 1.0
    drift_scale: float = 1.0

    def __post_init__(self):
        if self.g_max <= 0:
            raise ValueError("g_max must be positive")
        if not 0 <= self.g_min < self.g_max:
            raise ValueError("need 0 <= g_min < g_max")
        if self.t0 <= 0 or self.t_read <= 0:
            raise ValueError("t0 and t_read must be positive")
        for name in ("prog_noise_scale", "read_noise_scale", "drift_scale"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")

    @classmethod
    def ideal(cls, **overrides) -> "PcmModelParams":
        """Exact conductances: programming, read noise and drift disabled."""
        kwargs = dict(prog_noise_scale=0.0, read_noise_scale=0.0,
                      drift_scale=0.0)
        kwargs.update(overrides)
        return cls(**kwargs)


@dataclass(frozen=True)
class DeviceFaultSpec:
    """Fractions of devices stuck at reset (0), set (g_max), or a uniformly
    random conductance. Fractions must be non-negative and sum to <= 1."""

    frac_stuck_reset: float = 0.0
    frac_stuck_set: float = 0.0
    frac_stuck_random: float = 0.0

    def __post_init__(self):
        fracs = (self.frac_stuck_reset, self.frac_stuck_set, self.frac_stuck_random)
        if any(f < 0 for f in fracs):
            raise ValueError("fault fractions must be >= 0")
        if sum(fracs) > 1.0 + 1e-12:
            raise ValueError("fault fractions must sum to <= 1")

    @property
    def total(self) -> float:
        return self.frac_stuck_reset + self.frac_stuck_set + self.frac_stuck_random


def _check_targets(g_target, params: PcmModelParams):
    g = np.asarray(g_target, dtype=float)
    if np.any(g < 0) or np.any(g > params.g_max):
        raise ValueError("target conductances must lie in [0, g_max]")
    return g


def programming_noise_std(g_target, params: PcmModelParams = PcmModelParams()):
    """Std of the conductance error left after iterative programming.

    Quadratic in the normalized target: ``c0 + c1*x + c2*x**2`` (µS).
    """
    g = _check_targets(g_target, params)
    x = g / params.g_max
    return params.prog_c0 + params.prog_c1 * x + params.prog_c2 * x * x


def program_conductances(g_target, params: PcmModelParams, rng: np.random.Generator):
    """Draw programmed conductances: target plus Gaussian programming error,
    clipped below at ``g_min`` (conductances cannot be negative)."""
    g = _check_targets(g_target, params)
    sig = programming_noise_std(g, params) * params.prog_noise_scale
    g_prog = g + sig * rng.standard_normal(g.shape)
    return np.maximum(g_prog, params.g_min)


def sample_drift_coefficients(
    g_target, params: PcmModelParams, rng: np.random.Generator
):
    """Per-device drift exponents ``nu ~ N(mu_nu(x), sigma_nu(x))``, clipped
    below at zero (conductance never grows), then multiplied by drift_scale."""
    g = _check_targets(g_target, params)
    x = g / params.g_max
    mu = params.mu_nu_fit(x)
    sigma = params.sigma_nu_fit(x)
    nu = mu + sigma * rng.standard_normal(g.shape)
    return np.maximum(nu, 0.0) * params.drift_scale


def drift_conductance(g_prog, nu, t_eval: float, params: PcmModelParams):
    """Conductance after drifting for ``t_eval`` seconds:
    ``g_prog * ((t_eval + t0) / t0) ** (-nu)``."""
    if t_eval < 0:
        raise ValueError("t_eval must be >= 0")
    nu = np.asarray(nu, dtype=float)
    if np.any(nu < 0):
        raise ValueError("drift exponents must be >= 0")
    return np.asarray(g_prog, dtype=float) * ((t_eval + params.t0) / params.t0) ** (-nu)


def read_noise_qs(g_target, params: PcmModelParams = PcmModelParams()):
    """Low-frequency noise amplitude ``Q_s = clip(c1 * x**c2, 0, c3)``."""
    g = _check_targets(g_target, params)
    x = np.maximum(g / params.g_max, LOG_FLOOR)
    return np.clip(params.readnoise_c1 * x ** params.readnoise_c2, 0.0, params.readnoise_c3)


def read_noise_std(g_target, t_eval: float, params: PcmModelParams = PcmModelParams()):
    """Std of the read noise accumulated up to ``t_eval``.

    Returns 0 for ``t_eval <= t_read`` (nothing accumulated within a single
    read). Otherwise ``g * Q_s(g) * sqrt(ln((t_eval + t_read) / (2 t_read)))``.
    """
    g = _check_targets(g_target, params)
    if t_eval < 0:
        raise ValueError("t_eval must be >= 0")
    if t_eval <= params.t_read:
        return np.zeros_like(g)
    acc = np.sqrt(np.log((t_eval + params.t_read) / (2.0 * params.t_read)))
    return g * read_noise_qs(g, params) * acc


@dataclass
class ProgrammedState:
    """Frozen long-term state of a device array after programming.

    ``g_prog`` already contains programming error and fault overrides;
    ``g_eff`` holds the effective targets (faulty devices replaced by their
    stuck value) used to evaluate drift and read-noise statistics;
    ``frozen`` marks stuck-at-reset devices, which are pinned at 0 and
    exempt from drift and read noise.
    """

    g_prog: np.ndarray
    g_eff: np.ndarray
    nu: np.ndarray
    frozen: np.ndarray

    @property
    def shape(self):
        return self.g_prog.shape


def _fault_indices(n: int, faults: DeviceFaultSpec, rng: np.random.Generator):
    n_reset = int(round(faults.frac_stuck_reset * n))
    n_set = int(round(faults.frac_stuck_set * n))
    n_rand = int(round(faults.frac_stuck_random * n))
    total = min(n_reset + n_set + n_rand, n)
    idx = rng.choice(n, size=total, replace=False)
    return idx[:n_reset], idx[n_reset:n_reset + n_set], idx[n_reset + n_set:total]


def program_devices(
    g_target,
    params: PcmModelParams,
    rng: np.random.Generator,
    faults: DeviceFaultSpec | None = None,
    drift_rng: np.random.Generator | None = None,
    fault_rng: np.random.Generator | None = None,
) -> ProgrammedState:
    """Program a device array once and fix its long-term state.

    Order: draw programming errors for all devices, then override fault
    locations (drawn uniformly without replacement), then draw one drift
    exponent per device from the statistics of its effective target.
    """
    g = _check_targets(g_target, params)
    g_prog = program_conductances(g, params, rng)
    g_eff = g.copy()
    frozen = np.zeros(g.shape, dtype=bool)
    if faults is not None and faults.total > 0:
        fr = fault_rng if fault_rng is not None else rng
        flat_prog = g_prog.reshape(-1)
        flat_eff = g_eff.reshape(-1)
        flat_frozen = frozen.reshape(-1)
        i_reset, i_set, i_rand = _fault_indices(flat_prog.size, faults, fr)
        flat_prog[i_reset] = 0.0
        flat_eff[i_reset] = 0.0
        flat_frozen[i_reset] = True
        flat_prog[i_set] = params.g_max
        flat_eff[i_set] = params.g_max
        if i_rand.size:
            vals = fr.uniform(0.0, params.g_max, size=i_rand.size)
            flat_prog[i_rand] = vals
            flat_eff[i_rand] = vals
        g_prog = flat_prog.reshape(g.shape)
        g_eff = flat_eff.reshape(g.shape)
        frozen = flat_frozen.reshape(g.shape)
    dr = drift_rng if drift_rng is not None else rng
    nu = sample_drift_coefficients(g_eff, params, dr)
    return ProgrammedState(g_prog=g_prog, g_eff=g_eff, nu=nu, frozen=frozen)


def conductances_at(
    state: ProgrammedState,
    t_eval: float,
    params: PcmModelParams,
    rng: np.random.Generator,
) -> np.ndarray:
    """Realized conductances at ``t_eval``: drift decay plus one read-noise
    draw, clipped below at ``g_min``. Stuck-at-reset devices stay at 0."""
    g = drift_conductance(state.g_prog, state.nu, t_eval, params)
    sig = read_noise_std(state.g_eff, t_eval, params) * params.read_noise_scale
    if np.any(sig > 0):
        g = g + sig * rng.standard_normal(g.shape)
    g = np.maximum(g, params.g_min)
    if np.any(state.frozen):
        g = np.where(state.frozen, 0.0, g)
    return g


def realize_conductances(
    g_target,
    t_eval: float,
    params: PcmModelParams,
    rng: np.random.Generator,
    faults: DeviceFaultSpec | None = None,
) -> np.ndarray:
    """One-shot composition: program, apply faults, drift, read noise."""
    state = program_devices(g_target, params, rng, faults=faults)
    return conductances_at(state, t_eval, params, rng)
