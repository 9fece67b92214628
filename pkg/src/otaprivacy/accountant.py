"""Multi-round privacy accounting over an integer grid of Renyi orders."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .mechanisms import (
    GaussianMechanismSpec,
    RdpCurve,
    advanced_composition,
    gm_dp_epsilon,
)
from .sampled import SampledGmSpec, sgm_rdp

DEFAULT_SAMPLING_RATES = (1.0, 0.5, 0.1, 0.05, 0.01)


@dataclass(frozen=True)
class AccountantConfig:
    sampling_rate: float
    noise_multiplier: float
    delta: float = 1e-5
    alpha_min: int = 2
    alpha_max: int = 64
    t_max: int = 1000

    def __post_init__(self):
        # Delegates range checks on (s, sigma).
        SampledGmSpec(self.sampling_rate, self.noise_multiplier)
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must be in (0, 1), got {self.delta}")
        if not (isinstance(self.alpha_min, int) and isinstance(self.alpha_max, int)):
            raise ValueError("alpha_min and alpha_max must be integers")
        if not 2 <= self.alpha_min <= self.alpha_max:
            raise ValueError(f"need 2 <= alpha_min <= alpha_max, got [{self.alpha_min}, {self.alpha_max}]")
        if not (isinstance(self.t_max, int) and self.t_max >= 1):
            raise ValueError(f"t_max must be a positive integer, got {self.t_max}")

    @property
    def spec(self) -> SampledGmSpec:
        return SampledGmSpec(self.sampling_rate, self.noise_multiplier)


@dataclass(frozen=True)
class PrivacyRow:
    t: int
    epsilon: float
    alpha_star: int | None


@dataclass(frozen=True)
class PrivacyCurve:
    """Composite epsilon after each of t = 1..t_max iterations.

    ``method`` is ``"rdp"`` or ``"act"``; ``alpha_star`` is None for ``"act"``.
    """

    rows: tuple[PrivacyRow, ...]
    method: str
    config: AccountantConfig
    metadata: dict = field(default_factory=dict, compare=False)

    @property
    def epsilons(self) -> np.ndarray:
        return np.array([r.epsilon for r in self.rows])

    def epsilon(self, t: int) -> float:
        return self.rows[t - 1].epsilon


def per_step_curve(spec: SampledGmSpec, alpha_min: int = 2, alpha_max: int = 64) -> RdpCurve:
    if not 2 <= alpha_min <= alpha_max:
        raise ValueError(f"need 2 <= alpha_min <= alpha_max, got [{alpha_min}, {alpha_max}]")
    orders = tuple(range(alpha_min, alpha_max + 1))
    return RdpCurve(orders, tuple(sgm_rdp(spec, a) for a in orders))


def epsilon_at(curve: RdpCurve, t: int, delta: float) -> tuple[float, int]:
    """Best (eps, alpha) after composing ``curve`` ``t`` times, at failure prob ``delta``.

    Minimises t * eps(alpha) + ln(1/delta) / (alpha - 1) over the grid; ties go
    to the smallest order.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must be in (0, 1), got {delta}")
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    orders = np.asarray(curve.orders, dtype=float)
    totals = t * np.asarray(curve.epsilons) + math.log(1.0 / delta) / (orders - 1.0)
    i = int(np.argmin(totals))
    return float(totals[i]), curve.orders[i]


def sweep(config: AccountantConfig) -> PrivacyCurve:
    """RDP-route composite epsilon for t = 1..t_max."""
    curve = per_step_curve(config.spec, config.alpha_min, config.alpha_max)
    rows = []
    for t in range(1, config.t_max + 1):
        eps, alpha = epsilon_at(curve, t, config.delta)
        rows.append(PrivacyRow(t, eps, alpha))
    return PrivacyCurve(tuple(rows), "rdp", config)


def act_sweep(
    config: AccountantConfig,
    step_fraction: float = 0.5,
) -> PrivacyCurve:
    """Advanced-composition baseline for the unsampled Gaussian mechanism.

    At horizon t, a fraction ``step_fraction`` of ``delta`` is spread evenly over
    the t per-step Gaussian mechanisms and the rest is the composition slack.
    """
    if config.sampling_rate != 1.0:
        raise ValueError("advanced composition baseline is only defined for sampling_rate = 1")
    if not 0.0 < step_fraction < 1.0:
        raise ValueError(f"step_fraction must be in (0, 1), got {step_fraction}")
    gm = GaussianMechanismSpec(sensitivity=1.0, noise_std=config.noise_multiplier)
    delta_slack = (1.0 - step_fraction) * config.delta
    rows = []
    for t in range(1, config.t_max + 1):
        eps_step = gm_dp_epsilon(gm, step_fraction * config.delta / t)
        budget = advanced_composition(eps_step, step_fraction * config.delta / t, t, delta_slack)
        rows.append(PrivacyRow(t, budget.epsilon, None))
    meta = {"delta_step": f"{step_fraction} * delta / t", "delta_slack": f"{1.0 - step_fraction} * delta"}
    return PrivacyCurve(tuple(rows), "act", config, meta)
