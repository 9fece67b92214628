"""Renyi DP of the Poisson-subsampled Gaussian mechanism.

Two routes are provided. ``sgm_rdp_numeric`` evaluates the exact
integer-order series for D_alpha(mixture || base), where the mixture is
(1 - s) N(0, sigma^2) + s N(1, sigma^2) and the base is N(0, sigma^2).
``thm1_rdp`` is the closed-form bound 2 s^2 alpha / sigma^2, valid only when
``thm1_conditions`` all hold; it is kept for verification, the accountant
always uses the exact series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special


@dataclass(frozen=True)
class SampledGmSpec:
    """Sampling rate ``s = p * q`` and noise multiplier ``sigma * b_t / (2 L)``."""

    sampling_rate: float
    noise_multiplier: float

    def __post_init__(self):
        if not 0.0 <= self.sampling_rate <= 1.0:
            raise ValueError(f"sampling_rate must be in [0, 1], got {self.sampling_rate}")
        if not self.noise_multiplier > 0:
            raise ValueError(f"noise_multiplier must be > 0, got {self.noise_multiplier}")


@dataclass(frozen=True)
class Thm1Conditions:
    rate_ok: bool
    noise_ok: bool
    cond1_ok: bool
    cond2_ok: bool

    def all(self) -> bool:
        return self.rate_ok and self.noise_ok and self.cond1_ok and self.cond2_ok

    def first_failure(self) -> str | None:
        for name in ("rate_ok", "noise_ok", "cond1_ok", "cond2_ok"):
            if not getattr(self, name):
                return name
        return None


class ConditionError(ValueError):
    """The closed-form subsampled bound was requested outside its validity region."""

    def __init__(self, condition: str, message: str):
        super().__init__(message)
        self.condition = condition


_CONDITION_TEXT = {
    "rate_ok": "sampling rate must be <= 1/5",
    "noise_ok": "noise multiplier must be >= 4",
    "cond1_ok": "alpha <= sigma^2/2 ln(1 + 1/(s(alpha-1))) - 2 ln sigma does not hold",
    "cond2_ok": "second order condition on alpha does not hold",
}


def thm1_conditions(spec: SampledGmSpec, alpha: float) -> Thm1Conditions:
    """Evaluate the four validity conditions of the closed-form bound.

    The inequalities have alpha on both sides; they are evaluated literally at
    the given ``alpha``. When the denominator of the second condition is not
    positive the condition is reported as failing.
    """
    if not alpha > 1:
        raise ValueError(f"alpha must be > 1, got {alpha}")
    s, sig = spec.sampling_rate, spec.noise_multiplier
    if s == 0:
        raise ValueError("conditions are undefined at sampling_rate = 0")
    log_term = math.log1p(1.0 / (s * (alpha - 1)))
    log_sig = math.log(sig)
    cond1_rhs = 0.5 * sig**2 * log_term - 2.0 * log_sig
    numer = 0.5 * sig**2 * log_term**2 - math.log(5.0) - 2.0 * log_sig
    denom = log_term + math.log(s * alpha) + 1.0 / (2.0 * sig**2)
    cond2 = denom > 0 and alpha <= numer / denom
    return Thm1Conditions(
        rate_ok=s <= 0.2,
        noise_ok=sig >= 4.0,
        cond1_ok=alpha <= cond1_rhs,
        cond2_ok=cond2,
    )


def thm1_rdp(spec: SampledGmSpec, alpha: float) -> float:
    """Closed-form bound ``2 s^2 alpha / sigma^2``; raises ConditionError if invalid."""
    conds = thm1_conditions(spec, alpha)
    failed = conds.first_failure()
    if failed is not None:
        raise ConditionError(failed, f"closed-form bound not valid: {failed} ({_CONDITION_TEXT[failed]})")
    return 2.0 * spec.sampling_rate**2 * alpha / spec.noise_multiplier**2


def _check_integer_order(alpha) -> int:
    if isinstance(alpha, bool) or not float(alpha).is_integer() or alpha < 2:
        raise ValueError(f"alpha must be an integer >= 2, got {alpha}")
    return int(alpha)


def _log_terms(s: float, sigma: float, alpha: int) -> np.ndarray:
    k = np.arange(alpha + 1, dtype=float)
    log_comb = special.gammaln(alpha + 1) - special.gammaln(k + 1) - special.gammaln(alpha - k + 1)
    # 0 * log(0) is taken as 0; the matching terms vanish.
    if s == 0.0:
        log_s = np.where(k == 0, 0.0, -np.inf)
    else:
        log_s = k * math.log(s)
    if s == 1.0:
        log_1ms = np.where(k == alpha, 0.0, -np.inf)
    else:
        log_1ms = (alpha - k) * math.log1p(-s)
    return log_comb + log_s + log_1ms + k * (k - 1) / (2.0 * sigma**2)


def sgm_rdp_numeric(spec: SampledGmSpec, alpha: int) -> float:
    """Exact RDP of the subsampled Gaussian mechanism at integer order ``alpha``.

    (1/(alpha-1)) ln sum_k C(alpha,k) (1-s)^(alpha-k) s^k exp(k(k-1)/(2 sigma^2)),
    summed in log space so large orders with small sigma stay finite.
    """
    alpha = _check_integer_order(alpha)
    s = spec.sampling_rate
    if s == 0.0:
        return 0.0
    log_a = special.logsumexp(_log_terms(s, spec.noise_multiplier, alpha))
    # Rounding can push log_a a hair below zero for tiny s.
    return max(float(log_a), 0.0) / (alpha - 1)


def sgm_rdp(spec: SampledGmSpec, alpha: int) -> float:
    """RDP used for accounting; always the exact numeric value."""
    return sgm_rdp_numeric(spec, alpha)
