"""Gaussian mechanism, Renyi-DP composition and conversion to (eps, delta)-DP.

Every function here is pure. Logarithms are natural throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

DEFAULT_ORDERS = tuple(range(2, 65))


def _check_delta(delta: float, name: str = "delta") -> None:
    if not 0.0 < delta < 1.0:
        raise ValueError(f"{name} must be in (0, 1), got {delta}")


def _check_alpha(alpha: float) -> None:
    if not alpha > 1:
        raise ValueError(f"Renyi order alpha must be > 1, got {alpha}")


@dataclass(frozen=True)
class DpBudget:
    """An (epsilon, delta)-DP guarantee."""

    epsilon: float
    delta: float

    def __post_init__(self):
        if not self.epsilon >= 0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon}")
        if not 0.0 <= self.delta < 1.0:
            raise ValueError(f"delta must be in [0, 1), got {self.delta}")


@dataclass(frozen=True)
class RdpPoint:
    alpha: float
    epsilon: float

    def __post_init__(self):
        _check_alpha(self.alpha)
        if not self.epsilon >= 0:
            raise ValueError(f"RDP epsilon must be >= 0, got {self.epsilon}")


@dataclass(frozen=True)
class RdpCurve:
    """RDP guarantees of one mechanism over an integer grid of orders.

    ``orders`` must be strictly increasing integers >= 2 and ``epsilons`` the
    matching RDP values.
    """

    orders: tuple[int, ...]
    epsilons: tuple[float, ...]

    def __post_init__(self):
        orders = tuple(int(a) for a in self.orders)
        epsilons = tuple(float(e) for e in self.epsilons)
        if not orders:
            raise ValueError("RDP curve needs at least one order")
        if len(orders) != len(epsilons):
            raise ValueError("orders and epsilons differ in length")
        if any(a != b for a, b in zip(orders, self.orders)):
            raise ValueError("orders must be integers")
        if orders[0] < 2 or any(b <= a for a, b in zip(orders, orders[1:])):
            raise ValueError("orders must be strictly increasing integers >= 2")
        if any(not e >= 0 for e in epsilons):
            raise ValueError("RDP epsilons must be >= 0")
        object.__setattr__(self, "orders", orders)
        object.__setattr__(self, "epsilons", epsilons)

    @classmethod
    def constant(cls, epsilon: float, orders: Sequence[int] = DEFAULT_ORDERS) -> "RdpCurve":
        return cls(tuple(orders), (float(epsilon),) * len(orders))

    @property
    def points(self) -> tuple[RdpPoint, ...]:
        return tuple(RdpPoint(a, e) for a, e in zip(self.orders, self.epsilons))

    def __iter__(self) -> Iterator[RdpPoint]:
        return iter(self.points)

    def __len__(self) -> int:
        return len(self.orders)

    def epsilon(self, alpha: int) -> float:
        try:
            return self.epsilons[self.orders.index(alpha)]
        except ValueError:
            raise KeyError(f"order {alpha} not on the grid") from None


@dataclass(frozen=True)
class GaussianMechanismSpec:
    """Gaussian noise of std ``noise_std`` added to a query of L2 sensitivity
    ``sensitivity`` (both in the units of the query output)."""

    sensitivity: float
    noise_std: float

    def __post_init__(self):
        if not self.sensitivity > 0:
            raise ValueError(f"sensitivity must be > 0, got {self.sensitivity}")
        if not self.noise_std > 0:
            raise ValueError(f"noise_std must be > 0, got {self.noise_std}")


def gm_dp_epsilon(spec: GaussianMechanismSpec, delta: float) -> float:
    """Classical (eps, delta) calibration: sqrt(2 ln(1.25/delta)) * df / sigma."""
    _check_delta(delta)
    return math.sqrt(2.0 * math.log(1.25 / delta)) * spec.sensitivity / spec.noise_std


def gm_rdp_epsilon(spec: GaussianMechanismSpec, alpha: float) -> float:
    """RDP of the Gaussian mechanism at order ``alpha``: alpha * df^2 / (2 sigma^2)."""
    _check_alpha(alpha)
    return alpha * spec.sensitivity**2 / (2.0 * spec.noise_std**2)


def rdp_to_dp(point: RdpPoint, delta: float) -> DpBudget:
    _check_delta(delta)
    _check_alpha(point.alpha)
    return DpBudget(point.epsilon + math.log(1.0 / delta) / (point.alpha - 1), delta)


def compose_rdp(per_step: RdpCurve, steps: int) -> RdpCurve:
    """Homogeneous composition of ``steps`` runs of the same mechanism.

    ``steps == 0`` gives the zero curve.
    """
    if steps < 0 or int(steps) != steps:
        raise ValueError(f"steps must be a nonnegative integer, got {steps}")
    eps = np.asarray(per_step.epsilons) * int(steps)
    return RdpCurve(per_step.orders, tuple(eps.tolist()))


def compose_rdp_sequence(curves: Sequence[RdpCurve]) -> RdpCurve:
    """Pointwise sum of heterogeneous RDP curves sharing one grid of orders."""
    if not curves:
        raise ValueError("need at least one curve to compose")
    orders = curves[0].orders
    total = np.zeros(len(orders))
    for curve in curves:
        if curve.orders != orders:
            raise ValueError("cannot compose RDP curves on different order grids")
        total += np.asarray(curve.epsilons)
    return RdpCurve(orders, tuple(total.tolist()))


def advanced_composition(
    eps_step: float, delta_step: float, steps: int, delta_slack: float
) -> DpBudget:
    """Advanced composition of ``steps`` (eps_step, delta_step)-DP mechanisms.

    Returns (eps_step * sqrt(2 T ln(1/delta_slack)) + T eps_step (e^eps_step - 1),
    T * delta_step + delta_slack).
    """
    if not eps_step >= 0:
        raise ValueError(f"eps_step must be >= 0, got {eps_step}")
    if not 0.0 <= delta_step < 1.0:
        raise ValueError(f"delta_step must be in [0, 1), got {delta_step}")
    _check_delta(delta_slack, "delta_slack")
    if steps < 1 or int(steps) != steps:
        raise ValueError(f"steps must be a positive integer, got {steps}")
    eps = eps_step * math.sqrt(2.0 * steps * math.log(1.0 / delta_slack)) + steps * eps_step * math.expm1(
        eps_step
    )
    delta = steps * delta_step + delta_slack
    if delta >= 1.0:
        raise ValueError(f"composed delta {delta} is not below 1")
    return DpBudget(eps, delta)
