"""Synthetic learning tasks for the simulator."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .simulator import DeviceState, SystemConfig, substream


class RegressionData(NamedTuple):
    features: np.ndarray
    targets: np.ndarray

    def __len__(self) -> int:
        return len(self.targets)


@dataclass(frozen=True)
class LinearRegressionTask:
    """Least squares on Gaussian features, ``y = x . w_true + noise``.

    Per-sample loss is ``0.5 (x . w - y)^2`` with gradient ``(x . w - y) x``.
    The task seed is the simulation seed, so one config fixes everything.
    """

    dim: int = 10
    samples_per_device: int = 50
    label_noise_std: float = 0.1

    def __post_init__(self):
        if self.dim < 1 or self.samples_per_device < 1:
            raise ValueError("dim and samples_per_device must be positive")
        if not self.label_noise_std >= 0:
            raise ValueError("label_noise_std must be >= 0")

    def true_weights(self, seed: int) -> np.ndarray:
        return substream(seed, "task").normal(size=self.dim)

    def make_devices(self, config: SystemConfig) -> list[DeviceState]:
        w_true = self.true_weights(config.seed)
        devices = []
        for i in range(config.n_devices):
            rng = substream(config.seed, "data", 0, i)
            x = rng.normal(size=(self.samples_per_device, self.dim))
            y = x @ w_true + self.label_noise_std * rng.normal(size=self.samples_per_device)
            devices.append(DeviceState(i, RegressionData(x, y)))
        return devices

    def initial_weights(self) -> np.ndarray:
        return np.zeros(self.dim)

    def per_sample_gradients(self, w, data: RegressionData, idx) -> np.ndarray:
        x = data.features[idx]
        residual = x @ w - data.targets[idx]
        return residual[:, None] * x

    def loss(self, w, devices: Sequence[DeviceState]) -> float:
        """Mean over devices of each device's mean per-sample loss."""
        per_device = [0.5 * np.mean((d.dataset.features @ w - d.dataset.targets) ** 2) for d in devices]
        return float(np.mean(per_device))

    def optimum(self, devices: Sequence[DeviceState]) -> np.ndarray:
        x = np.vstack([d.dataset.features for d in devices])
        y = np.concatenate([d.dataset.targets for d in devices])
        return np.linalg.lstsq(x, y, rcond=None)[0]

    def to_dict(self) -> dict:
        return {
            "kind": "linear_regression",
            "dim": self.dim,
            "samples_per_device": self.samples_per_device,
            "label_noise_std": self.label_noise_std,
        }
