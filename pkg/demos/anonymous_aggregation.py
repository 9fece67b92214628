"""
Anonymity and robustness of the over-the-air aggregate
======================================================

Devices scale their clipped gradients by the total batch size b_t and their
noise by 1/sqrt(a_t). The server then sees the same distribution whether ten
samples come from one device or from five, and the noise always has variance
sigma^2. Every trial below is one row of a (trials, d) array.
"""

import numpy as np

from otaprivacy import SystemConfig, aggregate, transmit_signal

cfg = SystemConfig(
    n_devices=5, participation_prob=0.5, batch_prob=0.5, clip_norm=1.0,
    device_noise_std=1.0, channel_noise_var=0.5, learning_rate=0.1, rounds=1,
)
rng = np.random.default_rng(0)
trials = 100_000
grads = rng.normal(size=(10, 2)) * 0.2


def receive(sums, config=cfg):
    tx = [transmit_signal(np.tile(g, (trials, 1)), 10, len(sums), 1.0, config, rng) for g in sums]
    return aggregate(tx, [1.0] * len(sums), config, rng)


# Same ten samples on one device, or two each on five devices.
one = receive([grads.sum(axis=0)])
five = receive([grads[i:i + 2].sum(axis=0) for i in range(0, 10, 2)])
print("mean  1x10:", one.value.mean(axis=0), " 5x2:", five.value.mean(axis=0))
print("var   1x10:", one.value.var(axis=0), " 5x2:", five.value.var(axis=0))

# Device noise always totals sigma^2; losing one of a+1 devices keeps a/(a+1) of it.
print("device noise variance (5 devices):", five.device_noise_part.var(axis=0))

# A pilot attack (k < 1) inflates signal and noise alike, so the ratio is unchanged.
attacked = receive([grads.sum(axis=0)], SystemConfig(**{**cfg.to_dict(), "csi_factor": 0.5}))
print("signal part, attacked / honest:", attacked.signal_part[0] / one.signal_part[0])
print("device noise std, attacked / honest:", attacked.device_noise_part.std() / one.device_noise_part.std())
