"""Simulation of private federated learning over a Gaussian multiple-access channel.

One round of the protocol:

1. every device joins independently with probability ``p``; every local sample
   of a participant joins its batch independently with probability ``q``;
2. each participant clips its per-sample gradients to norm ``L``, scales their
   sum by ``1 / b_t`` (``b_t`` = total batch size over all participants), adds
   its share ``n_i / sqrt(a_t)`` of the privacy noise and pre-inverts the
   channel gain it *believes* it has, ``k * c``;
3. the server receives ``sum_i c_i x_i + z`` and takes an SGD step.

Because the gradient part is scaled by the global ``b_t`` and the noise shares
by ``1 / sqrt(a_t)``, the received signal has the same power whatever the
number or identity of the transmitters. The noise shares always add up to
variance ``sigma^2``.

Randomness comes from independent named substreams of one root seed, keyed by
(purpose, round, device), so results do not depend on evaluation order.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Sequence

import numpy as np

from .accountant import epsilon_at, per_step_curve
from .mechanisms import DpBudget, RdpCurve, compose_rdp_sequence
from .sampled import SampledGmSpec

PURPOSES = ("participation", "batching", "device-noise", "channel-noise", "channel-gain", "data", "task")
ACCOUNTING_MODES = ("nominal", "realized")
GAIN_MODELS = ("constant", "lognormal")


def substream(seed: int, purpose: str, round_: int = 0, device: int = 0) -> np.random.Generator:
    """Independent generator for one (purpose, round, device) triple."""
    key = (PURPOSES.index(purpose), int(round_), int(device))
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=key))


@dataclass(frozen=True)
class SystemConfig:
    """Protocol parameters.

    ``noise_multiplier`` is the sigma' charged per round in ``"nominal"``
    accounting mode; when None it is derived as ``sigma * E[b_t] / (2 L)`` with
    ``E[b_t] = p q * (total number of samples)`` once the devices are known.
    """

    n_devices: int
    participation_prob: float
    batch_prob: float
    clip_norm: float
    device_noise_std: float
    channel_noise_var: float
    learning_rate: float
    rounds: int
    csi_factor: float = 1.0
    seed: int = 0
    delta: float = 1e-5
    accounting_mode: str = "nominal"
    noise_multiplier: float | None = None
    alpha_min: int = 2
    alpha_max: int = 64
    gain_model: str = "constant"
    gain_sigma: float = 0.5

    def __post_init__(self):
        if not (isinstance(self.n_devices, int) and self.n_devices >= 1):
            raise ValueError(f"n_devices must be a positive integer, got {self.n_devices}")
        for name in ("participation_prob", "batch_prob"):
            v = getattr(self, name)
            if not 0.0 < v <= 1.0:
                raise ValueError(f"{name} must be in (0, 1], got {v}")
        for name in ("clip_norm", "device_noise_std", "learning_rate"):
            v = getattr(self, name)
            if not v > 0:
                raise ValueError(f"{name} must be > 0, got {v}")
        if not self.channel_noise_var >= 0:
            raise ValueError(f"channel_noise_var must be >= 0, got {self.channel_noise_var}")
        if not (isinstance(self.rounds, int) and self.rounds >= 1):
            raise ValueError(f"rounds must be a positive integer, got {self.rounds}")
        if not 0.0 < self.csi_factor <= 1.0:
            raise ValueError(f"csi_factor must be in (0, 1], got {self.csi_factor}")
        if not (isinstance(self.seed, int) and self.seed >= 0):
            raise ValueError(f"seed must be a nonnegative integer, got {self.seed}")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must be in (0, 1), got {self.delta}")
        if self.accounting_mode not in ACCOUNTING_MODES:
            raise ValueError(f"accounting_mode must be one of {ACCOUNTING_MODES}")
        if self.noise_multiplier is not None and not self.noise_multiplier > 0:
            raise ValueError(f"noise_multiplier must be > 0, got {self.noise_multiplier}")
        if not 2 <= self.alpha_min <= self.alpha_max:
            raise ValueError("need 2 <= alpha_min <= alpha_max")
        if self.gain_model not in GAIN_MODELS:
            raise ValueError(f"gain_model must be one of {GAIN_MODELS}")
        if not self.gain_sigma >= 0:
            raise ValueError(f"gain_sigma must be >= 0, got {self.gain_sigma}")

    @property
    def sampling_rate(self) -> float:
        return self.participation_prob * self.batch_prob

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class DeviceState:
    device_id: int
    dataset: Any
    channel_gain: float = 1.0

    def __post_init__(self):
        if len(self.dataset) == 0:
            raise ValueError(f"device {self.device_id} has an empty dataset")
        if not self.channel_gain > 0:
            raise ValueError(f"channel gain must be > 0, got {self.channel_gain}")


@dataclass(frozen=True)
class RoundDraw:
    """Who transmits in a round and with which samples.

    ``a`` and ``b_total`` are shared among devices but hidden from the server.
    """

    participants: frozenset[int]
    batches: dict[int, np.ndarray]
    a: int
    b_total: int

    def __post_init__(self):
        if self.a != len(self.participants):
            raise ValueError("a must equal the number of participants")
        if set(self.batches) != set(self.participants):
            raise ValueError("batches must be keyed by exactly the participants")
        if self.b_total != sum(len(b) for b in self.batches.values()):
            raise ValueError("b_total must equal the total batch size")

    @classmethod
    def from_batches(cls, batches: dict[int, Sequence[int]]) -> "RoundDraw":
        batches = {i: np.asarray(sorted(b), dtype=int) for i, b in batches.items()}
        return cls(frozenset(batches), batches, len(batches), sum(len(b) for b in batches.values()))


@dataclass(frozen=True)
class ModelState:
    weights: np.ndarray
    round: int = 0


@dataclass(frozen=True)
class Transmission:
    """A device's channel input together with its unscaled components."""

    value: np.ndarray
    gradient_part: np.ndarray
    noise_part: np.ndarray
    precoder: float


@dataclass(frozen=True)
class ReceivedSignal:
    """What the server receives, plus a decomposition visible only to the simulator.

    The parts are at received scale, so ``value == signal_part +
    device_noise_part + channel_noise_part`` up to rounding. With honest CSI
    (k = 1) ``signal_part`` is the clipped-gradient average and
    ``device_noise_part`` has per-coordinate variance sigma^2; a manipulated
    CSI factor k scales both by 1/k.
    """

    value: np.ndarray
    signal_part: np.ndarray | None = None
    device_noise_part: np.ndarray | None = None
    channel_noise_part: np.ndarray | None = None


@dataclass(frozen=True)
class TrajectoryRow:
    round: int
    loss: float
    budget: DpBudget
    a: int
    b_total: int


@dataclass
class Trajectory:
    config: SystemConfig
    noise_multiplier: float
    rows: list[TrajectoryRow] = field(default_factory=list)

    @property
    def losses(self) -> np.ndarray:
        return np.array([r.loss for r in self.rows])

    @property
    def epsilons(self) -> np.ndarray:
        return np.array([r.budget.epsilon for r in self.rows])


def clip_gradient(grad, clip_norm: float) -> np.ndarray:
    """Scale ``grad`` down to L2 norm ``clip_norm`` if it is longer; never scale up.

    A 2-d input is treated as a stack of per-sample gradients (one per row).
    """
    if not clip_norm > 0:
        raise ValueError(f"clip_norm must be > 0, got {clip_norm}")
    grad = np.asarray(grad, dtype=float)
    norms = np.linalg.norm(grad, axis=-1, keepdims=True)
    with np.errstate(divide="ignore", over="ignore"):
        scale = np.where(norms > clip_norm, clip_norm / norms, 1.0)
    return grad * scale


def sensitivity(clip_norm: float, b_total: int) -> float:
    """L2 sensitivity 2L/b_t of the clipped-gradient average."""
    if not clip_norm > 0:
        raise ValueError(f"clip_norm must be > 0, got {clip_norm}")
    if b_total < 1:
        raise ValueError(f"b_total must be >= 1, got {b_total}")
    return 2.0 * clip_norm / b_total


def draw_channel_gains(config: SystemConfig, devices: Sequence[DeviceState], round_: int) -> list[DeviceState]:
    """Devices with this round's channel gains filled in."""
    if config.gain_model == "constant":
        return [replace(d, channel_gain=1.0) for d in devices]
    out = []
    for d in devices:
        rng = substream(config.seed, "channel-gain", round_, d.device_id)
        out.append(replace(d, channel_gain=float(rng.lognormal(0.0, config.gain_sigma))))
    return out


def draw_round(config: SystemConfig, devices: Sequence[DeviceState], round_: int) -> RoundDraw:
    p, q = config.participation_prob, config.batch_prob
    batches = {}
    for d in devices:
        if substream(config.seed, "participation", round_, d.device_id).random() < p:
            keep = substream(config.seed, "batching", round_, d.device_id).random(len(d.dataset)) < q
            batches[d.device_id] = np.flatnonzero(keep)
    return RoundDraw.from_batches(batches)


def transmit_signal(
    clipped_sum,
    b_total: int,
    a: int,
    channel_gain: float,
    config: SystemConfig,
    rng: np.random.Generator,
) -> Transmission:
    """Channel input ``h (clipped_sum / b_t + n / sqrt(a))`` with ``h = 1 / (k c)``.

    ``clipped_sum`` may carry leading batch axes; fresh noise is drawn for
    every entry. A device with nothing to contribute (``b_total == 0``) sends
    its noise share alone.
    """
    if a < 1:
        raise ValueError("a transmitting device implies a >= 1")
    clipped_sum = np.asarray(clipped_sum, dtype=float)
    if b_total >= 1:
        gradient_part = clipped_sum / b_total
    elif np.any(clipped_sum):
        raise ValueError("nonzero gradient sum with b_total = 0")
    else:
        gradient_part = np.zeros_like(clipped_sum)
    noise_part = rng.normal(0.0, config.device_noise_std, size=clipped_sum.shape) / math.sqrt(a)
    precoder = 1.0 / (config.csi_factor * channel_gain)
    return Transmission(precoder * (gradient_part + noise_part), gradient_part, noise_part, precoder)


def device_transmission(
    draw: RoundDraw,
    device: DeviceState,
    model: ModelState,
    config: SystemConfig,
    task,
    rng: np.random.Generator | None = None,
) -> Transmission:
    if device.device_id not in draw.participants:
        raise ValueError(f"device {device.device_id} is not participating")
    if rng is None:
        rng = substream(config.seed, "device-noise", model.round + 1, device.device_id)
    idx = draw.batches[device.device_id]
    dim = np.shape(model.weights)
    if len(idx):
        grads = task.per_sample_gradients(model.weights, device.dataset, idx)
        clipped_sum = clip_gradient(grads, config.clip_norm).sum(axis=0)
    else:
        clipped_sum = np.zeros(dim)
    return transmit_signal(clipped_sum, draw.b_total, draw.a, device.channel_gain, config, rng)


def device_signal(
    draw: RoundDraw,
    device: DeviceState,
    model: ModelState,
    config: SystemConfig,
    task,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Channel input of one participating device for the current model."""
    return device_transmission(draw, device, model, config, task, rng).value


def aggregate(
    signals: Sequence,
    channel_gains: Sequence[float],
    config: SystemConfig,
    rng: np.random.Generator,
    shape=None,
) -> ReceivedSignal:
    """Superpose ``sum_i c_i x_i`` and add channel noise of variance N0.

    ``signals`` holds either raw vectors or ``Transmission`` objects; with
    the latter the result carries its decomposition. ``shape`` is required
    only when nobody transmits.
    """
    if len(signals) != len(channel_gains):
        raise ValueError("signals and channel gains are not aligned")
    if not signals and shape is None:
        raise ValueError("shape is needed to receive pure channel noise")
    if shape is None:
        first = signals[0]
        shape = np.shape(first.value if isinstance(first, Transmission) else first)
    z = rng.normal(0.0, math.sqrt(config.channel_noise_var), size=shape)
    total = np.zeros(shape)
    decomposed = all(isinstance(s, Transmission) for s in signals)
    sig_part = np.zeros(shape)
    noise_part = np.zeros(shape)
    for x, c in zip(signals, channel_gains):
        if isinstance(x, Transmission):
            total = total + c * x.value
            sig_part = sig_part + c * x.precoder * x.gradient_part
            noise_part = noise_part + c * x.precoder * x.noise_part
        else:
            total = total + c * np.asarray(x, dtype=float)
    value = total + z
    if decomposed:
        return ReceivedSignal(value, sig_part, noise_part, z)
    return ReceivedSignal(value, channel_noise_part=z)


def ps_update(model: ModelState, received: ReceivedSignal, eta: float) -> ModelState:
    w = np.asarray(model.weights, dtype=float)
    y = np.asarray(received.value, dtype=float)
    if w.shape != y.shape:
        raise ValueError(f"dimension mismatch: weights {w.shape} vs received {y.shape}")
    return ModelState(w - eta * y, model.round + 1)


def nominal_noise_multiplier(config: SystemConfig, devices: Sequence[DeviceState]) -> float:
    if config.noise_multiplier is not None:
        return config.noise_multiplier
    expected_b = config.sampling_rate * sum(len(d.dataset) for d in devices)
    return config.device_noise_std * expected_b / (2.0 * config.clip_norm)


def _zero_curve(config: SystemConfig) -> RdpCurve:
    return RdpCurve.constant(0.0, range(config.alpha_min, config.alpha_max + 1))


def run(config: SystemConfig, task, devices: Sequence[DeviceState] | None = None) -> Trajectory:
    """Train for ``config.rounds`` rounds and account privacy after each.

    The first row (round 0) holds the initial loss and a zero budget. Channel
    noise is never credited in the accounting, so the budget does not depend
    on the CSI factor k.
    """
    if devices is None:
        devices = task.make_devices(config)
    # Fixed summation order at the aggregation barrier keeps runs bit-reproducible.
    devices = sorted(devices, key=lambda d: d.device_id)
    model = ModelState(task.initial_weights(), 0)
    sigma_nominal = nominal_noise_multiplier(config, devices)
    s = config.sampling_rate
    nominal_curve = per_step_curve(SampledGmSpec(s, sigma_nominal), config.alpha_min, config.alpha_max)
    realized = _zero_curve(config)
    data_touched = False

    traj = Trajectory(config, sigma_nominal)
    traj.rows.append(TrajectoryRow(0, float(task.loss(model.weights, devices)), DpBudget(0.0, config.delta), 0, 0))
    for t in range(1, config.rounds + 1):
        live = draw_channel_gains(config, devices, t)
        draw = draw_round(config, live, t)
        tx = [
            device_transmission(draw, d, model, config, task, substream(config.seed, "device-noise", t, d.device_id))
            for d in live
            if d.device_id in draw.participants
        ]
        gains = [d.channel_gain for d in live if d.device_id in draw.participants]
        received = aggregate(
            tx, gains, config, substream(config.seed, "channel-noise", t), shape=np.shape(model.weights)
        )
        model = ps_update(model, received, config.learning_rate)

        if config.accounting_mode == "nominal":
            eps, _ = epsilon_at(nominal_curve, t, config.delta)
        else:
            if draw.b_total >= 1:
                sigma_t = config.device_noise_std * draw.b_total / (2.0 * config.clip_norm)
                step = per_step_curve(SampledGmSpec(s, sigma_t), config.alpha_min, config.alpha_max)
                realized = compose_rdp_sequence([realized, step])
                data_touched = True
            eps = epsilon_at(realized, 1, config.delta)[0] if data_touched else 0.0
        loss = float(task.loss(model.weights, devices))
        traj.rows.append(TrajectoryRow(t, loss, DpBudget(eps, config.delta), draw.a, draw.b_total))
    return traj
