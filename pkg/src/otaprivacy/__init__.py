"""Privacy accounting and simulation for private over-the-air federated learning."""

__version__ = "0.1.0"

from .accountant import (
    DEFAULT_SAMPLING_RATES,
    AccountantConfig,
    PrivacyCurve,
    PrivacyRow,
    act_sweep,
    epsilon_at,
    per_step_curve,
    sweep,
)
from .mechanisms import (
    DpBudget,
    GaussianMechanismSpec,
    RdpCurve,
    RdpPoint,
    advanced_composition,
    compose_rdp,
    compose_rdp_sequence,
    gm_dp_epsilon,
    gm_rdp_epsilon,
    rdp_to_dp,
)
from .sampled import (
    ConditionError,
    SampledGmSpec,
    Thm1Conditions,
    sgm_rdp,
    sgm_rdp_numeric,
    thm1_conditions,
    thm1_rdp,
)
from .simulator import (
    DeviceState,
    ModelState,
    ReceivedSignal,
    RoundDraw,
    SystemConfig,
    Trajectory,
    aggregate,
    clip_gradient,
    device_signal,
    draw_round,
    ps_update,
    run,
    sensitivity,
    transmit_signal,
)
from .tasks import LinearRegressionTask
