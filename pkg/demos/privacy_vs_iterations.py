"""
Composite privacy over training iterations
==========================================

Composite epsilon at delta = 1e-5 for several sampling rates with unit noise
multiplier. For s = 1 the advanced composition theorem is shown as well.
The same numbers come out of::

    otaprivacy account sweep --config demos/configs/rates.json --out rates.csv
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from otaprivacy import DEFAULT_SAMPLING_RATES, AccountantConfig, act_sweep, sweep

fig, ax = plt.subplots(figsize=(6, 4))
for rate in DEFAULT_SAMPLING_RATES:
    curve = sweep(AccountantConfig(rate, 1.0, 1e-5, t_max=1000))
    ax.plot([r.t for r in curve.rows], curve.epsilons, label=f"pq = {rate}")
    print(f"pq={rate:<5} eps(100)={curve.epsilon(100):8.3f}  eps(1000)={curve.epsilon(1000):9.3f}")

act = act_sweep(AccountantConfig(1.0, 1.0, 1e-5, t_max=1000))
ax.plot([r.t for r in act.rows], act.epsilons, "k--", label="pq = 1 (act)")

ax.set_yscale("log")
ax.set_xlabel("iteration")
ax.set_ylabel("epsilon")
ax.legend()
fig.tight_layout()
fig.savefig("privacy_vs_iterations.png", dpi=120)
