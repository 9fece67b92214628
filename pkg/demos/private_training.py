"""
Private federated training on synthetic linear regression
=========================================================

Runs the full protocol and reports loss and the accounted (epsilon, delta)
after each round. "nominal" accounting charges a fixed noise multiplier every
round; "realized" uses each round's actual batch size b_t.
"""

from otaprivacy import LinearRegressionTask, SystemConfig, run

task = LinearRegressionTask(dim=10, samples_per_device=50)
base = dict(
    n_devices=20, participation_prob=0.5, batch_prob=0.2, clip_norm=1.0,
    device_noise_std=0.05, channel_noise_var=0.01, learning_rate=0.1, rounds=200, seed=0,
)

for mode in ("nominal", "realized"):
    traj = run(SystemConfig(accounting_mode=mode, **base), task)
    last = traj.rows[-1]
    print(
        f"{mode:9s} sigma'={traj.noise_multiplier:.2f}  loss {traj.losses[0]:.3f} -> {last.loss:.4f}  "
        f"eps={last.budget.epsilon:.3f} at delta={last.budget.delta:g}"
    )

# The channel noise and the CSI factor never enter the accounting.
attacked = run(SystemConfig(accounting_mode="nominal", **{**base, "csi_factor": 0.3}), task)
print("eps with k=0.3 equals k=1:", attacked.epsilons[-1] == run(SystemConfig(**base), task).epsilons[-1])
