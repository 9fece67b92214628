"""
Renyi DP of the subsampled Gaussian mechanism
=============================================

Poisson subsampling with rate s shrinks the RDP of a Gaussian mechanism.
Here the exact integer-order series is compared with the closed-form bound
2 s^2 alpha / sigma^2, which only applies inside a validity region.
"""

import numpy as np

from otaprivacy import SampledGmSpec, sgm_rdp_numeric, thm1_conditions, thm1_rdp

# Without sampling we get back the plain Gaussian mechanism, alpha / (2 sigma^2).
print(sgm_rdp_numeric(SampledGmSpec(1.0, 1.0), 8), 8 / 2)

# With a small rate and enough noise the closed form applies and is an upper bound.
spec = SampledGmSpec(0.01, 4.0)
for alpha in (2, 8, 16, 32):
    conds = thm1_conditions(spec, alpha)
    exact = sgm_rdp_numeric(spec, alpha)
    bound = thm1_rdp(spec, alpha) if conds.all() else float("nan")
    print(f"alpha={alpha:2d}  exact={exact:.3e}  bound={bound:.3e}  conditions={conds}")

# Outside the region (sigma < 4) only the numeric route is available.
spec = SampledGmSpec(0.01, 1.0)
print("noise_ok:", thm1_conditions(spec, 2).noise_ok)
orders = np.arange(2, 65)
eps = [sgm_rdp_numeric(spec, int(a)) for a in orders]
print("RDP at s=0.01, sigma=1 for alpha = 2, 16, 64:", eps[0], eps[14], eps[-1])
