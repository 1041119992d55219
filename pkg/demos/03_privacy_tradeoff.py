"""
Privacy against utility
=======================

Each respondent's record leaks information through the noisy release.  The
leakage falls with the noise power, and so does the spectral-gap utility.
g(eps) is the best utility compatible with leakage at most eps.
"""

import numpy as np

from specsep.privacy import (
    SigmaSpec,
    g_it,
    i_mmse_residual,
    noise_non_gaussianity,
    p_et_toy,
    p_it_toy,
)
from specsep.spectral import ToyModel
from specsep.utility import t_star

model = ToyModel(c=1 / 40, r=0.3, s=10.0)
p = 50

# Closed forms for the two-level spectrum (mutual information in nats).
print("P_IT(t=10) =", p_it_toy(model.r, model.s, p, 10.0), "=", 7.5 * np.log(2))
print("P_ET(t=10) =", p_et_toy(model.r, model.s, p, 10.0))
print("I-MMSE residual:", i_mmse_residual(model.r, model.s, p, 10.0))

# Below eps* the noise needed is beyond t*, so no gap survives.
eps_star = p_it_toy(model.r, model.s, p, t_star(model))
print(f"eps* = {eps_star:.6f} nats")
for eps in (1.0, 2.0, eps_star, 3.0, 6.0, 12.0):
    print(f"g_IT({eps:8.5f}) = {g_it(model, p, eps):.6f}")

# Non-Gaussian noise: per-entry divergence from the Gaussian of equal variance.
for law in ("laplace", "uniform", "rademacher_smoothed"):
    print(f"D({law}) = {noise_non_gaussianity(law):.5f} nats")

sigma = SigmaSpec.toy(model.r, model.s, p)
print("trace of the toy covariance:", sigma.trace)
