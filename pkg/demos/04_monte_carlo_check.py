"""
Finite matrices against the limit
=================================

Simulated spectra at p = 400, n = 16000 are compared with the limiting
law: Kolmogorov-Smirnov distance, empty gap, and the eigenvalue count of
the upper bulk.
"""

from specsep.privacy import SigmaSpec, spike_count
from specsep.simulate import SimConfig, gap_violation_check, ks_distance, mass_split, simulate
from specsep.spectral import ToyModel, support

model = ToyModel(c=1 / 40, r=0.3, s=10.0)
t = 10.0
p, n = 400, 16000

cfg = SimConfig(p, n, SigmaSpec.toy(model.r, model.s, p), t=t, seed=1, trials=5)
spectra = simulate(cfg)
sup = support(model, t)

print("KS distance:", round(ks_distance(spectra, model, t), 4))

gap = gap_violation_check(spectra, sup, margin_frac=0.05)
print("gap window:", tuple(round(v, 4) for v in gap.window), " eigenvalues inside per trial:", gap.counts)

k = spike_count(model.r, p)
print("upper-bulk counts:", [round(mass_split(s, sup)[1] * p) for s in spectra], " expected", k)

# Sub-Gaussian entries give the same limit.
rad = SimConfig(p, n, cfg.sigma, t=t, entry_dist="rademacher", noise_dist="rademacher", seed=1, trials=5)
print("KS distance, Rademacher entries:", round(ks_distance(simulate(rad), model, t), 4))
