"""
Limiting spectrum of a noisy spiked covariance
==============================================

A population with 70% of its eigenvalues at 0 and 30% at s = 10 is observed
through n = 40 p samples.  Adding white noise of power t shifts both atoms
by t and widens the two eigenvalue bulks until they touch.
"""

import numpy as np

from specsep.spectral import ToyModel, delta_roots, density, support, support_mass
from specsep.svgplot import line_plot

model = ToyModel(c=1 / 40, r=0.3, s=10.0)

# Support intervals: where the discriminant of the cubic is negative.
for t in (0.0, 10.0, 25.0, 30.0):
    sup = support(model, t)
    print(f"t = {t:5.1f}  intervals = {[tuple(round(v, 4) for v in iv) for iv in sup.continuous]}"
          f"  atom at 0 = {sup.zero_atom_mass:.2f}")

# At t = 10 the four sign changes of the discriminant are the bulk edges.
print("edges at t = 10:", np.round(delta_roots(model, 10.0), 6))

# The density integrates to one over the support.
sup = support(model, 10.0)
print("total mass at t = 10:", support_mass(lambda x: density(model, 10.0, x), sup))

# Density curves for a few noise levels, written as a static SVG.
x = np.linspace(0.0, 45.0, 1500)
series = [(f"t = {t:g}", x, density(model, t, x)) for t in (5.0, 10.0, 20.0, 30.0)]
with open("density.svg", "w") as fh:
    fh.write(line_plot(series, "limiting eigenvalue density", "x", "f(x)"))
print("wrote density.svg")
