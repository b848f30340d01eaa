"""Bisection population sizing, and the cost of a two-layer model.

The bisection procedure doubles the population until ten consecutive seeded
runs all succeed, then binary-searches the threshold.  Doing this for a
two-layer model (wide masks plus all single bits) and dividing by the
single-bit theory curve shows how much extra population the bit layer's
destructive exchanges demand.

Takes roughly a minute at this toy scale.
"""

from omlab.experiments import BisectionConfig, bisect_min_population, two_layer_ratio_fit
from omlab.fos import make_homogeneous_fos
from omlab.problems import make_problem

cfg = BisectionConfig(repeats=10, base_seed=7)

# Minimal populations for a trap with matched masks vs onemax with bits.
for kind, ell, k in [("onemax", 40, 1), ("trap", 40, 5)]:
    problem = make_problem(kind, ell, None if kind == "onemax" else k)
    n_min = bisect_min_population(problem, make_homogeneous_fos(ell, k), cfg)
    print(f"{kind:>8} ell={ell} mask width {k}: minimal population {n_min}")

# Fit the two-layer requirement as a constant multiple of the single-bit
# supply curve.  More samples per point would tighten the noisy estimates.
fits, rows = two_layer_ratio_fit([20, 40, 80], [2, 4], cfg, samples=5)
for fit in fits:
    print(f"two-layer k={fit.k}: c = {fit.c_k:.3f} "
          f"(max relative error {fit.max_rel_err:.1%})")
