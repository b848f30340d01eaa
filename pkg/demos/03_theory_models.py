"""The analytical models, evaluated at a few instructive points.

Four questions about optimal mixing with m disjoint width-k masks over a
chi-ary alphabet have closed-form (or nearly closed-form) answers:
how large must the population be, how fast does a correct fragment take
over, how many evaluations does a run cost, and when does a two-layer
model destroy what it built.
"""

from omlab.theory import (
    conv_lower_bound_multi,
    conv_lower_bound_single,
    nfe_bounds,
    required_population,
    reverse_growth,
    success_probability_uniform,
)

# Population sizing: big enough that every mask sees at least one correct
# fragment at initialization, with failure probability alpha.
req = required_population(chi=2, k=5, m=100, alpha=0.1)
print(f"population for 100 five-bit blocks at 90% confidence: "
      f"{req.n:.1f} -> {req.n_ceil}")
print(f"  check: success probability at n={req.n_ceil} is "
      f"{success_probability_uniform(2, 5, 100, req.n_ceil):.5f}")

# Convergence: correct fragments spread like p <- p + p(1-p), which doubles
# the shortfall exponent each generation.
print(f"one mask, n=200: at least {conv_lower_bound_single(200, 2, 5):.2f} "
      f"generations")
bound = conv_lower_bound_multi(10000, 2, 5, m=20)
print(f"twenty masks, n=10000: at least {bound.t_lower:.2f} generations "
      f"(scarcest mask starts with ~{bound.x1:.0f} copies)")

# Evaluation counts: initialization plus, per mask, a per-member constant
# between L(k) and U(k).
model = nfe_bounds(n=2000, m=100, chi=2, k=5)
print(f"evaluations for n=2000, m=100, k=5: "
      f"{model.lower_total:,.0f} .. {model.upper_total:,.0f}")

# Two-layer failure mode: a single-bit mask can flip a correct bit inside a
# solved block without losing fitness.
print("chance a bit-level exchange undoes a correct block bit:")
for k in range(2, 6):
    print(f"  k={k}: {reverse_growth(k).p_rg:.1%}")
