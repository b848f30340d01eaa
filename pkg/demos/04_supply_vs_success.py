"""Initial supply predicts success: a small theory-vs-simulation sweep.

With disjoint structure-matching masks and no mutation, a run succeeds
exactly when the random initial population contains every optimal fragment
at least once.  The success probability therefore has a closed form, and
the empirical rate should track it at every population size.

Runs a few hundred seeds; takes on the order of ten seconds.
"""

from omlab.experiments import sweep_success_rate
from omlab.theory import required_population

ELL, K, REPEATS = 100, 5, 300

rows = sweep_success_rate(
    ell=ELL, k=K, n_grid=[60, 90, 120, 180, 260], repeats=REPEATS, base_seed=2024
)

print(f"onemax, ell={ELL}, width-{K} masks, {REPEATS} runs per point")
print(f"{'n':>5} {'empirical':>10} {'theory':>8}")
for row in rows:
    print(f"{row['n']:>5} {row['success_rate']:>10.3f} {row['theory_eq4']:>8.3f}")

req = required_population(2, K, ELL // K, alpha=0.1)
print(f"theory puts the 90% point at n = {req.n_ceil}")
