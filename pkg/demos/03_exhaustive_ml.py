"""Exhaustive min-bisection at small n and the per-node failure events.

At n <= 24 every balanced partition can be enumerated (up to the global
flip), giving the exact maximum-likelihood answer and exact failure
statistics to compare against the union bound.

Run: python demos/03_exhaustive_ml.py
"""

import math

from sbmx import SbmParams, agreement, generate_sbm, ml_failure_upper_bound
from sbmx.mlexact import estimate_event_probabilities, ml_bisection
from sbmx.seeding import derive_seed

params = SbmParams(16, 4, 1)
print(f"n={params.n}, p={params.p:.4f}, q={params.q:.4f}, f(4,1)={2.5 - 2.0}")

g, truth = generate_sbm(params, seed=1)
res = ml_bisection(g)
print(
    f"one instance: min_cut={res.min_cut}, unique={res.unique}, "
    f"optima={res.optima_count}, agreement with truth={agreement(res.best, truth)}"
)

trials = 300
fails = 0
for t in range(trials):
    g, truth = generate_sbm(params, derive_seed(10, t))
    r = ml_bisection(g)
    fails += not (r.unique and agreement(r.best, truth) == 1.0)
rate = fails / trials
bound = ml_failure_upper_bound(16, 4, 1)
se = math.sqrt(rate * (1 - rate) / trials)
print(f"\nempirical ML failure over {trials} trials: {rate:.4f} (+/- {se:.4f})")
print(f"union bound: {bound:.4f}  (holds: {rate <= bound + 4 * se})")

print("\nper-node failure events (rates over 200 trials)")
rates = estimate_event_probabilities(params, trials=200, seed=3)
print(f"  ml failure:        {rates.ml_failure_rate:.3f}")
print(f"  majority failure:  {rates.majority_failure_rate:.3f}")
print(f"  sparse subset:     {rates.sparse_subset_rate:.3f}")
print(f"  margin event:      {rates.margin_event_rate:.3f}")
print(f"  implication violations (must be 0): {rates.implication_violations}")

print("\nno community signal at alpha = beta: failure becomes the norm")
rates_null = estimate_event_probabilities(SbmParams(16, 4, 4), trials=200, seed=3)
print(f"  ml failure: {rates_null.ml_failure_rate:.3f}, majority failure: {rates_null.majority_failure_rate:.3f}")
