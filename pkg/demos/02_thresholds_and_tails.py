"""The recovery threshold and the exact tail machinery behind it.

Exact recovery is possible iff f(alpha, beta) = (alpha+beta)/2 - sqrt(alpha*beta)
exceeds 1. The quantity controlling both directions is the tail of a difference
of binomials, computed here exactly in log space.

Run: python demos/02_thresholds_and_tails.py
"""

import math

from sbmx import (
    diff_binomial_tail,
    dominant_tilt,
    log_dominant_term_max,
    mislabel_exponent,
    ml_failure_upper_bound,
    node_margin_tail,
    recovery_threshold,
    tail_exponent,
)

print("threshold verdicts")
for alpha, beta in ((9, 1), (5, 1), (4, 4), (30, 1)):
    v = recovery_threshold(alpha, beta)
    print(f"  f({alpha},{beta}) = {v.f_value:8.4f}  recoverable={v.recoverable}")

print()
print("exact tails P(Z - W >= s), Z ~ Bin(mz, q), W ~ Bin(mw, p)")
for mz, mw, p, q, s in ((50, 50, 0.1, 0.05, 0), (50, 50, 0.1, 0.05, 2), (2, 2, 0.1, 0.2, 1)):
    r = diff_binomial_tail(mz, mw, p, q, s)
    print(f"  (mz={mz}, mw={mw}, p={p}, q={q}, s={s}): {r.probability:.6e} [{r.method}]")

print()
print("tails at graph scale: certified truncation keeps this exact to ~1e-15")
for n in (10_000, 100_000, 1_000_000):
    p = 4 * math.log(n) / n
    q = 1 * math.log(n) / n
    r = diff_binomial_tail(n // 2, n // 2, p, q, 0)
    ratio = -r.log_probability / math.log(n)
    print(
        f"  n={n:>9}: log T = {r.log_probability:9.4f}, -log T/log n = {ratio:.4f}"
        f" (limit {recovery_threshold(4, 1).f_value}), trunc err <= {r.truncation_error_bound:.1e}"
    )
print("  the normalized exponent approaches f(4,1) = 0.5 from above, slowly:")
print("  the finite-size correction is order loglog(n)/log(n)")

print()
print("dominant-term exponents")
print(f"  tilt tau*(4,1,0) = {dominant_tilt(4, 1, 0)}  (sqrt(alpha*beta))")
print(f"  exponent g(4,1,0) = {tail_exponent(4, 1, 0)}  (= 2 f(4,1))")
print(f"  max log-term at n=1e6, m=n/2: {log_dominant_term_max(500_000, 1_000_000, 4, 1, 0):.4f}")

print()
print("per-node margin event probability (drives the impossibility direction)")
for n in (16, 100, 1000):
    r = node_margin_tail(n, 5, 1)
    print(f"  n={n:>5}: rho = {r.probability:.4e}")

print()
print("union bound on exhaustive min-bisection failure at n=16, beta=1")
for alpha in (3, 4, 5):
    print(f"  alpha={alpha}: bound = {ml_failure_upper_bound(16, alpha, 1):.4f}")

print()
print("mislabeling exponent after local flips, as corruption shrinks")
for dc in (0.2, 0.1, 0.01, 1e-6):
    print(f"  deltaC={dc:>7}: exponent = {mislabel_exponent(4, 1, dc):.4f} (limit {tail_exponent(4, 1, 0)})")
