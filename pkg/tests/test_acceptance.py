"""Acceptance gate: one test per criterion, each printing a pass/fail line.

Criteria are implemented at their stated parameters and tolerances, with no
recalibration. Four of them fail by construction at desk scale: two request
edge or splitting probabilities above 1 (criteria 6 and 8), and two encode
asymptotic windows that the stated sizes have not reached (criteria 2 and 4).
Their failure messages carry the measured values; the underlying phenomena
are demonstrated at feasible parameters in the module test suites.
"""

import math
import time

import numpy as np

from conftest import ACCEPTANCE_LINES, naive_min_bisection

from sbmx.harness import phase_diagram
from sbmx.mlexact import ml_bisection
from sbmx.model import (
    SbmParams,
    agreement,
    cut_size,
    generate_sbm,
    parse_graph,
    parse_labeling,
    write_graph,
    write_labeling,
)
from sbmx.sdp import (
    SdpConfig,
    certificate_check,
    expected_certificate_matrix,
    sbm_laplacian,
    sdp_solve,
    signed_adjacency,
)
from sbmx.seeding import derive_seed
from sbmx.tails import (
    diff_binomial_tail,
    dominant_tilt,
    ml_failure_upper_bound,
    recovery_threshold,
    tail_exponent,
    tilt_objective,
)
from sbmx.twophase import CheatingOracle, SplitConfig, split_graph, two_phase_recover


def report(number: int, ok: bool, detail: str) -> str:
    line = f"ACCEPTANCE {number}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return line


def test_criterion_1_expected_certificate_spectrum():
    """Closed-form spectrum of the expected certificate matrix, 1e-8 abs."""
    start = time.time()
    worst = 0.0
    for n, alpha, beta in ((20, 5, 1), (100, 5, 1), (300, 30, 1)):
        mat = expected_certificate_matrix(SbmParams(n, alpha, beta))
        got = np.sort(np.linalg.eigvalsh(mat))
        log_n = math.log(n)
        expected = np.sort(
            np.concatenate([[n - 2 * beta * log_n, 0.0], np.full(n - 2, (alpha - beta) * log_n)])
        )
        worst = max(worst, float(np.max(np.abs(got - expected))))
    elapsed = time.time() - start
    ok = worst < 1e-8 and elapsed < 5.0
    line = report(1, ok, f"spectrum max abs err {worst:.2e} (tol 1e-8), {elapsed:.2f}s (<5s)")
    assert ok, line


def test_criterion_2_phase_diagram_reproduction():
    """Certificate sweep at n=300, 20 trials: strong region up, sub-threshold
    region down, one exception allowed per region."""
    start = time.time()
    alphas = list(range(2, 41, 2))
    betas = list(range(0, 11))
    points = phase_diagram("certificate", 300, alphas, betas, trials=20, base_seed=20240917, workers=2)
    elapsed = time.time() - start

    strong_viol = []
    fail_viol = []
    for pt in points:
        a, b = pt.alpha, pt.beta
        if (a - b) ** 2 >= 1.5 * (8 * (a + b) + (8 / 3) * (a - b)):
            if pt.rate < 0.9:
                strong_viol.append((a, b, pt.rate))
        if recovery_threshold(a, b).f_value <= 0.8:
            if pt.rate > 0.1:
                fail_viol.append((a, b, pt.rate))
    ok = len(strong_viol) <= 1 and len(fail_viol) <= 1 and elapsed < 1800
    detail = (
        f"strong-region violations {strong_viol or 'none'} (<=1), "
        f"sub-threshold violations {fail_viol or 'none'} (<=1), {elapsed:.0f}s. "
    )
    if len(fail_viol) > 1:
        detail += (
            "The sub-threshold window f<=0.8 is genuinely violated at n=300: the "
            "finite-size transition is wider than 20% below threshold at moderate "
            "beta (certificate implies unique min-bisection optimum, so these rates "
            "are real successes, not an artifact); see /root/notes/decisions.md."
        )
    line = report(2, ok, detail)
    assert ok, line


def test_criterion_3_exact_tail_vs_monte_carlo():
    """diff_binomial_tail(50,50,0.1,0.05,s) within 4 SE of 1e6 samples."""
    start = time.time()
    rng = np.random.default_rng(31415)
    samples = 1_000_000
    z = rng.binomial(50, 0.05, samples)
    w = rng.binomial(50, 0.1, samples)
    deltas = []
    ok = True
    for s in (0, 1, 2):
        exact = diff_binomial_tail(50, 50, 0.1, 0.05, s).probability
        rate = float(np.count_nonzero(z - w >= s)) / samples
        se = math.sqrt(max(rate * (1 - rate), 1e-12) / samples)
        deltas.append(abs(exact - rate) / se)
        ok &= abs(exact - rate) <= 4 * se
    elapsed = time.time() - start
    ok = ok and elapsed < 60
    line = report(3, ok, f"deviations {['%.2f' % d for d in deltas]} SE (<=4), {elapsed:.1f}s (<60s)")
    assert ok, line


def test_criterion_4_exponent_sandwich():
    """-log T(n/2,p,q,0)/log n within 20% of f(4,1)=0.5 and monotone."""
    start = time.time()
    f_target = recovery_threshold(4, 1).f_value
    ratios = []
    for n in (10_000, 100_000, 1_000_000):
        p = 4 * math.log(n) / n
        q = 1 * math.log(n) / n
        res = diff_binomial_tail(n // 2, n // 2, p, q, 0)
        ratios.append(-res.log_probability / math.log(n))
    deviations = [abs(r - f_target) for r in ratios]
    in_window = all(0.8 * f_target <= r <= 1.2 * f_target for r in ratios)
    monotone = deviations[0] > deviations[1] > deviations[2]
    elapsed = time.time() - start
    ok = in_window and monotone and elapsed < 120
    detail = (
        f"ratios {['%.4f' % r for r in ratios]} vs window [0.40, 0.60], "
        f"monotone shrink {monotone}, {elapsed:.1f}s. "
    )
    if not in_window:
        detail += (
            "The window is unreachable at these sizes: the o(1) term of the tail "
            "exponent is still 0.14-0.19 here (it needs n ~ 1e12); values verified "
            "against brute-force convolution and Monte Carlo. See /root/notes/decisions.md."
        )
    line = report(4, ok, detail)
    assert ok, line


def test_criterion_5_ml_oracle_equivalence():
    """Exhaustive min-bisection matches an independent naive enumerator."""
    start = time.time()
    sizes = [6, 8, 10]
    mismatches = 0
    graphs = 0
    for idx in range(200):
        n = sizes[idx % 3]
        g, _ = generate_sbm(SbmParams(n, 2.5, 1.0), derive_seed(555, idx))
        res = ml_bisection(g)
        labels, cut, optima = naive_min_bisection(g)
        same = (
            res.min_cut == cut
            and res.optima_count == optima
            and agreement(res.best, labels) == 1.0
        )
        mismatches += not same
        graphs += 1
    elapsed = time.time() - start
    ok = mismatches == 0 and elapsed < 60
    line = report(5, ok, f"{graphs} graphs, {mismatches} mismatches (exact match required), {elapsed:.1f}s (<60s)")
    assert ok, line


def test_criterion_6_ml_union_bound():
    """Empirical ML failure at n=16, beta=1, alpha in {4, 8} vs the union bound."""
    start = time.time()
    trials = 400
    parts = []
    ok = True
    for alpha in (4, 8):
        try:
            params = SbmParams(16, alpha, 1)
        except ValueError as exc:
            ok = False
            parts.append(
                f"alpha={alpha}: infeasible ({exc}); p>1 cannot be run without "
                f"clamping, which the model forbids; see /root/notes/decisions.md"
            )
            continue
        bound = ml_failure_upper_bound(16, alpha, 1)
        fails = 0
        for t in range(trials):
            g, truth = generate_sbm(params, derive_seed(777000 + alpha, t))
            res = ml_bisection(g)
            fails += not (res.unique and agreement(res.best, truth) == 1.0)
        rate = fails / trials
        se = math.sqrt(max(rate * (1 - rate), 1.0 / trials) / trials)
        holds = rate <= bound + 4 * se
        ok &= holds
        parts.append(f"alpha={alpha}: rate {rate:.4f} <= bound {bound:.4f} + 4se: {holds}")
    elapsed = time.time() - start
    ok = ok and elapsed < 300
    line = report(6, ok, "; ".join(parts) + f", {elapsed:.1f}s (<300s)")
    assert ok, line


def test_criterion_7_certificate_soundness():
    """Certified instances must be recovered exactly by the solver, 0 violations."""
    start = time.time()
    params = SbmParams(100, 20, 1)
    certified = 0
    violations = 0
    for t in range(200):
        seed = derive_seed(881, t)
        g, truth = generate_sbm(params, seed)
        rep = certificate_check(g, truth)
        if rep.certified:
            certified += 1
            sol = sdp_solve(signed_adjacency(g), SdpConfig(seed=derive_seed(seed, 1)))
            if agreement(sol.rounded, truth) != 1.0:
                violations += 1
    elapsed = time.time() - start
    ok = violations == 0 and elapsed < 600
    line = report(
        7, ok, f"200 trials, {certified} certified, {violations} violations (0 allowed), {elapsed:.0f}s (<600s)"
    )
    assert ok, line


def test_criterion_8_two_phase_cheating_oracle():
    """Two-phase with the cheating oracle at the stated parameters."""
    start = time.time()
    params = SbmParams(300, 10, 1)
    stated_c = 8.0
    successes_high = None
    error = None
    try:
        count = 0
        for t in range(20):
            seed = derive_seed(990, t)
            g, truth = generate_sbm(params, seed)
            out = two_phase_recover(
                g,
                SplitConfig(c=stated_c, seed=derive_seed(seed, 1)),
                CheatingOracle(corruption=0.1, seed=derive_seed(seed, 2)),
                truth,
            )
            count += agreement(out, truth) == 1.0
        successes_high = count
    except ValueError as exc:
        error = str(exc)

    # the no-signal half at alpha=beta=4 runs at any valid constant; use the
    # largest valid one below the stated C
    params_null = SbmParams(300, 4, 4)
    null_successes = 0
    for t in range(20):
        seed = derive_seed(991, t)
        g, truth = generate_sbm(params_null, seed)
        out = two_phase_recover(
            g,
            SplitConfig(c=min(stated_c, math.log(300) * 0.999), seed=derive_seed(seed, 1)),
            CheatingOracle(corruption=0.1, seed=derive_seed(seed, 2)),
            truth,
        )
        null_successes += agreement(out, truth) == 1.0
    elapsed = time.time() - start

    ok = error is None and successes_high is not None and successes_high >= 17 and null_successes <= 1
    detail_parts = []
    if error is not None:
        detail_parts.append(
            f"stated C=8 at n=300 is infeasible ({error}); at valid C the targets hold "
            f"(measured 20/20 at C=0.5, 19/20 at C=1, 17/20 at C=1.5; see "
            f"tests/test_twophase.py::TestPipeline and /root/notes/decisions.md)"
        )
    else:
        detail_parts.append(f"above-threshold successes {successes_high}/20 (>=17)")
    detail_parts.append(f"alpha=beta null successes {null_successes}/20 (<=1)")
    ok = ok and elapsed < 120
    line = report(8, ok, "; ".join(detail_parts) + f", {elapsed:.1f}s (<120s)")
    assert ok, line


def test_criterion_9_exact_property_bundle():
    """Zero-tolerance property suite: invariances and identities marked exact."""
    start = time.time()
    failures = []

    # flip and permutation invariance of the cut
    g, labels = generate_sbm(SbmParams(20, 3, 1), 12)
    if cut_size(g, labels) != cut_size(g, -labels):
        failures.append("cut flip invariance")
    rng = np.random.default_rng(4)
    perm = rng.permutation(20)
    inv = np.argsort(perm)
    pg_edges = np.sort(np.column_stack([perm[g.edges[:, 0]], perm[g.edges[:, 1]]]), axis=1)
    from sbmx.model import Graph

    permuted = Graph(20, pg_edges)
    if cut_size(permuted, labels[inv]) != cut_size(g, labels):
        failures.append("cut permutation invariance")
    if agreement(labels, -labels) != 1.0:
        failures.append("agreement flip invariance")

    # split partition exactness
    g1, g2 = split_graph(g, SplitConfig(c=1.5, seed=3))
    merged = np.vstack([g1.edges, g2.edges])
    merged = merged[np.lexsort((merged[:, 1], merged[:, 0]))]
    if not (g1.m + g2.m == g.m and np.array_equal(merged, g.edges)):
        failures.append("split partition exactness")

    # laplacian null space, exact integer arithmetic
    for seed in range(5):
        gg, tt = generate_sbm(SbmParams(16, 4, 1), derive_seed(14, seed))
        if np.any(sbm_laplacian(gg, tt) @ tt.astype(np.int64)):
            failures.append("laplacian null space")
            break

    # tilt stationarity identity to 1e-12 and exponent agreement to 1e-10
    rng = np.random.default_rng(77)
    for _ in range(100):
        alpha = float(rng.uniform(0.1, 30))
        beta = float(rng.uniform(0.1, 30))
        eps = float(rng.uniform(-0.8, 3.0))
        tau = dominant_tilt(alpha, beta, eps)
        if abs(tau * (tau + eps) - alpha * beta) > 1e-12 * max(1.0, alpha * beta):
            failures.append("tilt stationarity identity")
            break
        g_val = tail_exponent(alpha, beta, eps)
        h_val = tilt_objective(alpha, beta, tau, eps)
        if abs(g_val - h_val) > 1e-10 * max(1.0, abs(g_val)):
            failures.append("exponent/objective agreement")
            break

    # serialization round trip is the identity
    text = write_graph(g)
    if parse_graph(text) != g or not np.array_equal(parse_labeling(write_labeling(labels)), labels):
        failures.append("serialization round trip")

    elapsed = time.time() - start
    ok = not failures
    line = report(9, ok, f"exact properties all hold: {ok}{'' if ok else ' (failed: ' + ', '.join(failures) + ')'}, {elapsed:.1f}s")
    assert ok, line
