"""End-to-end acceptance checks at their stated tolerances.

Each test records one PASS/FAIL line; the lines are repeated in the
terminal summary.  Run with ``pytest tests/test_acceptance.py -v``.
"""

import itertools
import time
from fractions import Fraction

import numpy as np
import pytest

from slowentropy.estimation import amorphic_estimate, exponential_rate, fit_power_law
from slowentropy.metrics import bowen_distance, hamming_distance, word_distance
from slowentropy.separation import (
    asymptotic_separation_numbers,
    bowen_separation_number,
    center_candidates,
    counterexample_witness_set,
    exact_max_separated,
    greedy_separated,
    grid_candidates,
    hamming_separation_number,
    sep_to_bowen_witness,
    subword_separation_number,
    xgrid_candidates,
)
from slowentropy.systems import CircleRotation, ShiftSystem, SkewProduct, TorusSkew, make_system
from slowentropy.toeplitz import (
    RegularToeplitz,
    ToeplitzSpec,
    irregularity_certificate,
    periodic_density,
    verify_periodic_structure,
    window,
)

TORUS = TorusSkew()
SYSTEMS_IN_SCOPE = ("rotation", "torus", "skew", "toeplitz", "regular-toeplitz", "sturmian")

# symbolic samplers, fixed before looking at any counts
TOEPLITZ_CENTERS = dict(progression=1000, random_count=1000, seed=0, span=1 << 40, step=999_983)


def powers(lo, hi):
    return [2 ** k for k in range(lo, hi + 1)]


@pytest.fixture(scope="module")
def torus_witnesses():
    """Frequency-separated torus sets for 2^k distinct x-values, k = 3..8."""
    horizon = 4096
    out = []
    for k in range(3, 9):
        cs = xgrid_candidates(TORUS, 2 ** k)
        for res in asymptotic_separation_numbers(TORUS, 0.1, (0.5, 0.25, 0.1), cs, horizon):
            out.append((k, res, cs.points[res.indices]))
    return horizon, out


def test_01_counterexample_witnesses(report):
    t0 = time.perf_counter()
    reports = [counterexample_witness_set(k)[1] for k in range(3, 8)]
    # a verified witness set certifies its own size as a lower bound
    tail = [r for r in reports if r.n_block >= 5]
    est = fit_power_law([r.horizon for r in tail], [len(r.points) for r in tail])
    elapsed = time.perf_counter() - t0
    ok_sets = all(r.passed for r in reports)
    ok_counts = [len(r.points) for r in tail] == [32, 64, 128]
    passed = ok_sets and ok_counts and est.slope >= 0.45 and elapsed <= 60
    mins = ",".join(f"{r.min_distance:.6f}" for r in reports)
    report("1 counterexample witnesses", passed,
           f"min_hamming={mins} slope={est.slope:.4f} time={elapsed:.1f}s")
    assert passed


def test_02_skew_amorphic_flatness(report):
    system = SkewProduct()
    cs = grid_candidates(system, (16, 32))
    nus = [2.0 ** -k for k in range(2, 7)]
    est, results = amorphic_estimate(system, 0.1, nus, cs, 2 ** 14)
    counts = [r.count for r in results]
    passed = max(counts) <= 8 and est.slope <= 0.1
    report("2 skew amorphic flatness", passed, f"counts={counts} slope={est.slope:.4f}")
    assert passed


def test_03_irregular_toeplitz_bounded(report):
    spec = ToeplitzSpec()
    centers = center_candidates(**TOEPLITZ_CENTERS)
    assert spec.depth >= 5 and len(centers) >= 2000
    ns = powers(6, 13)
    passed, details = True, []
    for delta in (0.1, 0.2):
        counts = [subword_separation_number(spec, n, delta, centers).count for n in ns]
        slope = fit_power_law(ns, counts).slope
        top = counts[-3:]
        ratio = max(top) / min(top)
        ok = slope <= 0.1 and ratio <= 1.5
        passed &= ok
        details.append(f"delta={delta} counts={counts} slope={slope:.4f} top3_ratio={ratio:.3f}")
    report("3 irregular Toeplitz boundedness", passed, "; ".join(details))
    assert passed


def test_04_irregularity_certificate(report):
    spec = ToeplitzSpec()
    cert = irregularity_certificate(spec)
    exact = (periodic_density(spec, 1) == Fraction(5, 16)
             and periodic_density(spec, 2) == Fraction(51, 128))
    sums_ok = all(s < Fraction(3, 5) for s in cert.partial_sums)
    structure = [verify_periodic_structure(spec, n, 10_000).passed for n in range(1, spec.depth - 1)]
    passed = exact and sums_ok and all(structure) and cert.verdict == "irregular"
    report("4 irregularity certificate", passed,
           f"densities={cert.densities[0]},{cert.densities[1]} max_partial_sum={float(max(cert.partial_sums)):.4f} "
           f"periodic_structure={sum(structure)}/{len(structure)}")
    assert passed


def test_05_regular_toeplitz_flatness(report):
    system = ShiftSystem(RegularToeplitz())
    centers = center_candidates(**TOEPLITZ_CENTERS)
    ns = powers(4, 13)
    passed, details = True, []
    for delta in (0.1, 0.2):
        counts = [hamming_separation_number(system, n, delta, centers).count for n in ns]
        slope = fit_power_law(ns, counts).slope
        passed &= slope <= 0.1
        details.append(f"delta={delta} counts={counts} slope={slope:.4f}")
    report("5 regular Toeplitz flatness", passed, "; ".join(details))
    assert passed


def test_06_torus_growth(report, torus_witnesses):
    cs = xgrid_candidates(TORUS, 2 ** 18)
    ns = powers(4, 12)
    counts = [bowen_separation_number(TORUS, n, 0.1, cs).count for n in ns]
    slope = fit_power_law(ns, counts).slope
    _, witnesses = torus_witnesses
    short = [(k, r.nu, r.count) for k, r, _ in witnesses if r.count < 2 ** k]
    passed = abs(slope - 1.0) <= 0.15 and not short
    report("6 torus growth", passed,
           f"counts={counts} slope={slope:.4f} star_sets={len(witnesses)} below_2^k={short}")
    assert passed


def test_07_toeplitz_power_entropy(report):
    system = make_system("toeplitz")
    cs = center_candidates(1 << 20, 2000, seed=1, span=1 << 40)
    ns = powers(6, 12)
    counts = [bowen_separation_number(system, n, 0.1, cs).count for n in ns]
    slope = fit_power_law(ns, counts).slope
    passed = abs(slope - 1.0) <= 0.2
    report("7 Toeplitz power entropy trend", passed, f"counts={counts} slope={slope:.4f}")
    assert passed


def test_08_metric_inequalities(report):
    rng = np.random.default_rng(7)
    ns = (8, 16, 32, 64)
    details, passed = [], True
    for name in SYSTEMS_IN_SCOPE:
        system = make_system(name)
        if system.kind == "symbolic":
            P = rng.integers(0, 1 << 40, size=1000)
            Q = rng.integers(0, 1 << 40, size=1000)
        else:
            P, Q = rng.random((1000, system.dim)), rng.random((1000, system.dim))
        bad_order = bad_word = 0
        for n in ns:
            for p, q in zip(P, Q):
                ham = hamming_distance(system, p, q, n)
                bad_order += ham > bowen_distance(system, p, q, n)
                if system.kind == "symbolic":
                    word = word_distance(window(system.source, int(p), 2 * n),
                                         window(system.source, int(q), 2 * n))
                    bad_word += ham > 9 * word + 2.0 ** -(n - 1) + 2.0 ** -(system.radius - 2)
        passed &= bad_order == 0 and bad_word == 0
        details.append(f"{name}:order={bad_order}" + (f",word={bad_word}" if system.kind == "symbolic" else ""))
    report("8 metric inequality suite", passed, "violations " + " ".join(details))
    assert passed


def _cloud(rng, size):
    pts = rng.random((size, 2))
    return np.sqrt(((pts[:, None] - pts[None, :]) ** 2).sum(-1))


def _exhaustive(D, delta):
    for r in range(len(D), 0, -1):
        for sub in itertools.combinations(range(len(D)), r):
            if all(D[i, j] >= delta for i, j in itertools.combinations(sub, 2)):
                return r
    return 0


def test_09_oracle_equivalence(report):
    rng = np.random.default_rng(9)
    mismatch = sandwich = 0
    for _ in range(100):
        D = _cloud(rng, int(rng.integers(2, 16)))
        delta = float(rng.uniform(0.05, 0.5))
        exact = exact_max_separated(D, delta)[0]
        mismatch += exact != _exhaustive(D, delta)
        greedy = len(greedy_separated(D, delta))
        sandwich += not (exact_max_separated(D, 2 * delta)[0] <= greedy <= exact)
    passed = mismatch == 0 and sandwich == 0
    report("9 oracle equivalence", passed, f"exact_mismatches={mismatch} sandwich_violations={sandwich}")
    assert passed


def test_10_star_to_bowen_transfer(report, torus_witnesses):
    horizon, witnesses = torus_witnesses
    failures, worst = [], 0
    for k, res, pts in witnesses:
        n, chk = sep_to_bowen_witness(TORUS, 0.1, res.nu, pts, 2 * horizon)
        worst = max(worst, n)
        if not chk.passed or n > 2 * horizon:
            failures.append((k, res.nu))
    passed = not failures
    report("10 star-to-Bowen transfer", passed,
           f"sets={len(witnesses)} failures={failures} largest_n={worst}")
    assert passed


def _growth_counts(name):
    system = make_system(name)
    ns = powers(6, 14)
    if name == "rotation":
        cs = grid_candidates(system, 256)
    elif name == "torus":
        cs = xgrid_candidates(system, 2 ** 12)
    elif name == "skew":
        cs = grid_candidates(system, (16, 16))
    else:
        cs = center_candidates(2000, 2000, seed=3, span=1 << 40)
    return ns, [bowen_separation_number(system, n, 0.1, cs).count for n in ns]


def test_11_baseline_exactness(report):
    rot = CircleRotation()
    cs = grid_candidates(rot, 64)
    pairs = [(bowen_separation_number(rot, n, 0.25, cs).count,
              hamming_separation_number(rot, n, 0.25, cs).count) for n in (1, 16, 256, 4096)]
    exact = all(b == h == 4 for b, h in pairs)
    rates = {}
    for name in SYSTEMS_IN_SCOPE:
        ns, counts = _growth_counts(name)
        rates[name] = exponential_rate(ns, counts)
    passed = exact and all(r < 0.01 for r in rates.values())
    report("11 baseline exactness", passed,
           f"rotation_counts={pairs} rates=" + ",".join(f"{k}:{v:.5f}" for k, v in rates.items()))
    assert passed

