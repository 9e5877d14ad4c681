"""Self-checking suites behind ``slowentropy verify``."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import metrics, separation, toeplitz
from .estimation import fit_power_law
from .systems import GOLDEN, System, make_system


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}  {self.detail}".rstrip()


def parse_range(text: str) -> range:
    """``"3..6"`` -> ``range(3, 7)``; a single integer is a one-element range."""
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        return range(int(lo), int(hi) + 1)
    v = int(text)
    return range(v, v + 1)


def counterexample(blocks=range(3, 7), tol: float = 1e-6) -> list[Check]:
    """Quarter-separated plateau witness sets and their growth exponent."""
    checks, samples = [], []
    for k in blocks:
        _, rep = separation.counterexample_witness_set(k, tol=tol)
        checks.append(Check(
            f"witness n_block={k}", rep.passed,
            f"points={len(rep.points)} horizon={rep.horizon} "
            f"on_plateau={rep.stays_on_plateau} min_hamming={rep.min_distance:.9f}"))
        if rep.passed:
            samples.append((rep.horizon, len(rep.points)))
    if len(samples) >= 3:
        est = fit_power_law(samples[-3:])
        checks.append(Check("witness growth slope >= 0.45", est.slope >= 0.45,
                            f"slope={est.slope:.4f}"))
    return checks


def toeplitz_irregular(depth: int = 4, probe_range: int = 10_000, a1: int = 2, b=None) -> list[Check]:
    spec = toeplitz.ToeplitzSpec(a1=a1, b=b, depth=max(depth, 2))
    cert = toeplitz.irregularity_certificate(spec)
    checks = [Check("certificate verdict", cert.verdict == "irregular",
                    f"verdict={cert.verdict} limit_bound={float(cert.limit_bound):.6f}")]
    for n, d in enumerate(cert.densities, start=1):
        detail = f"n={n} density={d} bound={cert.partial_sums[n - 1]}"
        ok = d <= cert.partial_sums[n - 1]
        if spec.a(n + 1) <= 1 << 20:
            oracle = toeplitz.residue_density_bruteforce(spec, n)
            ok = ok and oracle == d
            detail += f" oracle={oracle}"
        checks.append(Check(f"density n={n}", ok, detail))
    checks.append(Check("partial sums < 0.6", all(s < Fraction(3, 5) for s in cert.partial_sums),
                        "sums=" + ",".join(str(s) for s in cert.partial_sums)))
    for n in range(1, spec.depth - 1):
        rep = toeplitz.verify_periodic_structure(spec, n, probe_range)
        checks.append(Check(f"periodic structure n={n}", rep.passed,
                            f"checked={rep.checked} violations={len(rep.violations)} witness={rep.witness}"))
    return checks


def toeplitz_regular(deltas=(0.1, 0.2), n_max: int = 1024, centers: int = 500,
                     seed: int = 0) -> list[Check]:
    system = make_system("regular-toeplitz")
    cs = separation.center_candidates(centers // 2, centers - centers // 2, seed=seed,
                                      span=1 << 40, step=999_983)
    ns = [2 ** k for k in range(4, int(np.log2(n_max)) + 1)]
    checks = []
    for d in deltas:
        counts = [separation.hamming_separation_number(system, n, d, cs).count for n in ns]
        est = fit_power_law(ns, counts)
        checks.append(Check(f"hamming slope <= 0.1 (delta={d})", est.slope <= 0.1,
                            f"slope={est.slope:.4f} counts={counts}"))
    for n in (4, 8, 12):
        frac = toeplitz.regular_periodic_fraction(n)
        ok = abs(frac - (1 - 2.0 ** -n)) <= 4 * 2.0 ** -n
        checks.append(Check(f"periodic fraction n={n}", ok, f"fraction={frac:.6f}"))
    return checks


def _random_points(system: System, rng, size):
    if system.kind == "symbolic":
        return rng.integers(0, 1 << 40, size=size, dtype=np.int64)
    return rng.random((size, system.dim))


INEQUALITY_SYSTEMS = ("rotation", "torus", "skew", "toeplitz", "regular-toeplitz", "sturmian")


def inequalities(pairs: int = 1000, seed: int = 7, ns=(8, 16, 32, 64),
                 systems=INEQUALITY_SYSTEMS, delta: float = 0.1) -> list[Check]:
    """Hamming below Bowen, a Markov-type count bound, and the word-metric bound."""
    rng = np.random.default_rng(seed)
    checks = []
    for name in systems:
        system = make_system(name)
        P = _random_points(system, rng, pairs)
        Q = _random_points(system, rng, pairs)
        order = bad_order = bad_markov = bad_word = bad_exact = 0
        for n in ns:
            for p, q in zip(P, Q):
                prof = metrics.distance_profile(system, p, q, n)
                bowen = metrics.bowen_distance(system, p, q, n)
                ham = metrics.hamming_distance(system, p, q, n)
                order += 1
                bad_order += ham > bowen
                count = int(np.count_nonzero(prof >= delta))
                bad_markov += count / n > ham / delta * (1 + 1e-12)
                if system.kind == "symbolic":
                    word = metrics.word_distance(toeplitz.window(system.source, int(p), 2 * n),
                                                 toeplitz.window(system.source, int(q), 2 * n))
                    slack = 2.0 ** -(n - 1) + 2.0 ** -(system.radius - 2)
                    bad_word += ham > 9 * word + slack
                    # each of the (4n+1) D mismatches adds at most 3/n
                    bad_exact += ham > 3 * (4 * n + 1) / n * word + slack
        checks.append(Check(f"hamming <= bowen ({name})", bad_order == 0,
                            f"violations={bad_order}/{order}"))
        checks.append(Check(f"markov bound ({name})", bad_markov == 0,
                            f"violations={bad_markov}/{order}"))
        if system.kind == "symbolic":
            checks.append(Check(f"word-metric bound ({name})", bad_word == 0,
                                f"violations={bad_word}/{order}"))
            checks.append(Check(f"word-metric bound, constant 3(4n+1)/n ({name})", bad_exact == 0,
                                f"violations={bad_exact}/{order}"))
    return checks


def star_to_bowen(exponents=range(3, 9), delta: float = 0.1, nus=(0.5, 0.25, 0.1),
                  horizon: int = 4096) -> list[Check]:
    """Frequency-separated torus sets become Bowen-separated in finite time."""
    system = make_system("torus")
    checks = []
    for k in exponents:
        cs = separation.xgrid_candidates(system, 2 ** k)
        for res in separation.asymptotic_separation_numbers(system, delta, nus, cs, horizon):
            ok = res.count >= 2 ** k
            detail = f"count={res.count}"
            try:
                n, chk = separation.sep_to_bowen_witness(
                    system, delta, res.nu, cs.points[res.indices], 2 * horizon)
                ok = ok and chk.passed
                detail += f" bowen_n={n} separated={chk.separated}"
            except separation.HorizonExhaustedError as exc:
                ok = False
                detail += f" {exc}"
            checks.append(Check(f"torus 2^{k} x-values nu={res.nu}", ok, detail))
    return checks


TARGETS = {
    "counterexample": counterexample,
    "toeplitz-irregular": toeplitz_irregular,
    "toeplitz-regular": toeplitz_regular,
    "inequalities": inequalities,
    "star-to-bowen": star_to_bowen,
}

__all__ = ["Check", "TARGETS", "parse_range", "GOLDEN"]
