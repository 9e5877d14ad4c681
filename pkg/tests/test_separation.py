import itertools

import numpy as np
import pytest

from slowentropy.metrics import pair_statistics
from slowentropy.separation import (
    RESULT_COLUMNS,
    CandidateSet,
    GreedyPacking,
    HorizonExhaustedError,
    SizeLimitError,
    asymptotic_separation_number,
    asymptotic_separation_numbers,
    bowen_separation_number,
    center_candidates,
    counterexample_witness_set,
    exact_max_separated,
    greedy_separated,
    grid_candidates,
    hamming_separation_number,
    random_candidates,
    sep_to_bowen_witness,
    subword_separation_number,
    witness_candidates,
    xgrid_candidates,
)
from slowentropy.systems import CircleRotation, SkewProduct, TorusSkew, make_system
from slowentropy.toeplitz import RegularToeplitz, ToeplitzSpec

ROT = CircleRotation()
TORUS = TorusSkew()
SKEW = SkewProduct()
SHIFT = make_system("toeplitz")


class ZeroSource:
    def symbols(self, positions):
        return np.zeros(np.shape(positions), dtype=np.uint8)


def line_matrix(x):
    x = np.asarray(x, dtype=float)
    return np.abs(x[:, None] - x[None, :])


def cloud_matrix(rng, size):
    # distances between random points are symmetric and satisfy the triangle inequality
    pts = rng.random((size, 2))
    return np.sqrt(((pts[:, None] - pts[None, :]) ** 2).sum(-1))


def exhaustive_max(D, delta):
    N = len(D)
    for r in range(N, 0, -1):
        for sub in itertools.combinations(range(N), r):
            if all(D[i, j] >= delta for i, j in itertools.combinations(sub, 2)):
                return r
    return 0


class TestGreedy:
    def test_examples(self):
        D = [[0, 0.5], [0.5, 0]]
        assert list(greedy_separated(D, 0.3)) == [0, 1]
        assert list(greedy_separated(D, 0.6)) == [0]
        assert list(greedy_separated(line_matrix([0, 0.25, 0.5]), 0.3)) == [0, 2]

    def test_maximal(self):
        rng = np.random.default_rng(1)
        D = cloud_matrix(rng, 60)
        kept = greedy_separated(D, 0.2)
        rest = np.setdiff1d(np.arange(60), kept)
        assert np.all(D[np.ix_(kept, kept)][np.triu_indices(len(kept), 1)] >= 0.2)
        assert np.all((D[np.ix_(rest, kept)] < 0.2).any(axis=1))

    def test_malformed(self):
        with pytest.raises(ValueError):
            greedy_separated([[0, 1], [0.5, 0]], 0.3)
        with pytest.raises(ValueError):
            greedy_separated([[1, 1], [1, 0]], 0.3)
        with pytest.raises(ValueError):
            greedy_separated(np.zeros((2, 3)), 0.3)
        with pytest.raises(ValueError):
            greedy_separated([[0, 1], [1, 0]], 0.0)


class TestExact:
    def test_examples(self):
        assert exact_max_separated([[0, 0.5], [0.5, 0]], 0.3)[0] == 2
        assert exact_max_separated(0.2 * (1 - np.eye(3)), 0.3)[0] == 1

    def test_beats_greedy_when_greedy_is_suboptimal(self):
        D = line_matrix([0.0, 0.15, 0.3, 0.45, 0.6, 0.65, 0.9])
        assert len(greedy_separated(D, 0.3)) <= exact_max_separated(D, 0.3)[0]
        size, idx = exact_max_separated(line_matrix([0.0, 0.2, 0.3, 0.6]), 0.3)
        assert size == 3 and list(idx) == [0, 2, 3]

    def test_against_exhaustive_search(self):
        rng = np.random.default_rng(2024)
        for _ in range(100):
            size = int(rng.integers(1, 16))
            D = cloud_matrix(rng, size)
            delta = float(rng.uniform(0.05, 0.6))
            got, idx = exact_max_separated(D, delta)
            assert got == exhaustive_max(D, delta)
            sub = D[np.ix_(idx, idx)]
            assert np.all(sub[np.triu_indices(len(idx), 1)] >= delta - 1e-9)

    def test_packing_sandwich(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            D = cloud_matrix(rng, int(rng.integers(2, 30)))
            delta = float(rng.uniform(0.05, 0.4))
            greedy = len(greedy_separated(D, delta))
            assert exact_max_separated(D, 2 * delta)[0] <= greedy <= exact_max_separated(D, delta)[0]

    def test_size_limit(self):
        with pytest.raises(SizeLimitError):
            exact_max_separated(np.zeros((65, 65)), 0.1)
        assert exact_max_separated(np.zeros((3, 3)), 0.1, limit=3)[0] == 1


class TestGreedyPacking:
    def test_fit_transform(self):
        D = line_matrix([0, 0.25, 0.5, 0.9])
        est = GreedyPacking(delta=0.3).fit(D)
        assert list(est.indices_) == [0, 2, 3] and est.n_selected_ == 3
        assert est.transform(D).shape == (3, 3)
        assert GreedyPacking(delta=0.3, method="exact").fit(D).n_selected_ == 3
        assert GreedyPacking(delta=0.45).fit(D).n_selected_ == 2

    def test_params(self):
        est = GreedyPacking(delta=0.2, method="exact")
        assert est.get_params() == {"delta": 0.2, "method": "exact", "limit": 64}
        with pytest.raises(ValueError):
            GreedyPacking(method="other").fit(np.zeros((2, 2)))


class TestSamplers:
    def test_grid(self):
        cs = grid_candidates(ROT, 64)
        assert cs.count == 64 and cs.points[1, 0] == 1 / 64 and cs.lattice is not None
        skew = grid_candidates(SKEW, (4, 8))
        assert skew.points.shape == (32, 2) and skew.lattice is None
        assert skew.points[0, 0] == 0.125
        with pytest.raises(ValueError):
            grid_candidates(TORUS, 10)

    def test_xgrid(self):
        cs = xgrid_candidates(TORUS, 8)
        assert np.all(cs.points[:, 1] == 0) and len(np.unique(cs.points[:, 0])) == 8

    def test_deterministic(self):
        a, b = random_candidates(SKEW, 10, 3), random_candidates(SKEW, 10, 3)
        assert np.array_equal(a.points, b.points)
        c, d = center_candidates(5, 20, seed=4), center_candidates(5, 20, seed=4)
        assert np.array_equal(c.points, d.points)
        assert len(np.unique(c.points)) == len(c.points)
        assert list(center_candidates(3, step=7).points) == [0, 7, 14]

    def test_witness_points(self):
        pts = witness_candidates(3).points
        assert len(pts) == 8 and pts[0, 0] == 0.125
        assert np.allclose(np.diff(pts[:, 0]), 2.0 ** -8)
        assert pts[-1, 0] <= 5 * 2.0 ** -5
        with pytest.raises(ValueError):
            witness_candidates(2)


class TestBowenHamming:
    def test_rotation_examples(self):
        cs = grid_candidates(ROT, 64)
        for n in (1, 10, 100):
            assert bowen_separation_number(ROT, n, 0.25, cs).count == 4
            assert hamming_separation_number(ROT, n, 0.25, cs).count == 4

    def test_n_one_is_plain_packing(self):
        pts = random_candidates(SKEW, 40, 1).points
        D = SKEW.base_distance(pts[:, None], pts[None, :])
        assert bowen_separation_number(SKEW, 1, 0.2, pts).count == len(greedy_separated(D, 0.2))

    @pytest.mark.parametrize("system,cs", [
        (ROT, grid_candidates(ROT, 50)),
        (TORUS, grid_candidates(TORUS, (12, 10))),
        (TORUS, xgrid_candidates(TORUS, 40)),
    ])
    @pytest.mark.parametrize("kind", ["bowen", "hamming"])
    def test_lattice_path_matches_matrix_path(self, system, cs, kind):
        for n, delta in ((7, 0.1), (20, 0.25)):
            counter = bowen_separation_number if kind == "bowen" else hamming_separation_number
            fast = counter(system, n, delta, cs)
            D = getattr(pair_statistics(system, cs.points, n), kind)
            assert list(fast.indices) == list(greedy_separated(D, delta))

    def test_symbolic_bowen_fast_path_matches_matrix(self):
        cs = center_candidates(300, 300, seed=5, span=1 << 30)
        for n, delta in ((32, 0.1), (40, 0.5), (64, 1.0), (33, 2.0 ** -20)):
            fast = bowen_separation_number(SHIFT, n, delta, cs)
            D = pair_statistics(SHIFT, cs.points, n).bowen
            assert list(fast.indices) == list(greedy_separated(D, delta))

    def test_symbolic_hamming_fast_path_matches_matrix(self):
        cs = center_candidates(200, 200, seed=6, span=1 << 30)
        for n, delta in ((8, 0.1), (30, 0.2)):
            fast = hamming_separation_number(SHIFT, n, delta, cs)
            D = pair_statistics(SHIFT, cs.points, n).hamming
            assert list(fast.indices) == list(greedy_separated(D, delta))

    def test_hamming_witnesses_are_bowen_separated(self):
        for system, cs in ((SKEW, random_candidates(SKEW, 80, 2)),
                           (TORUS, grid_candidates(TORUS, (8, 8))),
                           (SHIFT, center_candidates(100, 100, seed=1))):
            h = hamming_separation_number(system, 40, 0.15, cs)
            pts = as_points(system, cs)[h.indices]
            B = pair_statistics(system, pts, 40).bowen
            assert np.all(B[np.triu_indices(len(pts), 1)] >= 0.15 - 1e-9)

    def test_exact_count_dominates_greedy(self):
        cs = random_candidates(SKEW, 30, 9)
        for n in (4, 16):
            g = bowen_separation_number(SKEW, n, 0.2, cs)
            e = bowen_separation_number(SKEW, n, 0.2, cs, "exact")
            assert e.count >= g.count
            he = hamming_separation_number(SKEW, n, 0.2, cs, "exact")
            assert he.count <= e.count

    def test_monotone_in_delta_and_n(self):
        cs = grid_candidates(TORUS, (16, 4))
        counts = [bowen_separation_number(TORUS, 30, d, cs, "greedy").count for d in (0.05, 0.1, 0.2)]
        assert counts[0] >= counts[1] >= counts[2]
        exact = [bowen_separation_number(TORUS, n, 0.2, random_candidates(TORUS, 25, 0), "exact").count
                 for n in (1, 4, 16)]
        assert exact[0] <= exact[1] <= exact[2]

    def test_witness_hamming_count(self):
        res = hamming_separation_number(SKEW, 256, 0.25, witness_candidates(3))
        assert res.count >= 8

    def test_rows(self):
        row = bowen_separation_number(ROT, 5, 0.25, grid_candidates(ROT, 16)).to_row("rotation")
        assert tuple(row) == RESULT_COLUMNS
        assert row["count"] == "4" and row["nu"] == "" and row["sampler"] == "grid"

    def test_bad_method(self):
        with pytest.raises(ValueError):
            bowen_separation_number(ROT, 5, 0.25, grid_candidates(ROT, 16), "other")


def as_points(system, cs):
    pts = np.asarray(cs.points)
    return pts.reshape(-1) if system.kind == "symbolic" else pts


class TestAsymptotic:
    def test_rotation(self):
        res = asymptotic_separation_number(ROT, 0.25, 0.5, grid_candidates(ROT, 64), 256)
        assert res.count == 4 and res.nu == 0.5 and res.kind == "asymptotic"

    def test_torus_counts_distinct_x_values(self):
        for k in (4, 8, 16):
            res = asymptotic_separation_number(TORUS, 0.1, 0.1, xgrid_candidates(TORUS, k), 1024)
            assert res.count == k

    def test_lattice_matches_matrix(self):
        cs = grid_candidates(TORUS, (8, 6))
        for nu in (0.5, 0.1):
            fast = asymptotic_separation_number(TORUS, 0.1, nu, cs, 512)
            slow = asymptotic_separation_number(TORUS, 0.1, nu, cs.points, 512)
            assert list(fast.indices) == list(slow.indices)

    def test_skew_limit_circle_is_a_rotation(self):
        # x = 1 is fixed and carries a rigid rotation, so frequency-one pairs
        # are exactly the delta-separated heights
        pts = np.stack([np.ones(80), np.arange(80) / 80], axis=1)
        for res in asymptotic_separation_numbers(SKEW, 0.1, [0.9, 0.5, 0.1], pts, 512):
            assert res.count == 10

    def test_monotone_in_nu(self):
        out = asymptotic_separation_numbers(TORUS, 0.1, [0.9, 0.5, 0.1], random_candidates(TORUS, 60, 4), 512)
        assert out[0].count <= out[1].count <= out[2].count

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            asymptotic_separation_number(ROT, 0.1, 0.0, grid_candidates(ROT, 4), 64)
        with pytest.raises(ValueError):
            asymptotic_separation_number(ROT, 0.1, 0.5, grid_candidates(ROT, 4), 3)


class TestSubword:
    def test_examples(self):
        assert subword_separation_number(ToeplitzSpec(), 1, 0.3, [0, 3]).count == 2
        assert subword_separation_number(ToeplitzSpec(), 5, 1.5, np.arange(50)).count == 1
        assert subword_separation_number(ZeroSource(), 4, 0.1, np.arange(30)).count == 1

    def test_exact_matches_greedy_bound(self):
        centers = center_candidates(40, 0)
        for delta in (0.1, 0.3):
            g = subword_separation_number(RegularToeplitz(), 6, delta, centers)
            e = subword_separation_number(RegularToeplitz(), 6, delta, centers, "exact")
            assert g.count <= e.count

    def test_against_direct_words(self):
        centers = np.arange(-60, 60, 7)
        src = ToeplitzSpec()
        n = 4
        words = np.array([[src.symbols(np.array([m + j]))[0] for j in range(-n, n + 1)] for m in centers])
        D = (words[:, None] != words[None]).sum(-1) / (2 * n + 1)
        res = subword_separation_number(src, n, 0.2, centers)
        assert list(res.indices) == list(greedy_separated(D, 0.2))


class TestWitnessSets:
    @pytest.mark.parametrize("n_block,size,horizon", [(3, 8, 256), (4, 16, 1024), (5, 32, 4096)])
    def test_witnesses_pass(self, n_block, size, horizon):
        pts, rep = counterexample_witness_set(n_block)
        assert len(pts) == size and rep.horizon == horizon
        assert rep.stays_on_plateau and rep.passed
        assert rep.min_distance >= 0.25 - 1e-6

    def test_report_names_the_worst_pair(self):
        _, rep = counterexample_witness_set(3)
        i, j = rep.worst_pair
        H = pair_statistics(SKEW, rep.points, rep.horizon).hamming
        assert H[i, j] == rep.min_distance


class TestTransfer:
    def test_torus_witness(self):
        cs = xgrid_candidates(TORUS, 8)
        res = asymptotic_separation_number(TORUS, 0.1, 0.1, cs, 1024)
        n, chk = sep_to_bowen_witness(TORUS, 0.1, 0.1, cs.points[res.indices], 2048)
        assert chk.passed and n <= 200
        B = pair_statistics(TORUS, cs.points[res.indices], n).bowen
        assert B[np.triu_indices(8, 1)].min() >= 0.1 - 1e-9

    def test_single_point(self):
        assert sep_to_bowen_witness(TORUS, 0.1, 0.1, np.array([[0.2, 0.3]]), 10)[0] == 1

    def test_separated_rotation_pair(self):
        n, chk = sep_to_bowen_witness(ROT, 0.25, 0.5, np.array([[0.0], [0.5]]), 10)
        assert n == 1 and chk.passed

    def test_exhausted(self):
        with pytest.raises(HorizonExhaustedError):
            sep_to_bowen_witness(ROT, 0.25, 0.5, np.array([[0.0], [0.1]]), 50)


def test_candidate_set_len():
    cs = CandidateSet(np.zeros((3, 2)), "explicit")
    assert len(cs) == 3 == cs.count
