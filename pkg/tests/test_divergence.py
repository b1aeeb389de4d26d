"""Tests for the lockstep warp simulator and its divergence metrics."""

import random
from fractions import Fraction

import pytest

from hardround.divergence import (
    BRANCH_WEIGHTS,
    WARP_WIDTH,
    BranchWeights,
    WarpStats,
    branch_serialization_estimate,
    linear_problem_batch,
    mdm,
    nmdm,
    report_rows,
    simulate_warps,
)
from hardround.fixedpoint import DivisionMode, UFrac
from hardround.fpmodel import FpFormat
from hardround.lowerbound import SEARCHES, Algorithm, SearchProblem

FMT33 = FpFormat(precision=33, eps_bits=22)


def random_batch(count: int, seed: int = 7, width: int = 64) -> list[SearchProblem]:
    rng = random.Random(seed)
    one = 1 << width
    out = []
    for _ in range(count):
        out.append(SearchProblem(
            a=UFrac(rng.randrange(one), width),
            b=UFrac(rng.randrange(one), width),
            eps=UFrac(one >> 20, width),
            count=rng.randrange(1, 500),
        ))
    return out


class TestDeviationMetrics:
    def test_documented_example(self):
        lanes = [10, 20, 30, 40]
        assert mdm(lanes) == 15
        assert nmdm(lanes) == Fraction(3, 8)

    def test_equal_lanes_have_no_divergence(self):
        assert mdm([7] * 5) == 0
        assert nmdm([7] * 5) == 0

    def test_all_zero_lanes(self):
        # max is 0: defined as no divergence rather than 0/0
        assert mdm([0, 0, 0]) == 0
        assert nmdm([0, 0, 0]) == 0

    def test_single_lane(self):
        assert mdm([123]) == 0
        assert nmdm([123]) == 0

    def test_exact_rationals(self):
        assert mdm([1, 2]) == Fraction(1, 2)
        assert nmdm([1, 3]) == Fraction(1, 3)
        assert isinstance(mdm([1, 2]), Fraction)
        assert isinstance(nmdm([1, 2]), Fraction)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            mdm([])
        with pytest.raises(ValueError):
            nmdm([])


class TestBranchSerialization:
    def test_diverged_pays_both_paths(self):
        assert branch_serialization_estimate(5, 7, diverged=True) == 12

    def test_convergent_pays_taken_path(self):
        assert branch_serialization_estimate(5, 7, diverged=False, taken=True) == 5
        assert branch_serialization_estimate(5, 7, diverged=False, taken=False) == 7

    def test_negative_costs_rejected(self):
        with pytest.raises(ValueError):
            branch_serialization_estimate(-1, 7, diverged=False)
        with pytest.raises(ValueError):
            branch_serialization_estimate(1, -7, diverged=True)


class TestBranchWeights:
    def test_every_algorithm_has_weights(self):
        assert set(BRANCH_WEIGHTS) == set(Algorithm)

    def test_unified_variants(self):
        # the role-swapping and straight-line cores share one branch body
        assert BRANCH_WEIGHTS[Algorithm.LEFEVRE_SWAP].unified
        assert BRANCH_WEIGHTS[Algorithm.REGULAR_UNROLLED].unified
        assert not BRANCH_WEIGHTS[Algorithm.LEFEVRE].unified
        assert not BRANCH_WEIGHTS[Algorithm.REGULAR].unified

    def test_costs_positive(self):
        for w in BRANCH_WEIGHTS.values():
            assert w.then_cost > 0
            assert w.else_cost > 0
            assert w.fixup_cost > 0


class TestWarpStats:
    def test_nmdm_range_enforced(self):
        with pytest.raises(ValueError):
            WarpStats(mdm=Fraction(0), nmdm=Fraction(1),
                      serialized_iterations=1, branch_serialized_instructions=1)
        with pytest.raises(ValueError):
            WarpStats(mdm=Fraction(0), nmdm=Fraction(-1, 2),
                      serialized_iterations=1, branch_serialized_instructions=1)

    def test_valid_stats(self):
        s = WarpStats(mdm=Fraction(3, 2), nmdm=Fraction(1, 4),
                      serialized_iterations=6, branch_serialized_instructions=40)
        assert s.nmdm == Fraction(1, 4)


class TestSimulateWarps:
    def test_single_problem_single_lane(self):
        batch = random_batch(1)
        report = simulate_warps(batch)
        assert len(report.traces) == 1
        assert len(report.traces[0].lane_iterations) == 1
        assert report.warps[0].mdm == 0
        assert report.warps[0].nmdm == 0
        assert report.mean_nmdm == 0

    @pytest.mark.parametrize("algo", list(Algorithm))
    def test_outcomes_bit_identical_to_standalone(self, algo):
        batch = random_batch(40, seed=11)
        report = simulate_warps(batch, algo, DivisionMode.HYBRID, warp_width=8)
        observed = [o for t in report.traces for o in t.outcomes]
        expected = [SEARCHES[algo](p, mode=DivisionMode.HYBRID) for p in batch]
        assert observed == expected

    def test_short_final_warp(self):
        batch = random_batch(70, seed=3)
        report = simulate_warps(batch, warp_width=32)
        widths = [len(t.lane_iterations) for t in report.traces]
        assert widths == [32, 32, 6]

    def test_batch_order_preserved(self):
        batch = random_batch(12, seed=4)
        report = simulate_warps(batch, Algorithm.LEFEVRE, warp_width=4)
        flat = [o for t in report.traces for o in t.outcomes]
        assert flat == [SEARCHES[Algorithm.LEFEVRE](p) for p in batch]

    def test_aggregates_match_traces(self):
        batch = random_batch(50, seed=9)
        report = simulate_warps(batch, Algorithm.REGULAR, warp_width=16)
        lanes = [n for t in report.traces for n in t.lane_iterations]
        assert report.min_iterations == min(lanes)
        assert report.max_iterations == max(lanes)
        assert report.mean_iterations == Fraction(sum(lanes), len(lanes))
        assert report.mean_nmdm == Fraction(
            sum(s.nmdm for s in report.warps), len(report.warps))

    def test_branch_tallies_sum_to_path_length(self):
        batch = random_batch(16, seed=5)
        report = simulate_warps(batch, Algorithm.LEFEVRE, warp_width=8)
        for trace in report.traces:
            for (taken, not_taken), path in zip(
                    trace.lane_branch_counts, trace.branch_paths):
                assert taken == sum(path)
                assert taken + not_taken == len(path)

    def test_string_algorithm_accepted(self):
        batch = random_batch(2)
        report = simulate_warps(batch, "lefevre")
        assert report.algorithm is Algorithm.LEFEVRE

    def test_empty_batch_rejected(self):
        with pytest.raises(ValueError):
            simulate_warps([])

    def test_bad_warp_width_rejected(self):
        with pytest.raises(ValueError):
            simulate_warps(random_batch(2), warp_width=0)

    def test_default_warp_width(self):
        batch = random_batch(WARP_WIDTH + 1)
        report = simulate_warps(batch)
        assert [len(t.lane_iterations) for t in report.traces] == [WARP_WIDTH, 1]


class TestReportRows:
    def test_row_shape_and_content(self):
        batch = random_batch(40, seed=21)
        report = simulate_warps(batch, Algorithm.REGULAR, warp_width=16)
        rows = report_rows(report)
        assert len(rows) == len(report.warps)
        for warp_id, (wid, max_iter, mean_iter, dev, ndev) in enumerate(rows):
            assert wid == warp_id
            trace = report.traces[warp_id]
            stats = report.warps[warp_id]
            assert max_iter == stats.serialized_iterations == max(trace.lane_iterations)
            assert isinstance(mean_iter, float)
            assert dev == pytest.approx(float(stats.mdm))
            assert ndev == pytest.approx(float(stats.nmdm))
            assert max_iter >= mean_iter


class TestLinearProblemBatch:
    def test_shape_and_counts(self):
        batch = linear_problem_batch("exp", FMT33, 0, 512, domain_count=8)
        assert len(batch) == 8
        assert all(p.count == 512 for p in batch)

    def test_default_margin_doubles_format_eps(self):
        batch = linear_problem_batch("exp", FMT33, 0, 256, domain_count=2)
        expected = UFrac.from_fraction(2 * FMT33.eps, 64)
        assert all(p.eps == expected for p in batch)

    def test_uneven_tail_domain(self):
        fmt = FpFormat(precision=8, eps_bits=4)
        batch = linear_problem_batch("exp", fmt, 0, 48)
        # one binade holds 128 arguments: 48 + 48 + 32
        assert [p.count for p in batch] == [48, 48, 32]

    def test_identity_degenerates_to_zero_problem(self):
        # the linear model of the identity on its own grid is exact:
        # slope*ulp*scale and value*scale are integers, so a = b = 0 mod 1
        batch = linear_problem_batch("identity", FMT33, 0, 64, domain_count=4)
        assert all(p.a.raw == 0 and p.b.raw == 0 for p in batch)

    def test_slope_regularity_across_neighbours(self):
        # consecutive subdomain slopes are nearly equal; offsets are not
        batch = linear_problem_batch("exp", FMT33, 0, 512, domain_count=32)
        one = 1 << 64
        a_span = max(p.a.raw for p in batch) - min(p.a.raw for p in batch)
        assert a_span < one // 1000
        b_vals = sorted(p.b.raw for p in batch)
        b_gaps = [hi - lo for lo, hi in zip(b_vals, b_vals[1:])]
        assert max(b_gaps) > one // 256

    def test_validation(self):
        with pytest.raises(ValueError):
            linear_problem_batch("exp", FMT33, 0, 0)
        with pytest.raises(ValueError):
            # 2^32 subdomains of size 2 overflow the binade
            linear_problem_batch("exp", FMT33, 0, 2, domain_count=1 << 32)
        with pytest.raises(ValueError):
            linear_problem_batch("sinh", FMT33, 0, 64, domain_count=1)


@pytest.fixture(scope="module")
def batch():
    return linear_problem_batch("exp", FMT33, 0, 512, domain_count=64)


class TestAlgorithmContrast:
    """The comparison the simulator exists for: on batches of consecutive
    linearized subdomains the whole-quotient walk diverges far less than the
    two-sided one, and the role-swapping variant dodges the two-path penalty."""

    def test_regular_diverges_less(self, batch):
        reg = simulate_warps(batch, Algorithm.REGULAR)
        lef = simulate_warps(batch, Algorithm.LEFEVRE)
        assert reg.mean_nmdm < lef.mean_nmdm

    def test_swap_serializes_fewer_instructions(self, batch):
        lef = simulate_warps(batch, Algorithm.LEFEVRE)
        swp = simulate_warps(batch, Algorithm.LEFEVRE_SWAP)
        classic = sum(w.branch_serialized_instructions for w in lef.warps)
        swapped = sum(w.branch_serialized_instructions for w in swp.warps)
        assert swapped < classic

    def test_swap_keeps_classic_verdicts(self, batch):
        lef = simulate_warps(batch, Algorithm.LEFEVRE)
        swp = simulate_warps(batch, Algorithm.LEFEVRE_SWAP)
        for tl, ts in zip(lef.traces, swp.traces):
            for ol, os in zip(tl.outcomes, ts.outcomes):
                assert (ol.verdict, ol.d) == (os.verdict, os.d)
