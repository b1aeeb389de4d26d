"""Acceptance suite: one test per contract criterion.

Each test prints a single PASS/FAIL line with the measured quantities (visible
with `pytest -s tests/test_acceptance.py`); the same line is the assertion
message on failure.
"""

import math
import random
import time
from fractions import Fraction

import numpy as np

from hardround.cli import main as cli_main
from hardround.contfrac import CFConfig, cf_init, cf_next
from hardround.divergence import linear_problem_batch, simulate_warps
from hardround.fixedpoint import DivisionMode, UFrac
from hardround.fpmodel import Domain, FpFormat
from hardround.lowerbound import (
    SEARCHES,
    Algorithm,
    SearchProblem,
    _lefevre_core,
    _lefevre_swap_core,
    _regular_core,
    _regular_unrolled_core,
    lefevre_lb,
    regular_lb,
)
from hardround.oracle import brute_min, cf_quotients_ref, exhaustive_hr_search
from hardround.pipeline import PhaseConfig, PipelineConfig, run_pipeline
from hardround.polygen import (
    BinomialPoly,
    PolyGenConfig,
    newton_interpolate,
    straightforward_shift,
    tabulated_shift_step,
)

ONE = 1 << 64


def report(num: int, title: str, ok: bool, detail: str) -> None:
    line = f"criterion {num} ({title}): {'PASS' if ok else 'FAIL'} -- {detail}"
    print(line)
    assert ok, line


def _pipeline_cfg(fn: str, fmt: FpFormat, algo: str, mode: DivisionMode) -> PipelineConfig:
    pg = PolyGenConfig(tau=16, N=64, mu=4, nu=4, delta=2,
                       limbs=8, frac_bits=96, guard=32)
    ph = PhaseConfig(algorithm=algo, div_mode=mode, phase2_split=8, N1=64)
    return PipelineConfig(fn=fn, fmt=fmt, polygen=pg, phase=ph)


def _essence(records):
    return {(r.argument, r.distance.raw, r.distance.width, r.undecided)
            for r in records}


def test_criterion_1_oracle_set_equality():
    """Pipeline output equals the exhaustive oracle, exactly, for exp at
    p=13 (one full binade) and p=16 (a 2^16-argument range), under both
    search algorithms and all three division modes.  Budget: 60 s."""
    t0 = time.perf_counter()
    combos = [(algo, mode) for algo in ("lefevre", "regular")
              for mode in DivisionMode]
    counts = {}
    mismatches = []
    runs = 0
    for fmt, binades in ((FpFormat(precision=13, eps_bits=8), (0,)),
                         (FpFormat(precision=16, eps_bits=8), (0, 1))):
        for binade in binades:
            half = 1 << (fmt.precision - 1)
            oracle = exhaustive_hr_search("exp", Domain(half, binade + 1, half, 0), fmt)
            want = _essence(oracle)
            counts[(fmt.precision, binade)] = len(want)
            for algo, mode in combos:
                records, _ = run_pipeline(binade, _pipeline_cfg("exp", fmt, algo, mode))
                runs += 1
                if _essence(records) != want:
                    mismatches.append((fmt.precision, binade, algo, mode.value))
    elapsed = time.perf_counter() - t0
    ok = not mismatches and elapsed < 60.0
    report(1, "oracle set equality", ok,
           f"exp p13 binade 0: {counts[(13, 0)]} cases, p16 binades 0/1: "
           f"{counts[(16, 0)]}+{counts[(16, 1)]} cases; {runs} pipeline runs "
           f"exactly equal the oracle ({len(mismatches)} mismatches); "
           f"{elapsed:.1f}s < 60s")


def test_criterion_2_lower_bound_soundness():
    """Exhaustive sweep over all (a, b) with denominator 2^10 at
    N in {16, 256, 1024}: every Success has brute_min >= eps and d <= brute_min,
    for all four algorithms.  Runs the integer cores on the native 2^10 grid,
    then ties a random sample back to the word-width API and brute_min."""
    grid = 1 << 10
    eps = grid >> 6  # eps = 2^-6
    ns = (16, 256, 1024)
    cores = {
        Algorithm.LEFEVRE: lambda a, b, n: _lefevre_core(a, b, eps, n, grid, None, None),
        Algorithm.LEFEVRE_SWAP: lambda a, b, n: _lefevre_swap_core(a, b, eps, n, grid, None, None),
        Algorithm.REGULAR: lambda a, b, n: _regular_core(a, b, eps, n, grid, None),
        Algorithm.REGULAR_UNROLLED: lambda a, b, n: _regular_unrolled_core(a, b, eps, n, grid, None),
    }
    core_list = list(cores.values())

    b_all = np.arange(grid, dtype=np.int64)
    x_all = np.arange(grid, dtype=np.int64)

    def truth_table(a: int, n: int) -> list[int]:
        # min over x < n of (b - a*x) mod grid, for every b at once
        pts = np.unique((a * x_all[:n]) % grid)
        left = np.searchsorted(pts, b_all, side="right") - 1
        return ((b_all - pts[left]) % grid).tolist()

    # the vectorized reference must agree with a literal scan
    rng = random.Random(1)
    for _ in range(50):
        a, b, n = rng.randrange(grid), rng.randrange(grid), rng.choice(ns)
        literal = min((b - a * x) % grid for x in range(n))
        assert truth_table(a, n)[b] == literal

    violations = 0
    successes = 0
    for a in range(grid):
        for n in ns:
            truths = truth_table(a, n)
            for b in range(grid):
                t = truths[b]
                for core in core_list:
                    ok, d, _, _ = core(a, b, n)
                    if ok:
                        successes += 1
                        if t < eps or d > t:
                            violations += 1

    # word-width spot checks: the public searches and brute_min see the same
    # problems embedded in 64-bit rasters and must agree with the grid cores
    shift = 54
    tie_failures = 0
    rng = random.Random(2)
    for _ in range(512):
        a, b = rng.randrange(grid), rng.randrange(grid)
        n = rng.choice(ns)
        prob = SearchProblem(UFrac(a << shift, 64), UFrac(b << shift, 64),
                             UFrac(eps << shift, 64), n)
        bm, _ = brute_min(prob.a, prob.b, n)
        for algo, core in cores.items():
            out = SEARCHES[algo](prob)
            ok, d, _, _ = core(a, b, n)
            if out.success != ok or out.d.raw != d << shift:
                tie_failures += 1
            elif out.success and not (bm.raw >= eps << shift and out.d.raw <= bm.raw):
                tie_failures += 1

    total = 4 * len(ns) * grid * grid
    ok = violations == 0 and tie_failures == 0
    report(2, "lower-bound soundness", ok,
           f"{total} searches over all (a, b)/2^10, N in {ns}: "
           f"{successes} successes, {violations} soundness violations; "
           f"512 word-width spot checks, {tie_failures} disagreements")


def test_criterion_3_two_length_identity():
    """The circle identity q_i*theta_(i-1,t) + q_(i-1,t)*theta_i = 2^W holds
    raw-exactly along random W=64 expansions (>= 10^4 configurations); gap
    multisets match brute force for denominators <= 2^12; the worked 14/45
    table is reproduced row for row."""
    rng = random.Random(3)
    checked = 0
    identity_failures = 0
    while checked < 10_000:
        cfg = cf_init(UFrac(rng.randrange(1, ONE), 64))
        for _ in range(64):
            if cfg.identity_lhs() != ONE:
                identity_failures += 1
            checked += 1
            if cfg.terminated:
                break
            cfg = cf_next(cfg)

    gap_failures = 0
    gap_checks = 250
    for _ in range(gap_checks):
        modulus = rng.randint(8, 1 << 12)
        a_units = rng.randint(1, modulus - 1)
        cfg = CFConfig(index=0, partial=0, theta_cur_raw=a_units,
                       theta_prev_t_raw=modulus, q_cur=1, q_prev_t=0, width=64)
        for _ in range(rng.randint(0, 12)):
            if cfg.terminated:
                break
            cfg = cf_next(cfg)
        pts = sorted({(a_units * x) % modulus for x in range(cfg.points_placed)})
        got = sorted(q - p for p, q in zip(pts, pts[1:] + [pts[0] + modulus]))
        want = sorted([cfg.theta_prev_t_raw] * cfg.q_cur
                      + [cfg.theta_cur_raw] * cfg.q_prev_t)
        if got != [g for g in want if g]:
            gap_failures += 1

    table = [
        (0, 0, 0, 1, 45, 14),
        (0, 1, 1, 1, 31, 14),
        (0, 2, 2, 1, 17, 14),
        (1, 0, 1, 3, 14, 3),
        (1, 1, 4, 3, 11, 3),
        (1, 2, 7, 3, 8, 3),
        (1, 3, 10, 3, 5, 3),
        (2, 0, 3, 13, 3, 2),
        (3, 0, 13, 16, 2, 1),
        (3, 1, 29, 16, 1, 1),
        (4, 0, 16, 45, 1, 0),
    ]
    cfg = CFConfig(index=0, partial=0, theta_cur_raw=14, theta_prev_t_raw=45,
                   q_cur=1, q_prev_t=0, width=64)
    rows = []
    while True:
        rows.append((cfg.index, cfg.partial, cfg.q_prev_t, cfg.q_cur,
                     cfg.theta_prev_t_raw, cfg.theta_cur_raw))
        if cfg.terminated:
            break
        cfg = cf_next(cfg)
    table_ok = rows == table

    ok = identity_failures == 0 and gap_failures == 0 and table_ok
    report(3, "two-length identity", ok,
           f"{checked} configurations, {identity_failures} identity failures; "
           f"{gap_checks} gap multisets, {gap_failures} mismatches; "
           f"14/45 table row-for-row: {table_ok}")


def test_criterion_4_point_count_bounds():
    """Classic search places n < 2N points on every tested problem; the
    whole-quotient search's geometric mean n/N stays <= 3.69 (the
    Khinchin-constant bound) over 10^4 random 64-bit slopes at N = 2^15."""
    n_target = 1 << 15
    runs = 10_000
    rng = random.Random(2024)
    log_total = 0.0
    lefevre_violations = 0
    for _ in range(runs):
        prob = SearchProblem(UFrac(rng.randrange(1, ONE), 64),
                             UFrac(rng.randrange(ONE), 64),
                             UFrac(1, 64), n_target)
        reg = regular_lb(prob)
        log_total += math.log(reg.points_placed / n_target)
        lef = lefevre_lb(prob)
        if not lef.points_placed < 2 * n_target:
            lefevre_violations += 1
    geo_mean = math.exp(log_total / runs)
    ok = lefevre_violations == 0 and geo_mean <= 3.69
    report(4, "point-count bounds", ok,
           f"classic n < 2N on {runs}/{runs} problems "
           f"({lefevre_violations} violations); regular geometric mean "
           f"n/N = {geo_mean:.3f} <= 3.69")


def test_criterion_5_divergence_reproduction():
    """On 2^10 consecutive subdomains of a toy exp binade in 32-lane warps,
    the whole-quotient search diverges an order of magnitude less than the
    classic one, and its per-warp iteration spread is tiny."""
    fmt = FpFormat(precision=33, eps_bits=22)
    batch = linear_problem_batch("exp", fmt, 0, 1 << 9, domain_count=1 << 10)
    reg = simulate_warps(batch, Algorithm.REGULAR)
    lef = simulate_warps(batch, Algorithm.LEFEVRE)
    tight = sum(1 for t in reg.traces
                if max(t.lane_iterations) - min(t.lane_iterations) <= 2)
    spread_frac = tight / len(reg.traces)
    ok = (reg.mean_nmdm <= Fraction(5, 100)
          and lef.mean_nmdm >= Fraction(10, 100)
          and spread_frac >= 0.95)
    report(5, "divergence reproduction", ok,
           f"{len(batch)} subdomains in {len(reg.traces)} warps: regular mean "
           f"NMDM {float(reg.mean_nmdm):.4f} <= 0.05, classic "
           f"{float(lef.mean_nmdm):.4f} >= 0.10, iteration spread <= 2 on "
           f"{spread_frac:.0%} of warps >= 95%")


def test_criterion_6_taylor_shift_goldens():
    """Cube interpolation and difference-table goldens reproduced exactly;
    the one-step tabulated shift iterated i times equals the direct Toeplitz
    shift on 10^3 random polynomials.  Budget: 10 s."""
    t0 = time.perf_counter()
    interp = newton_interpolate([0, 1, 8, 27])
    interp_ok = interp.coeffs == (0, 1, 6, 6)

    # tabulated evaluation of the cube: each step advances the difference
    # column; steps 0..5 consume the delta rows at those arguments
    cols = [list(interp.coeffs)]
    for _ in range(6):
        cols.append(tabulated_shift_step(cols[-1]))
    rows = [[cols[s][0] for s in range(7)]] + \
           [[cols[s][j] for s in range(6)] for j in (1, 2, 3)]
    rows_ok = rows == [
        [0, 1, 8, 27, 64, 125, 216],
        [1, 7, 19, 37, 61, 91],
        [6, 12, 18, 24, 30, 36],
        [6, 6, 6, 6, 6, 6],
    ]

    rng = random.Random(6)
    shift_failures = 0
    cases = 1000
    for _ in range(cases):
        degree = rng.randint(0, 10)
        coeffs = [rng.randint(-999, 999) for _ in range(degree + 1)]
        if not any(coeffs):
            coeffs[-1] = 1
        poly = BinomialPoly(tuple(coeffs))
        i = rng.randint(0, 1000)
        col = list(poly.coeffs)
        for _ in range(i):
            col = tabulated_shift_step(col)
        if tuple(col) != straightforward_shift(poly, i).coeffs:
            shift_failures += 1
    elapsed = time.perf_counter() - t0
    ok = interp_ok and rows_ok and shift_failures == 0 and elapsed < 10.0
    report(6, "Taylor-shift goldens", ok,
           f"cube interpolation {interp_ok}, difference rows {rows_ok}; "
           f"{cases} random shifts, {shift_failures} mismatches; "
           f"{elapsed:.1f}s < 10s")


def test_criterion_7_regular_iteration_law():
    """The whole-quotient search's iteration count equals the number of
    reference quotients consumed to reach u+v >= N, on 10^4 random problems."""
    rng = random.Random(7)
    runs = 10_000
    mismatches = 0
    skipped = 0
    for _ in range(runs):
        a = rng.randrange(1, ONE)
        n = rng.randint(2, 1 << 14)
        prob = SearchProblem(UFrac(a, 64), UFrac(rng.randrange(ONE), 64),
                             UFrac(1, 64), n)
        out = regular_lb(prob)
        if out.iterations == 0:
            skipped += 1  # immediate exit has no quotient analog
            continue
        ks = cf_quotients_ref(Fraction(a, ONE))
        u, v = 1, 0
        steps = 0
        for k in ks:
            steps += 1
            u, v = v + k * u, u
            if u + v >= n:
                break
        if out.iterations != steps:
            mismatches += 1
    ok = mismatches == 0
    report(7, "regular iteration law", ok,
           f"{runs} random problems: {mismatches} mismatches "
           f"({skipped} immediate exits skipped)")


def test_criterion_8_cli_determinism(capsys):
    """Two identical CLI invocations produce byte-identical record streams."""
    rc1 = cli_main(["search"])
    out1 = capsys.readouterr().out
    rc2 = cli_main(["search"])
    out2 = capsys.readouterr().out
    rc3 = cli_main(["divergence"])
    div1 = capsys.readouterr().out
    rc4 = cli_main(["divergence"])
    div2 = capsys.readouterr().out
    ok = (rc1 == rc2 == rc3 == rc4 == 0 and out1 == out2 and div1 == div2
          and out1 and div1)
    # the report line must survive the capsys window above
    line = (f"criterion 8 (CLI determinism): {'PASS' if ok else 'FAIL'} -- "
            f"search reruns byte-identical ({len(out1)} bytes), divergence "
            f"reruns byte-identical ({len(div1)} bytes)")
    with capsys.disabled():
        print(line)
    assert ok, line
