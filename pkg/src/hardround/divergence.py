"""Lockstep warp simulator for the lower-bound searches.

Models a group of SIMT lanes executing one search per lane: lanes run in
lockstep, so a warp is busy until its slowest lane finishes, and a
data-dependent branch whose lanes disagree serializes both paths.  The
simulator only observes the searches (it replays the exact same core with a
trace attached), so verdicts and bounds are bit-identical to standalone runs.

Divergence is summarized by the mean deviation to the maximum of the per-lane
loop counts: MDM(l) = max(l) - mean(l), and its normalized form
NMDM(l) = 1 - mean(l)/max(l).  A warp whose lanes iterate {10,20,30,40} has
MDM 15 and NMDM 0.375; a warp of equal lanes has both 0.

Branch serialization uses a static per-algorithm cost table (instruction
counts of the then/else bodies, read off the core loops).  The swap variant
funnels both roles through one body, so its lanes never pay the two-path
penalty; the plain walk does.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .fixedpoint import DivisionMode, UFrac
from .lowerbound import SEARCHES, Algorithm, SearchOutcome, SearchProblem

WARP_WIDTH = 32


def linear_problem_batch(
    fn: str,
    fmt,
    binade: int,
    domain_size: int,
    domain_count: int | None = None,
    word_bits: int = 64,
    eps: Fraction | None = None,
) -> list[SearchProblem]:
    """Per-subdomain linearized search problems over consecutive subdomains
    of one input binade: the local model min{(b - a*x) mod 1 : x < N} that the
    filtering phases hand to the lower-bound searches, with a and b taken from
    the function's exact value and slope at each subdomain start.

    Because the slope varies slowly from one subdomain to the next, the a
    values (hence their quotient structure) are nearly constant across a warp
    while the offsets b jump around -- the regularity contrast the divergence
    tables measure."""
    from .evalf import enclose, is_polynomial, poly_value, value_exponent
    from .fpmodel import Domain

    if domain_size < 1:
        raise ValueError("domain_size must be >= 1")
    half = 1 << (fmt.precision - 1)
    total = half if domain_count is None else domain_count * domain_size
    if not 1 <= total <= half:
        raise ValueError("batch does not fit in one binade")
    if eps is None:
        eps = fmt.eps
    prec = word_bits + 32
    ulp_in = Fraction(1, 1 << (fmt.precision - 1 - binade))
    problems: list[SearchProblem] = []
    for start in range(0, total, domain_size):
        dom = Domain(half + start, binade + 1, 1, 0)
        x = dom.x_at(0, fmt)
        e_out = value_exponent(fn, x)
        scale = Fraction(2) ** (fmt.precision - e_out)
        vlo, vhi = enclose(fn, x, prec)
        vmid = (vlo + vhi) / 2
        mid = (vmid * scale) % 1
        if fn == "exp":
            slope = vmid
        elif fn == "exp2":
            llo, lhi = enclose("log", Fraction(2), prec)
            slope = vmid * (llo + lhi) / 2
        elif fn == "log":
            slope = 1 / x
        elif fn == "identity":
            slope = Fraction(1)
        elif is_polynomial(fn):
            slope = poly_value(fn, x, 1)
        else:
            raise ValueError(f"unsupported function {fn!r}")
        a = (slope * ulp_in * scale) % 1
        count = min(domain_size, total - start)
        problems.append(SearchProblem(
            a=UFrac.from_fraction(a, word_bits),
            b=UFrac.from_fraction(mid, word_bits),
            eps=UFrac.from_fraction(2 * eps, word_bits),
            count=count,
        ))
    return problems


def mdm(lane_iterations: Sequence[int]) -> Fraction:
    """max(l) - mean(l), exact."""
    if not lane_iterations:
        raise ValueError("empty lane vector")
    return max(lane_iterations) - Fraction(sum(lane_iterations), len(lane_iterations))


def nmdm(lane_iterations: Sequence[int]) -> Fraction:
    """1 - mean(l)/max(l), exact; an all-zero vector counts as no divergence."""
    if not lane_iterations:
        raise ValueError("empty lane vector")
    peak = max(lane_iterations)
    if peak == 0:
        return Fraction(0)
    return 1 - Fraction(sum(lane_iterations), len(lane_iterations)) / peak


def branch_serialization_estimate(n_then: int, n_else: int, diverged: bool,
                                  taken: bool = True) -> int:
    """Instructions issued for one conditional: both paths when the warp
    diverged, otherwise the single path all lanes took (`taken` selects
    which; the then-path by default)."""
    if n_then < 0 or n_else < 0:
        raise ValueError("negative instruction count")
    if diverged:
        return n_then + n_else
    return n_then if taken else n_else


@dataclass(frozen=True, slots=True)
class BranchWeights:
    """Static instruction counts for the main conditional of one algorithm.

    unified=True marks cores whose two branch outcomes share one instruction
    body (role-swapping / straight-line variants): disagreeing lanes then pay
    only a small predicated fixup instead of executing both paths."""

    then_cost: int
    else_cost: int
    unified: bool = False
    fixup_cost: int = 1


BRANCH_WEIGHTS = {
    Algorithm.LEFEVRE: BranchWeights(then_cost=7, else_cost=9),
    Algorithm.LEFEVRE_SWAP: BranchWeights(then_cost=9, else_cost=9, unified=True, fixup_cost=2),
    Algorithm.REGULAR: BranchWeights(then_cost=6, else_cost=6),
    Algorithm.REGULAR_UNROLLED: BranchWeights(then_cost=3, else_cost=1, unified=True),
}


@dataclass(frozen=True, slots=True)
class WarpTrace:
    """Raw observations of one warp: per-lane loop counts, per-lane
    (taken, not_taken) branch tallies, per-lane decision streams in issue
    order, and the untouched search outcomes."""

    lane_iterations: tuple[int, ...]
    lane_branch_counts: tuple[tuple[int, int], ...]
    branch_paths: tuple[tuple[bool, ...], ...]
    outcomes: tuple[SearchOutcome, ...]


@dataclass(frozen=True, slots=True)
class WarpStats:
    mdm: Fraction
    nmdm: Fraction
    serialized_iterations: int
    branch_serialized_instructions: int

    def __post_init__(self) -> None:
        if not 0 <= self.nmdm < 1:
            raise ValueError("nmdm out of [0, 1)")


@dataclass(frozen=True, slots=True)
class DivergenceReport:
    """Per-warp traces and stats plus the batch aggregates the comparison
    tables are built from."""

    algorithm: Algorithm
    traces: tuple[WarpTrace, ...]
    warps: tuple[WarpStats, ...]
    min_iterations: int
    max_iterations: int
    mean_iterations: Fraction
    mean_nmdm: Fraction


def _warp_serialized_instructions(trace: WarpTrace, weights: BranchWeights) -> int:
    paths = trace.branch_paths
    depth = max((len(p) for p in paths), default=0)
    total = 0
    for step in range(depth):
        live = [p[step] for p in paths if len(p) > step]
        any_then = any(live)
        any_else = not all(live)
        diverged = any_then and any_else
        if weights.unified:
            total += max(weights.then_cost, weights.else_cost)
            if diverged:
                total += weights.fixup_cost
        else:
            total += branch_serialization_estimate(
                weights.then_cost, weights.else_cost, diverged, taken=any_then)
    return total


def _warp_stats(trace: WarpTrace, weights: BranchWeights) -> WarpStats:
    lanes = trace.lane_iterations
    return WarpStats(
        mdm=mdm(lanes),
        nmdm=nmdm(lanes),
        serialized_iterations=max(lanes),
        branch_serialized_instructions=_warp_serialized_instructions(trace, weights),
    )


def simulate_warps(
    problems: Iterable[SearchProblem],
    algo: Algorithm | str = Algorithm.REGULAR,
    div_mode: DivisionMode = DivisionMode.HYBRID,
    warp_width: int = WARP_WIDTH,
) -> DivergenceReport:
    """Group an ordered problem batch into warps of `warp_width` lanes and run
    the chosen search per lane, recording loop counts and branch decisions.

    The batch order is preserved (consecutive subdomains land in the same
    warp, which is the whole point of the regularity comparison); a short
    final warp simply has fewer lanes."""
    algo = Algorithm(algo)
    if warp_width < 1:
        raise ValueError("warp_width must be >= 1")
    search = SEARCHES[algo]
    weights = BRANCH_WEIGHTS[algo]
    batch = list(problems)
    if not batch:
        raise ValueError("empty problem batch")

    traces: list[WarpTrace] = []
    for base in range(0, len(batch), warp_width):
        lanes = batch[base:base + warp_width]
        iters: list[int] = []
        counts: list[tuple[int, int]] = []
        paths: list[tuple[bool, ...]] = []
        outs: list[SearchOutcome] = []
        for problem in lanes:
            decisions: list[bool] = []
            out = search(problem, mode=div_mode, trace=decisions)
            iters.append(out.iterations)
            counts.append((sum(decisions), len(decisions) - sum(decisions)))
            paths.append(tuple(decisions))
            outs.append(out)
        traces.append(WarpTrace(tuple(iters), tuple(counts), tuple(paths), tuple(outs)))

    stats = tuple(_warp_stats(t, weights) for t in traces)
    all_iters = [n for t in traces for n in t.lane_iterations]
    return DivergenceReport(
        algorithm=algo,
        traces=tuple(traces),
        warps=stats,
        min_iterations=min(all_iters),
        max_iterations=max(all_iters),
        mean_iterations=Fraction(sum(all_iters), len(all_iters)),
        mean_nmdm=Fraction(sum(s.nmdm for s in stats), len(stats)),
    )


def report_rows(report: DivergenceReport) -> list[tuple[int, int, float, float, float]]:
    """Per-warp histogram rows (warp_id, max_iter, mean_iter, mdm, nmdm) for
    CSV emission."""
    rows = []
    for warp_id, (trace, stats) in enumerate(zip(report.traces, report.warps)):
        lanes = trace.lane_iterations
        rows.append((
            warp_id,
            stats.serialized_iterations,
            float(Fraction(sum(lanes), len(lanes))),
            float(stats.mdm),
            float(stats.nmdm),
        ))
    return rows
