"""Three-phase HR-case filtering over a binade.

Phase 1 runs the Boolean lower-bound test on whole domains using degree-1
truncations of the per-domain polynomials; phase 2 re-tests the survivors on
s-way subdomains after Taylor-shifting the polynomial to each subdomain
start; phase 3 walks every remaining argument with exact second-order
finite differences and flags values inside the eps' window of the degree-2
polynomial.  A final confirmation step re-decides each flagged argument
against the true function value, so the emitted records match the exhaustive
oracle argument for argument.

The error budget makes the funnel sound rather than heuristic: a true HR
case (distance < eps) stays inside every phase's widened window
(eps' = eps + eps_approx, eps'' = eps' + eps_trunc, plus word-quantization
padding), so filtering can only discard arguments that are provably safe.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .evalf import decide_hr, is_polynomial, value_exponent
from .fixedpoint import DivisionMode, LIMB_BITS, MPInt, UFrac
from .fpmodel import (
    Domain,
    ErrorBudget,
    FpFormat,
    HrCaseRecord,
    float_bits,
)
from .lowerbound import SEARCHES, Algorithm, SearchProblem
from .polygen import (
    BinomialPoly,
    PolyGenConfig,
    domain_coefficient_sets,
    hierarchical_split,
    straightforward_shift,
    taylor_approx,
)

ALGORITHMS = ("lefevre", "regular", "auto")
SELECT_THRESHOLD = 1e-3


@dataclass(frozen=True, slots=True)
class PhaseConfig:
    """Filter knobs: which search runs the Boolean tests, its division mode,
    the phase-2 split factor s, an optional ceiling on the per-domain error
    budgets, the phase-1 domain size N1, and the worker count."""

    algorithm: str = "auto"
    div_mode: DivisionMode = DivisionMode.HYBRID
    phase2_split: int = 8
    budgets: ErrorBudget | None = None
    N1: int = 1 << 6
    parallel_width: int = 1

    def __post_init__(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"algorithm must be one of {ALGORITHMS}")
        if not 2 <= self.phase2_split <= 64:
            raise ValueError("phase2_split outside {2..64}")
        if self.N1 % self.phase2_split:
            raise ValueError("phase2_split must divide N1")
        if not 1 <= self.parallel_width <= 64:
            raise ValueError("parallel_width outside [1, 64]")


@dataclass(frozen=True, slots=True)
class PipelineConfig:
    fn: str
    fmt: FpFormat
    polygen: PolyGenConfig = PolyGenConfig()
    phase: PhaseConfig = PhaseConfig()
    word_bits: int = 64

    def __post_init__(self) -> None:
        if self.phase.N1 != self.polygen.N:
            raise ValueError("phase N1 and polygen N must agree")
        if self.word_bits not in (32, 64):
            raise ValueError("word_bits must be 32 or 64")
        if self.polygen.frac_bits > self.polygen.limbs * LIMB_BITS:
            raise ValueError("difference registers would not fit the limb budget")


@dataclass(frozen=True, slots=True)
class PhaseRow:
    phase: str
    domains_in: int
    domains_out: int
    arguments_covered: int
    wall_ms: float


@dataclass(slots=True)
class PhaseStats:
    rows: list[PhaseRow] = field(default_factory=list)
    algorithm_choices: list[tuple[int, str]] = field(default_factory=list)

    def row(self, phase: str) -> PhaseRow:
        for r in self.rows:
            if r.phase == phase:
                return r
        raise KeyError(phase)

    def phase3_phase1_ratio(self) -> float:
        p1 = self.row("phase1").domains_in
        p3 = self.row("phase3").domains_in
        return p3 / p1 if p1 else 0.0


@dataclass(frozen=True, slots=True)
class DomainTask:
    """One phase-1 work item: a domain, the binomial coefficients of its
    exact degree-<=2 polynomial (scale 2^-frac_bits), and its super-domain's
    approximation budget."""

    domain: Domain
    coeffs: tuple
    frac_bits: int
    eps_prime: Fraction
    e_out: int


@dataclass(frozen=True, slots=True)
class SubdomainTask:
    parent: DomainTask
    sub_index: int
    start: int          # argument offset inside the parent domain
    count: int
    coeffs: tuple       # polynomial shifted to the subdomain start


def _coeff_int(c) -> int:
    return c.to_int() if isinstance(c, MPInt) else int(c)


def _truncation_eps(coeffs: tuple, count: int, frac_bits: int) -> Fraction:
    """Upper bound of |P - degree-1 truncation| over x < count:
    |c_2| * (count-1)^2 in scale units."""
    if len(coeffs) < 3:
        return Fraction(0)
    return Fraction(abs(_coeff_int(coeffs[2])) * (count - 1) ** 2, 1 << frac_bits)


def _boolean_problem(
    coeffs: tuple,
    count: int,
    frac_bits: int,
    eps_dprime: Fraction,
    word_bits: int,
) -> SearchProblem:
    """Build {b - a*x mod 1} < threshold from the degree-1 truncation.

    b carries the one-sided shift by the padded eps; the pad also absorbs the
    floor-quantization drift of a and b over count steps, so a Success verdict
    certifies the absence of HR cases despite W-bit truncation.
    """
    one_f = 1 << frac_bits
    s0 = _coeff_int(coeffs[0]) % one_f
    s1 = (-_coeff_int(coeffs[1])) % one_f if len(coeffs) > 1 else 0
    pad = -((-eps_dprime.numerator << word_bits) // eps_dprime.denominator)
    pad += count + 1
    mask = (1 << word_bits) - 1
    b_raw = (((s0 << word_bits) >> frac_bits) + pad) & mask
    a_raw = (s1 << word_bits) >> frac_bits
    return SearchProblem(
        a=UFrac(a_raw, word_bits),
        b=UFrac(b_raw, word_bits),
        eps=UFrac(2 * pad, word_bits),
        count=count,
    )


def _budget(task_eps_prime: Fraction, eps_trunc: Fraction, fmt: FpFormat) -> ErrorBudget:
    return ErrorBudget(
        eps=fmt.eps,
        eps_approx=task_eps_prime - fmt.eps,
        eps_trunc=eps_trunc,
        eps_shift=Fraction(0),
    )


def select_algorithm(prev_interval_stats: PhaseStats | None, threshold: float = SELECT_THRESHOLD) -> str:
    """Previous interval's phase3/phase1 interval ratio decides the search:
    heavy funnels keep per-test cost low with the classic walk, light ones
    exploit the regular walk's uniform control flow."""
    if prev_interval_stats is None:
        return "regular"
    try:
        ratio = prev_interval_stats.phase3_phase1_ratio()
    except KeyError:
        return "regular"
    return "lefevre" if ratio > threshold else "regular"


def _run_search(algo: str, problem: SearchProblem, cfg: PipelineConfig):
    return SEARCHES[Algorithm(algo)](problem, mode=cfg.phase.div_mode)


def _map_tasks(fn, tasks, width: int):
    if width <= 1 or len(tasks) < 2:
        return [fn(t) for t in tasks]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=width) as pool:
        return list(pool.map(fn, tasks))


def phase1(tasks: Sequence[DomainTask], cfg: PipelineConfig, algo: str | None = None) -> list[int]:
    """Domain ids whose Boolean lower-bound test fails (may hold an HR case).

    Success domains are certified free of (p, eps'') HR cases for the
    degree-1 truncation, hence of true HR cases by the budget chain.
    """
    algo = algo or (cfg.phase.algorithm if cfg.phase.algorithm != "auto" else "regular")

    def test(task: DomainTask) -> bool:
        n = task.domain.count
        eps_tr = _truncation_eps(task.coeffs, n, task.frac_bits)
        budget = _budget(task.eps_prime, eps_tr, cfg.fmt)
        if cfg.phase.budgets is not None and budget.eps_dprime > cfg.phase.budgets.eps_dprime:
            raise ValueError("domain budget exceeds the configured ceiling")
        problem = _boolean_problem(task.coeffs, n, task.frac_bits, budget.eps_dprime, cfg.word_bits)
        return _run_search(algo, problem, cfg).success

    verdicts = _map_tasks(test, list(tasks), cfg.phase.parallel_width)
    return [t.domain.domain_id for t, ok in zip(tasks, verdicts) if not ok]


def phase2(tasks: Sequence[DomainTask], cfg: PipelineConfig, algo: str | None = None) -> list[SubdomainTask]:
    """Split each failing domain s ways, Taylor-shift its polynomial to each
    subdomain start, and re-run the Boolean test with the refined budget."""
    algo = algo or (cfg.phase.algorithm if cfg.phase.algorithm != "auto" else "regular")
    s = cfg.phase.phase2_split

    def split(task: DomainTask) -> list[SubdomainTask]:
        out = []
        poly = BinomialPoly(task.coeffs, task.frac_bits)
        n = task.domain.count
        step = max(n // s, 1)
        starts = list(range(0, n, step))
        for j, start in enumerate(starts):
            cnt = min(step, n - start)
            shifted = straightforward_shift(poly, start).coeffs
            eps_tr = _truncation_eps(shifted, cnt, task.frac_bits)
            budget = _budget(task.eps_prime, eps_tr, cfg.fmt)
            problem = _boolean_problem(shifted, cnt, task.frac_bits, budget.eps_dprime, cfg.word_bits)
            if not _run_search(algo, problem, cfg).success:
                out.append(SubdomainTask(task, j, start, cnt, shifted))
        return out

    nested = _map_tasks(split, list(tasks), cfg.phase.parallel_width)
    return [sub for group in nested for sub in group]


def phase3_exhaustive(tasks: Sequence[SubdomainTask], cfg: PipelineConfig) -> list[HrCaseRecord]:
    """Exact exhaustive walk of the surviving subdomains.

    Three running registers hold the difference column of the degree-2
    polynomial mod 1 (i.e. mod 2^frac_bits in scale units); each argument
    costs two additions.  Arguments whose polynomial value lies within the
    eps' window are emitted with their polynomial distance -- exact for the
    polynomial, a candidate superset for the true function.
    """
    out = []
    for task in tasks:
        fb = task.parent.frac_bits
        one_f = 1 << fb
        mask = one_f - 1
        window = -((-task.parent.eps_prime.numerator << fb) // task.parent.eps_prime.denominator) + 1
        column = [_coeff_int(c) & mask for c in task.coeffs]
        while len(column) < 3:
            column.append(0)
        v, d1, d2 = column[0], column[1], column[2]
        fmt = cfg.fmt
        for x in range(task.count):
            if v < window or v > one_f - window:
                arg = task.parent.domain.x_at(task.start + x, fmt)
                dist = min(v, one_f - v)
                out.append(
                    HrCaseRecord(
                        float_bits(arg, fmt),
                        UFrac.from_fraction(Fraction(dist, one_f)),
                        task.parent.domain.domain_id,
                    )
                )
            v = (v + d1) & mask
            d1 = (d1 + d2) & mask
    return out


def output_binade_pieces(fn: str, binade: int, fmt: FpFormat) -> list[tuple[int, int, int]]:
    """Split a binade's argument indices into maximal runs of constant
    output exponent e(fn(X)): list of (start_index, count, e_out).

    Arguments where fn is exactly zero (log at 1) are left out: zero has no
    mantissa and is never an HR case.
    """
    count = 1 << (fmt.precision - 1)
    base = Domain(m_start=1 << (fmt.precision - 1), exponent=binade + 1, count=count)

    def e_at(i: int) -> int:
        return value_exponent(fn, base.x_at(i, fmt))

    if is_polynomial(fn):
        # a polynomial's output exponent need not be monotone along the
        # binade, so scan exactly (cheap: pure rational arithmetic), skipping
        # any zero crossings outright
        pieces = []
        run_start, run_e = None, None
        for i in range(count):
            try:
                e_i = e_at(i)
            except ValueError:  # fn(x) == 0 here
                e_i = None
            if e_i != run_e:
                if run_e is not None:
                    pieces.append((run_start, i - run_start, run_e))
                run_start, run_e = i, e_i
        if run_e is not None:
            pieces.append((run_start, count - run_start, run_e))
        return pieces

    start = 0
    if fn == "log" and binade == 0:
        start = 1  # log(1) = 0
    pieces = []
    while start < count:
        e0 = e_at(start)
        lo, hi = start, count - 1
        if e_at(hi) == e0:
            pieces.append((start, count - start, e0))
            break
        # last index with e == e0; e is monotone along the binade
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if e_at(mid) == e0:
                lo = mid
            else:
                hi = mid - 1
        pieces.append((start, lo - start + 1, e0))
        start = lo + 1
    return pieces


def _piece_domain_size(fn: str, piece_dom: Domain, e_out: int, cfg: PipelineConfig) -> int:
    """Largest domain size (power of two up to N1) whose projected truncation
    term |c_2|*(N-1)^2 stays well under the mod-1 budget on this piece.

    Where the normalized function is too curved for any approximation -- log
    magnified by 2^(p-e) just above 1 -- this walks down to N = 1 and the
    funnel degenerates into an exhaustive scan of the piece, which is the
    honest price of those arguments."""
    from .evalf import derivative_bound

    fmt = cfg.fmt
    norm = Fraction(2) ** (fmt.precision - e_out)
    ulp = Fraction(2) ** (piece_dom.exponent - fmt.precision)
    x_lo = piece_dom.x_at(0, fmt)
    x_hi = piece_dom.x_at(piece_dom.count - 1, fmt)
    # After conversion to the binomial basis the quadratic coefficient is
    # s2 = 2*a2, so the truncation term scales with the full second derivative.
    c2_bound = norm * ulp**2 * derivative_bound(fn, 2, x_lo, x_hi)
    n = cfg.polygen.N
    while n > 1 and c2_bound * (n - 1) ** 2 >= Fraction(1, 8):
        n //= 2
    return n


def _build_tasks(fn: str, binade: int, cfg: PipelineConfig) -> list[DomainTask]:
    """Coefficient generation for every domain of the binade: pieces of
    constant output exponent, chopped into super-domains, Taylor-approximated
    and hierarchically split into per-domain polynomials."""
    fmt = cfg.fmt
    pg = cfg.polygen
    m_base = 1 << (fmt.precision - 1)
    tasks: list[DomainTask] = []
    next_id = 0
    for start, pcount, e_out in output_binade_pieces(fn, binade, fmt):
        piece_dom = Domain(m_base + start, binade + 1, pcount, 0)
        n_p = _piece_domain_size(fn, piece_dom, e_out, cfg)
        block = pg.tau * n_p
        for bstart in range(start, start + pcount, block):
            bcount = min(block, start + pcount - bstart)
            if bcount == block and n_p == pg.N:
                bcfg = pg
            else:
                tau_t = -(-bcount // n_p)
                bcfg = PolyGenConfig(
                    tau=tau_t, N=n_p, mu=1, nu=tau_t, delta=pg.delta,
                    limbs=pg.limbs, frac_bits=pg.frac_bits, guard=pg.guard,
                )
            super_dom = Domain(m_base + bstart, binade + 1, bcount, next_id)
            r_t, eps_approx = taylor_approx(fn, super_dom, bcfg, fmt)
            eps_prime = fmt.eps + eps_approx
            r_polys = hierarchical_split(r_t, n_p, bcfg.delta)
            for i, coeffs in enumerate(domain_coefficient_sets(r_polys, bcfg)):
                dstart = bstart + i * n_p
                dcount = min(n_p, bstart + bcount - dstart)
                if dcount <= 0:
                    break
                dom = Domain(m_base + dstart, binade + 1, dcount, next_id)
                tasks.append(DomainTask(dom, coeffs, pg.frac_bits, eps_prime, e_out))
                next_id += 1
    return tasks


def run_pipeline(binade: int, cfg: PipelineConfig, prev_stats: PhaseStats | None = None):
    """Full funnel over one binade: polynomial generation, phases 1-3, and
    rigorous confirmation.  Returns (records, PhaseStats); records are
    ascending by argument and match exhaustive_hr_search exactly."""
    stats = PhaseStats()
    algo = cfg.phase.algorithm
    if algo == "auto":
        algo = select_algorithm(prev_stats)
    stats.algorithm_choices.append((binade, algo))

    tasks = _build_tasks(cfg.fn, binade, cfg)
    by_id = {t.domain.domain_id: t for t in tasks}
    t1 = time.perf_counter()
    failing_ids = phase1(tasks, cfg, algo)
    t2 = time.perf_counter()
    stats.rows.append(PhaseRow(
        "phase1", len(tasks), len(failing_ids),
        sum(t.domain.count for t in tasks), (t2 - t1) * 1e3,
    ))

    failing = [by_id[i] for i in failing_ids]
    subtasks = phase2(failing, cfg, algo)
    t3 = time.perf_counter()
    stats.rows.append(PhaseRow(
        "phase2", len(failing), len(subtasks),
        sum(t.domain.count for t in failing), (t3 - t2) * 1e3,
    ))

    candidates = phase3_exhaustive(subtasks, cfg)
    t4 = time.perf_counter()
    stats.rows.append(PhaseRow(
        "phase3", len(subtasks), len(candidates),
        sum(t.count for t in subtasks), (t4 - t3) * 1e3,
    ))

    guard = 2 * (cfg.fmt.precision + cfg.fmt.eps_bits) + 16
    records = []
    from .fpmodel import bits_float

    for cand in candidates:
        x = bits_float(cand.argument, cfg.fmt)
        dec = decide_hr(cfg.fn, x, cfg.fmt, start_prec=guard)
        if dec.is_hr:
            records.append(HrCaseRecord(
                cand.argument, UFrac.from_fraction(dec.distance_lo), cand.domain_id,
            ))
    t5 = time.perf_counter()
    stats.rows.append(PhaseRow(
        "confirm", len(candidates), len(records), len(candidates), (t5 - t4) * 1e3,
    ))
    records.sort()
    return records, stats
