"""Lower-bound searches for min{(b - a*x) mod 1 : 0 <= x < N}.

All four variants walk the two-length interval structure of {a*x mod 1}
instead of enumerating x, answering in O(log) steps whether the minimum is
below a threshold eps'' (Failure: the domain may hide a hard-to-round case)
or not (Success: a certified lower bound d on the minimum).

* lefevre_lb          classic branchy walk; d is reduced one interval at a
                      time, so Success guarantees d >= eps''.
* lefevre_swap_lb     same walk with the two branch bodies unified by
                      swapping register roles (one conditional scope).
* regular_lb          consumes whole continued-fraction quotients each
                      iteration (uniform control flow; exit tests d > eps'').
* regular_unrolled_lb regular with the strict branch alternation unrolled
                      into one straight-line body per quotient pair.

The lefevre family caps the quotient applied at the N boundary (the jump is
limited to the smallest one reaching u+v >= N), which never changes the
verdict or d but bounds the points placed to n < 2N.  The regular family by
design consumes whole quotients and only guarantees E[n] <= 3.69*N.

Success thresholds are inherited from the underlying loops: the classic
family fails on d < eps'' (Success implies d >= eps''), the regular family
returns the verdict d > eps''.  The boundary d == eps'' is the only value on
which the families disagree.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .fixedpoint import DEFAULT_WORD_BITS, DivisionMode, UFrac


class Verdict(Enum):
    SUCCESS = "success"   # certified: no point of the first N lands below eps''
    FAILURE = "failure"   # some prefix point landed below eps''; domain must be refined


class Algorithm(Enum):
    LEFEVRE = "lefevre"
    LEFEVRE_SWAP = "lefevre_swap"
    REGULAR = "regular"
    REGULAR_UNROLLED = "regular_unrolled"


@dataclass(frozen=True, slots=True)
class SearchProblem:
    """b - a*x mod 1 scanned for x < count; eps is the failure threshold
    (an eps'' in filtered-pipeline use, with b already shifted)."""

    a: UFrac
    b: UFrac
    eps: UFrac
    count: int

    def __post_init__(self) -> None:
        if self.count < 1:
            raise ValueError("count must be >= 1")
        for other in (self.b, self.eps):
            if other.width != self.a.width:
                raise ValueError("mixed word widths in problem")
        if self.eps.raw >= 1 << (self.a.width - 1):
            raise ValueError("eps must be < 1/2")


@dataclass(frozen=True, slots=True)
class SearchOutcome:
    verdict: Verdict
    d: UFrac
    iterations: int
    points_placed: int

    @property
    def success(self) -> bool:
        return self.verdict is Verdict.SUCCESS


def _mode_code(mode: DivisionMode) -> int:
    if mode is DivisionMode.SUBTRACTIVE:
        return 0
    if mode is DivisionMode.HYBRID:
        return 1
    return 2


def _lefevre_core(a, b, eps, N, one, mode, trace):
    """Raw classic walk.  mode only changes how iterations are *counted* for
    runs of plain d-reductions (every visit / first + batched rest / one);
    the state evolution, verdict and d are identical in all modes."""
    d = b
    if d < eps:
        return False, d, 0, 1
    if a == 0:
        # constant point set {0}: the minimum over any N is {b}
        return True, d, 0, N
    if N == 1:
        # only x = 0 is scanned; its value is d = {b} >= eps already
        return True, d, 0, 1
    p = a
    q = one - a
    u = 1
    v = 1
    it = 0
    while True:
        if d < p:
            it += 1
            if trace is not None:
                trace.append(True)
            k = q // p
            need = N - u - v
            kc = -(-need // v) if need > 0 else 0
            if k >= kc:
                return True, d, it, u + kc * v + v
            q -= k * p
            u += k * v
            if q == 0:
                # expansion exhausted: every multiple of a is placed, d is
                # the exact minimum over the whole cycle (covers any N)
                return True, d, it, N
            p -= q
            v += u
        else:
            it += 1
            if trace is not None:
                trace.append(False)
            d -= p
            if d < eps:
                return False, d, it, u + v
            k = p // q
            if k == 0:
                if u + v >= N:
                    return True, d, it, u + v
                q -= p
                u += v
                if mode != 0:
                    # batch the rest of this run of plain reductions
                    extra = False
                    while d >= p and q > p:
                        if mode == 1 and not extra:
                            it += 1
                            if trace is not None:
                                trace.append(False)
                            extra = True
                        d -= p
                        if d < eps:
                            return False, d, it, u + v
                        if u + v >= N:
                            return True, d, it, u + v
                        q -= p
                        u += v
            else:
                need = N - u - v
                kc = -(-need // u) if need > 0 else 0
                if k >= kc:
                    return True, d, it, u + v + kc * u
                p -= k * q
                v += k * u
                if p == 0:
                    return True, d, it, N
                q -= p
                u += v


def _lefevre_swap_core(a, b, eps, N, one, mode, trace):
    """Classic walk with register-role swapping: the body is always the
    d < p shape; a flag tracks whether (p,q,u,v) currently hold the other
    role's values.  Exactly equivalent to _lefevre_core (verdict, d and
    iteration count), differing only in branch structure."""
    d = b
    if d < eps:
        return False, d, 0, 1
    if a == 0:
        return True, d, 0, N
    if N == 1:
        return True, d, 0, 1
    p = a
    q = one - a
    u = 1
    v = 1
    swapped = d >= p
    if swapped:
        p, q = q, p
        u, v = v, u
    it = 0
    while True:
        it += 1
        if trace is not None:
            trace.append(swapped)
        if swapped:
            d -= q
            if d < eps:
                return False, d, it, u + v
        k = q // p
        need = N - u - v
        kc = -(-need // v) if need > 0 else 0
        if k >= kc:
            return True, d, it, u + kc * v + v
        q -= k * p
        u += k * v
        if q == 0:
            return True, d, it, N
        p -= q
        v += u
        if swapped and k == 0 and mode != 0:
            extra = False
            while d >= q and q < p:
                if mode == 1 and not extra:
                    it += 1
                    if trace is not None:
                        trace.append(True)
                    extra = True
                d -= q
                if d < eps:
                    return False, d, it, u + v
                if u + v >= N:
                    return True, d, it, u + v
                p -= q
                v += u
        nxt = d >= (q if swapped else p)
        if nxt != swapped:
            p, q = q, p
            u, v = v, u
            swapped = nxt


def _regular_core(a, b, eps, N, one, trace):
    """Whole-quotient walk: one continued-fraction quotient per iteration.
    u, v hold the two interval counts (q_i, q_{i-1}); d is lazily reduced and
    may sit one configuration behind, which never affects the exit tests."""
    d = b
    if d < eps:
        return False, d, 0, 1
    if a == 0:
        return d > eps, d, 0, N
    p = a
    q = one
    u = 1
    v = 0
    if N <= 1:
        return d > eps, d, 0, 1
    it = 0
    while True:
        it += 1
        if p < q:
            if trace is not None:
                trace.append(True)
            k = q // p
            q -= k * p
            v += k * u
            d %= p
            if q == 0:
                # expansion exhausted: d is exact over the whole cycle
                return d > eps, d, it, max(u + v, N)
        else:
            if trace is not None:
                trace.append(False)
            k = p // q
            p -= k * q
            u += k * v
            if d >= p:
                d = (d - p) % q
            if p == 0:
                return d > eps, d, it, max(u + v, N)
        if u + v >= N:
            return d > eps, d, it, u + v


def _regular_unrolled_core(a, b, eps, N, one, trace):
    """Regular walk with the strict then/else alternation unrolled: each
    iteration consumes two quotients with no data-dependent branch except
    the small d-reduction guard (recorded in the trace)."""
    d = b
    if d < eps:
        return False, d, 0, 1
    if a == 0:
        return d > eps, d, 0, N
    p = a
    q = one
    u = 1
    v = 0
    if N <= 1:
        return d > eps, d, 0, 1
    it = 0
    while True:
        it += 1
        k = q // p
        q -= k * p
        v += k * u
        d %= p
        if q == 0:
            return d > eps, d, it, max(u + v, N)
        if u + v >= N:
            return d > eps, d, it, u + v
        k = p // q
        p -= k * q
        u += k * v
        if d >= p:
            if trace is not None:
                trace.append(True)
            d = (d - p) % q
        elif trace is not None:
            trace.append(False)
        if p == 0:
            return d > eps, d, it, max(u + v, N)
        if u + v >= N:
            return d > eps, d, it, u + v


def _wrap(problem: SearchProblem, raw) -> SearchOutcome:
    ok, d, it, n = raw
    return SearchOutcome(
        Verdict.SUCCESS if ok else Verdict.FAILURE,
        UFrac(d, problem.a.width),
        it,
        n,
    )


def lefevre_lb(
    problem: SearchProblem,
    mode: DivisionMode = DivisionMode.HYBRID,
    trace: list | None = None,
) -> SearchOutcome:
    one = 1 << problem.a.width
    return _wrap(
        problem,
        _lefevre_core(problem.a.raw, problem.b.raw, problem.eps.raw, problem.count,
                      one, _mode_code(mode), trace),
    )


def lefevre_swap_lb(
    problem: SearchProblem,
    mode: DivisionMode = DivisionMode.HYBRID,
    trace: list | None = None,
) -> SearchOutcome:
    one = 1 << problem.a.width
    return _wrap(
        problem,
        _lefevre_swap_core(problem.a.raw, problem.b.raw, problem.eps.raw, problem.count,
                           one, _mode_code(mode), trace),
    )


def regular_lb(
    problem: SearchProblem,
    mode: DivisionMode = DivisionMode.HYBRID,
    trace: list | None = None,
) -> SearchOutcome:
    """mode is accepted for interface uniformity: quotients are whole
    divisions here, so the strategy cannot change any result."""
    del mode
    one = 1 << problem.a.width
    return _wrap(
        problem,
        _regular_core(problem.a.raw, problem.b.raw, problem.eps.raw, problem.count, one, trace),
    )


def regular_unrolled_lb(
    problem: SearchProblem,
    mode: DivisionMode = DivisionMode.HYBRID,
    trace: list | None = None,
) -> SearchOutcome:
    del mode
    one = 1 << problem.a.width
    return _wrap(
        problem,
        _regular_unrolled_core(problem.a.raw, problem.b.raw, problem.eps.raw, problem.count,
                               one, trace),
    )


SEARCHES = {
    Algorithm.LEFEVRE: lefevre_lb,
    Algorithm.LEFEVRE_SWAP: lefevre_swap_lb,
    Algorithm.REGULAR: regular_lb,
    Algorithm.REGULAR_UNROLLED: regular_unrolled_lb,
}
