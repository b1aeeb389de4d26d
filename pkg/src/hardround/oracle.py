"""Ground-truth brute force, kept dumb on purpose.

Everything here answers by direct enumeration or textbook arithmetic so the
clever modules have something unarguable to disagree with: exact minima of
{b - a*x mod 1}, exhaustive HR-case enumeration by rigorous per-argument
evaluation, a simple Ziv-style refinement to the hardest case, and plain
Euclidean continued-fraction quotients.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .evalf import UndecidedError, decide_hr, dist_enclosure, scan_enclosures
from .fixedpoint import UFrac
from .fpmodel import Domain, FpFormat, HrCaseRecord, bits_float, float_bits

BRUTE_GUARD = 1 << 26
ENUM_GUARD = 1 << 22
_CHUNK = 1 << 22


def brute_min(a: UFrac, b: UFrac, count: int) -> tuple[UFrac, int]:
    """Exact min over x < count of {b - a*x mod 1}, first argmin on ties."""
    if a.width != b.width:
        raise ValueError("mixed word widths")
    if not 1 <= count <= BRUTE_GUARD:
        raise ValueError(f"count {count} outside [1, {BRUTE_GUARD}]")
    mask = np.uint64((1 << a.width) - 1)
    a64 = np.uint64(a.raw)
    b64 = np.uint64(b.raw)
    best = b.raw
    best_i = 0
    with np.errstate(over="ignore"):
        for start in range(0, count, _CHUNK):
            idx = np.arange(start, min(start + _CHUNK, count), dtype=np.uint64)
            vals = (b64 - idx * a64) & mask
            j = int(np.argmin(vals))
            v = int(vals[j])
            if v < best:
                best = v
                best_i = start + j
    return UFrac(best, a.width), best_i


def _scan_candidates(fn: str, domain: Domain, fmt: FpFormat, prec: int) -> list[int]:
    """Indices that a rigorous grid scan cannot certify as non-HR."""
    x0 = domain.x_at(0, fmt)
    step = Fraction(2) ** (domain.exponent - fmt.precision)
    scan = scan_enclosures(fn, x0, step, domain.count, prec)
    out = []
    for i in range(domain.count):
        lo, hi = scan.lo[i], scan.hi[i]
        if hi < 0:
            lo, hi = -hi, -lo
        if lo <= 0 or lo.bit_length() != hi.bit_length():
            out.append(i)
            continue
        gbits = lo.bit_length() - fmt.precision
        if gbits <= 0:
            out.append(i)
            continue
        grid = 1 << gbits
        off = lo & (grid - 1)
        wrap = off + (hi - lo)
        if wrap >= grid:
            out.append(i)
            continue
        dist_lo = min(off, grid - wrap)
        if (dist_lo << fmt.eps_bits) < grid:
            out.append(i)
    return out


def exhaustive_hr_search(
    fn: str,
    domain: Domain,
    fmt: FpFormat,
    guard: int | None = None,
) -> list[HrCaseRecord]:
    """Decide every argument of the domain by direct rigorous evaluation.

    The definitive reference set, ascending by argument.  `guard` is the
    starting working precision (default 2*(p + p') + 16); arguments that stay
    unresolved at the precision cap come back flagged undecided rather than
    being dropped.
    """
    if domain.count > ENUM_GUARD:
        raise ValueError(f"domain count {domain.count} over the {ENUM_GUARD} guard")
    if guard is None:
        guard = 2 * (fmt.precision + fmt.eps_bits) + 16
    if fn in ("exp", "exp2"):
        candidates = _scan_candidates(fn, domain, fmt, guard)
    else:
        candidates = range(domain.count)
    records = []
    for i in candidates:
        x = domain.x_at(i, fmt)
        try:
            dec = decide_hr(fn, x, fmt, start_prec=guard)
        except UndecidedError as u:
            d = u.distance_lo or Fraction(0)
            records.append(
                HrCaseRecord(float_bits(x, fmt), UFrac.from_fraction(d), domain.domain_id, undecided=True)
            )
            continue
        if dec.is_hr:
            records.append(
                HrCaseRecord(float_bits(x, fmt), UFrac.from_fraction(dec.distance_lo), domain.domain_id)
            )
    return records


def ziv_refine(
    records: list[HrCaseRecord],
    fn: str,
    fmt: FpFormat,
    max_prec: int = 1 << 14,
) -> list[HrCaseRecord]:
    """Re-evaluate HR cases at rising precision until their distances are
    strictly ordered; return the record(s) of minimal distance."""
    if not records:
        raise ValueError("no records to refine")
    uniq = sorted(set(records))
    if len(uniq) == 1:
        return [uniq[0]]
    args = [bits_float(r.argument, fmt) for r in uniq]
    prec = 2 * (fmt.precision + fmt.eps_bits) + 16
    while prec <= max_prec:
        encs = [dist_enclosure(fn, x, fmt.precision, prec) for x in args]
        if all(e is not None for e in encs):
            order = sorted(range(len(uniq)), key=lambda i: encs[i][0])
            if all(
                encs[order[k]][1] < encs[order[k + 1]][0] for k in range(len(order) - 1)
            ):
                return [uniq[order[0]]]
        prec *= 2
    raise UndecidedError(f"distances not separated at precision cap {max_prec}")


def cf_quotients_ref(a: Fraction | UFrac) -> list[int]:
    """Canonical continued-fraction quotients of a in (0, 1) by plain
    Euclidean division: k-sequence reference for the subtractive walks."""
    if isinstance(a, UFrac):
        a = a.to_fraction()
    num, den = a.numerator, a.denominator
    if not 0 < num < den:
        raise ValueError("expects a fraction strictly between 0 and 1")
    ks = []
    x, y = den, num
    while y:
        ks.append(x // y)
        x, y = y, x % y
    return ks
