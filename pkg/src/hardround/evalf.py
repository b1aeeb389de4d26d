"""Rigorous dyadic enclosures of elementary function values.

Every routine returns exact Fractions (or scaled integers) bracketing the
true value; directed rounding comes from mpmath's interval context, with an
integer fixed-point fast path for long equally-spaced scans.  Everything
downstream (oracle decisions, pipeline confirmation) reduces to exact integer
comparisons against these enclosures, so a decision, once made, is a theorem
about the function value, not about floating-point luck.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from mpmath import iv

from .fpmodel import FpFormat

SUPPORTED_FUNCTIONS = ("exp", "log", "exp2")


@lru_cache(maxsize=64)
def poly_coefficients(fn: str) -> tuple[Fraction, ...]:
    """Coefficients of a "poly:c0,c1,..." function spec (monomial basis,
    rational literals), constant term first."""
    body = fn[len("poly:"):]
    coeffs = tuple(Fraction(part.strip()) for part in body.split(","))
    if not coeffs or all(c == 0 for c in coeffs):
        raise ValueError("polynomial must have at least one nonzero coefficient")
    return coeffs


def is_polynomial(fn: str) -> bool:
    return fn.startswith("poly:")


def _poly_derivative(coeffs: tuple[Fraction, ...], order: int) -> tuple[Fraction, ...]:
    for _ in range(order):
        coeffs = tuple(j * c for j, c in enumerate(coeffs))[1:]
    return coeffs


def poly_value(fn: str, x: Fraction, order: int = 0) -> Fraction:
    """Exact value of the polynomial (or its `order`-th derivative) at x."""
    coeffs = _poly_derivative(poly_coefficients(fn), order)
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc

# enclosure precision is raised geometrically until a comparison closes; the
# cap exists so an exact tie (impossible for these functions, but cheap to
# guard) surfaces as an explicit undecided outcome instead of a hang
DEFAULT_MAX_PREC = 4096


class UndecidedError(Exception):
    """An enclosure straddled the decision boundary at the precision cap."""

    def __init__(self, message: str, distance_lo: Fraction | None = None):
        super().__init__(message)
        self.distance_lo = distance_lo


def _mpf_tuple_to_fraction(t) -> Fraction:
    sign, man, exp, _ = t
    if man == 0:
        return Fraction(0)
    val = Fraction(int(man)) * Fraction(2) ** int(exp)
    return -val if sign else val


def _iv_from_fraction(x: Fraction):
    """Exact interval point for a rational x (prec must cover the numerator)."""
    num, den = x.numerator, x.denominator
    return iv.mpf(num) / iv.mpf(den)


def _exact_point(fn: str, x: Fraction) -> Fraction | None:
    """Values that are exactly representable rationals (an interval package
    would straddle them forever as precision rises)."""
    if fn == "identity":
        return x
    if is_polynomial(fn):
        return poly_value(fn, x)
    if fn == "log" and x == 1:
        return Fraction(0)
    if fn == "exp" and x == 0:
        return Fraction(1)
    if fn == "exp2" and x.denominator == 1:
        return Fraction(2) ** x.numerator
    return None


def enclose(fn: str, x: Fraction, prec: int) -> tuple[Fraction, Fraction]:
    """lo <= fn(x) <= hi with lo, hi exact dyadic-ish rationals."""
    exact = _exact_point(fn, x)
    if exact is not None:
        return exact, exact
    if fn not in SUPPORTED_FUNCTIONS:
        raise ValueError(f"unsupported function {fn!r}")
    work = max(prec, x.numerator.bit_length(), x.denominator.bit_length()) + 8
    old = iv.prec
    iv.prec = work
    try:
        xa = _iv_from_fraction(x)
        if fn == "exp":
            v = iv.exp(xa)
        elif fn == "log":
            if x <= 0:
                raise ValueError("log needs a positive argument")
            v = iv.log(xa)
        else:
            v = iv.mpf(2) ** xa
        lo_t, hi_t = v._mpi_
    finally:
        iv.prec = old
    return _mpf_tuple_to_fraction(lo_t), _mpf_tuple_to_fraction(hi_t)


def derivative_bound(fn: str, order: int, xlo: Fraction, xhi: Fraction, prec: int = 96) -> Fraction:
    """Upper bound on sup |fn^(order)| over [xlo, xhi] (order >= 1)."""
    if order < 1:
        raise ValueError("order must be >= 1")
    if fn == "identity":
        return Fraction(1 if order == 1 else 0)
    if is_polynomial(fn):
        # sum of |coefficient| * |x|^k majorizes on any interval
        dcoeffs = _poly_derivative(poly_coefficients(fn), order)
        xmax = max(abs(xlo), abs(xhi))
        return sum((abs(c) * xmax**j for j, c in enumerate(dcoeffs)), Fraction(0))
    if fn == "exp":
        # every derivative is exp, increasing
        return enclose("exp", xhi, prec)[1]
    if fn == "exp2":
        _, ln2_hi = enclose("log", Fraction(2), prec)
        return ln2_hi ** order * enclose("exp2", xhi, prec)[1]
    if fn == "log":
        # |log^(k)(x)| = (k-1)! / x^k, decreasing in x
        if xlo <= 0:
            raise ValueError("log derivative bound needs xlo > 0")
        return Fraction(math.factorial(order - 1)) / xlo**order
    raise ValueError(f"unsupported function {fn!r}")


@dataclass(frozen=True, slots=True)
class ScaledScan:
    """Enclosures of fn at `count` equally spaced points, as integers
    scaled by 2^-scale_bits: lo[i] <= fn(x0 + i*step) * 2^scale_bits <= hi[i]."""

    lo: list
    hi: list
    scale_bits: int

    def fraction_at(self, i: int) -> tuple[Fraction, Fraction]:
        s = Fraction(1, 1 << self.scale_bits)
        return self.lo[i] * s, self.hi[i] * s


def _to_scaled(lo: Fraction, hi: Fraction, scale_bits: int) -> tuple[int, int]:
    den = 1 << scale_bits
    l = (lo.numerator * den) // lo.denominator
    h = -((-hi.numerator * den) // hi.denominator)
    return l, h


def scan_enclosures(fn: str, x0: Fraction, step: Fraction, count: int, prec: int) -> ScaledScan:
    """Enclosures along an arithmetic grid.

    exp and exp2 use one rigorous interval seed and an interval power of the
    per-step factor (exp(x0+ih) = exp(x0)*exp(h)^i), iterated in fixed-point
    with directed rounding: two big-int multiplies per point instead of a
    transcendental call.  log falls back to per-point calls (its increments
    are not constant; scan sizes for it stay small).
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    scale = prec + 64  # headroom: per-step rounding adds < 2^-(scale-4) relative
    if fn in ("exp", "exp2"):
        base = "exp" if fn == "exp" else "exp2"
        v0 = enclose(base, x0, scale + 16)
        vh = enclose(base, step, scale + 16)
        lo0, hi0 = _to_scaled(v0[0], v0[1], scale)
        floh, fhih = _to_scaled(vh[0], vh[1], scale)
        los = [lo0]
        his = [hi0]
        lo, hi = lo0, hi0
        for _ in range(count - 1):
            lo = (lo * floh) >> scale
            hi = -((-hi * fhih) >> scale)
            los.append(lo)
            his.append(hi)
        if los[-1] <= 0:
            raise ValueError("scan underflowed the fixed-point scale")
        return ScaledScan(los, his, scale)
    los = []
    his = []
    for i in range(count):
        l, h = enclose(fn, x0 + i * step, scale + 16)
        li, hi_ = _to_scaled(l, h, scale)
        los.append(li)
        his.append(hi_)
    return ScaledScan(los, his, scale)


def _dist_interval(off: int, width: int, grid: int) -> tuple[int, int]:
    """Range of dist-to-nearest-multiple-of-grid over a value interval that
    starts `off` past a multiple (0 <= off < grid) and spans `width < grid`.

    dist(u) = min(u mod grid, grid - u mod grid) rises to grid/2 then falls,
    so extremes sit at the interval's endpoints unless it covers 0 or grid/2.
    """
    b = off + width
    half = grid >> 1
    if b >= grid:  # covers the next multiple
        top = half if off <= half else max(grid - off, min(b - grid, half))
        return 0, top
    d_off = min(off, grid - off)
    d_b = min(b, grid - b)
    top = half if off <= half <= b else max(d_off, d_b)
    return min(d_off, d_b), top


@dataclass(frozen=True, slots=True)
class HrDecision:
    is_hr: bool
    distance_lo: Fraction   # lower endpoint of the distance enclosure
    exponent: int           # e(f(x)) in mantissa-form (f = m * 2^e)
    prec_used: int


def dist_enclosure(fn: str, x: Fraction, precision: int, prec: int):
    """One-shot enclosure of dist_p(fn(x)) at working precision `prec`.

    Returns (dist_lo, dist_hi, e) as exact Fractions, or None when this
    precision cannot yet pin down the sign, the binade, or the grid.
    """
    lo, hi = enclose(fn, x, prec)
    if lo == hi:
        if lo == 0:
            return None
        from .fpmodel import dist_p, mantissa_exponent

        d = dist_p(lo, precision)
        return d, d, mantissa_exponent(lo)[1]
    if lo <= 0 <= hi:
        return None
    if hi < 0:
        lo, hi = -hi, -lo
    # exact scaled-integer form: |value| in [nlo, nhi] / 2^sc
    sc = max(lo.denominator.bit_length(), hi.denominator.bit_length(), prec) + 4
    nlo = (lo.numerator << sc) // lo.denominator
    nhi = -((-hi.numerator << sc) // hi.denominator)
    if nlo.bit_length() != nhi.bit_length():
        return None  # straddles a binade boundary
    e = nlo.bit_length() - sc
    # mantissa grid: multiples of 2^(e-p); in scaled units grid = 2^(sc+e-p)
    gbits = sc + e - precision
    if gbits <= 0:
        return None
    grid = 1 << gbits
    dlo, dhi = _dist_interval(nlo & (grid - 1), nhi - nlo, grid)
    return Fraction(dlo, grid), Fraction(dhi, grid), e


def value_exponent(fn: str, x: Fraction, prec: int = 128, max_prec: int = DEFAULT_MAX_PREC) -> int:
    """e(fn(x)) in mantissa form |fn(x)| = m * 2^e, m in [1/2, 1)."""
    from .fpmodel import mantissa_exponent

    exact = _exact_point(fn, x)
    if exact is not None:
        if exact == 0:
            raise ValueError(f"{fn}({x}) = 0 has no normalized exponent")
        return mantissa_exponent(exact)[1]
    while prec <= max_prec:
        enc = dist_enclosure(fn, x, 1, prec)
        if enc is not None:
            return enc[2]
        prec *= 2
    raise UndecidedError(f"exponent of {fn}({x}) undecided at cap {max_prec}")


def decide_hr(
    fn: str,
    x: Fraction,
    fmt: FpFormat,
    start_prec: int | None = None,
    max_prec: int = DEFAULT_MAX_PREC,
) -> HrDecision:
    """Decide dist_p(fn(x)) < eps rigorously, raising precision as needed.

    Exactly representable values report is_hr False regardless of is_hr_case:
    they round without error, and search output exists to name the arguments
    whose rounding is in doubt.  The decision and the recorded distance come
    from the same enclosure, so independent callers (exhaustive oracle,
    pipeline confirmation) produce bit-identical records for the same input.
    """
    from .fpmodel import dist_p, is_hr_case, mantissa_exponent

    exact = _exact_point(fn, x)
    if exact is not None:
        prec = start_prec or (fmt.precision + fmt.eps_bits + 32)
        if exact == 0:
            return HrDecision(False, Fraction(0), 0, prec)
        d = dist_p(exact, fmt.precision)
        e = mantissa_exponent(exact)[1]
        if d == 0:
            return HrDecision(False, d, e, prec)
        return HrDecision(is_hr_case(exact, fmt), d, e, prec)
    prec = start_prec or (fmt.precision + fmt.eps_bits + 32)
    last_lo: Fraction | None = None
    while prec <= max_prec:
        enc = dist_enclosure(fn, x, fmt.precision, prec)
        if enc is not None:
            dlo, dhi, e = enc
            last_lo = dlo
            if dhi < fmt.eps:
                return HrDecision(True, dlo, e, prec)
            if dlo >= fmt.eps:
                return HrDecision(False, dlo, e, prec)
        prec *= 2
    raise UndecidedError(
        f"{fn}({x}) undecided at precision cap {max_prec}", distance_lo=last_lo
    )
