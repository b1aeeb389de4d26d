"""Floating-point target model: formats, binades, domains and HR distances.

A p-bit value is x = m(x) * 2^e(x) with 1/2 <= m(x) < 1; the representable
mantissas are M/2^p for M in [2^(p-1), 2^p).  The HR distance of a real value
is how far its infinitely-precise mantissa lands from the p-bit grid,
dist_p(x) = |2^p * m(x) cmod 1| with cmod into (-1/2, 1/2].  A value is a
hard-to-round case when that distance is below the format's 2^-p' margin,
tested in the one-sided shifted form frac(2^p*m + eps) < 2*eps so that the
lower boundary (exactly eps below the grid) is included and the upper one
excluded.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

from .fixedpoint import UFrac


@dataclass(frozen=True, slots=True)
class FpFormat:
    """Target precision p and margin exponent p' (eps = 2^-p')."""

    precision: int
    eps_bits: int

    def __post_init__(self) -> None:
        if not 2 <= self.precision <= 64:
            raise ValueError(f"precision {self.precision} outside [2, 64]")
        if self.eps_bits < 1:
            raise ValueError("eps_bits must be >= 1")

    @property
    def eps(self) -> Fraction:
        return Fraction(1, 1 << self.eps_bits)

    def nearest_equivalent(self) -> "FpFormat":
        """Directed-rounding format whose HR cases are this format's
        rounding-to-nearest HR cases: (p, eps) -> (p+1, 2*eps)."""
        return FpFormat(self.precision + 1, self.eps_bits - 1)


@dataclass(frozen=True, slots=True)
class Domain:
    """A run of `count` consecutive arguments starting at mantissa code
    `m_start` in the binade with (mantissa-form) exponent `exponent`:
    X_i = (m_start + i) * 2^(exponent - p)."""

    m_start: int
    exponent: int
    count: int
    domain_id: int = 0

    def x_at(self, i: int, fmt: FpFormat) -> Fraction:
        if not 0 <= i < self.count:
            raise IndexError(f"argument index {i} outside domain of {self.count}")
        return Fraction(self.m_start + i, 1) * Fraction(2) ** (self.exponent - fmt.precision)


def _ge_pow2(num: int, den: int, e: int) -> bool:
    """num/den >= 2^e, exactly."""
    if e >= 0:
        return num >= den << e
    return num << -e >= den


def mantissa_exponent(x: Fraction) -> tuple[Fraction, int]:
    """Exact (m, e) with |x| = m * 2^e and 1/2 <= m < 1.  x must be nonzero."""
    if x == 0:
        raise ValueError("0 has no normalized mantissa")
    num, den = abs(x).numerator, abs(x).denominator
    # bit lengths bracket the ratio within (2^(e-1), 2^(e+1)); one compare settles it
    e = num.bit_length() - den.bit_length()
    if _ge_pow2(num, den, e):
        e += 1
    m = abs(x) * Fraction(2) ** (-e)
    assert Fraction(1, 2) <= m < 1
    return m, e


def dist_p(x: Fraction, precision: int) -> Fraction:
    """Distance of 2^p * m(x) to the nearest integer (exact, in [0, 1/2])."""
    m, _ = mantissa_exponent(x)
    y = m * (1 << precision)
    t = y - y.__floor__()
    return min(t, 1 - t)


def is_hr_case(x: Fraction, fmt: FpFormat) -> bool:
    """One-sided HR test: frac(2^p*m(x) + eps) < 2*eps.

    Includes values exactly eps *below* a representable point, excludes those
    exactly eps above; x == 0 is never an HR case (exactly representable).
    """
    if x == 0:
        return False
    m, _ = mantissa_exponent(x)
    y = m * (1 << fmt.precision) + fmt.eps
    t = y - y.__floor__()
    return t < 2 * fmt.eps


def arg_index(x: Fraction, domain: Domain, fmt: FpFormat) -> int:
    """Index of the argument x inside the domain; raises if off-grid."""
    ulp = Fraction(2) ** (domain.exponent - fmt.precision)
    q = (x - domain.x_at(0, fmt)) / ulp
    if q.denominator != 1 or not 0 <= q.numerator < domain.count:
        raise ValueError(f"{x} is not an argument of {domain}")
    return q.numerator


def arg_unindex(i: int, domain: Domain, fmt: FpFormat) -> Fraction:
    """Inverse of arg_index."""
    return domain.x_at(i, fmt)


# Bit-pattern layout for a (positive) precision-p argument: a 16-bit exponent
# field biased by 2^15 above p-1 fraction bits, hidden leading mantissa bit.
# Not an IEEE interchange format -- just a stable integer encoding that
# round-trips any argument of any supported FpFormat.
_EXP_BIAS = 1 << 15


def float_bits(x: Fraction, fmt: FpFormat) -> int:
    """Encode a positive representable precision-p value as an integer."""
    if x <= 0:
        raise ValueError("only positive arguments are encoded")
    m, e = mantissa_exponent(x)
    code = m * (1 << fmt.precision)
    if code.denominator != 1:
        raise ValueError(f"{x} is not representable at precision {fmt.precision}")
    frac = code.numerator - (1 << (fmt.precision - 1))
    if not 0 <= e + _EXP_BIAS < (1 << 16):
        raise ValueError(f"exponent {e} outside the bit-pattern range")
    return ((e + _EXP_BIAS) << (fmt.precision - 1)) | frac


def bits_float(bits: int, fmt: FpFormat) -> Fraction:
    """Inverse of float_bits."""
    frac = bits & ((1 << (fmt.precision - 1)) - 1)
    e = (bits >> (fmt.precision - 1)) - _EXP_BIAS
    code = frac + (1 << (fmt.precision - 1))
    return Fraction(code, 1 << fmt.precision) * Fraction(2) ** e


@dataclass(frozen=True, slots=True, order=True)
class HrCaseRecord:
    """One found hard-to-round argument.

    `argument` is the float_bits pattern of the argument; `distance` is the
    HR distance floored into UFrac units; `undecided` marks arguments the
    evaluator could not settle at its precision cap -- they are reported,
    never dropped silently.
    """

    argument: int
    distance: UFrac
    domain_id: int
    undecided: bool = False


class BinadeDomains(Sequence[Domain]):
    """Lazy equal split of one binade into domains of `count` arguments.

    Binade B covers [2^B, 2^(B+1)); its 2^(p-1) arguments have mantissa-form
    exponent B+1.  Materialising 2^37 Domain objects for production-scale
    splits would be absurd, so indexing constructs them on demand.
    """

    def __init__(self, binade: int, fmt: FpFormat, count: int, id_base: int = 0):
        total = 1 << (fmt.precision - 1)
        if count < 1 or total % count:
            raise ValueError(f"domain size {count} must divide binade size {total}")
        self.binade = binade
        self.fmt = fmt
        self.count = count
        self.id_base = id_base
        self._n = total // count

    def __len__(self) -> int:
        return self._n

    def __getitem__(self, i: int) -> Domain:
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(self._n))]
        if i < 0:
            i += self._n
        if not 0 <= i < self._n:
            raise IndexError(i)
        m0 = (1 << (self.fmt.precision - 1)) + i * self.count
        return Domain(m0, self.binade + 1, self.count, self.id_base + i)

    def __iter__(self) -> Iterator[Domain]:
        for i in range(self._n):
            yield self[i]


def split_binade(binade: int, fmt: FpFormat, count: int, id_base: int = 0) -> BinadeDomains:
    """Split binade [2^B, 2^(B+1)) into lazy domains of `count` arguments each."""
    return BinadeDomains(binade, fmt, count, id_base)


@dataclass(frozen=True, slots=True)
class ErrorBudget:
    """The eps ladder of a filtered search.

    eps        target margin 2^-p'
    eps_approx polynomial-vs-function bound (already scaled to grid units)
    eps_trunc  dropped-terms bound of the degree-1 truncation (grid units)
    eps_shift  error added by coefficient shifting (0 here: shifts are exact)
    """

    eps: Fraction
    eps_approx: Fraction = Fraction(0)
    eps_trunc: Fraction = Fraction(0)
    eps_shift: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        for name in ("eps", "eps_approx", "eps_trunc", "eps_shift"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.eps_dprime >= Fraction(1, 4):
            raise ValueError(f"total eps'' = {self.eps_dprime} >= 1/4: mod-1 window would wrap")

    @property
    def eps_prime(self) -> Fraction:
        return self.eps + self.eps_approx + self.eps_shift

    @property
    def eps_dprime(self) -> Fraction:
        return self.eps_prime + self.eps_trunc
