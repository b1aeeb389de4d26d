"""Exact fixed-point fractions modulo 1 and fixed-width multi-limb integers.

UFrac is the unsigned W-bit fraction raw/2^W used as the substrate for all
modular-minimum searches; MPInt is a sign + fixed-length little-endian limb
integer used for polynomial coefficient streams, where silent overflow would
be a correctness bug and therefore always raises.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction


DEFAULT_WORD_BITS = 64
LIMB_BITS = 32
_LIMB_MASK = (1 << LIMB_BITS) - 1

# A literal repeated-subtraction divider has no useful bound when quotients
# approach 2^W; after this many subtractions we finish the quotient with one
# division.  The (k, r) result is identical either way.
_SUBTRACTIVE_CHUNK = 4096


class DivisionMode(Enum):
    """How fractional division (and the d-reduction of the classic search)
    is realised: repeated subtraction, one hardware division, or one
    subtraction followed by a division for the remainder."""

    SUBTRACTIVE = "sub"
    HARDWARE = "hw"
    HYBRID = "hybrid"


@dataclass(frozen=True, slots=True)
class UFrac:
    """Value raw / 2^width in [0, 1)."""

    raw: int
    width: int = DEFAULT_WORD_BITS

    def __post_init__(self) -> None:
        if self.width not in (32, 64):
            raise ValueError(f"word width must be 32 or 64, got {self.width}")
        if not 0 <= self.raw < (1 << self.width):
            raise ValueError(f"raw value {self.raw} out of range for width {self.width}")

    @classmethod
    def from_fraction(cls, value: Fraction | int, width: int = DEFAULT_WORD_BITS) -> "UFrac":
        """Truncate (floor) an exact non-negative value's fractional part to W bits."""
        fr = Fraction(value)
        if fr < 0:
            fr -= fr.__floor__()  # reduce into [0,1) first, consistent with mod-1 semantics
        num, den = fr.numerator, fr.denominator
        num %= den
        return cls((num << width) // den, width)

    @classmethod
    def from_rational(cls, num: int, den: int, width: int = DEFAULT_WORD_BITS) -> "UFrac":
        return cls.from_fraction(Fraction(num, den), width)

    def to_fraction(self) -> Fraction:
        return Fraction(self.raw, 1 << self.width)

    def __float__(self) -> float:
        return self.raw / float(1 << self.width)

    def _check_width(self, other: "UFrac") -> None:
        if self.width != other.width:
            raise ValueError("mixed word widths")

    def __add__(self, other: "UFrac") -> "UFrac":
        self._check_width(other)
        return UFrac((self.raw + other.raw) & ((1 << self.width) - 1), self.width)

    def __sub__(self, other: "UFrac") -> "UFrac":
        self._check_width(other)
        return UFrac((self.raw - other.raw) & ((1 << self.width) - 1), self.width)

    def __lt__(self, other: "UFrac") -> bool:
        self._check_width(other)
        return self.raw < other.raw

    def __le__(self, other: "UFrac") -> bool:
        self._check_width(other)
        return self.raw <= other.raw

    def __repr__(self) -> str:
        return f"UFrac({self.raw}/2^{self.width})"


def frac_add_mod1(x: UFrac, y: UFrac) -> UFrac:
    """(x + y) mod 1 at W bits, exact (wraparound is the mod)."""
    return x + y


def frac_sub_mod1(x: UFrac, y: UFrac) -> UFrac:
    """(x - y) mod 1 at W bits, exact."""
    return x - y


def _div_steps(q: int, p: int, mode: DivisionMode) -> int:
    """Floor quotient q // p computed per the requested strategy."""
    if p <= 0:
        raise ZeroDivisionError("division by zero-length fraction")
    if mode is DivisionMode.HARDWARE:
        return q // p
    if mode is DivisionMode.HYBRID:
        # one subtraction, then divide whatever is left
        if q < p:
            return 0
        return 1 + (q - p) // p
    # subtractive: literal loop with an escape hatch for huge quotients
    k = 0
    r = q
    while r >= p:
        r -= p
        k += 1
        if k == _SUBTRACTIVE_CHUNK:
            return k + r // p
    return k


def frac_div(q: UFrac, p: UFrac, mode: DivisionMode = DivisionMode.HARDWARE) -> tuple[int, UFrac]:
    """Integer quotient and remainder of two fractions: q = k*p + r, 0 <= r < p.

    All modes return identical (k, r); they differ only in how the quotient
    is obtained, mirroring the hardware variants of the search loops.
    """
    q._check_width(p)
    k = _div_steps(q.raw, p.raw, mode)
    return k, UFrac(q.raw - k * p.raw, q.width)


class MPOverflowError(OverflowError):
    """A fixed-length limb result did not fit; never silently wrapped."""


@dataclass(frozen=True, slots=True)
class MPInt:
    """Signed magnitude integer on a fixed number of 32-bit little-endian limbs."""

    limbs: tuple[int, ...]
    negative: bool = False

    def __post_init__(self) -> None:
        if not self.limbs:
            raise ValueError("MPInt needs at least one limb")
        for limb in self.limbs:
            if not 0 <= limb <= _LIMB_MASK:
                raise ValueError(f"limb {limb} out of 32-bit range")
        if self.negative and all(l == 0 for l in self.limbs):
            object.__setattr__(self, "negative", False)  # canonical zero

    @property
    def limb_count(self) -> int:
        return len(self.limbs)

    @classmethod
    def from_int(cls, value: int, limb_count: int) -> "MPInt":
        neg = value < 0
        mag = -value if neg else value
        if mag.bit_length() > limb_count * LIMB_BITS:
            raise MPOverflowError(
                f"{value} needs {mag.bit_length()} bits, have {limb_count * LIMB_BITS}"
            )
        limbs = tuple((mag >> (LIMB_BITS * i)) & _LIMB_MASK for i in range(limb_count))
        return cls(limbs, neg)

    def to_int(self) -> int:
        mag = 0
        for i, limb in enumerate(self.limbs):
            mag |= limb << (LIMB_BITS * i)
        return -mag if self.negative else mag

    def __neg__(self) -> "MPInt":
        return MPInt(self.limbs, not self.negative)

    def _coerce(self, other) -> "MPInt":
        if isinstance(other, MPInt):
            if other.limb_count != self.limb_count:
                raise ValueError("mixed limb counts")
            return other
        if isinstance(other, int):
            return MPInt.from_int(other, self.limb_count)
        return NotImplemented

    def __add__(self, other) -> "MPInt":
        rhs = self._coerce(other)
        if rhs is NotImplemented:
            return NotImplemented
        return mp_add(self, rhs)

    __radd__ = __add__

    def __sub__(self, other) -> "MPInt":
        rhs = self._coerce(other)
        if rhs is NotImplemented:
            return NotImplemented
        return mp_add(self, -rhs)

    def __rsub__(self, other) -> "MPInt":
        rhs = self._coerce(other)
        if rhs is NotImplemented:
            return NotImplemented
        return mp_add(rhs, -self)

    def __mul__(self, other) -> "MPInt":
        rhs = self._coerce(other)
        if rhs is NotImplemented:
            return NotImplemented
        return mp_mul(self, rhs)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if isinstance(other, MPInt):
            return self.to_int() == other.to_int()
        if isinstance(other, int):
            return self.to_int() == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.to_int())

    def __repr__(self) -> str:
        return f"MPInt({self.to_int()}, limbs={self.limb_count})"


def _mag_add(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    out = []
    carry = 0
    for x, y in zip(a, b):
        s = x + y + carry
        out.append(s & _LIMB_MASK)
        carry = s >> LIMB_BITS
    if carry:
        raise MPOverflowError("addition carry out of top limb")
    return tuple(out)


def _mag_sub(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    """a - b for magnitudes with a >= b."""
    out = []
    borrow = 0
    for x, y in zip(a, b):
        s = x - y - borrow
        borrow = 1 if s < 0 else 0
        out.append(s & _LIMB_MASK)
    if borrow:
        raise MPOverflowError("subtraction borrow out of top limb")  # a < b (caller bug)
    return tuple(out)


def _mag_cmp(a: tuple[int, ...], b: tuple[int, ...]) -> int:
    for x, y in zip(reversed(a), reversed(b)):
        if x != y:
            return 1 if x > y else -1
    return 0


def mp_add(a: MPInt, b: MPInt) -> MPInt:
    """Signed addition; raises MPOverflowError if the result needs more limbs."""
    if a.limb_count != b.limb_count:
        raise ValueError("mixed limb counts")
    if a.negative == b.negative:
        return MPInt(_mag_add(a.limbs, b.limbs), a.negative)
    if _mag_cmp(a.limbs, b.limbs) >= 0:
        return MPInt(_mag_sub(a.limbs, b.limbs), a.negative)
    return MPInt(_mag_sub(b.limbs, a.limbs), b.negative)


def mp_mul(a: MPInt, b: MPInt) -> MPInt:
    """Signed schoolbook product; raises MPOverflowError when it does not fit."""
    if a.limb_count != b.limb_count:
        raise ValueError("mixed limb counts")
    n = a.limb_count
    acc = [0] * n
    for i, x in enumerate(a.limbs):
        if x == 0:
            continue
        carry = 0
        for j, y in enumerate(b.limbs):
            pos = i + j
            prod = x * y + carry
            carry = prod >> LIMB_BITS
            lo = prod & _LIMB_MASK
            if pos >= n:
                if lo or carry:
                    raise MPOverflowError("product exceeds limb budget")
                continue
            s = acc[pos] + lo
            acc[pos] = s & _LIMB_MASK
            carry += s >> LIMB_BITS
        if carry:
            pos = i + len(b.limbs)
            while carry:
                if pos >= n:
                    raise MPOverflowError("product exceeds limb budget")
                s = acc[pos] + (carry & _LIMB_MASK)
                acc[pos] = s & _LIMB_MASK
                carry = (carry >> LIMB_BITS) + (s >> LIMB_BITS)
                pos += 1
    return MPInt(tuple(acc), a.negative != b.negative)
