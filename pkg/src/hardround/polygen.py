"""Per-domain polynomial generation.

One super-domain of tau*N consecutive arguments gets a single degree-delta
Taylor approximation R_t of the (binade-normalized) function value, expressed
in the binomial basis with exact fixed-point integer coefficients.  R_t is
then split hierarchically: r_j(i) gives the j-th binomial coefficient of R_t
shifted to argument offset i*N, i.e. the coefficients of the per-domain
polynomials P_{t+i}(x) = R_t(x + iN).  The shifts are computed two ways --
a tabulated-difference step (additions only) and a straightforward Toeplitz
matrix-vector product -- which agree coefficient-for-coefficient because the
arithmetic is exact; all approximation error therefore lives in one place,
the Taylor remainder bound returned alongside R_t.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .evalf import derivative_bound, enclose, is_polynomial, poly_value, value_exponent
from .fixedpoint import LIMB_BITS, MPInt
from .fpmodel import Domain, FpFormat


@dataclass(frozen=True, slots=True)
class BinomialPoly:
    """Polynomial in the binomial basis: sum of coeffs[j] * binomial(x, j),
    every coefficient an integer carrying the shared scale 2^-scale."""

    coeffs: tuple
    scale: int = 0

    def __post_init__(self) -> None:
        if not self.coeffs:
            raise ValueError("a polynomial needs at least one coefficient")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def evaluate(self, x: int):
        """Exact value (in scaled units) at integer x; works for int or
        MPInt coefficients alike."""
        acc = self.coeffs[0]
        binom = 1
        for j in range(1, len(self.coeffs)):
            binom = binom * (x - j + 1) // j
            acc = acc + self.coeffs[j] * binom
        return acc

    def value_fraction(self, x: int) -> Fraction:
        v = self.evaluate(x)
        if isinstance(v, MPInt):
            v = v.to_int()
        return Fraction(v, 1 << self.scale)


@dataclass(frozen=True, slots=True)
class PolyGenConfig:
    """Sizing knobs: tau domains of N arguments per super-domain, split into
    mu packets of nu domains; Taylor degree delta; limb budget for the
    coefficient integers; frac_bits F of the shared 2^-F scale; guard extra
    working precision for the coefficient enclosures."""

    tau: int = 1 << 8
    N: int = 1 << 6
    mu: int = 1 << 4
    nu: int = 1 << 4
    delta: int = 2
    limbs: int = 8
    frac_bits: int = 96
    guard: int = 32

    def __post_init__(self) -> None:
        if self.mu * self.nu != self.tau:
            raise ValueError(f"mu*nu = {self.mu * self.nu} != tau = {self.tau}")
        if self.N < 1 or self.N & (self.N - 1):
            raise ValueError("N must be a power of two")
        if self.delta not in (1, 2):
            raise ValueError("Taylor degree must be 1 or 2")
        if self.limbs < 1 or self.frac_bits < 8 or self.guard < 0:
            raise ValueError("bad limb/scale/guard sizing")


def forward_difference(values: Sequence) -> list[list]:
    """Difference-table rows under Delta[P](x) = P(x+1) - P(x), stopping at a
    single entry or an all-zero row (whichever comes first)."""
    if not values:
        raise ValueError("need at least one value")
    rows = []
    cur = list(values)
    while len(cur) > 1:
        cur = [cur[k + 1] - cur[k] for k in range(len(cur) - 1)]
        rows.append(cur)
        if all(v == 0 for v in cur):
            break
    return rows


def newton_interpolate(values: Sequence, scale: int = 0) -> BinomialPoly:
    """Binomial-basis coefficients of the degree len(values)-1 polynomial
    through P(0..n): coeffs[j] = Delta^j[P](0), read off the table's edge."""
    coeffs = [values[0]]
    cur = list(values)
    while len(cur) > 1:
        cur = [cur[k + 1] - cur[k] for k in range(len(cur) - 1)]
        coeffs.append(cur[0])
    return BinomialPoly(tuple(coeffs), scale)


def hierarchical_split(r_t: BinomialPoly, stride: int, delta: int | None = None) -> list[BinomialPoly]:
    """The polynomials r_j(i) = Delta^j[R_t](i*stride) for j = 0..delta, each
    interpolated in the binomial basis in the packet variable i with
    deg r_j = delta - j."""
    if delta is None:
        delta = r_t.degree
    polys = []
    for j in range(delta + 1):
        deg = delta - j
        values = []
        for i in range(deg + 1):
            # j-th forward difference of R_t at i*stride, by direct evaluation
            acc = None
            for m in range(j + 1):
                term = r_t.evaluate(i * stride + m) * ((-1) ** (j - m) * math.comb(j, m))
                acc = term if acc is None else acc + term
            values.append(acc)
        polys.append(newton_interpolate(values, r_t.scale))
    return polys


def tabulated_shift_step(column: Sequence) -> list:
    """Advance a difference-table column [Delta^0..Delta^gamma](i) to i+1
    with exactly gamma additions: Delta^l(i+1) = Delta^l(i) + Delta^(l+1)(i)."""
    out = list(column)
    for l in range(len(out) - 1):
        out[l] = out[l] + out[l + 1]
    return out


def straightforward_shift(poly: BinomialPoly, i: int) -> BinomialPoly:
    """Coefficients of poly(x + i) in the binomial basis via the upper
    triangular Toeplitz matrix binomial(i, m-l); equals i tabulated steps."""
    if i < 0:
        raise ValueError("shift must be nonnegative")
    gamma = poly.degree
    binoms = [1]
    for l in range(gamma):
        binoms.append(binoms[-1] * (i - l) // (l + 1))
    out = []
    for l in range(gamma + 1):
        acc = poly.coeffs[l]
        for m in range(l + 1, gamma + 1):
            acc = acc + poly.coeffs[m] * binoms[m - l]
        out.append(acc)
    return BinomialPoly(tuple(out), poly.scale)


def _pos_interval_mul(a: tuple[Fraction, Fraction], b: tuple[Fraction, Fraction]):
    return a[0] * b[0], a[1] * b[1]


def _derivative_intervals(fn: str, x: Fraction, delta: int, prec: int):
    """Enclosures of f^(k)(x) for k = 0..delta."""
    if fn == "exp":
        v = enclose("exp", x, prec)
        return [v] * (delta + 1)
    if fn == "log":
        out = [enclose("log", x, prec)]
        if delta >= 1:
            out.append((1 / x, 1 / x))
        if delta >= 2:
            out.append((-1 / x**2, -1 / x**2))
        return out
    if fn == "exp2":
        v = enclose("exp2", x, prec)
        l2 = enclose("log", Fraction(2), prec)
        out = [v]
        for _ in range(delta):
            v = _pos_interval_mul(v, l2)
            out.append(v)
        return out
    if fn == "identity":
        out = [(x, x), (Fraction(1), Fraction(1)), (Fraction(0), Fraction(0))]
        return out[: delta + 1]
    if is_polynomial(fn):
        return [(poly_value(fn, x, k), poly_value(fn, x, k)) for k in range(delta + 1)]
    raise ValueError(f"unsupported function {fn!r}")


def taylor_approx(
    fn: str,
    super_domain: Domain,
    cfg: PolyGenConfig,
    fmt: FpFormat,
) -> tuple[BinomialPoly, Fraction]:
    """Degree-delta Taylor expansion of y(x) = 2^(p-e) * fn(X(x)) about the
    super-domain midpoint, coefficients rounded onto the shared 2^-frac_bits
    grid, together with a rigorous bound on max |R_t(x) - y(x)| over the
    integer arguments x (ULP units, i.e. directly comparable to eps).

    The output exponent e(fn(X)) must be constant over the super-domain;
    callers split at output-binade crossings first.
    """
    count = super_domain.count
    if not 1 <= count <= cfg.tau * cfg.N:
        raise ValueError(f"super-domain count {count} outside [1, tau*N = {cfg.tau * cfg.N}]")
    prec = cfg.frac_bits + cfg.guard + 32
    x_first = super_domain.x_at(0, fmt)
    x_last = super_domain.x_at(count - 1, fmt)
    e_out = value_exponent(fn, x_first, prec)
    if value_exponent(fn, x_last, prec) != e_out:
        raise ValueError("super-domain crosses an output binade; split it first")

    xc = count // 2
    x_mid = super_domain.x_at(xc, fmt)
    ulp_in = Fraction(2) ** (super_domain.exponent - fmt.precision)
    norm = Fraction(2) ** (fmt.precision - e_out)

    derivs = _derivative_intervals(fn, x_mid, cfg.delta, prec)
    mids: list[Fraction] = []
    errs: list[Fraction] = []
    for k, (lo, hi) in enumerate(derivs):
        factor = norm * ulp_in**k / math.factorial(k)  # positive, exact
        mids.append((lo + hi) / 2 * factor)
        errs.append((hi - lo) / 2 * factor)

    # monomial in t = x - xc  ->  monomial in x  ->  binomial basis
    c = mids + [Fraction(0)] * (2 - len(mids) + 1)
    a0 = c[0] - c[1] * xc + c[2] * xc * xc
    a1 = c[1] - 2 * c[2] * xc
    a2 = c[2]
    sjs = [a0, a1 + a2, 2 * a2][: cfg.delta + 1]

    one_f = 1 << cfg.frac_bits
    coeffs = []
    round_err = Fraction(0)
    for j, s in enumerate(sjs):
        q = round(s * one_f)
        coeffs.append(MPInt.from_int(q, cfg.limbs))
        round_err += abs(s - Fraction(q, one_f)) * math.comb(count - 1, j)

    t_max = max(xc, count - 1 - xc)
    enc_err = sum(err * Fraction(t_max) ** k for k, err in enumerate(errs))
    dsup = derivative_bound(fn, cfg.delta + 1, x_first, x_last, prec)
    lagrange = norm * dsup * ulp_in ** (cfg.delta + 1) * Fraction(t_max) ** (cfg.delta + 1) / math.factorial(cfg.delta + 1)
    eps_approx = lagrange + enc_err + round_err
    if eps_approx >= Fraction(1, 4):
        raise ValueError(f"approximation budget blown: eps_approx = {float(eps_approx):.3g}")
    return BinomialPoly(tuple(coeffs), cfg.frac_bits), eps_approx


def generate_packets(r_polys: Sequence[BinomialPoly], cfg: PolyGenConfig) -> Iterator[tuple[int, int, int, object]]:
    """Stream the per-domain coefficient values r_j(u*nu + i) packet by
    packet, in deterministic (j, u, i) order.

    Each packet u seeds its difference column by one straightforward shift to
    i = u*nu and then walks nu-1 tabulated steps; the column head is the
    coefficient value at the current domain.  Packets never look at each
    other's state, so they could run concurrently; the order of yielded keys
    is the contract, not the schedule.
    """
    for j, rp in enumerate(r_polys):
        for u in range(cfg.mu):
            column = list(straightforward_shift(rp, u * cfg.nu).coeffs)
            for i in range(cfg.nu):
                if i:
                    column = tabulated_shift_step(column)
                yield j, u, i, column[0]


def domain_coefficient_sets(r_polys: Sequence[BinomialPoly], cfg: PolyGenConfig) -> list[tuple]:
    """Assemble the packet streams into one coefficient tuple (s_0..s_delta)
    per domain index i < tau: the binomial coefficients of P_{t+i}."""
    sets: list[list] = [[None] * len(r_polys) for _ in range(cfg.tau)]
    for j, u, i, value in generate_packets(r_polys, cfg):
        sets[u * cfg.nu + i][j] = value
    return [tuple(s) for s in sets]
