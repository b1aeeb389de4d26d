"""
How the pipeline gets a polynomial per tiny domain
==================================================

Phase 1 tests thousands of small domains per binade; each needs its own
degree-2 model of the function.  Computing one fresh approximation per domain
would swamp everything, so one super-domain polynomial is built and then
*shifted* from domain to domain with bare integer additions.  This is the
machinery, shown on x^3 where every number is small enough to eyeball.
"""

from hardround import (
    BinomialPoly,
    forward_difference,
    hierarchical_split,
    newton_interpolate,
    straightforward_shift,
    tabulated_shift_step,
)

# --- from values to coefficients ------------------------------------------
# Four samples of x^3 pin down the cubic.  In the binomial basis
# P(x) = sum_j c_j * C(x, j) the coefficients are just the leading forward
# differences of the value table.
values = [0, 1, 8, 27]
poly = newton_interpolate(values)
print(f"P(0..3) = {values}  ->  binomial coefficients {poly.coeffs}")
assert [poly.evaluate(x) for x in range(4)] == values
assert poly.evaluate(10) == 1000  # exact beyond the sample points

print("\ndifference table of P(0..6):")
table = [[poly.evaluate(x) for x in range(7)]]
table += forward_difference(table[0])
for row in table:
    print("  ", row)

# --- stepping: P(x) -> P(x+1) with 3 additions ----------------------------
# A column [P(i), dP(i), d2P(i), d3P(i)] advances to i+1 by adding each entry
# to the one above it.  No multiplications anywhere.
col = list(poly.coeffs)
walk = [col[0]]
for _ in range(6):
    col = tabulated_shift_step(col)
    walk.append(col[0])
print(f"\ntabulated walk of P over 0..6: {walk}")
assert walk == table[0]

# --- jumping: P(x) -> P(x+i) in one multiply-heavy move --------------------
# The Toeplitz-matrix shift lands anywhere directly; it must agree with
# stepping one at a time.
jump = straightforward_shift(poly, 5)
col = list(poly.coeffs)
for _ in range(5):
    col = tabulated_shift_step(col)
print(f"P(x+5) coefficients: jump {jump.coeffs}, stepped {tuple(col)}")
assert jump.coeffs == tuple(col)
assert jump.evaluate(0) == 125

# --- splitting work across a grid of evaluators ----------------------------
# hierarchical_split hands evaluator j the j-th difference stream, sampled
# every `stride` arguments, so a mu x nu grid can stream coefficients for
# mu*nu domains in parallel; each stream is itself a polynomial of lower
# degree.
streams = hierarchical_split(poly, stride=4)
print(f"\nsplit with stride 4: degrees {[s.degree for s in streams]}")
base = BinomialPoly(poly.coeffs)
for j, stream in enumerate(streams):
    got = [stream.evaluate(i) for i in range(4)]
    # j-th forward difference of P sampled at 0, 4, 8, 12
    want = []
    for i in range(4):
        shifted = straightforward_shift(base, 4 * i)
        diffs = [shifted.evaluate(0)] + [r[0] for r in
                                         forward_difference(
                                             [shifted.evaluate(x) for x in range(4)])]
        want.append(diffs[j])
    print(f"  stream {j}: {got}")
    assert got == want
