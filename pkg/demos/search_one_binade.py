"""
Finding the hard-to-round cases of exp on one binade
====================================================

A value is hard to round when it sits so close to a rounding breakpoint that
p bits of the function value are not enough to pick the correctly rounded
result.  This walks the filtering pipeline over every 13-bit argument in
[1, 2) and prints what it finds.
"""

from fractions import Fraction

from hardround import FpFormat, dist_p, run_pipeline
from hardround.evalf import enclose
from hardround.fpmodel import bits_float, float_bits
from hardround.pipeline import PhaseConfig, PipelineConfig
from hardround.polygen import PolyGenConfig

# Target format: 13-bit mantissas, and we call a case "hard" when the value
# lands within 2^-8 ulp of a breakpoint.
fmt = FpFormat(precision=13, eps_bits=8)

cfg = PipelineConfig(
    fn="exp",
    fmt=fmt,
    polygen=PolyGenConfig(tau=16, N=64, mu=4, nu=4, delta=2,
                          limbs=8, frac_bits=96, guard=32),
    phase=PhaseConfig(algorithm="regular", phase2_split=8, N1=64),
)

# One call covers the whole binade [2^0, 2^1).
records, stats = run_pipeline(0, cfg)

print(f"binade [1, 2) at p = {fmt.precision}: "
      f"{stats.rows[0].arguments_covered} arguments scanned")
print()
print("filter funnel (domains in -> out):")
for row in stats.rows:
    print(f"  {row.phase:<8} {row.domains_in:>6} -> {row.domains_out:<6} "
          f"({row.wall_ms:.1f} ms)")
print()
print(f"{len(records)} hard-to-round cases:")
for rec in records[:8]:
    x = bits_float(rec.argument, fmt)
    print(f"  x = {float(x):.6f}  bits 0x{rec.argument:x}  "
          f"distance {rec.distance.raw}/2^{rec.distance.width}")
if len(records) > 8:
    print(f"  ... and {len(records) - 8} more")

# Check the first case by hand: evaluate exp(x) tightly and measure how far
# the scaled value sits from the nearest representable mantissa.
rec = records[0]
x = bits_float(rec.argument, fmt)
lo, hi = enclose("exp", x, 120)
d = dist_p((lo + hi) / 2, fmt.precision)
print()
print(f"spot check x = {Fraction(x)}: exp(x) ~ {float(lo):.10f}, "
      f"breakpoint distance ~ {float(d):.3e} ulp "
      f"(threshold {float(fmt.eps):.3e})")
assert d < fmt.eps
assert float_bits(x, fmt) == rec.argument
