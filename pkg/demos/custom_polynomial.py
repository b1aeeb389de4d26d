"""
Searching a custom polynomial
=============================

Any function the search understands is named by a string; polynomials are
spelled "poly:c0,c1,..." with exact rational coefficients.  Useful for
sanity checks because a polynomial with representable coefficients can be
evaluated exactly -- no enclosure is ever in doubt.
"""

from fractions import Fraction

from hardround import FpFormat, decide_hr, run_pipeline
from hardround.evalf import poly_value
from hardround.fpmodel import bits_float
from hardround.pipeline import PhaseConfig, PipelineConfig
from hardround.polygen import PolyGenConfig

fmt = FpFormat(precision=13, eps_bits=8)


def config(fn: str) -> PipelineConfig:
    return PipelineConfig(
        fn=fn,
        fmt=fmt,
        polygen=PolyGenConfig(tau=16, N=64, mu=4, nu=4, delta=2,
                              limbs=8, frac_bits=96, guard=32),
        phase=PhaseConfig(algorithm="regular", phase2_split=8, N1=64),
    )


# A linear polynomial with power-of-two slope maps grid points to grid
# points: every value is exactly representable, so nothing is hard to round.
records, _ = run_pipeline(0, config("poly:0,1"))
print(f"poly:0,1 (the identity): {len(records)} hard cases")
assert not records

# A quadratic with awkward rational coefficients behaves like any
# transcendental: some arguments land near breakpoints.
fn = "poly:1/3,1,1/7"
records, _ = run_pipeline(0, config(fn))
print(f"{fn}: {len(records)} hard cases on [1, 2)")

for rec in records[:5]:
    x = bits_float(rec.argument, fmt)
    value = poly_value(fn, x)
    print(f"  x = {float(x):.6f}  f(x) = {float(value):.9f}  "
          f"distance {float(Fraction(rec.distance.raw, 1 << 64)):.2e} ulp")

# decide_hr is the single-argument entry point the pipeline's confirmation
# stage uses; it must agree with the batch result.
for rec in records:
    decision = decide_hr(fn, bits_float(rec.argument, fmt), fmt)
    assert decision.is_hr
print("per-argument decisions agree: ok")
