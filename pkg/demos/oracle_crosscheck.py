"""
Cross-checking the pipeline against brute force
===============================================

The filtering pipeline is only worth trusting if it finds exactly the cases a
plain per-argument scan finds.  This runs both on the same range, diffs the
sets, and then uses interval refinement to rank the survivors by how hard
they actually are.
"""

import math

from hardround import FpFormat, exhaustive_hr_search, run_pipeline, ziv_refine
from hardround.fpmodel import Domain, bits_float
from hardround.pipeline import PhaseConfig, PipelineConfig
from hardround.polygen import PolyGenConfig

fmt = FpFormat(precision=13, eps_bits=8)

cfg = PipelineConfig(
    fn="log",
    fmt=fmt,
    polygen=PolyGenConfig(tau=16, N=64, mu=4, nu=4, delta=2,
                          limbs=8, frac_bits=96, guard=32),
    phase=PhaseConfig(algorithm="lefevre", phase2_split=8, N1=64),
)

# Pipeline pass over log on [1, 2).
records, _ = run_pipeline(0, cfg)

# The oracle decides every argument one by one -- no filtering, no model,
# just interval evaluation at increasing working precision.
half = 1 << (fmt.precision - 1)
oracle = exhaustive_hr_search("log", Domain(half, 1, half, 0), fmt)

found = {(r.argument, r.distance) for r in records}
expected = {(r.argument, r.distance) for r in oracle}
print(f"pipeline found   {len(found)} cases")
print(f"oracle found     {len(expected)} cases")
print(f"symmetric diff   {len(found ^ expected)}")
assert found == expected

# Rank the cases: refine each distance enclosure until the order is strict
# and keep the single hardest argument.
hardest = ziv_refine(oracle, "log", fmt)[0]
x = bits_float(hardest.argument, fmt)
print()
print(f"hardest argument: x = {float(x):.6f} (bits 0x{hardest.argument:x})")
print(f"  log(x) sits {hardest.distance.raw}/2^{hardest.distance.width} ulp "
      f"from a breakpoint, about 2^{math.log2(float(hardest.distance)):.1f} ulp")
