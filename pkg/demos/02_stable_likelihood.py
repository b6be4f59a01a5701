"""
The one-bit likelihood and its quadratic majorizer
==================================================

Everything rests on f(x) = -log Phi(x): its curvature lies strictly
inside (0, 1), so a unit-curvature parabola touching f at any anchor lies
above it everywhere.  That bound is what turns each refinement step into
an ordinary least-squares sinusoid fit.
"""

import numpy as np

from onebitsine import RngState, ScaledParams, SinusoidSet, ThresholdSpec
from onebitsine.likelihood import (f, f_prime, f_second, nll, surrogate)
from onebitsine.sigmodel import sample_one_bit, synth

xs = np.array([-30.0, -10.0, -2.0, 0.0, 2.0, 10.0, 30.0])
print(f"{'x':>6} {'f(x)':>12} {'f_prime':>12} {'f_second':>12}")
for x in xs:
    print(f"{x:6.1f} {f(x):12.4e} {f_prime(x):12.4e} {f_second(x):12.4e}")

grid = np.arange(-30, 30, 1e-3)
vals = f_second(grid)
print(f"\nsecond derivative on [-30, 30]: min {vals.min():.3e}, "
      f"max {vals.max():.10f}  (strictly inside (0, 1))")

# the surrogate touches the objective at the anchor and majorizes it
rng = np.random.default_rng(0)
sig = SinusoidSet([1.0], [0.4], [1.3], "r1")
rec = sample_one_bit(synth(sig, 48), 0.5, ThresholdSpec(), RngState(3))
anchor = ScaledParams([[1.2, 0.4]], [1.3], 2.0, "r1")
print(f"\nNLL(anchor)       = {nll(rec, anchor):.6f}")
print(f"G(anchor|anchor)  = {surrogate(rec, anchor, anchor):.6f}")
worst = 0.0
for _ in range(500):
    p = ScaledParams(rng.normal(size=(1, 2)), [rng.uniform(0.1, 3.0)],
                     rng.uniform(0, 4), "r1")
    worst = max(worst, nll(rec, p) - surrogate(rec, p, anchor))
print(f"max over 500 random points of NLL - G = {worst:.3e}  (never positive)")
