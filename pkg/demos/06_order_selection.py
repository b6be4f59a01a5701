"""
Model order selection
=====================

The information criterion 2*NLL + 5*K*ln(N) is scored for every order
from 0 (noise only) up to a cap; the minimizer is the selected order.
"""

import numpy as np

from onebitsine import RngState, ThresholdSpec, estimate, sample_one_bit, snr_to_sigma, synth
from onebitsine.bench import example1_signal

n = 1024
sig = example1_signal(n)   # six components
sigma = snr_to_sigma(sig, 10.0)
rec = sample_one_bit(synth(sig, n), sigma, ThresholdSpec(), RngState(606))
rec.truth = sig

rep = estimate(rec, "mmrelax", bic_max=8)
print(f"true order 6, selected order {rep.order}")
print(f"{'K':>3} {'score':>12}")
for k, s in enumerate(rep.bic_per_order):
    marker = " <- selected" if k == rep.order else ""
    print(f"{k:3d} {s:12.2f}{marker}")

print("\nselected components (sorted by frequency):")
for c in sorted(rep.components, key=lambda c: c["omega"]):
    print(f"  omega = {c['omega']:.5f}  A = {c['A']:.3f}  phi = {c['phi']:.3f}")
