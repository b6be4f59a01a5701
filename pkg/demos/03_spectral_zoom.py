"""
Chirp-z spectral zoom
=====================

A zero-padded FFT localizes a tone to one coarse bin; the chirp-z
transform then samples the spectrum on an arbitrarily fine grid inside
that bin, at the cost of a few more power-of-two FFTs.
"""

import numpy as np

from onebitsine.spectral import ZoomSpec, czt, fft, next_pow2

n = 200
w0 = 0.8719  # deliberately off every coarse grid
x = np.exp(1j * w0 * np.arange(n))

n1 = next_pow2(n)
coarse = fft(x, n1)
k = int(np.argmax(np.abs(coarse)))
w_coarse = 2 * np.pi * k / n1
print(f"true frequency      {w0:.6f}")
print(f"coarse FFT ({n1} pt) {w_coarse:.6f}   error {abs(w_coarse - w0):.2e}")

zoom = ZoomSpec(w_coarse - 2 * np.pi / n1, 4 * np.pi / n1 / 256, 257)
spectrum = czt(x, zoom)
w_fine = zoom.freqs()[int(np.argmax(np.abs(spectrum)))]
print(f"chirp zoom (257 pt)  {w_fine:.6f}   error {abs(w_fine - w0):.2e}")

# the zoom degenerates to the plain DFT on the full circle
full = czt(x[:128], ZoomSpec(0.0, 2 * np.pi / 128, 128))
ref = fft(x[:128], 128)
print(f"full-circle zoom == FFT: max |diff| = {np.max(np.abs(full - ref)):.2e}")
