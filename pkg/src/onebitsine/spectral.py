"""Dense spectral primitives: zero-padded FFT and chirp-z spectral zoom.

The zoom transform evaluates the DFT on an arbitrary uniform frequency
grid ``start + m*step`` (radians/sample) via Bluestein's chirp
factorization, so a narrow frequency band can be sampled much finer than
the FFT bin spacing.  The internal circular convolution always uses the
smallest power-of-two length ``>= len(x) + num_bins - 1``; callers that
keep ``num_bins <= len_pow2 + 1`` therefore get convolutions of exactly
twice the padded input length.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * np.pi

__all__ = ["ZoomSpec", "fft", "czt", "next_pow2"]


def next_pow2(n: int) -> int:
    """Smallest power of two >= n (n >= 1)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return 1 << (int(n) - 1).bit_length()


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class ZoomSpec:
    """Uniform frequency grid for the spectral zoom.

    start_freq : first grid frequency, radians/sample
    freq_step  : grid spacing, radians/sample (> 0)
    num_bins   : number of grid points (>= 2)

    The grid must span a sub-interval of [0, 2*pi).
    """

    start_freq: float
    freq_step: float
    num_bins: int

    def __post_init__(self):
        if self.num_bins < 2:
            raise ValueError("num_bins must be >= 2")
        if not self.freq_step > 0.0:
            raise ValueError("freq_step must be > 0")
        end = self.start_freq + (self.num_bins - 1) * self.freq_step
        if self.start_freq < 0.0 or end >= TWO_PI:
            raise ValueError("zoom grid must lie within [0, 2*pi)")

    def freqs(self) -> np.ndarray:
        return self.start_freq + self.freq_step * np.arange(self.num_bins)


def fft(x, size: int) -> np.ndarray:
    """Zero-padded power-of-two DFT.

    Bin ``m`` holds ``sum_n x[n] * exp(-2j*pi*m*n/size)``.  ``size`` must
    be a power of two and at least ``len(x)``.
    """
    x = np.asarray(x)
    if x.ndim != 1:
        raise ValueError("fft expects a 1-D input vector")
    if not _is_pow2(size):
        raise ValueError(f"size must be a power of two, got {size}")
    if size < x.shape[0]:
        raise ValueError("size must be >= len(x)")
    return np.fft.fft(x.astype(np.complex128, copy=False), n=size)


_CHIRP_CACHE: "OrderedDict" = None  # created lazily below


def _chirp_plan(n: int, num_bins: int, step: float):
    """Cache the step-dependent chirp factors and the transformed
    convolution kernel; zoom passes reuse the same (n, bins, step) many
    times."""
    global _CHIRP_CACHE
    from collections import OrderedDict
    if _CHIRP_CACHE is None:
        _CHIRP_CACHE = OrderedDict()
    key = (n, num_bins, step)
    plan = _CHIRP_CACHE.get(key)
    if plan is None:
        conv_len = next_pow2(n + num_bins - 1)
        half_step = 0.5 * step
        k_in = np.arange(n)
        k_out = np.arange(num_bins)
        chirp_in = np.exp(-1j * half_step * k_in**2)
        chirp_out = np.exp(-1j * half_step * k_out**2)
        b = np.zeros(conv_len, dtype=np.complex128)
        b[:num_bins] = np.conj(chirp_out)
        if n > 1:
            tail = np.arange(1, n)
            b[conv_len - tail] = np.conj(chirp_in[tail])
        plan = (conv_len, chirp_in, chirp_out, np.fft.fft(b))
        _CHIRP_CACHE[key] = plan
        while len(_CHIRP_CACHE) > 32:
            _CHIRP_CACHE.popitem(last=False)
    else:
        _CHIRP_CACHE.move_to_end(key)
    return plan


def _czt_raw(x: np.ndarray, start: float, step: float, num_bins: int) -> np.ndarray:
    """Bluestein evaluation of sum_n x[n] exp(-1j (start + m step) n) for
    m = 0..num_bins-1, without any domain validation on the grid."""
    x = np.asarray(x).astype(np.complex128, copy=False)
    n = x.shape[0]
    conv_len, chirp_in, chirp_out, b_hat = _chirp_plan(n, num_bins, step)
    # a[n] = x[n] * exp(-j*start*n) * exp(-j*(step/2)*n^2)
    a = x * np.exp(-1j * start * np.arange(n)) * chirp_in
    conv = np.fft.ifft(np.fft.fft(a, conv_len) * b_hat)
    return chirp_out * conv[:num_bins]


def czt(x, zoom: ZoomSpec) -> np.ndarray:
    """Chirp-z spectral zoom of ``x`` on the grid described by ``zoom``.

    Output bin ``m`` equals ``sum_n x[n] * exp(-1j*(start + m*step)*n)``,
    computed with Bluestein's identity ``m*n = (m^2 + n^2 - (m-n)^2)/2``
    as a chirp pre-multiplication followed by a circular convolution of
    power-of-two length.
    """
    x = np.asarray(x)
    if x.ndim != 1 or x.shape[0] == 0:
        raise ValueError("czt expects a non-empty 1-D input vector")
    return _czt_raw(x, zoom.start_freq, zoom.freq_step, zoom.num_bins)
