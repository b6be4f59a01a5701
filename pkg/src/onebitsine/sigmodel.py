"""Signal synthesis, thresholds, and one-bit sampling.

Dimensionality tags used throughout the package:

``"r1"``
    real 1-D:    s_t = sum_k a_k sin(w_k t) + b_k cos(w_k t),  w in [0, pi)
``"c1"``
    complex 1-D: s_t = sum_k (a_k + j b_k) exp(j w_k t),       w in [0, 2pi)
``"c2"``
    complex 2-D: s_{t1,t2} = sum_k (a_k + j b_k) exp(j (w1_k t1 + w2_k t2))

with a_k = A_k cos(phi_k), b_k = A_k sin(phi_k) and unit sampling period.

The random number generator is SplitMix64 with Box-Muller normals so that
identical seeds reproduce identical streams:

    state <- (state + 0x9E3779B97F4A7C15) mod 2^64
    z <- state; z <- (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z <- (z ^ (z >> 27)) * 0x94D049BB133111EB; z <- z ^ (z >> 31)
    uniform = (z >> 11) * 2^-53                       in [0, 1)
    normals via g0 = sqrt(-2 ln(1-u1)) cos(2 pi u2),
                g1 = sqrt(-2 ln(1-u1)) sin(2 pi u2)

When sampling a record, thresholds are materialized first (real draws, or
Re then Im for complex thresholds), then the noise, both in flat row-major
order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

TWO_PI = 2.0 * np.pi

DIMS = ("r1", "c1", "c2")

__all__ = [
    "SinusoidSet",
    "ThresholdSpec",
    "SignedRecord",
    "RngState",
    "sinusoid_signal",
    "synth",
    "sign_real",
    "sign_complex",
    "sample_one_bit",
    "snr_to_sigma",
]


# ---------------------------------------------------------------------------
# deterministic RNG

_GOLDEN = 0x9E3779B97F4A7C15
_MASK = (1 << 64) - 1


def splitmix64_mix(v: int) -> int:
    """The SplitMix64 output function applied to a 64-bit word."""
    z = v & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


class RngState:
    """SplitMix64 generator state; see the module docstring for the update
    and output functions.  Calls advance the state in place; callers own
    one instance per thread."""

    def __init__(self, seed: int):
        self.state = int(seed) & _MASK

    def next_words(self, n: int) -> np.ndarray:
        """Next n raw 64-bit outputs."""
        incs = (np.arange(1, n + 1, dtype=np.uint64) * np.uint64(_GOLDEN))
        with np.errstate(over="ignore"):
            s = np.uint64(self.state) + incs
            z = (s ^ (s >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
            z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
            z = z ^ (z >> np.uint64(31))
        self.state = (self.state + n * _GOLDEN) & _MASK
        return z

    def uniform(self, n: int) -> np.ndarray:
        """n doubles uniform on [0, 1)."""
        return (self.next_words(n) >> np.uint64(11)) * 2.0 ** -53

    def normal(self, n: int) -> np.ndarray:
        """n standard normal doubles via Box-Muller.

        Pair i consumes uniforms 2i and 2i+1 of the stream, so the values
        at a given stream position do not depend on the batch size."""
        pairs = (n + 1) // 2
        u = self.uniform(2 * pairs)
        u1 = u[0::2]
        u2 = u[1::2]
        rad = np.sqrt(-2.0 * np.log1p(-u1))
        ang = TWO_PI * u2
        g = np.empty(2 * pairs)
        g[0::2] = rad * np.cos(ang)
        g[1::2] = rad * np.sin(ang)
        return g[:n]


# ---------------------------------------------------------------------------
# sinusoid parameter sets

@dataclass
class SinusoidSet:
    """Amplitude/phase/frequency triples plus a dimensionality tag.

    amps, phases are (K,) arrays; freqs is (K,) for 1-D and (K, 2) for the
    2-D case.  The (a, b) quadrature form is derived as a = A cos(phi),
    b = A sin(phi).
    """

    amps: np.ndarray
    phases: np.ndarray
    freqs: np.ndarray
    dim: str = "r1"

    def __post_init__(self):
        self.amps = np.atleast_1d(np.asarray(self.amps, dtype=float))
        self.phases = np.atleast_1d(np.asarray(self.phases, dtype=float))
        self.freqs = np.asarray(self.freqs, dtype=float)
        if self.dim not in DIMS:
            raise ValueError(f"unknown dimensionality tag {self.dim!r}")
        k = self.amps.shape[0]
        want = (k, 2) if self.dim == "c2" else (k,)
        self.freqs = self.freqs.reshape(want) if self.freqs.size == int(np.prod(want)) else self.freqs
        if self.freqs.shape != want or self.phases.shape != (k,):
            raise ValueError("inconsistent component array shapes")

    @property
    def order(self) -> int:
        return self.amps.shape[0]

    def validate(self):
        if np.any(self.amps <= 0.0):
            raise ValueError("amplitudes must be positive")
        hi = np.pi if self.dim == "r1" else TWO_PI
        if np.any(self.freqs < 0.0) or np.any(self.freqs >= hi):
            raise ValueError(f"frequencies must lie in [0, {'pi' if self.dim == 'r1' else '2*pi'})")
        return self

    def ab(self) -> np.ndarray:
        """(K, 2) array of quadrature coefficients [a_k, b_k]."""
        return np.column_stack((self.amps * np.cos(self.phases),
                                self.amps * np.sin(self.phases)))

    @classmethod
    def from_ab(cls, coeffs, freqs, dim="r1") -> "SinusoidSet":
        coeffs = np.asarray(coeffs, dtype=float).reshape(-1, 2)
        amps = np.hypot(coeffs[:, 0], coeffs[:, 1])
        phases = np.mod(np.arctan2(coeffs[:, 1], coeffs[:, 0]), TWO_PI)
        return cls(amps, phases, np.asarray(freqs, dtype=float), dim)

    @classmethod
    def empty(cls, dim="r1") -> "SinusoidSet":
        freqs = np.zeros((0, 2)) if dim == "c2" else np.zeros(0)
        return cls(np.zeros(0), np.zeros(0), freqs, dim)

    def to_json_list(self):
        out = []
        for k in range(self.order):
            om = self.freqs[k]
            out.append({"A": float(self.amps[k]), "phi": float(self.phases[k]),
                        "omega": [float(om[0]), float(om[1])] if self.dim == "c2" else float(om)})
        return out

    @classmethod
    def from_json_list(cls, items, dim="r1") -> "SinusoidSet":
        if not items:
            return cls.empty(dim)
        amps = [c["A"] for c in items]
        phases = [c["phi"] for c in items]
        freqs = [c["omega"] for c in items]
        return cls(np.array(amps), np.array(phases), np.array(freqs), dim)


def sinusoid_signal(coeffs, freqs, shape, dim: str) -> np.ndarray:
    """Evaluate the (a, b)-form sinusoid sum on an integer time grid.

    coeffs: (K, 2) quadrature coefficients; freqs: (K,) or (K, 2).
    shape: sample count N, or (N1, N2) for the 2-D case.
    """
    coeffs = np.asarray(coeffs, dtype=float).reshape(-1, 2)
    freqs = np.asarray(freqs, dtype=float)
    if dim != "c2" and np.ndim(shape) > 0:
        shape = np.atleast_1d(shape)[0]
    if dim == "r1":
        n = int(shape)
        t = np.arange(n)
        s = np.zeros(n)
        for (a, b), w in zip(coeffs, freqs):
            wt = w * t
            s += a * np.sin(wt) + b * np.cos(wt)
        return s
    if dim == "c1":
        n = int(shape)
        t = np.arange(n)
        s = np.zeros(n, dtype=np.complex128)
        for (a, b), w in zip(coeffs, freqs):
            s += (a + 1j * b) * np.exp(1j * w * t)
        return s
    if dim == "c2":
        n1, n2 = (int(shape[0]), int(shape[1]))
        t1 = np.arange(n1)[:, None]
        t2 = np.arange(n2)[None, :]
        s = np.zeros((n1, n2), dtype=np.complex128)
        freqs = freqs.reshape(-1, 2)
        for (a, b), (w1, w2) in zip(coeffs, freqs):
            s += (a + 1j * b) * np.exp(1j * (w1 * t1 + w2 * t2))
        return s
    raise ValueError(f"unknown dimensionality tag {dim!r}")


def synth(params: SinusoidSet, shape) -> np.ndarray:
    """Noise-free model signal for a SinusoidSet on t = 0..N-1 (per axis)."""
    if params.dim == "c2":
        if np.ndim(shape) == 0 or len(tuple(np.atleast_1d(shape))) != 2:
            raise ValueError("2-D parameters require an (N1, N2) shape")
    else:
        if np.ndim(shape) != 0:
            raise ValueError("1-D parameters require a scalar sample count")
        if int(shape) <= 0:
            raise ValueError("sample count must be positive")
    return sinusoid_signal(params.ab(), params.freqs, shape, params.dim)


# ---------------------------------------------------------------------------
# one-bit sampling

def sign_real(x):
    """+1 for x >= 0, else -1 (elementwise)."""
    return np.where(np.asarray(x) >= 0.0, 1.0, -1.0)[()]


def sign_complex(x):
    """Componentwise sign: sign(Re x) + j sign(Im x)."""
    x = np.asarray(x)
    return (sign_real(x.real) + 1j * sign_real(x.imag))[()]


@dataclass
class ThresholdSpec:
    """Comparator reference specification.

    kind="fixed": every sample compared against ``value`` (real or complex).
    kind="discrete-random": per-sample i.i.d. draw from ``levels`` equally
    spaced values covering [low, high] inclusive (independent Re/Im draws
    for complex data).
    """

    kind: str = "discrete-random"
    value: complex = 0.0
    levels: int = 8
    low: float = -1.0
    high: float = 1.0

    def __post_init__(self):
        if self.kind not in ("fixed", "discrete-random"):
            raise ValueError(f"unknown threshold kind {self.kind!r}")
        if self.kind == "discrete-random" and self.levels < 2:
            raise ValueError("discrete-random thresholds need >= 2 levels")

    def level_values(self) -> np.ndarray:
        return np.linspace(self.low, self.high, self.levels)

    def materialize(self, shape, dim: str, rng: Optional[RngState]) -> np.ndarray:
        size = int(np.prod(shape))
        if self.kind == "fixed":
            if dim == "r1":
                h = np.full(size, float(np.real(self.value)))
            else:
                h = np.full(size, complex(self.value), dtype=np.complex128)
        else:
            if rng is None:
                raise ValueError("discrete-random thresholds require an RngState")
            vals = self.level_values()
            idx = np.minimum((rng.uniform(size) * self.levels).astype(int), self.levels - 1)
            if dim == "r1":
                h = vals[idx]
            else:
                idx2 = np.minimum((rng.uniform(size) * self.levels).astype(int), self.levels - 1)
                h = vals[idx] + 1j * vals[idx2]
        return h.reshape(shape)


@dataclass
class SignedRecord:
    """One-bit measurements y, matching thresholds h, and metadata.

    y entries are exactly +-1 (real) or +-1 +- j (complex).  ``truth`` and
    ``sigma`` optionally carry the generating parameters for benchmarking.
    """

    y: np.ndarray
    h: np.ndarray
    dim: str
    truth: Optional[SinusoidSet] = None
    sigma: Optional[float] = None

    def __post_init__(self):
        if self.dim not in DIMS:
            raise ValueError(f"unknown dimensionality tag {self.dim!r}")
        self.y = np.asarray(self.y)
        self.h = np.asarray(self.h)
        if self.y.shape != self.h.shape:
            raise ValueError("y and h shapes must match")
        want_nd = 2 if self.dim == "c2" else 1
        if self.y.ndim != want_nd:
            raise ValueError(f"{self.dim} records must be {want_nd}-D")
        if self.dim == "r1":
            if not np.all(np.abs(self.y) == 1.0):
                raise ValueError("real signed measurements must be exactly +-1")
        else:
            if not (np.all(np.abs(self.y.real) == 1.0) and np.all(np.abs(self.y.imag) == 1.0)):
                raise ValueError("complex signed measurements must be +-1 +- j")

    @property
    def shape(self):
        return self.y.shape

    @property
    def size(self) -> int:
        return self.y.size

    def to_json_dict(self) -> dict:
        d: dict = {"dim": self.dim}
        if self.dim == "c2":
            d["n"] = [int(self.shape[0]), int(self.shape[1])]
        else:
            d["n"] = int(self.shape[0])
        if self.dim == "r1":
            d["y"] = [int(v) for v in self.y]
            d["h"] = [float(v) for v in self.h]
        else:
            yf = self.y.ravel()
            hf = self.h.ravel()
            d["y"] = [[int(v.real), int(v.imag)] for v in yf]
            d["h"] = [[float(v.real), float(v.imag)] for v in hf]
        if self.truth is not None:
            d["truth"] = {"components": self.truth.to_json_list(),
                          "sigma": None if self.sigma is None else float(self.sigma)}
        return d

    @classmethod
    def from_json_dict(cls, d: dict) -> "SignedRecord":
        dim = d["dim"]
        if dim not in DIMS:
            raise ValueError(f"unknown dimensionality tag {dim!r}")
        if dim == "r1":
            y = np.asarray(d["y"], dtype=float)
            h = np.asarray(d["h"], dtype=float)
        else:
            ya = np.asarray(d["y"], dtype=float)
            ha = np.asarray(d["h"], dtype=float)
            y = ya[:, 0] + 1j * ya[:, 1]
            h = ha[:, 0] + 1j * ha[:, 1]
            if dim == "c2":
                n1, n2 = d["n"]
                y = y.reshape(n1, n2)
                h = h.reshape(n1, n2)
        truth = None
        sigma = None
        if d.get("truth") is not None:
            truth = SinusoidSet.from_json_list(d["truth"].get("components", []), dim)
            sigma = d["truth"].get("sigma")
        return cls(y, h, dim, truth=truth, sigma=sigma)

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "SignedRecord":
        with open(path) as fh:
            return cls.from_json_dict(json.load(fh))


def sample_one_bit(signal, noise_sigma: float, thresholds: ThresholdSpec,
                   rng: RngState, dim: Optional[str] = None) -> SignedRecord:
    """One-bit sample a clean signal against thresholds in Gaussian noise.

    Real data uses e ~ N(0, sigma^2); complex data uses circularly
    symmetric noise with Re, Im ~ N(0, sigma^2 / 2).  Thresholds are
    materialized before the noise is drawn.
    """
    signal = np.asarray(signal)
    if not noise_sigma > 0.0:
        raise ValueError("noise_sigma must be > 0")
    if dim is None:
        if signal.ndim == 2:
            dim = "c2"
        elif np.iscomplexobj(signal):
            dim = "c1"
        else:
            dim = "r1"
    h = thresholds.materialize(signal.shape, dim, rng)
    n = signal.size
    if dim == "r1":
        e = noise_sigma * rng.normal(n).reshape(signal.shape)
        y = sign_real(signal + e - h)
    else:
        scale = noise_sigma / np.sqrt(2.0)
        er = scale * rng.normal(n)
        ei = scale * rng.normal(n)
        e = (er + 1j * ei).reshape(signal.shape)
        y = sign_complex(signal + e - h)
    return SignedRecord(y, h, dim)


def snr_to_sigma(params: SinusoidSet, snr_db: float) -> float:
    """Noise scale giving the strongest component the requested SNR.

    Convention (documented, the source experiments leave it implicit):
    SNR = A_max^2 / (2 sigma^2) for real signals and A_max^2 / sigma^2 for
    complex signals.
    """
    if params.order == 0:
        raise ValueError("snr_to_sigma requires a non-empty SinusoidSet")
    a_max = float(np.max(params.amps))
    snr = 10.0 ** (snr_db / 10.0)
    if params.dim == "r1":
        return a_max / np.sqrt(2.0 * snr)
    return a_max / np.sqrt(snr)
