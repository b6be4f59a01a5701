"""Numerically stable one-bit likelihood: f(x) = -log(Phi(x)), its first
two derivatives, margins, negative log-likelihood, and the quadratic
surrogate used by the majorize-minimize engine.

Branch layout for f (Phi is the standard normal cdf):

* x < -26:   asymptotic tail, log Phi(x) = -x^2/2 - log(-x) - log sqrt(2 pi)
             + log1p(-1/x^2 + 3/x^4 - 15/x^6)
* -26..0:    -log(erfc(-x/sqrt 2) / 2)
* 0..26:     -log1p(-erfc(x/sqrt 2) / 2)
* x >= 26:   upper-tail series, f ~ Q(x) = pdf(x)/x * (1 - 1/x^2 + 3/x^4 - 15/x^6)

f'(x) = -pdf(x)/Phi(x) = -r(x) with r computed from the scaled complement
erfcx for x <= 0 (exact to the last few ulps, no underflow) and from
pdf/(1 - erfc/2) for x > 0.  f''(x) = r(x) (x + r(x)), switched to the
series 1 - 1/x^2 + 6/x^4 - 50/x^6 + 518/x^8 for x <= -30 where the
identity would lose digits to cancellation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special

from .sigmodel import DIMS, SignedRecord, sinusoid_signal

SQRT2 = np.sqrt(2.0)
SQRT_2_OVER_PI = np.sqrt(2.0 / np.pi)
INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)
LOG_SQRT_2PI = 0.5 * np.log(2.0 * np.pi)
_TINY = np.nextafter(0.0, 1.0)  # smallest subnormal, keeps signs strict

__all__ = ["ScaledParams", "f", "f_prime", "f_second", "margins", "nll",
           "nll_from_margins", "surrogate"]


def _check_finite(x: np.ndarray):
    if np.any(np.isnan(x)):
        raise ValueError("NaN input")


def f(x):
    """-log(Phi(x)), stable over the full double range."""
    x = np.asarray(x, dtype=float)
    _check_finite(x)
    out = np.empty_like(x)
    lo = x < -26.0
    hi = x >= 26.0
    neg = ~lo & (x < 0.0)
    pos = ~hi & (x >= 0.0)

    xm = x[neg]
    out[neg] = -np.log(0.5 * special.erfc(-xm / SQRT2))
    xp = x[pos]
    out[pos] = -np.log1p(-0.5 * special.erfc(xp / SQRT2))
    xl = x[lo]
    u = 1.0 / (xl * xl)
    out[lo] = (0.5 * xl * xl + np.log(-xl) + LOG_SQRT_2PI
               - np.log1p(-u * (1.0 - 3.0 * u * (1.0 - 5.0 * u))))
    xh = x[hi]
    v = 1.0 / (xh * xh)
    out[hi] = (np.exp(-0.5 * xh * xh - LOG_SQRT_2PI) / xh
               * (1.0 - v * (1.0 - 3.0 * v * (1.0 - 5.0 * v * (1.0 - 7.0 * v)))))
    return out[()]


def _mills(x: np.ndarray) -> np.ndarray:
    """r(x) = pdf(x)/Phi(x), the inverse Mills ratio of the lower tail."""
    out = np.empty_like(x)
    lo = x < -37.0
    neg = ~lo & (x <= 0.0)
    pos = x > 0.0
    xl = x[lo]
    t = -xl
    u = 1.0 / (xl * xl)
    out[lo] = t + (1.0 / t) * (1.0 - u * (2.0 - 10.0 * u))
    xn = x[neg]
    out[neg] = SQRT_2_OVER_PI / special.erfcx(-xn / SQRT2)
    xp = x[pos]
    out[pos] = (np.exp(-0.5 * xp * xp) * INV_SQRT_2PI
                / (1.0 - 0.5 * special.erfc(xp / SQRT2)))
    return out


def f_prime(x):
    """d/dx of -log(Phi(x)); strictly negative."""
    x = np.asarray(x, dtype=float)
    _check_finite(x)
    return -np.maximum(_mills(x), _TINY)[()]


def f_second(x):
    """Second derivative of -log(Phi(x)); lies strictly in (0, 1)."""
    x = np.asarray(x, dtype=float)
    _check_finite(x)
    out = np.empty_like(x)
    lo = x <= -30.0
    xl = x[lo]
    u = 1.0 / (xl * xl)
    out[lo] = 1.0 - u * (1.0 - u * (6.0 - u * (50.0 - 518.0 * u)))
    xr = x[~lo]
    r = _mills(xr)
    out[~lo] = r * (xr + r)
    return np.maximum(out, _TINY)[()]


# ---------------------------------------------------------------------------
# scaled parameters and likelihood

@dataclass
class ScaledParams:
    """Noise-normalized sinusoid parameters plus lambda = 1/sigma
    (real data) or sqrt(2)/sigma (complex data).

    coeffs: (K, 2) scaled quadrature pairs [a~_k, b~_k]
    freqs:  (K,) radians/sample, or (K, 2) for 2-D data
    lam:    non-negative scale; lam = 0 is the degenerate sigma -> inf
    """

    coeffs: np.ndarray
    freqs: np.ndarray
    lam: float
    dim: str = "r1"

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float).reshape(-1, 2)
        k = self.coeffs.shape[0]
        want = (k, 2) if self.dim == "c2" else (k,)
        self.freqs = np.asarray(self.freqs, dtype=float).reshape(want)
        self.lam = float(self.lam)
        if self.dim not in DIMS:
            raise ValueError(f"unknown dimensionality tag {self.dim!r}")
        if self.lam < 0.0:
            raise ValueError("lambda must be >= 0")

    @property
    def order(self) -> int:
        return self.coeffs.shape[0]

    def signal(self, shape) -> np.ndarray:
        return sinusoid_signal(self.coeffs, self.freqs, shape, self.dim)

    def copy(self) -> "ScaledParams":
        return ScaledParams(self.coeffs.copy(), self.freqs.copy(), self.lam, self.dim)

    @classmethod
    def empty(cls, dim="r1", lam=0.0) -> "ScaledParams":
        freqs = np.zeros((0, 2)) if dim == "c2" else np.zeros(0)
        return cls(np.zeros((0, 2)), freqs, lam, dim)


def _check_match(record: SignedRecord, params: ScaledParams):
    if record.dim != params.dim:
        raise ValueError(f"record is {record.dim!r} but params are {params.dim!r}")


def margins(record: SignedRecord, params: ScaledParams) -> np.ndarray:
    """Margin vector x_n = y_n (s_n - lambda h_n).

    Real records give a real vector; complex records give a complex vector
    whose real/imag parts are the Re and Im channel margins."""
    _check_match(record, params)
    s = params.signal(record.shape)
    if record.dim == "r1":
        return record.y * (s - params.lam * record.h)
    d = s - params.lam * record.h
    return record.y.real * d.real + 1j * (record.y.imag * d.imag)


def nll_from_margins(x: np.ndarray) -> float:
    """Sum of f over all real margin channels."""
    if np.iscomplexobj(x):
        return float(np.sum(f(x.real)) + np.sum(f(x.imag)))
    return float(np.sum(f(x)))


def nll(record: SignedRecord, params: ScaledParams) -> float:
    """Negative log-likelihood of the signed measurements."""
    return nll_from_margins(margins(record, params))


def surrogate(record: SignedRecord, params: ScaledParams,
              anchor: ScaledParams) -> float:
    """Quadratic majorizer of the negative log-likelihood, anchored at
    ``anchor``: sum of f(xa) + f'(xa) (x - xa) + (x - xa)^2 / 2 over all
    margin channels.  Equals nll(anchor) when params == anchor and upper
    bounds nll(params) everywhere."""
    _check_match(record, params)
    _check_match(record, anchor)
    x = margins(record, params)
    xa = margins(record, anchor)
    if np.iscomplexobj(x):
        xs = np.concatenate([x.real.ravel(), x.imag.ravel()])
        xas = np.concatenate([xa.real.ravel(), xa.imag.ravel()])
    else:
        xs = x.ravel()
        xas = xa.ravel()
    d = xs - xas
    return float(np.sum(f(xas) + f_prime(xas) * d + 0.5 * d * d))
