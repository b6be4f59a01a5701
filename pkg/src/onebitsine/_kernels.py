"""Fused numba kernels for the batched convex fits behind the coarse
frequency searches.

Margins, the one-bit objective, and its first two derivatives are
accumulated row by row in a single pass so no grid-sized temporaries are
materialized.  The scalar branch layout mirrors ``likelihood.f`` /
``f_prime`` / ``f_second``; one erfc call feeds both the objective value
and the derivative pair.  Rows are independent; the row loop may run
across threads while each row's accumulation stays sequential, so results
are bit-deterministic regardless of scheduling.
"""

import math

import numpy as np
from numba import njit, prange

SQRT2 = math.sqrt(2.0)
INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)
LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


@njit(cache=True, inline="always")
def _f_r_f2(x):
    """(f, r, f2) = (-log Phi(x), pdf/Phi, f'').

    Mid-range values share one erfc call; beyond |x| ~ 13 asymptotic
    series avoid erfc (and the log, on the right) entirely."""
    if x < -13.0:
        u = 1.0 / (x * x)
        ser = u * (1.0 - 3.0 * u * (1.0 - 5.0 * u * (1.0 - 7.0 * u)))
        fv = 0.5 * x * x + math.log(-x) + LOG_SQRT_2PI - math.log1p(-ser)
        t = -x
        r = t + (1.0 / t) * (1.0 - u * (2.0 - u * (10.0 - u * (74.0 - 706.0 * u))))
        f2 = 1.0 - u * (1.0 - u * (6.0 - u * (50.0 - 518.0 * u)))
        return fv, r, f2
    elif x <= 0.0:
        t = -x / SQRT2
        e = math.erfc(t)
        fv = -math.log(0.5 * e)
        r = SQRT_2_OVER_PI / (math.exp(t * t) * e)
        f2 = r * (x + r)
        return fv, r, f2
    elif x < 8.0:
        e = 0.5 * math.erfc(x / SQRT2)
        fv = -math.log1p(-e)
        r = math.exp(-0.5 * x * x) * INV_SQRT_2PI / (1.0 - e)
        f2 = r * (x + r)
        return fv, r, f2
    else:
        # upper tail: Phi ~ 1, f ~ pdf/x * (1 - 1/x^2 + 3/x^4 - ...)
        u = 1.0 / (x * x)
        r = math.exp(-0.5 * x * x) * INV_SQRT_2PI
        fv = r / x * (1.0 - u * (1.0 - 3.0 * u * (1.0 - 5.0 * u * (1.0 - 7.0 * u))))
        f2 = r * (x + r)
        return fv, r, f2


def _newton_stats_impl(P, Q, yv, hv, sfix, A, B, L, rows, fit_lam,
                       out_l, out_g, out_h):
    """Objective, gradient, and Hessian of the one-bit NLL per grid row.

    Row m fits x_t = yv[t] (sfix[t] + A[m] P[m,t] + B[m] Q[m,t] - L[m] hv[t]).
    out_g columns: d/dA, d/dB, d/dL; out_h columns: AA, AB, BB, AL, BL, LL.
    """
    n = P.shape[1]
    for ii in prange(rows.shape[0]):
        m = rows[ii]
        a = A[m]
        b = B[m]
        lam = L[m]
        sl = 0.0
        ga = 0.0
        gb = 0.0
        gl = 0.0
        haa = 0.0
        hab = 0.0
        hbb = 0.0
        hal = 0.0
        hbl = 0.0
        hll = 0.0
        for t in range(n):
            p = P[m, t]
            q = Q[m, t]
            yy = yv[t]
            hh = hv[t]
            x = yy * (sfix[t] + a * p + b * q - lam * hh)
            fv, r, f2 = _f_r_f2(x)
            sl += fv
            ga -= r * yy * p
            gb -= r * yy * q
            haa += f2 * p * p
            hab += f2 * p * q
            hbb += f2 * q * q
            if fit_lam:
                gl += r * yy * hh
                hal -= f2 * p * hh
                hbl -= f2 * q * hh
                hll += f2 * hh * hh
        out_l[m] = sl
        out_g[m, 0] = ga
        out_g[m, 1] = gb
        out_g[m, 2] = gl
        out_h[m, 0] = haa
        out_h[m, 1] = hab
        out_h[m, 2] = hbb
        out_h[m, 3] = hal
        out_h[m, 4] = hbl
        out_h[m, 5] = hll


def _eval_objective_impl(P, Q, yv, hv, sfix, A, B, L, rows, out_l):
    """One-bit NLL per grid row at the given (A, B, L)."""
    n = P.shape[1]
    for ii in prange(rows.shape[0]):
        m = rows[ii]
        a = A[m]
        b = B[m]
        lam = L[m]
        sl = 0.0
        for t in range(n):
            x = yv[t] * (sfix[t] + a * P[m, t] + b * Q[m, t] - lam * hv[t])
            fv, _, _ = _f_r_f2(x)
            sl += fv
        out_l[m] = sl


# two compilations of each kernel: threaded for grid-sized batches,
# serial so single-row probe calls stay free of dispatch overhead
newton_stats = njit(cache=True, parallel=True)(_newton_stats_impl)
newton_stats_serial = njit(cache=True)(_newton_stats_impl)
eval_objective = njit(cache=True, parallel=True)(_eval_objective_impl)
eval_objective_serial = njit(cache=True)(_eval_objective_impl)
