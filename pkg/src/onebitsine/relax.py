"""Estimator drivers: greedy CLEAN-style fitting, fully relaxed cyclic
re-estimation, its MM-accelerated variant, and BIC order selection.

All three drivers grow the model one sinusoid at a time.  Each new
component is initialized by an exhaustive coarse search: a convex
Newton fit of its quadrature pair (optionally jointly with the noise
scale) at every frequency of a uniform grid, batched through the numba
kernels.  The greedy driver refines the new component once (golden
section on the frequency with convex refits at each probe, replacing a
derivative-based local search) and moves on; the relaxed driver keeps
re-estimating every component cyclically until the NLL stalls; the MM
variant replaces those per-component exhaustive searches with the
FFT/chirp-zoom MM engine, which is what makes it fast.
"""

from __future__ import annotations

import json
import math
import time
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels
from .likelihood import ScaledParams, f_prime, f_second, nll as nll_of
from .mmcore import MmConfig, mm_minimize
from .sigmodel import DIMS, SignedRecord, SinusoidSet, sinusoid_signal

TWO_PI = 2.0 * np.pi
_GOLDEN_RATIO = (math.sqrt(5.0) - 1.0) / 2.0

__all__ = ["NewtonConfig", "RelaxConfig", "EstimateReport", "FitResult",
           "convex_fit", "coarse_search", "one_bit_clean", "one_bit_relax",
           "one_bit_mm_relax", "bic_select", "estimate"]


@dataclass
class NewtonConfig:
    max_iters: int = 50
    grad_tol: float = 1e-9
    backtrack: float = 0.5
    armijo: float = 1e-4
    max_backtracks: int = 45


@dataclass
class RelaxConfig:
    """Driver controls: relaxation sweep budget I_R, its relative-NLL
    stopping tolerance, the coarse grid density (defaults to the record
    length, per axis for 2-D), and the inner Newton settings."""

    max_order: Optional[int] = None
    max_relax_iters: int = 30
    relax_rel_tol: float = 1e-5
    grid_size: Optional[int] = None
    newton: NewtonConfig = field(default_factory=NewtonConfig)
    golden_tol: float = 1e-10
    golden_max_iters: int = 80
    init_lambda: float = 1.0


# ---------------------------------------------------------------------------
# channel stacking and basis construction

def _channels(record: SignedRecord):
    if record.dim == "r1":
        return (np.asarray(record.y, dtype=float),
                np.asarray(record.h, dtype=float))
    y = record.y.ravel()
    h = record.h.ravel()
    return (np.concatenate([y.real, y.imag]),
            np.concatenate([h.real, h.imag]))


def _signal_channels(record: SignedRecord, coeffs, freqs) -> np.ndarray:
    n_ch = record.size * (1 if record.dim == "r1" else 2)
    if np.size(coeffs) == 0:
        return np.zeros(n_ch)
    s = sinusoid_signal(coeffs, freqs, record.shape, record.dim)
    if record.dim == "r1":
        return s
    s = s.ravel()
    return np.concatenate([s.real, s.imag])


def _basis_rows(omegas: np.ndarray, record: SignedRecord):
    """(P, Q) regressor matrices: row m holds the channel-stacked partials
    of the model signal w.r.t. (a_m, b_m) for frequency (pair) m."""
    if record.dim == "r1":
        t = np.arange(record.size)
        wt = np.outer(omegas, t)
        return np.sin(wt), np.cos(wt)
    if record.dim == "c1":
        t = np.arange(record.size)
        wt = np.outer(omegas, t)
        ct, st = np.cos(wt), np.sin(wt)
        return (np.hstack([ct, st]), np.hstack([-st, ct]))
    n1, n2 = record.shape
    om = np.asarray(omegas, dtype=float).reshape(-1, 2)
    t1 = np.repeat(np.arange(n1), n2)
    t2 = np.tile(np.arange(n2), n1)
    ph = om[:, :1] * t1[None, :] + om[:, 1:2] * t2[None, :]
    c, s = np.cos(ph), np.sin(ph)
    return (np.hstack([c, s]), np.hstack([-s, c]))


_GRID_CACHE: OrderedDict = OrderedDict()
_GRID_CACHE_MAX = 4


def _grid(record: SignedRecord, grid_size):
    """Uniform coarse frequency grid with cached regressor matrices."""
    if record.dim == "c2":
        g1 = int(grid_size) if grid_size else record.shape[0]
        g2 = int(grid_size) if grid_size else record.shape[1]
        key = (record.dim, record.shape, g1, g2)
        if key not in _GRID_CACHE:
            w1 = TWO_PI * np.arange(g1) / g1
            w2 = TWO_PI * np.arange(g2) / g2
            om = np.column_stack([np.repeat(w1, g2), np.tile(w2, g1)])
            P, Q = _basis_rows(om, record)
            _GRID_CACHE[key] = (om, P, Q)
    else:
        g = int(grid_size) if grid_size else record.size
        key = (record.dim, record.shape, g)
        if key not in _GRID_CACHE:
            hi = np.pi if record.dim == "r1" else TWO_PI
            om = hi * np.arange(g) / g
            P, Q = _basis_rows(om, record)
            _GRID_CACHE[key] = (om, P, Q)
    _GRID_CACHE.move_to_end(key)
    while len(_GRID_CACHE) > _GRID_CACHE_MAX:
        _GRID_CACHE.popitem(last=False)
    return _GRID_CACHE[key]


# ---------------------------------------------------------------------------
# batched damped Newton on the convex per-frequency subproblems

def _solve_steps(g, H, fit_lam):
    """Newton directions from packed gradients/Hessians, with a small
    ridge so rank-deficient rows (e.g. the sin column at w = 0) stay
    finite."""
    n = g.shape[0]
    if fit_lam:
        mat = np.empty((n, 3, 3))
        mat[:, 0, 0] = H[:, 0]
        mat[:, 0, 1] = mat[:, 1, 0] = H[:, 1]
        mat[:, 1, 1] = H[:, 2]
        mat[:, 0, 2] = mat[:, 2, 0] = H[:, 3]
        mat[:, 1, 2] = mat[:, 2, 1] = H[:, 4]
        mat[:, 2, 2] = H[:, 5]
        ridge = 1e-12 * (H[:, 0] + H[:, 2] + H[:, 5]) + 1e-300
        mat[:, 0, 0] += ridge
        mat[:, 1, 1] += ridge
        mat[:, 2, 2] += ridge
        return -np.linalg.solve(mat, g[:, :3, None])[:, :, 0]
    haa, hab, hbb = H[:, 0], H[:, 1], H[:, 2]
    ridge = 1e-12 * (haa + hbb) + 1e-300
    haa = haa + ridge
    hbb = hbb + ridge
    det = haa * hbb - hab * hab
    d = np.zeros((n, 3))
    d[:, 0] = -(hbb * g[:, 0] - hab * g[:, 1]) / det
    d[:, 1] = -(haa * g[:, 1] - hab * g[:, 0]) / det
    return d


def _newton_batch(P, Q, yv, hv, sfix, A, B, L, rows, fit_lambda,
                  cfg: NewtonConfig):
    """Damped Newton over the listed grid rows, run as independent 2- or
    3-variable problems.  A/B/L are updated in place (their incoming
    values are the warm start); returns the objective vector, a per-row
    converged mask, and the iteration count.

    Steps are taken optimistically: the single fused kernel pass at the
    new point both prices the move and supplies the next derivatives.
    Rows whose objective increased are rolled back and retried with a
    geometrically shrinking per-row step cap, which on convex problems
    recovers the usual damped-Newton guarantees at roughly one kernel
    pass per iteration."""
    m_tot = P.shape[0]
    l = np.zeros(m_tot)
    g = np.zeros((m_tot, 3))
    H = np.zeros((m_tot, 6))
    rows = np.asarray(rows, dtype=np.int64)

    def stats(sub, *out):
        kern = _kernels.newton_stats if sub.size >= 64 else _kernels.newton_stats_serial
        kern(P, Q, yv, hv, sfix, A, B, L, sub, fit_lambda, *out)

    stats(rows, l, g, H)
    converged = np.zeros(m_tot, dtype=bool)
    active = rows
    n_grad = 3 if fit_lambda else 2
    tcap = np.ones(m_tot)
    iters = 0
    l_new = np.zeros(m_tot)
    g_new = np.zeros((m_tot, 3))
    h_new = np.zeros((m_tot, 6))
    for _ in range(cfg.max_iters):
        gmax = np.max(np.abs(g[active][:, :n_grad]), axis=1)
        done = gmax < cfg.grad_tol
        converged[active[done]] = True
        active = active[~done]
        if active.size == 0:
            break
        # rows that ran out of damping budget keep their best iterate
        alive = tcap[active] > 2.0 ** -cfg.max_backtracks
        active = active[alive]
        if active.size == 0:
            break
        iters += 1
        d = _solve_steps(g[active], H[active], fit_lambda)
        slope = np.einsum("ij,ij->i", g[active][:, :3], d)
        # rows whose attainable descent is below fp resolution of the
        # objective cannot be improved further
        ok_dir = slope < -1e-14 * (1.0 + np.abs(l[active]))
        converged[active[~ok_dir]] = True
        active = active[ok_dir]
        if active.size == 0:
            break
        d = d[ok_dir]

        t = tcap[active]
        a_old = A[active].copy()
        b_old = B[active].copy()
        l_old = L[active].copy()
        A[active] = a_old + t * d[:, 0]
        B[active] = b_old + t * d[:, 1]
        if fit_lambda:
            L[active] = l_old + t * d[:, 2]
        stats(active, l_new, g_new, h_new)
        noise = 4e-16 * (1.0 + np.abs(l[active]))
        bad = l_new[active] > l[active] + noise
        good_rows = active[~bad]
        l[good_rows] = l_new[good_rows]
        g[good_rows] = g_new[good_rows]
        H[good_rows] = h_new[good_rows]
        tcap[good_rows] = np.minimum(1.0, tcap[good_rows] * 2.0)
        if np.any(bad):
            bad_rows = active[bad]
            A[bad_rows] = a_old[bad]
            B[bad_rows] = b_old[bad]
            if fit_lambda:
                L[bad_rows] = l_old[bad]
            tcap[bad_rows] *= cfg.backtrack
    return l, converged, iters


@dataclass
class FitResult:
    a: float
    b: float
    lam: float
    omega: object
    nll: float
    converged: bool
    iters: int


def _run_rows(yv, hv, P, Q, sfix, fit_lambda, newton, A, B, L):
    """Newton on every row, with the clamped re-fit for rows whose
    unconstrained scale went negative."""
    m = P.shape[0]
    rows = np.arange(m, dtype=np.int64)
    l, conv, iters = _newton_batch(P, Q, yv, hv, sfix, A, B, L, rows,
                                   fit_lambda, newton)
    if fit_lambda and np.any(L < 0.0):
        neg = np.nonzero(L < 0.0)[0].astype(np.int64)
        L[neg] = 0.0
        l2, conv2, _ = _newton_batch(P, Q, yv, hv, sfix, A, B, L, neg,
                                     False, newton)
        l[neg] = l2[neg]
        conv[neg] = conv2[neg]
    return l, conv, iters


class _FitContext:
    """Per-(record, fixed components) data reused across probe fits."""

    __slots__ = ("record", "yv", "hv", "sfix", "lam_ctx", "fit_lambda")

    def __init__(self, record, fixed: ScaledParams, fit_lambda: bool,
                 init_lambda: float):
        if record.size == 0:
            raise ValueError("empty record")
        if fit_lambda and float(np.vdot(record.h, record.h).real) == 0.0:
            fit_lambda = False  # scale unidentifiable with a zero threshold
        self.record = record
        self.yv, self.hv = _channels(record)
        self.sfix = _signal_channels(record, fixed.coeffs, fixed.freqs)
        self.fit_lambda = fit_lambda
        self.lam_ctx = fixed.lam if not fit_lambda else (
            fixed.lam if fixed.lam > 0 else init_lambda)


def _probe_fit(ctx: _FitContext, candidate_omega, newton: NewtonConfig,
               init=None) -> FitResult:
    record = ctx.record
    om = np.asarray(candidate_omega, dtype=float).reshape(1, -1)
    if record.dim != "c2":
        om = om.reshape(1)
    P, Q = _basis_rows(om, record)
    A = np.zeros(1)
    B = np.zeros(1)
    L = np.full(1, ctx.lam_ctx)
    if init is not None:
        A[0], B[0] = init[0], init[1]
        if ctx.fit_lambda and len(init) > 2 and init[2] > 0:
            L[0] = init[2]
    l, conv, iters = _run_rows(ctx.yv, ctx.hv, P, Q, ctx.sfix,
                               ctx.fit_lambda, newton, A, B, L)
    w = candidate_omega if record.dim == "c2" else float(np.asarray(candidate_omega).ravel()[0])
    return FitResult(float(A[0]), float(B[0]), float(L[0]), w,
                     float(l[0]), bool(conv[0]), iters)


def convex_fit(record: SignedRecord, fixed_components: ScaledParams,
               candidate_omega, fit_lambda: bool,
               newton: Optional[NewtonConfig] = None,
               init_lambda: float = 1.0, init=None) -> FitResult:
    """Minimize the NLL over one component's quadrature pair (and the
    scale when ``fit_lambda``) at a fixed candidate frequency, holding
    ``fixed_components`` (whose ``lam`` is the scale context) constant.

    Never raises on slow convergence; the best iterate is returned with
    ``converged=False``.  ``init`` optionally warm-starts (a, b[, lam])."""
    newton = newton or NewtonConfig()
    ctx = _FitContext(record, fixed_components, fit_lambda, init_lambda)
    return _probe_fit(ctx, candidate_omega, newton, init=init)


def _search_grid(record, fixed_components, fit_lambda, config, warm=None):
    """Grid-wide convex fits; ``warm`` optionally carries (A, B, L) from a
    previous search of the same subproblem.  Returns the winning fit and
    the per-row arrays for reuse."""
    ctx = _FitContext(record, fixed_components, fit_lambda, config.init_lambda)
    fit_lambda = ctx.fit_lambda
    omegas, P, Q = _grid(record, config.grid_size)
    m = P.shape[0]
    if warm is not None and warm[0].shape[0] == m:
        A, B = warm[0].copy(), warm[1].copy()
        L = warm[2].copy() if fit_lambda else np.full(m, ctx.lam_ctx)
    else:
        A = np.zeros(m)
        B = np.zeros(m)
        L = np.full(m, ctx.lam_ctx)
    l, conv, iters = _run_rows(ctx.yv, ctx.hv, P, Q, ctx.sfix, fit_lambda,
                               config.newton, A, B, L)
    best = int(np.argmin(l))
    w = tuple(omegas[best]) if record.dim == "c2" else float(omegas[best])
    fit = FitResult(float(A[best]), float(B[best]), float(L[best]), w,
                    float(l[best]), bool(conv[best]), iters)
    return fit, (A, B, L)


def coarse_search(record: SignedRecord, fixed_components: ScaledParams,
                  fit_lambda: bool, config: Optional[RelaxConfig] = None) -> FitResult:
    """Exhaustive search over the uniform coarse grid: a convex fit at
    every grid frequency, returning the NLL minimizer (ties broken toward
    the lowest frequency)."""
    config = config or RelaxConfig()
    fit, _ = _search_grid(record, fixed_components, fit_lambda, config)
    return fit


# ---------------------------------------------------------------------------
# golden-section frequency refinement (derivative-free local search)

def _golden_min(fun, lo: float, hi: float, tol: float, max_iters: int):
    c = hi - _GOLDEN_RATIO * (hi - lo)
    d = lo + _GOLDEN_RATIO * (hi - lo)
    fc = fun(c)
    fd = fun(d)
    best_x, best_f = (c, fc) if fc[0] <= fd[0] else (d, fd)
    it = 0
    while (hi - lo) > tol and it < max_iters:
        it += 1
        if fc[0] <= fd[0]:
            hi, d, fd = d, c, fc
            c = hi - _GOLDEN_RATIO * (hi - lo)
            fc = fun(c)
            cand_x, cand = c, fc
        else:
            lo, c, fc = c, d, fd
            d = lo + _GOLDEN_RATIO * (hi - lo)
            fd = fun(d)
            cand_x, cand = d, fd
        if cand[0] < best_f[0]:
            best_x, best_f = cand_x, cand
    return best_x, best_f


def _refine_omega(record, fixed, omega0, fit_lambda, cfg: RelaxConfig,
                  init=None):
    """Golden-section search on the frequency over one coarse grid cell
    each side, re-solving the convex fit at each probe.  Probes share one
    fit context and chain their warm starts, so each one converges in a
    couple of steps."""
    ctx = _FitContext(record, fixed, fit_lambda, cfg.init_lambda)
    last = {"init": init}

    def probe1(w):
        if record.dim == "r1":
            w = min(max(w, 0.0), np.pi * (1 - 1e-12))
        fit = _probe_fit(ctx, np.mod(w, TWO_PI) if record.dim == "c1" else w,
                         cfg.newton, init=last["init"])
        last["init"] = (fit.a, fit.b, fit.lam)
        return fit.nll, fit

    if record.dim == "c2":
        g1, g2 = (cfg.grid_size or record.shape[0]), (cfg.grid_size or record.shape[1])
        cell1, cell2 = TWO_PI / g1, TWO_PI / g2
        w1, w2 = omega0

        def probe_w1(w):
            fit = _probe_fit(ctx, (np.mod(w, TWO_PI), w2), cfg.newton, init=last["init"])
            last["init"] = (fit.a, fit.b, fit.lam)
            return fit.nll, fit

        w1b, (_, fit1) = _golden_min(lambda w: probe_w1(w), w1 - cell1, w1 + cell1,
                                     cfg.golden_tol, cfg.golden_max_iters)
        w1 = np.mod(w1b, TWO_PI)

        def probe_w2(w):
            fit = _probe_fit(ctx, (w1, np.mod(w, TWO_PI)), cfg.newton, init=last["init"])
            last["init"] = (fit.a, fit.b, fit.lam)
            return fit.nll, fit

        w2b, (_, fit2) = _golden_min(lambda w: probe_w2(w), w2 - cell2, w2 + cell2,
                                     cfg.golden_tol, cfg.golden_max_iters)
        fit2.omega = (w1, np.mod(w2b, TWO_PI))
        return fit2

    if record.dim == "r1":
        g = cfg.grid_size or record.size
        cell = np.pi / g
        lo = max(0.0, omega0 - cell)
        hi = min(np.pi * (1 - 1e-12), omega0 + cell)
    else:
        g = cfg.grid_size or record.size
        cell = TWO_PI / g
        lo, hi = omega0 - cell, omega0 + cell
    wb, (_, fit) = _golden_min(lambda w: probe1(w), lo, hi,
                               cfg.golden_tol, cfg.golden_max_iters)
    if record.dim == "r1":
        fit.omega = min(max(wb, 0.0), np.pi * (1 - 1e-12))
    else:
        fit.omega = float(np.mod(wb, TWO_PI))
    return fit


# ---------------------------------------------------------------------------
# lambda-only (null model) fit

def _fit_lambda_only(record: SignedRecord, newton: Optional[NewtonConfig] = None,
                     lam0: float = 1.0):
    """Fit the noise scale alone (no sinusoids): 1-D convex Newton on
    lambda >= 0.  Returns (lambda, nll)."""
    newton = newton or NewtonConfig()
    yv, hv = _channels(record)
    hh = float(np.dot(hv, hv))
    if hh == 0.0:
        # zero thresholds: every margin is 0 regardless of lambda
        return 0.0, float(yv.size * np.log(2.0))
    from .likelihood import f as f_val
    lam = float(lam0)
    def obj(lam_):
        return float(np.sum(f_val(yv * (-lam_ * hv))))
    l_cur = obj(lam)
    for _ in range(newton.max_iters):
        x = yv * (-lam * hv)
        grad = float(np.sum(f_prime(x) * (-yv * hv)))
        if abs(grad) < newton.grad_tol:
            break
        hess = float(np.sum(f_second(x) * hv * hv)) + 1e-300
        step = -grad / hess
        t = 1.0
        noise = 4e-16 * (1.0 + abs(l_cur))
        for _ in range(newton.max_backtracks):
            lam_new = lam + t * step
            if lam_new < 0.0:
                lam_new = 0.0
            l_new = obj(lam_new)
            if l_new <= l_cur + newton.armijo * t * step * grad + noise or lam_new == lam:
                break
            t *= newton.backtrack
        if lam_new == lam and lam == 0.0:
            break
        if l_new > l_cur:
            break
        lam, l_cur = lam_new, l_new
        if lam == 0.0 and grad > 0:
            break
    return lam, l_cur


# ---------------------------------------------------------------------------
# driver state and report

@dataclass
class EstimateReport:
    """Estimation outcome: selected order, unscaled components, noise
    scale, per-order bookkeeping, and timings."""

    method: str
    order: int
    components: list            # [{"A", "phi", "omega"}]
    sigma: Optional[float]
    lam: float
    scaled: ScaledParams
    nll: float
    nll_per_order: list
    bic_per_order: Optional[list]
    iters: list
    elapsed_ms: float
    flags: list = field(default_factory=list)
    per_order: Optional[list] = None    # [(coeffs, freqs, lam, nll)] for BIC reuse

    def estimate_set(self) -> SinusoidSet:
        return SinusoidSet.from_json_list(self.components, self.scaled.dim)

    def to_json_dict(self, with_timings: bool = True) -> dict:
        return {
            "method": self.method,
            "order": self.order,
            "components": self.components,
            "sigma": self.sigma,
            "lambda": self.lam,
            "nll": self.nll,
            "nll_per_order": self.nll_per_order,
            "bic_per_order": self.bic_per_order,
            "iters": self.iters,
            "elapsed_ms": self.elapsed_ms if with_timings else None,
            "flags": self.flags,
        }

    def save(self, path, with_timings: bool = True):
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(with_timings), fh, sort_keys=True)
            fh.write("\n")


def _sigma_from_lambda(lam: float, dim: str) -> Optional[float]:
    if lam <= 0.0:
        return None
    return (1.0 / lam) if dim == "r1" else (math.sqrt(2.0) / lam)


def _components_json(coeffs, freqs, lam, dim) -> list:
    out = []
    coeffs = np.asarray(coeffs, dtype=float).reshape(-1, 2)
    for k in range(coeffs.shape[0]):
        if lam > 0:
            a, b = coeffs[k, 0] / lam, coeffs[k, 1] / lam
        else:
            a, b = coeffs[k, 0], coeffs[k, 1]
        om = freqs[k]
        out.append({
            "A": float(np.hypot(a, b)),
            "phi": float(np.mod(np.arctan2(b, a), TWO_PI)),
            "omega": [float(om[0]), float(om[1])] if dim == "c2" else float(om),
        })
    return out


class _State:
    """Mutable driver state: scaled coefficients grown one order at a time."""

    def __init__(self, record: SignedRecord, config: RelaxConfig):
        self.record = record
        self.config = config
        self.dim = record.dim
        self.coeffs = np.zeros((0, 2))
        self.freqs = np.zeros((0, 2)) if record.dim == "c2" else np.zeros(0)
        self.lam = 0.0
        self.have_lambda = False
        self.flags: list = []
        self.snapshots: list = []
        self.warm: dict = {}
        if float(np.vdot(record.h, record.h).real) == 0.0:
            self.flags.append("zero-threshold")

    @property
    def order(self) -> int:
        return self.coeffs.shape[0]

    def params(self) -> ScaledParams:
        return ScaledParams(self.coeffs.copy(), self.freqs.copy(),
                            max(self.lam, 0.0), self.dim)

    def params_without(self, k: int) -> ScaledParams:
        keep = np.arange(self.order) != k
        return ScaledParams(self.coeffs[keep], self.freqs[keep],
                            max(self.lam, 0.0), self.dim)

    def set_component(self, k: int, fit: FitResult, lam: Optional[float] = None):
        self.coeffs[k] = (fit.a, fit.b)
        self.freqs[k] = fit.omega
        if lam is not None:
            self.lam = lam

    def append(self, fit: FitResult, lam: Optional[float] = None):
        self.coeffs = np.vstack([self.coeffs, [fit.a, fit.b]])
        if self.dim == "c2":
            self.freqs = np.vstack([self.freqs, np.asarray(fit.omega)[None, :]]) \
                if self.freqs.size else np.asarray(fit.omega, dtype=float).reshape(1, 2)
        else:
            self.freqs = np.append(self.freqs, fit.omega)
        if lam is not None:
            self.lam = lam
        if not fit.converged:
            self.flags.append(f"newton-flagged-order-{self.order}")

    def nll(self) -> float:
        return nll_of(self.record, self.params())

    def snapshot(self, iters: int):
        self.snapshots.append((self.coeffs.copy(), self.freqs.copy(),
                               self.lam, self.nll(), iters))


def _clean_step(state: _State):
    """One greedy step: coarse search for a new component, golden-section
    frequency refinement, then a joint refit of the component with the
    noise scale."""
    cfg = state.config
    rec = state.record
    fixed = state.params()
    first = not state.have_lambda
    search = coarse_search(rec, fixed, fit_lambda=first, config=cfg)
    if first:
        fixed = ScaledParams(fixed.coeffs, fixed.freqs, max(search.lam, 0.0), state.dim)
    refined = _refine_omega(rec, fixed, search.omega, fit_lambda=False, cfg=cfg,
                            init=(search.a, search.b, search.lam))
    final = convex_fit(rec, fixed, refined.omega, fit_lambda=True,
                       newton=cfg.newton, init_lambda=max(refined.lam, cfg.init_lambda),
                       init=(refined.a, refined.b, max(fixed.lam, cfg.init_lambda)))
    lam = final.lam if float(np.vdot(rec.h, rec.h).real) > 0 else state.lam
    state.append(final, lam=lam)
    state.have_lambda = True


def _sweep_component(state: _State, k: int, with_lambda: bool):
    """Re-estimate component k by exhaustive search + refinement, keeping
    the incumbent if the candidate does not lower the NLL.  Successive
    sweeps warm-start from the previous grid solution of the same slot."""
    cfg = state.config
    rec = state.record
    others = state.params_without(k)
    incumbent_nll = state.nll()
    incumbent = (state.coeffs[k].copy(), np.copy(state.freqs[k]), state.lam)
    search, warm = _search_grid(rec, others, with_lambda, cfg,
                                warm=state.warm.get((k, with_lambda)))
    state.warm[(k, with_lambda)] = warm
    refined = _refine_omega(rec, others, search.omega, fit_lambda=with_lambda,
                            cfg=cfg, init=(search.a, search.b, search.lam))
    cand_lam = refined.lam if with_lambda and float(np.vdot(rec.h, rec.h).real) > 0 else state.lam
    state.set_component(k, refined, lam=cand_lam)
    if state.nll() > incumbent_nll:
        state.coeffs[k] = incumbent[0]
        state.freqs[k] = incumbent[1]
        state.lam = incumbent[2]


def _null_report(record: SignedRecord, method: str, config: RelaxConfig,
                 t0: float, flags: list) -> EstimateReport:
    lam0, nll0 = _fit_lambda_only(record, config.newton)
    scaled = ScaledParams.empty(record.dim, lam=lam0)
    return EstimateReport(
        method=method, order=0, components=[],
        sigma=_sigma_from_lambda(lam0, record.dim), lam=lam0, scaled=scaled,
        nll=nll0, nll_per_order=[], bic_per_order=None, iters=[],
        elapsed_ms=(time.perf_counter() - t0) * 1e3, flags=flags,
        per_order=[])


def _report_from_state(state: _State, method: str, iters: list,
                       t0: float) -> EstimateReport:
    lam = state.lam
    nlls = [s[3] for s in state.snapshots]
    flags = list(dict.fromkeys(state.flags))
    if lam <= 0.0:
        flags.append("unscaled-components-lambda-zero")
    return EstimateReport(
        method=method, order=state.order,
        components=_components_json(state.coeffs, state.freqs, lam, state.dim),
        sigma=_sigma_from_lambda(lam, state.dim), lam=lam,
        scaled=state.params(), nll=nlls[-1] if nlls else state.nll(),
        nll_per_order=nlls, bic_per_order=None, iters=iters,
        elapsed_ms=(time.perf_counter() - t0) * 1e3, flags=flags,
        per_order=[(s[0], s[1], s[2], s[3]) for s in state.snapshots])


def one_bit_clean(record: SignedRecord, k_hat: int,
                  config: Optional[RelaxConfig] = None) -> EstimateReport:
    """Greedy driver: each new component is searched, refined once, and
    never revisited; the scale is re-fit along with every new component."""
    config = config or RelaxConfig()
    t0 = time.perf_counter()
    state = _State(record, config)
    if k_hat == 0:
        return _null_report(record, "1bCLEAN", config, t0, state.flags)
    for _ in range(k_hat):
        _clean_step(state)
        state.snapshot(iters=0)
    return _report_from_state(state, "1bCLEAN", [0] * k_hat, t0)


def one_bit_relax(record: SignedRecord, k_hat: int,
                  config: Optional[RelaxConfig] = None) -> EstimateReport:
    """Relaxation driver: after each new component is added (greedy step),
    all components are re-estimated cyclically -- newest first, then the
    first component jointly with the scale, then the interior ones --
    until the NLL change stalls or the sweep budget is spent.  With a
    zero sweep budget this reduces exactly to the greedy driver."""
    config = config or RelaxConfig()
    t0 = time.perf_counter()
    state = _State(record, config)
    if k_hat == 0:
        return _null_report(record, "1bRELAX", config, t0, state.flags)
    iters_per_order = []
    for order in range(1, k_hat + 1):
        _clean_step(state)
        sweeps = 0
        if order >= 2:
            l_prev = state.nll()
            for _ in range(config.max_relax_iters):
                _sweep_component(state, order - 1, with_lambda=False)
                _sweep_component(state, 0, with_lambda=True)
                for k in range(1, order - 1):
                    _sweep_component(state, k, with_lambda=False)
                sweeps += 1
                l_cur = state.nll()
                if (abs(l_prev - l_cur) <= config.relax_rel_tol * max(abs(l_prev), 1e-300)
                        or abs(l_prev - l_cur) < 1e-12 * (1.0 + abs(l_prev))):
                    break
                l_prev = l_cur
        iters_per_order.append(sweeps)
        state.snapshot(iters=sweeps)
    return _report_from_state(state, "1bRELAX", iters_per_order, t0)


def one_bit_mm_relax(record: SignedRecord, k_hat: int,
                     config: Optional[RelaxConfig] = None,
                     mm_config: Optional[MmConfig] = None) -> EstimateReport:
    """MM-accelerated relaxation: the coarse search only initializes each
    new component; the joint refinement of all components and the scale is
    done by the FFT/chirp-zoom MM engine instead of further searches."""
    config = config or RelaxConfig()
    mm_config = mm_config or MmConfig()
    t0 = time.perf_counter()
    state = _State(record, config)
    if k_hat == 0:
        return _null_report(record, "1bMMRELAX", config, t0, state.flags)
    iters_per_order = []
    for order in range(1, k_hat + 1):
        first = not state.have_lambda
        search = coarse_search(record, state.params(), fit_lambda=first, config=config)
        lam = search.lam if first and float(np.vdot(record.h, record.h).real) > 0 else state.lam
        state.append(search, lam=lam)
        state.have_lambda = True
        params, trace = mm_minimize(record, state.params(), mm_config)
        state.coeffs = params.coeffs
        state.freqs = params.freqs
        state.lam = params.lam
        mm_iters = len(trace) - 1
        iters_per_order.append(mm_iters)
        state.snapshot(iters=mm_iters)
    return _report_from_state(state, "1bMMRELAX", iters_per_order, t0)


# ---------------------------------------------------------------------------
# order selection

def bic_penalty(k: int, record: SignedRecord) -> float:
    """Information-criterion penalty: 5 k ln N for 1-D data (real or
    complex), 6 k ln(N1 N2) for 2-D data."""
    if record.dim == "c2":
        return 6.0 * k * math.log(record.size)
    return 5.0 * k * math.log(record.size)


def bic_select(record: SignedRecord, report: EstimateReport,
               config: Optional[RelaxConfig] = None):
    """Score orders 0..K_max from a driver report's per-order snapshots:
    score(k) = 2 nll_k + penalty(k); the null model (order 0, scale-only
    fit) is always included.  Returns (selected order, score list)."""
    config = config or RelaxConfig()
    _, nll0 = _fit_lambda_only(record, config.newton)
    scores = [2.0 * nll0]
    for k, (_, _, _, nll_k) in enumerate(report.per_order or [], start=1):
        scores.append(2.0 * nll_k + bic_penalty(k, record))
    k_sel = int(np.argmin(scores))
    return k_sel, scores


_DRIVERS = {"clean": one_bit_clean, "relax": one_bit_relax,
            "mmrelax": one_bit_mm_relax}


def estimate(record: SignedRecord, method: str, order: Optional[int] = None,
             bic_max: Optional[int] = None,
             config: Optional[RelaxConfig] = None,
             mm_config: Optional[MmConfig] = None) -> EstimateReport:
    """Run a named driver at a fixed order, or up to ``bic_max`` with
    information-criterion order selection."""
    if method not in _DRIVERS:
        raise ValueError(f"unknown method {method!r}")
    if (order is None) == (bic_max is None):
        raise ValueError("exactly one of order / bic_max must be given")
    config = config or RelaxConfig()
    t0 = time.perf_counter()
    k_run = order if order is not None else bic_max
    if method == "mmrelax":
        rep = _DRIVERS[method](record, k_run, config, mm_config)
    else:
        rep = _DRIVERS[method](record, k_run, config)
    if bic_max is None:
        return rep
    k_sel, scores = bic_select(record, rep, config)
    if k_sel == 0:
        out = _null_report(record, rep.method, config, t0, rep.flags)
    else:
        coeffs, freqs, lam, nll_k = rep.per_order[k_sel - 1]
        scaled = ScaledParams(coeffs, freqs, max(lam, 0.0), record.dim)
        out = EstimateReport(
            method=rep.method, order=k_sel,
            components=_components_json(coeffs, freqs, lam, record.dim),
            sigma=_sigma_from_lambda(lam, record.dim), lam=lam, scaled=scaled,
            nll=nll_k, nll_per_order=rep.nll_per_order, bic_per_order=None,
            iters=rep.iters, elapsed_ms=0.0, flags=rep.flags,
            per_order=rep.per_order)
    out.nll_per_order = rep.nll_per_order
    out.bic_per_order = scores
    out.iters = rep.iters
    out.elapsed_ms = (time.perf_counter() - t0) * 1e3
    return out
