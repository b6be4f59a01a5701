"""Deterministic Monte Carlo benchmark harness.

Scenarios sweep the sample count or the SNR; each (sweep point, trial)
pair gets an independent threshold and noise realization from a seed
derived only from the base seed and the pair's indices, so results are
reproducible and independent of execution order.  Frequency and amplitude
MSEs are aggregated over the correctly-detected trials only; the
detection probability counts all trials.  Detection requires every
matched frequency error to be strictly below 2*pi/N (per axis for 2-D).
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import linear_sum_assignment

from .mmcore import MmConfig
from .relax import RelaxConfig, estimate
from .sigmodel import (RngState, SignedRecord, SinusoidSet, ThresholdSpec,
                       sample_one_bit, snr_to_sigma, splitmix64_mix, synth)

TWO_PI = 2.0 * np.pi

ESTIMATORS = ("1bCLEAN", "1bRELAX", "1bMMRELAX")
_METHOD_OF = {"1bCLEAN": "clean", "1bRELAX": "relax", "1bMMRELAX": "mmrelax"}

CSV_COLUMNS = ["sweep_var", "sweep_value", "estimator", "trials", "detected",
               "freq_mse", "amp_mse", "pd", "order_success", "mean_runtime_ms"]

__all__ = ["McScenario", "McResult", "match_components", "detect",
           "run_scenario", "scenario_presets", "write_csv", "trial_seed",
           "ESTIMATORS", "CSV_COLUMNS"]


# ---------------------------------------------------------------------------
# scenario / result containers

@dataclass
class McScenario:
    """One benchmark configuration.

    ``signal`` may be a SinusoidSet or a callable n -> SinusoidSet when the
    component frequencies depend on the sample count (as in the closely
    spaced pairs).  ``sweep`` is ("n", values) or ("snr", values); the
    non-swept quantity is fixed by ``n`` / ``snr_db``.
    """

    name: str
    signal: object
    sweep_var: str
    sweep_values: tuple
    n: int = 1024
    snr_db: float = 10.0
    threshold: ThresholdSpec = field(default_factory=ThresholdSpec)
    trials: int = 25
    base_seed: int = 20260801
    estimators: tuple = ESTIMATORS
    order: Optional[int] = None          # None -> true order
    bic_max: Optional[int] = None        # set -> order selected per trial
    noise_sigma: Optional[float] = None  # overrides snr for pure-noise runs
    relax_config: Optional[RelaxConfig] = None
    mm_config: Optional[MmConfig] = None

    def signal_for(self, n: int) -> SinusoidSet:
        return self.signal(n) if callable(self.signal) else self.signal


@dataclass
class McResult:
    scenario: str
    rows: list  # dicts with CSV_COLUMNS keys

    def to_csv_rows(self):
        return [[r[c] for c in CSV_COLUMNS] for r in self.rows]


# ---------------------------------------------------------------------------
# component matching and detection

def _freq_dist(w_true, w_est, dim: str):
    if dim == "r1":
        return abs(w_est - w_true)
    d = abs(np.mod(w_est - w_true + np.pi, TWO_PI) - np.pi)
    return d


def match_components(truth: SinusoidSet, est: SinusoidSet):
    """Optimal one-to-one pairing minimizing total frequency error
    (wraparound metric on the complex domains, summed per axis for 2-D).
    With unequal orders the best min(K) pairs are matched.  Returns
    (truth indices, estimate indices)."""
    kt, ke = truth.order, est.order
    if kt == 0 or ke == 0:
        return np.zeros(0, dtype=int), np.zeros(0, dtype=int)
    cost = np.zeros((kt, ke))
    for i in range(kt):
        for j in range(ke):
            if truth.dim == "c2":
                cost[i, j] = (_freq_dist(truth.freqs[i, 0], est.freqs[j, 0], "c1")
                              + _freq_dist(truth.freqs[i, 1], est.freqs[j, 1], "c1"))
            else:
                cost[i, j] = _freq_dist(truth.freqs[i], est.freqs[j], truth.dim)
    ri, ci = linear_sum_assignment(cost)
    return ri, ci


def detect(truth: SinusoidSet, est: SinusoidSet, n) -> bool:
    """True iff every truth component is matched with frequency error
    strictly below 2*pi/N (per axis for 2-D, with per-axis lengths)."""
    if est.order < truth.order:
        return False
    ri, ci = match_components(truth, est)
    if truth.dim == "c2":
        n1, n2 = n
        for i, j in zip(ri, ci):
            if (_freq_dist(truth.freqs[i, 0], est.freqs[j, 0], "c1") >= TWO_PI / n1
                    or _freq_dist(truth.freqs[i, 1], est.freqs[j, 1], "c1") >= TWO_PI / n2):
                return False
        return True
    bound = TWO_PI / int(n)
    return all(_freq_dist(truth.freqs[i], est.freqs[j], truth.dim) < bound
               for i, j in zip(ri, ci))


def _trial_errors(truth: SinusoidSet, est: SinusoidSet):
    """(sum of squared matched frequency errors, ditto amplitude, pairs)."""
    ri, ci = match_components(truth, est)
    fe = 0.0
    ae = 0.0
    for i, j in zip(ri, ci):
        if truth.dim == "c2":
            fe += (_freq_dist(truth.freqs[i, 0], est.freqs[j, 0], "c1") ** 2
                   + _freq_dist(truth.freqs[i, 1], est.freqs[j, 1], "c1") ** 2)
        else:
            fe += _freq_dist(truth.freqs[i], est.freqs[j], truth.dim) ** 2
        ae += (truth.amps[i] - est.amps[j]) ** 2
    return fe, ae, len(ri)


# ---------------------------------------------------------------------------
# the Monte Carlo loop

def trial_seed(base_seed: int, sweep_idx: int, trial: int) -> int:
    """Documented seed mixing: two SplitMix64 output passes over the
    base seed and the (sweep, trial) indices."""
    s = splitmix64_mix((base_seed + 0x9E3779B97F4A7C15 * (sweep_idx + 1)) & (2**64 - 1))
    return splitmix64_mix((s + 0x9E3779B97F4A7C15 * (trial + 1)) & (2**64 - 1))


def _run_trial(sc: McScenario, n: int, snr_db: float, seed: int):
    """Generate one record and run every estimator on it."""
    sig_set = sc.signal_for(n)
    rng = RngState(seed)
    if sig_set.order > 0:
        sigma = sc.noise_sigma if sc.noise_sigma is not None else snr_to_sigma(sig_set, snr_db)
        clean = synth(sig_set, (n, n) if sig_set.dim == "c2" else n)
    else:
        sigma = sc.noise_sigma if sc.noise_sigma is not None else 1.0
        clean = np.zeros(n) if sig_set.dim == "r1" else (
            np.zeros((n, n), dtype=complex) if sig_set.dim == "c2" else np.zeros(n, dtype=complex))
    record = sample_one_bit(clean, sigma, sc.threshold, rng, dim=sig_set.dim)
    record.truth = sig_set
    record.sigma = sigma
    out = {}
    for name in sc.estimators:
        method = _METHOD_OF[name]
        kwargs = dict(config=sc.relax_config, mm_config=sc.mm_config)
        if method != "mmrelax":
            kwargs.pop("mm_config")
        t0 = time.perf_counter()
        try:
            if sc.bic_max is not None:
                rep = estimate(record, method, bic_max=sc.bic_max, **kwargs)
            else:
                order = sc.order if sc.order is not None else sig_set.order
                rep = estimate(record, method, order=order, **kwargs)
            elapsed = (time.perf_counter() - t0) * 1e3
            out[name] = (rep, elapsed, None)
        except Exception as exc:  # noqa: BLE001 - a failed trial must not kill the sweep
            out[name] = (None, (time.perf_counter() - t0) * 1e3, repr(exc))
    return record, out


def run_scenario(sc: McScenario, trial_order=None) -> McResult:
    """Run the full sweep.  Per-trial quantities are stored in arrays
    indexed by trial and reduced with numpy's pairwise summation, so the
    aggregate is independent of execution order (``trial_order`` permutes
    the execution sequence without changing the result)."""
    if sc.trials < 1:
        raise ValueError("trials must be >= 1")
    if len(sc.sweep_values) == 0:
        raise ValueError("sweep must be non-empty")
    order = list(range(sc.trials)) if trial_order is None else list(trial_order)
    if sorted(order) != list(range(sc.trials)):
        raise ValueError("trial_order must permute range(trials)")
    rows = []
    for s_idx, sval in enumerate(sc.sweep_values):
        n = int(sval) if sc.sweep_var == "n" else sc.n
        snr_db = float(sval) if sc.sweep_var == "snr" else sc.snr_db
        per = {name: {"fe": np.zeros(sc.trials), "ae": np.zeros(sc.trials),
                      "det": np.zeros(sc.trials, dtype=bool),
                      "ok_order": np.zeros(sc.trials, dtype=bool),
                      "ms": np.zeros(sc.trials),
                      "failed": np.zeros(sc.trials, dtype=bool)}
               for name in sc.estimators}
        truth_orders = np.zeros(sc.trials, dtype=int)
        for t in order:
            seed = trial_seed(sc.base_seed, s_idx, t)
            record, outs = _run_trial(sc, n, snr_db, seed)
            truth = record.truth
            truth_orders[t] = truth.order
            for name, (rep, ms, err) in outs.items():
                slot = per[name]
                slot["ms"][t] = ms
                if err is not None:
                    slot["failed"][t] = True
                    continue
                est = rep.estimate_set()
                slot["ok_order"][t] = (rep.order == truth.order)
                if truth.order == 0:
                    slot["det"][t] = (rep.order == 0)
                    continue
                shape = (n, n) if truth.dim == "c2" else n
                if detect(truth, est, shape):
                    slot["det"][t] = True
                    fe, ae, pairs = _trial_errors(truth, est)
                    slot["fe"][t] = fe / max(pairs, 1)
                    slot["ae"][t] = ae / max(pairs, 1)
        for name in sc.estimators:
            slot = per[name]
            counted = ~slot["failed"]
            det = slot["det"] & counted
            ndet = int(np.sum(det))
            ntr = int(np.sum(counted))
            freq_mse = float(np.sum(slot["fe"][det]) / ndet) if ndet else float("nan")
            amp_mse = float(np.sum(slot["ae"][det]) / ndet) if ndet else float("nan")
            rows.append({
                "sweep_var": sc.sweep_var,
                "sweep_value": sval,
                "estimator": name,
                "trials": ntr,
                "detected": ndet,
                "freq_mse": freq_mse,
                "amp_mse": amp_mse,
                "pd": float(np.sum(det) / ntr) if ntr else float("nan"),
                "order_success": float(np.sum(slot["ok_order"] & counted) / ntr) if ntr else float("nan"),
                "mean_runtime_ms": float(np.sum(slot["ms"][counted]) / ntr) if ntr else float("nan"),
            })
    return McResult(scenario=sc.name, rows=rows)


def write_csv(result: McResult, path, with_timings: bool = True):
    """Benchmark CSV: one row per (sweep value, estimator), floats in full
    precision scientific notation."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_COLUMNS)
        for row in result.rows:
            out = []
            for col in CSV_COLUMNS:
                v = row[col]
                if col == "mean_runtime_ms" and not with_timings:
                    v = 0.0
                if isinstance(v, float):
                    out.append(f"{v:.17e}")
                else:
                    out.append(v)
            w.writerow(out)


# ---------------------------------------------------------------------------
# paper-derived scenario presets (desk-scale trial counts)

def example1_signal(n: int) -> SinusoidSet:
    """Six sinusoids, the first two separated by one DFT bin."""
    freqs = TWO_PI * np.array([0.11, 0.11 + 1.0 / n, 0.2, 0.3, 0.37, 0.45])
    amps = np.array([1.0, 1.0, 0.7, 0.8, 0.6, 0.5])
    phases = np.array([7 * np.pi / 6, np.pi / 6, np.pi / 2, np.pi / 4,
                       11 * np.pi / 6, np.pi])
    return SinusoidSet(amps, phases, freqs, "r1").validate()


def example2_signal(n: int) -> SinusoidSet:
    """Two equal-amplitude sinusoids separated by pi/N."""
    w1 = TWO_PI * 0.108
    w2 = TWO_PI * (0.108 + 1.0 / (2 * n))
    return SinusoidSet(np.array([1.0, 1.0]),
                       np.array([np.pi / 3, np.pi / 3]),
                       np.array([w1, w2]), "r1").validate()


def scenario_presets() -> dict:
    """The four study configurations, scaled down for desk execution."""
    tv = ThresholdSpec("discrete-random", levels=8, low=-1.0, high=1.0)
    fixed = ThresholdSpec("fixed", value=0.5)
    return {
        "example1": McScenario(
            name="example1", signal=example1_signal, sweep_var="n",
            sweep_values=(256, 512, 1024, 2048), snr_db=10.0, threshold=tv,
            trials=25, estimators=("1bCLEAN", "1bMMRELAX")),
        "example2": McScenario(
            name="example2", signal=example2_signal, sweep_var="n",
            sweep_values=(1024,), snr_db=10.0, threshold=tv, trials=30,
            estimators=("1bCLEAN", "1bRELAX", "1bMMRELAX")),
        "fixed-threshold": McScenario(
            name="fixed-threshold", signal=example1_signal, sweep_var="snr",
            sweep_values=(0.0, 10.0, 20.0), n=1024, threshold=fixed,
            trials=25, estimators=("1bMMRELAX",)),
        "order-selection": McScenario(
            name="order-selection", signal=example1_signal, sweep_var="n",
            sweep_values=(512, 1024, 2048), snr_db=10.0, threshold=tv,
            trials=15, estimators=("1bMMRELAX",), bic_max=10),
    }
