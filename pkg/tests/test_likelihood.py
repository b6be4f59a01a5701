"""Stable likelihood primitives against high-precision oracles.

Frozen reference values were computed with mpmath at 60 significant
digits: f(x) = -log(ncdf(x)), r = npdf/ncdf, f'' = r (x + r); for x > 0
the cdf complement was evaluated as ncdf(-x) to avoid cancellation in the
oracle itself.
"""

import numpy as np
import pytest

from onebitsine.likelihood import (ScaledParams, f, f_prime, f_second,
                                   margins, nll, surrogate)
from onebitsine.sigmodel import (RngState, SignedRecord, SinusoidSet,
                                 ThresholdSpec, sample_one_bit, synth)

LN2 = np.log(2.0)

# (x, f, f', f'') high-precision triples
ORACLE = [
    (-40.0, 804.60844201375378817, -40.024968847207263723, 0.99937733162140861123),
    (-30.0, 454.32124395634319711, -30.033259667433677037, 0.998896228488109909),
    (-10.0, 53.231285150512470578, -10.098093233962511963, 0.99055462217434373884),
    (-8.0, 35.013437159914549896, -8.1213681122361126807, 0.98567511655665908982),
    (-5.0, 15.064998393988725736, -5.1865039671258421156, 0.96730356538288777465),
    (-2.0, 3.7831843336820319488, -2.3732155328228408673, 0.88572089958591874336),
    (-1.0, 1.8410216450092635058, -1.5251352761609812091, 0.80090233442965120845),
    (0.0, 0.69314718055994530942, -0.79788456080286535588, 0.63661977236758134308),
    (1.0, 0.17275377902344988953, -0.28759997093917836123, 0.37031371422339459914),
    (2.0, 0.023012909328963488465, -0.055247862678989959102, 0.11354805168857644979),
    (5.0, 2.8665161296376359338e-7, -1.4867199409049057124e-6, 7.4336019148607112465e-6),
    (10.0, 7.619853024160526066e-24, -7.6945986267064193463e-23, 7.6945986267064193463e-22),
    (30.0, 4.9067139271481870595e-198, -1.473646134878547519e-196, 4.4209384046356425571e-195),
]


@pytest.mark.parametrize("x,fx,fpx,fsx", ORACLE)
def test_f_against_oracle(x, fx, fpx, fsx):
    assert f(x) == pytest.approx(fx, rel=1e-10)
    assert f_prime(x) == pytest.approx(fpx, rel=1e-9)
    assert f_second(x) == pytest.approx(fsx, rel=1e-8)


def test_f_spot_values():
    assert f(0.0) == pytest.approx(LN2, rel=1e-14)
    assert f(-10.0) == pytest.approx(53.2312851505, rel=1e-10)
    assert f(10.0) == pytest.approx(7.6198530242e-24, rel=1e-9)
    assert f_prime(0.0) == pytest.approx(-np.sqrt(2 / np.pi), rel=1e-14)
    assert f_prime(-10.0) == pytest.approx(-10.09809323396, rel=1e-11)
    assert f_prime(5.0) == pytest.approx(-1.4867199409e-6, rel=1e-9)
    assert f_second(0.0) == pytest.approx(2 / np.pi, rel=1e-13)
    assert 0.998 < f_second(-30.0) < 1.0
    f30 = f_second(30.0)
    assert 0.0 < f30 < 1e-100


def test_f_rejects_nan():
    for fn in (f, f_prime, f_second):
        with pytest.raises(ValueError):
            fn(np.nan)
        with pytest.raises(ValueError):
            fn(np.array([0.0, np.nan]))


def test_f_prime_strictly_negative():
    xs = np.linspace(-40.0, 40.0, 2001)
    assert np.all(f_prime(xs) < 0.0)


def test_second_derivative_bounds_dense_grid():
    xs = np.arange(-30.0, 30.0 + 1e-9, 1e-3)
    vals = f_second(xs)
    assert np.all(vals > 0.0)
    assert np.all(vals < 1.0)


def test_finite_difference_consistency():
    h = 1e-5
    xs = np.linspace(-8.0, 8.0, 161)
    fd1 = (f(xs + h) - f(xs - h)) / (2 * h)
    assert np.max(np.abs(f_prime(xs) - fd1)) < 1e-6
    fd2 = (f_prime(xs + h) - f_prime(xs - h)) / (2 * h)
    assert np.max(np.abs(f_second(xs) - fd2)) < 1e-6


# ---------------------------------------------------------------------------
# margins / NLL

def _record_r1(y, h):
    return SignedRecord(np.asarray(y, dtype=float), np.asarray(h, dtype=float), "r1")


def test_margins_zero_params_zero_threshold():
    rec = _record_r1([1, -1, 1], [0, 0, 0])
    p = ScaledParams(np.zeros((0, 2)), np.zeros(0), 0.0, "r1")
    assert np.all(margins(rec, p) == 0.0)


def test_margins_threshold_only():
    rec = _record_r1([-1], [0.5])
    p = ScaledParams(np.zeros((0, 2)), np.zeros(0), 2.0, "r1")
    assert margins(rec, p) == pytest.approx([1.0])


def test_margins_single_sinusoid():
    rec = _record_r1([1, -1], [0, 0])
    p = ScaledParams([[1.0, 0.0]], [np.pi / 2], 0.0, "r1")
    # s = [sin(0), sin(pi/2)] = [0, 1]; x = y*s = [0, -1]
    assert np.allclose(margins(rec, p), [0.0, -1.0], atol=1e-15)


def test_margins_dim_mismatch():
    rec = _record_r1([1, -1], [0, 0])
    p = ScaledParams(np.zeros((0, 2)), np.zeros(0), 0.0, "c1")
    with pytest.raises(ValueError):
        margins(rec, p)


def test_nll_all_zero_margins():
    rec = _record_r1([1, 1, 1, -1], [0, 0, 0, 0])
    p = ScaledParams(np.zeros((0, 2)), np.zeros(0), 0.0, "r1")
    assert nll(rec, p) == pytest.approx(4 * LN2, rel=1e-14)


def test_nll_saturated_margins():
    # margins all = 10 on 3 samples: NLL = 3 f(10)
    rec = _record_r1([1, 1, 1], [-10.0, -10.0, -10.0])
    p = ScaledParams(np.zeros((0, 2)), np.zeros(0), 1.0, "r1")
    assert nll(rec, p) == pytest.approx(3 * 7.619853024160526e-24, rel=1e-9)


def test_nll_complex_two_terms_per_sample():
    rec = SignedRecord(np.array([1 + 1j]), np.array([0j]), "c1")
    p = ScaledParams(np.zeros((0, 2)), np.zeros(0), 0.0, "c1")
    assert nll(rec, p) == pytest.approx(2 * LN2, rel=1e-14)


def test_lambda_zero_allowed():
    rec = _record_r1([1, -1], [0.3, -0.2])
    p = ScaledParams([[0.5, 0.5]], [0.7], 0.0, "r1")
    assert np.isfinite(nll(rec, p))


# ---------------------------------------------------------------------------
# surrogate

def _random_problem(rng, n=24, k=2, dim="r1"):
    if dim == "r1":
        sig = synth(SinusoidSet(rng.uniform(0.3, 1.5, k), rng.uniform(0, TWO_PI := 2 * np.pi, k),
                                rng.uniform(0.05, 3.0, k), "r1"), n)
    else:
        sig = synth(SinusoidSet(rng.uniform(0.3, 1.5, k), rng.uniform(0, 2 * np.pi, k),
                                rng.uniform(0.05, 6.0, k), "c1"), n)
    rec = sample_one_bit(sig, 0.5, ThresholdSpec(), RngState(int(rng.integers(2 ** 50))),
                         dim=dim)
    def rand_params():
        return ScaledParams(rng.normal(size=(k, 2)), rng.uniform(0.05, 3.0 if dim == "r1" else 6.0, k),
                            rng.uniform(0.0, 4.0), dim)
    return rec, rand_params


def test_surrogate_touches_at_anchor():
    rng = np.random.default_rng(42)
    rec, rand_params = _random_problem(rng)
    p = rand_params()
    val_s = surrogate(rec, p, p)
    val_l = nll(rec, p)
    assert abs(val_s - val_l) <= 1e-10 * (1 + abs(val_l))


def test_surrogate_majorizes():
    rng = np.random.default_rng(7)
    for dim in ("r1", "c1"):
        rec, rand_params = _random_problem(rng, dim=dim)
        for _ in range(100):
            p = rand_params()
            anchor = rand_params()
            assert surrogate(rec, p, anchor) >= nll(rec, p) - 1e-9


def test_surrogate_closed_form():
    # anchor margins all 0, params margins all 1:
    # G = N (ln 2 + f'(0) + 1/2)
    n = 5
    rec = _record_r1(np.ones(n), np.zeros(n))
    anchor = ScaledParams(np.zeros((0, 2)), np.zeros(0), 0.0, "r1")
    params = ScaledParams([[0.0, 1.0]], [0.0], 0.0, "r1")  # s = cos(0) = 1
    got = surrogate(rec, params, anchor)
    want = n * (LN2 - np.sqrt(2 / np.pi) + 0.5)
    assert got == pytest.approx(want, rel=1e-12)


def test_nll_margin_construction_consistency():
    # the margin-based NLL equals the direct composition for either sign
    # of each measurement
    rng = np.random.default_rng(12)
    for _ in range(20):
        n = 16
        y = np.where(rng.normal(size=n) > 0, 1.0, -1.0)
        h = rng.uniform(-1, 1, n)
        rec = SignedRecord(y, h, "r1")
        p = ScaledParams(rng.normal(size=(2, 2)), rng.uniform(0.1, 3.0, 2),
                         rng.uniform(0, 3), "r1")
        s = p.signal(n)
        direct = float(np.sum(f(y * (s - p.lam * h))))
        assert nll(rec, p) == pytest.approx(direct, rel=1e-12)
        # flipping one sample's sign flips its margin and nothing else
        y2 = y.copy()
        y2[3] = -y2[3]
        rec2 = SignedRecord(y2, h, "r1")
        m1 = margins(rec, p)
        m2 = margins(rec2, p)
        assert m2[3] == -m1[3]
        assert np.all(np.delete(m2, 3) == np.delete(m1, 3))
