"""Signal model, thresholds, RNG determinism, and one-bit sampling."""

import json

import numpy as np
import pytest

from onebitsine.sigmodel import (RngState, SignedRecord, SinusoidSet,
                                 ThresholdSpec, sample_one_bit, sign_complex,
                                 sign_real, snr_to_sigma, synth)

TWO_PI = 2.0 * np.pi


# ---------------------------------------------------------------------------
# RNG

def test_rng_reproducible_streams():
    a = RngState(12345).normal(64)
    b = RngState(12345).normal(64)
    assert np.array_equal(a, b)
    c = RngState(12346).normal(64)
    assert not np.array_equal(a, c)


def test_rng_golden_values():
    # frozen outputs of the documented SplitMix64 + Box-Muller pipeline
    r = RngState(42)
    assert list(r.next_words(2)) == [13679457532755275413, 2949826092126892291]
    u = RngState(42).uniform(2)
    assert u[0] == pytest.approx(0.7415648787718233, abs=0)
    g = RngState(42).normal(2)
    assert g[0] == pytest.approx(0.8822489062222688, abs=0)
    # batch size does not shift the stream: pair i always uses words 2i, 2i+1
    assert RngState(42).normal(4)[0] == g[0]


def test_rng_uniform_range():
    u = RngState(7).uniform(10000)
    assert np.all(u >= 0.0) and np.all(u < 1.0)


# ---------------------------------------------------------------------------
# sinusoid sets and synthesis

def test_ab_round_trip():
    rng = np.random.default_rng(0)
    for _ in range(200):
        amps = rng.uniform(0.1, 3.0, 4)
        phases = rng.uniform(0.0, TWO_PI, 4)
        freqs = rng.uniform(0.0, np.pi, 4)
        s = SinusoidSet(amps, phases, freqs, "r1")
        ab = s.ab()
        back = SinusoidSet.from_ab(ab, freqs, "r1")
        assert np.allclose(back.amps, amps, atol=1e-12)
        assert np.allclose(np.mod(back.phases - phases, TWO_PI), 0.0, atol=1e-9) or \
            np.allclose(np.abs(np.mod(back.phases - phases + np.pi, TWO_PI) - np.pi), 0.0, atol=1e-12)


def test_synth_empty_is_zero():
    s = synth(SinusoidSet.empty("r1"), 16)
    assert np.all(s == 0.0)


def test_synth_phase_identity():
    # A sin(w t + pi/2) = cos(w t)
    s = synth(SinusoidSet([1.0], [np.pi / 2], [0.3], "r1"), 10)
    assert np.allclose(s, np.cos(0.3 * np.arange(10)), atol=1e-14)


def test_synth_example1_t0():
    n = 1024
    freqs = TWO_PI * np.array([0.11, 0.11 + 1.0 / n, 0.2, 0.3, 0.37, 0.45])
    amps = [1.0, 1.0, 0.7, 0.8, 0.6, 0.5]
    phases = [7 * np.pi / 6, np.pi / 6, np.pi / 2, np.pi / 4, 11 * np.pi / 6, np.pi]
    s = synth(SinusoidSet(amps, phases, freqs, "r1"), n)
    # direct evaluation of the model at t=0: sum A_k sin(phi_k)
    assert s[0] == pytest.approx(0.96568542494923802, abs=1e-12)


def test_synth_dim_mismatch():
    with pytest.raises(ValueError):
        synth(SinusoidSet([1.0], [0.0], [[0.1, 0.2]], "c2"), 8)
    with pytest.raises(ValueError):
        synth(SinusoidSet([1.0], [0.0], [0.1], "r1"), 0)


def test_validate_rejects_bad_components():
    with pytest.raises(ValueError):
        SinusoidSet([0.0], [0.0], [0.1], "r1").validate()
    with pytest.raises(ValueError):
        SinusoidSet([1.0], [0.0], [np.pi], "r1").validate()
    SinusoidSet([1.0], [0.0], [np.pi], "c1").validate()  # ok for complex


# ---------------------------------------------------------------------------
# sign operators

def test_sign_real():
    assert sign_real(0.0) == 1.0
    assert sign_real(-0.2) == -1.0
    assert sign_real(3.7) == 1.0


def test_sign_complex():
    assert sign_complex(1 - 0.5j) == 1 - 1j
    assert sign_complex(0 + 0j) == 1 + 1j
    assert sign_complex(-2 + 3j) == -1 + 1j


# ---------------------------------------------------------------------------
# thresholds and sampling

def test_threshold_levels_cover_endpoints():
    vals = ThresholdSpec().level_values()
    expect = np.array([-1, -5 / 7, -3 / 7, -1 / 7, 1 / 7, 3 / 7, 5 / 7, 1])
    assert np.allclose(np.sort(vals), expect, atol=1e-12)


def test_discrete_threshold_draws_from_levels():
    spec = ThresholdSpec("discrete-random", levels=8, low=-1.0, high=1.0)
    h = spec.materialize(500, "r1", RngState(3))
    vals = spec.level_values()
    for v in np.unique(h):
        assert np.min(np.abs(vals - v)) < 1e-12


def test_sample_one_bit_sigma_limit():
    rec = sample_one_bit(np.ones(64), 1e-12, ThresholdSpec("fixed", 0.0), RngState(1))
    assert np.all(rec.y == 1.0)


def test_sample_one_bit_golden_pattern():
    rec = sample_one_bit(np.zeros(4), 1.0, ThresholdSpec("fixed", 0.0), RngState(42))
    assert [int(v) for v in rec.y] == [1, 1, -1, 1]


def test_sample_one_bit_bit_identical():
    sig = synth(SinusoidSet([1.0], [0.3], [0.5], "r1"), 128)
    a = sample_one_bit(sig, 0.4, ThresholdSpec(), RngState(77))
    b = sample_one_bit(sig, 0.4, ThresholdSpec(), RngState(77))
    assert np.array_equal(a.y, b.y) and np.array_equal(a.h, b.h)


def test_record_entries_exactly_pm1():
    rng = RngState(5)
    for dim, sig in (("r1", np.zeros(50)),
                     ("c1", np.zeros(50, dtype=complex)),
                     ("c2", np.zeros((6, 8), dtype=complex))):
        rec = sample_one_bit(sig, 1.3, ThresholdSpec(), rng, dim=dim)
        if dim == "r1":
            assert set(np.unique(rec.y)) <= {-1.0, 1.0}
        else:
            assert set(np.unique(rec.y.real)) <= {-1.0, 1.0}
            assert set(np.unique(rec.y.imag)) <= {-1.0, 1.0}


def test_record_validation():
    with pytest.raises(ValueError):
        SignedRecord(np.array([1.0, 0.5]), np.zeros(2), "r1")
    with pytest.raises(ValueError):
        SignedRecord(np.ones(4), np.zeros(3), "r1")


def test_complex_noise_split():
    # complex noise has Re/Im variance sigma^2/2 each
    rng = RngState(11)
    rec = sample_one_bit(np.zeros(20000, dtype=complex), 2.0,
                         ThresholdSpec("fixed", 0.0), rng)
    # P(Re y = +1) should be ~1/2 for zero threshold
    assert abs(np.mean(rec.y.real)) < 0.05


# ---------------------------------------------------------------------------
# SNR convention

def test_snr_to_sigma_real_0db():
    s = SinusoidSet([1.0], [0.0], [0.3], "r1")
    assert snr_to_sigma(s, 0.0) == pytest.approx(1 / np.sqrt(2), rel=1e-12)


def test_snr_to_sigma_complex_10db():
    s = SinusoidSet([1.0], [0.0], [0.3], "c1")
    assert snr_to_sigma(s, 10.0) == pytest.approx(10 ** -0.5, rel=1e-12)


def test_snr_to_sigma_high_snr_limit():
    s = SinusoidSet([1.0], [0.0], [0.3], "r1")
    assert snr_to_sigma(s, 200.0) == pytest.approx(7.071067811865475e-11, rel=1e-10)


def test_snr_to_sigma_empty_rejected():
    with pytest.raises(ValueError):
        snr_to_sigma(SinusoidSet.empty("r1"), 10.0)


# ---------------------------------------------------------------------------
# JSON round trips

def test_record_json_round_trip_r1(tmp_path):
    sig = synth(SinusoidSet([1.0, 0.5], [0.3, 1.1], [0.5, 1.9], "r1"), 32)
    rec = sample_one_bit(sig, 0.7, ThresholdSpec(), RngState(2))
    rec.truth = SinusoidSet([1.0, 0.5], [0.3, 1.1], [0.5, 1.9], "r1")
    rec.sigma = 0.7
    p = tmp_path / "rec.json"
    rec.save(p)
    back = SignedRecord.load(p)
    assert back.dim == "r1"
    assert np.array_equal(back.y, rec.y)
    assert np.allclose(back.h, rec.h)
    assert np.allclose(back.truth.freqs, rec.truth.freqs)
    assert back.sigma == rec.sigma


def test_record_json_round_trip_c2(tmp_path):
    rec = sample_one_bit(np.zeros((4, 6), dtype=complex), 1.0,
                         ThresholdSpec(), RngState(8))
    p = tmp_path / "rec2d.json"
    rec.save(p)
    back = SignedRecord.load(p)
    assert back.dim == "c2" and back.shape == (4, 6)
    assert np.array_equal(back.y, rec.y)
    # schema check: complex stored as [re, im] pairs, flat row-major
    d = json.loads(p.read_text())
    assert d["n"] == [4, 6]
    assert len(d["y"]) == 24 and len(d["y"][0]) == 2
