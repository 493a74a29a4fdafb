import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from helpers import dominant_freq, two_tone, zero_crossing_rate
from seemd.emd import (
    SiftConfig,
    count_zero_crossings,
    emd,
    find_extrema,
    sift_one_imf,
    spline_envelope,
)
from seemd.errors import InsufficientExtrema, InvalidInput, TooShort


def test_extrema_single_peak():
    assert find_extrema([0.0, 1.0, 0.0]) == ([(1, 1.0)], [])


def test_extrema_plateau_floor_centre():
    assert find_extrema([0.0, 1.0, 1.0, 0.0]) == ([(1, 1.0)], [])
    assert find_extrema([0.0, 1.0, 1.0, 1.0, 0.0])[0] == [(2, 1.0)]


def test_extrema_of_sine_at_quarter_periods():
    n, periods = 1000, 4
    x = np.sin(2 * np.pi * periods * np.arange(n) / n)
    maxima, minima = find_extrema(x)
    assert len(maxima) == 4 and len(minima) == 4
    period = n / periods
    for j, (i, _) in enumerate(maxima):
        assert abs(i - (0.25 + j) * period) <= 1
    for j, (i, _) in enumerate(minima):
        assert abs(i - (0.75 + j) * period) <= 1


def test_extrema_too_short():
    with pytest.raises(TooShort):
        find_extrema([1.0, 2.0])


def test_spline_flat_through_equal_knots():
    np.testing.assert_allclose(spline_envelope([(0, 1.0), (99, 1.0)], 100), 1.0, atol=1e-12)


def test_spline_interpolates_knots():
    idx = np.array([3, 20, 41, 60, 88])
    val = (idx - 40.0) ** 2 / 100
    env = spline_envelope(list(zip(idx, val)), 100)
    assert np.max(np.abs(env[idx] - val)) < 1e-10


def test_spline_envelope_of_sine_is_amplitude():
    n = 2000
    x = 2.5 * np.sin(2 * np.pi * 20 * np.arange(n) / n + 0.3)
    maxima, _ = find_extrema(x)
    env = spline_envelope(maxima, n)
    core = env[n // 10: -n // 10]
    assert np.max(np.abs(core - 2.5)) < 0.01 * 2.5


def test_spline_needs_two_points():
    with pytest.raises(InsufficientExtrema):
        spline_envelope([(4, 1.0)], 10)


def test_sift_sinusoid_passes_through():
    n = 2048
    x = np.sin(2 * np.pi * 32 * np.arange(n) / n)
    res = sift_one_imf(x)
    core = slice(n // 10, n - n // 10)
    assert np.linalg.norm(res.imf[core] - x[core]) / np.linalg.norm(x[core]) < 0.05
    assert np.max(np.abs(res.residue[core])) < 0.05
    np.testing.assert_array_equal(res.imf + res.residue, x)


def test_sift_ramp_has_no_extrema():
    with pytest.raises(InsufficientExtrema):
        sift_one_imf(np.linspace(0, 1, 100))


def test_sift_converged_mean_envelope_is_small(rng):
    x = rng.standard_normal(2000)
    res = sift_one_imf(x)
    assert res.converged
    # The next envelope mean is what SD measures; at convergence it is
    # small relative to the IMF.
    follow = sift_one_imf(res.imf, SiftConfig(max_sift_iters=1, imf_condition=False))
    mean_env = res.imf - follow.imf
    assert np.dot(mean_env, mean_env) / np.dot(res.imf, res.imf) < 0.2


def test_emd_two_tone_separation():
    x, fs = two_tone()
    d = emd(x, sample_rate=fs)
    assert d.n_imfs >= 2
    df = fs / len(x)
    assert abs(dominant_freq(d.imfs[0], fs) - 50.0) <= df
    assert any(abs(dominant_freq(c, fs) - 5.0) <= df for c in d.imfs[1:])


def test_emd_constant_has_no_imfs():
    d = emd(np.full(64, 3.0))
    assert d.n_imfs == 0
    np.testing.assert_array_equal(d.residue, 3.0)


def test_emd_counters_and_limit(rng):
    x = rng.standard_normal(512)
    d = emd(x, SiftConfig(max_imfs=3))
    assert d.n_imfs <= 3
    assert d.meta["emd_calls"] == 1
    assert d.meta["sift_calls"] >= d.n_imfs
    assert d.meta["sift_iterations"] >= d.n_imfs
    assert SiftConfig().imf_limit(4096) == 12


def test_emd_deterministic(rng):
    x = rng.standard_normal(1000)
    a, b = emd(x), emd(x)
    assert np.array_equal(a.imfs, b.imfs) and np.array_equal(a.residue, b.residue)


@pytest.mark.parametrize("kw", [{"sd_threshold": 0}, {"max_sift_iters": 0}, {"max_imfs": 0},
                                {"boundary": "periodic"}])
def test_sift_config_validation(kw):
    with pytest.raises(InvalidInput):
        SiftConfig(**kw)


def test_sift_config_round_trip():
    cfg = SiftConfig(sd_threshold=0.3, max_imfs=5, imf_condition=False)
    assert SiftConfig.from_dict(cfg.to_dict()) == cfg


@settings(max_examples=30, deadline=None)
@given(arrays(np.float64, st.integers(3, 400), elements=st.floats(-1e3, 1e3)))
def test_emd_reconstruction_identity(x):
    d = emd(x)
    ref = max(np.linalg.norm(x), 1e-300)
    assert np.linalg.norm(x - d.reconstruct()) / ref < 1e-10 or np.linalg.norm(x) == 0


def test_imf_extrema_zero_crossing_balance():
    violations = total = 0
    for seed in range(10):
        x = np.random.default_rng(seed).standard_normal(2000)
        d = emd(x)
        for c, ok in zip(d.imfs, d.meta["converged"]):
            if not ok:
                continue
            core = c[100:-100]
            mx, mn = find_extrema(core)
            total += 1
            if abs(len(mx) + len(mn) - count_zero_crossings(core)) > 1:
                violations += 1
    assert total > 0 and violations == 0


def test_imf_ordering_by_zero_crossing_rate():
    inversions = 0
    for seed in range(20):
        x = np.random.default_rng(100 + seed).standard_normal(2048)
        rates = [zero_crossing_rate(c) for c in emd(x).imfs]
        inversions += sum(r1 < r2 for r1, r2 in zip(rates, rates[1:]))
    assert inversions <= 1
