import warnings

import numpy as np
import pytest

from helpers import dominant_freq, two_tone
from seemd.decomposers import (
    EemdConfig,
    SeemdConfig,
    VmdConfig,
    decompose,
    eemd,
    make_config,
    seemd,
    select_informative_imf,
    vmd,
)
from seemd.emd import Decomposition, emd
from seemd.errors import EmptyDecomposition, InvalidInput, InvalidK, NoConvergence, ZeroVariance
from seemd.noise import FgnParams, convoluted_wgn, generate_fgn


@pytest.fixture
def noisy(rng):
    t = np.arange(2048) / 1000.0
    return np.sin(2 * np.pi * 40 * t) + 0.3 * rng.standard_normal(t.size)


def test_seemd_without_noise_is_emd(noisy):
    d = seemd(noisy, SeemdConfig(fgn_amplitude=0.0), modulator=np.zeros(noisy.size))
    ref = emd(noisy)
    assert np.array_equal(d.imfs, ref.imfs) and np.array_equal(d.residue, ref.residue)


def test_seemd_builds_the_modified_signal(noisy):
    cfg = SeemdConfig(fgn_seed=3, modulator_seed=4)
    d = seemd(noisy, cfg)
    fgn = generate_fgn(FgnParams(0.1, 1.0, noisy.size, 3)).samples
    m = convoluted_wgn(noisy.size, 4).samples
    expected = (noisy + 0.1 * np.std(noisy) * fgn) * (1.0 + m)
    np.testing.assert_allclose(d.signal, expected, rtol=0, atol=1e-12)
    raw = seemd(noisy, SeemdConfig(fgn_seed=3, modulator_seed=4, modulation="raw_m"))
    np.testing.assert_allclose(raw.signal, (noisy + 0.1 * np.std(noisy) * fgn) * m, atol=1e-12)


def test_seemd_single_emd_call_and_reconstruction(noisy):
    d = seemd(noisy)
    assert d.method == "seemd"
    assert d.meta["emd_calls"] == 1
    assert d.reconstruction_error() < 1e-10


def test_seemd_deterministic(noisy):
    a, b = seemd(noisy), seemd(noisy)
    assert np.array_equal(a.imfs, b.imfs)
    c = seemd(noisy, SeemdConfig(modulator_seed=9))
    assert not np.array_equal(a.signal, c.signal)


def test_seemd_rejects_constant_and_bad_modulator(noisy):
    with pytest.raises(ZeroVariance):
        seemd(np.ones(100))
    with pytest.raises(InvalidInput):
        seemd(noisy, modulator=np.zeros(3))


def test_eemd_single_noiseless_trial_is_emd(noisy):
    d = eemd(noisy, EemdConfig(ensemble_size=1, noise_std_ratio=0.0))
    ref = emd(noisy)
    assert np.array_equal(d.imfs, ref.imfs)
    np.testing.assert_allclose(d.residue, ref.residue, atol=1e-12)


def test_eemd_reconstruction_and_counters(noisy):
    d5 = eemd(noisy, EemdConfig(ensemble_size=5))
    d10 = eemd(noisy, EemdConfig(ensemble_size=10))
    assert np.linalg.norm(noisy - d5.reconstruct()) / np.linalg.norm(noisy) < 1e-10
    assert d5.meta["emd_calls"] == 5 and d10.meta["emd_calls"] == 10
    # Sift counts grow with the ensemble (roughly linearly).
    assert 1.5 < d10.meta["sift_calls"] / d5.meta["sift_calls"] < 2.5


def test_eemd_two_tone_separation():
    x, fs = two_tone()
    d = eemd(x, EemdConfig(ensemble_size=50), sample_rate=fs)
    df = fs / len(x)
    freqs = [dominant_freq(c, fs) for c in d.imfs]
    assert any(abs(f - 50.0) <= df for f in freqs)
    assert any(abs(f - 5.0) <= df for f in freqs)


def test_eemd_parallel_matches_sequential(noisy):
    a = eemd(noisy, EemdConfig(ensemble_size=4, workers=1))
    b = eemd(noisy, EemdConfig(ensemble_size=4, workers=2))
    assert np.array_equal(a.imfs, b.imfs)


def test_vmd_two_tone():
    t = np.arange(4096) / 1000.0
    x = np.sin(2 * np.pi * 50 * t) + np.sin(2 * np.pi * 120 * t)
    d = vmd(x, VmdConfig(num_modes=2, alpha=2000, tau=0, tol=1e-7), sample_rate=1000.0)
    cf = d.meta["center_freqs"]
    assert cf == sorted(cf)
    assert abs(cf[0] - 50) / 50 < 0.01 and abs(cf[1] - 120) / 120 < 0.01
    assert d.meta["converged"] and d.meta["num_modes"] == 2


def test_vmd_single_mode_does_not_add_energy(rng):
    t = np.arange(2048) / 1000.0
    x = np.sin(2 * np.pi * 80 * t) * (1 + 0.2 * np.sin(2 * np.pi * 3 * t))
    d = vmd(x, VmdConfig(num_modes=1, alpha=1e5), sample_rate=1000.0)
    assert np.sum(d.residue ** 2) < np.sum(x ** 2)
    assert abs(d.meta["center_freqs"][0] - 80) < 2


def test_vmd_warns_when_not_converged():
    x = np.random.default_rng(1).standard_normal(512)
    with pytest.warns(NoConvergence):
        d = vmd(x, VmdConfig(num_modes=3, max_iters=2))
    assert d.meta["converged"] is False and d.meta["iterations"] == 2


def test_vmd_invalid_k():
    with pytest.raises(InvalidK):
        VmdConfig(num_modes=0)


def _decomp(components):
    imfs = np.array(components)
    return Decomposition(imfs, np.zeros(imfs.shape[1]), "test", imfs.sum(axis=0))


def test_select_argmax_kurtosis():
    rng = np.random.default_rng(2)
    g = rng.standard_normal(4000)
    spiky = g.copy()
    spiky[::97] *= 8
    idx, k = select_informative_imf(_decomp([g, spiky, np.sin(np.arange(4000.0))]))
    assert idx == 1 and k > 5


def test_select_tie_goes_to_lower_index():
    c = np.sin(np.arange(1000.0))
    assert select_informative_imf(_decomp([c, c.copy(), c.copy()]))[0] == 0


def test_select_scale_invariant():
    rng = np.random.default_rng(3)
    comps = [rng.standard_normal(1000) ** p for p in (1, 3, 2)]
    d = _decomp(comps)
    scaled = _decomp([7.5 * c for c in comps])
    assert select_informative_imf(d)[0] == select_informative_imf(scaled)[0]


def test_select_empty():
    with pytest.raises(EmptyDecomposition):
        select_informative_imf(Decomposition(np.empty((0, 8)), np.zeros(8), "x", np.zeros(8)))


def test_make_config_and_dispatch(noisy):
    cfg = make_config("eemd", {"ensemble_size": 2, "sift": {"sd_threshold": 0.3}})
    assert cfg.sift.sd_threshold == 0.3
    d = decompose(noisy, "eemd", {"ensemble_size": 2})
    assert d.method == "eemd"
    with pytest.raises(InvalidInput):
        make_config("emd", {"bogus": 1})
    with pytest.raises(InvalidInput):
        decompose(noisy, "wavelet")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NoConvergence)
        assert decompose(noisy, "vmd", {"num_modes": 2}).n_imfs == 2
