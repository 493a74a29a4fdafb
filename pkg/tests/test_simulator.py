import math

import numpy as np
import pytest

from seemd.analysis import envelope_spectrum
from seemd.errors import ConfigInvalid
from seemd.signal import kurtosis
from seemd.simulator import SimConfig, rotation_profile, simulate_bearing


def test_default_configuration():
    cfg = SimConfig()
    assert cfg.fs == 20000 and cfg.carrier_freq == 20 and cfg.freq_deviation == 0
    assert cfg.snr_db == 20 and cfg.q_fault == 10 and cfg.num_samples == 20000


def test_rotation_profile_constant_without_deviation():
    np.testing.assert_array_equal(rotation_profile(SimConfig(), 100), 20.0)


def test_rotation_profile_bounded_with_deviation():
    cfg = SimConfig(freq_deviation=0.5)
    fr = rotation_profile(cfg, 30000)
    assert fr.size == 30000
    assert np.all(np.abs(fr - 20.0) <= np.pi * 0.5 + 1e-12)
    assert np.ptp(fr) > 0


def test_noise_free_envelope_peaks_at_truth():
    cfg = SimConfig(snr_db=math.inf, q_stiffness=0.0, q_rotation=0.0, seed=4)
    sig, truth = simulate_bearing(cfg)
    es = envelope_spectrum(sig)
    assert abs(es.peak_frequency(1.0) - truth["fault_freq"]) <= es.resolution
    assert truth["power_noise"] == 0.0


def test_realised_snr():
    sig, truth = simulate_bearing(SimConfig(seed=2))
    assert truth["snr_db_realized"] == pytest.approx(20.0, abs=0.1)
    _, long = simulate_bearing(SimConfig(duration_s=5.0, seed=3))
    assert long["snr_db_realized"] == pytest.approx(20.0, abs=0.1)


def test_impulse_count():
    cfg = SimConfig(duration_s=2.0, seed=9)
    _, truth = simulate_bearing(cfg)
    assert abs(len(truth["impulse_times"]) - truth["fault_freq"] * cfg.duration_s) <= 1


@pytest.mark.parametrize("fault", ["inner", "outer"])
def test_other_faults_at_their_frequency(fault):
    sig, truth = simulate_bearing(SimConfig(fault_type=fault, snr_db=math.inf, seed=1))
    es = envelope_spectrum(sig)
    # Inner-race impacts are amplitude-modulated at the shaft rate, so the
    # shaft line itself is strong; look above it.
    assert abs(es.peak_frequency(1.5 * truth["shaft_freq_mean"]) - truth["fault_freq"]) <= es.resolution


def test_impulsive_signal_is_leptokurtic():
    sig, _ = simulate_bearing(SimConfig())
    assert kurtosis(sig) > 3.5


def test_no_fault_negative_control():
    sig, truth = simulate_bearing(SimConfig(fault_type="none", seed=6))
    assert truth["fault_freq"] is None and truth["impulse_times"] == []
    es = envelope_spectrum(sig)
    floor = np.median(es.amplitudes[1:])
    for f in truth["bearing_freqs"].values():
        j = int(round(f / es.resolution))
        assert es.amplitudes[j] < 5 * floor


def test_deterministic_per_seed():
    a, ta = simulate_bearing(SimConfig(seed=5))
    b, tb = simulate_bearing(SimConfig(seed=5))
    c, _ = simulate_bearing(SimConfig(seed=6))
    assert np.array_equal(a.samples, b.samples) and ta == tb
    assert not np.array_equal(a.samples, c.samples)


@pytest.mark.parametrize("kw", [{"duration_s": 0}, {"fault_type": "cage"}, {"fs": 5000.0},
                                {"snr_db": -math.inf}, {"resonance_damping": 1.5}])
def test_config_validation(kw):
    with pytest.raises(ConfigInvalid):
        SimConfig(**kw)


def test_config_round_trip():
    cfg = SimConfig(seed=3, snr_db=10.0)
    assert SimConfig.from_dict(cfg.to_dict()) == cfg
    with pytest.raises(ConfigInvalid):
        SimConfig.from_dict({"nope": 1})
