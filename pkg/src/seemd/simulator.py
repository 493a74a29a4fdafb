"""Synthetic rolling-element bearing vibration with a localized defect.

The generated signal is the sum of

* a train of fault impulses, one per defect period, each ringing a
  single-degree-of-freedom resonance, with amplitude ``q_fault`` and a
  sinusoidal amplitude modulation at the cage (ball defect) or shaft
  (inner race) rate;
* deterministic shaft components, ``q_rotation`` at 1x and
  ``q_stiffness`` at 2x the shaft frequency;
* white Gaussian noise scaled to the requested SNR.

Defaults reproduce the ball-defect parameter block: 20 kHz sampling,
20 Hz shaft, no frequency deviation, 500 points per revolution, 20 dB
SNR, ``q_fault=10``, ``q_stiffness=q_rotation=0.1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

import numpy as np

from .analysis import BearingGeometry, fault_frequencies
from .errors import ConfigInvalid
from .noise import make_rng
from .signal import Signal

FAULT_TYPES = ("ball", "inner", "outer", "none")
_FAULT_KEY = {"ball": "bsf", "inner": "bpfi", "outer": "bpfo"}


@dataclass(frozen=True)
class SimConfig:
    geometry: BearingGeometry = field(default_factory=BearingGeometry)
    fault_type: str = "ball"
    fs: float = 20000.0
    duration_s: float = 1.0
    carrier_freq: float = 20.0
    modulation_freq: float | None = None  # None -> 0.1 * carrier_freq
    freq_deviation: float = 0.0
    points_per_rev: int = 500
    snr_db: float = 20.0
    q_fault: float = 10.0
    q_stiffness: float = 0.1
    q_rotation: float = 0.1
    resonance_freq: float = 4000.0
    resonance_damping: float = 0.008
    am_depth: float = 0.5
    jitter: bool = True
    jitter_fraction: float = 0.01
    seed: int = 0

    def __post_init__(self):
        if isinstance(self.geometry, dict):
            object.__setattr__(self, "geometry", BearingGeometry(**self.geometry))
        if self.modulation_freq is None:
            object.__setattr__(self, "modulation_freq", 0.1 * self.carrier_freq)
        if self.fault_type not in FAULT_TYPES:
            raise ConfigInvalid(f"fault_type must be one of {FAULT_TYPES}, got {self.fault_type!r}")
        if not self.fs > 0:
            raise ConfigInvalid("fs must be positive")
        if not self.duration_s > 0:
            raise ConfigInvalid(f"duration_s must be positive, got {self.duration_s}")
        if round(self.duration_s * self.fs) < 16:
            raise ConfigInvalid("duration_s * fs must give at least 16 samples")
        if not self.carrier_freq > 0:
            raise ConfigInvalid("carrier_freq must be positive")
        if not self.fs > 2 * self.resonance_freq:
            raise ConfigInvalid("fs must exceed twice the resonance frequency")
        if not self.resonance_freq > 0:
            raise ConfigInvalid("resonance_freq must be positive")
        if not 0 < self.resonance_damping < 1:
            raise ConfigInvalid("resonance_damping must lie in (0, 1)")
        if math.isnan(self.snr_db) or self.snr_db == -math.inf:
            raise ConfigInvalid("snr_db must be finite (or +inf for a noise-free signal)")
        if self.points_per_rev < 1:
            raise ConfigInvalid("points_per_rev must be >= 1")
        if not 0 <= self.am_depth <= 1:
            raise ConfigInvalid("am_depth must lie in [0, 1]")
        if not 0 <= self.jitter_fraction < 0.5:
            raise ConfigInvalid("jitter_fraction must lie in [0, 0.5)")

    @property
    def num_samples(self) -> int:
        return int(round(self.duration_s * self.fs))

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            out[f.name] = v.to_dict() if isinstance(v, BearingGeometry) else v
        return out

    @classmethod
    def from_dict(cls, d: dict | None) -> "SimConfig":
        d = dict(d or {})
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigInvalid(f"unknown simulator parameters: {sorted(unknown)}")
        try:
            return cls(**d)
        except TypeError as exc:
            raise ConfigInvalid(str(exc)) from None


def rotation_profile(cfg: SimConfig, num_samples: int) -> np.ndarray:
    """Instantaneous shaft frequency in Hz, one value per sample.

    ``fc + pi * fd * cumsum(cos(fm * theta)) / N`` with
    ``theta_j = 2 pi j / N`` (N points per revolution). Constant ``fc``
    when ``fd == 0``.
    """
    num_samples = int(num_samples)
    if num_samples < 1:
        raise ConfigInvalid("num_samples must be >= 1")
    if cfg.freq_deviation == 0:
        return np.full(num_samples, float(cfg.carrier_freq))
    n = cfg.points_per_rev
    theta = 2.0 * np.pi * np.arange(num_samples) / n
    return cfg.carrier_freq + np.pi * cfg.freq_deviation * np.cumsum(np.cos(cfg.modulation_freq * theta)) / n


def _impulse_response(tau: np.ndarray, f_res: float, zeta: float) -> np.ndarray:
    wn = 2.0 * np.pi * f_res
    wd = wn * math.sqrt(1.0 - zeta * zeta)
    return np.exp(-zeta * wn * tau) * np.sin(wd * tau)


def simulate_bearing(cfg: SimConfig | None = None) -> tuple[Signal, dict]:
    """Generate the bearing signal and its ground truth.

    Returns
    -------
    signal : Signal
    truth : dict
        ``fault_freq`` (Hz, mean over the record; ``None`` for
        ``fault_type="none"``), ``impulse_times`` (s), the
        ``bearing_freqs`` at the mean shaft speed, and the realised
        component powers.
    """
    cfg = cfg or SimConfig()
    rng = make_rng(cfg.seed)
    n = cfg.num_samples
    fs = cfg.fs
    t = np.arange(n) / fs

    fr = rotation_profile(cfg, n)
    revs = np.concatenate([[0.0], np.cumsum(fr[:-1])]) / fs
    phi = 2.0 * np.pi * revs
    shaft_mean = float(fr.mean())
    per_hz = fault_frequencies(cfg.geometry, 1.0)
    bearing_freqs = {k: v * shaft_mean for k, v in per_hz.items()}

    deterministic = cfg.q_rotation * np.cos(phi) + cfg.q_stiffness * np.cos(2.0 * phi)

    fault = np.zeros(n)
    impulse_times = np.empty(0)
    fault_freq = None
    if cfg.fault_type != "none":
        order = per_hz[_FAULT_KEY[cfg.fault_type]]
        fault_freq = order * shaft_mean
        # Defect strikes whenever the fault phase (order * revolutions) passes an integer.
        fault_cycles = order * revs
        start = rng.uniform()
        k = np.arange(math.floor(fault_cycles[-1] - start) + 1) + start
        impulse_times = np.interp(k, fault_cycles, t)
        if cfg.jitter and impulse_times.size:
            local_period = 1.0 / (order * np.interp(impulse_times, t, fr))
            impulse_times = impulse_times + cfg.jitter_fraction * local_period * rng.uniform(-1, 1, impulse_times.size)
        impulse_times = impulse_times[(impulse_times >= 0) & (impulse_times < t[-1])]

        am_rate = {"ball": per_hz["ftf"], "inner": 1.0, "outer": 0.0}[cfg.fault_type] * shaft_mean
        amps = cfg.q_fault * (1.0 + cfg.am_depth * np.cos(2.0 * np.pi * am_rate * impulse_times))
        if cfg.fault_type == "outer":
            amps = np.full(impulse_times.size, float(cfg.q_fault))

        ring = int(math.ceil(10.0 / (cfg.resonance_damping * 2 * math.pi * cfg.resonance_freq) * fs))
        for tk, ak in zip(impulse_times, amps):
            i0 = int(math.ceil(tk * fs))
            i1 = min(n, i0 + ring)
            if i0 >= n:
                continue
            fault[i0:i1] += ak * _impulse_response(t[i0:i1] - tk, cfg.resonance_freq, cfg.resonance_damping)

    clean = deterministic + fault
    p_clean = float(np.mean(clean**2))
    if math.isinf(cfg.snr_db):
        noise = np.zeros(n)
    else:
        w = rng.standard_normal(n)
        p_target = p_clean / 10.0 ** (cfg.snr_db / 10.0)
        noise = w * math.sqrt(p_target / float(np.mean(w**2)))
    p_noise = float(np.mean(noise**2))

    truth = {
        "fault_type": cfg.fault_type,
        "fault_freq": fault_freq,
        "impulse_times": impulse_times.tolist(),
        "shaft_freq_mean": shaft_mean,
        "bearing_freqs": bearing_freqs,
        "power_clean": p_clean,
        "power_noise": p_noise,
        "snr_db_realized": (10.0 * math.log10(p_clean / p_noise)) if p_noise > 0 else math.inf,
    }
    return Signal(clean + noise, fs), truth
