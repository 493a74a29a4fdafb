"""Diagnostics downstream of a decomposition: STFT, envelope spectrum, ENVSI, bearing kinematics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.signal import get_window, hilbert

from .errors import BadBandwidth, HarmonicOutOfRange, InvalidGeometry, InvalidInput, TooShort, WindowTooLong
from .signal import Signal, as_array

# Spectrogram magnitudes are |X_k| * sqrt(c_k / L), with c_k = 2 for bins
# that stand for a +/- frequency pair and 1 for DC and Nyquist. The squared
# magnitudes of one frame then sum to the energy of the windowed frame.
SPECTROGRAM_SCALING = "one-sided |FFT(w*x)| * sqrt(c_k / window_len); sum over a frame of mag**2 == sum((w*x)**2)"


@dataclass(frozen=True, eq=False)
class Spectrogram:
    times: np.ndarray
    freqs: np.ndarray
    magnitudes: np.ndarray
    window_len: int
    hop: int
    scaling: str = SPECTROGRAM_SCALING


@dataclass(frozen=True, eq=False)
class EnvelopeSpectrum:
    freqs: np.ndarray
    amplitudes: np.ndarray

    @property
    def resolution(self) -> float:
        return float(self.freqs[1] - self.freqs[0])

    def peak_frequency(self, fmin: float = 0.0, fmax: float | None = None) -> float:
        mask = self.freqs > fmin
        if fmax is not None:
            mask &= self.freqs <= fmax
        idx = np.flatnonzero(mask)
        return float(self.freqs[idx[np.argmax(self.amplitudes[idx])]])


@dataclass(frozen=True, eq=False)
class EnvsiReport:
    value: float
    fault_freq: float
    m1: int
    m2: int
    harmonic_band_halfwidth: float
    harmonic_amplitudes: np.ndarray
    harmonic_bins: np.ndarray
    numerator: float
    denominator: float
    squared_ais: bool = False

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "fault_freq": self.fault_freq,
            "m1": self.m1,
            "m2": self.m2,
            "harmonic_band_halfwidth": self.harmonic_band_halfwidth,
            "harmonic_amplitudes": [float(v) for v in self.harmonic_amplitudes],
            "harmonic_bins": [int(b) for b in self.harmonic_bins],
            "numerator": self.numerator,
            "denominator": self.denominator,
            "squared_ais": self.squared_ais,
            "formula": ("sum_i AIS(i)**2 / sum_k SES(k)" if self.squared_ais
                        else "sum_i AIS(i) / sum_k SES(k)"),
        }


@dataclass(frozen=True)
class BearingGeometry:
    roller_diameter_mm: float = 8.4
    pitch_diameter_mm: float = 71.5
    contact_angle_rad: float = 15.7 * math.pi / 180.0
    num_rollers: int = 16

    def __post_init__(self):
        d, D = self.roller_diameter_mm, self.pitch_diameter_mm
        if not 0 < d < D:
            raise InvalidGeometry(f"need 0 < roller diameter < pitch diameter, got d={d}, D={D}")
        if int(self.num_rollers) < 1:
            raise InvalidGeometry("num_rollers must be >= 1")
        if not abs(self.contact_angle_rad) < math.pi / 2:
            raise InvalidGeometry("contact angle must satisfy |phi| < pi/2")

    def to_dict(self) -> dict:
        return {
            "roller_diameter_mm": self.roller_diameter_mm,
            "pitch_diameter_mm": self.pitch_diameter_mm,
            "contact_angle_rad": self.contact_angle_rad,
            "num_rollers": self.num_rollers,
        }


def spectrogram(x, window_len: int = 256, hop: int = 64, window: str = "hann",
                sample_rate: float | None = None) -> Spectrogram:
    """Magnitude STFT on a one-sided frequency axis.

    Frames start every ``hop`` samples and never run past the end, giving
    ``1 + (N - window_len) // hop`` frames; ``times`` are frame centres.
    """
    fs = sample_rate if sample_rate is not None else (x.sample_rate if isinstance(x, Signal) else 1.0)
    a = as_array(x)
    window_len, hop = int(window_len), int(hop)
    if window_len > a.size:
        raise WindowTooLong(f"window of {window_len} samples exceeds signal length {a.size}")
    if window_len < 1 or hop < 1:
        raise InvalidInput("window_len and hop must be >= 1")
    w = get_window(window, window_len)
    frames = sliding_window_view(a, window_len)[::hop] * w
    spec = np.abs(np.fft.rfft(frames, axis=1))
    c = np.full(spec.shape[1], 2.0)
    c[0] = 1.0
    if window_len % 2 == 0:
        c[-1] = 1.0
    mags = (spec * np.sqrt(c / window_len)).T
    times = (np.arange(frames.shape[0]) * hop + window_len / 2.0) / fs
    freqs = np.fft.rfftfreq(window_len, 1.0 / fs)
    return Spectrogram(times, freqs, mags, window_len, hop)


def envelope(x) -> np.ndarray:
    """Magnitude of the analytic signal (FFT-based Hilbert transform)."""
    return np.abs(hilbert(as_array(x)))


def envelope_spectrum(x, sample_rate: float | None = None) -> EnvelopeSpectrum:
    """One-sided amplitude spectrum of the mean-removed Hilbert envelope.

    No zero-padding is applied, so bins sit at exact multiples of fs/N.
    """
    fs = sample_rate if sample_rate is not None else (x.sample_rate if isinstance(x, Signal) else 1.0)
    a = as_array(x)
    n = a.size
    if n < 16:
        raise TooShort(f"envelope spectrum needs at least 16 samples, got {n}")
    env = envelope(a)
    env = env - env.mean()
    amp = np.abs(np.fft.rfft(env)) / n
    amp[1:] *= 2.0
    if n % 2 == 0:
        amp[-1] /= 2.0
    return EnvelopeSpectrum(np.fft.rfftfreq(n, 1.0 / fs), amp)


def default_m2(es: EnvelopeSpectrum, fault_freq: float, m1: int) -> int:
    """Bin count covering 0 .. 10 * m1 * fault_freq, clipped to the spectrum."""
    m2 = int(math.floor(10.0 * m1 * fault_freq / es.resolution)) + 1
    return min(m2, es.freqs.size)


def envsi(es: EnvelopeSpectrum, fault_freq: float, m1: int = 3, m2: int | None = None,
          band_halfwidth: float | None = None, squared_ais: bool = False) -> EnvsiReport:
    """Envelope-spectrum based indicator.

    ``SES`` is the squared envelope spectrum over the first ``m2`` bins,
    normalised to unit maximum. ``AIS(i)`` is the largest ``SES`` value
    within ``band_halfwidth`` Hz of harmonic ``i * fault_freq`` (the
    nearest bin when the band holds none). The indicator is
    ``sum(AIS) / sum(SES)``, an energy fraction in [0, 1]; with
    ``squared_ais`` the numerator uses ``AIS**2`` instead.

    Defaults: ``m2`` covers ``10 * m1 * fault_freq``; ``band_halfwidth``
    is 2.5 % of ``fault_freq``.
    """
    if not fault_freq > 0:
        raise InvalidInput("fault_freq must be positive")
    m1 = int(m1)
    if m1 < 1:
        raise InvalidInput("m1 must be >= 1")
    if band_halfwidth is None:
        band_halfwidth = 0.025 * fault_freq
    if not 0 <= band_halfwidth < fault_freq / 2:
        raise BadBandwidth(f"band half-width must lie in [0, fault_freq/2), got {band_halfwidth}")
    if m2 is None:
        m2 = default_m2(es, fault_freq, m1)
    m2 = int(m2)
    if m2 <= m1:
        raise InvalidInput(f"m2 must exceed m1 (m1={m1}, m2={m2})")
    if m2 > es.freqs.size:
        raise HarmonicOutOfRange(f"m2={m2} exceeds the {es.freqs.size} available bins")

    freqs = es.freqs[:m2]
    df = es.resolution
    if fault_freq < df:
        raise InvalidInput(f"fault_freq {fault_freq} Hz is below the spectral resolution {df} Hz")
    top = m1 * fault_freq + band_halfwidth
    if round(m1 * fault_freq / df) > m2 - 1 or top > freqs[-1] + df / 2:
        raise HarmonicOutOfRange(
            f"harmonic {m1} x {fault_freq} Hz lies beyond the first {m2} bins (up to {freqs[-1]} Hz)"
        )

    ses = np.asarray(es.amplitudes[:m2], dtype=np.float64) ** 2
    peak = ses.max()
    if peak > 0:
        ses = ses / peak

    ais = np.empty(m1)
    bins = np.empty(m1, dtype=np.intp)
    for i in range(1, m1 + 1):
        target = i * fault_freq
        in_band = np.flatnonzero(np.abs(freqs - target) <= band_halfwidth)
        if in_band.size == 0:
            in_band = np.array([int(np.argmin(np.abs(freqs - target)))])
        j = in_band[np.argmax(ses[in_band])]
        bins[i - 1] = j
        ais[i - 1] = ses[j]

    numerator = float(np.sum(ais**2) if squared_ais else np.sum(ais))
    denominator = float(np.sum(ses))
    value = numerator / denominator if denominator > 0 else 0.0
    return EnvsiReport(value, float(fault_freq), m1, m2, float(band_halfwidth), ais, bins,
                       numerator, denominator, squared_ais)


def fault_frequencies(geom: BearingGeometry, shaft_hz: float) -> dict[str, float]:
    """Characteristic bearing defect frequencies in Hz.

    With ``r = d / D * cos(phi)``::

        FTF  = f / 2 * (1 - r)
        BPFO = n f / 2 * (1 - r)
        BPFI = n f / 2 * (1 + r)
        BSF  = D f / (2 d) * (1 - r**2)
    """
    if not shaft_hz > 0:
        raise InvalidInput("shaft_hz must be positive")
    d, D = geom.roller_diameter_mm, geom.pitch_diameter_mm
    n = geom.num_rollers
    r = d / D * math.cos(geom.contact_angle_rad)
    f = float(shaft_hz)
    return {
        "ftf": 0.5 * f * (1.0 - r),
        "bpfo": 0.5 * n * f * (1.0 - r),
        "bpfi": 0.5 * n * f * (1.0 + r),
        "bsf": D * f / (2.0 * d) * (1.0 - r * r),
    }
