"""Signal container and the elementary operations every other module uses."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyInput, InvalidInput, TooShort, ZeroVariance

# Both operands longer than this switch convolve() to the FFT path.
FFT_CONVOLVE_THRESHOLD = 4096

KURTOSIS_FORMULA = "mean((x - mean(x))**4) / var(x)**2  (population moments, non-excess)"


@dataclass(frozen=True, eq=False)
class Signal:
    """Uniformly sampled real-valued time series.

    ``samples`` is stored as a read-only float64 copy so a Signal can be
    shared freely between threads.
    """

    samples: np.ndarray
    sample_rate: float

    def __post_init__(self):
        x = np.array(self.samples, dtype=np.float64, copy=True).ravel()
        if x.size == 0:
            raise EmptyInput("signal has no samples")
        if not np.all(np.isfinite(x)):
            raise InvalidInput("signal contains NaN or Inf")
        fs = float(self.sample_rate)
        if not (np.isfinite(fs) and fs > 0):
            raise InvalidInput(f"sample_rate must be positive, got {self.sample_rate!r}")
        x.setflags(write=False)
        object.__setattr__(self, "samples", x)
        object.__setattr__(self, "sample_rate", fs)

    def __len__(self):
        return self.samples.size

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.samples.size) / self.sample_rate

    def with_samples(self, samples) -> "Signal":
        return Signal(samples, self.sample_rate)


@dataclass(frozen=True)
class SummaryStats:
    mean: float
    variance: float
    kurtosis: float | None
    peak_to_peak: float

    def to_dict(self) -> dict:
        return {
            "mean": self.mean,
            "variance": self.variance,
            "kurtosis": self.kurtosis,
            "peak_to_peak": self.peak_to_peak,
        }


def as_array(x) -> np.ndarray:
    """Return the samples of a Signal, or ``x`` as a 1-D float64 array."""
    if isinstance(x, Signal):
        return x.samples
    return np.asarray(x, dtype=np.float64).ravel()


def kurtosis(x) -> float:
    """Pearson (non-excess) kurtosis with population moments.

    A Gaussian sequence gives approximately 3.

    Raises
    ------
    TooShort
        Fewer than 4 samples.
    ZeroVariance
        All samples equal.
    """
    a = as_array(x)
    if a.size < 4:
        raise TooShort(f"kurtosis needs at least 4 samples, got {a.size}")
    d = a - a.mean()
    m2 = np.mean(d * d)
    if m2 <= 0.0:
        raise ZeroVariance("kurtosis undefined for a constant sequence")
    m4 = np.mean((d * d) ** 2)
    return float(m4 / (m2 * m2))


def summary_stats(x) -> SummaryStats:
    a = as_array(x)
    if a.size == 0:
        raise EmptyInput("summary_stats of an empty sequence")
    var = float(np.var(a))
    k = kurtosis(a) if (a.size >= 4 and var > 0.0) else None
    return SummaryStats(
        mean=float(np.mean(a)),
        variance=var,
        kurtosis=k,
        peak_to_peak=float(np.ptp(a)),
    )


def convolve(x, h, mode: str = "full") -> np.ndarray:
    """Discrete linear convolution ``y[n] = sum_t x[t] h[n - t]``.

    Parameters
    ----------
    x, h : array_like
        Non-empty finite sequences.
    mode : {"full", "same"}
        ``"full"`` returns ``len(x) + len(h) - 1`` samples. ``"same"``
        returns ``len(x)`` samples starting at offset
        ``(len(h) - 1) // 2`` of the full result.

    When both inputs exceed 4096 samples the product is formed with an
    FFT; otherwise by direct summation.
    """
    a = as_array(x)
    b = as_array(h)
    if a.size == 0 or b.size == 0:
        raise EmptyInput("convolve needs two non-empty sequences")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise InvalidInput("convolve inputs must be finite")
    if mode not in ("full", "same"):
        raise InvalidInput(f"unknown convolution mode {mode!r}")

    n_full = a.size + b.size - 1
    if a.size > FFT_CONVOLVE_THRESHOLD and b.size > FFT_CONVOLVE_THRESHOLD:
        nfft = 1 << (n_full - 1).bit_length()
        y = np.fft.irfft(np.fft.rfft(a, nfft) * np.fft.rfft(b, nfft), nfft)[:n_full]
    else:
        y = np.convolve(a, b, mode="full")

    if mode == "full":
        return y
    start = (b.size - 1) // 2
    return y[start:start + a.size].copy()


def standardize(x):
    """Shift to zero mean and scale to unit (population) standard deviation.

    Returns a Signal when given a Signal, otherwise an array.
    """
    a = as_array(x)
    sd = float(np.std(a))
    if not sd > 0.0:
        raise ZeroVariance("cannot standardize a constant sequence")
    z = (a - a.mean()) / sd
    if isinstance(x, Signal):
        return x.with_samples(z)
    return z
