"""Seeded synthesis of white, fractional and convoluted Gaussian noise.

Every generator takes an explicit 64-bit seed and draws from numpy's
PCG64 bit generator, so outputs are reproducible across platforms.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidHurst, InvalidInput, InvalidStd, LengthTooShort
from .signal import Signal, convolve

U64_MAX = 2**64 - 1

# Relative tolerance for treating tiny negative circulant eigenvalues as
# round-off rather than a genuine embedding failure.
_EIG_TOL = 1e-10


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 generator for a 64-bit unsigned seed."""
    seed = int(seed)
    if not 0 <= seed <= U64_MAX:
        raise InvalidInput(f"seed must be a 64-bit unsigned integer, got {seed}")
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class FgnParams:
    hurst: float
    variance: float = 1.0
    length: int = 1024
    seed: int = 0

    def __post_init__(self):
        _check_hurst(self.hurst)
        if not self.variance > 0:
            raise InvalidInput(f"FGN variance must be positive, got {self.variance}")


@dataclass(frozen=True)
class NoiseSpec:
    """Configuration record for one noise injection.

    ``kind`` is ``"wgn"``, ``"fgn"`` or ``"convoluted_wgn"``. FGN uses
    ``fgn``; the other two use ``std``, ``length`` and ``seed``.
    """

    kind: str
    std: float = 1.0
    length: int = 0
    seed: int = 0
    fgn: FgnParams | None = field(default=None)

    def __post_init__(self):
        if self.kind not in ("wgn", "fgn", "convoluted_wgn"):
            raise InvalidInput(f"unknown noise kind {self.kind!r}")
        if self.kind == "fgn" and self.fgn is None:
            raise InvalidInput("fgn noise needs FgnParams")


def _check_hurst(h):
    if not 0.0 < h < 1.0:
        raise InvalidHurst(f"Hurst exponent must lie in (0, 1), got {h}")


def fgn_autocovariance(h: float, sigma2: float, k) -> np.ndarray | float:
    """Autocovariance of fractional Gaussian noise at integer lag ``k``.

    ``sigma2 / 2 * (|k-1|^{2h} - 2|k|^{2h} + |k+1|^{2h})``; vectorised
    over ``k``.
    """
    _check_hurst(h)
    if not sigma2 > 0:
        raise InvalidInput(f"sigma2 must be positive, got {sigma2}")
    k = np.abs(np.asarray(k, dtype=np.float64))
    two_h = 2.0 * h
    r = 0.5 * sigma2 * (np.abs(k - 1.0) ** two_h - 2.0 * k**two_h + (k + 1.0) ** two_h)
    return float(r) if r.ndim == 0 else r


def _circulant_eigenvalues(h, sigma2, n):
    # First row [r0 .. r_{n-1}, r_n, r_{n-1} .. r1] of a 2n circulant.
    r = fgn_autocovariance(h, sigma2, np.arange(n + 1))
    row = np.concatenate([r, r[-2:0:-1]])
    return np.fft.fft(row).real


def generate_fgn(p: FgnParams, sample_rate: float = 1.0, method: str = "auto") -> Signal:
    """Exact fractional Gaussian noise by circulant embedding.

    The covariance sequence is embedded in a circulant matrix of size
    ``2 * length`` whose eigenvalues come from one FFT; a single complex
    Gaussian vector shaped by their square roots yields a sample with
    exactly the target autocovariance. If the embedding is not
    nonnegative-definite, the Cholesky factor of the Toeplitz covariance
    matrix is used instead.

    ``method`` may force ``"circulant"`` or ``"cholesky"``.
    """
    _check_hurst(p.hurst)
    n = int(p.length)
    if n < 2:
        raise LengthTooShort(f"FGN length must be at least 2, got {n}")
    if method not in ("auto", "circulant", "cholesky"):
        raise InvalidInput(f"unknown FGN method {method!r}")
    rng = make_rng(p.seed)

    if method != "cholesky":
        lam = _circulant_eigenvalues(p.hurst, p.variance, n)
        ok = lam.min() >= -_EIG_TOL * lam.max()
        if ok:
            m = lam.size
            xi = rng.standard_normal(m) + 1j * rng.standard_normal(m)
            w = np.fft.fft(np.sqrt(np.clip(lam, 0.0, None) / m) * xi)
            return Signal(w.real[:n], sample_rate)
        if method == "circulant":
            raise InvalidInput("circulant embedding is not nonnegative-definite")

    return Signal(_cholesky_fgn(p.hurst, p.variance, n, rng), sample_rate)


def _cholesky_fgn(h, sigma2, n, rng):
    from scipy.linalg import cholesky, toeplitz

    cov = toeplitz(fgn_autocovariance(h, sigma2, np.arange(n)))
    lower = cholesky(cov, lower=True)
    return lower @ rng.standard_normal(n)


def generate_wgn(std: float, length: int, sample_rate: float = 1.0, seed: int = 0) -> Signal:
    """I.i.d. zero-mean Gaussian samples with standard deviation ``std``."""
    if not (np.isfinite(std) and std > 0):
        raise InvalidStd(f"noise std must be positive, got {std}")
    length = int(length)
    if length < 1:
        raise LengthTooShort("WGN length must be at least 1")
    rng = make_rng(seed)
    return Signal(std * rng.standard_normal(length), sample_rate)


def convoluted_wgn(length: int, seed: int = 0, sample_rate: float = 1.0) -> Signal:
    """Two independent WGN draws convolved (``same`` mode), scaled to unit variance.

    The result keeps the input length. Its realization spectrum is the
    product of two independent flat-spectrum realizations, so energy is
    spread very unevenly over frequency.
    """
    length = int(length)
    if length < 2:
        raise LengthTooShort(f"convoluted WGN length must be at least 2, got {length}")
    rng = make_rng(seed)
    w1 = rng.standard_normal(length)
    w2 = rng.standard_normal(length)
    y = convolve(w1, w2, mode="same")
    return Signal(y / np.std(y), sample_rate)


def generate(spec: NoiseSpec, sample_rate: float = 1.0) -> Signal:
    if spec.kind == "fgn":
        return generate_fgn(spec.fgn, sample_rate)
    if spec.kind == "wgn":
        return generate_wgn(spec.std, spec.length, sample_rate, spec.seed)
    sig = convoluted_wgn(spec.length, spec.seed, sample_rate)
    return sig.with_samples(spec.std * sig.samples)
