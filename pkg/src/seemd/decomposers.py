"""Decomposition methods sharing the :class:`~seemd.emd.Decomposition` result type.

* :func:`seemd` - single-pass noise-modified EMD (FGN addition, then
  multiplication by convoluted WGN, then one EMD run).
* :func:`eemd` - classical ensemble EMD with white noise.
* :func:`vmd` - variational mode decomposition (ADMM in the frequency
  domain).
"""

from __future__ import annotations

import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .emd import Decomposition, SiftConfig, emd
from .errors import EmptyDecomposition, InvalidInput, InvalidK, NoConvergence, ZeroVariance
from .noise import U64_MAX, FgnParams, convoluted_wgn, generate_fgn, generate_wgn
from .signal import Signal, as_array, kurtosis

MODULATIONS = ("one_plus_m", "raw_m")


def _fs_of(x, sample_rate):
    if sample_rate is not None:
        return float(sample_rate)
    return x.sample_rate if isinstance(x, Signal) else 1.0


def _std_or_raise(a: np.ndarray) -> float:
    sd = float(np.std(a))
    if not sd > 0.0:
        raise ZeroVariance("decomposition input has zero variance")
    return sd


def _sift_from(d):
    return d if isinstance(d, SiftConfig) else SiftConfig.from_dict(d)


@dataclass(frozen=True)
class SeemdConfig:
    """SEEMD parameters.

    ``fgn_amplitude`` is relative to the input's standard deviation.
    ``modulation`` chooses between multiplying by ``1 + m`` (default) and
    by the raw modulator ``m``.
    """

    hurst: float = 0.1
    fgn_amplitude: float = 0.1
    fgn_seed: int = 0
    modulator_seed: int = 1
    modulation: str = "one_plus_m"
    sift: SiftConfig = field(default_factory=SiftConfig)

    def __post_init__(self):
        if not 0.0 < self.hurst < 1.0:
            raise InvalidInput(f"hurst must lie in (0, 1), got {self.hurst}")
        if not self.fgn_amplitude >= 0.0:
            raise InvalidInput("fgn_amplitude must be >= 0")
        if self.modulation not in MODULATIONS:
            raise InvalidInput(f"modulation must be one of {MODULATIONS}")
        object.__setattr__(self, "sift", _sift_from(self.sift))

    @property
    def seeds(self) -> dict:
        return {"fgn_seed": self.fgn_seed, "modulator_seed": self.modulator_seed}

    def to_dict(self) -> dict:
        return {
            "hurst": self.hurst,
            "fgn_amplitude": self.fgn_amplitude,
            "fgn_seed": self.fgn_seed,
            "modulator_seed": self.modulator_seed,
            "modulation": self.modulation,
            "sift": self.sift.to_dict(),
        }


@dataclass(frozen=True)
class EemdConfig:
    """EEMD parameters.

    ``noise_std_ratio`` scales the added white noise by the input's
    standard deviation; zero is accepted and gives noiseless trials.
    ``workers > 1`` runs trials in a process pool; the result is the same
    as sequential execution.
    """

    ensemble_size: int = 100
    noise_std_ratio: float = 0.2
    base_seed: int = 0
    workers: int = 1
    sift: SiftConfig = field(default_factory=SiftConfig)

    def __post_init__(self):
        if self.ensemble_size < 1:
            raise InvalidInput("ensemble_size must be >= 1")
        if not self.noise_std_ratio >= 0.0:
            raise InvalidInput("noise_std_ratio must be >= 0")
        if self.workers < 1:
            raise InvalidInput("workers must be >= 1")
        object.__setattr__(self, "sift", _sift_from(self.sift))

    @property
    def seeds(self) -> dict:
        return {"base_seed": self.base_seed}

    def to_dict(self) -> dict:
        return {
            "ensemble_size": self.ensemble_size,
            "noise_std_ratio": self.noise_std_ratio,
            "base_seed": self.base_seed,
            "workers": self.workers,
            "sift": self.sift.to_dict(),
        }


@dataclass(frozen=True)
class VmdConfig:
    num_modes: int = 4
    alpha: float = 2000.0
    tau: float = 0.0
    tol: float = 1e-7
    max_iters: int = 500
    init: str = "uniform"

    def __post_init__(self):
        if int(self.num_modes) < 1:
            raise InvalidK(f"num_modes must be >= 1, got {self.num_modes}")
        if not self.alpha > 0:
            raise InvalidInput("alpha must be positive")
        if not self.tau >= 0:
            raise InvalidInput("tau must be >= 0")
        if not self.tol > 0:
            raise InvalidInput("tol must be positive")
        if self.max_iters < 1:
            raise InvalidInput("max_iters must be >= 1")
        if self.init not in ("zero", "uniform"):
            raise InvalidInput(f"init must be 'zero' or 'uniform', got {self.init!r}")

    @property
    def seeds(self) -> dict:
        return {}

    def to_dict(self) -> dict:
        return {
            "num_modes": self.num_modes,
            "alpha": self.alpha,
            "tau": self.tau,
            "tol": self.tol,
            "max_iters": self.max_iters,
            "init": self.init,
        }


def seemd(x, cfg: SeemdConfig | None = None, sample_rate: float | None = None,
          modulator=None) -> Decomposition:
    """Single ensemble EMD.

    The input is first perturbed with fractional Gaussian noise
    (``x1 = x + fgn_amplitude * std(x) * FGN``), then multiplied sample by
    sample with a unit-variance convoluted-WGN modulator ``m``
    (``x2 = x1 * (1 + m)``), and ``x2`` is decomposed by exactly one EMD
    run. No ensemble averaging takes place.

    ``modulator`` overrides ``m`` (same length as ``x``); passing zeros
    together with ``fgn_amplitude=0`` reduces SEEMD to plain EMD.
    """
    cfg = cfg or SeemdConfig()
    fs = _fs_of(x, sample_rate)
    a = as_array(x)
    n = a.size
    scale = cfg.fgn_amplitude * _std_or_raise(a)

    fgn = generate_fgn(FgnParams(cfg.hurst, 1.0, n, cfg.fgn_seed)).samples
    x1 = a + scale * fgn
    if modulator is None:
        m = convoluted_wgn(n, cfg.modulator_seed).samples
    else:
        m = as_array(modulator)
        if m.size != n:
            raise InvalidInput("modulator length must match the signal")
    x2 = x1 * (1.0 + m) if cfg.modulation == "one_plus_m" else x1 * m

    d = emd(x2, cfg.sift, fs)
    d.method = "seemd"
    d.meta["config"] = cfg.to_dict()
    return d


def _eemd_trial(args):
    a, std, ratio, seed, sift = args
    if ratio > 0:
        noisy = a + ratio * std * generate_wgn(1.0, a.size, 1.0, seed).samples
    else:
        noisy = a
    return emd(noisy, sift)


def eemd(x, cfg: EemdConfig | None = None, sample_rate: float | None = None) -> Decomposition:
    """Ensemble EMD: average same-order IMFs over noisy EMD trials.

    Trial ``t`` decomposes ``x + noise_std_ratio * std(x) * WGN`` with seed
    ``base_seed + t``. Trials with fewer IMFs are zero-padded. Trials are
    accumulated in index order, so parallel and sequential runs agree
    bit for bit. The residue is ``x`` minus the averaged IMFs.
    """
    cfg = cfg or EemdConfig()
    fs = _fs_of(x, sample_rate)
    a = as_array(x)
    std = _std_or_raise(a)
    jobs = (
        (a, std, cfg.noise_std_ratio, (cfg.base_seed + t) & U64_MAX, cfg.sift)
        for t in range(cfg.ensemble_size)
    )

    total = np.zeros((0, a.size))
    sift_calls = sift_iterations = 0

    def accumulate(trial: Decomposition):
        nonlocal total, sift_calls, sift_iterations
        k = trial.n_imfs
        if k > total.shape[0]:
            total = np.vstack([total, np.zeros((k - total.shape[0], a.size))])
        total[:k] += trial.imfs
        sift_calls += trial.meta["sift_calls"]
        sift_iterations += trial.meta["sift_iterations"]

    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            for trial in pool.map(_eemd_trial, jobs):
                accumulate(trial)
    else:
        for job in jobs:
            accumulate(_eemd_trial(job))

    imfs = total / cfg.ensemble_size
    residue = a.copy()
    for imf in imfs:
        residue = residue - imf
    meta = {
        "emd_calls": cfg.ensemble_size,
        "sift_calls": sift_calls,
        "sift_iterations": sift_iterations,
        "config": cfg.to_dict(),
    }
    return Decomposition(imfs, residue, "eemd", a.copy(), fs, meta)


def vmd(x, cfg: VmdConfig | None = None, sample_rate: float | None = None) -> Decomposition:
    """Variational mode decomposition.

    The signal is mirror-extended to twice its length and each mode's
    analytic spectrum is updated by the Wiener-filter step

        u_k = (f - sum_{i != k} u_i + lambda / 2) / (1 + 2 alpha (w - w_k)^2)

    followed by moving ``w_k`` to the power-weighted centroid of ``u_k``
    and a dual-ascent step of size ``tau`` on ``lambda``. Iteration stops
    when ``sum_k |u_k' - u_k|^2 / |u_k|^2 < tol``. If ``max_iters`` is hit
    first a :class:`NoConvergence` warning is emitted and the partial
    result is returned with ``meta["converged"] = False``.

    Modes are returned in ascending order of centre frequency, with
    ``meta["center_freqs"]`` in Hz.
    """
    cfg = cfg or VmdConfig()
    fs = _fs_of(x, sample_rate)
    a = as_array(x)
    n = a.size
    if n < 4:
        raise InvalidInput("VMD needs at least 4 samples")
    K = int(cfg.num_modes)
    if K < 1:
        raise InvalidK(f"num_modes must be >= 1, got {K}")

    h1 = n // 2
    mirrored = np.concatenate([a[:h1][::-1], a, a[h1:][::-1]])
    T = mirrored.size
    half = T // 2
    freqs = np.arange(T) / T - 0.5
    f_hat = np.fft.fftshift(np.fft.fft(mirrored))
    f_plus = f_hat.copy()
    f_plus[:half] = 0.0
    pos = freqs[half:]

    if cfg.init == "uniform":
        omega = 0.25 * (np.arange(K) + 0.5) / K
    else:
        omega = np.zeros(K)
    u = np.zeros((K, T), dtype=complex)
    lam = np.zeros(T, dtype=complex)
    total = np.zeros(T, dtype=complex)

    converged = False
    it = 0
    while it < cfg.max_iters:
        u_prev = u.copy()
        for k in range(K):
            total -= u[k]
            u[k] = (f_plus - total + lam / 2.0) / (1.0 + 2.0 * cfg.alpha * (freqs - omega[k]) ** 2)
            total += u[k]
            power = np.abs(u[k, half:]) ** 2
            p_sum = power.sum()
            if p_sum > 0:
                omega[k] = float(np.dot(pos, power) / p_sum)
        lam = lam + cfg.tau * (f_plus - total)
        it += 1

        diff = np.sum(np.abs(u - u_prev) ** 2, axis=1)
        ref = np.sum(np.abs(u_prev) ** 2, axis=1)
        if np.all(ref > 0) and float(np.sum(diff / ref)) < cfg.tol:
            converged = True
            break
        # Keep the running sum from drifting away from the modes.
        total = u.sum(axis=0)

    if not converged:
        warnings.warn(NoConvergence(f"VMD did not converge in {cfg.max_iters} iterations"),
                      stacklevel=2)

    full = np.zeros((K, T), dtype=complex)
    full[:, half:] = u[:, half:]
    full[:, half - np.arange(1, half)] = np.conj(u[:, half + 1:])
    full[:, half] = full[:, half].real
    modes_ext = np.real(np.fft.ifft(np.fft.ifftshift(full, axes=1), axis=1))
    modes = modes_ext[:, h1:h1 + n]

    order = np.argsort(omega, kind="stable")
    modes = modes[order]
    omega = omega[order]
    residue = a - modes.sum(axis=0)
    meta = {
        "emd_calls": 0,
        "sift_calls": 0,
        "num_modes": K,
        "center_freqs": [float(w * fs) for w in omega],
        "converged": converged,
        "iterations": it,
        "config": cfg.to_dict(),
    }
    return Decomposition(modes, residue, "vmd", a.copy(), fs, meta)


def select_informative_imf(d: Decomposition) -> tuple[int, float]:
    """Index and kurtosis of the most impulsive IMF.

    Ties go to the lower index; the residue is never considered and
    zero-variance components are skipped.
    """
    if d.n_imfs == 0:
        raise EmptyDecomposition("decomposition has no IMFs")
    best, score = -1, -np.inf
    for i, c in enumerate(d.imfs):
        if c.size < 4 or not np.std(c) > 0:
            continue
        k = kurtosis(c)
        if k > score:
            best, score = i, k
    if best < 0:
        raise EmptyDecomposition("no IMF with nonzero variance")
    return best, float(score)


METHODS = {
    "emd": (SiftConfig, emd),
    "seemd": (SeemdConfig, seemd),
    "eemd": (EemdConfig, eemd),
    "vmd": (VmdConfig, vmd),
}


def make_config(method: str, params: dict | None = None):
    """Build the config object for ``method`` from a plain dict."""
    if method not in METHODS:
        raise InvalidInput(f"unknown method {method!r}; choose from {sorted(METHODS)}")
    cls, _ = METHODS[method]
    params = dict(params or {})
    try:
        if method != "emd" and "sift" in params:
            params["sift"] = SiftConfig.from_dict(params["sift"])
        return cls(**params)
    except TypeError as exc:
        raise InvalidInput(f"bad {method} parameters: {exc}") from None


def decompose(x, method: str, cfg=None, sample_rate: float | None = None) -> Decomposition:
    """Dispatch to one of ``emd``, ``seemd``, ``eemd`` or ``vmd``."""
    if method not in METHODS:
        raise InvalidInput(f"unknown method {method!r}")
    cls, fn = METHODS[method]
    if cfg is None or isinstance(cfg, dict):
        cfg = make_config(method, cfg)
    return fn(x, cfg, sample_rate)


def config_seeds(cfg) -> dict:
    return dict(getattr(cfg, "seeds", {}) or {})


def with_seed_offset(cfg, offset: int):
    """Copy of ``cfg`` with every seed shifted by ``offset``."""
    if isinstance(cfg, SeemdConfig):
        return replace(cfg, fgn_seed=cfg.fgn_seed + offset,
                       modulator_seed=cfg.modulator_seed + offset)
    if isinstance(cfg, EemdConfig):
        return replace(cfg, base_seed=cfg.base_seed + offset)
    return cfg
