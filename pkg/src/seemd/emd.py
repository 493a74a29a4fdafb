"""Sifting machinery: extrema, spline envelopes, IMF extraction and plain EMD."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import InsufficientExtrema, InvalidInput, TooShort
from .signal import Signal, SummaryStats, as_array, summary_stats


@dataclass(frozen=True)
class SiftConfig:
    """Stopping rules for sifting.

    ``max_imfs=None`` resolves to ``floor(log2(N))`` for an N-sample input.
    With ``imf_condition`` set, a sift is only accepted once every maximum
    is positive and every minimum negative, so extrema and zero crossings
    alternate.
    """

    sd_threshold: float = 0.2
    max_sift_iters: int = 100
    max_imfs: int | None = None
    boundary: str = "mirror"
    imf_condition: bool = True

    def __post_init__(self):
        if not 0.0 < self.sd_threshold <= 1.0:
            raise InvalidInput(f"sd_threshold must lie in (0, 1], got {self.sd_threshold}")
        if self.max_sift_iters < 1:
            raise InvalidInput("max_sift_iters must be >= 1")
        if self.max_imfs is not None and self.max_imfs < 1:
            raise InvalidInput("max_imfs must be >= 1")
        if self.boundary != "mirror":
            raise InvalidInput(f"unsupported boundary mode {self.boundary!r}")

    def imf_limit(self, n: int) -> int:
        if self.max_imfs is not None:
            return self.max_imfs
        return max(1, int(math.floor(math.log2(n))))

    def to_dict(self) -> dict:
        return {
            "sd_threshold": self.sd_threshold,
            "max_sift_iters": self.max_sift_iters,
            "max_imfs": self.max_imfs,
            "boundary": self.boundary,
            "imf_condition": self.imf_condition,
        }

    @classmethod
    def from_dict(cls, d: dict | None) -> "SiftConfig":
        return cls(**(d or {}))


@dataclass(eq=False)
class Decomposition:
    """IMFs (or modes) plus residue of one decomposed signal.

    ``signal`` is the sequence that was actually decomposed. For SEEMD
    this is the noise-modified signal, not the raw input.
    """

    imfs: np.ndarray
    residue: np.ndarray
    method: str
    signal: np.ndarray
    sample_rate: float = 1.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.imfs = np.asarray(self.imfs, dtype=np.float64).reshape(-1, self.residue.size)
        if self.signal.size != self.residue.size:
            raise InvalidInput("signal and residue lengths differ")
        self.meta.setdefault("stats", [summary_stats(c) for c in self.imfs])

    @property
    def n_imfs(self) -> int:
        return self.imfs.shape[0]

    @property
    def stats(self) -> list[SummaryStats]:
        return self.meta["stats"]

    def reconstruct(self) -> np.ndarray:
        return self.imfs.sum(axis=0) + self.residue

    def reconstruction_error(self) -> float:
        """Relative L2 error of sum(IMFs) + residue against ``signal``."""
        ref = np.linalg.norm(self.signal)
        err = np.linalg.norm(self.signal - self.reconstruct())
        return float(err / ref) if ref > 0 else float(err)


class SiftResult(NamedTuple):
    imf: np.ndarray
    residue: np.ndarray
    converged: bool
    iterations: int


def _extrema_indices(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    d = np.diff(x)
    nz = np.flatnonzero(d)
    if nz.size < 2:
        empty = np.empty(0, dtype=np.intp)
        return empty, empty
    s = np.sign(d[nz])
    turn = np.flatnonzero(s[:-1] != s[1:])
    # A run of equal samples spans nz[j]+1 .. nz[j+1]; take its floor centre.
    centre = (nz[turn] + 1 + nz[turn + 1]) // 2
    is_max = s[turn] > 0
    return centre[is_max], centre[~is_max]


def find_extrema(x) -> tuple[list[tuple[int, float]], list[tuple[int, float]]]:
    """Local maxima and minima by three-point comparison.

    A plateau of equal samples counts once, at its centre index (floor
    for even-length plateaus). Plateaus touching either end are ignored.
    """
    a = as_array(x)
    if a.size < 3:
        raise TooShort(f"find_extrema needs at least 3 samples, got {a.size}")
    imax, imin = _extrema_indices(a)
    return (
        [(int(i), float(a[i])) for i in imax],
        [(int(i), float(a[i])) for i in imin],
    )


def _mirror_knots(idx: np.ndarray, val: np.ndarray, length: int, n_mirror: int = 2):
    left = idx[:n_mirror]
    keep = left > 0
    li, lv = -left[keep][::-1], val[:n_mirror][keep][::-1]
    right = idx[-n_mirror:]
    keep = right < length - 1
    ri, rv = 2 * (length - 1) - right[keep][::-1], val[-n_mirror:][keep][::-1]
    return np.concatenate([li, idx, ri]), np.concatenate([lv, val, rv])


def spline_envelope(points, length: int, boundary: str = "mirror") -> np.ndarray:
    """Natural cubic spline through extrema, evaluated on ``0 .. length-1``.

    The two outermost points on each side are reflected across the
    signal edge before fitting so the spline does not swing freely at
    the ends.
    """
    if boundary != "mirror":
        raise InvalidInput(f"unsupported boundary mode {boundary!r}")
    if isinstance(points, tuple) and len(points) == 2 and isinstance(points[0], np.ndarray):
        idx, val = points
    else:
        pts = list(points)
        idx = np.array([p[0] for p in pts], dtype=np.intp)
        val = np.array([p[1] for p in pts], dtype=np.float64)
    if idx.size < 2:
        raise InsufficientExtrema(f"need at least 2 extrema for an envelope, got {idx.size}")
    ki, kv = _mirror_knots(idx, val, length)
    return _fit_spline(ki, kv, length)


def count_zero_crossings(x: np.ndarray) -> int:
    return int(np.count_nonzero(np.signbit(x[:-1]) != np.signbit(x[1:])))


def _alternates(h: np.ndarray, imax: np.ndarray, imin: np.ndarray) -> bool:
    # Positive maxima and negative minima force extrema and zero crossings
    # to alternate, so their counts differ by at most one on any window.
    return bool(np.all(h[imax] > 0) and np.all(h[imin] < 0))


def _fit_spline(knots: np.ndarray, values: np.ndarray, length: int) -> np.ndarray:
    spline = CubicSpline(knots.astype(np.float64), values, bc_type="natural")
    return spline(np.arange(length, dtype=np.float64))


def _side_knots(x, imax, imin, nbsym, edge):
    """Mirrored extrema beyond one edge of ``x``.

    The symmetry axis is the outermost extremum when the edge sample lies
    inside the envelope, otherwise the edge sample itself, which then also
    becomes a knot. Returns (max positions, min positions) as float arrays
    of mirrored sample positions; values are looked up by the caller.
    """
    first_max = imax[0] < imin[0]
    if first_max:
        if x[edge] > x[imin[0]]:
            lmax, lmin, sym = imax[1:nbsym + 1], imin[:nbsym], imax[0]
        else:
            lmax, lmin, sym = imax[:nbsym], np.append(imin[:nbsym - 1], edge), edge
    else:
        if x[edge] < x[imax[0]]:
            lmax, lmin, sym = imax[:nbsym], imin[1:nbsym + 1], imin[0]
        else:
            lmax, lmin, sym = np.append(imax[:nbsym - 1], edge), imin[:nbsym], edge
    pmax, pmin = 2 * sym - lmax, 2 * sym - lmin
    # Mirrored points must land strictly outside the signal; otherwise
    # fall back to mirroring about the edge sample.
    if (pmax.size and pmax.max() > edge) or (pmin.size and pmin.max() > edge):
        if sym == edge:
            return pmax, pmin, lmax, lmin
        if sym == imax[0]:
            lmax = imax[:nbsym]
        else:
            lmin = imin[:nbsym]
        sym = edge
        pmax, pmin = 2 * sym - lmax, 2 * sym - lmin
    return pmax, pmin, lmax, lmin


def _envelope_mean(h: np.ndarray, imax: np.ndarray, imin: np.ndarray, nbsym: int = 2) -> np.ndarray:
    if imax.size < 2 or imin.size < 2:
        raise InsufficientExtrema(f"{imax.size} maxima, {imin.size} minima")
    n = h.size
    # Left edge works in native coordinates; the right edge is handled by
    # running the same rule on the reversed index axis.
    lpmax, lpmin, lmax, lmin = _side_knots(h, imax, imin, nbsym, 0)
    rev = n - 1
    rpmax, rpmin, rmax, rmin = _side_knots(h[::-1], rev - imax[::-1], rev - imin[::-1], nbsym, 0)
    rmax, rmin = rev - rmax, rev - rmin
    rpmax, rpmin = rev - rpmax, rev - rpmin

    tmax = np.concatenate([lpmax[::-1], imax, rpmax])
    zmax = np.concatenate([h[lmax][::-1], h[imax], h[rmax]])
    tmin = np.concatenate([lpmin[::-1], imin, rpmin])
    zmin = np.concatenate([h[lmin][::-1], h[imin], h[rmin]])
    tmax, zmax = _unique_knots(tmax, zmax)
    tmin, zmin = _unique_knots(tmin, zmin)
    upper = _fit_spline(tmax, zmax, n)
    lower = _fit_spline(tmin, zmin, n)
    return 0.5 * (upper + lower)


def _unique_knots(t, z):
    order = np.argsort(t, kind="stable")
    t, z = t[order], z[order]
    keep = np.concatenate([[True], np.diff(t) > 0])
    return t[keep], z[keep]


def sift_one_imf(x, cfg: SiftConfig | None = None) -> SiftResult:
    """Extract one IMF by repeated removal of the envelope mean.

    Iteration stops once ``sum((h_prev - h)**2) / sum(h_prev**2)`` drops
    below ``cfg.sd_threshold`` (and, if ``cfg.imf_condition``, maxima are
    all positive and minima all negative) or after
    ``cfg.max_sift_iters`` passes.

    Raises
    ------
    InsufficientExtrema
        ``x`` itself has too few extrema; it should be treated as the
        residue.
    """
    cfg = cfg or SiftConfig()
    x = as_array(x)
    if x.size < 3:
        raise TooShort(f"sifting needs at least 3 samples, got {x.size}")

    h = x.copy()
    imax, imin = _extrema_indices(h)
    mean_env = _envelope_mean(h, imax, imin)
    converged = False
    it = 0
    while True:
        h_next = h - mean_env
        it += 1
        denom = float(np.dot(h, h))
        sd = float(np.dot(mean_env, mean_env)) / denom if denom > 0 else 0.0
        h = h_next
        imax, imin = _extrema_indices(h)
        if sd < cfg.sd_threshold:
            if not cfg.imf_condition:
                converged = True
                break
            if _alternates(h, imax, imin):
                converged = True
                break
        if it >= cfg.max_sift_iters:
            break
        try:
            mean_env = _envelope_mean(h, imax, imin)
        except InsufficientExtrema:
            break
    return SiftResult(h, x - h, converged, it)


def _is_monotone(x: np.ndarray) -> bool:
    d = np.diff(x)
    return bool(np.all(d >= 0) or np.all(d <= 0))


def emd(x, cfg: SiftConfig | None = None, sample_rate: float | None = None) -> Decomposition:
    """Empirical mode decomposition.

    IMFs are peeled off successive residues until the residue is
    monotone, has too few extrema, or ``cfg.max_imfs`` is reached. The
    residue is the running remainder, so ``sum(imfs) + residue``
    reproduces ``x`` up to round-off.
    """
    cfg = cfg or SiftConfig()
    if sample_rate is None:
        sample_rate = x.sample_rate if isinstance(x, Signal) else 1.0
    a = as_array(x)
    if a.size < 3:
        raise TooShort(f"EMD needs at least 3 samples, got {a.size}")

    limit = cfg.imf_limit(a.size)
    residue = a.copy()
    imfs, converged, iterations = [], [], []
    sift_calls = 0
    while len(imfs) < limit and not _is_monotone(residue):
        sift_calls += 1
        try:
            res = sift_one_imf(residue, cfg)
        except InsufficientExtrema:
            break
        imfs.append(res.imf)
        converged.append(res.converged)
        iterations.append(res.iterations)
        residue = residue - res.imf

    meta = {
        "emd_calls": 1,
        "sift_calls": sift_calls,
        "sift_iterations": int(sum(iterations)),
        "converged": converged,
        "sift": cfg.to_dict(),
    }
    stacked = np.array(imfs) if imfs else np.empty((0, a.size))
    return Decomposition(stacked, residue, "emd", a.copy(), float(sample_rate), meta)
