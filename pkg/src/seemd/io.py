"""Signal file formats and atomic artifact writing.

Supported inputs:

* ``.wav`` - PCM16, PCM32 or float32 (first channel of multichannel files);
* ``.f64`` / ``.bin`` - headerless little-endian float64 with a
  ``<file>.json`` sidecar holding ``{"sample_rate": ...}``;
* ``.csv`` - one value per line, preceded by ``# sample_rate=<Hz>``.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np
from scipy.io import wavfile

from .errors import InvalidInput, IoError, SeemdError, UnsupportedFormat
from .signal import Signal

WAV_FORMATS = ("pcm16", "pcm32", "float32")
_PCM_SCALE = {"pcm16": 2**15, "pcm32": 2**31}


def fmt_float(v: float) -> str:
    """Shortest round-tripping text for a float, independent of locale."""
    return repr(float(v))


def atomic_write_bytes(path, data: bytes) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(f"not JSON serialisable: {type(o).__name__}")


def _clean(o):
    # JSON has no inf/nan; encode them as strings so files stay standard.
    if isinstance(o, float) and not math.isfinite(o):
        return str(o)
    if isinstance(o, dict):
        return {k: _clean(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_clean(v) for v in o]
    return o


def dumps_json(obj) -> str:
    obj = json.loads(json.dumps(obj, default=_json_default))
    return json.dumps(_clean(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_json(path, obj) -> None:
    atomic_write_text(path, dumps_json(obj))


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _kind(path: Path) -> str:
    ext = path.suffix.lower()
    if ext == ".wav":
        return "wav"
    if ext in (".f64", ".bin"):
        return "f64"
    if ext == ".csv":
        return "csv"
    raise UnsupportedFormat(f"{path}: unsupported extension {ext!r} (use .wav, .f64, .bin or .csv)")


def sidecar_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".json")


def read_signal(path) -> Signal:
    """Load a recording; the format follows the file extension."""
    path = Path(path)
    kind = _kind(path)
    if not path.is_file():
        raise IoError(f"{path}: no such file")
    try:
        if kind == "wav":
            return _read_wav(path)
        if kind == "f64":
            return _read_f64(path)
        return _read_csv(path)
    except (SeemdError, InvalidInput):
        raise
    except (OSError, ValueError) as exc:
        raise IoError(f"{path}: {exc}") from exc


def _read_wav(path: Path) -> Signal:
    fs, data = wavfile.read(path)
    if data.ndim > 1:
        data = data[:, 0]
    if data.dtype == np.int16:
        x = data.astype(np.float64) / _PCM_SCALE["pcm16"]
    elif data.dtype == np.int32:
        x = data.astype(np.float64) / _PCM_SCALE["pcm32"]
    elif data.dtype in (np.float32, np.float64):
        x = data.astype(np.float64)
    else:
        raise UnsupportedFormat(f"{path}: WAV sample type {data.dtype} not supported")
    return Signal(x, float(fs))


def _read_f64(path: Path) -> Signal:
    side = sidecar_path(path)
    if not side.is_file():
        raise IoError(f"{path}: missing sidecar {side.name} with sample_rate")
    meta = json.loads(side.read_text())
    if "sample_rate" not in meta:
        raise IoError(f"{side}: no sample_rate key")
    raw = path.read_bytes()
    if len(raw) % 8:
        raise IoError(f"{path}: size {len(raw)} is not a multiple of 8 bytes")
    return Signal(np.frombuffer(raw, dtype="<f8").astype(np.float64), float(meta["sample_rate"]))


def _read_csv(path: Path) -> Signal:
    fs = None
    values = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            s = line.strip()
            if not s:
                continue
            if s.startswith("#"):
                key, _, val = s[1:].partition("=")
                if key.strip() == "sample_rate":
                    fs = float(val)
                continue
            values.append(float(s.split(",")[0]))
    if fs is None:
        raise IoError(f"{path}: missing '# sample_rate=<Hz>' line")
    return Signal(np.array(values, dtype=np.float64), fs)


def write_signal(path, sig: Signal, wav_format: str = "float32") -> list[Path]:
    """Write ``sig``; returns every file written (data plus any sidecar).

    WAV integer formats clip to [-1, 1) before quantisation.
    """
    path = Path(path)
    kind = _kind(path)
    if kind == "f64":
        atomic_write_bytes(path, np.asarray(sig.samples, dtype="<f8").tobytes())
        side = sidecar_path(path)
        write_json(side, {"sample_rate": sig.sample_rate, "dtype": "float64-le", "length": len(sig)})
        return [path, side]
    if kind == "csv":
        lines = [f"# sample_rate={fmt_float(sig.sample_rate)}"]
        lines += ["%.17g" % v for v in sig.samples]
        atomic_write_text(path, "\n".join(lines) + "\n")
        return [path]
    if wav_format not in WAV_FORMATS:
        raise InvalidInput(f"wav_format must be one of {WAV_FORMATS}")
    fs = int(round(sig.sample_rate))
    if fs != sig.sample_rate:
        raise InvalidInput("WAV requires an integer sample rate")
    if wav_format == "float32":
        data = sig.samples.astype(np.float32)
    else:
        scale = _PCM_SCALE[wav_format]
        dtype = np.int16 if wav_format == "pcm16" else np.int32
        data = np.clip(np.round(sig.samples * scale), -scale, scale - 1).astype(dtype)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    os.close(fd)
    try:
        wavfile.write(tmp, fs, data)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)
    return [path]


def write_matrix_csv(path, header: list[str] | None, rows) -> None:
    out = []
    if header is not None:
        out.append(",".join(header))
    for row in rows:
        out.append(",".join(fmt_float(v) if isinstance(v, (float, np.floating)) else str(v) for v in row))
    atomic_write_text(path, "\n".join(out) + "\n")


def write_gnuplot_matrix(path, x: np.ndarray, y: np.ndarray, z: np.ndarray) -> None:
    """Nonuniform gnuplot matrix: first row ``N x_1 .. x_N``, then ``y_j z_j1 .. z_jN``."""
    lines = [" ".join([str(x.size)] + [fmt_float(v) for v in x])]
    for yj, row in zip(y, z):
        lines.append(" ".join([fmt_float(yj)] + [fmt_float(v) for v in row]))
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_gnuplot_columns(path, columns: list[np.ndarray], names: list[str]) -> None:
    lines = ["# " + " ".join(names)]
    for row in zip(*columns):
        lines.append(" ".join(fmt_float(v) for v in row))
    atomic_write_text(path, "\n".join(lines) + "\n")
