"""Command-line front end.

Subcommands: ``simulate``, ``decompose``, ``analyze``, ``compare`` and
``replay``. Every run writes ``manifest.json`` next to its artifacts; the
manifest holds the merged configuration, all seeds, the input digest,
per-stage timings and the SHA-256 of every artifact, which is what
``replay`` checks.

Configuration is a single JSON document (``--config``) overridden by
``--set key=value`` flags; dotted keys reach nested tables
(``--set sift.sd_threshold=0.3``). Values are parsed as JSON when
possible and kept as strings otherwise.

Exit codes: 0 success, 1 method error, 2 I/O or configuration error.
Verbosity is read from ``SEEMD_VERBOSITY`` (``quiet``, ``info``,
``debug`` or 0/1/2).
"""

from __future__ import annotations

import argparse
import copy
import json
import logging
import os
import shutil
import sys
import tempfile
import time
from pathlib import Path

from . import __version__
from .analysis import envelope_spectrum, envsi, spectrogram
from .decomposers import METHODS, decompose, make_config, select_informative_imf
from .errors import (
    ConfigInvalid,
    ConfigParse,
    IoError,
    MissingFaultFreq,
    SeemdError,
    UnsupportedFormat,
)
from .io import (
    fmt_float,
    read_signal,
    sha256_file,
    write_gnuplot_columns,
    write_gnuplot_matrix,
    write_json,
    write_matrix_csv,
    write_signal,
)
from .signal import KURTOSIS_FORMULA, Signal, kurtosis, summary_stats
from .simulator import SimConfig, simulate_bearing

log = logging.getLogger("seemd")

EXIT_OK, EXIT_METHOD, EXIT_IO = 0, 1, 2
ANALYSIS_OPS = ("spectrogram", "envelope", "envsi", "kurtosis")
ANALYSIS_DEFAULTS = {
    "window_len": 256,
    "hop": 64,
    "window": "hann",
    "m1": 3,
    "m2": None,
    "band_halfwidth": None,
    "squared_ais": False,
}
MANIFEST = "manifest.json"
TIMINGS = "timings.json"


# ---------------------------------------------------------------- config


def parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(doc: dict, overrides: list[str]) -> dict:
    doc = copy.deepcopy(doc)
    for item in overrides or []:
        key, sep, val = item.partition("=")
        if not sep or not key:
            raise ConfigParse(f"--set expects key=value, got {item!r}")
        parts = key.split(".")
        node = doc
        for p in parts[:-1]:
            nxt = node.setdefault(p, {})
            if not isinstance(nxt, dict):
                raise ConfigParse(f"--set {key}: {p!r} is not a table")
            node = nxt
        node[parts[-1]] = parse_value(val)
    return doc


def load_config(path, overrides) -> dict:
    doc = {}
    if path:
        try:
            doc = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise IoError(f"{path}: {exc.strerror or exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigParse(f"{path}: {exc}") from exc
        if not isinstance(doc, dict):
            raise ConfigParse(f"{path}: top level must be a JSON object")
    return apply_overrides(doc, overrides)


def _method_config(method: str, params: dict):
    try:
        return make_config(method, params)
    except SeemdError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigInvalid(f"{method}: {exc}") from exc


def _method_snapshot(cfg) -> dict:
    return cfg.to_dict()


def _seeds_of(cfg) -> dict:
    return dict(getattr(cfg, "seeds", {}) or {})


# ---------------------------------------------------------------- run context


class Run:
    """Collects artifacts and timings for one subcommand invocation."""

    def __init__(self, out_dir: Path):
        self.out = Path(out_dir)
        self.out.mkdir(parents=True, exist_ok=True)
        self.artifacts: list[Path] = []
        self.timings: dict[str, float] = {}

    def add(self, *paths):
        for p in paths:
            p = Path(p)
            if p not in self.artifacts:
                self.artifacts.append(p)

    def path(self, name: str) -> Path:
        return self.out / name

    def timed(self, stage: str, fn, *a, **kw):
        t0 = time.perf_counter()
        result = fn(*a, **kw)
        self.timings[stage] = round((time.perf_counter() - t0) * 1000.0, 3)
        return result

    def finish(self, command: str, args: dict, config: dict, seeds: dict,
               input_digest: str | None, extra: dict | None = None) -> dict:
        manifest = {
            "command": command,
            "args": args,
            "config_snapshot": config,
            "seeds": seeds,
            "input_digest": input_digest,
            "tool_version": __version__,
            "timings": self.timings,
            "artifacts": {p.relative_to(self.out).as_posix(): sha256_file(p)
                          for p in sorted(self.artifacts)},
        }
        if extra:
            manifest.update(extra)
        write_json(self.path(MANIFEST), manifest)
        return manifest


def _read_input(path: str):
    sig = read_signal(path)
    return sig, sha256_file(path)


def _plot_dir(run: Run) -> Path:
    d = run.path("plot")
    d.mkdir(exist_ok=True)
    return d


# ---------------------------------------------------------------- simulate


def run_simulate(args: dict, config: dict) -> tuple[Run, dict]:
    run = Run(args["out"])
    try:
        cfg = SimConfig.from_dict(config)
    except (TypeError, ValueError) as exc:
        raise ConfigInvalid(str(exc)) from exc
    sig, truth = run.timed("simulate", simulate_bearing, cfg)
    name = f"{args['name']}.{args['format']}"
    run.add(*write_signal(run.path(name), sig))
    truth_path = run.path(f"{args['name']}.truth.json")
    write_json(truth_path, truth)
    run.add(truth_path)
    if args.get("emit_plot_data"):
        p = _plot_dir(run) / f"{args['name']}.dat"
        write_gnuplot_columns(p, [sig.times, sig.samples], ["time_s", "amplitude"])
        run.add(p)
    manifest = run.finish("simulate", args, cfg.to_dict(), {"seed": cfg.seed}, None)
    log.info("simulated %d samples at %s Hz -> %s", len(sig), fmt_float(sig.sample_rate), run.path(name))
    return run, manifest


# ---------------------------------------------------------------- decompose


def _stats_rows(sig: Signal, d) -> list[dict]:
    rows = []
    raw = summary_stats(sig)
    rows.append({"component": "raw", **raw.to_dict()})
    for i, c in enumerate(d.imfs):
        rows.append({"component": f"imf_{i:02d}", **summary_stats(c).to_dict()})
    rows.append({"component": "residue", **summary_stats(d.residue).to_dict()})
    return rows


def _write_stats(run: Run, rows: list[dict], selected: int | None, selected_kurt: float | None):
    cols = ["component", "mean", "variance", "kurtosis", "peak_to_peak"]
    table = [[r[c] if r[c] is not None else "" for c in cols] for r in rows]
    write_matrix_csv(run.path("stats.csv"), cols, table)
    write_json(run.path("stats.json"), {
        "kurtosis_formula": KURTOSIS_FORMULA,
        "rows": rows,
        "selected_imf": selected,
        "selected_kurtosis": selected_kurt,
    })
    run.add(run.path("stats.csv"), run.path("stats.json"))


def run_decompose(args: dict, config: dict) -> tuple[Run, dict]:
    method = args["method"]
    if method not in METHODS:
        raise ConfigInvalid(f"unknown method {method!r}; choose from {sorted(METHODS)}")
    cfg = _method_config(method, config)
    sig, digest = _read_input(args["input"])
    run = Run(args["out"])
    d = run.timed("decompose", decompose, sig, method, cfg)
    fmt = args["format"]

    for i, c in enumerate(d.imfs):
        run.add(*write_signal(run.path(f"imf_{i:02d}.{fmt}"), Signal(c, sig.sample_rate)))
    run.add(*write_signal(run.path(f"residue.{fmt}"), Signal(d.residue, sig.sample_rate)))
    if method == "seemd":
        # The sequence actually decomposed, so sum(IMFs) + residue can be checked.
        run.add(*write_signal(run.path(f"modified_signal.{fmt}"), Signal(d.signal, sig.sample_rate)))

    selected = sel_k = None
    if d.n_imfs:
        try:
            selected, sel_k = select_informative_imf(d)
        except SeemdError:
            pass
    _write_stats(run, _stats_rows(sig, d), selected, sel_k)

    summary = {
        "method": method,
        "n_imfs": d.n_imfs,
        "selected_imf": selected,
        "selected_kurtosis": sel_k,
        "raw_kurtosis": summary_stats(sig).kurtosis,
        "reconstruction_error": d.reconstruction_error(),
        "meta": {k: v for k, v in d.meta.items() if k not in ("stats", "config")},
    }
    write_json(run.path("decomposition.json"), summary)
    run.add(run.path("decomposition.json"))

    if args.get("emit_plot_data"):
        p = _plot_dir(run) / "components.dat"
        cols = [sig.times] + list(d.imfs) + [d.residue]
        names = ["time_s"] + [f"imf_{i:02d}" for i in range(d.n_imfs)] + ["residue"]
        write_gnuplot_columns(p, cols, names)
        run.add(p)

    counters = {k: d.meta.get(k) for k in ("emd_calls", "sift_calls", "sift_iterations")}
    manifest = run.finish("decompose", args, {"method": method, method: _method_snapshot(cfg)},
                          _seeds_of(cfg), digest, {"counters": counters})
    log.info("%s: %d components, emd_calls=%s sift_calls=%s", method, d.n_imfs,
             counters["emd_calls"], counters["sift_calls"])
    return run, manifest


# ---------------------------------------------------------------- analyze


def _analysis_params(config: dict) -> dict:
    params = dict(ANALYSIS_DEFAULTS)
    unknown = set(config) - set(params) - {"fault_freq", "ops"}
    if unknown:
        raise ConfigInvalid(f"unknown analysis parameters: {sorted(unknown)}")
    params.update({k: v for k, v in config.items() if k in params})
    return params


def _envsi_report(sig, fault_freq, params):
    es = envelope_spectrum(sig)
    rep = envsi(es, fault_freq, m1=params["m1"], m2=params["m2"],
                band_halfwidth=params["band_halfwidth"], squared_ais=params["squared_ais"])
    return es, rep


def run_analyze(args: dict, config: dict) -> tuple[Run, dict]:
    ops = args.get("ops") or config.get("ops") or list(ANALYSIS_OPS)
    if isinstance(ops, str):
        ops = [o.strip() for o in ops.split(",") if o.strip()]
    bad = [o for o in ops if o not in ANALYSIS_OPS]
    if bad:
        raise ConfigInvalid(f"unknown analysis ops {bad}; choose from {list(ANALYSIS_OPS)}")
    fault_freq = args.get("fault_freq")
    if fault_freq is None:
        fault_freq = config.get("fault_freq")
    if "envsi" in ops and fault_freq is None:
        raise MissingFaultFreq("the envsi op needs --fault-freq")
    params = _analysis_params(config)
    sig, digest = _read_input(args["input"])
    run = Run(args["out"])
    plot = args.get("emit_plot_data")

    if "spectrogram" in ops:
        sp = run.timed("spectrogram", spectrogram, sig, params["window_len"], params["hop"], params["window"])
        header = ["freq_hz\\time_s"] + [fmt_float(t) for t in sp.times]
        rows = [[f] + list(row) for f, row in zip(sp.freqs, sp.magnitudes)]
        write_matrix_csv(run.path("spectrogram.csv"), header, rows)
        run.add(run.path("spectrogram.csv"))
        if plot:
            p = _plot_dir(run) / "spectrogram.dat"
            write_gnuplot_matrix(p, sp.times, sp.freqs, sp.magnitudes)
            run.add(p)

    es = None
    if "envelope" in ops:
        es = run.timed("envelope", envelope_spectrum, sig)
        write_matrix_csv(run.path("envelope_spectrum.csv"), ["freq_hz", "amplitude"],
                         zip(es.freqs, es.amplitudes))
        write_json(run.path("envelope_spectrum.json"), {
            "resolution_hz": es.resolution,
            "peak_frequency_hz": es.peak_frequency(0.0),
            "freqs": es.freqs,
            "amplitudes": es.amplitudes,
        })
        run.add(run.path("envelope_spectrum.csv"), run.path("envelope_spectrum.json"))
        if plot:
            p = _plot_dir(run) / "envelope_spectrum.dat"
            write_gnuplot_columns(p, [es.freqs, es.amplitudes], ["freq_hz", "amplitude"])
            run.add(p)

    if "envsi" in ops:
        es2, rep = run.timed("envsi", _envsi_report, sig, float(fault_freq), params)
        out = rep.to_dict()
        out["harmonic_freqs"] = [float(es2.freqs[b]) for b in rep.harmonic_bins]
        out["resolution_hz"] = es2.resolution
        write_json(run.path("envsi.json"), out)
        run.add(run.path("envsi.json"))

    if "kurtosis" in ops:
        st = summary_stats(sig)
        write_json(run.path("kurtosis.json"), {
            "kurtosis": st.kurtosis,
            "formula": KURTOSIS_FORMULA,
            "summary": st.to_dict(),
            "length": len(sig),
            "sample_rate": sig.sample_rate,
        })
        run.add(run.path("kurtosis.json"))

    snapshot = dict(params)
    snapshot["ops"] = list(ops)
    snapshot["fault_freq"] = None if fault_freq is None else float(fault_freq)
    manifest = run.finish("analyze", args, snapshot, {}, digest)
    return run, manifest


# ---------------------------------------------------------------- compare


def run_compare(args: dict, config: dict) -> tuple[Run, dict]:
    methods = args.get("methods") or config.get("methods")
    if isinstance(methods, str):
        methods = [m.strip() for m in methods.split(",") if m.strip()]
    methods = list(methods or [])
    if len(methods) < 2:
        raise ConfigInvalid("compare needs at least two methods")
    for m in methods:
        if m not in METHODS:
            raise ConfigInvalid(f"unknown method {m!r}; choose from {sorted(METHODS)}")
    fault_freq = args.get("fault_freq")
    if fault_freq is None:
        fault_freq = config.get("fault_freq")
    if fault_freq is None:
        raise MissingFaultFreq("compare needs --fault-freq")
    fault_freq = float(fault_freq)
    params = _analysis_params(config.get("analysis", {}))
    extra = set(config) - set(METHODS) - {"analysis", "methods", "fault_freq"}
    if extra:
        raise ConfigInvalid(f"unknown compare sections: {sorted(extra)}")
    cfgs = {m: _method_config(m, config.get(m, {})) for m in methods}

    sig, digest = _read_input(args["input"])
    run = Run(args["out"])
    raw_k = kurtosis(sig)
    raw_es, raw_rep = _envsi_report(sig, fault_freq, params)

    rows, wall = [], {}
    for m in methods:
        t0 = time.perf_counter()
        d = decompose(sig, m, cfgs[m])
        wall[m] = round((time.perf_counter() - t0) * 1000.0, 3)
        run.timings[f"decompose.{m}"] = wall[m]
        idx, k = select_informative_imf(d)
        _, rep = _envsi_report(Signal(d.imfs[idx], sig.sample_rate), fault_freq, params)
        rows.append({
            "method": m,
            "n_imfs": d.n_imfs,
            "selected_imf": idx,
            "kurtosis": k,
            "envsi": rep.value,
            "emd_calls": d.meta.get("emd_calls", 0),
            "sift_calls": d.meta.get("sift_calls", 0),
        })

    # Wall time is kept out of the scoreboard files so replays are byte-identical.
    cols = ["method", "n_imfs", "selected_imf", "kurtosis", "envsi", "emd_calls", "sift_calls"]
    write_matrix_csv(run.path("scoreboard.csv"), cols, [[r[c] for c in cols] for r in rows])
    write_json(run.path("scoreboard.json"), {
        "fault_freq": fault_freq,
        "raw": {"kurtosis": raw_k, "envsi": raw_rep.value},
        "rows": rows,
    })
    run.add(run.path("scoreboard.csv"), run.path("scoreboard.json"))
    write_json(run.path(TIMINGS), {"wall_time_ms": wall})

    snapshot = {m: _method_snapshot(cfgs[m]) for m in methods}
    snapshot.update({"methods": methods, "fault_freq": fault_freq, "analysis": params})
    seeds = {m: _seeds_of(cfgs[m]) for m in methods}
    manifest = run.finish("compare", args, snapshot, seeds, digest, {"wall_time_ms": wall})
    for r in rows:
        log.info("%-6s kurtosis=%.4f envsi=%.4f wall=%.1f ms", r["method"], r["kurtosis"],
                 r["envsi"], wall[r["method"]])
    return run, manifest


# ---------------------------------------------------------------- replay


RUNNERS = {
    "simulate": run_simulate,
    "decompose": run_decompose,
    "analyze": run_analyze,
    "compare": run_compare,
}


def _replay_config(manifest: dict) -> dict:
    snap = manifest["config_snapshot"]
    if manifest["command"] == "decompose":
        return dict(snap[snap["method"]])
    if manifest["command"] == "compare":
        return {k: v for k, v in snap.items() if k not in ("methods", "fault_freq")}
    if manifest["command"] == "analyze":
        return {k: v for k, v in snap.items() if k not in ("ops", "fault_freq")}
    return dict(snap)


def replay(manifest_path, out_dir=None) -> dict:
    """Re-run a manifest and compare artifact digests.

    Returns ``{"identical": bool, "mismatched": [...], "missing": [...]}``.
    """
    manifest_path = Path(manifest_path)
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise IoError(f"{manifest_path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigParse(f"{manifest_path}: {exc}") from exc
    command = manifest.get("command")
    if command not in RUNNERS:
        raise ConfigParse(f"{manifest_path}: unknown command {command!r}")
    if manifest.get("input_digest"):
        inp = manifest["args"]["input"]
        if sha256_file(inp) != manifest["input_digest"]:
            raise IoError(f"{inp}: content differs from the recorded input digest")

    tmp = None
    if out_dir is None:
        tmp = tempfile.mkdtemp(prefix="seemd-replay-")
        out_dir = tmp
    try:
        args = dict(manifest["args"])
        args["out"] = str(out_dir)
        _, fresh = RUNNERS[command](args, _replay_config(manifest))
    finally:
        if tmp is not None:
            shutil.rmtree(tmp, ignore_errors=True)
    old, new = manifest["artifacts"], fresh["artifacts"]
    mismatched = sorted(k for k in old if k in new and old[k] != new[k])
    missing = sorted(set(old) ^ set(new))
    return {"identical": not mismatched and not missing, "mismatched": mismatched, "missing": missing,
            "artifacts": len(old)}


# ---------------------------------------------------------------- argparse


def _verbosity() -> int:
    v = os.environ.get("SEEMD_VERBOSITY", "info").strip().lower()
    return {"0": logging.WARNING, "quiet": logging.WARNING, "1": logging.INFO, "info": logging.INFO,
            "2": logging.DEBUG, "debug": logging.DEBUG}.get(v, logging.INFO)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="seemd", description="Noise-assisted EMD toolkit for bearing diagnostics.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, needs_input=True):
        if needs_input:
            p.add_argument("input", help="signal file (.wav, .f64/.bin with JSON sidecar, .csv)")
        p.add_argument("--out", "-o", required=True, help="output directory")
        p.add_argument("--config", "-c", help="JSON configuration document")
        p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                       help="override a configuration value (repeatable)")
        p.add_argument("--emit-plot-data", action="store_true", help="also write gnuplot data files")

    p = sub.add_parser("simulate", help="generate a bearing-defect vibration signal")
    common(p, needs_input=False)
    p.add_argument("--name", default="signal", help="output file stem")
    p.add_argument("--format", default="f64", choices=["f64", "csv", "wav"])

    p = sub.add_parser("decompose", help="split a signal into IMFs / modes")
    common(p)
    p.add_argument("--method", "-m", default="seemd", choices=sorted(METHODS))
    p.add_argument("--format", default="f64", choices=["f64", "csv"])

    p = sub.add_parser("analyze", help="spectrogram, envelope spectrum, ENVSI, kurtosis")
    common(p)
    p.add_argument("--ops", help=f"comma-separated subset of {','.join(ANALYSIS_OPS)}")
    p.add_argument("--fault-freq", type=float, help="fault characteristic frequency in Hz")

    p = sub.add_parser("compare", help="score several methods on one signal")
    common(p)
    p.add_argument("--methods", default="seemd,eemd,vmd", help="comma-separated method list")
    p.add_argument("--fault-freq", type=float, help="fault characteristic frequency in Hz")

    p = sub.add_parser("replay", help="re-run a manifest and verify artifact digests")
    p.add_argument("manifest")
    p.add_argument("--out", "-o", help="keep replayed artifacts here (default: temporary)")
    return ap


def _args_dict(ns: argparse.Namespace) -> dict:
    d = {k: v for k, v in vars(ns).items() if k not in ("command", "config", "overrides")}
    if "input" in d:
        d["input"] = str(Path(d["input"]).resolve())
    d["out"] = str(Path(d["out"]).resolve())
    if d.get("ops"):
        d["ops"] = [o.strip() for o in d["ops"].split(",") if o.strip()]
    if "methods" in d and isinstance(d["methods"], str):
        d["methods"] = [m.strip() for m in d["methods"].split(",") if m.strip()]
    return d


def main(argv=None) -> int:
    logging.basicConfig(level=_verbosity(), format="%(levelname)s: %(message)s", stream=sys.stderr)
    logging.captureWarnings(True)
    log.setLevel(_verbosity())
    ns = build_parser().parse_args(argv)
    try:
        if ns.command == "replay":
            res = replay(ns.manifest, ns.out)
            status = "identical" if res["identical"] else "DIFFERENT"
            print(f"replay {status}: {res['artifacts']} artifacts, "
                  f"mismatched={res['mismatched']}, missing={res['missing']}")
            return EXIT_OK if res["identical"] else EXIT_METHOD
        config = load_config(ns.config, ns.overrides)
        args = _args_dict(ns)
        run, manifest = RUNNERS[ns.command](args, config)
        print(run.path(MANIFEST))
        return EXIT_OK
    except (IoError, ConfigParse, ConfigInvalid, MissingFaultFreq, UnsupportedFormat, OSError) as exc:
        log.error("%s", exc)
        return EXIT_IO
    except SeemdError as exc:
        log.error("%s", exc)
        return EXIT_METHOD


if __name__ == "__main__":
    sys.exit(main())
