"""Benchmark command line: generate, infer, filter, error-curve, macro-model, replay.

Every subcommand reads a JSON config (``--config``), writes its outputs
under ``--out``, and embeds the tool version plus a hash of the
effective config in every file.  ``--seed`` overrides every seed in the
config so one flag controls full reproducibility.  Exit codes: 0
success, 2 config error, 3 data error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bench import (
    ConfigError,
    DataError,
    config_hash,
    load_stream,
    output_meta,
    run_error_vs_n,
    run_stream_filter,
    run_theta_recovery,
    write_error_curve_aggregate_csv,
    write_error_curve_long_csv,
    write_theta_recovery_outputs,
    write_trace_csv,
)
from .core import HyperParams
from .filters import METHODS, make_filter
from .genmodel import (
    GenerativeConfig,
    generate_dataset,
    write_dataset_csv,
    write_dataset_json,
)
from .inference import (
    MHConfig,
    run_chain,
    summarize_noise_posterior,
    write_chain_csv,
    write_summary_json,
)
from .macroobs import estimate_model


def _load_config(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    return doc


def _apply_seed(doc: dict, seed: int | None) -> dict:
    """CLI --seed wins over every embedded seed."""
    if seed is None:
        return doc
    doc = dict(doc)
    doc["seed"] = int(seed)
    for key in ("generative", "mh"):
        if key in doc and isinstance(doc[key], dict):
            doc[key] = {**doc[key], "seed": int(seed)}
    return doc


def _gen_config(doc: dict, default_seed: int | None = None) -> GenerativeConfig:
    if "generative" not in doc:
        raise ConfigError("config is missing the 'generative' section")
    section = dict(doc["generative"])
    if "seed" not in section and default_seed is not None:
        section["seed"] = default_seed
    try:
        return GenerativeConfig.from_dict(section)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad generative config: {exc}") from exc


def _mh_config(doc: dict, default_seed: int | None = None) -> MHConfig:
    section = dict(doc.get("mh", {}))
    if "seed" not in section and default_seed is not None:
        section["seed"] = default_seed
    try:
        return MHConfig.from_dict(section)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad mh config: {exc}") from exc


def _hyper(doc: dict) -> HyperParams:
    try:
        return HyperParams(**doc.get("hyper", {}))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad hyper config: {exc}") from exc


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_generate(args) -> int:
    doc = _apply_seed(_load_config(args.config), args.seed)
    gen = _gen_config(doc, doc.get("seed"))
    n = doc.get("n")
    per_class = doc.get("per_class")
    if n is None and per_class is None:
        raise ConfigError("generate needs 'n' or 'per_class'")
    try:
        data = generate_dataset(gen, n=n, per_class=per_class,
                                stream_index=int(doc.get("stream_index", 0)))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    out = _out_dir(args)
    h = config_hash({**doc, "generative": gen.to_dict()})
    write_dataset_csv(out / "dataset.csv", data, meta=output_meta(h))
    write_dataset_json(out / "dataset.json", data, config=gen, extra=output_meta(h))
    print(f"wrote {out / 'dataset.csv'} ({len(data)} rows)")
    return 0


def cmd_infer(args) -> int:
    doc = _apply_seed(_load_config(args.config), args.seed)
    mh = _mh_config(doc, doc.get("seed"))
    hyper = _hyper(doc)
    data = load_stream(args.data)
    if len(data) == 0:
        raise DataError(f"{args.data}: no observations to infer from")
    prior = doc.get("prior")
    try:
        summary = run_chain(data, prior=prior, config=mh, hyper=hyper)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    out = _out_dir(args)
    h = config_hash({"mh": mh.to_dict(), "prior": prior, "hyper": doc.get("hyper", {})})
    write_chain_csv(out / "chain.csv", summary, meta=output_meta(h))
    write_summary_json(out / "summary.json", summary, extra=output_meta(h))
    theta = summarize_noise_posterior(summary)
    print(f"posterior-median theta: {np.round(theta, 4).tolist()}")
    return 0


def _filter_common(doc: dict, args, noise_updates=None) -> int:
    method = doc.get("method", "hbni")
    if method not in METHODS:
        raise ConfigError(f"unknown method {method!r}; expected one of {METHODS}")
    data = load_stream(args.data)
    try:
        trace = run_stream_filter(
            data,
            method,
            prior=doc.get("prior"),
            theta=doc.get("theta"),
            mode=doc.get("mode", "median"),
            theta_samples=doc.get("theta_samples"),
            noise_updates=noise_updates,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    out = _out_dir(args)
    h = config_hash(doc)
    name = f"trace_{method}.csv" if args.command == "replay" else "trace.csv"
    write_trace_csv(out / name, trace, meta=output_meta(h))
    print(f"wrote {out / name} ({trace.shape[0]} rows)")
    return 0


def cmd_filter(args) -> int:
    doc = _apply_seed(_load_config(args.config), args.seed)
    return _filter_common(doc, args)


def cmd_replay(args) -> int:
    doc = _apply_seed(_load_config(args.config), args.seed)
    updates = []
    for entry in doc.get("noise_updates", []):
        try:
            updates.append((int(entry["step"]), entry["theta"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad noise_updates entry {entry!r}: {exc}") from exc
    return _filter_common(doc, args, noise_updates=updates)


def cmd_error_curve(args) -> int:
    doc = _apply_seed(_load_config(args.config), args.seed)
    if args.trials is not None:
        doc["trials"] = args.trials
    seed = int(doc.get("seed", 0))
    gen = _gen_config(doc, seed)
    grid = doc.get("n_grid")
    if isinstance(grid, dict):
        grid = list(range(int(grid.get("start", 1)), int(grid.get("stop", 50)) + 1))
    if grid is None:
        grid = list(range(1, 51))
    calib = doc.get("calibration", {})
    mh = _mh_config(calib, seed)
    hyper = _hyper(calib)
    try:
        result = run_error_vs_n(
            gen,
            grid,
            trials=int(doc.get("trials", 2000)),
            methods=tuple(doc.get("methods", METHODS)),
            calibration_per_class=int(calib.get("per_class", 5)),
            mh=mh,
            hyper=hyper,
            seed=seed,
            threads=args.threads,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    out = _out_dir(args)
    h = config_hash({**doc, "generative": gen.to_dict(), "mh": mh.to_dict()})
    meta = output_meta(h)
    write_error_curve_long_csv(out / "error_long.csv", result, meta)
    write_error_curve_aggregate_csv(out / "error_aggregate.csv", result, meta)
    meta_doc = {
        **meta,
        "theta_calibrated": [float(t) for t in result.theta_calibrated],
        "n_grid": result.n_grid,
        "trials": int(doc.get("trials", 2000)),
        "methods": list(result.correct.keys()),
        "config": doc,
    }
    (out / "error_meta.json").write_text(json.dumps(meta_doc, sort_keys=True, indent=2) + "\n")
    print(f"wrote {out / 'error_aggregate.csv'} ({len(result.points)} points)")
    return 0


def cmd_macro_model(args) -> int:
    doc = _apply_seed(_load_config(args.config), args.seed)
    if args.trials is not None:
        doc["trials"] = args.trials
    seed = int(doc.get("seed", 0))
    gen = _gen_config(doc, seed)
    noise = doc.get("noise", "true")
    if isinstance(noise, str):
        if noise != "true":
            raise ConfigError("'noise' must be a list of concentrations or the string 'true'")
        if gen.theta is None:
            raise ConfigError("noise='true' requires a fixed-truth generative config")
        theta_filter = gen.theta
    else:
        theta_filter = np.asarray(noise, dtype=float)
    threshold = float(doc.get("threshold", 0.95))
    cap = int(doc.get("cap", 200))
    trials = int(doc.get("trials", 2000))
    h = config_hash({**doc, "generative": gen.to_dict()})
    try:
        model = estimate_model(
            gen,
            lambda: make_filter("hbni", prior=gen.prior, theta=theta_filter),
            threshold=threshold,
            cap=cap,
            trials=trials,
            config_hash=h,
            keep_joint=bool(doc.get("joint", False)),
            threads=args.threads,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    out = _out_dir(args)
    model.save(out / "macro_model.json")
    print(f"wrote {out / 'macro_model.json'} ({trials} trials/class)")
    return 0


def cmd_theta_recovery(args) -> int:
    doc = _apply_seed(_load_config(args.config), args.seed)
    seed = int(doc.get("seed", 0))
    gen = _gen_config(doc, seed)
    mh = _mh_config(doc, seed)
    hyper = _hyper(doc)
    try:
        result = run_theta_recovery(
            gen,
            per_class=int(doc.get("per_class", 5)),
            mh=mh,
            hyper=hyper,
            repetitions=int(doc.get("repetitions", 1)),
            threads=args.threads,
            vary_data=bool(doc.get("vary_data", False)),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    out = _out_dir(args)
    h = config_hash({**doc, "generative": gen.to_dict(), "mh": mh.to_dict()})
    write_theta_recovery_outputs(out, result, {"config_hash": h, "version": __version__})
    print(f"wrote {out / 'recovery_report.json'} ({doc.get('repetitions', 1)} repetitions)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hbni",
        description="Noise-aware sequential classification benchmark harness",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, data=False, trials=False):
        p.add_argument("--config", required=True, help="JSON config path")
        p.add_argument("--seed", type=int, default=None, help="override every seed in the config")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--threads", type=int, default=1, help="worker threads for trials")
        if data:
            p.add_argument("--data", required=True, help="input observation CSV")
        if trials:
            p.add_argument("--trials", type=int, default=None, help="override trial count")

    common(sub.add_parser("generate", help="sample a dataset from the generative model"))
    common(sub.add_parser("infer", help="run posterior noise inference on a dataset"), data=True)
    common(sub.add_parser("filter", help="stream one filter over a recorded CSV"), data=True)
    common(sub.add_parser("error-curve", help="misclassification rate vs history length"),
           trials=True)
    common(sub.add_parser("macro-model", help="estimate macro-observation distributions"),
           trials=True)
    common(sub.add_parser("replay", help="replay a stream with mid-run noise swaps"), data=True)
    common(sub.add_parser("theta-recovery", help="repeated noise-recovery experiment"))
    return parser


_COMMANDS = {
    "generate": cmd_generate,
    "infer": cmd_infer,
    "filter": cmd_filter,
    "error-curve": cmd_error_curve,
    "macro-model": cmd_macro_model,
    "replay": cmd_replay,
    "theta-recovery": cmd_theta_recovery,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
