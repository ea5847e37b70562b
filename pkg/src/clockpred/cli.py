"""Command-line pipeline: generate, prepare, train, compare.

Each stage reads and writes plain files so the intermediate products (the
detrended residual, the training trace, the comparison report) stay
independently inspectable.  Outputs are written atomically, existing files
are never overwritten without --force, and every run leaves a JSON manifest
recording exactly what produced it.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__, config, predictor, series, synthetic, training
from .cnn import init_weights, load_model, model_to_json
from .series import PreparedSeries


@dataclass(frozen=True)
class RunManifest:
    """Everything needed to reproduce one command bit-for-bit."""

    command: str
    tool_version: str
    seed: int
    config: dict[str, str]
    inputs: dict[str, str]
    outputs: dict[str, str]
    extra: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"


def _write_atomic(path, text: str, force: bool) -> None:
    path = Path(path)
    if path.exists() and not force:
        raise ValueError(f"refusing to overwrite {path} (pass --force)")
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load_config(path: str | None) -> dict[str, str]:
    if path is None:
        path = os.environ.get(config.ENV_CONFIG_PATH)
    overrides = config.parse_config(path) if path else None
    return config.effective_config(overrides)


def cmd_generate(cfg: dict[str, str], out, seed: int | None, force: bool) -> RunManifest:
    spec = config.synthetic_spec_from(cfg, seed)
    data = synthetic.generate(spec)
    _write_atomic(out, series.series_to_csv(data), force)
    manifest = RunManifest(
        command="generate",
        tool_version=__version__,
        seed=spec.seed,
        config=cfg,
        inputs={},
        outputs={"series": str(out)},
        extra={"n": len(data)},
    )
    _write_atomic(f"{out}.manifest.json", manifest.to_json(), force)
    return manifest


def cmd_prepare(
    in_path,
    cfg: dict[str, str],
    out_dir,
    in_path_b=None,
    seed: int | None = None,
    force: bool = False,
) -> RunManifest:
    interval = config.interval_from(cfg)
    data = series.read_series(in_path, interval)
    if in_path_b is not None:
        data = series.combine_series(data, series.read_series(in_path_b, interval))
    train_frac, val_frac, fit_on_full = config.prepare_options_from(cfg)
    prepared = series.prepare(data, train_frac, val_frac, fit_on_full)
    out_dir = Path(out_dir)
    _write_atomic(out_dir / "series.csv", series.series_to_csv(prepared.series), force)
    residual = series.denormalize(prepared.residual_norm, prepared.scale)
    _write_atomic(
        out_dir / "residual.csv",
        series.series_to_csv(residual, decimals=None),
        force,
    )
    trend = prepared.trend
    _write_atomic(
        out_dir / "trend.json",
        json.dumps(
            {"t0": trend.t0, "c0": trend.c0, "c1": trend.c1, "c2": trend.c2},
            indent=2,
            sort_keys=True,
        )
        + "\n",
        force,
    )
    _write_atomic(
        out_dir / "scale.json",
        json.dumps({"d_max_abs": prepared.scale.d_max_abs}, indent=2) + "\n",
        force,
    )
    parts = prepared.split
    split_doc = {
        "n": len(prepared.series),
        "train": [parts.train_range.start, parts.train_range.stop],
        "val": [parts.val_range.start, parts.val_range.stop],
        "test": [parts.test_range.start, parts.test_range.stop],
        "fractions": list(parts.fractions),
        "fit_on_full": prepared.fit_on_full,
    }
    _write_atomic(
        out_dir / "split.json", json.dumps(split_doc, indent=2, sort_keys=True) + "\n", force
    )
    inputs = {"series": str(in_path)}
    if in_path_b is not None:
        inputs["series_b"] = str(in_path_b)
    manifest = RunManifest(
        command="prepare",
        tool_version=__version__,
        seed=config.seed_from(cfg, seed),
        config=cfg,
        inputs=inputs,
        outputs={
            name: str(out_dir / f"{name}.{ext}")
            for name, ext in (
                ("series", "csv"),
                ("residual", "csv"),
                ("trend", "json"),
                ("scale", "json"),
                ("split", "json"),
            )
        },
        extra={"split_sizes": list(parts.sizes)},
    )
    _write_atomic(out_dir / "manifest.json", manifest.to_json(), force)
    return manifest


def load_prepared(prepared_dir) -> PreparedSeries:
    """Reassemble a :class:`PreparedSeries` from a prepare output directory."""
    prepared_dir = Path(prepared_dir)
    split_doc = json.loads((prepared_dir / "split.json").read_text(encoding="utf-8"))
    trend_doc = json.loads((prepared_dir / "trend.json").read_text(encoding="utf-8"))
    scale_doc = json.loads((prepared_dir / "scale.json").read_text(encoding="utf-8"))
    interval = _infer_interval(prepared_dir)
    full = series.read_series(prepared_dir / "series.csv", interval)
    residual = series.read_series(prepared_dir / "residual.csv", interval)
    scale = series.NormalizationScale(scale_doc["d_max_abs"])
    parts = series.DataSplit(
        train_range=range(*split_doc["train"]),
        val_range=range(*split_doc["val"]),
        test_range=range(*split_doc["test"]),
        fractions=tuple(split_doc["fractions"]),
    )
    return PreparedSeries(
        series=full,
        residual_norm=residual.with_values(residual.values / scale.d_max_abs),
        trend=series.QuadraticTrend(**trend_doc),
        scale=scale,
        split=parts,
        fit_on_full=bool(split_doc["fit_on_full"]),
    )


def _infer_interval(prepared_dir: Path) -> int:
    manifest_path = prepared_dir / "manifest.json"
    doc = json.loads(manifest_path.read_text(encoding="utf-8"))
    return int(doc["config"]["gen_interval"])


def cmd_train(
    prepared_dir, cfg: dict[str, str], model_out, trace_out, seed: int | None, force: bool
) -> RunManifest:
    prepared = load_prepared(prepared_dir)
    train_cfg = config.train_config_from(cfg, seed)
    channels = config.channels_from(cfg)
    model0 = init_weights(train_cfg.seed, channels=channels)
    train_ds = training.make_windows(prepared.residual_norm, prepared.split.train_range)
    val_ds = training.make_windows(prepared.residual_norm, prepared.split.val_range)
    model, trace = training.train(model0, train_ds, val_ds, train_cfg)
    _write_atomic(model_out, model_to_json(model), force)
    _write_atomic(trace_out, training.trace_to_csv(trace), force)
    manifest = RunManifest(
        command="train",
        tool_version=__version__,
        seed=train_cfg.seed,
        config=cfg,
        inputs={"prepared": str(prepared_dir)},
        outputs={"model": str(model_out), "trace": str(trace_out)},
        extra={
            "stop_reason": trace.stop_reason,
            "best_update": trace.best_update,
            "updates": len(trace),
            "train_pairs": len(train_ds),
            "val_pairs": len(val_ds),
        },
    )
    _write_atomic(f"{model_out}.manifest.json", manifest.to_json(), force)
    return manifest


def cmd_compare(
    prepared_dir,
    model_path,
    cfg: dict[str, str],
    report_out,
    summary_out=None,
    stub_memorize: bool = False,
    seed: int | None = None,
    force: bool = False,
) -> RunManifest:
    prepared = load_prepared(prepared_dir)
    kf_params = config.kalman_params_from(cfg)
    if stub_memorize:
        test_range = prepared.split.test_range
        cnn_method = predictor.memorization_predictor(prepared.residual_norm, test_range)
        kf_method = predictor.memorization_predictor(prepared.residual_norm, test_range)
    else:
        cnn_method = load_model(model_path)
        kf_method = kf_params
    report = predictor.compare(cnn_method, kf_method, prepared)
    _write_atomic(report_out, predictor.report_to_csv(report), force)
    if summary_out is None:
        summary_out = f"{report_out}.summary.json"
    _write_atomic(summary_out, predictor.summary_to_json(report), force)
    manifest = RunManifest(
        command="compare",
        tool_version=__version__,
        seed=config.seed_from(cfg, seed),
        config=cfg,
        inputs={"prepared": str(prepared_dir), "model": str(model_path)},
        outputs={"report": str(report_out), "summary": str(summary_out)},
        extra={
            "n_pred": report.n_pred,
            "cnn_e_rms_ns": report.cnn_e_rms_ns,
            "kf_e_rms_ns": report.kf_e_rms_ns,
            "stub_memorize": stub_memorize,
        },
    )
    _write_atomic(f"{report_out}.manifest.json", manifest.to_json(), force)
    return manifest


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="path to a key=value configuration file")
    common.add_argument("--seed", type=int, help="seed overriding the configuration")
    common.add_argument(
        "--force", action="store_true", help="allow overwriting existing outputs"
    )
    parser = argparse.ArgumentParser(
        prog="clockpred",
        description="Predict [UTC - hydrogen maser] offsets with a small 1D "
        "convolutional network and a Kalman-filter baseline.",
    )
    parser.add_argument("--version", action="version", version=f"clockpred {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", parents=[common], help="write a synthetic offset series")
    p.add_argument("--out", required=True, help="output CSV path")

    p = sub.add_parser(
        "prepare", parents=[common], help="detrend, normalize and split a series"
    )
    p.add_argument("--in", dest="in_path", required=True, help="input series CSV")
    p.add_argument(
        "--in-b",
        dest="in_path_b",
        help="optional second series; the two are summed pointwise first",
    )
    p.add_argument("--out-dir", required=True, help="directory for prepared artifacts")

    p = sub.add_parser("train", parents=[common], help="train the convolutional predictor")
    p.add_argument("--prepared", required=True, help="prepare output directory")
    p.add_argument("--model-out", required=True, help="trained model JSON path")
    p.add_argument("--trace-out", required=True, help="training trace CSV path")

    p = sub.add_parser(
        "compare", parents=[common], help="score both predictors on the test partition"
    )
    p.add_argument("--prepared", required=True, help="prepare output directory")
    p.add_argument("--model", required=True, help="trained model JSON path")
    p.add_argument("--report-out", required=True, help="per-epoch report CSV path")
    p.add_argument("--summary-out", help="summary JSON path (default: <report>.summary.json)")
    p.add_argument(
        "--stub-memorize",
        action="store_true",
        help="replace both methods with a perfect-memorization stub (harness self-check)",
    )
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _load_config(args.config)
        if args.command == "generate":
            cmd_generate(cfg, args.out, args.seed, args.force)
        elif args.command == "prepare":
            cmd_prepare(
                args.in_path, cfg, args.out_dir, args.in_path_b, args.seed, args.force
            )
        elif args.command == "train":
            cmd_train(args.prepared, cfg, args.model_out, args.trace_out, args.seed, args.force)
        elif args.command == "compare":
            cmd_compare(
                args.prepared,
                args.model,
                cfg,
                args.report_out,
                args.summary_out,
                args.stub_memorize,
                args.seed,
                args.force,
            )
    except (ValueError, OSError) as err:
        print(f"clockpred: error: {err}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
