"""Command-line interface.

Commands:

* evaluate      score a prediction or score file against labels
* attack        random-flag stress test against real or synthetic labels
* attack-cdf    analytic distribution of adjusted F1 for a random flagger
* attack-worst  analytic worst-case curves as the alarm budget grows
* far-study     expected F1 over a false-alarm-rate grid and class balances
* synth         generate a labelled synthetic frame (optionally train/test)
* baseline      fit, score and evaluate the PCA baseline
* check-labels  compare point labels against an exported event list

Every command writes `report.json` into --out (default ".", overridable
via the TSADEVAL_OUT environment variable) embedding a run manifest:
command line, resolved configuration, seeds, SHA-256 digests of the input
files, package version and a timestamp. With a fixed seed all outputs are
byte-identical across runs except the manifest timestamp, which can be
pinned via TSADEVAL_TIMESTAMP. Exit status is 0 only if the report was
fully written; input and usage errors exit with status 2.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from tsadeval import __version__
from tsadeval.adversary import (
    AttackSetup,
    SamplingModel,
    f1_pa_distribution,
    prob_perfect_recall,
    random_flag_trials,
    single_segment_labels,
    worst_case_f1_pa,
    worst_case_precision_pa,
    worst_case_table,
)
from tsadeval.data_io import (
    atomic_write_text,
    check_label_consistency,
    generate_synthetic,
    generate_train_test,
    labels_from_events,
    load_events,
    load_frame,
    load_label_series,
    load_prediction_series,
    load_score_series,
    load_synthetic_spec,
    sha256_digest,
    write_csv,
    write_events,
    write_frame,
)
from tsadeval.metric_study import DatasetShape, default_far_grid, f1_far_table
from tsadeval.metrics import LabelSeries
from tsadeval.pca_baseline import (
    AnomalyScoreSeries,
    PcaConfig,
    ScoredModel,
    fit,
    predictions_at_threshold,
    score_frame,
    sweep_threshold,
)
from tsadeval.protocols import Protocol, ProtocolReport, score_all

__all__ = ["main"]

REPORT_CSV_FIELDS = [
    "protocol",
    "precision",
    "recall",
    "f1",
    "far",
    "tp_e",
    "fp_e",
    "fn_e",
    "deprecated_protocol",
]


# ---------------------------------------------------------------------------
# manifest and report plumbing


@dataclass
class RunManifest:
    command: str
    argv: list
    config: dict
    seeds: list
    inputs: dict
    version: str
    timestamp: str


def _timestamp() -> str:
    pinned = os.environ.get("TSADEVAL_TIMESTAMP")
    if pinned:
        return pinned
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _manifest(
    command: str, config: dict, seeds: list, inputs: Sequence
) -> RunManifest:
    return RunManifest(
        command=command,
        argv=sys.argv[1:],
        config=config,
        seeds=[int(s) for s in seeds],
        inputs={str(p): sha256_digest(p) for p in inputs},
        version=__version__,
        timestamp=_timestamp(),
    )


def _out_dir(args: argparse.Namespace) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_report(out: Path, manifest: RunManifest, results: dict) -> Path:
    payload = {"manifest": asdict(manifest), "results": results}
    target = out / "report.json"
    atomic_write_text(target, json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return target


def _report_row(report: ProtocolReport) -> dict:
    return {
        "protocol": report.protocol.value,
        "precision": report.precision,
        "recall": report.recall,
        "f1": report.f1,
        "far": report.far,
        "tp_e": report.tp_e,
        "fp_e": report.fp_e,
        "fn_e": report.fn_e,
        "deprecated_protocol": report.deprecated,
    }


def _csv_row(row: dict) -> dict:
    out = {}
    for key, value in row.items():
        if value is None:
            out[key] = ""
        elif isinstance(value, bool):
            out[key] = "true" if value else "false"
        elif isinstance(value, float):
            out[key] = repr(value)
        else:
            out[key] = value
    return out


def _print_rows(rows: Sequence[dict]) -> None:
    header = f"{'protocol':<14} {'precision':>10} {'recall':>10} {'f1':>10} {'far':>10}"
    print(header)
    print("-" * len(header))
    for row in rows:
        note = "  (deprecated)" if row["deprecated_protocol"] else ""
        print(
            f"{row['protocol']:<14} {row['precision']:>10.6f} "
            f"{row['recall']:>10.6f} {row['f1']:>10.6f} {row['far']:>10.6f}"
            f"{note}"
        )


# ---------------------------------------------------------------------------
# shared argument handling


def _add_out(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--out",
        default=os.environ.get("TSADEVAL_OUT", "."),
        help="output directory (default: TSADEVAL_OUT or current directory)",
    )


def _parse_protocols(text: str) -> tuple:
    names = [tok.strip() for tok in text.split(",") if tok.strip()]
    if not names:
        raise argparse.ArgumentTypeError("no protocols given")
    valid = ", ".join(p.value for p in Protocol)
    protocols = []
    for name in names:
        try:
            protocols.append(Protocol(name))
        except ValueError:
            raise argparse.ArgumentTypeError(
                f"unknown protocol {name!r}; valid: {valid}"
            ) from None
    return tuple(protocols)


def _add_protocols(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--protocols",
        type=_parse_protocols,
        default=tuple(Protocol),
        help="comma-separated protocol list (default: all four)",
    )


def _parse_threshold_policy(text: str):
    if text == "best-pw-f1":
        return ("best-pw-f1", None)
    if text.startswith("fixed:"):
        try:
            return ("fixed", float(text.split(":", 1)[1]))
        except ValueError:
            raise argparse.ArgumentTypeError(
                f"bad fixed threshold in {text!r}"
            ) from None
    raise argparse.ArgumentTypeError(
        f"threshold policy must be 'best-pw-f1' or 'fixed:<value>', got {text!r}"
    )


def _add_threshold_policy(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--threshold-policy",
        type=_parse_threshold_policy,
        default=("best-pw-f1", None),
        metavar="{best-pw-f1,fixed:<v>}",
        help="how to binarize scores (default: best-pw-f1)",
    )


def _resolve_threshold(
    policy, scores: AnomalyScoreSeries, labels: LabelSeries
) -> float:
    kind, value = policy
    if kind == "fixed":
        return value
    threshold, _ = sweep_threshold(scores, labels, Protocol.POINT_WISE)
    return threshold


def _policy_name(policy) -> str:
    kind, value = policy
    return kind if value is None else f"fixed:{value}"


# ---------------------------------------------------------------------------
# evaluate


def _cmd_evaluate(args: argparse.Namespace) -> int:
    labels = load_label_series(args.labels)
    inputs = [args.labels]
    threshold = None
    if args.predictions:
        preds = load_prediction_series(args.predictions)
        inputs.append(args.predictions)
    else:
        raw = load_score_series(args.scores)
        inputs.append(args.scores)
        scores = AnomalyScoreSeries(raw)
        threshold = _resolve_threshold(args.threshold_policy, scores, labels)
        preds = predictions_at_threshold(scores, threshold)
    reports = score_all(labels, preds, args.protocols)
    rows = [_report_row(r) for r in reports]
    out = _out_dir(args)
    manifest = _manifest(
        "evaluate",
        {
            "protocols": [p.value for p in args.protocols],
            "threshold_policy": _policy_name(args.threshold_policy),
            "threshold": threshold,
        },
        seeds=[],
        inputs=inputs,
    )
    write_csv(out / "report.csv", REPORT_CSV_FIELDS, [_csv_row(r) for r in rows])
    _write_report(out, manifest, {"threshold": threshold, "rows": rows})
    _print_rows(rows)
    return 0


# ---------------------------------------------------------------------------
# attack


def _attack_labels(args: argparse.Namespace) -> tuple:
    given = [
        bool(args.labels),
        bool(args.synthetic_spec),
        args.total_points is not None or args.segment_length is not None,
    ]
    if sum(given) != 1:
        raise ValueError(
            "give exactly one of --labels, --synthetic-spec, or "
            "--total-points with --segment-length"
        )
    if args.labels:
        return load_label_series(args.labels), [args.labels]
    if args.synthetic_spec:
        from tsadeval.data_io import synthetic_labels

        spec = load_synthetic_spec(args.synthetic_spec)
        return synthetic_labels(spec), [args.synthetic_spec]
    if args.total_points is None or args.segment_length is None:
        raise ValueError("--total-points and --segment-length go together")
    return (
        single_segment_labels(args.total_points, args.segment_length),
        [],
    )


def _quantiles(values: np.ndarray) -> dict:
    qs = np.quantile(values, [0.05, 0.25, 0.5, 0.75, 0.95])
    return {
        "mean": float(values.mean()),
        "std": float(values.std()),
        "min": float(values.min()),
        "q05": float(qs[0]),
        "q25": float(qs[1]),
        "median": float(qs[2]),
        "q75": float(qs[3]),
        "q95": float(qs[4]),
        "max": float(values.max()),
    }


def _empirical_distribution_rows(
    hits: np.ndarray, f1: np.ndarray, trials: int
) -> list:
    rows = []
    cumulative = 0.0
    for s in np.unique(hits):
        mask = hits == s
        probability = float(mask.sum()) / trials
        cumulative += probability
        rows.append(
            {
                "s": int(s),
                "f1_value": repr(float(f1[mask][0])),
                "probability": repr(probability),
                "cumulative": repr(cumulative),
            }
        )
    return rows


def _cmd_attack(args: argparse.Namespace) -> int:
    labels, inputs = _attack_labels(args)
    trials = random_flag_trials(
        labels, args.alpha, args.trials, args.seed, args.protocols
    )
    summary = {
        p.value: _quantiles(trials.f1_by_protocol[p]) for p in args.protocols
    }
    for p in args.protocols:
        summary[p.value]["deprecated_protocol"] = p in {Protocol.POINT_ADJUST}
    results: dict = {
        "labels": {
            "total_points": len(labels),
            "n_events": labels.n_events,
            "n_anomalous": labels.n_anomalous,
            "contamination_rate": labels.contamination_rate,
        },
        "f1_summary": summary,
        "empirical_prob_zero_hits": float(np.mean(trials.hits == 0)),
    }
    out = _out_dir(args)
    if labels.n_events == 1:
        setup = AttackSetup(
            total_points=len(labels),
            anomalous_length=labels.n_anomalous,
            alpha=args.alpha,
        )
        analytic = {
            "prob_perfect_recall": prob_perfect_recall(
                setup.contamination_rate, setup.alpha
            ),
            "worst_precision_pa": worst_case_precision_pa(
                setup.anomalous_length, setup.alpha
            ),
            "worst_f1_pa": worst_case_f1_pa(
                setup.anomalous_length, setup.alpha
            ),
        }
        for model in SamplingModel:
            dist = f1_pa_distribution(setup, model)
            analytic[model.value] = {
                "prob_zero": dist.prob_zero,
                "mean_f1": dist.mean_f1,
            }
        results["analytic_single_segment"] = analytic
        if Protocol.POINT_ADJUST in args.protocols:
            write_csv(
                out / "distribution.csv",
                ["s", "f1_value", "probability", "cumulative"],
                _empirical_distribution_rows(
                    trials.hits,
                    trials.f1_by_protocol[Protocol.POINT_ADJUST],
                    args.trials,
                ),
            )
    manifest = _manifest(
        "attack",
        {
            "alpha": args.alpha,
            "trials": args.trials,
            "protocols": [p.value for p in args.protocols],
            "total_points": args.total_points,
            "segment_length": args.segment_length,
        },
        seeds=[args.seed],
        inputs=inputs,
    )
    _write_report(out, manifest, results)
    print(
        f"random flagger, alpha={args.alpha}, {args.trials} trials over "
        f"{len(labels)} points / {labels.n_events} event(s)"
    )
    for name, stats in summary.items():
        note = "  (deprecated)" if stats["deprecated_protocol"] else ""
        print(
            f"  {name:<14} mean F1 {stats['mean']:.6f}  "
            f"median {stats['median']:.6f}  q95 {stats['q95']:.6f}{note}"
        )
    return 0


def _cmd_attack_cdf(args: argparse.Namespace) -> int:
    setup = AttackSetup(
        total_points=args.total_points,
        anomalous_length=args.segment_length,
        alpha=args.alpha,
    )
    dist = f1_pa_distribution(setup, SamplingModel(args.model))
    out = _out_dir(args)
    write_csv(
        out / "distribution.csv",
        ["s", "f1_value", "probability", "cumulative"],
        [
            {k: repr(v) if isinstance(v, float) else v for k, v in row.items()}
            for row in dist.rows()
        ],
    )
    results = {
        "model": dist.model,
        "prob_zero": dist.prob_zero,
        "mean_f1": dist.mean_f1,
        "prob_f1_at_least_worst_case": dist.prob_f1_at_least(
            worst_case_f1_pa(setup.anomalous_length, setup.alpha)
        ),
    }
    manifest = _manifest(
        "attack-cdf",
        {
            "total_points": args.total_points,
            "segment_length": args.segment_length,
            "alpha": args.alpha,
            "model": args.model,
        },
        seeds=[],
        inputs=[],
    )
    _write_report(out, manifest, results)
    print(
        f"P(F1=0) = {dist.prob_zero:.6f}, mean F1 = {dist.mean_f1:.6f} "
        f"({dist.model})"
    )
    return 0


def _cmd_attack_worst(args: argparse.Namespace) -> int:
    alphas = list(range(args.alpha_min, args.alpha_max + 1, args.alpha_step))
    if not alphas:
        raise ValueError("empty alpha range")
    rows = worst_case_table(args.segment_length, args.contamination, alphas)
    out = _out_dir(args)
    write_csv(
        out / "worst_case.csv",
        ["alpha", "p_perfect_recall", "worst_precision_pa", "worst_f1_pa"],
        [
            {
                "alpha": r.alpha,
                "p_perfect_recall": repr(r.p_perfect_recall),
                "worst_precision_pa": repr(r.worst_precision_pa),
                "worst_f1_pa": repr(r.worst_f1_pa),
            }
            for r in rows
        ],
    )
    manifest = _manifest(
        "attack-worst",
        {
            "segment_length": args.segment_length,
            "contamination": args.contamination,
            "alpha_min": args.alpha_min,
            "alpha_max": args.alpha_max,
            "alpha_step": args.alpha_step,
        },
        seeds=[],
        inputs=[],
    )
    last = rows[-1]
    _write_report(
        out,
        manifest,
        {
            "n_rows": len(rows),
            "final_alpha": last.alpha,
            "final_p_perfect_recall": last.p_perfect_recall,
            "final_worst_f1_pa": last.worst_f1_pa,
        },
    )
    print(
        f"{len(rows)} rows; at alpha={last.alpha}: "
        f"P(perfect recall)={last.p_perfect_recall:.6f}, "
        f"worst F1={last.worst_f1_pa:.6f}"
    )
    return 0


# ---------------------------------------------------------------------------
# far-study


def _parse_shapes(text: str) -> tuple:
    shapes = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        try:
            n_normal, n_anomalous = (int(t) for t in token.split(":"))
        except ValueError:
            raise argparse.ArgumentTypeError(
                f"bad shape {token!r}; expected n_normal:n_anomalous"
            ) from None
        shapes.append(DatasetShape(n_normal=n_normal, n_anomalous=n_anomalous))
    if not shapes:
        raise argparse.ArgumentTypeError("no shapes given")
    return tuple(shapes)


def _shape_column(shape: DatasetShape) -> str:
    return f"f1_n{shape.n_normal}_a{shape.n_anomalous}"


def _cmd_far_study(args: argparse.Namespace) -> int:
    grid = default_far_grid(args.far_min, args.far_max, args.far_points)
    table = f1_far_table(args.recall, grid, args.shapes)
    columns = [_shape_column(s) for s in args.shapes]
    rows = []
    for i, far in enumerate(grid):
        row = {"far": repr(float(far))}
        for j, col in enumerate(columns):
            row[col] = repr(float(table[i, j]))
        rows.append(row)
    out = _out_dir(args)
    write_csv(out / "far_study.csv", ["far"] + columns, rows)
    manifest = _manifest(
        "far-study",
        {
            "recall": args.recall,
            "far_min": args.far_min,
            "far_max": args.far_max,
            "far_points": args.far_points,
            "shapes": [
                {"n_normal": s.n_normal, "n_anomalous": s.n_anomalous}
                for s in args.shapes
            ],
        },
        seeds=[],
        inputs=[],
    )
    _write_report(
        out,
        manifest,
        {
            "n_rows": len(rows),
            "columns": columns,
            "f1_range": [float(table.min()), float(table.max())],
        },
    )
    print(
        f"{len(rows)} x {len(columns)} expected-F1 grid written; "
        f"F1 spans [{table.min():.6f}, {table.max():.6f}]"
    )
    return 0


# ---------------------------------------------------------------------------
# synth


def _cmd_synth(args: argparse.Namespace) -> int:
    spec = load_synthetic_spec(args.spec)
    written = []
    if args.train_points:
        if not args.train_out:
            raise ValueError("--train-points requires --train-out")
        train, test = generate_train_test(spec, args.train_points)
        write_frame(train, args.train_out)
        written.append(args.train_out)
    else:
        test = generate_synthetic(spec)
    write_frame(test, args.out_file)
    written.append(args.out_file)
    if args.events_out:
        write_events(test.labels.events, args.events_out)
        written.append(args.events_out)
    manifest = _manifest(
        "synth",
        {
            "spec": {
                "total_points": spec.total_points,
                "event_lengths": list(spec.event_lengths),
                "n_channels": spec.n_channels,
                "anomaly_signal": spec.anomaly_signal.value,
                "seed": spec.seed,
                "gap_policy": spec.gap_policy,
                "signal_strength": spec.signal_strength,
            },
            "train_points": args.train_points,
        },
        seeds=[spec.seed],
        inputs=[args.spec],
    )
    sidecar = Path(args.out_file).with_name(
        Path(args.out_file).name + ".manifest.json"
    )
    payload = {
        "manifest": asdict(manifest),
        "outputs": {str(p): sha256_digest(p) for p in written},
    }
    atomic_write_text(sidecar, json.dumps(payload, indent=2, sort_keys=True) + "\n")
    print(
        f"wrote {', '.join(str(w) for w in written)}; "
        f"{test.labels.n_events} events over {test.n_points} points"
    )
    return 0


# ---------------------------------------------------------------------------
# baseline


def _cmd_baseline(args: argparse.Namespace) -> int:
    train = load_frame(args.train)
    test = load_frame(args.test)
    if test.labels is None:
        raise ValueError(f"{args.test}: test frame has no label column")
    config = PcaConfig(
        variance_target=args.variance_target,
        clip_quantiles=(args.clip_low, args.clip_high),
        smooth_window=args.smooth_window,
    )
    model = fit(train, config)
    scores = score_frame(model, test)
    threshold = _resolve_threshold(args.threshold_policy, scores, test.labels)
    preds = predictions_at_threshold(scores, threshold)
    reports = score_all(test.labels, preds, args.protocols)
    rows = [_report_row(r) for r in reports]
    out = _out_dir(args)
    model_path = Path(args.model_out) if args.model_out else out / "model.npz"
    _save_model_atomic(model, model_path)
    write_csv(
        out / "scores.csv",
        ["score"],
        ({"score": repr(float(s))} for s in scores.scores),
    )
    write_csv(out / "report.csv", REPORT_CSV_FIELDS, [_csv_row(r) for r in rows])
    manifest = _manifest(
        "baseline",
        {
            "variance_target": args.variance_target,
            "clip_quantiles": [args.clip_low, args.clip_high],
            "smooth_window": args.smooth_window,
            "threshold_policy": _policy_name(args.threshold_policy),
            "protocols": [p.value for p in args.protocols],
        },
        seeds=[],
        inputs=[args.train, args.test],
    )
    _write_report(
        out,
        manifest,
        {
            "n_components": model.n_components,
            "threshold": threshold,
            "model_path": os.path.relpath(model_path, out),
            "rows": rows,
        },
    )
    print(
        f"PCA baseline: {model.n_components} of {model.n_channels} "
        f"components, threshold {threshold:.6g}"
    )
    _print_rows(rows)
    return 0


def _save_model_atomic(model: ScoredModel, path: Path) -> None:
    # np.savez appends .npz to names lacking it, which would dodge the
    # rename; keep the temp name honest instead.
    fd, tmp = tempfile.mkstemp(
        dir=path.parent or Path("."), prefix=path.name + ".", suffix=".npz"
    )
    os.close(fd)
    try:
        model.save(tmp)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------------------
# check-labels


def _cmd_check_labels(args: argparse.Namespace) -> int:
    labels = load_label_series(args.labels)
    events = load_events(args.events, end_exclusive=args.end_exclusive)
    reconstructed = labels_from_events(events, len(labels))
    report = check_label_consistency(labels, reconstructed)
    out = _out_dir(args)
    manifest = _manifest(
        "check-labels",
        {"end_exclusive": args.end_exclusive},
        seeds=[],
        inputs=[args.labels, args.events],
    )
    _write_report(
        out,
        manifest,
        {
            "is_consistent": report.is_consistent,
            "total_points": report.total_points,
            "integrated_only_points": report.integrated_only,
            "reconstructed_only_points": report.reconstructed_only,
            "runs": [
                {
                    "start": run.segment.start,
                    "end": run.segment.end,
                    "direction": run.direction,
                }
                for run in report.runs
            ],
        },
    )
    print(report.summary())
    return 0


# ---------------------------------------------------------------------------
# parser


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tsadeval",
        description="evaluation protocols for time-series anomaly detection",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evaluate", help="score predictions or scores")
    p.add_argument("--labels", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--predictions")
    group.add_argument("--scores")
    _add_protocols(p)
    _add_threshold_policy(p)
    _add_out(p)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("attack", help="random-flag stress test")
    p.add_argument("--labels")
    p.add_argument("--synthetic-spec")
    p.add_argument("--total-points", type=int)
    p.add_argument("--segment-length", type=int)
    p.add_argument("--alpha", type=int, required=True)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    _add_protocols(p)
    _add_out(p)
    p.set_defaults(func=_cmd_attack)

    p = sub.add_parser("attack-cdf", help="analytic adjusted-F1 distribution")
    p.add_argument("--total-points", type=int, required=True)
    p.add_argument("--segment-length", type=int, required=True)
    p.add_argument("--alpha", type=int, required=True)
    p.add_argument(
        "--model",
        choices=[m.value for m in SamplingModel],
        default=SamplingModel.BERNOULLI_APPROX.value,
    )
    _add_out(p)
    p.set_defaults(func=_cmd_attack_cdf)

    p = sub.add_parser("attack-worst", help="analytic worst-case curves")
    p.add_argument("--segment-length", type=int, required=True)
    p.add_argument("--contamination", type=float, required=True)
    p.add_argument("--alpha-min", type=int, default=1)
    p.add_argument("--alpha-max", type=int, required=True)
    p.add_argument("--alpha-step", type=int, default=1)
    _add_out(p)
    p.set_defaults(func=_cmd_attack_worst)

    p = sub.add_parser("far-study", help="expected F1 across class balances")
    p.add_argument("--recall", type=float, default=0.99)
    p.add_argument("--far-min", type=float, default=0.001)
    p.add_argument("--far-max", type=float, default=0.2)
    p.add_argument("--far-points", type=int, default=50)
    p.add_argument(
        "--shapes",
        type=_parse_shapes,
        default=_parse_shapes("10000:5000,10000:1000,10000:100"),
        help="comma-separated n_normal:n_anomalous pairs",
    )
    _add_out(p)
    p.set_defaults(func=_cmd_far_study)

    p = sub.add_parser("synth", help="generate a synthetic labelled frame")
    p.add_argument("--spec", required=True)
    p.add_argument("--out-file", required=True)
    p.add_argument("--train-points", type=int, default=0)
    p.add_argument("--train-out")
    p.add_argument("--events-out")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("baseline", help="PCA reconstruction-error baseline")
    p.add_argument("--train", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--variance-target", type=float, default=0.9)
    p.add_argument("--clip-low", type=float, default=0.001)
    p.add_argument("--clip-high", type=float, default=0.999)
    p.add_argument("--smooth-window", type=int, default=5)
    p.add_argument("--model-out")
    _add_protocols(p)
    _add_threshold_policy(p)
    _add_out(p)
    p.set_defaults(func=_cmd_baseline)

    p = sub.add_parser("check-labels", help="labels vs exported event list")
    p.add_argument("--labels", required=True)
    p.add_argument("--events", required=True)
    p.add_argument(
        "--end-exclusive",
        action="store_true",
        help="event ends point one past the last anomalous index",
    )
    _add_out(p)
    p.set_defaults(func=_cmd_check_labels)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
