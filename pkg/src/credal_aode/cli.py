"""Command-line interface: cross-validated evaluation and per-instance inspection.

Exit codes: 0 success, 1 data error, 2 configuration error.  All randomness
(folds, shuffles, multistart) flows from the single seed, so identical
configurations produce byte-identical reports.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import warnings
from dataclasses import dataclass

import numpy as np

from .credal import BMA_STAR, COMP_STAR, CredalSpec, predict_credal
from .dataset import (
    ConfigurationError,
    DataError,
    encode,
    fit_codec,
    load_csv,
    make_folds,
)
from .ensemble import (
    EmptyEnsembleError,
    bma_weights,
    fit_ensemble,
    model_posteriors,
    normalized_compression,
    raw_compression,
)
from .evaluation import ALL_CLASSIFIERS, cross_validate

SCHEMA_VERSION = 1
REPORT_FIELDS = (
    "classifier", "accuracy", "brier", "determinacy", "single_accuracy",
    "set_accuracy", "output_size", "discounted_accuracy", "u65", "u80",
    "n", "k", "folds", "runs", "seed", "epsilon",
)


@dataclass
class RunConfig:
    data: str
    class_column: str
    classifiers: list[str]
    folds: int = 5
    runs: int = 10
    seed: int = 42
    epsilon: float = 0.01
    pruning_exponent: float = 4.0
    out: str | None = None
    fmt: str = "json"
    jobs: int = 1

    def validate(self, k: int) -> None:
        if self.folds < 2:
            raise ConfigurationError("--folds must be >= 2")
        if self.runs < 1:
            raise ConfigurationError("--runs must be >= 1")
        if not 0.0 < self.epsilon < 1.0 / (k + 1):
            raise ConfigurationError(
                f"--epsilon must lie in (0, 1/(k+1)) = (0, {1.0 / (k + 1):.6g}) "
                f"for k={k} features"
            )
        if self.pruning_exponent <= 0:
            raise ConfigurationError("--pruning-exponent must be positive")
        unknown = [c for c in self.classifiers if c not in ALL_CLASSIFIERS]
        if unknown:
            raise ConfigurationError(
                f"unknown classifier(s) {', '.join(unknown)}; "
                f"valid names: {', '.join(ALL_CLASSIFIERS)}"
            )


def _default_seed() -> int:
    return int(os.environ.get("CREDAL_AODE_SEED", "42"))


def _report_payload(reports, order) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "classifiers": [reports[name].metric_dict() for name in order],
    }


def _write_report(payload: dict, config: RunConfig) -> None:
    if config.out is None:
        return
    if config.fmt == "json":
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
        with open(config.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        with open(config.out, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(REPORT_FIELDS)
            for block in payload["classifiers"]:
                writer.writerow(
                    ["" if block[f] is None else block[f] for f in REPORT_FIELDS]
                )


def _fmt(value) -> str:
    return "-" if value is None else f"{value:.4f}"


def cmd_eval(config: RunConfig) -> int:
    table = load_csv(config.data, config.class_column)
    config.validate(k=len(table.feature_indices))
    codec = fit_codec(table)
    ds = encode(table, codec)
    plan = make_folds(ds, config.runs, config.folds, config.seed)
    reports = cross_validate(
        table, plan, config.classifiers,
        epsilon=config.epsilon, pruning_exponent=config.pruning_exponent,
        seed=config.seed, jobs=config.jobs,
    )
    payload = _report_payload(reports, config.classifiers)
    _write_report(payload, config)
    for name in config.classifiers:
        r = reports[name]
        print(
            f"{name}: accuracy={_fmt(r.accuracy)} brier={_fmt(r.brier)} "
            f"determinacy={_fmt(r.determinacy)} u65={_fmt(r.u65)} u80={_fmt(r.u80)}"
        )
    return 0


def _read_instances(path: str, table, codec) -> np.ndarray:
    """Encode feature rows of a CSV against a fitted codec.

    The file must carry a header naming every feature column (extra columns,
    including the class, are ignored).  Unseen values map to the uniform
    fallback (-1) with a warning.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path}: empty file")
        missing = [n for n in codec.feature_names if n not in header]
        if missing:
            raise DataError(f"{path}: missing feature column(s) {', '.join(missing)}")
        positions = [header.index(n) for n in codec.feature_names]
        kinds = {table.column_names[j]: table.kinds[j] for j in table.feature_indices}
        col_of = {table.column_names[j]: j for j in table.feature_indices}
        rows = []
        for i, raw in enumerate(reader):
            if not raw:
                continue
            if len(raw) != len(header):
                raise DataError(
                    f"{path}: row {i + 2} has {len(raw)} cells, expected {len(header)}"
                )
            encoded = []
            for name, pos in zip(codec.feature_names, positions):
                j = col_of[name]
                cell = raw[pos].strip()
                if cell.lower() in ("", "?", "na"):
                    value = codec.fills[j]
                elif kinds[name] == "numeric":
                    try:
                        value = float(cell)
                    except ValueError:
                        raise DataError(
                            f"{path}: row {i + 2}: {cell!r} is not numeric "
                            f"(column {name})"
                        )
                else:
                    value = cell
                if kinds[name] == "numeric":
                    encoded.append(int(np.searchsorted(codec.cuts[j], value)))
                else:
                    code = codec.cat_maps[j].get(value, -1)
                    if code < 0:
                        warnings.warn(
                            f"row {i + 2}: unseen value {value!r} for "
                            f"column {name}; using uniform fallback"
                        )
                    encoded.append(int(code))
            rows.append(encoded)
    if not rows:
        raise DataError(f"{path}: no instance rows")
    return np.asarray(rows, dtype=np.int64)


def cmd_predict(config: RunConfig, instances_path: str, method: str) -> int:
    table = load_csv(config.data, config.class_column)
    config.validate(k=len(table.feature_indices))
    codec = fit_codec(table)
    train = encode(table, codec)
    models, null, scores = fit_ensemble(train)
    X = _read_instances(instances_path, table, codec)

    if method == "bma":
        weights = bma_weights(scores, config.pruning_exponent)
        variant = BMA_STAR
        spec = CredalSpec(k=train.k, epsilon=config.epsilon, includes_null=False)
    else:
        try:
            weights = normalized_compression(raw_compression(scores, config.epsilon))
        except EmptyEnsembleError:
            weights = np.zeros(train.k)
        variant = COMP_STAR
        spec = CredalSpec(k=train.k, epsilon=config.epsilon, includes_null=True)

    print("model weights: [%s]" % ", ".join(f"{w:.6f}" for w in weights))
    posts = model_posteriors(models, X)
    for i in range(X.shape[0]):
        pred = predict_credal(
            variant, models, scores, spec,
            posteriors=posts[:, i, :], null_model=null,
            pruning_exponent=config.pruning_exponent, seed=config.seed,
        )
        posterior = ", ".join(
            f"{label}={p:.6f}" for label, p in zip(train.class_labels, pred.posterior)
        )
        classes = ", ".join(train.class_labels[c] for c in pred.classes)
        print(
            f"instance {i + 1}: posterior=[{posterior}] classes={{{classes}}} "
            f"prior_dependent={'true' if pred.prior_dependent else 'false'}"
        )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="credal-aode",
        description="AODE ensembles with credal (set-of-priors) extensions",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--data", required=True, help="CSV file with a header row")
        p.add_argument("--class-col", required=True, help="name of the class column")
        p.add_argument("--seed", type=int, default=None,
                       help="random seed (default: $CREDAL_AODE_SEED or 42)")
        p.add_argument("--epsilon", type=float, default=0.01,
                       help="credal lower bound / null-model prior (default 0.01)")
        p.add_argument("--pruning-exponent", type=float, default=4.0,
                       help="prune models below max-likelihood/10^e (default 4)")

    pe = sub.add_parser("eval", help="cross-validated evaluation")
    add_common(pe)
    pe.add_argument("--classifiers", default="aode,comp-aode,comp-aode-star",
                    help="comma-separated list (%s)" % ", ".join(ALL_CLASSIFIERS))
    pe.add_argument("--folds", type=int, default=5)
    pe.add_argument("--runs", type=int, default=10)
    pe.add_argument("--out", default=None, help="report file path")
    pe.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")
    pe.add_argument("--jobs", type=int, default=os.cpu_count() or 1,
                    help="parallel (run,fold) workers")

    pp = sub.add_parser("predict", help="per-instance credal inspection")
    add_common(pp)
    pp.add_argument("--instances", required=True,
                    help="CSV of feature rows to classify")
    pp.add_argument("--method", choices=("bma", "comp"), default="comp",
                    help="weighting scheme for the determinate counterpart")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    seed = args.seed if args.seed is not None else _default_seed()
    try:
        if args.command == "eval":
            config = RunConfig(
                data=args.data, class_column=args.class_col,
                classifiers=[c.strip() for c in args.classifiers.split(",") if c.strip()],
                folds=args.folds, runs=args.runs, seed=seed,
                epsilon=args.epsilon, pruning_exponent=args.pruning_exponent,
                out=args.out, fmt=args.fmt, jobs=args.jobs,
            )
            return cmd_eval(config)
        config = RunConfig(
            data=args.data, class_column=args.class_col,
            classifiers=["aode"], seed=seed, epsilon=args.epsilon,
            pruning_exponent=args.pruning_exponent,
        )
        return cmd_predict(config, args.instances, args.method)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
