"""Command line entry points: mine, train, eval and oracle."""
from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import dataset as ds
from . import formats
from .bounds import as_fraction
from .config import Ablation, load_config, parse_ablations
from .oracle import DEFAULT_BUDGET, brute_force
from .rulelist import Metrics, evaluate
from .search import SearchPolicy
from .solver import Solver, Status
import prooflist.errors as errors

log = logging.getLogger(__name__)

EXIT_CODES = {
    Status.CERTIFIED_OPTIMAL: 0,
    Status.INCOMPLETE_TIME: 2,
    Status.INCOMPLETE_MEMORY: 3,
}
EXIT_ERROR = 1

MINE_MANIFEST = "manifest.txt"


class _ArgumentParser(argparse.ArgumentParser):
    """Usage errors exit with 1; 2 is reserved for runs that hit their time cap."""

    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _parse_bins(values: Sequence[str]) -> Dict[str, List[int]]:
    bins = {}
    for value in values:
        column, sep, edges = value.partition("=")
        if not sep or not edges:
            raise ValueError(f"Expected COLUMN=E0,E1,... but got '{value}'")
        bins[column] = [int(e) for e in edges.split(",")]
    return bins


def _split_names(values: Optional[Sequence[str]]) -> Optional[List[str]]:
    if values is None:
        return None
    return [name for value in values for name in value.split(",") if name]


def cmd_mine(args: argparse.Namespace) -> int:
    table = ds.load_categorical_csv(args.csv, args.label)
    columns = _split_names(args.columns)
    if columns:
        table = ds.select_columns(table, columns)
    for column, edges in _parse_bins(args.bin or []).items():
        table = ds.discretize(table, column, edges)

    indicator_columns = _split_names(args.indicator) or []
    negate_columns = _split_names(args.negate)
    include_negations = args.negations or negate_columns is not None

    def mine(train: ds.CategoricalTable) -> ds.LabeledDataset:
        antecedents = ds.mine_antecedents(
            train,
            max_clauses=args.max_clauses,
            include_negations=include_negations,
            lambda_min=args.lambda_min,
            negate_columns=negate_columns,
            indicator_columns=indicator_columns,
        )
        return ds.LabeledDataset.from_antecedents(antecedents, train.labels(), lambda_min=args.lambda_min)

    os.makedirs(args.outdir, exist_ok=True)
    outputs = []
    if args.folds == 1:
        train = table
        if args.resample_minority:
            train = ds.resample_minority_class(table, np.random.default_rng(args.seed))
        mined = mine(train)
        outputs.extend(formats.write_dataset(os.path.join(args.outdir, args.name), mined))
        print(f"{args.name}: {mined.n_antecedents} antecedents over {mined.n_samples} samples")
    else:
        for fold in ds.split_folds(table, args.folds, args.seed, args.resample_minority):
            prefix = os.path.join(args.outdir, f"{args.name}_fold{fold.index}")
            mined = mine(fold.train)
            outputs.extend(formats.write_dataset(prefix + "_train", mined))

            test_antecedents = mined.antecedents.evaluate_on(fold.test)
            test = ds.LabeledDataset.from_antecedents(test_antecedents, fold.test.labels())
            outputs.extend(formats.write_dataset(prefix + "_test", test))
            print(f"fold {fold.index}: {mined.n_antecedents} antecedents, "
                  f"{mined.n_samples} training and {test.n_samples} test samples")

    formats.write_manifest(
        os.path.join(args.outdir, MINE_MANIFEST),
        {
            "subcommand": "mine",
            "csv": args.csv,
            "label_column": args.label,
            "rows": table.n_rows,
            "dropped_rows": table.dropped_rows,
            "columns": columns or table.attributes,
            "bins": args.bin or [],
            "max_clauses": args.max_clauses,
            "negations": include_negations,
            "negate_columns": negate_columns or [],
            "indicator_columns": indicator_columns,
            "lambda_min": args.lambda_min,
            "folds": args.folds,
            "seed": args.seed,
            "resample_minority": args.resample_minority,
            "outputs": outputs,
        },
    )
    return 0


def _mined_lambda_min(rule_path: str) -> Optional[str]:
    manifest = os.path.join(os.path.dirname(os.path.abspath(rule_path)), MINE_MANIFEST)
    if not os.path.exists(manifest):
        return None
    return formats.read_manifest(manifest).get("lambda_min")


def cmd_train(args: argparse.Namespace) -> int:
    flagged = [a for a in Ablation if getattr(args, a.value)]
    config = load_config(
        args.config,
        regularization=args.regularization,
        policy=args.policy,
        max_nodes=args.max_nodes,
        max_seconds=args.max_seconds,
        trace_sample_interval=args.trace_interval,
        verbosity=args.verbose or None,
    )
    if flagged:
        config.ablations = config.ablations | parse_ablations(flagged)

    dataset = formats.load_dataset(args.rules, args.labels, args.minority)
    lambda_min = _mined_lambda_min(args.rules)
    if lambda_min is not None:
        dataset.lambda_min = as_fraction(lambda_min)

    trace_file = open(args.trace, "w", newline="") if args.trace else None
    try:
        writer = formats.TraceWriter(trace_file) if trace_file else None
        solver = Solver(
            dataset,
            config,
            trace_clock=(lambda: 0.0) if args.no_timing else time.perf_counter,
            on_trace=writer.write if writer else None,
        )
        result = solver.solve()
    finally:
        if trace_file:
            trace_file.close()

    antecedents = dataset.antecedents
    print(result.best_rule_list.to_text(antecedents))
    print(f"objective={result.best_objective:.6f} mistakes={result.best_mistakes} "
          f"status={result.status.value} gap={result.optimality_gap:.6f} "
          f"lower_bound_evaluations={result.counters.lower_bound_evaluations}")

    if args.model:
        formats.write_model(args.model, result.best_rule_list, antecedents)
    manifest_target = args.model or args.trace
    if manifest_target:
        formats.write_manifest(
            manifest_target + ".manifest",
            {
                "subcommand": "train",
                "rules": args.rules,
                "labels": args.labels,
                "minority": args.minority,
                "regularization": config.regularization,
                "policy": config.policy.value,
                "ablations": sorted(a.value for a in config.ablations),
                "max_nodes": config.max_nodes,
                "max_seconds": config.max_seconds,
                "trace_sample_interval": config.trace_sample_interval,
                "model": args.model,
                "trace": args.trace,
                "status": result.status.value,
                "objective": result.best_objective_exact,
                "optimality_gap": result.optimality_gap,
                "log10_remaining_coarse": result.log10_remaining_coarse,
                **{f"counter_{k}": v for k, v in vars(result.counters).items()},
            },
        )
    return EXIT_CODES[result.status]


def cmd_eval(args: argparse.Namespace) -> int:
    antecedents = formats.read_rule_file(args.rules)
    labels = formats.read_label_file(args.labels)
    if labels.length != antecedents.n_samples:
        raise errors.FormatError(
            f"labels cover {labels.length} samples but the rules cover {antecedents.n_samples}", args.labels, 1
        )
    rule_list = formats.read_model(args.model, antecedents)
    metrics = evaluate(rule_list, antecedents, labels)
    print(Metrics.csv_header())
    print(metrics.csv_row())
    return 0


def cmd_oracle(args: argparse.Namespace) -> int:
    dataset = formats.load_dataset(args.rules, args.labels)
    result = brute_force(dataset, args.regularization, args.k_cap, args.budget)
    print(f"min_objective={float(result.min_objective):.6f} ({result.min_objective}) "
          f"evaluated={result.evaluated} witnesses={len(result.witnesses)}")
    for witness in result.witnesses:
        print(witness.to_line(dataset.antecedents))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="prooflist", description="Learn certifiably optimal rule lists.")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for progress, -vv for debug output")
    sub = parser.add_subparsers(dest="command", required=True)

    mine = sub.add_parser("mine", help="Mine antecedents from a categorical CSV and write rule/label files")
    mine.add_argument("csv")
    mine.add_argument("--label", required=True, help="Name of the binary label column")
    mine.add_argument("--max-clauses", type=int, choices=(1, 2), default=1)
    mine.add_argument("--negations", action="store_true", help="Add negated single-clause antecedents")
    mine.add_argument("--negate", action="append", metavar="COL",
                      help="Only negate these columns (implies --negations)")
    mine.add_argument("--indicator", action="append", metavar="COL",
                      help="Columns of 0/1 flags; only the set flag becomes an antecedent")
    mine.add_argument("--columns", action="append", metavar="COL", help="Keep only these attributes")
    mine.add_argument("--bin", action="append", metavar="COL=E0,E1,...", help="Integer bin edges for a column")
    mine.add_argument("--lambda-min", type=float, default=0.0)
    mine.add_argument("--folds", type=int, default=1)
    mine.add_argument("--seed", type=int, default=0)
    mine.add_argument("--resample-minority", action="store_true")
    mine.add_argument("--name", default="data", help="Prefix of the written files")
    mine.add_argument("--outdir", default=".")
    mine.set_defaults(func=cmd_mine)

    train = sub.add_parser("train", help="Search for an optimal rule list")
    train.add_argument("rules")
    train.add_argument("labels")
    train.add_argument("--minority", help="Minority file; recomputed from the rules when absent")
    train.add_argument("-r", "--regularization", help="Penalty per rule (lambda)")
    train.add_argument("--policy", choices=[p.value for p in SearchPolicy])
    train.add_argument("--max-nodes", type=int)
    train.add_argument("--max-seconds", type=float)
    train.add_argument("--trace-interval", type=int)
    train.add_argument("--trace", help="Write the trace CSV here")
    train.add_argument("--model", help="Write the model here")
    train.add_argument("--config", help="JSON solver configuration")
    train.add_argument("--no-timing", action="store_true", help="Write 0.0 for elapsed time in the trace")
    for ablation in Ablation:
        train.add_argument("--" + ablation.value.replace("_", "-"), dest=ablation.value, action="store_true")
    train.set_defaults(func=cmd_train)

    ev = sub.add_parser("eval", help="Score a model on a rule/label file pair")
    ev.add_argument("model")
    ev.add_argument("rules")
    ev.add_argument("labels")
    ev.set_defaults(func=cmd_eval)

    oracle = sub.add_parser("oracle", help="Exhaustively enumerate rule lists on a small instance")
    oracle.add_argument("rules")
    oracle.add_argument("labels")
    oracle.add_argument("-r", "--regularization", required=True)
    oracle.add_argument("--k-cap", type=int)
    oracle.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    oracle.set_defaults(func=cmd_oracle)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")

    try:
        return args.func(args)
    except (errors.ProoflistError, ValueError, OSError) as e:
        log.error("%s", e)
        return EXIT_ERROR
