"""Command-line interface: ``crpmatch {match,eval,inspect,normalize,generate}``."""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .crp import ModelPriors
from .evaluation import ExperimentConfig, self_match_experiment, size_sweep
from .ingest import DataError, filter_fields, load_table, write_table
from .matcher import ALL_SCORERS, DEFAULT_SCORERS, MLE_SCORERS, FittedTable, match_matrix
from .models import fit_positional, pool_positions
from .patterns import find_anomalies, inspect_patterns
from .synthetic import MIXED_FIELDS, generate_synthetic_table

logger = logging.getLogger("crpmatch")

FORMAT_VERSION = 1
EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    alpha: float = 3.0
    lam: float = 4.0
    beta: float = 3.0
    p_same: float = 0.5
    threshold: float = 0.99
    scorers: list = field(default_factory=lambda: list(DEFAULT_SCORERS))
    n: int | None = None
    sizes: list = field(default_factory=list)
    seed: int = 0
    workers: int = 1

    def validate(self) -> "RunConfig":
        try:
            ModelPriors(self.alpha, self.lam, self.beta)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        if not 0 < self.p_same < 1:
            raise UsageError(f"--prior-same must be in (0, 1), got {self.p_same}")
        if not 0 < self.threshold <= 1:
            raise UsageError(f"--threshold must be in (0, 1], got {self.threshold}")
        unknown = [s for s in self.scorers if s not in ALL_SCORERS]
        if unknown:
            raise UsageError(f"unknown scorer(s) {', '.join(unknown)}; choose from {', '.join(ALL_SCORERS)}")
        if self.n is not None and self.n < 1:
            raise UsageError("--n must be positive")
        if any(s < 1 for s in self.sizes):
            raise UsageError("--sizes must be positive")
        if self.workers < 1:
            raise UsageError("--workers must be at least 1")
        return self

    @property
    def priors(self) -> ModelPriors:
        return ModelPriors(self.alpha, self.lam, self.beta)

    def experiment(self) -> ExperimentConfig:
        return ExperimentConfig(self.priors, self.p_same, self.threshold, self.workers)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


_FLAG_TO_FIELD = {
    "alpha": "alpha", "lambda": "lam", "beta": "beta", "prior_same": "p_same",
    "threshold": "threshold", "scorers": "scorers", "n": "n", "sizes": "sizes",
    "seed": "seed", "workers": "workers",
}


def _int_list(text: str) -> list:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _str_list(text: str) -> list:
    return [x.strip() for x in text.split(",") if x.strip()]


def build_config(args) -> RunConfig:
    """Defaults, then the JSON config file, then explicit flags."""
    values = {}
    if getattr(args, "config", None):
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config file {args.config}: {exc}") from None
        names = {f.name for f in dataclasses.fields(RunConfig)}
        for key, value in data.items():
            key = _FLAG_TO_FIELD.get(key.replace("-", "_"), key)
            if key not in names:
                raise UsageError(f"unknown config key {key!r}")
            values[key] = value
    for flag, name in _FLAG_TO_FIELD.items():
        value = getattr(args, flag, None)
        if value is not None:
            values[name] = value
    if getattr(args, "mle", False):
        scorers = list(values.get("scorers", DEFAULT_SCORERS))
        values["scorers"] = scorers + [s for s in MLE_SCORERS if s not in scorers]
    if "workers" not in values:
        values["workers"] = os.cpu_count() or 1
    return RunConfig(**values).validate()


def _provenance(config: RunConfig, **extra) -> dict:
    # workers does not affect results; leaving it out keeps outputs identical
    # across machines.
    cfg = config.to_dict()
    cfg.pop("workers")
    return {"format_version": FORMAT_VERSION, "crpmatch_version": __version__, "config": cfg, **extra}


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def cmd_match(args, config: RunConfig) -> int:
    table_a = filter_fields(load_table(args.table_a), config.threshold)
    table_b = filter_fields(load_table(args.table_b), config.threshold)
    for label, t in (("first", table_a), ("second", table_b)):
        if not t.fields:
            raise DataError(f"no fields of the {label} table survive filtering")
    fa, fb = FittedTable(table_a), FittedTable(table_b)
    out = Path(args.out)
    summary = _provenance(config, inputs=[str(args.table_a), str(args.table_b)], top_matches={})
    for scorer in config.scorers:
        mm = match_matrix(fa, fb, scorer, config.priors, config.p_same, config.workers)
        mm.config = summary["config"]
        _write(out / f"match_{scorer}.tsv", mm.to_tsv())
        payload = mm.to_dict()
        payload["format_version"] = FORMAT_VERSION
        _write(out / f"match_{scorer}.json", _dump(payload))
        summary["top_matches"][scorer] = [
            {"field": a, "best_match": b, "score": s} for a, b, s in mm.top_matches()
        ]
        print(f"[{scorer}]")
        for a, b, s in mm.top_matches():
            print(f"  {a} -> {b}  ({s:.4g})")
    _write(out / "match_summary.json", _dump(summary))
    return 0


def cmd_eval(args, config: RunConfig) -> int:
    table = load_table(args.table)
    out = Path(args.out)
    exp_config = config.experiment()
    n = config.n
    if n is None:
        n = table.record_count // 2
    if n < 1:
        raise DataError("the table has fewer than 2 records")
    report = self_match_experiment(table, n, config.scorers, exp_config)
    payload = _provenance(config, input=str(args.table), **report.to_dict())
    _write(out / "report.json", _dump(payload))
    for scorer, result in report.results.items():
        _write(out / f"roc_{scorer}.csv", result.roc.to_csv())
    text = report.summary_text()
    _write(out / "auc_summary.txt", text)
    print(text, end="")
    if config.sizes:
        sweep = size_sweep(table, config.sizes, config.scorers, exp_config)
        _write(out / "size_sweep.json", _dump(_provenance(config, input=str(args.table), **sweep.to_dict())))
        _write(out / "size_sweep.txt", sweep.to_text())
        print()
        print(sweep.to_text(), end="")
    return 0


def cmd_inspect(args, config: RunConfig) -> int:
    table = load_table(args.table)
    try:
        column = table[args.field]
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    stats = fit_positional(column.values)
    positional = inspect_patterns(stats, config.priors, config.threshold)
    apositional = inspect_patterns(pool_positions(stats), config.priors, config.threshold)
    anomalies = find_anomalies(column.values, stats, config.threshold)
    payload = _provenance(
        config, input=str(args.table), field=args.field,
        positional=positional.to_dict(), apositional=apositional.to_dict(),
        anomalies=[dataclasses.asdict(a) for a in anomalies],
    )
    out = Path(args.out)
    _write(out / f"inspect_{args.field}.json", _dump(payload))
    print(f"field {args.field!r}: {stats.total} values")
    for p in positional.positions:
        if p.dominant:
            print(f"  position {p.position}: always {''.join(p.dominant)!r}")
    for p in apositional.positions:
        top = sorted(p.frequencies.items(), key=lambda kv: -kv[1])[:5]
        print("  pooled characters: " + ", ".join(f"{a!r}={f:.3f}" for a, f in top))
    rows = sorted({a.row for a in anomalies})
    print(f"  {len(rows)} value(s) with rare characters")
    for r in rows[:20]:
        print(f"    row {r + 1}: {column.values[r]!r}")
    return 0


def cmd_normalize(args, config: RunConfig) -> int:
    table = load_table(args.table)
    if args.filter:
        table = filter_fields(table, config.threshold)
    out = Path(args.out)
    if out.suffix.lower() != ".csv":
        out = out / (Path(args.table).stem + ".normalized.csv")
    out.parent.mkdir(parents=True, exist_ok=True)
    write_table(table, out)
    print(f"wrote {out} ({len(table.fields)} fields, {table.record_count} records)")
    return 0


def cmd_generate(args, config: RunConfig) -> int:
    if args.rows < 1:
        raise UsageError("--rows must be positive")
    table = generate_synthetic_table(MIXED_FIELDS, args.rows, config.seed)
    out = Path(args.out)
    if out.suffix.lower() != ".csv":
        out = out / f"synthetic_seed{config.seed}.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    write_table(table, out)
    print(f"wrote {out} ({len(table.fields)} fields, {table.record_count} records, seed {config.seed})")
    return 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("model and run options")
    g.add_argument("--alpha", type=float, help="CRP concentration (default 3.0)")
    g.add_argument("--lambda", type=float, dest="lambda", help="Poisson mean string length (default 4.0)")
    g.add_argument("--beta", type=float, help="character Dirichlet prior (default 3.0)")
    g.add_argument("--prior-same", type=float, dest="prior_same", help="prior P(same model) (default 0.5)")
    g.add_argument("--threshold", type=float, help="near-constant field cutoff (default 0.99)")
    g.add_argument("--scorers", type=_str_list, help=f"comma-separated subset of: {', '.join(ALL_SCORERS)}")
    g.add_argument("--mle", action="store_true", help="also run the maximum-likelihood scorers")
    g.add_argument("--n", type=int, help="subsample size (default: half the records)")
    g.add_argument("--sizes", type=_int_list, help="comma-separated subsample sizes for a sweep")
    g.add_argument("--seed", type=int, help="random seed (synthetic data)")
    g.add_argument("--workers", type=int, help="parallel scoring processes (default: CPU count)")
    g.add_argument("--config", help="JSON file with any of the options above; flags win")
    g.add_argument("--out", default="crpmatch_out", help="output directory (default crpmatch_out)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="crpmatch", description="Instance-based schema matching with CRP string models.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("match", help="score every field of one CSV against every field of another")
    p.add_argument("table_a")
    p.add_argument("table_b")
    _add_common(p)
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("eval", help="subsample self-match experiment with ROC/AUC")
    p.add_argument("table")
    _add_common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("inspect", help="character patterns and anomalies of one field")
    p.add_argument("table")
    p.add_argument("field")
    _add_common(p)
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("normalize", help="write the normalized table as CSV")
    p.add_argument("table")
    p.add_argument("--filter", action="store_true", help="also drop near-constant fields")
    _add_common(p)
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("generate", help="write the seeded synthetic mixed-format table")
    p.add_argument("--rows", type=int, default=10000)
    _add_common(p)
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = build_config(args)
        return args.func(args, config)
    except UsageError as exc:
        print(f"crpmatch: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, OSError, UnicodeError) as exc:
        print(f"crpmatch: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
