"""Subsample self-match experiments, ROC curves and AUC."""

from __future__ import annotations

import io
import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.stats import rankdata

from .crp import ModelPriors
from .ingest import DataError, Table, filter_fields, split_subsamples
from .matcher import DEFAULT_SCORERS, FittedTable, MatchMatrix, match_matrix
from .models import MODEL_CLASSES, count_parameters

logger = logging.getLogger(__name__)


@dataclass
class LabeledScores:
    scores: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        self.scores = np.asarray(self.scores, dtype=float).ravel()
        self.labels = np.asarray(self.labels, dtype=bool).ravel()
        if self.scores.shape != self.labels.shape:
            raise ValueError("scores and labels must have the same length")
        if np.isnan(self.scores).any():
            raise ValueError("scores must not contain NaN")

    @property
    def n_pos(self) -> int:
        return int(self.labels.sum())

    @property
    def n_neg(self) -> int:
        return int((~self.labels).sum())

    def _require_both(self):
        if self.n_pos == 0 or self.n_neg == 0:
            raise ValueError("need at least one positive and one negative example")

    @classmethod
    def from_match_matrix(cls, mm: MatchMatrix) -> "LabeledScores":
        """Diagonal cells are the matches, everything else a non-match."""
        if mm.scores.shape[0] != mm.scores.shape[1]:
            raise ValueError("self-match labelling needs a square matrix")
        return cls(mm.scores, np.eye(mm.scores.shape[0], dtype=bool))


def auc(scores: LabeledScores) -> float:
    """Probability a random positive outscores a random negative, ties counted half.

    ``-inf`` scores sort below every finite score and tie with each other.
    """
    scores._require_both()
    ranks = rankdata(scores.scores)
    n_pos, n_neg = scores.n_pos, scores.n_neg
    u = ranks[scores.labels].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


@dataclass
class RocReport:
    fpr: np.ndarray
    tpr: np.ndarray
    auc: float

    @property
    def points(self) -> list:
        return list(zip(self.fpr.tolist(), self.tpr.tolist()))

    def trapezoid_area(self) -> float:
        return float(np.sum(np.diff(self.fpr) * (self.tpr[1:] + self.tpr[:-1]) / 2.0))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("fpr,tpr\n")
        for x, y in self.points:
            buf.write(f"{x!r},{y!r}\n")
        return buf.getvalue()


def roc_curve(scores: LabeledScores) -> RocReport:
    """ROC points from a sweep over distinct score values, highest first.

    Examples sharing a score enter together, giving a diagonal segment, so
    the trapezoid area equals :func:`auc`.
    """
    scores._require_both()
    s, y = scores.scores, scores.labels
    order = np.argsort(-s, kind="mergesort")
    s, y = s[order], y[order]
    # last index of each run of equal scores
    cuts = np.flatnonzero(np.r_[s[1:] != s[:-1], True])
    tp = np.cumsum(y)[cuts]
    fp = np.cumsum(~y)[cuts]
    tpr = np.r_[0, tp] / scores.n_pos
    fpr = np.r_[0, fp] / scores.n_neg
    return RocReport(fpr.astype(float), tpr.astype(float), auc(scores))


@dataclass
class ExperimentConfig:
    priors: ModelPriors = field(default_factory=ModelPriors)
    p_same: float = 0.5
    threshold: float = 0.99
    workers: int = 1


@dataclass
class ScorerResult:
    scorer: str
    roc: RocReport
    matrix: MatchMatrix

    @property
    def auc(self) -> float:
        return self.roc.auc


@dataclass
class ExperimentReport:
    n: int
    field_names: list
    results: dict
    parameters: dict
    dropped_fields: list = field(default_factory=list)

    @property
    def aucs(self) -> dict:
        return {name: r.auc for name, r in self.results.items()}

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "fields": list(self.field_names),
            "dropped_fields": list(self.dropped_fields),
            "auc": self.aucs,
            "mean_parameters": self.parameters,
            "roc": {name: {"fpr": r.roc.fpr.tolist(), "tpr": r.roc.tpr.tolist()}
                    for name, r in self.results.items()},
        }

    def summary_text(self) -> str:
        width = max(len(s) for s in self.results) if self.results else 6
        lines = [f"{'scorer':<{width}}  auc", f"{'-' * width}  ------"]
        for name, r in self.results.items():
            lines.append(f"{name:<{width}}  {r.auc:.4f}")
        lines.append("")
        lines.append(f"{'model':<{width}}  mean parameters (n={self.n})")
        for model, value in self.parameters.items():
            lines.append(f"{model:<{width}}  {value:.1f}")
        return "\n".join(lines) + "\n"


def mean_parameters(*tables: FittedTable) -> dict:
    """Average :func:`count_parameters` per model class over all given fields."""
    out = {}
    for model in MODEL_CLASSES:
        counts = [count_parameters(s) for t in tables for s in t.stats(model)]
        out[model] = float(np.mean(counts)) if counts else 0.0
    return out


def self_match_experiment(table: Table, n: int, scorers: Sequence[str] = DEFAULT_SCORERS,
                          config: ExperimentConfig | None = None) -> ExperimentReport:
    """Filter, split into first/last ``n`` rows, and match the halves.

    ``table`` is expected to hold normalized values (see ``load_table``).
    Field ``i`` of the first half is the only true match of field ``i`` of
    the second half.
    """
    config = config or ExperimentConfig()
    filtered = filter_fields(table, config.threshold)
    dropped = [name for name in table.names if name not in set(filtered.names)]
    if len(filtered.fields) < 2:
        raise DataError(
            f"{len(filtered.fields)} field(s) left after filtering; at least 2 are needed"
        )
    first, last = split_subsamples(filtered, n)
    fa, fb = FittedTable(first), FittedTable(last)
    results = {}
    for scorer in scorers:
        logger.info("scoring %s at n=%d", scorer, n)
        mm = match_matrix(fa, fb, scorer, config.priors, config.p_same, config.workers)
        results[scorer] = ScorerResult(scorer, roc_curve(LabeledScores.from_match_matrix(mm)), mm)
    return ExperimentReport(n, filtered.names, results, mean_parameters(fa, fb), dropped)


@dataclass
class SweepReport:
    sizes: list
    scorers: list
    aucs: dict = field(default_factory=dict)
    errors: dict = field(default_factory=dict)
    parameters: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "sizes": list(self.sizes),
            "scorers": list(self.scorers),
            "auc": {str(n): v for n, v in self.aucs.items()},
            "mean_parameters": {str(n): v for n, v in self.parameters.items()},
            "errors": {str(n): v for n, v in self.errors.items()},
        }

    def to_text(self) -> str:
        """Scorers down, sizes across, in the layout of an AUC-by-size table."""
        if not self.sizes:
            return ""
        width = max([len("model")] + [len(s) for s in self.scorers])
        head = f"{'model':<{width}}" + "".join(f"  {n:>8}" for n in self.sizes)
        lines = [head, "-" * len(head)]
        for scorer in self.scorers:
            cells = []
            for n in self.sizes:
                if n in self.aucs:
                    cells.append(f"  {self.aucs[n][scorer]:>8.2f}")
                else:
                    cells.append(f"  {'error':>8}")
            lines.append(f"{scorer:<{width}}" + "".join(cells))
        for n, msg in self.errors.items():
            lines.append(f"n={n}: {msg}")
        return "\n".join(lines) + "\n"


def size_sweep(table: Table, sizes: Sequence[int], scorers: Sequence[str] = DEFAULT_SCORERS,
               config: ExperimentConfig | None = None) -> SweepReport:
    """Run :func:`self_match_experiment` at each size; failures are recorded, not raised."""
    report = SweepReport(list(sizes), list(scorers))
    for n in sizes:
        try:
            exp = self_match_experiment(table, n, scorers, config)
        except (DataError, ValueError) as exc:
            logger.warning("size %d failed: %s", n, exc)
            report.errors[n] = str(exc)
            continue
        report.aucs[n] = exp.aucs
        report.parameters[n] = exp.parameters
    return report
