"""Pairwise match posteriors and full field-by-field match matrices."""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .baselines import BASELINE_SCORERS, FieldDistribution, baseline_score, orient
from .crp import ModelPriors
from .ingest import FieldColumn, Table
from .mle import mle_log_likelihood_ratio
from .models import MODEL_CLASSES, Stats, fit_stats, log_evidence_ratio

BAYESIAN_SCORERS = MODEL_CLASSES
MLE_SCORERS = tuple(f"mle-{m}" for m in MODEL_CLASSES)
ALL_SCORERS = BAYESIAN_SCORERS + MLE_SCORERS + BASELINE_SCORERS
DEFAULT_SCORERS = BAYESIAN_SCORERS + BASELINE_SCORERS


def _check_prior(p_same: float) -> None:
    if not 0 < p_same < 1:
        raise ValueError(f"p_same must lie strictly between 0 and 1, got {p_same}")


def log_posterior_odds(log_px: float, log_py: float, log_pxy: float,
                       p_same: float = 0.5) -> float:
    """log [P(S | X+Y) / P(not S | X+Y)]."""
    _check_prior(p_same)
    if not math.isfinite(log_pxy):
        raise ValueError("joint log probability of the merged fields must be finite")
    return (log_pxy - (log_px + log_py)) + (math.log(p_same) - math.log1p(-p_same))


def match_probability(log_px: float, log_py: float, log_pxy: float,
                      p_same: float = 0.5) -> float:
    """Posterior probability that a single model generated both fields.

    Evaluated as a logistic of the posterior log-odds, which is the
    two-term log-sum-exp in closed form.  Log-odds beyond about -745 still
    underflow to 0.0 in double precision; rank on :func:`log_posterior_odds`
    when that matters.
    """
    return _logistic(log_posterior_odds(log_px, log_py, log_pxy, p_same))


def _logistic(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


def scorer_kind(scorer: str) -> str:
    if scorer in BAYESIAN_SCORERS or scorer in MLE_SCORERS:
        return "log-odds"
    if scorer in BASELINE_SCORERS:
        return "similarity"
    raise ValueError(f"unknown scorer {scorer!r}; expected one of {', '.join(ALL_SCORERS)}")


def _model_of(scorer: str) -> str:
    return scorer[4:] if scorer.startswith("mle-") else scorer


def pair_log_odds(a: Stats, b: Stats, priors: ModelPriors = ModelPriors(),
                  p_same: float = 0.5, mle: bool = False) -> float:
    """Posterior log-odds of a shared model from two fitted stats.

    Work is proportional to the number of nonzero counts in ``a`` and ``b``;
    the merged statistics are never materialized.
    """
    _check_prior(p_same)
    ratio = mle_log_likelihood_ratio(a, b) if mle else log_evidence_ratio(a, b, priors)
    return ratio + (math.log(p_same) - math.log1p(-p_same))


def score_pair(field_a, field_b, model: str = "apositional",
               priors: ModelPriors = ModelPriors(), p_same: float = 0.5) -> float:
    """Match probability of two fields under one model class (``mle-*`` allowed)."""
    values_a = field_a.values if isinstance(field_a, FieldColumn) else field_a
    values_b = field_b.values if isinstance(field_b, FieldColumn) else field_b
    kind = _model_of(model)
    a, b = fit_stats(kind, values_a), fit_stats(kind, values_b)
    return _logistic(pair_log_odds(a, b, priors, p_same, mle=model.startswith("mle-")))


class FittedTable:
    """Per-field statistics for one table, each fitted at most once."""

    def __init__(self, table: Table):
        if not table.fields:
            raise ValueError("table has no fields")
        self.table = table
        self._stats: dict = {}
        self._dists: list | None = None

    @property
    def names(self) -> list:
        return self.table.names

    def stats(self, kind: str) -> list:
        if kind not in self._stats:
            self._stats[kind] = [fit_stats(kind, c.values) for c in self.table.fields]
        return self._stats[kind]

    def distributions(self) -> list:
        # Derived from the discrete stats so baselines and models share one
        # pass over the data.
        if self._dists is None:
            self._dists = [FieldDistribution.from_counts(s.counts) for s in self.stats("discrete")]
        return self._dists


@dataclass
class MatchMatrix:
    """Scores for every (row field, column field) pair; higher means more alike.

    For probabilistic scorers ``scores`` holds posterior log-odds, which rank
    identically to the posterior probability but never saturate.
    """

    scorer: str
    row_names: list
    col_names: list
    scores: np.ndarray
    kind: str = "similarity"
    config: dict = field(default_factory=dict)

    @property
    def shape(self) -> tuple:
        return self.scores.shape

    def probabilities(self) -> np.ndarray:
        if self.kind != "log-odds":
            raise ValueError(f"{self.scorer} scores are not posterior log-odds")
        return _expit(self.scores)

    def top_matches(self) -> list:
        """(row field, best column field, score) for each row."""
        out = []
        for i, name in enumerate(self.row_names):
            j = int(np.argmax(self.scores[i]))
            out.append((name, self.col_names[j], float(self.scores[i, j])))
        return out

    def to_tsv(self) -> str:
        lines = ["\t".join(["field"] + list(self.col_names))]
        for i, name in enumerate(self.row_names):
            lines.append("\t".join([name] + [repr(float(x)) for x in self.scores[i]]))
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        out = {
            "scorer": self.scorer,
            "kind": self.kind,
            "rows": list(self.row_names),
            "columns": list(self.col_names),
            "scores": [[_json_float(x) for x in row] for row in self.scores],
        }
        if self.kind == "log-odds":
            out["probabilities"] = [[_json_float(x) for x in row] for row in self.probabilities()]
        if self.config:
            out["config"] = self.config
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _expit(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    e = np.exp(z[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def _json_float(x):
    x = float(x)
    if math.isfinite(x):
        return x
    return "-inf" if x < 0 else ("inf" if x > 0 else "nan")


def _score_row(args) -> list:
    scorer, left, rights, priors, p_same = args
    if scorer in BASELINE_SCORERS:
        return [orient(baseline_score(scorer, left, r), scorer) for r in rights]
    mle = scorer in MLE_SCORERS
    return [pair_log_odds(left, r, priors, p_same, mle=mle) for r in rights]


def match_matrix(table_a, table_b, scorer: str, priors: ModelPriors = ModelPriors(),
                 p_same: float = 0.5, workers: int = 1) -> MatchMatrix:
    """Score every field of ``table_a`` against every field of ``table_b``.

    Tables may be passed as :class:`FittedTable` to reuse fitted statistics
    across scorers.  ``workers > 1`` distributes rows over processes; results
    are identical to a single-worker run.
    """
    kind = scorer_kind(scorer)
    _check_prior(p_same)
    fa = table_a if isinstance(table_a, FittedTable) else FittedTable(table_a)
    fb = table_b if isinstance(table_b, FittedTable) else FittedTable(table_b)

    if scorer in BASELINE_SCORERS:
        left, right = fa.distributions(), fb.distributions()
    else:
        model = _model_of(scorer)
        left, right = fa.stats(model), fb.stats(model)

    jobs = [(scorer, l, right, priors, p_same) for l in left]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_score_row, jobs))
    else:
        rows = [_score_row(job) for job in jobs]
    return MatchMatrix(scorer, fa.names, fb.names, np.array(rows, dtype=float), kind)
