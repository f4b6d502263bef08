"""scikit-learn style estimators around the field models and the matcher."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .crp import ModelPriors
from .ingest import DEFAULT_ALPHABET
from .matcher import ALL_SCORERS, BASELINE_SCORERS, FittedTable, match_matrix, pair_log_odds, _logistic
from .mle import mle_log_joint
from .models import count_parameters, fit_stats, log_joint, log_predictive, merge_stats
from .validation import check_field, check_table


class _FieldModel(BaseEstimator):
    model_class: str = ""

    def __init__(self, alpha=3.0, lam=4.0, beta=3.0, mle=False, alphabet=None):
        self.alpha = alpha
        self.lam = lam
        self.beta = beta
        self.mle = mle
        self.alphabet = alphabet

    @property
    def _alphabet(self):
        return self.alphabet if self.alphabet is not None else DEFAULT_ALPHABET

    def _priors(self) -> ModelPriors:
        return ModelPriors(self.alpha, self.lam, self.beta)

    def _joint(self, stats) -> float:
        return mle_log_joint(stats) if self.mle else log_joint(stats, self._priors())

    def _set_stats(self, stats):
        self.stats_ = stats
        self.n_parameters_ = count_parameters(stats)
        self.log_marginal_likelihood_ = self._joint(stats)
        return self

    def fit(self, X, y=None):
        """Count the sufficient statistics of field ``X``."""
        self._priors()  # validate hyperparameters early
        values = check_field(X, self._alphabet)
        return self._set_stats(fit_stats(self.model_class, values, self._alphabet))

    def partial_fit(self, X, y=None):
        """Add the values of ``X`` to the current statistics."""
        if not hasattr(self, "stats_"):
            return self.fit(X)
        values = check_field(X, self._alphabet)
        extra = fit_stats(self.model_class, values, self._alphabet)
        return self._set_stats(merge_stats(self.stats_, extra))

    def score_samples(self, X) -> np.ndarray:
        """Posterior predictive log probability of each string, one at a time."""
        check_is_fitted(self, "stats_")
        if self.mle:
            raise NotImplementedError("per-string scores are only defined for the Bayesian models")
        values = check_field(X, self._alphabet)
        priors = self._priors()
        return np.array([log_predictive(v, self.stats_, priors) for v in values])

    def score(self, X, y=None) -> float:
        """log P(X | data seen in fit), i.e. the joint of X conditioned on the fit."""
        check_is_fitted(self, "stats_")
        values = check_field(X, self._alphabet)
        merged = merge_stats(self.stats_, fit_stats(self.model_class, values, self._alphabet))
        return self._joint(merged) - self.log_marginal_likelihood_

    def match_log_odds(self, other: "_FieldModel", p_same: float = 0.5) -> float:
        """Posterior log-odds that ``other``'s field came from the same model."""
        check_is_fitted(self, "stats_")
        check_is_fitted(other, "stats_")
        return pair_log_odds(self.stats_, other.stats_, self._priors(), p_same, mle=self.mle)

    def match_proba(self, other: "_FieldModel", p_same: float = 0.5) -> float:
        return _logistic(self.match_log_odds(other, p_same))


class DiscreteFieldModel(_FieldModel):
    """Atomic CRP over whole values.  ``beta`` is accepted but unused."""

    model_class = "discrete"


class PositionalFieldModel(_FieldModel):
    """CRP over length with one character distribution per position."""

    model_class = "positional"


class ApositionalFieldModel(_FieldModel):
    """CRP over length with a single character distribution for all positions."""

    model_class = "apositional"


class FieldMatcher(BaseEstimator):
    """Score the fields of one table against the fields of another.

    ``fit`` takes the reference table; ``decision_function`` returns a
    (reference fields x query fields) score matrix where higher means a more
    likely match.  For probabilistic scorers the scores are posterior
    log-odds and :meth:`predict_proba` gives the probabilities.

    Examples
    --------
    >>> m = FieldMatcher(scorer="apositional").fit({"a": ["X1", "X2"], "b": ["12", "13"]})
    >>> m.decision_function({"c": ["X3", "X9"]}).shape
    (2, 1)
    """

    def __init__(self, scorer="apositional", alpha=3.0, lam=4.0, beta=3.0, p_same=0.5,
                 n_jobs=1, alphabet=None):
        self.scorer = scorer
        self.alpha = alpha
        self.lam = lam
        self.beta = beta
        self.p_same = p_same
        self.n_jobs = n_jobs
        self.alphabet = alphabet

    def _table(self, X):
        return check_table(X, self.alphabet if self.alphabet is not None else DEFAULT_ALPHABET)

    def fit(self, X, y=None):
        if self.scorer not in ALL_SCORERS:
            raise ValueError(f"unknown scorer {self.scorer!r}; expected one of {', '.join(ALL_SCORERS)}")
        self.priors_ = ModelPriors(self.alpha, self.lam, self.beta)
        self.fitted_ = FittedTable(self._table(X))
        self.feature_names_in_ = np.array(self.fitted_.names, dtype=object)
        self.n_features_in_ = len(self.fitted_.names)
        return self

    def match_matrix(self, X):
        check_is_fitted(self, "fitted_")
        query = X if isinstance(X, FittedTable) else FittedTable(self._table(X))
        return match_matrix(self.fitted_, query, self.scorer, self.priors_, self.p_same,
                            workers=self.n_jobs)

    def decision_function(self, X) -> np.ndarray:
        return self.match_matrix(X).scores

    def predict_proba(self, X) -> np.ndarray:
        if self.scorer in BASELINE_SCORERS:
            raise AttributeError(f"{self.scorer} does not produce probabilities")
        return self.match_matrix(X).probabilities()
