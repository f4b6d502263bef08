import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from crpmatch.crp import ModelPriors
from crpmatch.estimators import (
    ApositionalFieldModel,
    DiscreteFieldModel,
    FieldMatcher,
    PositionalFieldModel,
)
from crpmatch.ingest import FieldColumn, Table
from crpmatch.models import count_parameters, fit_positional, log_joint, log_predictive
from crpmatch.validation import check_field, check_table

MODELS = [DiscreteFieldModel, PositionalFieldModel, ApositionalFieldModel]
ZIPS = [str(10000 + 37 * i) for i in range(40)]
WORDS = ["APPLE", "PEAR", "FIG", "PLUM"] * 10


@pytest.mark.parametrize("cls", MODELS)
class TestFieldModel:
    def test_clone_and_params(self, cls):
        m = cls(alpha=2.0, beta=0.5)
        assert m.get_params()["alpha"] == 2.0
        c = clone(m)
        assert c.get_params() == m.get_params() and c is not m
        assert m.set_params(lam=6.0).lam == 6.0

    def test_not_fitted(self, cls):
        with pytest.raises(NotFittedError):
            cls().score(["A"])

    def test_fit_attributes(self, cls):
        m = cls().fit(ZIPS)
        assert m.n_parameters_ == count_parameters(m.stats_)
        assert m.log_marginal_likelihood_ == log_joint(m.stats_, ModelPriors())

    def test_partial_fit_equals_fit(self, cls):
        whole = cls().fit(ZIPS + WORDS)
        parts = cls().partial_fit(ZIPS).partial_fit(WORDS)
        assert parts.stats_ == whole.stats_

    def test_score_is_conditional_joint(self, cls):
        m = cls().fit(ZIPS)
        expected = cls().fit(ZIPS + WORDS).log_marginal_likelihood_ - m.log_marginal_likelihood_
        assert m.score(WORDS) == pytest.approx(expected, rel=1e-12)

    def test_match_prefers_same_format(self, cls):
        zips = cls().fit(ZIPS)
        other_zips = cls().fit(ZIPS[20:] + [str(20000 + 11 * i) for i in range(20)])
        words = cls().fit(WORDS)
        assert zips.match_log_odds(other_zips) > zips.match_log_odds(words)
        assert 0.0 <= zips.match_proba(words) <= 1.0

    def test_invalid_priors(self, cls):
        with pytest.raises(ValueError):
            cls(alpha=-1.0).fit(ZIPS)


def test_score_samples_is_predictive():
    m = PositionalFieldModel().fit(ZIPS)
    got = m.score_samples(["10037", "ABCDE"])
    assert got[0] == pytest.approx(log_predictive("10037", fit_positional(ZIPS), ModelPriors()))
    assert got[0] > got[1]


def test_mle_flag():
    m = DiscreteFieldModel(mle=True).fit(["A", "B"])
    assert m.log_marginal_likelihood_ == pytest.approx(2 * math.log(0.5))
    with pytest.raises(NotImplementedError):
        m.score_samples(["A"])
    assert m.match_log_odds(DiscreteFieldModel(mle=True).fit(["A", "B"])) <= 1e-12


def test_normalizes_raw_input():
    m = ApositionalFieldModel().fit(np.array(["ab", "é1"]))
    assert m.stats_.char_counts == {"A": 1, "B": 1, "#": 1, "1": 1}


class TestFieldMatcher:
    ref = {"zip": ZIPS, "word": WORDS}
    query = {"w": WORDS[::-1], "z": ZIPS[::-1], "x": ["Y"] * 40}

    def test_shape_and_best(self):
        m = FieldMatcher().fit(self.ref)
        scores = m.decision_function(self.query)
        assert scores.shape == (2, 3)
        assert list(np.argmax(scores, axis=1)) == [1, 0]
        assert list(m.feature_names_in_) == ["zip", "word"] and m.n_features_in_ == 2

    def test_proba(self):
        p = FieldMatcher(scorer="positional").fit(self.ref).predict_proba(self.query)
        assert ((p >= 0) & (p <= 1)).all()

    def test_baseline_has_no_proba(self):
        m = FieldMatcher(scorer="jaccard").fit(self.ref)
        with pytest.raises(AttributeError):
            m.predict_proba(self.query)

    def test_unknown_scorer(self):
        with pytest.raises(ValueError):
            FieldMatcher(scorer="bigram").fit(self.ref)

    def test_not_fitted(self):
        with pytest.raises(NotFittedError):
            FieldMatcher().decision_function(self.query)

    def test_clone(self):
        assert clone(FieldMatcher(p_same=0.2)).p_same == 0.2


class TestValidation:
    def test_field_sources(self):
        assert check_field(FieldColumn("a", ("X",))) == ("X",)
        assert check_field(np.array([["a"], ["b"]])) == ("A", "B")
        assert check_field([None, 3]) == ("", "3")

    def test_field_rejects(self):
        with pytest.raises(TypeError):
            check_field("abc")
        with pytest.raises(ValueError):
            check_field(np.zeros((2, 2)))
        with pytest.raises(ValueError):
            check_field(["a"], normalize=False)

    def test_table(self):
        t = check_table({"a": ["x", "y"], "b": ["1", "2"]})
        assert t.names == ["a", "b"] and t.record_count == 2
        assert check_table(t) is t

    def test_table_rejects(self):
        with pytest.raises(ValueError):
            check_table({"a": ["x"], "b": ["1", "2"]})
        with pytest.raises(ValueError):
            check_table({})
        with pytest.raises(TypeError):
            check_table([["a"]])
        with pytest.raises(ValueError):
            check_table(Table((), 0))
