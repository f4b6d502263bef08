import json
import math
import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crpmatch.crp import ModelPriors
from crpmatch.models import (
    MODEL_CLASSES,
    ApositionalStats,
    DiscreteStats,
    PositionalStats,
    count_parameters,
    fit_apositional,
    fit_discrete,
    fit_positional,
    fit_stats,
    log_evidence_ratio,
    log_joint,
    log_joint_apositional,
    log_joint_discrete,
    log_joint_positional,
    log_predictive,
    log_predictive_positional,
    merge_stats,
    pool_positions,
    stats_from_dict,
    stats_to_dict,
)

from conftest import FOUR, SMALL, random_field
from oracles import all_strings, poisson_pmf, sequential

P = ModelPriors()
fields = st.lists(st.text(alphabet="ABCD", max_size=5), max_size=20)


class TestFit:
    def test_discrete(self):
        assert fit_discrete(["A", "A", "B"]).counts == {"A": 2, "B": 1}
        assert fit_discrete([]).counts == {}

    def test_positional(self):
        s = fit_positional(["AB", "AC"])
        assert s.length_counts == {2: 2}
        assert s.char_counts == {(1, "A"): 2, (2, "B"): 1, (2, "C"): 1}

    def test_positional_empty_string(self):
        s = fit_positional([""])
        assert s.length_counts == {0: 1}
        assert s.char_counts == {}

    def test_positional_mixed_lengths(self):
        s = fit_positional(["A", "AB"])
        assert s.length_counts == {1: 1, 2: 1}
        assert s.char_counts == {(1, "A"): 2, (2, "B"): 1}
        assert s.at_least()[2] == 1

    def test_apositional(self):
        s = fit_apositional(["AB", "AC"])
        assert s.char_counts == {"A": 2, "B": 1, "C": 1}
        assert s.length_counts == {2: 2}

    def test_apositional_empty(self):
        s = fit_apositional([])
        assert s.char_counts == {} and s.length_counts == {} and s.total == 0

    def test_rejects_unnormalized(self):
        with pytest.raises(ValueError, match="normalize"):
            fit_positional(["ab"])

    @given(fields)
    def test_pooling_is_column_sum(self, values):
        assert fit_apositional(values, FOUR) == pool_positions(fit_positional(values, FOUR))

    @given(fields)
    def test_position_counts_match_reach(self, values):
        s = fit_positional(values, FOUR)
        reach = s.at_least()
        per_pos = Counter()
        for (j, _), c in s.char_counts.items():
            per_pos[j] += c
        for j in range(1, len(reach)):
            assert per_pos[j] == reach[j]

    @given(fields)
    def test_pooled_total_is_total_length(self, values):
        s = fit_apositional(values, FOUR)
        assert s.total_chars == sum(l * n for l, n in s.length_counts.items())


class TestMerge:
    @pytest.mark.parametrize("kind", MODEL_CLASSES)
    def test_identity(self, kind):
        a = fit_stats(kind, ["AB", "C"])
        assert merge_stats(a, fit_stats(kind, [])) == a

    @pytest.mark.parametrize("kind", MODEL_CLASSES)
    def test_definitional(self, kind):
        assert merge_stats(fit_stats(kind, ["A"]), fit_stats(kind, ["B"])) == fit_stats(kind, ["A", "B"])

    @settings(max_examples=50)
    @given(fields, fields)
    def test_commutative_and_concatenation(self, x, y):
        for kind in MODEL_CLASSES:
            a, b = fit_stats(kind, x, FOUR), fit_stats(kind, y, FOUR)
            assert merge_stats(a, b) == merge_stats(b, a) == fit_stats(kind, x + y, FOUR)

    def test_alphabet_mismatch(self):
        with pytest.raises(ValueError):
            merge_stats(fit_positional(["A"], SMALL), fit_positional(["A"], FOUR))

    def test_class_mismatch(self):
        with pytest.raises(TypeError):
            merge_stats(fit_positional(["A"]), fit_apositional(["A"]))


class TestJoint:
    @pytest.mark.parametrize("kind", MODEL_CLASSES)
    def test_empty(self, kind):
        assert log_joint(fit_stats(kind, [])) == 0.0

    def test_discrete_two_copies(self):
        for x in ("", "A", "HELLO"):
            h = poisson_pmf(len(x), 4.0) * 64.0 ** -len(x)
            expected = math.log(h * (1 + 3.0 * h) / (1 + 3.0))
            assert log_joint_discrete(fit_discrete([x, x]), P) == pytest.approx(expected, rel=1e-12)

    @settings(max_examples=300, deadline=None)
    @given(st.sampled_from(MODEL_CLASSES), fields, st.randoms(use_true_random=False),
           st.floats(0.2, 10), st.floats(0.5, 6), st.floats(0.2, 10))
    def test_sequential_oracle(self, kind, values, rnd, alpha, lam, beta):
        priors = ModelPriors(alpha, lam, beta)
        got = log_joint(fit_stats(kind, values, FOUR), priors)
        shuffled = list(values)
        rnd.shuffle(shuffled)
        for order in (values, shuffled):
            ref = sequential(kind, order, alpha, lam, beta, 4)
            assert got == pytest.approx(ref, rel=1e-9, abs=1e-12)

    @settings(max_examples=100, deadline=None)
    @given(st.sampled_from(MODEL_CLASSES), fields)
    def test_chain_rule(self, kind, values):
        total = 0.0
        for k, v in enumerate(values):
            total += log_predictive(v, fit_stats(kind, values[:k], FOUR), P)
        got = log_joint(fit_stats(kind, values, FOUR), P)
        assert got == pytest.approx(total, rel=1e-9, abs=1e-12)

    @settings(max_examples=100)
    @given(st.sampled_from(MODEL_CLASSES), fields, fields)
    def test_merge_consistency_exact(self, kind, x, y):
        merged = merge_stats(fit_stats(kind, x, FOUR), fit_stats(kind, y, FOUR))
        assert log_joint(merged, P) == log_joint(fit_stats(kind, x + y, FOUR), P)

    def test_single_string_is_predictive(self):
        for s in ("", "A", "ABC", "HELLO WORLD"):
            empty = PositionalStats()
            assert log_joint_positional(fit_positional([s]), P) == pytest.approx(
                log_predictive_positional(s, empty, P), rel=1e-12, abs=1e-15)

    def test_apositional_single_char_equals_positional(self):
        for s in ("", "A", "7"):
            assert log_joint_apositional(fit_apositional([s]), P) == pytest.approx(
                log_joint_positional(fit_positional([s]), P), rel=1e-12, abs=1e-15)

    def test_long_strings_stay_finite(self):
        values = ["X" * 500, "Y" * 700]
        for kind in MODEL_CLASSES:
            assert math.isfinite(log_joint(fit_stats(kind, values), P))


class TestPredictive:
    def test_empty_stats_empty_string(self):
        assert log_predictive_positional("", PositionalStats(), P) == pytest.approx(-4.0, abs=1e-14)

    @pytest.mark.parametrize("s", ["A", "AB", "HELLO"])
    def test_empty_stats_reduces_to_base(self, s):
        expected = math.log(poisson_pmf(len(s), 4.0)) - len(s) * math.log(64)
        for kind in ("discrete", "positional"):
            assert log_predictive(s, fit_stats(kind, []), P) == pytest.approx(expected, rel=1e-12)

    def test_apositional_urn_within_string(self):
        # With no data the second character reuses the first one's count.
        got = log_predictive("AA", fit_apositional([]), P)
        expected = math.log(poisson_pmf(2, 4.0)) + math.log(1 / 64) + math.log((1 + 3) / (1 + 192))
        assert got == pytest.approx(expected, rel=1e-12)

    def test_worked_example(self):
        stats = fit_positional(["AB"])
        length = (1 + 3 * poisson_pmf(2, 4.0)) / (1 + 3)
        char = (1 + 3) / (1 + 192)
        expected = math.log(length) + 2 * math.log(char)
        assert log_predictive_positional("AB", stats, P) == pytest.approx(expected, rel=1e-12)

    @pytest.mark.parametrize("kind", MODEL_CLASSES)
    def test_normalization(self, kind):
        priors = ModelPriors(alpha=3.0, lam=1.0, beta=3.0)
        stats = fit_stats(kind, [], SMALL)
        mass = math.fsum(math.exp(log_predictive(s, stats, priors)) for s in all_strings("AB", 8))
        cdf = sum(poisson_pmf(k, 1.0) for k in range(9))
        assert mass == pytest.approx(cdf, abs=1e-9)

    @pytest.mark.parametrize("kind", MODEL_CLASSES)
    def test_normalization_after_data(self, kind):
        # Posterior predictive also sums to the mass of lengths <= L.
        priors = ModelPriors(alpha=2.0, lam=1.0, beta=0.7)
        stats = fit_stats(kind, ["AB", "A", "BBA", ""], SMALL)
        mass = math.fsum(math.exp(log_predictive(s, stats, priors)) for s in all_strings("AB", 7))
        n = 4
        counts = {2: 1, 1: 1, 3: 1, 0: 1}
        length_mass = sum((counts.get(l, 0) + 2.0 * poisson_pmf(l, 1.0)) / (n + 2.0) for l in range(8))
        assert mass == pytest.approx(length_mass, abs=1e-9)


class TestParameters:
    def test_apositional_example(self):
        assert count_parameters(fit_apositional(["AB", "AC"])) == 4

    def test_discrete_counts_distinct(self):
        assert count_parameters(fit_discrete(["A", "A", "B", ""])) == 3

    def test_positional(self):
        assert count_parameters(fit_positional(["AB", "AC"])) == 3 + 1

    @given(st.lists(st.text(alphabet="ABCD", min_size=1, max_size=6), min_size=1, max_size=30))
    def test_structural_bound(self, values):
        a = count_parameters(fit_apositional(values, FOUR))
        p = count_parameters(fit_positional(values, FOUR))
        d = count_parameters(fit_discrete(values, FOUR))
        assert a <= p <= d * (max(map(len, values)) + 1)


class TestEvidenceRatio:
    def test_matches_direct_difference(self, rng):
        for _ in range(300):
            x, y = random_field(rng), random_field(rng)
            for kind in MODEL_CLASSES:
                a, b = fit_stats(kind, x, FOUR), fit_stats(kind, y, FOUR)
                direct = log_joint(merge_stats(a, b), P) - log_joint(a, P) - log_joint(b, P)
                assert log_evidence_ratio(a, b, P) == pytest.approx(direct, rel=1e-9, abs=1e-9)

    def test_symmetric_exactly(self, rng):
        for _ in range(100):
            x, y = random_field(rng), random_field(rng)
            for kind in MODEL_CLASSES:
                a, b = fit_stats(kind, x, FOUR), fit_stats(kind, y, FOUR)
                assert log_evidence_ratio(a, b, P) == log_evidence_ratio(b, a, P)

    def test_disjoint_values_tie_exactly(self):
        rng = random.Random(3)
        n = 50
        def unique(prefix):
            return [prefix + str(rng.randrange(10**8)).zfill(8) for _ in range(n)]
        a, b, c = (fit_discrete(unique(p)) for p in "XYZ")
        assert log_evidence_ratio(a, b, P) == log_evidence_ratio(a, c, P)


class TestSerialization:
    @pytest.mark.parametrize("kind", MODEL_CLASSES)
    def test_round_trip(self, kind):
        s = fit_stats(kind, ["AB", "AC", "", "B-1"])
        text = json.dumps(stats_to_dict(s))
        assert stats_from_dict(json.loads(text)) == s

    def test_layout(self):
        d = stats_to_dict(fit_positional(["AB"]))
        assert d["model"] == "positional"
        assert d["length_counts"] == [[2, 1]]
        assert d["char_counts"] == [[1, "A", 1], [2, "B", 1]]

    def test_unknown_model(self):
        with pytest.raises(ValueError):
            stats_from_dict({"model": "x", "alphabet": {"symbols": "AB", "placeholder": "A"}})


def test_stats_types():
    assert isinstance(fit_stats("discrete", []), DiscreteStats)
    assert isinstance(fit_stats("apositional", []), ApositionalStats)
    with pytest.raises(ValueError):
        fit_stats("bigram", [])
