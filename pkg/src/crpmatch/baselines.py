"""Set- and multiset-based field similarity scores from the matching literature.

``jaccard`` and ``pmi`` grow with match likelihood; the entropy difference
and both Euclidean distances shrink.  :func:`orient` flips the latter so the
evaluation harness can treat every scorer as higher-is-better.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable

BASELINE_SCORERS = ("jaccard", "pmi", "entropy-diff", "euclid-unsorted", "euclid-sorted")
DISTANCE_SCORERS = frozenset({"entropy-diff", "euclid-unsorted", "euclid-sorted"})


@dataclass(frozen=True)
class FieldDistribution:
    value_props: dict
    sorted_props: tuple
    observations: int

    @property
    def distinct(self) -> frozenset:
        return frozenset(self.value_props)

    @classmethod
    def from_counts(cls, counts) -> "FieldDistribution":
        n = sum(counts.values())
        props = {v: c / n for v, c in counts.items() if c} if n else {}
        return cls(props, tuple(sorted(props.values(), reverse=True)), n)

    @classmethod
    def from_values(cls, values: Iterable[str]) -> "FieldDistribution":
        return cls.from_counts(Counter(values))


def jaccard(c: frozenset, d: frozenset) -> float:
    union = len(c | d)
    if union == 0:
        return 0.0
    return len(c & d) / union


def pmi(c: frozenset, d: frozenset, n: int) -> float:
    """log2(|C & D| * N / (|C| |D|)); ``-inf`` for disjoint sets."""
    if not c or not d or n <= 0:
        raise ValueError("pmi needs two nonempty value sets and a positive count")
    inter = len(c & d)
    if inter == 0:
        return -math.inf
    return math.log2(inter * n / (len(c) * len(d)))


def _entropy(props: dict) -> float:
    return -math.fsum(p * math.log(p) for p in props.values() if p > 0)


def entropy_difference(p: dict, q: dict) -> float:
    return abs(_entropy(p) - _entropy(q))


def unsorted_euclidean(p: dict, q: dict) -> float:
    """Squared distance over the union of values, absent values counting 0."""
    terms = [(pv - q.get(v, 0.0)) ** 2 for v, pv in p.items()]
    terms.extend(qv * qv for v, qv in q.items() if v not in p)
    return math.fsum(terms)


def sorted_euclidean(p_sorted, q_sorted) -> float:
    """Squared distance between proportions each sorted in decreasing order."""
    if isinstance(p_sorted, dict):
        p_sorted = sorted(p_sorted.values(), reverse=True)
    if isinstance(q_sorted, dict):
        q_sorted = sorted(q_sorted.values(), reverse=True)
    longer, shorter = (p_sorted, q_sorted) if len(p_sorted) >= len(q_sorted) else (q_sorted, p_sorted)
    k = len(shorter)
    return math.fsum((a - (shorter[i] if i < k else 0.0)) ** 2 for i, a in enumerate(longer))


def baseline_score(scorer: str, a: FieldDistribution, b: FieldDistribution) -> float:
    """Raw (unoriented) baseline score between two field distributions."""
    if scorer == "jaccard":
        return jaccard(a.distinct, b.distinct)
    if scorer == "pmi":
        return pmi(a.distinct, b.distinct, a.observations + b.observations)
    if scorer == "entropy-diff":
        return entropy_difference(a.value_props, b.value_props)
    if scorer == "euclid-unsorted":
        return unsorted_euclidean(a.value_props, b.value_props)
    if scorer == "euclid-sorted":
        return sorted_euclidean(a.sorted_props, b.sorted_props)
    raise ValueError(f"unknown baseline scorer {scorer!r}")


def orient(score: float, scorer: str) -> float:
    """Make ``score`` higher-is-more-match.  Apply exactly once."""
    return -score if scorer in DISTANCE_SCORERS else score
