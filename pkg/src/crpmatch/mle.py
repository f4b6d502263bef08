"""Maximum-likelihood versions of the three model classes.

Parameters are the same counts the Bayesian models keep, but the data are
scored by plug-in frequencies from a model fitted on those same data.
Empty stats score 0 (probability one).
"""

from __future__ import annotations

import math

from .crp import log_poisson
from .models import ApositionalStats, DiscreteStats, PositionalStats, Stats


def _plugin(counts, total: int) -> float:
    log_total = math.log(total)
    return math.fsum(c * (math.log(c) - log_total) for c in counts if c)


def _mle_lengths(length_counts) -> float:
    n = sum(length_counts.values())
    if n == 0:
        return 0.0
    lam_hat = sum(l * c for l, c in length_counts.items()) / n
    return math.fsum(c * log_poisson(l, lam_hat) for l, c in length_counts.items())


def mle_log_joint_discrete(stats: DiscreteStats) -> float:
    n = stats.total
    return _plugin(stats.counts.values(), n) if n else 0.0


def mle_log_joint_positional(stats: PositionalStats) -> float:
    at_least = stats.at_least()
    chars = math.fsum(c * (math.log(c) - math.log(at_least[j]))
                      for (j, _), c in stats.char_counts.items() if c)
    return _mle_lengths(stats.length_counts) + chars


def mle_log_joint_apositional(stats: ApositionalStats) -> float:
    acc = _mle_lengths(stats.length_counts)
    total = stats.total_chars
    return acc + (_plugin(stats.char_counts.values(), total) if total else 0.0)


_MLE_JOINTS = {
    DiscreteStats: mle_log_joint_discrete,
    PositionalStats: mle_log_joint_positional,
    ApositionalStats: mle_log_joint_apositional,
}


def mle_log_joint(stats: Stats) -> float:
    return _MLE_JOINTS[type(stats)](stats)


def mle_log_prob(s: str, stats: Stats) -> float:
    """Plug-in log probability of one string; ``-inf`` if any part is unseen."""
    if isinstance(stats, DiscreteStats):
        m = stats.counts.get(s, 0)
        return math.log(m / stats.total) if m else -math.inf
    n = stats.total
    if n == 0:
        return -math.inf
    lam_hat = sum(l * c for l, c in stats.length_counts.items()) / n
    acc = log_poisson(len(s), lam_hat)
    if isinstance(stats, PositionalStats):
        at_least = stats.at_least(len(s))
        for j, ch in enumerate(s, 1):
            c = stats.char_counts.get((j, ch), 0)
            if not c:
                return -math.inf
            acc += math.log(c / at_least[j])
    else:
        total = stats.total_chars
        for ch in s:
            c = stats.char_counts.get(ch, 0)
            if not c:
                return -math.inf
            acc += math.log(c / total)
    return acc


def _xlogx(x: float) -> float:
    return x * math.log(x) if x > 0 else 0.0


def _shared_xlogx(ca, cb) -> list:
    if len(cb) < len(ca):
        ca, cb = cb, ca
    out = []
    for key, x in ca.items():
        y = cb.get(key, 0)
        if x and y:
            out += _split(x, y)
    return out


def _split(x: float, y: float) -> list:
    # Separate summands keep fsum exactly symmetric in (x, y).
    return [_xlogx(x + y), -_xlogx(x), -_xlogx(y)]


def _pooling_penalty(x: float, y: float) -> list:
    return [-t for t in _split(x, y)]


def _length_ratio(a, b) -> list:
    # sum_l n_l log Pois(l; L/N) = -L + L log(L/N) - sum_l n_l lgamma(l + 1);
    # the -L and lgamma parts are additive in the counts and cancel.
    def part(total_len, n):
        return total_len * math.log(total_len / n) if total_len else 0.0

    la = sum(l * c for l, c in a.length_counts.items())
    lb = sum(l * c for l, c in b.length_counts.items())
    na, nb = a.total, b.total
    if not (na and nb):
        return []
    return [part(la + lb, na + nb), -part(la, na), -part(lb, nb)]


def mle_log_likelihood_ratio(a: Stats, b: Stats) -> float:
    """Pooled plug-in log likelihood minus the two separate ones (always <= 0).

    Equal to ``mle_log_joint(merge_stats(a, b)) - mle_log_joint(a) -
    mle_log_joint(b)``; terms for keys seen on one side only cancel exactly
    and are skipped.
    """
    if type(a) is not type(b):
        raise TypeError(f"cannot compare {a.kind} stats with {b.kind} stats")
    if isinstance(a, DiscreteStats):
        terms = _shared_xlogx(a.counts, b.counts)
        terms.extend(_pooling_penalty(a.total, b.total))
        return math.fsum(terms)
    terms = _length_ratio(a, b)
    terms.extend(_shared_xlogx(a.char_counts, b.char_counts))
    if isinstance(a, PositionalStats):
        la, lb = a.at_least(), b.at_least()
        for j in range(1, min(len(la), len(lb))):
            terms.extend(_pooling_penalty(la[j], lb[j]))
    else:
        terms.extend(_pooling_penalty(a.total_chars, b.total_chars))
    return math.fsum(terms)
