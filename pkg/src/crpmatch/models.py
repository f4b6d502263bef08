"""Sufficient statistics and Bayesian scoring for the three field model classes.

discrete
    Atomic CRP over whole values with a Poisson-length / uniform-character
    base distribution.
positional
    Atomic CRP over string length, then one Dirichlet-multinomial character
    distribution per (1-based) position.
apositional
    Same length model, one Dirichlet-multinomial shared by all positions.

Joint probabilities depend only on the counts, so merging two fields is a
pointwise sum and scoring costs time proportional to the number of nonzero
counts.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Union

from .crp import ModelPriors, log_acrp_joint, log_base_prob, log_poisson, log_rising
from .ingest import DEFAULT_ALPHABET, Alphabet

MODEL_CLASSES = ("discrete", "positional", "apositional")


@dataclass(frozen=True)
class DiscreteStats:
    counts: Counter = field(default_factory=Counter)
    alphabet: Alphabet = DEFAULT_ALPHABET

    kind = "discrete"

    @property
    def total(self) -> int:
        return sum(self.counts.values())


@dataclass(frozen=True)
class PositionalStats:
    """Length counts ``n_l`` and per-position character counts ``c[j, a]``."""

    length_counts: Counter = field(default_factory=Counter)
    char_counts: Counter = field(default_factory=Counter)
    alphabet: Alphabet = DEFAULT_ALPHABET

    kind = "positional"

    @property
    def total(self) -> int:
        return sum(self.length_counts.values())

    def at_least(self, max_position: int | None = None) -> list:
        """``out[j]`` is the number of strings of length >= j, for j = 0..max."""
        top = max(self.length_counts, default=0)
        if max_position is None:
            max_position = top
        hist = [0] * (max(top, max_position) + 2)
        for length, n in self.length_counts.items():
            hist[length] += n
        for j in range(len(hist) - 2, -1, -1):
            hist[j] += hist[j + 1]
        return hist[: max_position + 1]


@dataclass(frozen=True)
class ApositionalStats:
    """Length counts ``n_l`` and pooled character counts ``c'[a]``."""

    length_counts: Counter = field(default_factory=Counter)
    char_counts: Counter = field(default_factory=Counter)
    alphabet: Alphabet = DEFAULT_ALPHABET

    kind = "apositional"

    @property
    def total(self) -> int:
        return sum(self.length_counts.values())

    @property
    def total_chars(self) -> int:
        return sum(self.char_counts.values())


Stats = Union[DiscreteStats, PositionalStats, ApositionalStats]


def _check_values(values: Iterable[str], alphabet: Alphabet) -> list:
    values = list(values)
    seen = set().union(*values) if values else set()
    bad = seen.difference(alphabet.symbols)
    if bad:
        raise ValueError(
            f"characters outside the alphabet: {''.join(sorted(bad))!r}; "
            "normalize values first"
        )
    return values


def fit_discrete(values: Iterable[str], alphabet: Alphabet = DEFAULT_ALPHABET) -> DiscreteStats:
    values = _check_values(values, alphabet)
    return DiscreteStats(Counter(values), alphabet)


def fit_positional(values: Iterable[str], alphabet: Alphabet = DEFAULT_ALPHABET) -> PositionalStats:
    values = _check_values(values, alphabet)
    lengths = Counter(map(len, values))
    chars = Counter((j, ch) for v in values for j, ch in enumerate(v, 1))
    return PositionalStats(lengths, chars, alphabet)


def fit_apositional(values: Iterable[str], alphabet: Alphabet = DEFAULT_ALPHABET) -> ApositionalStats:
    values = _check_values(values, alphabet)
    lengths = Counter(map(len, values))
    chars = Counter()
    for v in values:
        chars.update(v)
    return ApositionalStats(lengths, chars, alphabet)


_FITTERS = {
    "discrete": fit_discrete,
    "positional": fit_positional,
    "apositional": fit_apositional,
}


def fit_stats(kind: str, values: Iterable[str], alphabet: Alphabet = DEFAULT_ALPHABET) -> Stats:
    try:
        fitter = _FITTERS[kind]
    except KeyError:
        raise ValueError(f"unknown model class {kind!r}; expected one of {MODEL_CLASSES}") from None
    return fitter(values, alphabet)


def pool_positions(stats: PositionalStats) -> ApositionalStats:
    """Collapse positional character counts into pooled counts."""
    pooled = Counter()
    for (_, ch), c in stats.char_counts.items():
        pooled[ch] += c
    return ApositionalStats(Counter(stats.length_counts), pooled, stats.alphabet)


def merge_stats(a: Stats, b: Stats) -> Stats:
    """Statistics of the concatenation of the two fitted fields."""
    if type(a) is not type(b):
        raise TypeError(f"cannot merge {a.kind} stats with {b.kind} stats")
    if a.alphabet != b.alphabet:
        raise ValueError("cannot merge stats fitted over different alphabets")
    if isinstance(a, DiscreteStats):
        return DiscreteStats(a.counts + b.counts, a.alphabet)
    return type(a)(a.length_counts + b.length_counts, a.char_counts + b.char_counts, a.alphabet)


def _alphabet_size(stats: Stats, alphabet: Alphabet | None) -> int:
    if alphabet is not None and alphabet != stats.alphabet:
        raise ValueError("stats were fitted over a different alphabet")
    return len(stats.alphabet)


# -- joint probabilities ----------------------------------------------------


def log_joint_discrete(stats: DiscreteStats, priors: ModelPriors = ModelPriors(),
                       alphabet: Alphabet | None = None) -> float:
    size = _alphabet_size(stats, alphabet)
    lam = priors.lam
    return log_acrp_joint(stats.counts, priors.alpha, lambda x: log_base_prob(x, lam, size))


def _log_joint_lengths(length_counts, priors: ModelPriors) -> float:
    alpha = priors.alpha
    log_alpha = math.log(alpha)
    terms = [log_rising(log_alpha + log_poisson(length, priors.lam), m)
             for length, m in length_counts.items()]
    n = sum(length_counts.values())
    terms.append(math.lgamma(alpha) - math.lgamma(alpha + n))
    return math.fsum(terms)


def _log_dirichlet_block(counts: Iterable[int], total: int, beta: float, size: int) -> float:
    """log of prod_a Gamma(c_a + b)/Gamma(b) * Gamma(|A| b)/Gamma(total + |A| b)."""
    log_beta = math.log(beta)
    acc = math.fsum(log_rising(log_beta, c) for c in counts)
    return acc - log_rising(math.log(size * beta), total)


def log_joint_positional(stats: PositionalStats, priors: ModelPriors = ModelPriors(),
                         alphabet: Alphabet | None = None) -> float:
    size = _alphabet_size(stats, alphabet)
    beta = priors.beta
    log_beta = math.log(beta)
    log_size_beta = math.log(size * beta)
    chars = math.fsum(log_rising(log_beta, c) for c in stats.char_counts.values())
    at_least = stats.at_least()
    norms = math.fsum(log_rising(log_size_beta, at_least[j]) for j in range(1, len(at_least)))
    return _log_joint_lengths(stats.length_counts, priors) + chars - norms


def log_joint_apositional(stats: ApositionalStats, priors: ModelPriors = ModelPriors(),
                          alphabet: Alphabet | None = None) -> float:
    size = _alphabet_size(stats, alphabet)
    acc = _log_joint_lengths(stats.length_counts, priors)
    return acc + _log_dirichlet_block(stats.char_counts.values(), stats.total_chars,
                                      priors.beta, size)


_JOINTS = {
    DiscreteStats: log_joint_discrete,
    PositionalStats: log_joint_positional,
    ApositionalStats: log_joint_apositional,
}


def log_joint(stats: Stats, priors: ModelPriors = ModelPriors()) -> float:
    """Dispatch to the joint log probability of ``stats``' model class."""
    return _JOINTS[type(stats)](stats, priors)


# -- predictive probabilities -----------------------------------------------


def _log_predictive_length(length: int, stats, priors: ModelPriors) -> float:
    n_l = stats.length_counts.get(length, 0)
    prior_mass = math.log(priors.alpha) + log_poisson(length, priors.lam)
    top = math.log(n_l) if n_l else -math.inf
    return _logaddexp(top, prior_mass) - math.log(stats.total + priors.alpha)


def _logaddexp(a: float, b: float) -> float:
    if a == -math.inf:
        return b
    if b == -math.inf:
        return a
    hi, lo = (a, b) if a >= b else (b, a)
    return hi + math.log1p(math.exp(lo - hi))


def log_predictive_discrete(s: str, stats: DiscreteStats, priors: ModelPriors = ModelPriors(),
                            alphabet: Alphabet | None = None) -> float:
    size = _alphabet_size(stats, alphabet)
    m = stats.counts.get(s, 0)
    prior_mass = math.log(priors.alpha) + log_base_prob(s, priors.lam, size)
    top = math.log(m) if m else -math.inf
    return _logaddexp(top, prior_mass) - math.log(stats.total + priors.alpha)


def log_predictive_positional(s: str, stats: PositionalStats, priors: ModelPriors = ModelPriors(),
                              alphabet: Alphabet | None = None) -> float:
    """log P(s | stats), the posterior predictive of one new string."""
    size = _alphabet_size(stats, alphabet)
    acc = _log_predictive_length(len(s), stats, priors)
    if not s:
        return acc
    beta = priors.beta
    at_least = stats.at_least(len(s))
    chars = stats.char_counts
    for j, ch in enumerate(s, 1):
        acc += math.log(chars.get((j, ch), 0) + beta) - math.log(at_least[j] + size * beta)
    return acc


def log_predictive_apositional(s: str, stats: ApositionalStats, priors: ModelPriors = ModelPriors(),
                               alphabet: Alphabet | None = None) -> float:
    """log P(s | stats).

    Characters of ``s`` are drawn sequentially from the shared Polya urn, so
    earlier characters of ``s`` itself count toward later ones.  This keeps
    the chain rule exact against :func:`log_joint_apositional`.
    """
    size = _alphabet_size(stats, alphabet)
    acc = _log_predictive_length(len(s), stats, priors)
    beta = priors.beta
    seen = Counter()
    total = stats.total_chars
    for k, ch in enumerate(s):
        acc += math.log(stats.char_counts.get(ch, 0) + seen[ch] + beta)
        acc -= math.log(total + k + size * beta)
        seen[ch] += 1
    return acc


_PREDICTIVES = {
    DiscreteStats: log_predictive_discrete,
    PositionalStats: log_predictive_positional,
    ApositionalStats: log_predictive_apositional,
}


def log_predictive(s: str, stats: Stats, priors: ModelPriors = ModelPriors()) -> float:
    return _PREDICTIVES[type(stats)](s, stats, priors)


def count_parameters(stats: Stats) -> int:
    """Number of nonzero sufficient statistics the model has to keep."""
    if isinstance(stats, DiscreteStats):
        return sum(1 for c in stats.counts.values() if c)
    nonzero = sum(1 for c in stats.char_counts.values() if c)
    return nonzero + sum(1 for c in stats.length_counts.values() if c)


# -- serialization ----------------------------------------------------------

STATS_FORMAT_VERSION = 1


def stats_to_dict(stats: Stats) -> dict:
    """JSON-ready layout; keys are sorted so output is reproducible."""
    out = {
        "format_version": STATS_FORMAT_VERSION,
        "model": stats.kind,
        "alphabet": {"symbols": stats.alphabet.symbols,
                     "placeholder": stats.alphabet.placeholder},
    }
    if isinstance(stats, DiscreteStats):
        out["counts"] = [[v, c] for v, c in sorted(stats.counts.items())]
        return out
    out["length_counts"] = [[l, c] for l, c in sorted(stats.length_counts.items())]
    if isinstance(stats, PositionalStats):
        out["char_counts"] = [[j, a, c] for (j, a), c in sorted(stats.char_counts.items())]
    else:
        out["char_counts"] = [[a, c] for a, c in sorted(stats.char_counts.items())]
    return out


def stats_from_dict(data: dict) -> Stats:
    kind = data.get("model")
    if kind not in MODEL_CLASSES:
        raise ValueError(f"unknown model {kind!r}; expected one of {', '.join(MODEL_CLASSES)}")
    alphabet = Alphabet(**data["alphabet"])
    if kind == "discrete":
        return DiscreteStats(Counter({v: c for v, c in data["counts"]}), alphabet)
    lengths = Counter({int(l): c for l, c in data["length_counts"]})
    if kind == "positional":
        chars = Counter({(int(j), a): c for j, a, c in data["char_counts"]})
        return PositionalStats(lengths, chars, alphabet)
    if kind == "apositional":
        return ApositionalStats(lengths, Counter({a: c for a, c in data["char_counts"]}), alphabet)
    raise ValueError(f"unknown model class {kind!r}")


# -- pairwise evidence ratio ------------------------------------------------


def _shared_ratio(ca, cb, f) -> list:
    """Terms f(x + y) - f(x) - f(y) over keys present in both count maps.

    For a key seen on one side only the term is exactly zero, so it is
    skipped; this makes disjoint fields tie exactly instead of up to
    rounding noise.
    """
    if len(cb) < len(ca):
        ca, cb = cb, ca
    out = []
    for key, x in ca.items():
        y = cb.get(key, 0)
        if x and y:
            out += _split(f, x, y)
    return out


def _split(f, x: int, y: int) -> list:
    # Kept as separate summands so fsum gives the same answer for (x, y) and (y, x).
    return [f(x + y), -f(x), -f(y)]


def _length_ratio(a, b, priors: ModelPriors) -> list:
    alpha, lam = priors.alpha, priors.lam
    log_alpha = math.log(alpha)
    terms = []
    small, big = ((a.length_counts, b.length_counts) if len(a.length_counts) <= len(b.length_counts)
                  else (b.length_counts, a.length_counts))
    for length, x in small.items():
        y = big.get(length, 0)
        if x and y:
            lx = log_alpha + log_poisson(length, lam)
            terms += _split(lambda m: log_rising(lx, m), x, y)
    na, nb = a.total, b.total
    lg = math.lgamma
    # Gamma(a)/Gamma(a + n) normalizers: merged minus the two separate ones.
    terms += [-lg(alpha), -lg(alpha + na + nb), lg(alpha + na), lg(alpha + nb)]
    return terms


def log_evidence_ratio(a: Stats, b: Stats, priors: ModelPriors = ModelPriors()) -> float:
    """log P(X+Y | one model) - log P(X) - log P(Y) from fitted stats.

    Mathematically equal to ``log_joint(merge_stats(a, b)) - log_joint(a) -
    log_joint(b)``, but only counts present in both fields are touched.
    """
    if type(a) is not type(b):
        raise TypeError(f"cannot compare {a.kind} stats with {b.kind} stats")
    if a.alphabet != b.alphabet:
        raise ValueError("stats were fitted over different alphabets")
    size = len(a.alphabet)
    lg = math.lgamma
    log_alpha = math.log(priors.alpha)
    if isinstance(a, DiscreteStats):
        terms = []
        small, big = (a.counts, b.counts) if len(a.counts) <= len(b.counts) else (b.counts, a.counts)
        for value, x in small.items():
            y = big.get(value, 0)
            if x and y:
                lh = log_alpha + log_base_prob(value, priors.lam, size)
                terms += _split(lambda m: log_rising(lh, m), x, y)
        na, nb = a.total, b.total
        alpha = priors.alpha
        terms += [-lg(alpha), -lg(alpha + na + nb), lg(alpha + na), lg(alpha + nb)]
        return math.fsum(terms)

    terms = _length_ratio(a, b, priors)
    log_beta = math.log(priors.beta)
    terms.extend(_shared_ratio(a.char_counts, b.char_counts, lambda c: log_rising(log_beta, c)))
    log_size_beta = math.log(size * priors.beta)
    if isinstance(a, PositionalStats):
        la, lb = a.at_least(), b.at_least()
        for j in range(1, min(len(la), len(lb))):
            x, y = la[j], lb[j]
            terms += [-t for t in _split(lambda m: log_rising(log_size_beta, m), x, y)]
    else:
        x, y = a.total_chars, b.total_chars
        if x and y:
            terms += [-t for t in _split(lambda m: log_rising(log_size_beta, m), x, y)]
    return math.fsum(terms)
