"""Log-space Chinese Restaurant Process primitives.

Everything here returns natural-log probabilities.  Counts in real data can
reach millions, so no probability is ever formed in linear space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping


@dataclass(frozen=True)
class ModelPriors:
    """Hyperparameters shared by all model classes.

    alpha : CRP concentration.
    lam : Poisson mean of the string length.
    beta : symmetric Dirichlet prior on character distributions.
    """

    alpha: float = 3.0
    lam: float = 4.0
    beta: float = 3.0

    def __post_init__(self):
        for name in ("alpha", "lam", "beta"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ValueError(f"{name} must be a positive finite number, got {v!r}")


def log_gamma(x: float) -> float:
    """Natural log of the Gamma function for ``x > 0``."""
    if not x > 0:
        raise ValueError(f"log_gamma is defined for x > 0, got {x!r}")
    return math.lgamma(x)


def log_poisson(k: int, lam: float) -> float:
    """log Pois_lam(k).  ``lam == 0`` is the point mass at zero."""
    if lam == 0:
        return 0.0 if k == 0 else -math.inf
    return -lam + k * math.log(lam) - math.lgamma(k + 1)


def log_base_prob(s: str, lam: float, alphabet_size: int) -> float:
    """log H(s): Poisson length, then uniform i.i.d. characters."""
    if alphabet_size < 1:
        raise ValueError("alphabet_size must be at least 1")
    n = len(s)
    return log_poisson(n, lam) - n * math.log(alphabet_size)


def log_rising(log_x: float, m: int) -> float:
    """log [Gamma(x + m) / Gamma(x)] given ``log x``.

    Uses Gamma(x) = Gamma(1 + x) / x so that x may underflow to zero
    (long strings have astronomically small base mass) without losing the
    ``log x`` term.
    """
    if m == 0:
        return 0.0
    x = math.exp(log_x)
    if m == 1:
        return log_x
    return math.lgamma(x + m) - math.lgamma(1.0 + x) + log_x


def log_acrp_joint(
    counts: Mapping[str, int], alpha: float, log_h: Callable[[str], float]
) -> float:
    """Joint log probability of a value multiset under an atomic CRP.

    ``counts`` maps each distinct value to its multiplicity and ``log_h``
    gives the log base-distribution mass of a value.
    """
    total = 0
    terms = []
    log_alpha = math.log(alpha)
    for value, m in counts.items():
        lh = log_h(value)
        if not math.isfinite(lh):
            raise ValueError(f"base distribution assigns no mass to {value!r}")
        terms.append(log_rising(log_alpha + lh, m))
        total += m
    # fsum makes the result independent of iteration order, so merged
    # multisets score identically whichever side came first.
    terms.append(math.lgamma(alpha) - math.lgamma(alpha + total))
    return math.fsum(terms)
