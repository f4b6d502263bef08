"""Character-pattern summaries and data-quality anomalies from fitted stats."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Sequence

from .crp import ModelPriors
from .models import ApositionalStats, PositionalStats, pool_positions


@dataclass
class PositionPattern:
    """Character distribution at one position (``position is None`` when pooled)."""

    position: int | None
    observations: int
    frequencies: dict
    posterior: dict
    dominant: list


@dataclass
class PatternReport:
    model: str
    threshold: float
    positions: list = field(default_factory=list)
    length_distribution: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def _pattern(position, counts: dict, total: int, beta: float, threshold: float) -> PositionPattern:
    chars = sorted(counts)
    freqs = {a: counts[a] / total for a in chars}
    smoothed = {a: counts[a] + beta for a in chars}
    z = sum(smoothed.values())
    posterior = {a: smoothed[a] / z for a in chars}
    dominant = [a for a in chars if freqs[a] >= threshold]
    return PositionPattern(position, total, freqs, posterior, dominant)


def inspect_patterns(stats: PositionalStats | ApositionalStats,
                     priors: ModelPriors = ModelPriors(),
                     threshold: float = 0.99) -> PatternReport:
    """Per-position (or pooled) character distributions with dominance flags.

    ``posterior`` is the beta-smoothed distribution renormalized over the
    observed characters; ``dominant`` lists characters whose empirical share
    at that position is at least ``threshold``.
    """
    report = PatternReport(stats.kind, threshold)
    n = stats.total
    if n == 0:
        return report
    report.length_distribution = {
        length: c / n for length, c in sorted(stats.length_counts.items())
    }
    if isinstance(stats, PositionalStats):
        by_pos: dict = {}
        for (j, a), c in stats.char_counts.items():
            by_pos.setdefault(j, {})[a] = c
        at_least = stats.at_least()
        for j in sorted(by_pos):
            report.positions.append(_pattern(j, by_pos[j], at_least[j], priors.beta, threshold))
    else:
        if stats.total_chars:
            report.positions.append(
                _pattern(None, dict(stats.char_counts), stats.total_chars, priors.beta, threshold)
            )
    return report


@dataclass
class Anomaly:
    row: int
    value: str
    position: int
    char: str
    frequency: float
    model: str


def find_anomalies(values: Sequence[str], stats: PositionalStats,
                   threshold: float = 0.99) -> list:
    """Values holding a character rarer than ``1 - threshold`` at its position.

    ``stats`` must have been fitted on ``values``.  Both the positional and
    the pooled view are checked, and each offending (row, position) is
    reported once per view.
    """
    cutoff = 1.0 - threshold
    at_least = stats.at_least()
    pooled = pool_positions(stats)
    pooled_total = pooled.total_chars
    found = []
    for row, v in enumerate(values):
        for j, ch in enumerate(v, 1):
            freq = stats.char_counts.get((j, ch), 0) / at_least[j]
            if freq < cutoff:
                found.append(Anomaly(row, v, j, ch, freq, "positional"))
            pfreq = pooled.char_counts.get(ch, 0) / pooled_total
            if pfreq < cutoff:
                found.append(Anomaly(row, v, j, ch, pfreq, "apositional"))
    return found
