"""Seeded synthetic tables with declared per-field value formats."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .ingest import DEFAULT_ALPHABET, Alphabet, FieldColumn, Table, normalize_string

MONTHS = ("JAN", "FEB", "MAR", "APR", "MAY", "JUN", "JUL", "AUG", "SEP", "OCT", "NOV", "DEC")
STATES = ("CA", "TX", "NY", "FL", "IL", "PA", "OH", "GA", "NC", "MI", "NJ", "VA", "WA", "AZ", "MA")
CONSONANTS = "BCDFGHJKLMNPRSTVWZ"
VOWELS = "AEIOU"


@dataclass(frozen=True)
class FieldSpec:
    """One synthetic field: a name, a format kind and format parameters."""

    name: str
    kind: str
    params: dict = field(default_factory=dict)


def _digits(rng, rows, width):
    return ["".join(map(str, r)) for r in rng.integers(0, 10, size=(rows, width))]


def _date(rng, rows, start_year=2005, end_year=2015, style="mon-year"):
    years = rng.integers(start_year, end_year + 1, size=rows)
    months = rng.integers(0, 12, size=rows)
    if style == "mon-year":
        return [f"{MONTHS[m]}-{y}" for m, y in zip(months, years)]
    days = rng.integers(1, 29, size=rows)
    return [f"{y}-{m + 1:02d}-{d:02d}" for y, m, d in zip(years, months, days)]


def _prefixed_id(rng, rows, prefix="1", width=9):
    return [prefix + d for d in _digits(rng, rows, width)]


def _zip(rng, rows, width=5):
    return _digits(rng, rows, width)


def _word(rng, syllables):
    return "".join(CONSONANTS[rng.integers(len(CONSONANTS))] + VOWELS[rng.integers(len(VOWELS))]
                   for _ in range(syllables))


def _name(rng, rows, vocabulary=400, min_syllables=2, max_syllables=4):
    vocab = [_word(rng, int(rng.integers(min_syllables, max_syllables + 1)))
             for _ in range(vocabulary)]
    # Zipf-like popularity, as with real surnames.
    weights = 1.0 / np.arange(1, vocabulary + 1)
    idx = rng.choice(vocabulary, size=rows, p=weights / weights.sum())
    return [vocab[i] for i in idx]


STREET_SUFFIXES = ("ST", "AVE", "RD", "BLVD", "DR", "LN", "CT", "WAY")
ORG_SUFFIXES = ("CLINIC", "MEDICAL GROUP", "HEALTH", "PHARMACY", "ASSOCIATES", "CENTER")


def _address(rng, rows, streets=300):
    names = [_word(rng, int(rng.integers(2, 4))) for _ in range(streets)]
    numbers = rng.integers(1, 20000, size=rows)
    idx = rng.integers(0, streets, size=rows)
    suffix = rng.integers(0, len(STREET_SUFFIXES), size=rows)
    unit = rng.random(rows)
    out = []
    for n, i, s, u in zip(numbers, idx, suffix, unit):
        v = f"{n} {names[i]} {STREET_SUFFIXES[s]}"
        if u < 0.2:
            v += f", STE {int(u * 1000)}"
        out.append(v)
    return out


def _organization(rng, rows, vocabulary=200):
    names = [_word(rng, int(rng.integers(2, 4))) for _ in range(vocabulary)]
    out = []
    for _ in range(rows):
        words = [names[int(rng.integers(vocabulary))] for _ in range(int(rng.integers(1, 3)))]
        suffix = ORG_SUFFIXES[int(rng.integers(len(ORG_SUFFIXES)))]
        llc = " LLC" if rng.random() < 0.3 else ""
        out.append(" ".join(words) + " " + suffix + llc)
    return out


def _text(rng, rows, vocabulary=500, min_words=2, max_words=14):
    words = [_word(rng, int(rng.integers(1, 4))) for _ in range(vocabulary)]
    weights = 1.0 / np.arange(1, vocabulary + 1)
    weights /= weights.sum()
    out = []
    for k in rng.integers(min_words, max_words + 1, size=rows):
        out.append(" ".join(words[i] for i in rng.choice(vocabulary, size=int(k), p=weights)))
    return out


def _amount(rng, rows, scale=2000.0):
    return [f"{x:.2f}" for x in rng.lognormal(np.log(scale), 1.0, size=rows)]


def _percent(rng, rows, mean=12.0, sd=4.0):
    return [f"{abs(x):.1f}%" for x in rng.normal(mean, sd, size=rows)]


def _phone(rng, rows):
    return [f"{a}-{b}-{c}" for a, b, c in zip(_digits(rng, rows, 3), _digits(rng, rows, 3),
                                              _digits(rng, rows, 4))]


def _choice(rng, rows, values=("Y", "N"), weights=None):
    p = None
    if weights is not None:
        p = np.asarray(weights, dtype=float)
        p = p / p.sum()
    idx = rng.choice(len(values), size=rows, p=p)
    return [values[i] for i in idx]


def _state(rng, rows):
    return _choice(rng, rows, STATES, weights=1.0 / np.arange(1, len(STATES) + 1))


def _integer(rng, rows, low=0, high=100):
    return [str(v) for v in rng.integers(low, high, size=rows)]


GENERATORS = {
    "date": _date,
    "id": _prefixed_id,
    "zip": _zip,
    "name": _name,
    "amount": _amount,
    "address": _address,
    "text": _text,
    "organization": _organization,
    "percent": _percent,
    "phone": _phone,
    "choice": _choice,
    "state": _state,
    "integer": _integer,
}


def generate_synthetic_table(specs: Sequence[FieldSpec], rows: int, seed: int = 0,
                             alphabet: Alphabet = DEFAULT_ALPHABET) -> Table:
    """Deterministic table of ``rows`` records, one column per spec.

    Each field draws from its own child stream of ``seed``, so adding a
    field never changes the values of the others.
    """
    streams = np.random.SeedSequence(seed).spawn(len(specs))
    cols = []
    for spec, stream in zip(specs, streams):
        try:
            gen = GENERATORS[spec.kind]
        except KeyError:
            raise ValueError(f"unknown field kind {spec.kind!r}") from None
        values = gen(np.random.default_rng(stream), rows, **spec.params)
        cols.append(FieldColumn(spec.name, tuple(normalize_string(v, alphabet) for v in values)))
    return Table(tuple(cols), rows)


# Identifiers, names, free text, addresses, dates, amounts and yes/no flags.
# The two amount fields and the three flags are deliberately alike, as
# sibling fields are in real tables.
MIXED_FIELDS = (
    FieldSpec("provider_id", "id", {"prefix": "1", "width": 9}),
    FieldSpec("last_name", "name", {"vocabulary": 600}),
    FieldSpec("notes", "text"),
    FieldSpec("address", "address"),
    FieldSpec("zip", "zip"),
    FieldSpec("organization", "organization"),
    FieldSpec("issue_date", "date", {"style": "mon-year"}),
    FieldSpec("loan_amount", "amount", {"scale": 2000.0}),
    FieldSpec("installment", "amount", {"scale": 300.0}),
    FieldSpec("verified", "choice", {"values": ("Y", "N"), "weights": (0.55, 0.45)}),
    FieldSpec("owns_home", "choice", {"values": ("Y", "N"), "weights": (0.65, 0.35)}),
    FieldSpec("sole_proprietor", "choice", {"values": ("Y", "N"), "weights": (0.6, 0.4)}),
)
