"""Loading, normalizing, filtering and splitting tabular field data."""

from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

LETTERS = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
DIGITS = "0123456789"
# . , : ; / \ " ' ` plus square, curly and angle bracket pairs, parentheses,
# + - ! ? $ % & * _ and space.
PUNCTUATION = ".,:;/\\\"'`[]{}<>()+-!?$%&*_ "
PLACEHOLDER = "#"


class DataError(ValueError):
    """Raised for malformed or unusable input data."""


@dataclass(frozen=True)
class Alphabet:
    """An ordered set of symbols with one designated placeholder.

    Any character outside ``symbols`` is mapped to ``placeholder`` during
    normalization.
    """

    symbols: str = LETTERS + DIGITS + PUNCTUATION + PLACEHOLDER
    placeholder: str = PLACEHOLDER

    def __post_init__(self):
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError("alphabet symbols must be distinct")
        if self.placeholder not in self.symbols:
            raise ValueError("placeholder must be one of the alphabet symbols")

    def __len__(self) -> int:
        return len(self.symbols)

    def __contains__(self, ch: str) -> bool:
        return len(ch) == 1 and ch in self.symbols

    @classmethod
    def from_symbols(cls, symbols: Iterable[str]) -> "Alphabet":
        """Small ad-hoc alphabet; the first symbol doubles as placeholder."""
        symbols = "".join(symbols)
        return cls(symbols=symbols, placeholder=symbols[0])


DEFAULT_ALPHABET = Alphabet()


_DEFAULT_KEEP = frozenset(DEFAULT_ALPHABET.symbols)


def normalize_string(raw: str, alphabet: Alphabet = DEFAULT_ALPHABET) -> str:
    """Uppercase ``raw`` and replace every character outside the alphabet.

    The output always has the same length as the input.  Characters whose
    uppercase form is more than one character (e.g. ``'ß'``) are replaced
    rather than expanded.
    """
    keep = _DEFAULT_KEEP if alphabet is DEFAULT_ALPHABET else frozenset(alphabet.symbols)
    ph = alphabet.placeholder
    out = []
    for ch in raw:
        up = ch.upper()
        out.append(up if up in keep else ph)
    return "".join(out)


@dataclass(frozen=True)
class FieldColumn:
    name: str
    values: tuple

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class Table:
    fields: tuple = field(default_factory=tuple)
    record_count: int = 0

    def __post_init__(self):
        for col in self.fields:
            if len(col.values) != self.record_count:
                raise DataError(
                    f"field {col.name!r} has {len(col.values)} values, "
                    f"expected {self.record_count}"
                )

    @property
    def names(self) -> list:
        return [f.name for f in self.fields]

    def __getitem__(self, name: str) -> FieldColumn:
        for col in self.fields:
            if col.name == name:
                return col
        raise KeyError(
            f"unknown field {name!r}; available fields: {', '.join(self.names)}"
        )

    @classmethod
    def from_columns(cls, columns: dict, alphabet: Alphabet | None = None) -> "Table":
        """Build a table from ``{name: values}``, normalizing if ``alphabet`` is given."""
        cols = []
        for name, values in columns.items():
            values = tuple(values)
            if alphabet is not None:
                values = tuple(normalize_string(str(v), alphabet) for v in values)
            cols.append(FieldColumn(str(name), values))
        count = len(cols[0].values) if cols else 0
        return cls(tuple(cols), count)

    def rows(self, start: int, stop: int) -> "Table":
        cols = tuple(FieldColumn(c.name, c.values[start:stop]) for c in self.fields)
        count = len(range(*slice(start, stop).indices(self.record_count)))
        return Table(cols, count)


def _read_rows(text: str) -> tuple[list, list]:
    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        header = next(reader)
    except StopIteration:
        raise DataError("CSV file is empty; a header row is required") from None
    rows = []
    for row in reader:
        if not row:
            # csv yields [] for blank lines; a one-column file may hold an
            # empty value, which is indistinguishable here.
            if len(header) == 1:
                row = [""]
            else:
                continue
        if len(row) != len(header):
            raise DataError(
                f"row {reader.line_num}: expected {len(header)} values, got {len(row)}"
            )
        rows.append(row)
    return header, rows


def load_table(path, alphabet: Alphabet = DEFAULT_ALPHABET) -> Table:
    """Read a headed CSV file into a normalized :class:`Table`.

    Bytes that are not valid UTF-8 are decoded to U+FFFD, which then
    normalizes to the placeholder.
    """
    raw = Path(path).read_bytes()
    text = raw.decode("utf-8-sig", errors="replace")
    header, rows = _read_rows(text)
    cols = []
    for i, name in enumerate(header):
        values = tuple(normalize_string(r[i], alphabet) for r in rows)
        cols.append(FieldColumn(name, values))
    return Table(tuple(cols), len(rows))


def write_table(table: Table, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(table.names)
        for i in range(table.record_count):
            writer.writerow([c.values[i] for c in table.fields])


def modal_frequency(values: Sequence[str]) -> float:
    if not values:
        return 1.0
    (_, top), = Counter(values).most_common(1)
    return top / len(values)


def filter_fields(table: Table, threshold: float = 0.99) -> Table:
    """Drop fields whose most common value covers at least ``threshold`` of rows.

    Constant and all-empty fields are always removed.  A table with no rows
    loses every field.
    """
    if not 0 < threshold <= 1:
        raise ValueError(f"threshold must be in (0, 1], got {threshold}")
    kept = tuple(c for c in table.fields if modal_frequency(c.values) < threshold)
    return Table(kept, table.record_count)


def split_subsamples(table: Table, n: int) -> tuple[Table, Table]:
    """Return the first ``n`` and the last ``n`` records as two tables."""
    if n < 1:
        raise ValueError(f"subsample size must be positive, got {n}")
    if 2 * n > table.record_count:
        raise DataError(
            f"subsample size {n} needs {2 * n} records but the table has "
            f"{table.record_count}; maximum feasible n is {table.record_count // 2}"
        )
    return table.rows(0, n), table.rows(table.record_count - n, table.record_count)
