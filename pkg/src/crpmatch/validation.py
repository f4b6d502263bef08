"""Input checks shared by the estimators and the CLI."""

from __future__ import annotations

from collections.abc import Mapping

import numpy as np

from .ingest import DEFAULT_ALPHABET, Alphabet, FieldColumn, Table, normalize_string


def check_field(X, alphabet: Alphabet = DEFAULT_ALPHABET, normalize: bool = True) -> tuple:
    """Coerce a single field into a tuple of strings.

    Accepts a sequence of strings, a 1-d array, a pandas Series or a
    :class:`FieldColumn`.  A 2-d input must have exactly one column.
    """
    if isinstance(X, FieldColumn):
        X = X.values
    elif isinstance(X, str):
        raise TypeError("expected a sequence of strings, got a single string")
    elif hasattr(X, "to_numpy"):
        X = X.to_numpy()
    if isinstance(X, np.ndarray):
        if X.ndim == 2:
            if X.shape[1] != 1:
                raise ValueError(f"expected a single field, got array of shape {X.shape}")
            X = X[:, 0]
        elif X.ndim != 1:
            raise ValueError(f"expected a 1-d field, got array of shape {X.shape}")
    values = ["" if v is None else str(v) for v in X]
    if normalize:
        return tuple(normalize_string(v, alphabet) for v in values)
    bad = set().union(*values).difference(alphabet.symbols) if values else set()
    if bad:
        raise ValueError(f"characters outside the alphabet: {''.join(sorted(bad))!r}")
    return tuple(values)


def check_table(X, alphabet: Alphabet = DEFAULT_ALPHABET, normalize: bool = True) -> Table:
    """Coerce ``X`` into a :class:`Table`.

    Accepts a :class:`Table` (returned unchanged), a pandas DataFrame, or a
    mapping from field name to values.
    """
    if isinstance(X, Table):
        if not X.fields:
            raise ValueError("table has no fields")
        return X
    if hasattr(X, "columns") and hasattr(X, "__getitem__"):
        X = {str(c): X[c] for c in X.columns}
    if not isinstance(X, Mapping):
        raise TypeError(f"expected a Table, DataFrame or mapping of fields, got {type(X).__name__}")
    if not X:
        raise ValueError("table has no fields")
    cols = tuple(FieldColumn(str(name), check_field(v, alphabet, normalize)) for name, v in X.items())
    lengths = {len(c) for c in cols}
    if len(lengths) > 1:
        raise ValueError(f"fields have different lengths: {sorted(lengths)}")
    return Table(cols, lengths.pop())
