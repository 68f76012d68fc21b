"""
File formats: the dataset CSV, group-element and configuration JSON, and
17-significant-digit JSON output.

Dataset CSV
-----------
Line 1 holds the values of ``kind,p,q,N`` (``kind`` is ``vector`` or
``matrix``; vector data has ``q = 1``).  Line 2 holds column names:
``y_1..y_p`` for vectors, ``x_i_j`` (row-major) for matrices, then ``w``.
Each following line is one sample with its weight in the last column.
"""

import csv
import json
import math
from dataclasses import dataclass

import numpy as np

from .data import MIN_WEIGHT, WeightedMatrixData, WeightedVectorData
from .errors import DomainError

__all__ = [
    "ParseError",
    "read_dataset",
    "write_dataset",
    "dataset_columns",
    "read_json",
    "read_elements",
    "to_jsonable",
    "dumps",
]


class ParseError(DomainError):
    """A malformed input file; carries the 1-based line and column."""

    def __init__(self, path, line, column, message):
        where = f"{path}:{line}" + (f":{column}" if column else "")
        super().__init__(f"{where}: {message}")
        self.path = str(path)
        self.line = line
        self.column = column


@dataclass(frozen=True)
class _Header:
    kind: str
    p: int
    q: int
    n: int


def dataset_columns(kind, p, q):
    if kind == "vector":
        names = [f"y_{i + 1}" for i in range(p)]
    else:
        names = [f"x_{i + 1}_{j + 1}" for i in range(p) for j in range(q)]
    return names + ["w"]


def _parse_int(path, line, column, text, name):
    try:
        value = int(text.strip())
    except ValueError:
        raise ParseError(path, line, column, f"{name} must be an integer, got {text!r}") from None
    if value < 1:
        raise ParseError(path, line, column, f"{name} must be >= 1, got {value}")
    return value


def _parse_header(path, row):
    if len(row) != 4:
        raise ParseError(path, 1, None, f"expected 4 header fields kind,p,q,N, got {len(row)}")
    kind = row[0].strip()
    if kind not in ("vector", "matrix"):
        raise ParseError(path, 1, 1, f"kind must be 'vector' or 'matrix', got {kind!r}")
    p = _parse_int(path, 1, 2, row[1], "p")
    q = _parse_int(path, 1, 3, row[2], "q")
    n = _parse_int(path, 1, 4, row[3], "N")
    if kind == "vector" and q != 1:
        raise ParseError(path, 1, 3, f"vector data must have q = 1, got {q}")
    return _Header(kind, p, q, n)


def read_dataset(path):
    """Load a dataset CSV as :class:`WeightedVectorData` or :class:`WeightedMatrixData`.

    Raises :class:`ParseError` with the offending line and column.
    """
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise ParseError(path, 0, None, f"cannot read file: {exc.strerror}") from None
    if not rows:
        raise ParseError(path, 1, None, "empty file")
    head = _parse_header(path, rows[0])
    expected = dataset_columns(head.kind, head.p, head.q)
    if len(rows) < 2:
        raise ParseError(path, 2, None, "missing column-name line")
    names = [c.strip() for c in rows[1]]
    if names != expected:
        raise ParseError(path, 2, None, f"expected columns {','.join(expected)}")

    body = [(k + 3, r) for k, r in enumerate(rows[2:]) if any(c.strip() for c in r)]
    if len(body) != head.n:
        raise ParseError(path, len(rows) + 1, None, f"header declares N={head.n}, found {len(body)} rows")
    width = len(expected)
    values = np.empty((head.n, width))
    for k, (line, row) in enumerate(body):
        if len(row) != width:
            raise ParseError(path, line, None, f"expected {width} fields, got {len(row)}")
        for j, text in enumerate(row):
            try:
                v = float(text)
            except ValueError:
                raise ParseError(path, line, j + 1, f"not a number: {text!r}") from None
            if not math.isfinite(v):
                raise ParseError(path, line, j + 1, f"value must be finite, got {text!r}")
            values[k, j] = v
        if not values[k, -1] >= MIN_WEIGHT:
            raise ParseError(path, line, width, f"weight must be > 0, got {row[-1]!r}")

    samples, weights = values[:, :-1], values[:, -1]
    if head.kind == "vector":
        return WeightedVectorData(samples, weights)
    return WeightedMatrixData(samples.reshape(head.n, head.p, head.q), weights)


def write_dataset(path, data):
    """Write ``data`` in the dataset CSV format with 17 significant digits."""
    if isinstance(data, WeightedVectorData):
        kind, p, q = "vector", data.p, 1
        flat = data.samples
    elif isinstance(data, WeightedMatrixData):
        kind, p, q = "matrix", data.p, data.q
        flat = data.samples.reshape(data.n, p * q)
    else:
        raise TypeError("expected WeightedVectorData or WeightedMatrixData")
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow([kind, p, q, data.n])
        out.writerow(dataset_columns(kind, p, q))
        for row, w in zip(flat, data.weights):
            out.writerow([format(float(v), ".17g") for v in row] + [format(float(w), ".17g")])


def read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ParseError(path, 0, None, f"cannot read file: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(path, exc.lineno, exc.colno, exc.msg) from None


def read_elements(path):
    """Finite-set group elements: a JSON array of row-major square matrices."""
    raw = read_json(path)
    if not isinstance(raw, list) or not raw:
        raise ParseError(path, 1, None, "expected a non-empty JSON array of matrices")
    mats = []
    for k, m in enumerate(raw):
        try:
            a = np.array(m, dtype=float)
        except (TypeError, ValueError):
            raise ParseError(path, 1, None, f"element {k} is not a numeric matrix") from None
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ParseError(path, 1, None, f"element {k} is not a square matrix")
        mats.append(a)
    return mats


def to_jsonable(obj):
    """Convert numpy values, enums and containers to plain JSON types."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if hasattr(obj, "value") and hasattr(obj, "name"):
        return obj.value
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def _encode(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        # non-finite values have no JSON encoding
        return format(obj, ".17g") if math.isfinite(obj) else "null"
    return json.dumps(obj)


def dumps(obj, indent=2):
    """JSON text with every float printed to 17 significant digits."""
    return _encode(to_jsonable(obj), indent, 0)
