"""Dense immutable matrices over exact rationals or HPReal, plus JSON/CSV I/O."""
from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from numbers import Rational
from pathlib import Path
from typing import Iterable, Sequence

from .numerics import DEFAULT_PRECISION, HPReal, format_rational, parse_rational

RATIONAL = "rational"
REAL = "real"


class MatrixFormatError(ValueError):
    """A matrix file or payload could not be parsed."""


def _as_scalar(x):
    if isinstance(x, HPReal):
        return x
    if isinstance(x, bool):
        return Fraction(int(x))
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, float):
        raise TypeError("floats are not exact; pass a Fraction or an HPReal")
    raise TypeError(f"unsupported matrix entry {x!r}")


class Matrix:
    """Row-major dense matrix.

    ``offset`` records whether the family is indexed from 0 or 1 and only
    affects labels; indexing with ``A[i, j]`` is always 0-based.
    """

    __slots__ = ("data", "offset", "cols_hint")

    def __init__(self, rows: Iterable[Sequence], offset: int = 0, cols: int | None = None):
        data = tuple(tuple(_as_scalar(x) for x in row) for row in rows)
        if offset not in (0, 1):
            raise ValueError("offset must be 0 or 1")
        width = len(data[0]) if data else (cols or 0)
        if any(len(r) != width for r in data):
            raise ValueError("ragged rows")
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "offset", offset)
        object.__setattr__(self, "cols_hint", width)

    # -- shape --------------------------------------------------------------

    @property
    def rows(self) -> int:
        return len(self.data)

    @property
    def cols(self) -> int:
        return self.cols_hint

    @property
    def shape(self):
        return (self.rows, self.cols)

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    @property
    def kind(self) -> str:
        if any(isinstance(x, HPReal) for row in self.data for x in row):
            return REAL
        return RATIONAL

    @property
    def is_exact(self) -> bool:
        return self.kind == RATIONAL

    @property
    def precision(self) -> int | None:
        precs = [x.prec for row in self.data for x in row if isinstance(x, HPReal)]
        return min(precs) if precs else None

    def __setattr__(self, name, value):
        raise AttributeError("Matrix is immutable")

    def __getitem__(self, idx):
        i, j = idx
        return self.data[i][j]

    def __iter__(self):
        return iter(self.data)

    def tolist(self):
        return [list(r) for r in self.data]

    # -- algebra --------------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self.data == other.data

    def __hash__(self):
        return hash(self.data)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        cols = list(zip(*other.data)) if other.rows else [() for _ in range(other.cols)]
        out = []
        for row in self.data:
            out.append([_dot(row, c) for c in cols])
        return Matrix(out, self.offset, cols=other.cols)

    def __add__(self, other):
        self._same_shape(other)
        return Matrix(
            [[a + b for a, b in zip(r, s)] for r, s in zip(self.data, other.data)],
            self.offset,
            cols=self.cols,
        )

    def __sub__(self, other):
        self._same_shape(other)
        return Matrix(
            [[a - b for a, b in zip(r, s)] for r, s in zip(self.data, other.data)],
            self.offset,
            cols=self.cols,
        )

    def scale(self, c) -> "Matrix":
        return Matrix([[c * a for a in r] for r in self.data], self.offset, cols=self.cols)

    def _same_shape(self, other):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    @property
    def T(self) -> "Matrix":
        return Matrix([list(c) for c in zip(*self.data)], self.offset, cols=self.rows)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Matrix":
        """0-based row/column selection ``A[rows, cols]``."""
        return Matrix([[self.data[i][j] for j in cols] for i in rows], self.offset, cols=len(cols))

    def map(self, fn) -> "Matrix":
        return Matrix([[fn(x) for x in r] for r in self.data], self.offset, cols=self.cols)

    def to_hp(self, prec: int = DEFAULT_PRECISION) -> "Matrix":
        return self.map(lambda x: HPReal(x, prec))

    def is_symmetric(self, tol=None) -> bool:
        if not self.is_square:
            return False
        n = self.rows
        for i in range(n):
            for j in range(i + 1, n):
                a, b = self.data[i][j], self.data[j][i]
                if tol is None:
                    if a != b:
                        return False
                elif abs(a - b) > tol:
                    return False
        return True

    def is_lower_triangular(self) -> bool:
        return all(self.data[i][j] == 0 for i in range(self.rows) for j in range(i + 1, self.cols))

    def is_hankel(self) -> bool:
        return all(
            self.data[i][j] == self.data[i - 1][j + 1]
            for i in range(1, self.rows)
            for j in range(self.cols - 1)
        )

    def with_offset(self, offset: int) -> "Matrix":
        return Matrix(self.data, offset, cols=self.cols)

    # -- text -----------------------------------------------------------------

    def __repr__(self):
        return f"Matrix({self.tolist()!r}, offset={self.offset})"

    def pretty(self) -> str:
        cells = [[_format_entry(x) for x in r] for r in self.data]
        width = max((len(c) for r in cells for c in r), default=1)
        return "\n".join(" ".join(c.rjust(width) for c in r) for r in cells)


def _dot(u, v):
    acc = Fraction(0)
    for a, b in zip(u, v):
        acc = a * b + acc
    return acc


def identity(n: int, offset: int = 0) -> Matrix:
    return Matrix([[int(i == j) for j in range(n)] for i in range(n)], offset, cols=n)


def diag(values: Sequence, offset: int = 0) -> Matrix:
    n = len(values)
    return Matrix(
        [[values[i] if i == j else 0 for j in range(n)] for i in range(n)], offset, cols=n
    )


def _format_entry(x) -> str:
    if isinstance(x, HPReal):
        return str(x)
    return format_rational(x)


# ---------------------------------------------------------------------------
# serialization


def to_dict(A: Matrix) -> dict:
    out = {
        "rows": A.rows,
        "cols": A.cols,
        "scalar": A.kind,
        "offset": A.offset,
        "data": [[_format_entry(x) for x in r] for r in A.data],
    }
    if A.kind == REAL:
        out["precision_bits"] = A.precision
    return out


def to_json(A: Matrix, **kwargs) -> str:
    return json.dumps(to_dict(A), **kwargs)


def _parse_entry(text, scalar: str, prec: int, where: str):
    try:
        if scalar == RATIONAL:
            return parse_rational(text)
        return HPReal(str(text), prec)
    except (ValueError, TypeError) as exc:
        raise MatrixFormatError(f"cannot parse entry {text!r} at {where}: {exc}") from None


def _cell_kind(text) -> str | None:
    text = str(text).strip()
    try:
        parse_rational(text)
        return RATIONAL
    except ValueError:
        pass
    try:
        HPReal(text, DEFAULT_PRECISION)
        return REAL
    except (ValueError, TypeError):
        return None


def _detect_scalar(data) -> str:
    """Classify the entries; unparseable cells and mixed kinds are errors."""
    kinds = {}
    for i, r in enumerate(data):
        for j, c in enumerate(r):
            kind = _cell_kind(c)
            if kind is None:
                raise MatrixFormatError(f"cannot parse entry {c!r} at row {i + 1}, column {j + 1}")
            kinds.setdefault(kind, (i + 1, j + 1))
    if len(kinds) > 1:
        (ri, ci), (rr, cr) = kinds[RATIONAL], kinds[REAL]
        raise MatrixFormatError(
            f"mixed scalar kinds: rational at row {ri}, column {ci}; real at row {rr}, column {cr}"
        )
    return next(iter(kinds), RATIONAL)


def from_dict(payload: dict) -> Matrix:
    try:
        data = payload["data"]
    except (KeyError, TypeError):
        raise MatrixFormatError("matrix payload needs a 'data' field") from None
    if not isinstance(data, list) or any(not isinstance(r, list) for r in data):
        raise MatrixFormatError("'data' must be a list of rows")
    detected = _detect_scalar(data)
    scalar = payload.get("scalar") or detected
    if scalar not in (RATIONAL, REAL):
        raise MatrixFormatError(f"unknown scalar kind {scalar!r}")
    if scalar == RATIONAL and detected != RATIONAL:
        raise MatrixFormatError("declared rational but found real entries")
    prec = int(payload.get("precision_bits", DEFAULT_PRECISION))
    rows = [
        [_parse_entry(c, scalar, prec, f"row {i + 1}, column {j + 1}") for j, c in enumerate(r)]
        for i, r in enumerate(data)
    ]
    try:
        A = Matrix(rows, int(payload.get("offset", 0)), cols=payload.get("cols", 0))
    except ValueError as exc:
        raise MatrixFormatError(str(exc)) from None
    for key, got in (("rows", A.rows), ("cols", A.cols)):
        if key in payload and int(payload[key]) != got:
            raise MatrixFormatError(f"declared {key}={payload[key]} but found {got}")
    return A


def from_json(text: str) -> Matrix:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MatrixFormatError(f"invalid JSON: {exc}") from None
    return from_dict(payload)


def to_csv(A: Matrix) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for r in A.data:
        writer.writerow([_format_entry(x) for x in r])
    return buf.getvalue()


def from_csv(text: str, offset: int = 0, prec: int = DEFAULT_PRECISION) -> Matrix:
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    scalar = _detect_scalar(rows)
    return from_dict({"data": rows, "scalar": scalar, "offset": offset, "precision_bits": prec})


def ingest_matrix(path, fmt: str | None = None) -> Matrix:
    """Read a matrix file; the format is taken from the suffix unless given."""
    path = Path(path)
    fmt = (fmt or path.suffix.lstrip(".")).lower()
    text = path.read_text()
    if fmt == "json":
        return from_json(text)
    if fmt == "csv":
        return from_csv(text)
    raise MatrixFormatError(f"unknown matrix format {fmt!r}")
