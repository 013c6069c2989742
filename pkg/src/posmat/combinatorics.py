"""Exact integer generators: binomials, factorials, Stirling and Bell numbers.

Out-of-range arguments give 0 instead of raising, matching the boundary
conventions used by the recurrences.  Stirling rows are memoized with
``functools.lru_cache``, which is safe under concurrent use.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache


def binomial(n: int, k: int) -> int:
    if n < 0:
        raise ValueError("n must be nonnegative")
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


def factorial(n: int) -> int:
    if n < 0:
        raise ValueError("n must be nonnegative")
    return math.factorial(n)


@lru_cache(maxsize=None)
def _stirling_first_row(i: int) -> tuple:
    # row i of the unsigned first-kind triangle, entries j = 0..i
    if i == 0:
        return (1,)
    prev = _stirling_first_row(i - 1)
    m = i - 1
    row = [0] * (i + 1)
    for j in range(i + 1):
        left = prev[j - 1] if 1 <= j <= m + 1 else 0
        same = prev[j] if j <= m else 0
        row[j] = left + m * same
    return tuple(row)


@lru_cache(maxsize=None)
def _stirling_second_row(n: int) -> tuple:
    if n == 0:
        return (1,)
    prev = _stirling_second_row(n - 1)
    row = [0] * (n + 1)
    for m in range(1, n + 1):
        same = prev[m] if m <= n - 1 else 0
        row[m] = m * same + prev[m - 1]
    return tuple(row)


def stirling_first_unsigned(i: int, j: int) -> int:
    """Unsigned Stirling number of the first kind, ``|s(i, j)|``.

    Built from ``s[i+1, j] = s[i, j-1] + i * s[i, j]``; zero unless
    ``0 <= j <= i``.
    """
    if i < 0:
        raise ValueError("i must be nonnegative")
    if j < 0 or j > i:
        return 0
    return _stirling_first_row(i)[j]


def stirling_second(n: int, m: int) -> int:
    """Stirling number of the second kind ``S(n, m)``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if m < 0 or m > n:
        return 0
    return _stirling_second_row(n)[m]


def bell_number(n: int) -> int:
    if n < 0:
        raise ValueError("n must be nonnegative")
    return sum(_stirling_second_row(n))


@dataclass(frozen=True)
class BellTriangle:
    """Lower-triangular integer array, 0-based, with ``x[i][0]`` the i-th Bell number.

    ``shifted`` selects the companion array whose recurrence uses weight
    ``j + 2`` on the middle term; it factors the Hankel matrix of
    ``bell(i + j + 1)``.
    """

    order: int
    rows: tuple
    shifted: bool = False

    @property
    def X(self):
        return [list(r) for r in self.rows]

    def __getitem__(self, idx):
        i, j = idx
        return self.rows[i][j]


def _triangle(n: int, middle_offset: int) -> tuple:
    if n < 1:
        raise ValueError("order must be at least 1")
    rows = [[0] * n for _ in range(n)]
    rows[0][0] = 1
    for i in range(1, n):
        prev = rows[i - 1]
        for j in range(n):
            left = prev[j - 1] if j >= 1 else 0
            right = prev[j + 1] if j + 1 < n else 0
            rows[i][j] = left + (j + middle_offset) * prev[j] + (j + 1) * right
    return tuple(tuple(r) for r in rows)


def bell_triangle(n: int) -> BellTriangle:
    return BellTriangle(n, _triangle(n, 1))


def shifted_bell_triangle(n: int) -> BellTriangle:
    """The order ``n - 1`` companion triangle (row weights ``j + 2``)."""
    if n < 2:
        raise ValueError("shifted triangle needs n >= 2")
    return BellTriangle(n - 1, _triangle(n - 1, 2), shifted=True)
