"""Constructors for the special matrix families and entrywise operations.

Families indexed from 1 (beta, Cauchy, Stirling) are tagged ``offset=1``;
Pascal, Bell and the Bell triangles are tagged ``offset=0``.
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Integral, Rational
from typing import Sequence

from .combinatorics import (
    bell_number,
    bell_triangle,
    binomial,
    factorial,
    shifted_bell_triangle,
    stirling_first_unsigned,
    stirling_second,
)
from .matrix import Matrix
from .numerics import DEFAULT_PRECISION, DomainError, HPReal, beta_recip_hp, gamma_hp

FIRST = "first"
SECOND = "second"


def _check_size(n: int, minimum: int = 1) -> int:
    if not isinstance(n, Integral) or n < minimum:
        raise ValueError(f"size must be an integer >= {minimum}, got {n!r}")
    return int(n)


class RealIndexSet(tuple):
    """Strictly increasing tuple of positive reals, stored as HPReal."""

    def __new__(cls, values: Sequence, prec: int = DEFAULT_PRECISION):
        items = tuple(v if isinstance(v, HPReal) else HPReal(v, prec) for v in values)
        if not items:
            raise ValueError("index set must be nonempty")
        if items[0] <= 0:
            raise DomainError("index values must be positive")
        for a, b in zip(items, items[1:]):
            if not a < b:
                raise ValueError("index values must be strictly increasing")
        return super().__new__(cls, items)


# ---------------------------------------------------------------------------
# exact families


def pascal_matrix(n: int) -> Matrix:
    """``[C(i + j, i)]`` for ``i, j = 0..n`` (size ``n + 1``)."""
    _check_size(n, 0)
    return Matrix([[binomial(i + j, i) for j in range(n + 1)] for i in range(n + 1)], 0)


def beta_matrix(n: int) -> Matrix:
    """``[1 / B(i, j)] = [(i + j - 1)! / ((i - 1)! (j - 1)!)]`` for ``1 <= i, j <= n``."""
    _check_size(n)
    return Matrix(
        [
            [factorial(i + j - 1) // (factorial(i - 1) * factorial(j - 1)) for j in range(1, n + 1)]
            for i in range(1, n + 1)
        ],
        1,
    )


def beta_matrix_on(indices: Sequence[int]) -> Matrix:
    """Beta matrix restricted to a strictly increasing set of positive integers."""
    idx = [int(v) for v in indices]
    if not idx or idx[0] < 1 or any(a >= b for a, b in zip(idx, idx[1:])):
        raise ValueError("indices must be strictly increasing positive integers")
    return Matrix(
        [[factorial(a + b - 1) // (factorial(a - 1) * factorial(b - 1)) for b in idx] for a in idx],
        1,
    )


def cauchy_matrix(n: int) -> Matrix:
    """``[i j / (i + j)]``, i.e. ``1 / (1/i + 1/j)``, for ``1 <= i, j <= n``."""
    _check_size(n)
    return Matrix(
        [[Fraction(i * j, i + j) for j in range(1, n + 1)] for i in range(1, n + 1)], 1
    )


def stirling_matrix(kind: str, n: int) -> Matrix:
    _check_size(n)
    if kind == FIRST:
        entry = stirling_first_unsigned
    elif kind == SECOND:
        entry = stirling_second
    else:
        raise ValueError(f"kind must be 'first' or 'second', got {kind!r}")
    return Matrix(
        [[entry(i, j) if j <= i else 0 for j in range(1, n + 1)] for i in range(1, n + 1)], 1
    )


def symmetrized_stirling(kind: str, n: int) -> Matrix:
    S = stirling_matrix(kind, n)
    return S @ S.T


def bell_matrix(n: int) -> Matrix:
    """Hankel matrix ``[bell(i + j)]`` for ``i, j = 0..n-1``."""
    _check_size(n)
    return Matrix([[bell_number(i + j) for j in range(n)] for i in range(n)], 0)


def bell_triangle_matrix(n: int) -> Matrix:
    return Matrix(bell_triangle(n).rows, 0)


def shifted_bell_triangle_matrix(n: int) -> Matrix:
    return Matrix(shifted_bell_triangle(n).rows, 0)


def factorial_hankel(n: int) -> Matrix:
    """``[(i + j)!]`` for ``i, j = 0..n``."""
    _check_size(n, 0)
    return Matrix([[factorial(i + j) for j in range(n + 1)] for i in range(n + 1)], 0)


# ---------------------------------------------------------------------------
# real-indexed families


def gamma_matrix(lam, mu, prec: int = DEFAULT_PRECISION) -> Matrix:
    """``[Gamma(lam_i + mu_j)]`` for strictly increasing positive index sets."""
    lam = lam if isinstance(lam, RealIndexSet) else RealIndexSet(lam, prec)
    mu = mu if isinstance(mu, RealIndexSet) else RealIndexSet(mu, prec)
    if len(lam) != len(mu):
        raise ValueError("index sets must have equal length")
    wp = prec + 8
    return Matrix(
        [[HPReal(gamma_hp(HPReal(a, wp) + HPReal(b, wp), wp), prec) for b in mu] for a in lam], 1
    )


def beta_recip_matrix(lam, mu, prec: int = DEFAULT_PRECISION) -> Matrix:
    """``[1 / B(lam_i, mu_j)]``.  Integer indices take an exact path."""
    if _all_integers(lam) and _all_integers(mu):
        li, mi = [int(Fraction(v)) for v in lam], [int(Fraction(v)) for v in mu]
        RealIndexSet(li)
        RealIndexSet(mi)
        if len(li) != len(mi):
            raise ValueError("index sets must have equal length")
        return Matrix(
            [[factorial(a + b - 1) // (factorial(a - 1) * factorial(b - 1)) for b in mi] for a in li],
            1,
        )
    lam = lam if isinstance(lam, RealIndexSet) else RealIndexSet(lam, prec)
    mu = mu if isinstance(mu, RealIndexSet) else RealIndexSet(mu, prec)
    if len(lam) != len(mu):
        raise ValueError("index sets must have equal length")
    return Matrix([[beta_recip_hp(a, b, prec) for b in mu] for a in lam], 1)


def _all_integers(values) -> bool:
    for v in values:
        if isinstance(v, bool) or not isinstance(v, (Integral, Rational)):
            return False
        if Fraction(v).denominator != 1:
            return False
    return True


# ---------------------------------------------------------------------------
# entrywise operations


def schur_product(A: Matrix, B: Matrix) -> Matrix:
    if A.shape != B.shape:
        raise ValueError(f"Schur product needs equal shapes, got {A.shape} and {B.shape}")
    return Matrix(
        [[a * b for a, b in zip(r, s)] for r, s in zip(A.data, B.data)], A.offset, cols=A.cols
    )


def hadamard_power(A: Matrix, r, prec: int = DEFAULT_PRECISION) -> Matrix:
    """Entrywise power ``[a_ij ** r]``.

    Stays exact for an exact matrix and a nonnegative integer exponent;
    otherwise entries are converted to HPReal at ``prec`` bits first.
    """
    integral = isinstance(r, Integral) or (isinstance(r, Rational) and Fraction(r).denominator == 1)
    if integral and r >= 0 and A.is_exact:
        k = int(r)
        return A.map(lambda x: x**k)
    if not integral:
        for row in A.data:
            for x in row:
                if x <= 0:
                    raise DomainError("real Hadamard power needs strictly positive entries")
    exponent = r if isinstance(r, HPReal) else HPReal(r, prec + 20) if not integral else int(r)
    return A.map(lambda x: HPReal(x, prec) ** exponent)


def matrix_log(A: Matrix, prec: int = DEFAULT_PRECISION) -> Matrix:
    for row in A.data:
        for x in row:
            if x <= 0:
                raise DomainError("entrywise log needs strictly positive entries")
    return A.map(lambda x: HPReal(x, prec).log())


def delta_log(A: Matrix, prec: int = DEFAULT_PRECISION) -> Matrix:
    """Second difference of the entrywise log.

    Entry ``(i, j)`` is ``log a[i,j] + log a[i+1,j+1] - log a[i+1,j] - log a[i,j+1]``.
    For exact input the ratio is formed exactly and a single log is taken.
    """
    if A.rows < 2 or A.cols < 2:
        raise ValueError("delta_log needs at least a 2x2 matrix")
    if A.is_exact:
        for row in A.data:
            for x in row:
                if x <= 0:
                    raise DomainError("delta_log needs strictly positive entries")
        a = A.data
        return Matrix(
            [
                [
                    HPReal(a[i][j] * a[i + 1][j + 1] / (a[i + 1][j] * a[i][j + 1]), prec).log()
                    for j in range(A.cols - 1)
                ]
                for i in range(A.rows - 1)
            ],
            A.offset,
        )
    L = matrix_log(A, prec).data
    return Matrix(
        [
            [L[i][j] + L[i + 1][j + 1] - L[i + 1][j] - L[i][j + 1] for j in range(A.cols - 1)]
            for i in range(A.rows - 1)
        ],
        A.offset,
    )


def delete_rc(A: Matrix, i: int, j: int) -> Matrix:
    """Delete row ``i`` and column ``j`` (both 1-based, whatever the family offset)."""
    if not (1 <= i <= A.rows and 1 <= j <= A.cols):
        raise IndexError(f"row/column ({i}, {j}) outside a {A.rows}x{A.cols} matrix")
    rows = [r for r in range(A.rows) if r != i - 1]
    cols = [c for c in range(A.cols) if c != j - 1]
    return A.submatrix(rows, cols)


def ones(n: int) -> Matrix:
    return Matrix([[1] * n for _ in range(n)], 0)
