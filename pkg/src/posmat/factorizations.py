"""Exact determinants, inverses, LDL^T congruences and bidiagonal factorizations.

Bidiagonal factors use 1-based indices: ``L_i(s) = I + s E[i, i-1]`` and
``U_j(t) = I + t E[j-1, j]``.  An :class:`SEBFactorization` stores its lower
and upper factors in the grouped order

    (L_n L_{n-1} ... L_2)(L_n ... L_3) ... (L_n)  D  (U_n)(U_{n-1} U_n) ... (U_2 ... U_n)

and :func:`seb_compose` multiplies them strictly left to right.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .combinatorics import binomial, factorial
from .matrix import Matrix, diag
from .matrixlab import bell_triangle_matrix
from .numerics import DEFAULT_PRECISION, HPReal, format_rational, parse_rational

LOWER = "lower"
UPPER = "upper"


class FactorizationError(ArithmeticError):
    """An elimination hit a zero pivot it could not get past.

    ``stage`` is the 1-based elimination step (column or leading minor
    order) where it happened.
    """

    def __init__(self, message: str, stage: int | None = None):
        super().__init__(message)
        self.stage = stage


class SingularMatrixError(FactorizationError):
    pass


# ---------------------------------------------------------------------------
# determinants and inverses


def bareiss_det(A: Matrix) -> Fraction:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    if not A.is_square:
        raise ValueError("determinant needs a square matrix")
    n = A.rows
    if n == 0:
        return Fraction(1)
    M = [list(r) for r in A.data]
    sign = 1
    prev = Fraction(1)
    for k in range(n - 1):
        if M[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if M[r][k] != 0), None)
            if swap is None:
                return Fraction(0)
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        pivot = M[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * pivot - M[i][k] * M[k][j]) / prev
            M[i][k] = Fraction(0)
        prev = pivot
    return Fraction(sign) * M[n - 1][n - 1]


def det_hp(A: Matrix, prec: int | None = None) -> HPReal:
    """Determinant in HPReal arithmetic by partially pivoted elimination."""
    if not A.is_square:
        raise ValueError("determinant needs a square matrix")
    prec = prec or A.precision or DEFAULT_PRECISION
    n = A.rows
    M = [[HPReal(x, prec) for x in r] for r in A.data]
    det = HPReal(1, prec)
    for k in range(n):
        p = max(range(k, n), key=lambda r: abs(M[r][k]))
        if M[p][k].is_zero():
            return HPReal(0, prec)
        if p != k:
            M[k], M[p] = M[p], M[k]
            det = -det
        pivot = M[k][k]
        det = det * pivot
        for i in range(k + 1, n):
            f = M[i][k] / pivot
            for j in range(k + 1, n):
                M[i][j] = M[i][j] - f * M[k][j]
    return det


def exact_inverse(A: Matrix) -> Matrix:
    """Gauss-Jordan inverse over the rationals."""
    if not A.is_square:
        raise ValueError("inverse needs a square matrix")
    n = A.rows
    M = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(A.data)]
    for k in range(n):
        p = next((r for r in range(k, n) if M[r][k] != 0), None)
        if p is None:
            raise SingularMatrixError(f"matrix is singular: no pivot in column {k + 1}", k + 1)
        M[k], M[p] = M[p], M[k]
        pivot = M[k][k]
        M[k] = [x / pivot for x in M[k]]
        for i in range(n):
            if i != k and M[i][k] != 0:
                f = M[i][k]
                M[i] = [a - f * b for a, b in zip(M[i], M[k])]
    return Matrix([r[n:] for r in M], A.offset, cols=n)


def characteristic_polynomial(A: Matrix) -> list:
    """Coefficients ``[c_0, ..., c_n]`` of ``det(tI - A) = sum_k c_k t^(n-k)``.

    Faddeev-LeVerrier over the rationals: ``M_k = A M_{k-1} + c_{k-1} I`` and
    ``c_k = -tr(A M_k) / k``.
    """
    if not A.is_square:
        raise ValueError("characteristic polynomial needs a square matrix")
    n = A.rows
    a = [list(r) for r in A.data]
    coeffs = [Fraction(1)]
    M = [[Fraction(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        c_prev = coeffs[-1]
        for i in range(n):
            M[i][i] += c_prev
        AM = [[sum(a[i][t] * M[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
        coeffs.append(-sum(AM[i][i] for i in range(n)) / k)
        M = AM
    return coeffs


def beta_inverse_closed(n: int) -> Matrix:
    """Closed form ``(-1)^(i+j) sum_k C(k,i) C(k,j) / k`` of the beta matrix inverse."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return Matrix(
        [
            [
                (-1) ** (i + j) * sum(Fraction(binomial(k, i) * binomial(k, j), k) for k in range(1, n + 1))
                for j in range(1, n + 1)
            ]
            for i in range(1, n + 1)
        ],
        1,
    )


# ---------------------------------------------------------------------------
# symmetric congruence Z diag(d) Z^T


@dataclass(frozen=True)
class SymCongruence:
    """``A = Z diag(d) Z^T`` with ``Z`` unit lower triangular."""

    Z: Matrix
    d: tuple

    def compose(self) -> Matrix:
        return self.Z @ diag(list(self.d), self.Z.offset) @ self.Z.T

    def cholesky_factor(self, prec: int = DEFAULT_PRECISION) -> Matrix:
        """``L = Z diag(sqrt(d))`` in HPReal."""
        roots = [HPReal(x, prec).sqrt() for x in self.d]
        return Matrix(
            [[HPReal(z, prec) * roots[j] for j, z in enumerate(r)] for r in self.Z.data],
            self.Z.offset,
        )

    @property
    def determinant(self) -> Fraction:
        out = Fraction(1)
        for x in self.d:
            out *= x
        return out

    def to_dict(self) -> dict:
        return {
            "Z": [[format_rational(x) for x in r] for r in self.Z.data],
            "d": [format_rational(x) for x in self.d],
            "offset": self.Z.offset,
        }


def sym_congruence_ldl(A: Matrix, pivot_free: bool = True) -> SymCongruence:
    """Radical-free Cholesky: ``A = Z diag(d) Z^T`` without pivoting.

    ``d[k]`` is the ratio of consecutive leading principal minors, so every
    ``d[k] > 0`` exactly when ``A`` is positive definite.  Raises
    :class:`FactorizationError` naming the stage when a leading minor is zero.
    Only the pivot-free variant exists; ``pivot_free=False`` is rejected.
    """
    if not pivot_free:
        raise NotImplementedError("pivoted LDL^T is not supported")
    if not A.is_exact or not A.is_symmetric():
        raise ValueError("sym_congruence_ldl needs an exact symmetric matrix")
    n = A.rows
    W = [list(r) for r in A.data]
    Z = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    d = []
    for k in range(n):
        pivot = W[k][k]
        if pivot == 0:
            raise FactorizationError(f"leading principal minor of order {k + 1} vanishes", k + 1)
        d.append(pivot)
        for i in range(k + 1, n):
            Z[i][k] = W[i][k] / pivot
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                W[i][j] -= Z[i][k] * W[k][j]
    return SymCongruence(Matrix(Z, A.offset, cols=n), tuple(d))


def beta_ldl_closed(n: int) -> SymCongruence:
    """``Z = [C(i, j)]``, ``d = (1, ..., n)`` for the n x n beta matrix."""
    if n < 1:
        raise ValueError("n must be at least 1")
    Z = Matrix([[binomial(i, j) for j in range(1, n + 1)] for i in range(1, n + 1)], 1)
    return SymCongruence(Z, tuple(Fraction(j) for j in range(1, n + 1)))


def bell_ldl_closed(n: int) -> SymCongruence:
    """``Z`` is the Bell triangle, ``d = (0!, 1!, ..., (n-1)!)``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return SymCongruence(bell_triangle_matrix(n), tuple(Fraction(factorial(i)) for i in range(n)))


# ---------------------------------------------------------------------------
# bidiagonal factors


@dataclass(frozen=True)
class BidiagonalFactor:
    side: str
    index: int
    param: object

    def __post_init__(self):
        if self.side not in (LOWER, UPPER):
            raise ValueError(f"side must be 'lower' or 'upper', got {self.side!r}")
        if self.index < 2:
            raise ValueError("bidiagonal factor index must be >= 2")

    def matrix(self, n: int) -> Matrix:
        if self.index > n:
            raise ValueError(f"factor index {self.index} exceeds dimension {n}")
        rows = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        i = self.index - 1
        if self.side == LOWER:
            rows[i][i - 1] = self.param
        else:
            rows[i - 1][i] = self.param
        return Matrix(rows, 1, cols=n)

    def apply_left(self, M: list) -> None:
        """In place: ``M <- F @ M`` on a list-of-rows matrix."""
        i = self.index - 1
        if self.param == 0:
            return
        if self.side == LOWER:
            M[i] = [a + self.param * b for a, b in zip(M[i], M[i - 1])]
        else:
            M[i - 1] = [a + self.param * b for a, b in zip(M[i - 1], M[i])]

    def inverse(self) -> "BidiagonalFactor":
        return BidiagonalFactor(self.side, self.index, -self.param)

    def to_dict(self) -> dict:
        return {"i": self.index, "param": _format_param(self.param)}


def L(i: int, s) -> BidiagonalFactor:
    return BidiagonalFactor(LOWER, i, Fraction(s) if not isinstance(s, HPReal) else s)


def U(j: int, t) -> BidiagonalFactor:
    return BidiagonalFactor(UPPER, j, Fraction(t) if not isinstance(t, HPReal) else t)


def _format_param(x) -> str:
    return str(x) if isinstance(x, HPReal) else format_rational(x)


@dataclass(frozen=True)
class SEBFactorization:
    """Lower factors, a diagonal, and upper factors, in printed product order."""

    lower: tuple
    diagonal: tuple
    upper: tuple = field(default=())

    @property
    def n(self) -> int:
        return len(self.diagonal)

    def trimmed(self) -> "SEBFactorization":
        """Drop factors whose parameter is zero (they are identity matrices)."""
        return SEBFactorization(
            tuple(f for f in self.lower if f.param != 0),
            self.diagonal,
            tuple(f for f in self.upper if f.param != 0),
        )

    def lower_product(self) -> Matrix:
        return _product(self.lower, self.n)

    def upper_product(self) -> Matrix:
        return _product(self.upper, self.n)

    def params(self):
        return [f.param for f in self.lower + self.upper]

    def to_dict(self) -> dict:
        return {
            "lower": [f.to_dict() for f in self.lower],
            "diag": [_format_param(x) for x in self.diagonal],
            "upper": [f.to_dict() for f in self.upper],
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "SEBFactorization":
        return cls(
            tuple(L(int(f["i"]), parse_rational(f["param"])) for f in payload.get("lower", [])),
            tuple(parse_rational(x) for x in payload["diag"]),
            tuple(U(int(f["i"]), parse_rational(f["param"])) for f in payload.get("upper", [])),
        )


def _product(factors: Sequence[BidiagonalFactor], n: int) -> Matrix:
    M = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    # right to left so each factor acts as a row operation
    for f in reversed(factors):
        f.apply_left(M)
    return Matrix(M, 1, cols=n)


def apply_factors(factors: Sequence[BidiagonalFactor], A: Matrix) -> Matrix:
    """``F_1 F_2 ... F_m A`` for the factors in the given order."""
    M = [list(r) for r in A.data]
    for f in reversed(factors):
        f.apply_left(M)
    return Matrix(M, A.offset, cols=A.cols)


def seb_compose(F: SEBFactorization) -> Matrix:
    n = F.n
    for f in F.lower + F.upper:
        if f.index > n:
            raise ValueError(f"factor index {f.index} exceeds dimension {n}")
    return F.lower_product() @ diag(list(F.diagonal), 1) @ F.upper_product()


def _neville_lower(A: list, n: int, stage_label: str):
    """Eliminate below the diagonal column by column, bottom row first.

    Returns the multiplier groups (one per column, rows n..j+1) and the
    reduced upper-triangular rows.  ``A`` is modified in place.
    """
    groups = []
    for j in range(n - 1):
        # multipliers use the rows as they stand before this column's sweep
        group = []
        for i in range(n - 1, j, -1):
            below, above = A[i][j], A[i - 1][j]
            if below == 0:
                m = Fraction(0)
            elif above == 0:
                raise FactorizationError(
                    f"not factorizable by Neville elimination: zero pivot above a nonzero "
                    f"entry at row {i + 1}, column {j + 1} ({stage_label} side)",
                    j + 1,
                )
            else:
                m = below / above
            if m != 0:
                A[i] = [a - m * b for a, b in zip(A[i], A[i - 1])]
            group.append(L(i + 1, m))
        groups.append(group)
    return groups


def neville_seb(A: Matrix) -> SEBFactorization:
    """Neville (successive elementary bidiagonal) factorization of an exact matrix.

    Zero multipliers are kept as explicit factors so each side always holds
    ``C(n, 2)`` factors.  Negative parameters are returned as computed, not
    hidden; a zero pivot over a nonzero entry raises :class:`FactorizationError`.
    """
    if not A.is_square or not A.is_exact:
        raise ValueError("neville_seb needs an exact square matrix")
    n = A.rows
    M = [list(r) for r in A.data]
    lower_groups = _neville_lower(M, n, LOWER)
    d = [M[k][k] for k in range(n)]
    if any(x == 0 for x in d):
        k = next(k for k, x in enumerate(d) if x == 0)
        raise SingularMatrixError(f"matrix is singular: zero pivot at position {k + 1}", k + 1)
    # unit upper part R = diag(d)^-1 M; eliminate its transpose the same way
    R_T = [[M[i][j] / d[i] for i in range(n)] for j in range(n)]
    upper_groups = _neville_lower(R_T, n, UPPER)
    lower = tuple(f for g in lower_groups for f in g)
    upper = tuple(
        BidiagonalFactor(UPPER, f.index, f.param)
        for g in reversed(upper_groups)
        for f in reversed(g)
    )
    return SEBFactorization(lower, tuple(d), upper)


# ---------------------------------------------------------------------------
# closed forms


def _calL(p: int) -> BidiagonalFactor:
    return L(p, Fraction(p, p - 1))


def beta_seb_closed(n: int) -> SEBFactorization:
    """Closed-form bidiagonal factorization of the n x n beta matrix.

    Every lower factor is ``L_p(p / (p - 1))``; group ``g`` runs over
    ``p = n, n-1, ..., g + 1``.  ``D = diag(1, ..., n)`` and the upper side
    mirrors the lower side.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    lower = tuple(_calL(p) for g in range(1, n) for p in range(n, g, -1))
    upper = tuple(
        BidiagonalFactor(UPPER, f.index, f.param) for f in reversed(lower)
    )
    return SEBFactorization(lower, tuple(Fraction(i) for i in range(1, n + 1)), upper)


def y_k(n: int, k: int) -> Matrix:
    """The lower-triangular matrix ``Y_k`` built from the first ``k`` factor groups."""
    if not 1 <= k <= n - 1:
        raise ValueError(f"k must satisfy 1 <= k <= n - 1, got k={k}, n={n}")
    s = n - k
    rows = []
    for i in range(1, n + 1):
        row = []
        for j in range(1, n + 1):
            if i == j:
                row.append(Fraction(1))
            elif s <= j < i:
                row.append(Fraction(i, j) * binomial(i - s, j - s))
            else:
                row.append(Fraction(0))
        rows.append(row)
    return Matrix(rows, 1, cols=n)


def calL_group(n: int, k: int) -> tuple:
    """``(L_n L_{n-1} ... L_{n-k})`` with ``L_p = L_p(p / (p - 1))``."""
    return tuple(_calL(p) for p in range(n, n - k - 1, -1))


def stirling_first_seb_closed(n: int) -> SEBFactorization:
    """Bidiagonal factorization of the unsigned first-kind Stirling matrix.

    Group ``g`` is ``L_n(n - g) L_{n-1}(n - 1 - g) ... L_{g+1}(1)``; the
    diagonal is all ones and there are no upper factors.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    lower = tuple(L(p, p - g) for g in range(1, n) for p in range(n, g, -1))
    return SEBFactorization(lower, tuple(Fraction(1) for _ in range(n)), ())


def inverse_lower_sequence(F: SEBFactorization) -> tuple:
    """Reversed lower factors with negated parameters (the inverse product)."""
    return tuple(f.inverse() for f in reversed(F.lower))
