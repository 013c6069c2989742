"""Positivity checks: PD/PSD, total positivity, and infinite-divisibility evidence.

Every check returns a :class:`CheckReport`.  Exact checks only ever pass or
fail.  High-precision checks compare each quantity against a band of width
``tol * scale`` and report ``indeterminate`` when the value lands inside it.
Witness row and column indices are 1-based.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Iterator, Sequence

from .factorizations import bareiss_det, characteristic_polynomial, det_hp
from .matrix import Matrix
from .matrixlab import delete_rc, delta_log, hadamard_power
from .numerics import (
    DEFAULT_PRECISION,
    FAIL,
    INDETERMINATE,
    PASS,
    DomainError,
    HPReal,
    classify,
    format_rational,
)

ALL_MINORS = "all_minors"
SOLID_MINORS = "solid_minors"

#: Default exponent grid for :func:`infdiv_sample`: k/10 for k = 1..20, plus 1/4.
DEFAULT_GRID = tuple(sorted({Fraction(k, 10) for k in range(1, 21)} | {Fraction(1, 4), Fraction(1, 2)}))


def default_tolerance(prec: int) -> HPReal:
    """``2 ** (-prec / 2)``."""
    return HPReal(Fraction(1, 2 ** (prec // 2)), prec)


def tolerance_from_exponent(exponent: int, prec: int) -> HPReal:
    return HPReal(Fraction(1, 2 ** int(exponent)), prec)


def _value_str(x) -> str:
    if isinstance(x, HPReal):
        return str(x)
    if isinstance(x, Fraction):
        return format_rational(x)
    return str(x)


@dataclass
class CheckReport:
    verdict: str
    method: str
    witness: dict | None = None
    precision_bits: int | None = None
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.verdict not in (PASS, FAIL, INDETERMINATE):
            raise ValueError(f"bad verdict {self.verdict!r}")
        if self.verdict == FAIL and self.witness is None:
            raise ValueError("a failing report must carry a witness")

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def __bool__(self):
        return self.passed

    def to_dict(self) -> dict:
        out = {"verdict": self.verdict, "method": self.method}
        if self.witness is not None:
            out["witness"] = {k: _jsonable(v) for k, v in self.witness.items()}
        else:
            out["witness"] = None
        out["precision_bits"] = self.precision_bits
        if self.details:
            out["details"] = {k: _jsonable(v) for k, v in self.details.items()}
        return out


def _jsonable(v):
    if isinstance(v, (HPReal, Fraction)):
        return _value_str(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def _witness(rows, cols, value, **extra) -> dict:
    w = {"rows": [r + 1 for r in rows], "cols": [c + 1 for c in cols], "value": value}
    w.update(extra)
    return w


def _require_exact(A: Matrix, what: str):
    if not A.is_exact:
        raise TypeError(f"{what} needs an exact matrix")


def _require_symmetric(A: Matrix, what: str):
    if not A.is_symmetric():
        raise ValueError(f"{what} needs a symmetric matrix")


# ---------------------------------------------------------------------------
# definiteness


def leading_minors_exact(A: Matrix) -> list:
    """All leading principal minors, from one elimination pass.

    Stops after the first zero minor (later minors are not defined by the
    pivot recursion), so the list may be shorter than ``n``.
    """
    n = A.rows
    W = [list(r) for r in A.data]
    minors = []
    acc = Fraction(1)
    for k in range(n):
        pivot = W[k][k]
        acc *= pivot
        minors.append(acc)
        if pivot == 0:
            break
        for i in range(k + 1, n):
            f = W[i][k] / pivot
            if f:
                for j in range(k + 1, n):
                    W[i][j] -= f * W[k][j]
    return minors


def is_pd_exact(A: Matrix) -> CheckReport:
    """Sylvester's criterion over the rationals."""
    _require_exact(A, "is_pd_exact")
    _require_symmetric(A, "is_pd_exact")
    for k, m in enumerate(leading_minors_exact(A), start=1):
        if m <= 0:
            idx = list(range(k))
            return CheckReport(FAIL, "sylvester_exact", _witness(idx, idx, m, stage=k))
    return CheckReport(PASS, "sylvester_exact")


def is_psd_exact(A: Matrix) -> CheckReport:
    """PSD test from the signs of the characteristic polynomial coefficients.

    With ``det(tI - A) = sum_k (-1)^k e_k t^(n-k)``, a symmetric ``A`` is PSD
    iff every ``e_k >= 0``.  The failing ``k`` is reported as the stage.
    """
    _require_exact(A, "is_psd_exact")
    _require_symmetric(A, "is_psd_exact")
    coeffs = characteristic_polynomial(A)
    elementary = [(-1) ** k * c for k, c in enumerate(coeffs)]
    for k, e in enumerate(elementary[1:], start=1):
        if e < 0:
            return CheckReport(
                FAIL,
                "charpoly_exact",
                {"rows": [], "cols": [], "value": e, "stage": k, "quantity": f"e_{k}"},
            )
    return CheckReport(PASS, "charpoly_exact", details={"e": elementary[1:]})


def is_psd_bruteforce(A: Matrix) -> CheckReport:
    """Every principal minor ``>= 0``; exponential, used as an oracle."""
    _require_exact(A, "is_psd_bruteforce")
    _require_symmetric(A, "is_psd_bruteforce")
    n = A.rows
    for p in range(1, n + 1):
        for alpha in combinations(range(n), p):
            v = bareiss_det(A.submatrix(alpha, alpha))
            if v < 0:
                return CheckReport(FAIL, "principal_minors_exact", _witness(alpha, alpha, v))
    return CheckReport(PASS, "principal_minors_exact")


def _leading_scale(A: Matrix, k: int, prec: int) -> HPReal:
    s = HPReal(1, prec)
    for i in range(k):
        s = s * abs(HPReal(A[i, i], prec))
    return s


def is_pd_hp(A: Matrix, prec: int | None = None, tol=None) -> CheckReport:
    """Tolerance-banded Sylvester test.

    Leading minor ``k`` passes above ``tol * s_k`` and fails below
    ``-tol * s_k``, where ``s_k`` is the product of the first ``k`` diagonal
    magnitudes.  A certified failure anywhere wins over indeterminate stages.
    """
    prec = prec or A.precision or DEFAULT_PRECISION
    tol = default_tolerance(prec) if tol is None else HPReal(tol, prec)
    if not A.is_square:
        raise ValueError("is_pd_hp needs a square matrix")
    symmetry_band = tol * max((abs(HPReal(x, prec)) for r in A.data for x in r), default=HPReal(0, prec))
    if not A.is_symmetric(symmetry_band):
        raise ValueError("is_pd_hp needs a matrix symmetric within the tolerance")
    first_unsure = None
    margins = []
    for k in range(1, A.rows + 1):
        idx = list(range(k))
        minor = det_hp(A.submatrix(idx, idx), prec)
        scale = _leading_scale(A, k, prec)
        verdict = classify(minor, tol * scale)
        margins.append(minor / scale if not scale.is_zero() else minor)
        if verdict == FAIL:
            return CheckReport(
                FAIL, "sylvester_hp", _witness(idx, idx, minor, stage=k), prec,
                {"tolerance": tol, "margins": margins},
            )
        if verdict == INDETERMINATE and first_unsure is None:
            first_unsure = (k, minor)
    details = {"tolerance": tol, "margins": margins}
    if first_unsure is not None:
        k, minor = first_unsure
        idx = list(range(k))
        details["retry_precision"] = 2 * prec
        return CheckReport(
            INDETERMINATE, "sylvester_hp", _witness(idx, idx, minor, stage=k), prec, details
        )
    return CheckReport(PASS, "sylvester_hp", None, prec, details)


# ---------------------------------------------------------------------------
# total positivity


def index_sets(n: int, p: int, contiguous: bool = False) -> Iterator[tuple]:
    """Strictly increasing 0-based index sets of size ``p`` in lexicographic order."""
    if contiguous:
        for start in range(n - p + 1):
            yield tuple(range(start, start + p))
    else:
        yield from combinations(range(n), p)


def dispersion(alpha: Sequence[int]) -> int:
    """``alpha_p - alpha_1 - (p - 1)``; zero iff the indices are consecutive."""
    alpha = list(alpha)
    if not alpha:
        raise ValueError("empty index set")
    if any(a >= b for a, b in zip(alpha, alpha[1:])):
        raise ValueError("index set must be strictly increasing")
    return alpha[-1] - alpha[0] - (len(alpha) - 1)


def iter_minors(A: Matrix, mode: str = ALL_MINORS) -> Iterator[tuple]:
    """Yield ``(rows, cols, det)`` by increasing size, then lexicographic rows, cols."""
    if mode not in (ALL_MINORS, SOLID_MINORS):
        raise ValueError(f"unknown minor mode {mode!r}")
    solid = mode == SOLID_MINORS
    for p in range(1, min(A.rows, A.cols) + 1):
        for alpha in index_sets(A.rows, p, solid):
            for gamma in index_sets(A.cols, p, solid):
                yield alpha, gamma, bareiss_det(A.submatrix(alpha, gamma))


def _minor_check(A: Matrix, mode: str, strict: bool, method: str) -> CheckReport:
    _require_exact(A, method)
    count = 0
    for alpha, gamma, v in iter_minors(A, mode):
        count += 1
        if (v <= 0) if strict else (v < 0):
            return CheckReport(FAIL, method, _witness(alpha, gamma, v), details={"checked": count})
    return CheckReport(PASS, method, details={"checked": count})


def is_tp(A: Matrix, mode: str = ALL_MINORS) -> CheckReport:
    """Total positivity: every minor (or every solid minor) strictly positive.

    Positivity of all solid minors already implies total positivity, so the
    two modes must agree.
    """
    return _minor_check(A, mode, True, f"tp_{mode}")


def is_tn(A: Matrix) -> CheckReport:
    return _minor_check(A, ALL_MINORS, False, "tn_all_minors")


def is_triangular_tp(Lm: Matrix) -> CheckReport:
    """``det L[alpha, {1..p}] > 0`` for every contiguous row set ``alpha``."""
    _require_exact(Lm, "is_triangular_tp")
    if not Lm.is_square or not Lm.is_lower_triangular():
        raise ValueError("is_triangular_tp needs a square lower-triangular matrix")
    n = Lm.rows
    for p in range(1, n + 1):
        sigma = tuple(range(p))
        for alpha in index_sets(n, p, contiguous=True):
            v = bareiss_det(Lm.submatrix(alpha, sigma))
            if v <= 0:
                return CheckReport(FAIL, "triangular_tp_initial_minors", _witness(alpha, sigma, v))
    return CheckReport(PASS, "triangular_tp_initial_minors")


def shift_matrix(p: int) -> Matrix:
    """p x p upper bidiagonal with ``t_ii = i`` and ones on the superdiagonal."""
    return Matrix(
        [[i + 1 if i == j else (1 if j == i + 1 else 0) for j in range(p)] for i in range(p)], 1
    )


def tshift_identity_check(n: int) -> CheckReport:
    """Check ``S[alpha + 1, 1..p] = S[alpha, 1..p] T`` and the ``p!`` determinant ratio.

    ``S`` is the second-kind Stirling matrix; ``alpha`` ranges over contiguous
    row sets with last row below ``n``, for every ``p < n``.
    """
    from .matrixlab import SECOND, stirling_matrix

    if n < 2:
        raise ValueError("n must be at least 2")
    S = stirling_matrix(SECOND, n)
    checked = 0
    for p in range(1, n):
        T = shift_matrix(p)
        sigma = tuple(range(p))
        pf = math.factorial(p)
        for alpha in index_sets(n - 1, p, contiguous=True):
            shifted = tuple(a + 1 for a in alpha)
            lhs = S.submatrix(shifted, sigma)
            base = S.submatrix(alpha, sigma)
            if lhs != base @ T:
                return CheckReport(
                    FAIL, "stirling_shift_identity",
                    _witness(alpha, sigma, "matrix identity fails", p=p),
                )
            d_shift, d_base = bareiss_det(lhs), bareiss_det(base)
            if d_shift != pf * d_base:
                return CheckReport(
                    FAIL, "stirling_shift_identity",
                    _witness(shifted, sigma, d_shift, expected=pf * d_base, p=p),
                )
            checked += 1
    return CheckReport(PASS, "stirling_shift_identity", details={"checked": checked})


def hankel_tp_via_pd(A: Matrix) -> CheckReport:
    """TP for a Hankel matrix from positive definiteness of ``A`` and ``A(n, 1)``."""
    _require_exact(A, "hankel_tp_via_pd")
    if not A.is_square or not A.is_hankel():
        raise ValueError("hankel_tp_via_pd needs a square Hankel matrix")
    first = is_pd_exact(A)
    if not first.passed:
        first.method = "hankel_pd_pair"
        first.details["part"] = "A"
        return first
    n = A.rows
    if n == 1:
        return CheckReport(PASS, "hankel_pd_pair")
    second = is_pd_exact(delete_rc(A, n, 1))
    if not second.passed:
        w = dict(second.witness)
        # rows of A(n,1) are rows of A; its columns are shifted by one
        w["cols"] = [c + 1 for c in w["cols"]]
        return CheckReport(FAIL, "hankel_pd_pair", w, details={"part": "A(n,1)"})
    return CheckReport(PASS, "hankel_pd_pair")


def solid_minors_hp(A: Matrix, prec: int | None = None, tol=None) -> CheckReport:
    """Banded positivity of every solid minor of an HPReal matrix.

    The band for each minor is ``tol`` times the product of the magnitudes of
    its diagonal entries.
    """
    prec = prec or A.precision or DEFAULT_PRECISION
    tol = default_tolerance(prec) if tol is None else HPReal(tol, prec)
    first_unsure = None
    worst = None
    count = 0
    for p in range(1, min(A.rows, A.cols) + 1):
        for alpha in index_sets(A.rows, p, True):
            for gamma in index_sets(A.cols, p, True):
                sub = A.submatrix(alpha, gamma)
                minor = det_hp(sub, prec)
                scale = HPReal(1, prec)
                for k in range(p):
                    scale = scale * abs(HPReal(sub[k, k], prec))
                margin = minor / scale
                worst = margin if worst is None or margin < worst else worst
                count += 1
                verdict = classify(minor, tol * scale)
                if verdict == FAIL:
                    return CheckReport(FAIL, "tp_solid_minors_hp", _witness(alpha, gamma, minor), prec)
                if verdict == INDETERMINATE and first_unsure is None:
                    first_unsure = _witness(alpha, gamma, minor)
    details = {"checked": count, "min_relative_margin": worst, "tolerance": tol}
    if first_unsure is not None:
        details["retry_precision"] = 2 * prec
        return CheckReport(INDETERMINATE, "tp_solid_minors_hp", first_unsure, prec, details)
    return CheckReport(PASS, "tp_solid_minors_hp", None, prec, details)


# ---------------------------------------------------------------------------
# infinite divisibility


def _require_positive_entries(A: Matrix, what: str):
    for row in A.data:
        for x in row:
            if x <= 0:
                raise DomainError(f"{what} needs strictly positive entries")


def infdiv_horn(A: Matrix, prec: int = DEFAULT_PRECISION, tol=None) -> CheckReport:
    """Sufficient criterion for infinite divisibility: ``delta_log(A)`` is PD.

    A pass is evidence that ``A`` is infinitely divisible; a failure or an
    indeterminate result says nothing about the converse.
    """
    if not A.is_square:
        raise ValueError("infdiv_horn needs a square matrix")
    _require_positive_entries(A, "infdiv_horn")
    if A.is_exact:
        _require_symmetric(A, "infdiv_horn")
    if A.rows == 1:
        return CheckReport(PASS, "horn_delta_log_pd", None, prec, {"criterion": "sufficient"})
    D = delta_log(A, prec)
    report = is_pd_hp(D, prec, tol)
    report.method = "horn_delta_log_pd"
    report.details["criterion"] = "sufficient"
    report.details["delta_log"] = [[x for x in r] for r in D.data]
    return report


def infdiv_sample(
    A: Matrix,
    r_grid: Iterable = DEFAULT_GRID,
    prec: int = DEFAULT_PRECISION,
    tol=None,
    retry: bool = True,
) -> CheckReport:
    """Search a grid of exponents ``r`` for a Hadamard power that is not PSD.

    Integer exponents are tested exactly with :func:`is_psd_exact`, other
    exponents with :func:`is_pd_hp`.  Only a certified negative minor counts
    as a counterexample; the first one in grid order is returned.  With
    ``retry`` an indeterminate grid point is recomputed once at ``2 * prec``
    bits (default tolerance for that precision).  A pass means no
    counterexample was found on the grid, which is evidence, not proof.
    """
    if not A.is_square:
        raise ValueError("infdiv_sample needs a square matrix")
    _require_symmetric(A, "infdiv_sample")
    for row in A.data:
        for x in row:
            if x < 0:
                raise DomainError("infdiv_sample needs nonnegative entries")
    per_point = []
    retried = []
    unsure = None
    for r in r_grid:
        r = r if isinstance(r, (HPReal, Fraction, int)) else Fraction(str(r))
        rep = _power_check(A, r, prec, tol)
        if rep.verdict == INDETERMINATE and retry:
            retried.append(r)
            rep = _power_check(A, r, 2 * prec, None)
        per_point.append((r, rep.verdict))
        if rep.verdict == FAIL:
            w = dict(rep.witness)
            w["r"] = r
            return CheckReport(
                FAIL, "hadamard_power_grid", w, rep.precision_bits or prec,
                {"grid": per_point, "retried": retried},
            )
        if rep.verdict == INDETERMINATE and unsure is None:
            unsure = dict(rep.witness or {})
            unsure["r"] = r
    details = {"grid": per_point, "retried": retried, "criterion": "evidence"}
    if unsure is not None:
        details["retry_precision"] = 4 * prec if retry else 2 * prec
        return CheckReport(INDETERMINATE, "hadamard_power_grid", unsure, prec, details)
    return CheckReport(PASS, "hadamard_power_grid", None, prec, details)


def _power_check(A: Matrix, r, prec: int, tol) -> CheckReport:
    M = hadamard_power(A, r, prec)
    return is_psd_exact(M) if M.is_exact else is_pd_hp(M, prec, tol)
