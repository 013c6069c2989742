"""Scalar kinds: exact rationals and fixed-precision binary reals.

Exact values are plain :class:`fractions.Fraction` objects (always stored in
lowest terms with a positive denominator).  High-precision reals are
:class:`HPReal`, a thin immutable wrapper around an mpmath ``mpf`` tuple that
carries its own precision, so no global context is ever touched and every
operation is safe to call from several threads at once.
"""
from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import lru_cache
from numbers import Integral, Rational

from mpmath import libmp

DEFAULT_PRECISION = 128
MIN_PRECISION = 64
#: Relative error of :func:`gamma_hp` is at most ``2 ** (-P + GUARD_BITS)``.
GUARD_BITS = 8

_RND = libmp.round_nearest
_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")

PASS = "pass"
FAIL = "fail"
INDETERMINATE = "indeterminate"


class DomainError(ValueError):
    """Raised when a function is evaluated outside its domain."""


# ---------------------------------------------------------------------------
# rationals


def parse_rational(text: str) -> Fraction:
    """Parse ``"num/den"`` or a bare integer into a canonical Fraction.

    >>> parse_rational("4/6")
    Fraction(2, 3)
    """
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    m = _RATIONAL_RE.match(str(text))
    if m is None:
        raise ValueError(f"malformed rational {text!r}")
    num, den = int(m.group(1)), int(m.group(2) or 1)
    if den == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(num, den)


def format_rational(value) -> str:
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


# ---------------------------------------------------------------------------
# high-precision reals


def _check_prec(prec: int) -> int:
    prec = int(prec)
    if prec < MIN_PRECISION:
        raise ValueError(f"precision must be at least {MIN_PRECISION} bits, got {prec}")
    return prec


def _to_mpf(value, prec: int):
    if isinstance(value, HPReal):
        return libmp.mpf_pos(value._mpf, prec, _RND)
    if isinstance(value, bool):
        value = int(value)
    if isinstance(value, Integral):
        return libmp.from_int(int(value), prec, _RND)
    if isinstance(value, Rational):
        return libmp.from_rational(int(value.numerator), int(value.denominator), prec, _RND)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise DomainError(f"non-finite value {value}")
        return libmp.from_float(value, prec, _RND)
    if isinstance(value, str):
        text = value.strip()
        if "/" in text:
            q = parse_rational(text)
            return libmp.from_rational(q.numerator, q.denominator, prec, _RND)
        return libmp.from_str(text, prec, _RND)
    if isinstance(value, tuple):
        return libmp.mpf_pos(value, prec, _RND)
    raise TypeError(f"cannot convert {type(value).__name__} to HPReal")


class HPReal:
    """A binary floating value rounded to ``prec`` bits.

    Binary operations between two HPReals run at the smaller of the two
    precisions; ints and Fractions are converted at the HPReal's precision.
    """

    __slots__ = ("_mpf", "prec")

    def __init__(self, value, prec: int = DEFAULT_PRECISION):
        prec = _check_prec(prec)
        object.__setattr__(self, "prec", prec)
        object.__setattr__(self, "_mpf", _to_mpf(value, prec))

    def __setattr__(self, name, value):
        raise AttributeError("HPReal is immutable")

    @classmethod
    def _raw(cls, mpf, prec: int) -> "HPReal":
        obj = object.__new__(cls)
        object.__setattr__(obj, "prec", prec)
        object.__setattr__(obj, "_mpf", mpf)
        return obj

    # -- coercion ---------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, HPReal):
            prec = min(self.prec, other.prec)
            return other._mpf, prec
        if isinstance(other, (Integral, Rational, float)):
            return _to_mpf(other, self.prec), self.prec
        return None, None

    def with_precision(self, prec: int) -> "HPReal":
        """Round (or widen) to a new precision."""
        return HPReal(self, prec)

    # -- arithmetic -------------------------------------------------------

    def _binop(self, other, fn, reflected=False):
        o, prec = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = (o, self._mpf) if reflected else (self._mpf, o)
        return HPReal._raw(fn(a, b, prec, _RND), prec)

    def __add__(self, other):
        return self._binop(other, libmp.mpf_add)

    def __radd__(self, other):
        return self._binop(other, libmp.mpf_add, True)

    def __sub__(self, other):
        return self._binop(other, libmp.mpf_sub)

    def __rsub__(self, other):
        return self._binop(other, libmp.mpf_sub, True)

    def __mul__(self, other):
        return self._binop(other, libmp.mpf_mul)

    def __rmul__(self, other):
        return self._binop(other, libmp.mpf_mul, True)

    def __truediv__(self, other):
        o, _ = self._coerce(other)
        if o is not None and o == libmp.fzero:
            raise ZeroDivisionError("HPReal division by zero")
        return self._binop(other, libmp.mpf_div)

    def __rtruediv__(self, other):
        if self._mpf == libmp.fzero:
            raise ZeroDivisionError("HPReal division by zero")
        return self._binop(other, libmp.mpf_div, True)

    def __neg__(self):
        return HPReal._raw(libmp.mpf_neg(self._mpf), self.prec)

    def __pos__(self):
        return self

    def __abs__(self):
        return HPReal._raw(libmp.mpf_abs(self._mpf), self.prec)

    def __pow__(self, exponent):
        if isinstance(exponent, bool):
            exponent = int(exponent)
        if isinstance(exponent, Integral) or (
            isinstance(exponent, Rational) and exponent.denominator == 1
        ):
            n = int(exponent)
            if n < 0 and self.is_zero():
                raise ZeroDivisionError("zero to a negative power")
            return HPReal._raw(libmp.mpf_pow_int(self._mpf, n, self.prec, _RND), self.prec)
        if self.sign() < 0:
            raise DomainError("real power of a negative number")
        if self.is_zero():
            if exponent > 0:
                return HPReal(0, self.prec)
            raise DomainError("zero to a non-positive real power")
        wp = self.prec + 20
        r = exponent._mpf if isinstance(exponent, HPReal) else _to_mpf(exponent, wp)
        val = libmp.mpf_exp(libmp.mpf_mul(r, libmp.mpf_log(self._mpf, wp, _RND), wp, _RND), wp, _RND)
        return HPReal(val, self.prec)

    # -- elementary functions ----------------------------------------------

    def log(self) -> "HPReal":
        if self.sign() <= 0:
            raise DomainError("log of a non-positive number")
        return HPReal._raw(libmp.mpf_log(self._mpf, self.prec, _RND), self.prec)

    def exp(self) -> "HPReal":
        return HPReal._raw(libmp.mpf_exp(self._mpf, self.prec, _RND), self.prec)

    def sqrt(self) -> "HPReal":
        if self.sign() < 0:
            raise DomainError("sqrt of a negative number")
        return HPReal._raw(libmp.mpf_sqrt(self._mpf, self.prec, _RND), self.prec)

    # -- comparisons -------------------------------------------------------

    def sign(self) -> int:
        return libmp.mpf_sign(self._mpf)

    def is_zero(self) -> bool:
        return self._mpf == libmp.fzero

    def _cmp(self, other):
        if isinstance(other, HPReal):
            return libmp.mpf_cmp(self._mpf, other._mpf)
        if isinstance(other, (Integral, Rational)):
            # exact comparison: scale by the denominator instead of rounding
            q = Fraction(other)
            lhs = libmp.mpf_mul_int(self._mpf, q.denominator, self.prec + 64, _RND)
            return libmp.mpf_cmp(lhs, libmp.from_int(q.numerator))
        if isinstance(other, float):
            return libmp.mpf_cmp(self._mpf, libmp.from_float(other))
        return NotImplemented

    def __eq__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c == 0

    def __lt__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c < 0

    def __le__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c >= 0

    def __hash__(self):
        return hash((self._mpf, self.prec))

    # -- conversion --------------------------------------------------------

    def __float__(self):
        return libmp.to_float(self._mpf)

    def to_fraction(self) -> Fraction:
        """The exact rational value of the stored binary number."""
        p, q = libmp.to_rational(self._mpf)
        return Fraction(p, q)

    def digits(self) -> int:
        # enough decimal digits to round-trip the binary value
        return math.ceil(self.prec * math.log10(2)) + 1

    def __str__(self):
        return libmp.to_str(self._mpf, self.digits(), min_fixed=-4, max_fixed=self.digits())

    def __repr__(self):
        return f"HPReal('{libmp.to_str(self._mpf, 20)}', prec={self.prec})"


def to_hp(value, prec: int = DEFAULT_PRECISION) -> HPReal:
    return HPReal(value, prec)


def hp_pi(prec: int = DEFAULT_PRECISION) -> HPReal:
    return HPReal._raw(libmp.mpf_pi(_check_prec(prec), _RND), prec)


def relative_error(approx, exact) -> HPReal:
    """|approx - exact| / |exact| evaluated at the approximation's precision."""
    approx = approx if isinstance(approx, HPReal) else HPReal(approx)
    prec = approx.prec + 64
    a = HPReal(approx, prec)
    e = HPReal(exact, prec)
    if e.is_zero():
        return abs(a)
    return abs(a - e) / abs(e)


def classify(value: HPReal, threshold) -> str:
    """Three-way sign decision: pass above ``threshold``, fail below ``-threshold``."""
    if value > threshold:
        return PASS
    if value < -threshold:
        return FAIL
    return INDETERMINATE


# ---------------------------------------------------------------------------
# gamma via Spouge's approximation


def _spouge_a(prec: int) -> int:
    # truncation bound a^(-1/2) (2 pi)^-(a + 1/2) below 2^-(prec + 4)
    return max(3, math.ceil((prec + 4) * math.log(2) / math.log(2 * math.pi)))


@lru_cache(maxsize=32)
def _spouge_coefficients(prec: int):
    a = _spouge_a(prec)
    # the alternating sum cancels the bits held by its largest coefficient
    biggest = max(
        (k - 0.5) * math.log(a - k) + (a - k) - math.lgamma(k) for k in range(1, a)
    )
    wp = prec + max(0, math.ceil(biggest / math.log(2))) + 32
    coeffs = [libmp.mpf_sqrt(libmp.mpf_mul_int(libmp.mpf_pi(wp, _RND), 2, wp, _RND), wp, _RND)]
    fact = 1
    for k in range(1, a):
        if k > 1:
            fact *= k - 1
        base = libmp.from_int(a - k)
        mag = libmp.mpf_mul(
            libmp.mpf_pow_int(base, k - 1, wp, _RND), libmp.mpf_sqrt(base, wp, _RND), wp, _RND
        )
        mag = libmp.mpf_mul(mag, libmp.mpf_exp(libmp.from_int(a - k), wp, _RND), wp, _RND)
        c = libmp.mpf_div(mag, libmp.from_int(fact), wp, _RND)
        coeffs.append(c if k % 2 == 1 else libmp.mpf_neg(c))
    return a, wp, tuple(coeffs)


def _as_positive_mpf(x, wp: int, name: str = "x"):
    m = _to_mpf(x, wp)
    if libmp.mpf_sign(m) <= 0:
        raise DomainError(f"{name} must be positive, got {libmp.to_str(m, 10)}")
    return m


def _gamma_mpf(x, prec: int):
    a, wp, coeffs = _spouge_coefficients(prec)
    m = _as_positive_mpf(x, wp)
    # shift small arguments up to x >= 1 and divide the product back out
    shift = libmp.fone
    one = libmp.fone
    while libmp.mpf_lt(m, one):
        shift = libmp.mpf_mul(shift, m, wp, _RND)
        m = libmp.mpf_add(m, one, wp, _RND)
    z = libmp.mpf_sub(m, one, wp, _RND)
    total = coeffs[0]
    for k in range(1, a):
        denom = libmp.mpf_add(z, libmp.from_int(k), wp, _RND)
        total = libmp.mpf_add(total, libmp.mpf_div(coeffs[k], denom, wp, _RND), wp, _RND)
    za = libmp.mpf_add(z, libmp.from_int(a), wp, _RND)
    half = libmp.from_rational(1, 2, wp, _RND)
    log_pow = libmp.mpf_mul(libmp.mpf_add(z, half, wp, _RND), libmp.mpf_log(za, wp, _RND), wp, _RND)
    lead = libmp.mpf_exp(libmp.mpf_sub(log_pow, za, wp, _RND), wp, _RND)
    val = libmp.mpf_mul(lead, total, wp, _RND)
    return libmp.mpf_div(val, shift, wp, _RND)


def gamma_hp(x, prec: int = DEFAULT_PRECISION) -> HPReal:
    """Gamma function at a positive real argument.

    The relative error is at most ``2 ** (-prec + GUARD_BITS)``.  Raises
    :class:`DomainError` for ``x <= 0``.
    """
    prec = _check_prec(prec)
    return HPReal(_gamma_mpf(x, prec), prec)


def beta_recip_hp(x, y, prec: int = DEFAULT_PRECISION) -> HPReal:
    """``Gamma(x + y) / (Gamma(x) Gamma(y))``, i.e. ``1 / B(x, y)``."""
    prec = _check_prec(prec)
    wp = prec + 16
    mx = _as_positive_mpf(x, wp, "x")
    my = _as_positive_mpf(y, wp, "y")
    num = _gamma_mpf(libmp.mpf_add(mx, my, wp, _RND), wp)
    den = libmp.mpf_mul(_gamma_mpf(mx, wp), _gamma_mpf(my, wp), wp, _RND)
    return HPReal(libmp.mpf_div(num, den, wp, _RND), prec)
