"""Exact arithmetic in a real algebraic number field Q(rho).

Rationals are represented by ``gmpy2.mpq``. A field of degree 1 hands out
plain ``mpq`` values; higher-degree fields hand out :class:`FieldElement`
instances whose ordering is decided by bisecting an isolating interval of
the generator. Floating point never enters a comparison.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence, Union

import gmpy2
from gmpy2 import mpq

MAX_DEGREE = 12

Rational = type(mpq(0))
Number = Union[Rational, "FieldElement"]


class FieldError(ValueError):
    """Invalid field definition or illegal field operation."""


def Q(value) -> Rational:
    """Exact rational from an int, Fraction, mpq or ``"p/q"`` string.

    Floats and decimal strings are rejected so that no inexact literal can
    leak into an endpoint comparison.
    """
    if isinstance(value, Rational):
        return value
    if isinstance(value, bool):
        raise FieldError(f"boolean is not a numeric literal: {value!r}")
    if isinstance(value, int):
        return mpq(value)
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, float):
        raise FieldError(f"float literal {value!r} rejected; write it as an exact string like \"1/3\"")
    if isinstance(value, str):
        text = value.strip()
        if not text or any(ch in text for ch in ".eE"):
            raise FieldError(f"not an exact rational literal: {value!r}")
        try:
            if "/" in text:
                num, den = text.split("/")
                den_i = int(den)
                if den_i == 0:
                    raise FieldError(f"zero denominator in {value!r}")
                return mpq(int(num), den_i)
            return mpq(int(text))
        except ValueError as exc:
            raise FieldError(f"not an exact rational literal: {value!r}") from exc
    raise FieldError(f"unsupported numeric literal type {type(value).__name__}: {value!r}")


# ---------------------------------------------------------------- polynomials
# Coefficient lists are low-to-high.


def _trim(p: list) -> list:
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_divmod(a: Sequence, b: Sequence) -> tuple[list, list]:
    a = list(a)
    b = _trim(list(b))
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    quot = [mpq(0)] * max(len(a) - len(b) + 1, 1)
    lead = b[-1]
    while len(_trim(a)) >= len(b):
        shift = len(a) - len(b)
        coef = a[-1] / lead
        quot[shift] = coef
        for i, c in enumerate(b):
            a[shift + i] -= coef * c
        a.pop()
    return _trim(quot), a


def _poly_mul(a: Sequence, b: Sequence) -> list:
    if not a or not b:
        return []
    out = [mpq(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_sub(a: Sequence, b: Sequence) -> list:
    n = max(len(a), len(b))
    return _trim([(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)])


def _poly_eval(p: Sequence, x) -> Rational:
    acc = mpq(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _interval_eval(p: Sequence, lo: Rational, hi: Rational) -> tuple[Rational, Rational]:
    """Enclosure of ``p`` over ``[lo, hi]`` by interval Horner evaluation."""
    a = b = mpq(0)
    for c in reversed(p):
        prods = (a * lo, a * hi, b * lo, b * hi)
        a = min(prods) + c
        b = max(prods) + c
    return a, b


def _sturm_count(p: Sequence, lo: Rational, hi: Rational) -> int:
    """Number of distinct real roots of squarefree ``p`` in ``(lo, hi]``."""
    p = _trim([mpq(c) for c in p])
    dp = _trim([c * i for i, c in enumerate(p)][1:])
    seq = [p, dp]
    while len(seq[-1]) > 1:
        _, rem = _poly_divmod(seq[-2], seq[-1])
        rem = [-c for c in rem]
        if not rem:
            break
        seq.append(rem)

    def variations(x):
        signs = [gmpy2.sign(_poly_eval(s, x)) for s in seq]
        signs = [s for s in signs if s != 0]
        return sum(1 for u, v in zip(signs, signs[1:]) if u != v)

    return variations(lo) - variations(hi)


def _is_irreducible(coeffs: Sequence[int]) -> bool:
    import sympy

    x = sympy.Symbol("x")
    poly = sympy.Poly(list(reversed(list(coeffs))), x, domain="QQ")
    return bool(poly.is_irreducible)


# ---------------------------------------------------------------- fields


class NumberField:
    """The field Q(rho) where rho is the unique root of ``min_poly`` in ``root_interval``.

    ``min_poly`` lists integer coefficients from the constant term upward.
    """

    def __init__(self, min_poly: Sequence[int] = (0, 1), root_interval=None):
        coeffs = [int(c) for c in min_poly]
        if any(not isinstance(c, int) or isinstance(c, bool) for c in min_poly):
            raise FieldError("min_poly coefficients must be integers")
        coeffs = _trim(coeffs)
        if len(coeffs) < 2:
            raise FieldError("min_poly must have degree at least 1")
        degree = len(coeffs) - 1
        if degree > MAX_DEGREE:
            raise FieldError(f"field degree {degree} exceeds the supported maximum {MAX_DEGREE}")
        self.min_poly_int = tuple(coeffs)
        self.degree = degree
        lead = mpq(coeffs[-1])
        self._monic = [mpq(c) / lead for c in coeffs]
        if degree == 1:
            root = -self._monic[0]
            self._lo = self._hi = root
            self._rational_root = root
            self.root_interval = (root, root)
            return
        self._rational_root = None
        if root_interval is None:
            raise FieldError("a root isolation interval is required for degree > 1")
        lo, hi = (Q(v) for v in root_interval)
        if not lo < hi:
            raise FieldError(f"root interval ({lo}, {hi}) is empty")
        if not _is_irreducible(coeffs):
            raise FieldError(f"min_poly {coeffs} is reducible over Q")
        f_lo, f_hi = _poly_eval(self._monic, lo), _poly_eval(self._monic, hi)
        if f_lo == 0 or f_hi == 0 or gmpy2.sign(f_lo) == gmpy2.sign(f_hi):
            raise FieldError(f"min_poly has no sign change on ({lo}, {hi})")
        count = _sturm_count(self._monic, lo, hi)
        if count != 1:
            raise FieldError(f"min_poly has {count} roots in ({lo}, {hi}); expected exactly one")
        self.root_interval = (lo, hi)
        self._lo, self._hi = lo, hi
        self._sign_lo = gmpy2.sign(f_lo)

    # identity -------------------------------------------------------------
    @property
    def is_rational(self) -> bool:
        return self.degree == 1

    def __eq__(self, other) -> bool:
        return isinstance(other, NumberField) and (
            self.min_poly_int == other.min_poly_int and self.root_interval_key() == other.root_interval_key()
        )

    def __hash__(self) -> int:
        return hash((self.min_poly_int, self.root_interval_key()))

    def root_interval_key(self):
        return self.root_interval if self.degree > 1 else None

    def __repr__(self) -> str:
        if self.is_rational:
            return "NumberField(Q)"
        lo, hi = self.root_interval
        return f"NumberField(min_poly={list(self.min_poly_int)}, root_interval=({lo}, {hi}))"

    # construction ---------------------------------------------------------
    def __call__(self, value) -> Number:
        """Build an element from a rational literal or a coefficient list."""
        if isinstance(value, FieldElement):
            if value.field != self:
                raise FieldError("element belongs to a different field")
            return value
        if isinstance(value, (list, tuple)):
            coeffs = [Q(v) for v in value]
            if self.is_rational:
                return _poly_eval(coeffs, self._rational_root)
            return self._from_poly(coeffs)
        return Q(value)

    def gen(self) -> Number:
        if self.is_rational:
            return self._rational_root
        return FieldElement(self, tuple([mpq(0), mpq(1)] + [mpq(0)] * (self.degree - 2)))

    def _from_poly(self, coeffs: Sequence) -> Number:
        coeffs = list(coeffs)
        if len(coeffs) > self.degree:
            _, coeffs = _poly_divmod(coeffs, self._monic)
        coeffs = list(coeffs) + [mpq(0)] * (self.degree - len(coeffs))
        if all(c == 0 for c in coeffs[1:]):
            return coeffs[0]
        return FieldElement(self, tuple(coeffs))

    # root refinement ------------------------------------------------------
    def _bisect(self) -> None:
        mid = (self._lo + self._hi) / 2
        val = _poly_eval(self._monic, mid)
        if val == 0:  # impossible for an irreducible polynomial of degree > 1
            raise AssertionError("rational root of an irreducible polynomial")
        if gmpy2.sign(val) == self._sign_lo:
            self._lo = mid
        else:
            self._hi = mid

    def enclose(self, coeffs: Sequence) -> tuple[Rational, Rational]:
        return _interval_eval(coeffs, self._lo, self._hi)

    def sign_of(self, coeffs: Sequence) -> int:
        if all(c == 0 for c in coeffs):
            return 0
        while True:
            lo, hi = self.enclose(coeffs)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            self._bisect()

    def approximate(self, coeffs: Sequence, precision: int) -> tuple[float, Rational]:
        target = mpq(1, 2**precision)
        while True:
            lo, hi = self.enclose(coeffs)
            if hi - lo <= target:
                break
            self._bisect()
        mid = (lo + hi) / 2
        approx = float(mid)
        err = max(abs(mpq(approx) - lo), abs(hi - mpq(approx)))
        return approx, err


RATIONALS = NumberField((0, 1))


class FieldElement:
    """Element of a degree >= 2 number field, stored as reduced coefficients."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: NumberField, coeffs: tuple):
        self.field = field
        self.coeffs = coeffs

    # coercion helpers
    def _lift(self, other) -> tuple | None:
        if isinstance(other, FieldElement):
            if other.field is not self.field and other.field != self.field:
                raise FieldError("mixed-field arithmetic is not supported")
            return other.coeffs
        if isinstance(other, (int, Rational, Fraction)) and not isinstance(other, bool):
            return (Q(other),) + (mpq(0),) * (self.field.degree - 1)
        return None

    def _make(self, coeffs) -> Number:
        return self.field._from_poly(coeffs)

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self._make([a + b for a, b in zip(self.coeffs, o)])

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self._make([a - b for a, b in zip(self.coeffs, o)])

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self._make([b - a for a, b in zip(self.coeffs, o)])

    def __neg__(self):
        return self._make([-a for a in self.coeffs])

    def __pos__(self):
        return self

    def __mul__(self, other):
        if isinstance(other, (int, Rational, Fraction)) and not isinstance(other, bool):
            q = Q(other)
            return self._make([a * q for a in self.coeffs])
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self._make(_poly_mul(self.coeffs, o))

    __rmul__ = __mul__

    def inverse(self) -> Number:
        a = _trim(list(self.coeffs))
        if not a:
            raise ZeroDivisionError("division by zero in number field")
        # extended Euclid: track s with s*a == r (mod m)
        r0, r1 = list(self.field._monic), a
        s0, s1 = [], [mpq(1)]
        while len(r1) > 1:
            quo, rem = _poly_divmod(r0, r1)
            r0, r1 = r1, rem
            s0, s1 = s1, _poly_sub(s0, _poly_mul(quo, s1))
        assert len(r1) == 1, "element not invertible; min_poly must be reducible"
        c = r1[0]
        return self._make([x / c for x in s1])

    def __truediv__(self, other):
        if isinstance(other, (int, Rational, Fraction)) and not isinstance(other, bool):
            q = Q(other)
            if q == 0:
                raise ZeroDivisionError("division by zero in number field")
            return self._make([a / q for a in self.coeffs])
        if not isinstance(other, FieldElement):
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self.inverse() * Q(other)

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result: Number = mpq(1)
        base: Number = self
        while k:
            if k & 1:
                result = base * result
            base = base * base
            k >>= 1
        return result

    # comparisons
    def sign(self) -> int:
        return self.field.sign_of(self.coeffs)

    def _cmp(self, other) -> int:
        diff = self - other
        return diff.sign() if isinstance(diff, FieldElement) else gmpy2.sign(diff)

    def __eq__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return tuple(self.coeffs) == tuple(o)

    def __hash__(self):
        return hash(self.coeffs)

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __float__(self):
        return self.field.approximate(self.coeffs, 60)[0]

    def literal(self) -> list[str]:
        return [str(c) for c in self.coeffs]

    def __str__(self) -> str:
        return "[" + ", ".join(self.literal()) + "]"

    def __repr__(self) -> str:
        return f"FieldElement({self})"


# ---------------------------------------------------------------- helpers


def sign(a: Number) -> int:
    if isinstance(a, FieldElement):
        return a.sign()
    return int(gmpy2.sign(a))


def to_float(a: Number, precision: int = 53) -> tuple[float, Rational]:
    """Float approximation of ``a`` with an exact error bound at most ``2**-precision``."""
    if precision < 1:
        raise ValueError("precision must be at least 1")
    if isinstance(a, FieldElement):
        return a.field.approximate(a.coeffs, precision)
    a = Q(a)
    approx = float(a)
    return approx, abs(mpq(approx) - a)


def literal(a: Number):
    """JSON-ready exact literal: ``"p/q"`` for rationals, coefficient strings otherwise."""
    if isinstance(a, FieldElement):
        return a.literal()
    return str(Q(a))


def power(a: Number, k: int) -> Number:
    if isinstance(a, FieldElement):
        return a**k
    return Q(a) ** k


def parse_element(field: NumberField, value) -> Number:
    if isinstance(value, (list, tuple)):
        return field(list(value))
    return field(value)


def product(values: Iterable[Number]) -> Number:
    acc: Number = mpq(1)
    for v in values:
        acc = acc * v
    return acc
