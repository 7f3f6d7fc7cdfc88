"""Exact coefficients: Laurent polynomials and rational functions in r, s,
q-integers, and specialization to a cyclotomic field.

Generic coefficients live in the field Q(r, s).  A :class:`RationalFunction`
is stored as a reduced pair of polynomials over Q (negative powers of r and
s are absorbed into the denominator) whose denominator has leading
coefficient +1 under degree-lexicographic order with r > s.  Polynomial gcds
and factorizations are delegated to FLINT.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Union

import flint

_CTX = flint.fmpq_mpoly_ctx.get(("r", "s"), "deglex")
_R, _S = _CTX.gens()
_ONE_P = _CTX.from_dict({(0, 0): 1})
_ZERO_P = _CTX.from_dict({})


class CoefficientError(ArithmeticError):
    """Raised for invalid coefficient operations (zero denominators, bad maps)."""


class SpecializationError(CoefficientError):
    """A denominator vanishes at a root of unity; ``factor`` names the culprit."""

    def __init__(self, message: str, factor: str = ""):
        super().__init__(message)
        self.factor = factor


def _frac(q) -> Fraction:
    q = flint.fmpq(q)
    return Fraction(int(q.p), int(q.q))


# ---------------------------------------------------------------- Laurent


class LaurentPolynomial:
    """Sparse map (a, b) -> rational coefficient, meaning sum c * r^a * s^b."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[tuple[int, int], Fraction | int] | None = None):
        clean: dict[tuple[int, int], Fraction] = {}
        for (a, b), c in (terms or {}).items():
            c = Fraction(c)
            if c:
                key = (int(a), int(b))
                clean[key] = clean.get(key, Fraction(0)) + c
                if not clean[key]:
                    del clean[key]
        self.terms = clean

    @classmethod
    def monomial(cls, a: int, b: int, c: Fraction | int = 1) -> "LaurentPolynomial":
        return cls({(a, b): c})

    def __add__(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, Fraction(0)) + c
        return LaurentPolynomial(out)

    def __neg__(self) -> "LaurentPolynomial":
        return LaurentPolynomial({k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        return self + (-other)

    def __mul__(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        out: dict[tuple[int, int], Fraction] = {}
        for (a1, b1), c1 in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                k = (a1 + a2, b1 + b2)
                out[k] = out.get(k, Fraction(0)) + c1 * c2
        return LaurentPolynomial(out)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, LaurentPolynomial) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def to_rational(self) -> "RationalFunction":
        if not self.terms:
            return RationalFunction.zero()
        amin = min(a for a, _ in self.terms)
        bmin = min(b for _, b in self.terms)
        num = _CTX.from_dict({(a - min(amin, 0), b - min(bmin, 0)): flint.fmpq(c.numerator, c.denominator)
                              for (a, b), c in self.terms.items()})
        den = _CTX.from_dict({(-min(amin, 0), -min(bmin, 0)): 1})
        return RationalFunction._make(num, den)

    def __str__(self) -> str:
        return _format_laurent(self.terms)

    __repr__ = __str__


def _mono_text(a: int, b: int) -> str:
    parts = []
    for name, e in (("r", a), ("s", b)):
        if e == 1:
            parts.append(name)
        elif e:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def _format_laurent(terms: Mapping[tuple[int, int], Fraction]) -> str:
    if not terms:
        return "0"
    keys = sorted(terms, key=lambda k: (-(k[0] + k[1]), -k[0]))
    out = []
    for i, k in enumerate(keys):
        c = terms[k]
        mono = _mono_text(*k)
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if mono:
            body = mono if mag == 1 else f"{mag}*{mono}"
        else:
            body = str(mag)
        if i == 0:
            out.append(("-" if sign == "-" else "") + body)
        else:
            out.append(f" {sign} {body}")
    return "".join(out)


# ---------------------------------------------------------- rational functions

Number = Union[int, Fraction, "RationalFunction"]


class RationalFunction:
    """Element of Q(r, s) in canonical reduced form."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num, den=None):
        num = _coerce_poly(num)
        den = _ONE_P if den is None else _coerce_poly(den)
        if den.is_zero():
            raise CoefficientError("zero denominator")
        rf = RationalFunction._make(num, den)
        self.num, self.den, self._hash = rf.num, rf.den, None

    @classmethod
    def _raw(cls, num, den) -> "RationalFunction":
        obj = object.__new__(cls)
        obj.num, obj.den, obj._hash = num, den, None
        return obj

    @classmethod
    def _make(cls, num, den) -> "RationalFunction":
        if den.is_zero():
            raise CoefficientError("zero denominator")
        if num.is_zero():
            return cls._raw(_ZERO_P, _ONE_P)
        if not den.is_constant():
            g = num.gcd(den)
            if not g.is_one():
                num = num / g
                den = den / g
        lc = den.leading_coefficient()
        if lc != 1:
            num = num / lc
            den = den / lc
        return cls._raw(num, den)

    @classmethod
    def zero(cls) -> "RationalFunction":
        return _RF_ZERO

    @classmethod
    def one(cls) -> "RationalFunction":
        return _RF_ONE

    @classmethod
    def r(cls) -> "RationalFunction":
        return cls._raw(_R, _ONE_P)

    @classmethod
    def s(cls) -> "RationalFunction":
        return cls._raw(_S, _ONE_P)

    @classmethod
    def monomial(cls, a: int, b: int, c: Fraction | int = 1) -> "RationalFunction":
        return LaurentPolynomial.monomial(a, b, c).to_rational()

    # arithmetic ------------------------------------------------------------
    def __add__(self, other: Number) -> "RationalFunction":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.num.is_zero():
            return other
        if other.num.is_zero():
            return self
        if self.den == other.den:
            return RationalFunction._make(self.num + other.num, self.den)
        return RationalFunction._make(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "RationalFunction":
        return RationalFunction._raw(-self.num, self.den)

    def __sub__(self, other: Number) -> "RationalFunction":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: Number) -> "RationalFunction":
        return _coerce(other) - self

    def __mul__(self, other: Number) -> "RationalFunction":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.num.is_zero() or other.num.is_zero():
            return _RF_ZERO
        if self.den.is_one() and other.den.is_one():
            return RationalFunction._raw(self.num * other.num, _ONE_P)
        n1, d1, n2, d2 = self.num, self.den, other.num, other.den
        if not d2.is_constant():
            g = n1.gcd(d2)
            if not g.is_one():
                n1, d2 = n1 / g, d2 / g
        if not d1.is_constant():
            g = n2.gcd(d1)
            if not g.is_one():
                n2, d1 = n2 / g, d1 / g
        num, den = n1 * n2, d1 * d2
        lc = den.leading_coefficient()
        if lc != 1:
            num, den = num / lc, den / lc
        return RationalFunction._raw(num, den)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if self.num.is_zero():
            raise CoefficientError("division by zero rational function")
        return RationalFunction._make(self.den, self.num)

    def __truediv__(self, other: Number) -> "RationalFunction":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other: Number) -> "RationalFunction":
        return _coerce(other) * self.inverse()

    def __pow__(self, k: int) -> "RationalFunction":
        if k < 0:
            return self.inverse() ** (-k)
        return RationalFunction._raw(self.num ** k, self.den ** k)

    # predicates ------------------------------------------------------------
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.num.is_one() and self.den.is_one()

    def __bool__(self) -> bool:
        return not self.num.is_zero()

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = RationalFunction.const(other)
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((tuple(sorted(self.num.to_dict().items())), tuple(sorted(self.den.to_dict().items()))))
        return self._hash

    @classmethod
    def const(cls, c: int | Fraction) -> "RationalFunction":
        c = Fraction(c)
        if not c:
            return _RF_ZERO
        return cls._raw(_CTX.from_dict({(0, 0): flint.fmpq(c.numerator, c.denominator)}), _ONE_P)

    # structure -------------------------------------------------------------
    def laurent(self) -> LaurentPolynomial | None:
        """Return the Laurent polynomial if the denominator is a monomial."""
        d = self.den.to_dict()
        if len(d) != 1:
            return None
        ((da, db), dc), = d.items()
        dc = _frac(dc)
        return LaurentPolynomial({(a - da, b - db): _frac(c) / dc for (a, b), c in self.num.to_dict().items()})

    def is_laurent(self) -> bool:
        return len(self.den.to_dict()) == 1

    def substitute(self, r_image: "RationalFunction", s_image: "RationalFunction") -> "RationalFunction":
        """Evaluate at r -> r_image, s -> s_image."""
        return _eval_poly(self.num, r_image, s_image) / _eval_poly(self.den, r_image, s_image)

    def swap_rs(self) -> "RationalFunction":
        return RationalFunction._make(self.num.compose(_S, _R), self.den.compose(_S, _R))

    def __str__(self) -> str:
        lp = self.laurent()
        if lp is not None:
            return str(lp)
        return f"({_format_poly(self.num)})/({_format_poly(self.den)})"

    def __repr__(self) -> str:
        return f"RationalFunction('{self}')"

    def factors(self) -> list[tuple[str, int]]:
        """Irreducible factors of numerator (positive) and denominator (negative)."""
        out = []
        for poly, sign in ((self.num, 1), (self.den, -1)):
            if poly.is_constant():
                continue
            for f, e in poly.factor()[1]:
                out.append((_format_poly(f), sign * e))
        return out


def _coerce_poly(x):
    if isinstance(x, flint.fmpq_mpoly):
        return x
    if isinstance(x, Fraction):
        return _CTX.from_dict({(0, 0): flint.fmpq(x.numerator, x.denominator)}) if x else _ZERO_P
    if isinstance(x, int):
        return _CTX.from_dict({(0, 0): x}) if x else _ZERO_P
    raise TypeError(f"cannot build a polynomial from {type(x).__name__}")


def _coerce(x) -> RationalFunction:
    if isinstance(x, RationalFunction):
        return x
    if isinstance(x, (int, Fraction)):
        return RationalFunction.const(x)
    if isinstance(x, LaurentPolynomial):
        return x.to_rational()
    return NotImplemented


def _format_poly(p) -> str:
    return _format_laurent({(a, b): _frac(c) for (a, b), c in p.to_dict().items()})


def _eval_poly(p, r_image: RationalFunction, s_image: RationalFunction) -> RationalFunction:
    total = _RF_ZERO
    for (a, b), c in p.to_dict().items():
        total = total + (r_image ** a) * (s_image ** b) * _frac(c)
    return total


_RF_ZERO = RationalFunction._raw(_ZERO_P, _ONE_P)
_RF_ONE = RationalFunction._raw(_ONE_P, _ONE_P)

R = RationalFunction.r()
S = RationalFunction.s()


def rf_normalize(num: Number | LaurentPolynomial, den: Number | LaurentPolynomial) -> RationalFunction:
    """Reduce num/den to canonical form; a zero denominator is an error."""
    n, d = _coerce(num), _coerce(den)
    if n is NotImplemented or d is NotImplemented:
        raise TypeError("unsupported operand")
    if d.is_zero():
        raise CoefficientError("zero denominator")
    return n / d


# ------------------------------------------------------------ text format

_TERM_RE = re.compile(r"\s*([+-])?\s*([^+-]+)")


def parse_rf(text: str) -> RationalFunction:
    """Parse the text produced by ``str(RationalFunction)``.

    Accepts Laurent sums such as ``-1/2*r^2*s^-1 + 3`` and the quotient
    form ``(num)/(den)``.  Exponents may be negative.
    """
    text = text.strip()
    depth = 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "/" and depth == 0 and i > 0 and text[i - 1] == ")" and i + 1 < len(text) and text[i + 1] == "(":
            return parse_rf(text[1:i - 1]) / parse_rf(text[i + 2:-1])
    if text.startswith("(") and text.endswith(")") and _balanced(text[1:-1]):
        return parse_rf(text[1:-1])
    return _parse_laurent(text).to_rational()


def _balanced(text: str) -> bool:
    depth = 0
    for ch in text:
        depth += ch == "("
        depth -= ch == ")"
        if depth < 0:
            return False
    return depth == 0


def _parse_laurent(text: str) -> LaurentPolynomial:
    # split on +/- that are not exponent signs
    terms: dict[tuple[int, int], Fraction] = {}
    pieces = re.split(r"(?<![\^])\s*([+-])\s*", " " + text.strip())
    sign = 1
    for piece in pieces:
        piece = piece.strip()
        if not piece:
            continue
        if piece in "+-":
            sign = -sign if piece == "-" else sign
            continue
        c, a, b = Fraction(1), 0, 0
        for factor in piece.split("*"):
            factor = factor.strip()
            m = re.fullmatch(r"([rs])(?:\^(-?\d+))?", factor)
            if m:
                e = int(m.group(2) or 1)
                if m.group(1) == "r":
                    a += e
                else:
                    b += e
            else:
                try:
                    c *= Fraction(factor)
                except ValueError as exc:
                    raise ValueError(f"bad coefficient factor {factor!r}") from exc
        key = (a, b)
        terms[key] = terms.get(key, Fraction(0)) + sign * c
        sign = 1
    return LaurentPolynomial(terms)


# ------------------------------------------------------------ q-integers


def rs_integer(c: int, index_class: str = "long") -> RationalFunction:
    """[c] = (u^c - v^c)/(u - v) with (u, v) = (r^2, s^2) for "long", (r, s) for "short"."""
    return _rs_integer(c, index_class)


@lru_cache(maxsize=None)
def _rs_integer(c: int, index_class: str) -> RationalFunction:
    u, v = _class_pair(index_class)
    if c == 0:
        return _RF_ZERO
    if c < 0:
        return -(_rs_integer(-c, index_class) * (u * v) ** c)
    total = _RF_ZERO
    for k in range(c):
        total = total + u ** (c - 1 - k) * v ** k
    return total


def _class_pair(index_class: str) -> tuple[RationalFunction, RationalFunction]:
    if index_class in ("long", "i<n"):
        return R ** 2, S ** 2
    if index_class in ("short", "n"):
        return R, S
    raise ValueError(f"unknown index class {index_class!r}")


def rs_factorial(c: int, index_class: str = "long") -> RationalFunction:
    if c < 0:
        raise ValueError("factorial of a negative integer")
    out = _RF_ONE
    for k in range(1, c + 1):
        out = out * rs_integer(k, index_class)
    return out


def rs_binomial(c: int, d: int, index_class: str = "long") -> RationalFunction:
    """Gaussian binomial [c over d] in the (r, s) normalization."""
    if d < 0 or d > c:
        raise ValueError(f"binomial [{c} over {d}] is undefined")
    return rs_factorial(c, index_class) / (rs_factorial(d, index_class) * rs_factorial(c - d, index_class))


def rs_multinomial(parts: Iterable[int], index_class: str = "long") -> RationalFunction:
    parts = list(parts)
    out = rs_factorial(sum(parts), index_class)
    for p in parts:
        out = out / rs_factorial(p, index_class)
    return out


class QIntegerTable:
    """Memoized [c]_i, [c]_i! and binomials for one index class."""

    def __init__(self, index_class: str = "long"):
        _class_pair(index_class)
        self.index_class = index_class

    def integer(self, c: int) -> RationalFunction:
        return rs_integer(c, self.index_class)

    def factorial(self, c: int) -> RationalFunction:
        return rs_factorial(c, self.index_class)

    def binomial(self, c: int, d: int) -> RationalFunction:
        return rs_binomial(c, d, self.index_class)


@lru_cache(maxsize=None)
def alpha_beta(m: int) -> tuple[RationalFunction, RationalFunction]:
    """Closed forms of the two sequences used by the power identities."""
    if m < 1:
        raise ValueError("m must be positive")
    beta = (R ** m - S ** m) / (R - S)
    alpha = (R ** m - S ** m) * (R ** (m - 1) - S ** (m - 1)) / ((R - S) * (R ** 2 - S ** 2))
    return alpha, beta


# ------------------------------------------------------------ cyclotomic


@lru_cache(maxsize=None)
def _phi(ell: int):
    return flint.fmpq_poly(flint.fmpz_poly.cyclotomic(ell))


class CyclotomicNumber:
    """Element of Q[x]/Phi_ell, x a primitive ell-th root of unity."""

    __slots__ = ("ell", "poly", "_hash")

    def __init__(self, ell: int, coeffs: Iterable[Fraction | int] | flint.fmpq_poly = ()):
        self.ell = ell
        if isinstance(coeffs, flint.fmpq_poly):
            p = coeffs
        else:
            p = flint.fmpq_poly([flint.fmpq(Fraction(c).numerator, Fraction(c).denominator) for c in coeffs])
        phi = _phi(ell)
        self.poly = p % phi if p.degree() >= phi.degree() else p
        self._hash = None

    @classmethod
    def _raw(cls, ell: int, poly) -> "CyclotomicNumber":
        obj = object.__new__(cls)
        obj.ell, obj.poly, obj._hash = ell, poly, None
        return obj

    @classmethod
    def root_power(cls, ell: int, k: int) -> "CyclotomicNumber":
        coeffs = [0] * (k % ell) + [1]
        return cls(ell, coeffs)

    def _co(self, other) -> "CyclotomicNumber":
        if isinstance(other, CyclotomicNumber):
            if other.ell != self.ell:
                raise CoefficientError("mixed cyclotomic fields")
            return other
        if isinstance(other, (int, Fraction)):
            f = Fraction(other)
            return CyclotomicNumber._raw(self.ell, flint.fmpq_poly([flint.fmpq(f.numerator, f.denominator)]))
        return NotImplemented

    def __add__(self, other) -> "CyclotomicNumber":
        o = self._co(other)
        if o is NotImplemented:
            return o
        return CyclotomicNumber._raw(self.ell, self.poly + o.poly)

    __radd__ = __add__

    def __neg__(self) -> "CyclotomicNumber":
        return CyclotomicNumber._raw(self.ell, -self.poly)

    def __sub__(self, other) -> "CyclotomicNumber":
        o = self._co(other)
        if o is NotImplemented:
            return o
        return CyclotomicNumber._raw(self.ell, self.poly - o.poly)

    def __rsub__(self, other) -> "CyclotomicNumber":
        return self._co(other) - self

    def __mul__(self, other) -> "CyclotomicNumber":
        o = self._co(other)
        if o is NotImplemented:
            return o
        p = self.poly * o.poly
        phi = _phi(self.ell)
        if p.degree() >= phi.degree():
            p = p % phi
        return CyclotomicNumber._raw(self.ell, p)

    __rmul__ = __mul__

    def inverse(self) -> "CyclotomicNumber":
        if self.poly.is_zero():
            raise CoefficientError("division by zero in cyclotomic field")
        g, u, _ = self.poly.xgcd(_phi(self.ell))
        return CyclotomicNumber._raw(self.ell, u / g.leading_coefficient() if g.degree() == 0 else u)

    def __truediv__(self, other) -> "CyclotomicNumber":
        o = self._co(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other) -> "CyclotomicNumber":
        return self._co(other) * self.inverse()

    def __pow__(self, k: int) -> "CyclotomicNumber":
        if k < 0:
            return self.inverse() ** (-k)
        out = CyclotomicNumber._raw(self.ell, flint.fmpq_poly([1]))
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def is_zero(self) -> bool:
        return self.poly.is_zero()

    def is_one(self) -> bool:
        return self.poly.is_one()

    def __bool__(self) -> bool:
        return not self.poly.is_zero()

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = self._co(other)
        if not isinstance(other, CyclotomicNumber):
            return NotImplemented
        return self.ell == other.ell and self.poly == other.poly

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.ell, tuple(str(c) for c in self.poly.coeffs())))
        return self._hash

    def coefficients(self) -> list[Fraction]:
        return [_frac(c) for c in self.poly.coeffs()]

    def __str__(self) -> str:
        terms = {}
        for k, c in enumerate(self.coefficients()):
            if c:
                terms[k] = c
        if not terms:
            return "0"
        out = []
        for k in sorted(terms, reverse=True):
            c = terms[k]
            mono = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
            mag = abs(c)
            body = mono if (mono and mag == 1) else (f"{mag}*{mono}" if mono else str(mag))
            out.append(("-" if c < 0 else "+", body))
        text = ("-" if out[0][0] == "-" else "") + out[0][1]
        for sign, body in out[1:]:
            text += f" {sign} {body}"
        return text

    __repr__ = __str__


@dataclass(frozen=True)
class SpecializationMap:
    """r -> x^y, s -> x^z with x a primitive ell-th root of unity (ell odd)."""

    ell: int
    y: int
    z: int

    def __post_init__(self):
        if self.ell < 3 or self.ell % 2 == 0:
            raise CoefficientError(f"ell must be odd and at least 3, got {self.ell}")
        if math.gcd(self.y - self.z, self.ell) != 1:
            raise CoefficientError(f"r s^-1 = x^{self.y - self.z} is not a primitive {self.ell}-th root of unity")
        ord_r = self.ell // math.gcd(self.y, self.ell)
        ord_s = self.ell // math.gcd(self.z, self.ell)
        if math.lcm(ord_r, ord_s) != self.ell:
            raise CoefficientError("lcm of the orders of r and s differs from ell")

    def image(self, a: int, b: int) -> CyclotomicNumber:
        return CyclotomicNumber.root_power(self.ell, a * self.y + b * self.z)

    def eval_poly(self, poly) -> CyclotomicNumber:
        acc = [Fraction(0)] * self.ell
        for (a, b), c in poly.to_dict().items():
            acc[(a * self.y + b * self.z) % self.ell] += _frac(c)
        return CyclotomicNumber(self.ell, acc)

    def standing_assumptions(self) -> list[str]:
        """Names of violated assumptions r^3 != s^3, r^4 != s^4, r^2+s^2 != 0, r^2+rs+s^2 != 0."""
        bad = []
        r, s = self.image(1, 0), self.image(0, 1)
        checks = {
            "r^3 != s^3": r ** 3 - s ** 3,
            "r^4 != s^4": r ** 4 - s ** 4,
            "r^2 + s^2 != 0": r ** 2 + s ** 2,
            "r^2 + r*s + s^2 != 0": r ** 2 + r * s + s ** 2,
        }
        for name, value in checks.items():
            if value.is_zero():
                bad.append(name)
        return bad


def specialize(f: Number, smap: SpecializationMap) -> CyclotomicNumber:
    """Evaluate a rational function at a root of unity.

    The function is already in lowest terms, so a vanishing denominator is a
    genuine pole; the error names the irreducible factor responsible.
    """
    f = _coerce(f)
    den = smap.eval_poly(f.den)
    if den.is_zero():
        culprit = ""
        for fac, _ in f.den.factor()[1]:
            if smap.eval_poly(fac).is_zero():
                culprit = _format_poly(fac)
                break
        raise SpecializationError(f"denominator factor {culprit} vanishes at ell={smap.ell}, y={smap.y}, z={smap.z}",
                                  culprit)
    num = smap.eval_poly(f.num)
    return num / den


def iter_laurent_terms(f: RationalFunction) -> Iterator[tuple[int, int, Fraction]]:
    lp = f.laurent()
    if lp is None:
        raise CoefficientError(f"{f} is not a Laurent polynomial")
    for (a, b), c in lp.terms.items():
        yield a, b, c
