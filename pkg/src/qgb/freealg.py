"""Letters, words and sparse elements of the free algebra over Q(r, s),
plus tensor elements, line-oriented serialization and an expression parser.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping

from .coeff import CyclotomicNumber, RationalFunction, parse_rf

TENSOR_SIGNS = ("⊗", "ox")


class CoefficientModeError(TypeError):
    """Generic and specialized coefficients were mixed in one element."""


@dataclass(frozen=True)
class Letter:
    """One generator symbol.

    ``kind`` is ``E`` or ``F`` for root vectors (simple generators are
    ``E(i,i)`` / ``F(i,i)``), ``w`` for w_i and ``W`` for w_i'.  Torus letters
    use ``power`` = +1 or -1 and ignore ``j``.
    """

    kind: str
    i: int
    j: int = 0
    primed: bool = False
    power: int = 1

    @property
    def is_torus(self) -> bool:
        return self.kind in ("w", "W")

    def inverse(self) -> "Letter":
        if not self.is_torus:
            raise ValueError(f"{self} has no inverse letter")
        return Letter(self.kind, self.i, 0, False, -self.power)

    def __str__(self) -> str:
        if self.is_torus:
            return f"{self.kind}{self.i}" + ("" if self.power == 1 else "^-1")
        if self.j == self.i and not self.primed:
            return f"{self.kind.lower()}{self.i}"
        return f"{self.kind}({self.i},{self.j}{chr(39) if self.primed else ''})"

    __repr__ = __str__


def e(i: int) -> Letter:
    return Letter("E", i, i)


def f(i: int) -> Letter:
    return Letter("F", i, i)


def w(i: int, power: int = 1) -> Letter:
    return Letter("w", i, 0, False, power)


def wp(i: int, power: int = 1) -> Letter:
    return Letter("W", i, 0, False, power)


def E(i: int, j: int, primed: bool = False) -> Letter:
    return Letter("E", i, j, primed)


def F(i: int, j: int, primed: bool = False) -> Letter:
    return Letter("F", i, j, primed)


Word = tuple[Letter, ...]


def letter_degree(letter: Letter, n: int) -> tuple[int, ...]:
    """Root-lattice degree; F letters count negatively, torus letters are 0."""
    deg = [0] * n
    if letter.is_torus:
        return tuple(deg)
    i, j = letter.i, letter.j
    if letter.primed:
        for t in range(i, n + 1):
            deg[t - 1] = 1 if t < j else 2
    else:
        for t in range(i, j + 1):
            deg[t - 1] = 1
    sign = 1 if letter.kind == "E" else -1
    return tuple(sign * d for d in deg)


def word_text(word: Word) -> str:
    if not word:
        return "1"
    parts: list[str] = []
    k = 0
    while k < len(word):
        m = k
        while m + 1 < len(word) and word[m + 1] == word[k]:
            m += 1
        run = m - k + 1
        a = word[k]
        if run > 1 and a.is_torus and a.power < 0:
            parts.append(f"{a.kind}{a.i}^-{run}")
        else:
            parts.append(str(a) + (f"^{run}" if run > 1 else ""))
        k = m + 1
    return " ".join(parts)


def _coef_kind(c) -> str:
    if isinstance(c, CyclotomicNumber):
        return f"cyclotomic{c.ell}"
    return "generic"


class Element:
    """Finite sum of words with coefficients in one coefficient domain."""

    __slots__ = ("terms", "mode")

    def __init__(self, terms: Mapping[Word, object] | None = None):
        self.terms: dict[Word, object] = {}
        self.mode: str | None = None
        for word, c in (terms or {}).items():
            self._accumulate(tuple(word), c)

    def _accumulate(self, word: Word, c) -> None:
        if isinstance(c, (int, Fraction)):
            c = RationalFunction.const(c) if self.mode in (None, "generic") else c
        if not c:
            return
        kind = _coef_kind(c)
        if self.mode is None:
            self.mode = kind
        elif self.mode != kind:
            raise CoefficientModeError(f"cannot mix {self.mode} and {kind} coefficients")
        old = self.terms.get(word)
        new = c if old is None else old + c
        if new:
            self.terms[word] = new
        else:
            self.terms.pop(word, None)

    @classmethod
    def word(cls, *letters: Letter, coef=1) -> "Element":
        return cls({tuple(letters): coef})

    @classmethod
    def scalar(cls, c) -> "Element":
        return cls({(): c})

    def copy(self) -> "Element":
        out = Element()
        out.terms = dict(self.terms)
        out.mode = self.mode
        return out

    def __iter__(self) -> Iterator[tuple[Word, object]]:
        return iter(self.terms.items())

    def __len__(self) -> int:
        return len(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "Element") -> "Element":
        out = self.copy()
        for word, c in other.terms.items():
            out._accumulate(word, c)
        return out

    def __neg__(self) -> "Element":
        out = Element()
        for word, c in self.terms.items():
            out._accumulate(word, -c)
        return out

    def __sub__(self, other: "Element") -> "Element":
        return self + (-other)

    def __mul__(self, other) -> "Element":
        if isinstance(other, Element):
            out = Element()
            for u, c in self.terms.items():
                for v, d in other.terms.items():
                    out._accumulate(u + v, c * d)
            return out
        if isinstance(other, Letter):
            return self * Element.word(other)
        out = Element()
        for word, c in self.terms.items():
            out._accumulate(word, c * other)
        return out

    def __rmul__(self, other) -> "Element":
        if isinstance(other, Letter):
            return Element.word(other) * self
        out = Element()
        for word, c in self.terms.items():
            out._accumulate(word, other * c)
        return out

    def __pow__(self, k: int) -> "Element":
        if k < 0:
            raise ValueError("negative powers of elements are not defined")
        out = Element.scalar(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Element):
            return NotImplemented
        return self.terms == other.terms

    def grade(self, n: int) -> tuple[int, ...] | str:
        """Common root-lattice degree, or "inhomogeneous"."""
        degs = set()
        for word in self.terms:
            total = [0] * n
            for letter in word:
                for t, d in enumerate(letter_degree(letter, n)):
                    total[t] += d
            degs.add(tuple(total))
        if not degs:
            return tuple([0] * n)
        if len(degs) > 1:
            return "inhomogeneous"
        return degs.pop()

    def __str__(self) -> str:
        return format_element(self)

    __repr__ = __str__


def _coef_text(c) -> tuple[str, str]:
    """Split a coefficient into sign and magnitude text ("" for 1)."""
    text = str(c)
    if isinstance(c, RationalFunction):
        lp = c.laurent()
        if lp is not None and len(lp.terms) == 1:
            ((a, b), q), = lp.terms.items()
            sign = "-" if q < 0 else "+"
            mag = str((-c) if q < 0 else c)
            return sign, ("" if mag == "1" else mag)
    if text.startswith("-") and " " not in text:
        return "-", text[1:] if text[1:] != "1" else ""
    if text == "1":
        return "+", ""
    if " " in text and not text.startswith("("):
        text = f"({text})"
    return "+", text


def format_element(x: Element) -> str:
    if not x.terms:
        return "0"
    out = []
    for k, (word, c) in enumerate(x.terms.items()):
        sign, mag = _coef_text(c)
        wtxt = word_text(word)
        if not word:
            body = mag or "1"
        elif mag:
            body = f"{mag} {wtxt}"
        else:
            body = wtxt
        if k == 0:
            out.append(("-" if sign == "-" else "") + body)
        else:
            out.append(f" {sign} {body}")
    return "".join(out)


# ------------------------------------------------------------- tensors


class TensorElement:
    """Finite sum of (word, word) pairs."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[tuple[Word, Word], object] | None = None):
        self.terms: dict[tuple[Word, Word], object] = {}
        for key, c in (terms or {}).items():
            self._accumulate(key, c)

    def _accumulate(self, key, c) -> None:
        if isinstance(c, (int, Fraction)):
            c = RationalFunction.const(c)
        if not c:
            return
        old = self.terms.get(key)
        new = c if old is None else old + c
        if new:
            self.terms[key] = new
        else:
            self.terms.pop(key, None)

    def __add__(self, other: "TensorElement") -> "TensorElement":
        out = TensorElement(self.terms)
        for k, c in other.terms.items():
            out._accumulate(k, c)
        return out

    def __neg__(self) -> "TensorElement":
        return TensorElement({k: -c for k, c in self.terms.items()})

    def __mul__(self, c) -> "TensorElement":
        return TensorElement({k: d * c for k, d in self.terms.items()})

    def __sub__(self, other: "TensorElement") -> "TensorElement":
        return self + (-other)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, TensorElement) and self.terms == other.terms

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for k, ((u, v), c) in enumerate(self.terms.items()):
            sign, mag = _coef_text(c)
            body = f"{word_text(u)} ⊗ {word_text(v)}"
            if mag:
                body = f"{mag} {body}"
            parts.append((("-" if sign == "-" else "") if k == 0 else f" {sign} ") + body)
        return "".join(parts)

    __repr__ = __str__


# ------------------------------------------------------------- serialization


def dump_element(x: Element) -> str:
    """One line per term: ``coef<TAB>word``."""
    return "".join(f"{c}\t{_word_ser(word)}\n" for word, c in x.terms.items())


def dump_tensor(x: TensorElement) -> str:
    return "".join(f"{c}\t{_word_ser(u)} ⊗ {_word_ser(v)}\n" for (u, v), c in x.terms.items())


def _word_ser(word: Word) -> str:
    return " ".join(str(letter) for letter in word) if word else "1"


def load_element(text: str) -> Element:
    out = Element()
    for line in text.splitlines():
        if not line.strip():
            continue
        coef, _, word = line.partition("\t")
        out._accumulate(parse_word(word), parse_rf(coef))
    return out


def load_tensor(text: str) -> TensorElement:
    out = TensorElement()
    for line in text.splitlines():
        if not line.strip():
            continue
        coef, _, rest = line.partition("\t")
        left, _, right = rest.partition("⊗")
        out._accumulate((parse_word(left), parse_word(right)), parse_rf(coef))
    return out


_LETTER_RE = re.compile(r"([efEFwW])(?:(\d+)|\((\d+),(\d+)('?)\))(\^-1)?")


def parse_letter(token: str) -> Letter:
    m = _LETTER_RE.fullmatch(token.strip())
    if not m:
        raise ValueError(f"not a letter: {token!r}")
    kind, single, i, j, prime, inv = m.groups()
    if kind in "wW":
        if single is None:
            raise ValueError(f"torus letters take one index: {token!r}")
        return Letter(kind, int(single), 0, False, -1 if inv else 1)
    if inv:
        raise ValueError(f"{token!r}: only torus letters have inverses")
    if single is not None:
        if kind in "EF":
            raise ValueError(f"{token!r}: use e{single} or {kind}(i,j)")
        return Letter(kind.upper(), int(single), int(single))
    if kind in "ef":
        raise ValueError(f"{token!r}: use {kind.upper()}(i,j) for root vectors")
    return Letter(kind, int(i), int(j), bool(prime))


def parse_word(text: str) -> Word:
    text = text.strip()
    if text in ("", "1"):
        return ()
    letters: list[Letter] = []
    for tok in text.split():
        m = re.fullmatch(r"(.+?)\^(\d+)", tok)
        if m and not tok.endswith("^-1"):
            letters.extend([parse_letter(m.group(1))] * int(m.group(2)))
        else:
            letters.append(parse_letter(tok))
    return tuple(letters)


# ------------------------------------------------------------- expression parser


class ParseError(ValueError):
    """Syntax error with the offending column."""

    def __init__(self, message: str, text: str, pos: int):
        self.text = text
        self.pos = pos
        self.message = message
        super().__init__(f"{message}\n  {text}\n  {' ' * pos}^")


_TOKEN_RE = re.compile(
    r"\s*(?:"
    r"(?P<letter>[EF]\(\d+,\d+'?\)|[efwW]\d+)"
    r"|(?P<num>\d+)"
    r"|(?P<param>[rs])(?![A-Za-z0-9])"
    r"|(?P<tensor>⊗|ox(?![A-Za-z0-9]))"
    r"|(?P<op>[-+*/^()])"
    r")"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    pos = 0
    toks = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            k = pos
            while k < len(text) and text[k].isspace():
                k += 1
            raise ParseError(f"unexpected character {text[k]!r}", text, k)
        kind = m.lastgroup
        start = m.start(kind)
        toks.append((kind, m.group(kind), start))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.k = 0

    def peek(self):
        return self.toks[self.k]

    def take(self):
        tok = self.toks[self.k]
        self.k += 1
        return tok

    def fail(self, msg: str):
        raise ParseError(msg, self.text, self.peek()[2])

    def parse(self):
        out = self.expr(tensors=True)
        if self.peek()[0] != "end":
            self.fail("unexpected token")
        return out

    def expr(self, tensors: bool = False):
        """Signed sum of terms; with ``tensors`` a summand may be ``term ⊗ term``.

        ⊗ binds tighter than + and - but looser than juxtaposition and *.
        """
        sign = 1
        if self.peek()[1] in "+-" and self.peek()[0] == "op":
            sign = -1 if self.take()[1] == "-" else 1
        out = self._summand(tensors) * sign
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            pos = self.peek()[2]
            t = self._summand(tensors)
            if isinstance(t, TensorElement) != isinstance(out, TensorElement):
                raise ParseError("cannot add a tensor and a plain element", self.text, pos)
            out = out + t if op == "+" else out - t
        return out

    def _summand(self, tensors: bool):
        left = self.term()
        if self.peek()[0] != "tensor":
            return left
        if not tensors:
            self.fail("tensor inside parentheses")
        self.take()
        return _to_tensor(left, self.term())

    def term(self) -> Element:
        out = self.power()
        while True:
            tok = self.peek()
            if tok[0] == "op" and tok[1] == "*":
                self.take()
                out = out * self.power()
            elif tok[0] == "op" and tok[1] == "/":
                self.take()
                pos = self.peek()[2]
                den = self.power()
                if set(den.terms) != {()}:
                    raise ParseError("can only divide by a scalar", self.text, pos)
                out = out * den.terms[()].inverse()
            elif tok[0] in ("letter", "num", "param") or (tok[0] == "op" and tok[1] == "("):
                out = out * self.power()
            else:
                return out

    def power(self) -> Element:
        base, is_letter = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            neg = False
            if self.peek()[1] == "-":
                self.take()
                neg = True
            tok = self.take()
            if tok[0] != "num":
                raise ParseError("expected an integer exponent", self.text, tok[2])
            k = int(tok[1])
            if neg:
                if set(base.terms) == {()}:
                    return Element.scalar(base.terms[()] ** (-k))
                if is_letter is not None and is_letter.is_torus:
                    return Element.word(*([is_letter.inverse()] * k))
                raise ParseError("negative powers apply only to scalars and torus letters", self.text, tok[2])
            return base ** k
        return base

    def atom(self) -> tuple[Element, Letter | None]:
        tok = self.take()
        kind, val, pos = tok
        if kind == "letter":
            letter = parse_letter(val)
            return Element.word(letter), letter
        if kind == "num":
            return Element.scalar(int(val)), None
        if kind == "param":
            return Element.scalar(RationalFunction.r() if val == "r" else RationalFunction.s()), None
        if kind == "op" and val == "(":
            inner = self.expr()
            if self.peek()[1] != ")":
                self.fail("expected ')'")
            self.take()
            return inner, None
        raise ParseError("expected a letter, number, r, s or '('", self.text, pos)


def _to_tensor(left: Element, right: Element) -> TensorElement:
    out = TensorElement()
    for u, c in left.terms.items():
        for v, d in right.terms.items():
            out._accumulate((u, v), c * d)
    return out


def parse_expression(text: str) -> Element | TensorElement:
    """Parse e.g. ``e2*e1 - r^-2 E(1,2)`` or ``e1 ⊗ w1``."""
    return _Parser(text).parse()
