"""Commutation identities among root vectors, stored as parameterized
instances that can be evaluated in any PBWAlgebra.

Every entry carries a tag of the form ``a.b.c`` used by the CLI, an index
generator (all valid index tuples at rank n) and a builder returning the
two sides as ``Elt`` values.  Certification compares the two sides after
normal ordering.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Iterator

from .coeff import R, S, RationalFunction, alpha_beta, rs_integer
from .freealg import Element, Letter, w as w_letter, wp as wp_letter
from .pbw import Elt, PBWAlgebra
from .rootsys import RootSystem, group_pairing, root_system

Builder = Callable[..., tuple[Elt, Elt]]


class Vectors:
    """Root vectors, generators and brackets of one algebra as ``Elt`` values."""

    def __init__(self, alg: PBWAlgebra):
        self.alg = alg
        self.system = alg.system
        self.n = alg.rank

    def wrap(self, d: dict) -> Elt:
        return Elt(self.alg, d)

    def E(self, i: int, j: int) -> Elt:
        return self.wrap(self.alg.e_root(self.system.index_of(i, j)))

    def P(self, i: int, j: int) -> Elt:
        """E(i, j')."""
        return self.wrap(self.alg.e_root(self.system.index_of(i, j, primed=True)))

    def F(self, i: int, j: int) -> Elt:
        return self.wrap(self.alg.f_root(self.system.index_of(i, j)))

    def FP(self, i: int, j: int) -> Elt:
        return self.wrap(self.alg.f_root(self.system.index_of(i, j, primed=True)))

    def e(self, i: int) -> Elt:
        return self.wrap(self.alg.e(i))

    def f(self, i: int) -> Elt:
        return self.wrap(self.alg.f(i))

    def w(self, i: int, k: int = 1) -> Elt:
        return self.wrap(self.alg.w(i, k))

    def wp(self, i: int, k: int = 1) -> Elt:
        return self.wrap(self.alg.wp(i, k))

    def one(self) -> Elt:
        return self.wrap(self.alg.unit())

    def degree(self, x: Elt) -> tuple[int, ...]:
        for fw, _t, ew in x.d:
            dE = self.alg.word_degree(ew)
            dF = self.alg.word_degree(fw)
            return tuple(a - b for a, b in zip(dE, dF))
        return (0,) * self.n

    def bullet(self, x: Elt, y: Elt) -> Elt:
        """[x, y] twisted by <w'_deg x, w_deg y>^-1."""
        q = group_pairing(self.system, self.degree(x), self.degree(y)).inverse()
        return x * y - q * (y * x)


def root_letter(system: RootSystem, p: int, family: str = "E") -> Letter:
    i, k = system.roots[p].index
    if system.cartan == "B" and k > system.n:
        return Letter(family, i, 2 * system.n - k + 1, True)
    return Letter(family, i, k)


def letter_position(system: RootSystem, letter: Letter) -> int:
    return system.index_of(letter.i, letter.j, letter.primed)


_EXPANSIONS: dict = {}


def generator_expansion(system: RootSystem, p: int) -> Element:
    """Root vector p written in the generators e_i via its defining bracket."""
    key = (system.cartan, system.n, p)
    hit = _EXPANSIONS.get(key)
    if hit is not None:
        return hit
    br = system.brackets[p]
    if br is None:
        out = Element.word(root_letter(system, p))
    else:
        a = generator_expansion(system, br.left)
        b = generator_expansion(system, br.right)
        out = a * b - (b * a) * br.twist
    _EXPANSIONS[key] = out
    return out


class LetterVectors:
    """Same interface as Vectors, but products stay as free words in root letters."""

    def __init__(self, system: RootSystem, expand: bool = False):
        self.system = system
        self.n = system.n
        self.expand = expand

    def _root(self, p: int, family: str = "E") -> Element:
        if self.expand and family == "E":
            return generator_expansion(self.system, p)
        return Element.word(root_letter(self.system, p, family))

    def E(self, i: int, j: int) -> Element:
        return self._root(self.system.index_of(i, j))

    def P(self, i: int, j: int) -> Element:
        return self._root(self.system.index_of(i, j, primed=True))

    def F(self, i: int, j: int) -> Element:
        return self._root(self.system.index_of(i, j), "F")

    def FP(self, i: int, j: int) -> Element:
        return self._root(self.system.index_of(i, j, primed=True), "F")

    def e(self, i: int) -> Element:
        return self.E(i, i)

    def f(self, i: int) -> Element:
        return self.F(i, i)

    def w(self, i: int, k: int = 1) -> Element:
        return Element.word(*[w_letter(i, 1 if k > 0 else -1)] * abs(k))

    def wp(self, i: int, k: int = 1) -> Element:
        return Element.word(*[wp_letter(i, 1 if k > 0 else -1)] * abs(k))

    def one(self) -> Element:
        return Element.scalar(1)

    def degree(self, x: Element) -> tuple[int, ...]:
        g = x.grade(self.n)
        if isinstance(g, str):
            raise ValueError("bracket of an inhomogeneous element")
        return g

    def bullet(self, x: Element, y: Element) -> Element:
        q = group_pairing(self.system, self.degree(x), self.degree(y)).inverse()
        return x * y - (y * x) * q


@dataclass(frozen=True)
class Identity:
    tag: str
    indices: Callable[[int], Iterable[tuple]]
    build: Builder
    names: tuple[str, ...]
    min_rank: int = 2
    note: str = ""

    def instances(self, n: int) -> list[tuple]:
        return list(self.indices(n))


def _q(m: int) -> RationalFunction:
    return rs_integer(m, "long")


def _pw(x: Elt, k: int) -> Elt:
    return x ** k if k >= 0 else x * 0


# straightening identities ----------------------------------------------------


def _rng(lo: int, hi: int) -> range:
    return range(lo, hi + 1)


def _build_table() -> dict[str, Identity]:
    rs = R * S
    T: dict[str, Identity] = {}

    def add(tag, names, indices, build, note=""):
        T[tag] = Identity(tag, indices, build, tuple(names), note=note)

    # 3.1
    add("3.1.1", "ijkl",
        lambda n: [(i, j, k, l) for i in _rng(1, n) for j in _rng(i, n) for k in _rng(j + 2, n) for l in _rng(k, n)],
        lambda V, i, j, k, l: (V.E(i, j) * V.E(k, l), V.E(k, l) * V.E(i, j)))
    add("3.1.2", "ijkl",
        lambda n: [(i, j, k, l) for i in _rng(1, n) for j in _rng(i, n) for k in _rng(j + 2, n) for l in _rng(k + 1, n)],
        lambda V, i, j, k, l: (V.E(i, j) * V.P(k, l), V.P(k, l) * V.E(i, j)))
    add("3.1.3", "ilj",
        lambda n: [(i, l, j) for i in _rng(1, n) for l in _rng(i + 1, n) for j in _rng(l, n)],
        lambda V, i, l, j: (V.E(i, j), V.E(i, l - 1) * V.E(l, j) - R ** 2 * (V.E(l, j) * V.E(i, l - 1))))
    add("3.1.4", "ilj",
        lambda n: [(i, l, j) for i in _rng(1, n) for l in _rng(i + 1, n) for j in _rng(l + 1, n)],
        lambda V, i, l, j: (V.P(i, j), V.E(i, l - 1) * V.P(l, j) - R ** 2 * (V.P(l, j) * V.E(i, l - 1))))
    # 3.2
    add("3.2.1", "ij",
        lambda n: [(i, j) for i in _rng(1, n) for j in _rng(i + 1, n)],
        lambda V, i, j: (V.e(i) * V.E(i, j), S ** 2 * (V.E(i, j) * V.e(i))))
    add("3.2.2", "ij",
        lambda n: [(i, j) for i in _rng(1, n) for j in _rng(i + 2, n)],
        lambda V, i, j: (V.e(i) * V.P(i, j), S ** 2 * (V.P(i, j) * V.e(i))))
    add("3.2.3", "ij",
        lambda n: [(i, j) for i in _rng(1, n) for j in _rng(i + 1, n - 1)],
        lambda V, i, j: (V.E(i, j) * V.e(j), S ** 2 * (V.e(j) * V.E(i, j))))
    add("3.2.4", "i",
        lambda n: [(i,) for i in _rng(1, n - 1)],
        lambda V, i: (V.P(i, V.n) * V.e(V.n), S ** 2 * (V.e(V.n) * V.P(i, V.n))))
    # 3.3
    add("3.3.1", "ilj",
        lambda n: [(i, l, j) for i in _rng(1, n) for l in _rng(i + 1, n) for j in _rng(l + 1, n)],
        lambda V, i, l, j: (V.e(l) * V.E(i, j), V.E(i, j) * V.e(l)))
    add("3.3.2", "ilj",
        lambda n: [(i, l, j) for i in _rng(1, n) for l in _rng(i + 1, n) for j in _rng(l + 1, n)],
        lambda V, i, l, j: (V.E(i, l) * V.E(l, j) - rs ** 2 * (V.E(l, j) * V.E(i, l)),
                            (S ** 2 - R ** 2) * (V.e(l) * V.E(i, j))))
    add("3.3.3", "ikjl",
        lambda n: [(i, k, l, j) for i in _rng(1, n) for k in _rng(i + 1, n) for l in _rng(k, n) for j in _rng(l + 1, n)],
        lambda V, i, k, l, j: (V.E(i, j) * V.E(k, l), V.E(k, l) * V.E(i, j)))
    add("3.3.4", "ilj",
        lambda n: [(i, l, j) for i in _rng(1, n) for l in _rng(i + 1, n) for j in _rng(l, n - 1)],
        lambda V, i, l, j: (V.E(i, j) * V.E(l, j), S ** 2 * (V.E(l, j) * V.E(i, j))))
    add("3.3.5", "ilj",
        lambda n: [(i, l, j) for i in _rng(1, n) for l in _rng(i, n) for j in _rng(l + 1, n)],
        lambda V, i, l, j: (V.E(i, l) * V.E(i, j), S ** 2 * (V.E(i, j) * V.E(i, l))))
    add("3.3.6", "ilj",
        lambda n: [(i, l, j) for i in _rng(1, n) for l in _rng(i + 1, n) for j in _rng(l + 2, n)],
        lambda V, i, l, j: (V.e(l) * V.P(i, j), V.P(i, j) * V.e(l)))
    add("3.3.7", "ilj",
        lambda n: [(i, l, j) for i in _rng(1, n) for l in _rng(i + 1, n) for j in _rng(l + 2, n)],
        lambda V, i, l, j: (V.E(i, l) * V.P(l, j) - rs ** 2 * (V.P(l, j) * V.E(i, l)),
                            (S ** 2 - R ** 2) * (V.e(l) * V.P(i, j))))
    add("3.3.8", "iklj",
        lambda n: [(i, k, l, j) for i in _rng(1, n) for k in _rng(i + 1, n) for l in _rng(k, n) for j in _rng(l + 2, n)],
        lambda V, i, k, l, j: (V.P(i, j) * V.E(k, l), V.E(k, l) * V.P(i, j)))
    add("3.3.9", "ilj",
        lambda n: [(i, l, j) for i in _rng(1, n) for l in _rng(i, n) for j in _rng(l + 2, n)],
        lambda V, i, l, j: (V.E(i, l) * V.P(i, j), S ** 2 * (V.P(i, j) * V.E(i, l))))
    # 3.4
    add("3.4.1", "ij",
        lambda n: [(i, j) for i in _rng(1, n) for j in _rng(i + 1, n - 1)],
        lambda V, i, j: (V.E(i, V.n) * V.E(j, V.n) - rs * (V.E(j, V.n) * V.E(i, V.n)),
                         V.E(j, V.n - 1) * V.P(i, V.n) - R ** 2 * (V.P(i, V.n) * V.E(j, V.n - 1))))
    add("3.4.2", "ijk",
        lambda n: [(i, j, k) for i in _rng(1, n) for j in _rng(i + 1, n) for k in _rng(j + 1, n - 2)],
        lambda V, i, j, k: (V.E(j, k) * V.P(i, k + 1) - R ** 2 * (V.P(i, k + 1) * V.E(j, k)),
                            V.P(i, k + 2) * V.E(j, k + 1) - S ** -2 * (V.E(j, k + 1) * V.P(i, k + 2))))
    add("3.4.3", "",
        lambda n: [()],
        lambda V: (V.E(V.n - 1, V.n) * V.P(V.n - 1, V.n), S ** 2 * (V.P(V.n - 1, V.n) * V.E(V.n - 1, V.n))))
    add("3.4.4", "ij",
        lambda n: [(i, j) for i in _rng(1, n) for j in _rng(i + 1, n - 1)],
        lambda V, i, j: (V.P(i, j) * V.e(V.n), rs ** 2 * (V.e(V.n) * V.P(i, j))))
    add("3.4.5", "i",
        lambda n: [(i,) for i in _rng(1, n - 2)],
        lambda V, i: (V.P(i, V.n) * V.E(V.n - 1, V.n), V.E(V.n - 1, V.n) * V.P(i, V.n)))
    add("3.4.6", "i",
        lambda n: [(i,) for i in _rng(1, n - 2)],
        lambda V, i: (V.P(i, V.n) * V.P(V.n - 1, V.n), S ** 2 * (V.P(V.n - 1, V.n) * V.P(i, V.n))))
    add("3.4.7", "i",
        lambda n: [(i,) for i in _rng(1, n - 2)],
        lambda V, i: (V.P(i, V.n - 1) * V.E(V.n - 1, V.n), S ** 2 * (V.E(V.n - 1, V.n) * V.P(i, V.n - 1))))
    add("3.4.8", "i",
        lambda n: [(i,) for i in _rng(1, n - 2)],
        lambda V, i: (V.P(i, V.n - 1) * V.P(V.n - 1, V.n), (R * S ** 2) ** 2 * (V.P(V.n - 1, V.n) * V.P(i, V.n - 1))))
    # 3.5
    add("3.5.1", "ij",
        lambda n: [(i, j) for i in _rng(1, n) for j in _rng(i + 1, n - 1)],
        lambda V, i, j: (V.P(i, V.n) * V.E(j, V.n), V.E(j, V.n) * V.P(i, V.n)))
    add("3.5.2", "ij",
        lambda n: [(i, j) for i in _rng(1, n) for j in _rng(i + 1, n - 1)],
        lambda V, i, j: (V.E(i, V.n) * V.P(j, V.n) - rs ** 2 * (V.P(j, V.n) * V.E(i, V.n)),
                         (S ** 2 - R ** 2) * (V.P(i, V.n) * V.E(j, V.n))))
    add("3.5.3", "ij",
        lambda n: [(i, j) for i in _rng(1, n) for j in _rng(i + 1, n)],
        lambda V, i, j: (V.E(i, V.n) * V.P(i, j), S ** 2 * (V.P(i, j) * V.E(i, V.n))))
    add("3.5.4", "ij",
        lambda n: [(i, j) for i in _rng(1, n) for j in _rng(i + 1, n - 1)],
        lambda V, i, j: (V.P(i, V.n) * V.P(j, V.n), S ** 2 * (V.P(j, V.n) * V.P(i, V.n))))
    add("3.5.5", "ijl",
        lambda n: [(i, j, l) for i in _rng(1, n) for j in _rng(i + 1, n) for l in _rng(j + 1, n)],
        lambda V, i, j, l: (V.P(i, l) * V.E(j, V.n), V.E(j, V.n) * V.P(i, l)))
    add("3.5.6", "ijl",
        lambda n: [(i, j, l) for i in _rng(1, n) for j in _rng(i + 1, n) for l in _rng(j + 1, n - 1)],
        lambda V, i, j, l: (V.P(i, l) * V.P(j, V.n), rs ** 2 * (V.P(j, V.n) * V.P(i, l))))
    # 3.6 (item 2 also covers the forward reference of 3.2)
    add("3.6.1", "ij",
        lambda n: [(i, j) for i in _rng(1, n) for j in _rng(i + 1, n) if i != j - 2],
        lambda V, i, j: (V.bullet(V.P(i, j), V.e(i + 1)), V.one() * 0))
    add("3.6.2", "ij",
        lambda n: [(i, j) for i in _rng(1, n) for j in _rng(i + 1, n - 1)],
        lambda V, i, j: (V.P(i, j) * V.e(j), R ** -2 * (V.e(j) * V.P(i, j))))
    add("3.6.3", "i",
        lambda n: [(i,) for i in _rng(1, n - 2)],
        lambda V, i: (V.bullet(V.P(i, i + 1), V.e(i + 2)), V.one() * 0))
    add("3.6.4", "ijl",
        lambda n: [(i, j, l) for i in _rng(1, n) for j in _rng(i + 1, n) for l in _rng(j + 1, n - 1)],
        lambda V, i, j, l: (V.P(i, j) * V.e(l), V.e(l) * V.P(i, j)))
    add("3.6.5", "ijl",
        lambda n: [(i, j, l) for i in _rng(1, n) for j in _rng(i + 1, n) for l in _rng(j + 1, n)],
        lambda V, i, j, l: (V.P(i, l) * V.P(i, j), R ** -2 * (V.P(i, j) * V.P(i, l))))
    add("3.6.6", "ijlk",
        lambda n: [(i, j, l, k) for i in _rng(1, n) for j in _rng(i + 1, n) for l in _rng(j + 1, n) for k in _rng(l + 1, n)],
        lambda V, i, j, l, k: (V.P(i, l) * V.P(j, k), rs ** 2 * (V.P(j, k) * V.P(i, l))))
    add("3.6.7", "ijl",
        lambda n: [(i, j, l) for i in _rng(1, n) for j in _rng(i + 1, n) for l in _rng(j + 1, n - 1)],
        lambda V, i, j, l: (V.P(i, l) * V.P(j, l), S ** 2 * (V.P(j, l) * V.P(i, l))))
    add("3.6.8", "i",
        lambda n: [(i,) for i in _rng(1, n - 1)],
        lambda V, i: (V.E(i, V.n - 1) * V.P(i, V.n) - rs ** 2 * (V.P(i, V.n) * V.E(i, V.n - 1)),
                      S * (S - R) * V.E(i, V.n) ** 2))
    # 3.7
    add("3.7.1", "ik",
        lambda n: [(i, k) for k in _rng(1, n - 2) for i in _rng(1, k)],
        lambda V, i, k: (V.E(i, k) * V.P(i, k + 1) - rs ** 2 * (V.P(i, k + 1) * V.E(i, k)),
                         S ** 2 * (V.P(i, k + 2) * V.E(i, k + 1)) - S ** -2 * (V.E(i, k + 1) * V.P(i, k + 2))))
    add("3.7.2", "j",
        lambda n: [(j,) for j in _rng(1, n - 2)],
        lambda V, j: (V.E(j, j + 1) * V.P(j, j + 1), (R * S ** 2) ** 2 * (V.P(j, j + 1) * V.E(j, j + 1))))
    add("3.7.3", "j",
        lambda n: [(j,) for j in _rng(2, n - 2)],
        lambda V, j: (V.P(j - 1, j) * V.P(j, j + 1), (R * S ** 2) ** 2 * (V.P(j, j + 1) * V.P(j - 1, j))))
    add("3.7.4", "ij",
        lambda n: [(i, j) for i in _rng(1, n) for j in _rng(i + 1, n - 2)],
        lambda V, i, j: (V.P(i, j) * V.P(j, j + 1), (R * S ** 2) ** 2 * (V.P(j, j + 1) * V.P(i, j))))
    add("3.7.5", "jk",
        lambda n: [(j, k) for j in _rng(1, n) for k in _rng(j + 1, n - 1)],
        lambda V, j, k: (V.E(j, k) * V.P(j, j + 1), (R * S ** 2) ** 2 * (V.P(j, j + 1) * V.E(j, k))))
    add("3.7.6", "ij",
        lambda n: [(i, j) for i in _rng(1, n) for j in _rng(i + 2, n - 1)],
        lambda V, i, j: (V.E(j - 1, j) * V.P(i, j), rs ** 2 * (V.P(i, j) * V.E(j - 1, j))))
    add("3.7.7", "iljk",
        lambda n: [(i, l, j, k) for i in _rng(1, n) for l in _rng(i + 1, n) for j in _rng(l + 1, n) for k in _rng(j, n - 1)],
        lambda V, i, l, j, k: (V.E(l, k) * V.P(i, j), rs ** 2 * (V.P(i, j) * V.E(l, k))))
    add("3.7.8", "ijk",
        lambda n: [(i, j, k) for i in _rng(1, n) for j in _rng(i + 1, n) for k in _rng(j, n - 1)],
        lambda V, i, j, k: (V.E(i, k) * V.P(i, j), (R * S ** 2) ** 2 * (V.P(i, j) * V.E(i, k))))
    return T


def _build_auxiliary() -> dict[str, Identity]:
    rs = R * S
    T: dict[str, Identity] = {}

    def add(tag, names, indices, build):
        T[tag] = Identity(tag, indices, build, tuple(names))

    add("A.1.i", "ij",
        lambda n: [(i, j) for i in _rng(1, n) for j in _rng(i + 4, n)],
        lambda V, i, j: (V.P(i, j) * V.e(i + 1), V.e(i + 1) * V.P(i, j)))
    add("A.1.ii", "i",
        lambda n: [(i,) for i in _rng(1, n - 3)],
        lambda V, i: (V.P(i, i + 3) * V.e(i + 1), V.e(i + 1) * V.P(i, i + 3)))
    add("A.1.iii", "i",
        lambda n: [(i,) for i in _rng(1, n - 2)],
        lambda V, i: (V.P(i, i + 1) * V.e(i + 1) - R ** -2 * (V.e(i + 1) * V.P(i, i + 1)), V.one() * 0))
    add("A.3", "i",
        lambda n: [(i,) for i in _rng(1, n - 3)],
        lambda V, i: (V.E(i + 1, i + 2) * V.P(i, i + 2), rs ** 2 * (V.P(i, i + 2) * V.E(i + 1, i + 2))))
    add("A.5.a", "i",
        lambda n: [(i,) for i in _rng(1, n - 2)],
        lambda V, i: (V.P(i, V.n) * V.P(i, V.n - 1), R ** -2 * (V.P(i, V.n - 1) * V.P(i, V.n))))
    add("A.5.b", "ij",
        lambda n: [(i, j) for i in _rng(1, n) for j in _rng(i + 1, n - 1)],
        lambda V, i, j: (V.P(i, V.n) * V.P(i, j), R ** -2 * (V.P(i, j) * V.P(i, V.n))))
    add("A.8", "i",
        lambda n: [(i,) for i in _rng(1, n - 1)],
        lambda V, i: (V.E(i, V.n - 1) * V.P(i, V.n) - rs ** 2 * (V.P(i, V.n) * V.E(i, V.n - 1)),
                      S * (S - R) * V.E(i, V.n) ** 2))
    return T


# power identities --------------------------------------------------------------


def _ab(m: int):
    return alpha_beta(m)


def _build_powers(m_max: int = 4) -> dict[str, Identity]:
    rs = R * S
    T: dict[str, Identity] = {}
    ms = lambda: _rng(1, m_max)

    def add(tag, names, indices, build):
        T[tag] = Identity(tag, indices, build, tuple(names) + ("m",))

    # E^m against e
    add("3.9.1", "ij",
        lambda n: [(i, j, m) for i in _rng(2, n) for j in _rng(i, n - 1) for m in ms()],
        lambda V, i, j, m: (V.e(i - 1) * V.E(i, j) ** m,
                            R ** (2 * m) * (V.E(i, j) ** m * V.e(i - 1)) + _q(m) * (V.E(i, j) ** (m - 1) * V.E(i - 1, j))))
    add("3.9.2", "ij",
        lambda n: [(i, j, m) for i in _rng(1, n) for j in _rng(i, n - 1) for m in ms()],
        lambda V, i, j, m: (V.E(i, j) ** m * V.e(j + 1),
                            R ** (2 * m) * (V.e(j + 1) * V.E(i, j) ** m) + _q(m) * (V.E(i, j + 1) * V.E(i, j) ** (m - 1))))

    def b393(V, m):
        a, b = _ab(m)
        n = V.n
        en = V.e(n)
        return (V.e(n - 1) * en ** m,
                a * (_pw(en, m - 2) * V.P(n - 1, n)) + R ** (m - 1) * b * (en ** (m - 1) * V.E(n - 1, n))
                + R ** (2 * m) * (en ** m * V.e(n - 1)))
    add("3.9.3", "", lambda n: [(m,) for m in ms()], b393)

    def b394(V, i, m):
        a, b = _ab(m)
        n = V.n
        return (V.E(i, n) ** m * V.e(n),
                rs ** m * (V.e(n) * V.E(i, n) ** m) + S ** (m - 1) * b * (V.P(i, n) * V.E(i, n) ** (m - 1)))
    add("3.9.4", "i", lambda n: [(i, m) for i in _rng(1, n - 1) for m in ms()], b394)

    def b395(V, i, m):
        a, b = _ab(m)
        n = V.n
        Ein = V.E(i, n)
        return (V.e(i - 1) * Ein ** m,
                R ** (m - 1) * b * (Ein ** (m - 1) * V.E(i - 1, n))
                + a * (_pw(Ein, m - 2) * V.E(i, n - 1) * V.P(i - 1, n))
                - R ** 2 * a * (_pw(Ein, m - 2) * V.P(i - 1, n) * V.E(i, n - 1))
                + R ** (2 * m) * (Ein ** m * V.e(i - 1)))
    add("3.9.5", "i", lambda n: [(i, m) for i in _rng(2, n - 1) for m in ms()], b395)

    def b396(V, m):
        n = V.n
        X = V.P(n - 1, n)
        return (V.e(n - 1) * X ** m,
                S ** (2 * m - 1) * (S - R) * _q(m) * (X ** (m - 1) * V.E(n - 1, n) ** 2) + rs ** (2 * m) * (X ** m * V.e(n - 1)))
    add("3.9.6", "", lambda n: [(m,) for m in ms()], b396)

    def b397(V, i, m):
        n = V.n
        X = V.P(i, n)
        return (X ** m * V.e(n - 1),
                S ** (2 * (1 - m)) * _q(m) * (X ** (m - 1) * V.P(i, n - 1)) + S ** (-2 * m) * (V.e(n - 1) * X ** m))
    add("3.9.7", "i", lambda n: [(i, m) for i in _rng(1, n - 2) for m in ms()], b397)

    def b398(V, i, m):
        X = V.P(i, V.n)
        return (V.e(i - 1) * X ** m, _q(m) * (X ** (m - 1) * V.P(i - 1, V.n)) + R ** (2 * m) * (X ** m * V.e(i - 1)))
    add("3.9.8", "i", lambda n: [(i, m) for i in _rng(2, n - 1) for m in ms()], b398)

    # E(i,j')^m against e
    add("3.10.1", "ij",
        lambda n: [(i, j, m) for i in _rng(2, n) for j in _rng(i + 1, n) for m in ms()],
        lambda V, i, j, m: (V.e(i - 1) * V.P(i, j) ** m,
                            R ** (2 * m) * (V.P(i, j) ** m * V.e(i - 1)) + _q(m) * (V.P(i, j) ** (m - 1) * V.P(i - 1, j))))

    def b3102(V, j, m):
        X = V.P(j - 1, j)
        return (V.e(j - 1) * X ** m,
                rs ** (2 * m) * (X ** m * V.e(j - 1))
                + S ** (2 * (m - 1)) * _q(m) * (X ** (m - 1) * (S ** 2 * (V.P(j - 1, j + 1) * V.E(j - 1, j))
                                                               - S ** -2 * (V.E(j - 1, j) * V.P(j - 1, j + 1)))))
    add("3.10.2", "j", lambda n: [(j, m) for j in _rng(2, n - 1) for m in ms()], b3102)
    add("3.10.3", "ij",
        lambda n: [(i, j, m) for i in _rng(1, n) for j in _rng(i + 2, n) for m in ms()],
        lambda V, i, j, m: (V.P(i, j) ** m * V.e(j - 1),
                            S ** (-2 * m) * (V.e(j - 1) * V.P(i, j) ** m)
                            + rs ** (-2 * (m - 1)) * _q(m) * (V.P(i, j - 1) * V.P(i, j) ** (m - 1))))
    add("3.10.4", "ij",
        lambda n: [(i, j, m) for i in _rng(1, n) for j in _rng(i, n - 2) for m in ms()],
        lambda V, i, j, m: (V.P(i, j + 1) ** m * V.E(i, j),
                            rs ** (-2 * m) * (V.E(i, j) * V.P(i, j + 1) ** m
                                              + _q(m) * (V.E(i, j + 1) * V.P(i, j + 2) * V.P(i, j + 1) ** (m - 1)))))
    add("3.10.5", "i",
        lambda n: [(i, m) for i in _rng(1, n - 1) for m in ms()],
        lambda V, i, m: (V.P(i, V.n) ** m * V.E(i, V.n - 1),
                         rs ** (-2 * m) * (V.E(i, V.n - 1) * V.P(i, V.n) ** m
                                           + S ** 3 * (R - S) * _q(m) * (V.E(i, V.n) ** 2 * V.P(i, V.n) ** (m - 1)))))
    add("3.10.6", "ij",
        lambda n: [(i, j, m) for i in _rng(1, n) for j in _rng(i, n - 2) for m in ms()],
        lambda V, i, j, m: (V.P(i, j + 2) * V.e(j + 1) ** m,
                            S ** (-2 * m) * (V.e(j + 1) ** m * V.P(i, j + 2))
                            + rs ** (2 * (1 - m)) * _q(m) * (V.e(j + 1) ** (m - 1) * V.P(i, j + 1))))

    # E(i,j)^m against f
    add("3.12.1", "ij",
        lambda n: [(i, j, m) for i in _rng(1, n) for j in _rng(i + 1, n - 1) for m in ms()],
        lambda V, i, j, m: (V.E(i, j) ** m * V.f(i),
                            V.f(i) * V.E(i, j) ** m - _q(m) * (V.E(i + 1, j) * V.E(i, j) ** (m - 1) * V.w(i))))
    add("3.12.2", "ij",
        lambda n: [(i, j, m) for i in _rng(1, n) for j in _rng(i + 1, n - 1) for m in ms()],
        lambda V, i, j, m: (V.E(i, j) ** m * V.f(j),
                            V.f(j) * V.E(i, j) ** m
                            + rs ** (-2 * (m - 1)) * _q(m) * (V.E(i, j - 1) * V.E(i, j) ** (m - 1) * V.wp(j))))

    def b3123(V, i, m):
        sy = V.system
        ri, si, cls = sy.r_i(i), sy.s_i(i), sy.index_class(i)
        return (V.e(i) ** m * V.f(i),
                V.f(i) * V.e(i) ** m
                + (ri - si).inverse() * rs_integer(m, cls)
                * (V.e(i) ** (m - 1) * (si ** (1 - m) * V.w(i) - ri ** (1 - m) * V.wp(i))))
    add("3.12.3", "i", lambda n: [(i, m) for i in _rng(1, n) for m in ms()], b3123)

    def b3124(V, i, m):
        a, b = _ab(m)
        n = V.n
        X = V.E(i, n)
        return (X ** m * V.f(i),
                V.f(i) * X ** m - R ** (m - 1) * b * (V.E(i + 1, n) * X ** (m - 1) * V.w(i))
                - a * (V.E(i + 1, n - 1) * V.P(i, n) * _pw(X, m - 2) * V.w(i))
                + R ** 2 * a * (V.P(i, n) * V.E(i + 1, n - 1) * _pw(X, m - 2) * V.w(i)))
    add("3.12.4", "i", lambda n: [(i, m) for i in _rng(1, n - 2) for m in ms()], b3124)

    def b3125(V, m):
        a, b = _ab(m)
        n = V.n
        X = V.E(n - 1, n)
        return (X ** m * V.f(n - 1),
                V.f(n - 1) * X ** m - R ** (m - 1) * b * (V.e(n) * X ** (m - 1) * V.w(n - 1))
                - a * (V.P(n - 1, n) * _pw(X, m - 2) * V.w(n - 1)))
    add("3.12.5", "", lambda n: [(m,) for m in ms()], b3125)

    def b3126(V, i, m):
        a, b = _ab(m)
        n = V.n
        X = V.E(i, n)
        return (X ** m * V.f(n),
                V.f(n) * X ** m + (R + S) * S ** (-m - 1) * b * (V.E(i, n - 1) * V.wp(n) * X ** (m - 1)))
    add("3.12.6", "i", lambda n: [(i, m) for i in _rng(1, n - 1) for m in ms()], b3126)

    # E(i,j')^m against f
    add("3.13.1", "i",
        lambda n: [(i, m) for i in _rng(1, n - 2) for m in ms()],
        lambda V, i, m: (V.P(i, V.n) ** m * V.f(i),
                         V.f(i) * V.P(i, V.n) ** m - _q(m) * (V.P(i + 1, V.n) * V.P(i, V.n) ** (m - 1) * V.w(i))))
    add("3.13.2", "",
        lambda n: [(m,) for m in ms()],
        lambda V, m: (V.P(V.n - 1, V.n) ** m * V.f(V.n - 1),
                      V.f(V.n - 1) * V.P(V.n - 1, V.n) ** m
                      + (R - S) * S ** (2 * m - 1) * _q(m) * (V.e(V.n) ** 2 * V.P(V.n - 1, V.n) ** (m - 1) * V.w(V.n - 1))))

    def b3133(V, i, m):
        _, b2m = _ab(2 * m)
        n = V.n
        X = V.P(i, n)
        return (X ** m * V.f(n),
                V.f(n) * X ** m + rs ** (-2 * m + 1) * (R + S) * b2m * (V.E(i, n) * X ** (m - 1) * V.wp(n)))
    add("3.13.3", "i", lambda n: [(i, m) for i in _rng(1, n - 1) for m in ms()], b3133)
    add("3.13.4", "ij",
        lambda n: [(i, j, m) for i in _rng(1, n) for j in _rng(i + 2, n) for m in ms()],
        lambda V, i, j, m: (V.P(i, j) ** m * V.f(i),
                            V.f(i) * V.P(i, j) ** m - _q(m) * (V.P(i + 1, j) * V.P(i, j) ** (m - 1) * V.w(i))))
    add("3.13.5", "j",
        lambda n: [(j, m) for j in _rng(2, n - 1) for m in ms()],
        lambda V, j, m: (V.P(j - 1, j) ** m * V.f(j - 1),
                         V.f(j - 1) * V.P(j - 1, j) ** m
                         + S ** (2 * (m - 1)) * _q(m)
                         * ((S ** -2 * (V.e(j) * V.P(j, j + 1)) - S ** 2 * (V.P(j, j + 1) * V.e(j)))
                            * V.P(j - 1, j) ** (m - 1) * V.w(j - 1))))
    add("3.13.6", "ij",
        lambda n: [(i, j, m) for i in _rng(1, n) for j in _rng(i + 1, n - 1) for m in ms()],
        lambda V, i, j, m: (V.P(i, j) ** m * V.f(j),
                            V.f(j) * V.P(i, j) ** m + S ** -2 * _q(m) * (V.P(i, j + 1) * V.P(i, j) ** (m - 1) * V.wp(j))))
    return T


STRAIGHTENING: dict[str, Identity] = _build_table()
AUXILIARY: dict[str, Identity] = _build_auxiliary()
# the forward-referenced item is kept once, under its later tag
ALIASES = {"3.2.5": "3.6.2"}


def powers(m_max: int = 4) -> dict[str, Identity]:
    return _build_powers(m_max)


def _build_corrected(m_max: int = 4) -> dict[str, Identity]:
    """Amended forms of power identities whose printed coefficients do not reduce to zero."""
    rs = R * S
    ms = lambda: _rng(1, m_max)
    T: dict[str, Identity] = {}

    def add(tag, names, indices, build, note):
        T[tag] = Identity(tag, indices, build, tuple(names) + ("m",), note=note)

    add("3.10.5", "i",
        lambda n: [(i, m) for i in _rng(1, n - 1) for m in ms()],
        lambda V, i, m: (V.P(i, V.n) ** m * V.E(i, V.n - 1),
                         rs ** (-2 * m) * (V.E(i, V.n - 1) * V.P(i, V.n) ** m
                                           + S ** (3 - 2 * m) * (R - S) * _q(m)
                                           * (V.E(i, V.n) ** 2 * V.P(i, V.n) ** (m - 1)))),
        "s^3 replaced by s^(3-2m)")
    add("3.12.2", "ij",
        lambda n: [(i, j, m) for i in _rng(1, n) for j in _rng(i + 1, n - 1) for m in ms()],
        lambda V, i, j, m: (V.E(i, j) ** m * V.f(j),
                            V.f(j) * V.E(i, j) ** m
                            + rs ** (-2 * (m - 1)) * S ** -2 * _q(m)
                            * (V.E(i, j - 1) * V.E(i, j) ** (m - 1) * V.wp(j))),
        "extra factor s^-2")

    def b3133(V, i, m):
        _, b2m = _ab(2 * m)
        X = V.P(i, V.n)
        return (X ** m * V.f(V.n),
                V.f(V.n) * X ** m + rs ** (-2 * m + 1) * b2m * (V.E(i, V.n) * X ** (m - 1) * V.wp(V.n)))
    add("3.13.3", "i", lambda n: [(i, m) for i in _rng(1, n - 1) for m in ms()], b3133,
        "factor (r+s) removed")
    return T


def corrected(m_max: int = 4) -> dict[str, Identity]:
    return _build_corrected(m_max)


def lookup(tag: str, m_max: int = 4) -> Identity:
    tag = ALIASES.get(tag, tag)
    for table in (STRAIGHTENING, AUXILIARY):
        if tag in table:
            return table[tag]
    table = powers(m_max)
    if tag in table:
        return table[tag]
    raise KeyError(tag)


def all_tags() -> list[str]:
    return list(STRAIGHTENING) + list(AUXILIARY) + list(powers(1)) + ["3.8.1", "3.8.2"]


def instantiate(ident: Identity, alg: PBWAlgebra, idx: tuple) -> tuple[Elt, Elt]:
    return ident.build(Vectors(alg), *idx)


def instantiate_free(ident: Identity, n: int, idx: tuple, expand: bool = False,
                     cartan: str = "B") -> tuple[Element, Element]:
    """Both sides as free-algebra elements: root letters, or generator words when ``expand``."""
    return ident.build(LetterVectors(root_system(cartan, n), expand), *idx)


def iter_instances(tags: Iterable[str], n: int, m_max: int = 4) -> Iterator[tuple[Identity, tuple]]:
    for tag in tags:
        ident = lookup(tag, m_max)
        for idx in ident.instances(n):
            yield ident, idx
