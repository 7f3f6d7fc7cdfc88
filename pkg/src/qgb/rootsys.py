"""Positive roots of type B_n (and A_m for the sl-type checks) in the convex
order used for PBW monomials, together with the two-parameter pairing
<w_i', w_j> and the bracketing that defines each root vector.

Root vectors are indexed by pairs (i, k) with i <= k <= 2n - i.  For k <= n
the pair denotes E(i, k) = alpha_i + ... + alpha_k; for k > n it denotes the
primed vector E(i, j') with j = 2n - k + 1, whose root is eps_i + eps_j.
Lexicographic order on (i, k) is the convex order.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Sequence

from .coeff import R, S, RationalFunction

Vec = tuple[int, ...]


class RootSystemError(ValueError):
    pass


@dataclass(frozen=True)
class Root:
    """A positive root together with its position in the convex order."""

    index: tuple[int, int]
    degree: Vec
    label: str

    @property
    def height(self) -> int:
        return sum(self.degree)

    def __str__(self) -> str:
        return self.label


@dataclass(frozen=True)
class Bracket:
    """E_root = E_left E_right - twist * E_right E_left."""

    root: int
    left: int
    right: int
    twist: RationalFunction


@dataclass(frozen=True)
class RootSystem:
    """Two-parameter root datum.  ``cartan`` is "B" (rank n) or "A" (sl_{n+1}, rank n)."""

    cartan: str
    n: int

    def __post_init__(self):
        if self.cartan not in ("A", "B"):
            raise RootSystemError(f"unsupported Cartan type {self.cartan!r}")
        if self.cartan == "B" and self.n < 2:
            raise RootSystemError("type B needs n >= 2")
        if self.cartan == "A" and self.n < 1:
            raise RootSystemError("type A needs rank >= 1")

    @property
    def rank(self) -> int:
        return self.n

    # structure constants ---------------------------------------------------
    @cached_property
    def pairing_matrix(self) -> tuple[tuple[RationalFunction, ...], ...]:
        """Entry [i][j] is <w_{i+1}', w_{j+1}>."""
        n = self.n
        rows = []
        for i in range(1, n + 1):
            row = []
            for j in range(1, n + 1):
                row.append(structural_constant(self, i, j))
            rows.append(tuple(row))
        return tuple(rows)

    def r_i(self, i: int) -> RationalFunction:
        return R ** 2 if (self.cartan == "B" and i < self.n) else R

    def s_i(self, i: int) -> RationalFunction:
        return S ** 2 if (self.cartan == "B" and i < self.n) else S

    def index_class(self, i: int) -> str:
        return "long" if (self.cartan == "B" and i < self.n) else "short"

    @cached_property
    def cartan_matrix(self) -> tuple[tuple[int, ...], ...]:
        n = self.n
        a = [[0] * n for _ in range(n)]
        for i in range(n):
            a[i][i] = 2
            if i + 1 < n:
                a[i][i + 1] = -1
                a[i + 1][i] = -1
        if self.cartan == "B" and n >= 2:
            a[n - 1][n - 2] = -2
        return tuple(tuple(r) for r in a)

    # roots -----------------------------------------------------------------
    @cached_property
    def roots(self) -> tuple[Root, ...]:
        n = self.n
        out = []
        if self.cartan == "B":
            for i in range(1, n + 1):
                for k in range(i, 2 * n - i + 1):
                    deg = [0] * n
                    if k <= n:
                        for t in range(i, k + 1):
                            deg[t - 1] = 1
                        label = f"a({i},{k + 1})" if k < n else f"eps({i})"
                    else:
                        j = 2 * n - k + 1
                        for t in range(i, n + 1):
                            deg[t - 1] = 1 if t < j else 2
                        label = f"b({i},{j})"
                    out.append(Root((i, k), tuple(deg), label))
        else:
            for i in range(1, n + 1):
                for k in range(i, n + 1):
                    deg = [0] * n
                    for t in range(i, k + 1):
                        deg[t - 1] = 1
                    out.append(Root((i, k), tuple(deg), f"a({i},{k + 1})"))
        return tuple(out)

    @cached_property
    def position(self) -> dict[tuple[int, int], int]:
        return {root.index: p for p, root in enumerate(self.roots)}

    @cached_property
    def by_degree(self) -> dict[Vec, int]:
        return {root.degree: p for p, root in enumerate(self.roots)}

    def simple(self, i: int) -> int:
        return self.position[(i, i)]

    def index_of(self, i: int, j: int, primed: bool = False) -> int:
        """Position of E(i, j) or E(i, j') in the convex order."""
        k = 2 * self.n - j + 1 if primed else j
        try:
            return self.position[(i, k)]
        except KeyError:
            name = f"E({i},{j}{chr(39) if primed else ''})"
            raise RootSystemError(f"{name} is not a root vector of {self.cartan}{self.n}") from None

    def name_of(self, p: int, family: str = "E") -> str:
        i, k = self.roots[p].index
        if k == i:
            return f"{family.lower()}{i}"
        if self.cartan == "B" and k > self.n:
            return f"{family}({i},{2 * self.n - k + 1}')"
        return f"{family}({i},{k})"

    @cached_property
    def brackets(self) -> tuple[Bracket | None, ...]:
        """Defining bracket of every non-simple root vector."""
        n = self.n
        out: list[Bracket | None] = []
        for p, root in enumerate(self.roots):
            i, k = root.index
            if k == i:
                out.append(None)
                continue
            if self.cartan == "A" or k <= n:
                left, right = self.simple(i), self.position[(i + 1, k)]
            elif k == n + 1:
                left, right = self.position[(i, n)], self.simple(n)
            else:
                left, right = self.position[(i, k - 1)], self.simple(2 * n - k + 1)
            twist = group_pairing(self, self.roots[left].degree, self.roots[right].degree).inverse()
            out.append(Bracket(p, left, right, twist))
        return tuple(out)

    def degree_of(self, p: int) -> Vec:
        return self.roots[p].degree

    def height_of(self, p: int) -> int:
        return self.roots[p].height


@lru_cache(maxsize=None)
def root_system(cartan: str, n: int) -> RootSystem:
    return RootSystem(cartan, n)


def positive_roots(n: int) -> list[Root]:
    """Type B_n positive roots in convex order."""
    if n < 2:
        raise RootSystemError("positive_roots needs n >= 2")
    return list(root_system("B", n).roots)


def structural_constant(system: RootSystem | int, i: int, j: int) -> RationalFunction:
    """<w_i', w_j>."""
    if isinstance(system, int):
        system = root_system("B", system)
    n = system.n
    if not (1 <= i <= n and 1 <= j <= n):
        raise RootSystemError(f"index out of range: ({i},{j}) for rank {n}")
    if system.cartan == "B":
        if i == j:
            return R * S.inverse() if i == n else R ** 2 * S ** -2
        if j == i + 1:
            return R ** -2
        if i == j + 1:
            return S ** 2
        return RationalFunction.one()
    if i == j:
        return R * S.inverse()
    if j == i + 1:
        return R.inverse()
    if i == j + 1:
        return S
    return RationalFunction.one()


def group_pairing(system: RootSystem, mu: Sequence[int], nu: Sequence[int]) -> RationalFunction:
    """<w'_mu, w_nu> = prod <w_i', w_j>^(mu_i nu_j)."""
    return _group_pairing(system.cartan, system.n, tuple(mu), tuple(nu))


@lru_cache(maxsize=None)
def _group_pairing(cartan: str, n: int, mu: Vec, nu: Vec) -> RationalFunction:
    system = root_system(cartan, n)
    out = RationalFunction.one()
    for i, a in enumerate(mu):
        if not a:
            continue
        for j, b in enumerate(nu):
            if b:
                out = out * system.pairing_matrix[i][j] ** (a * b)
    return out


def two_rho(n: int) -> tuple[int, ...]:
    """Sum of positive roots in simple-root coordinates."""
    if n < 2:
        raise RootSystemError("two_rho needs n >= 2")
    return tuple(j * (2 * n - j) for j in range(1, n + 1))


def kostant_partitions(system: RootSystem, mu: Sequence[int], letters: Sequence[int] | None = None) -> list[tuple[int, ...]]:
    """Nondecreasing tuples of root positions whose degrees sum to mu."""
    letters = sorted(range(len(system.roots)) if letters is None else letters)
    degs = [system.roots[p].degree for p in letters]
    out: list[tuple[int, ...]] = []

    def rec(start: int, remaining: list[int], acc: list[int]):
        if not any(remaining):
            out.append(tuple(acc))
            return
        for t in range(start, len(letters)):
            d = degs[t]
            if all(x <= y for x, y in zip(d, remaining)):
                nxt = [y - x for x, y in zip(d, remaining)]
                acc.append(letters[t])
                rec(t, nxt, acc)
                acc.pop()

    rec(0, list(mu), [])
    return out
