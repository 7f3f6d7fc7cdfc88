"""Rule sets, normal forms, identity certification, overlap checking and
a row-reduction ideal-membership oracle.

Two reduction engines share one rule table.  The structured engine in
``pbw`` (memoized straightening of sorted words) is the default; the
naive engine here rewrites the leftmost redex one step at a time and can
record a replayable trace.  Both use the same oriented rules.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

from .catalog import (STRAIGHTENING, generator_expansion, instantiate_free, letter_position, powers,
                      root_letter)
from .coeff import RationalFunction
from .freealg import Element, Letter, letter_degree
from .pbw import Budget, BudgetExceeded, Elt, PBWAlgebra, _add, algebra
from .rootsys import RootSystem, group_pairing, root_system

DEFAULT_BUDGET = 10 ** 6


def default_budget() -> int:
    env = os.environ.get("QGB_BUDGET")
    if env:
        try:
            return int(env)
        except ValueError:
            raise ValueError(f"QGB_BUDGET must be an integer, got {env!r}") from None
    return DEFAULT_BUDGET


class ReductionError(RuntimeError):
    pass


class BudgetError(ReductionError):
    """Step budget exhausted; carries the trace prefix."""

    def __init__(self, message: str, trace: "ReductionTrace | None" = None):
        super().__init__(message)
        self.trace = trace


# monomial order ----------------------------------------------------------------


def letter_rank(system: RootSystem, letter: Letter, mode: str = "pbw") -> tuple:
    """F letters lowest (higher convex position ranks lower), then w, then w', then E.

    In generator mode the torus letters rank above E, so they drift right.
    """
    if letter.kind == "F":
        return (0, -letter_position(system, letter))
    if letter.kind == "E":
        return (3, letter_position(system, letter))
    base = 1 if mode == "pbw" else 4
    return (base if letter.kind == "w" else base + 1, letter.i, letter.power < 0)


def word_key(system: RootSystem, word: Sequence[Letter], mode: str = "pbw") -> tuple:
    weight = 0
    for letter in word:
        if not letter.is_torus:
            weight += sum(abs(d) for d in letter_degree(letter, system.n))
    return (weight, tuple(letter_rank(system, a, mode) for a in word))


# conversions between free words and normal-ordered PBW elements ----------------


def torus_letters(n: int, t: Sequence[int]) -> list[Letter]:
    out: list[Letter] = []
    for j in range(n):
        k = t[j]
        out += [Letter("w", j + 1, 0, False, 1 if k > 0 else -1)] * abs(k)
    for j in range(n):
        k = t[n + j]
        out += [Letter("W", j + 1, 0, False, 1 if k > 0 else -1)] * abs(k)
    return out


def key_word(system: RootSystem, key) -> tuple[Letter, ...]:
    fw, t, ew = key
    return tuple([root_letter(system, p, "F") for p in fw] + torus_letters(system.n, t)
                 + [root_letter(system, p) for p in ew])


def from_elt(x: Elt | dict, system: RootSystem | None = None) -> Element:
    d = x.d if isinstance(x, Elt) else x
    if system is None:
        system = x.alg.system
    out = Element()
    items = [(key_word(system, k), c) for k, c in d.items()]
    items.sort(key=lambda wc: word_key(system, wc[0]))
    for word, c in items:
        out._accumulate(word, c)
    return out


def letter_elt(alg: PBWAlgebra, letter: Letter) -> dict:
    if letter.kind == "E":
        return alg.e_root(letter_position(alg.system, letter))
    if letter.kind == "F":
        return alg.f_root(letter_position(alg.system, letter))
    if letter.kind == "w":
        return alg.w(letter.i, letter.power)
    return alg.wp(letter.i, letter.power)


def to_elt(x: Element, alg: PBWAlgebra) -> Elt:
    """Multiply out every word of ``x`` in ``alg``."""
    out: dict = {}
    for word, c in x.terms.items():
        cc = alg.c(c) if isinstance(c, RationalFunction) else c
        acc = alg.scalar(cc)
        for letter in word:
            acc = alg.mul(acc, letter_elt(alg, letter))
            if not acc:
                break
        for k, v in acc.items():
            _add(out, k, v)
    return Elt(alg, out)


# rules --------------------------------------------------------------------------


@dataclass(frozen=True)
class RewriteRule:
    lhs: tuple[Letter, ...]
    rhs: Element
    source: str

    def __str__(self) -> str:
        return f"{self.source}: {' '.join(map(str, self.lhs))} -> {self.rhs}"


@dataclass
class ReductionTrace:
    steps: list[tuple[tuple[Letter, ...], int, str]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.steps)

    def lines(self) -> list[str]:
        return [f"{' '.join(map(str, w)) or '1'} @{pos}: {src}" for w, pos, src in self.steps]


class RuleSet:
    """Oriented rules indexed by left-hand side.

    ``mode`` is "generator" or "pbw".  In restricted mode (``ell`` set),
    runs of ell equal root letters vanish and torus letters satisfy w^ell = 1.
    """

    def __init__(self, system: RootSystem, mode: str, rules: Iterable[RewriteRule],
                 alg: PBWAlgebra | None = None, ell: int | None = None):
        self.system = system
        self.n = system.n
        self.mode = mode
        self.alg = alg
        self.ell = ell
        self.rules: dict[tuple[Letter, ...], RewriteRule] = {}
        for rule in rules:
            if rule.lhs in self.rules:
                raise ValueError(f"duplicate rule for {rule.lhs}")
            self.rules[rule.lhs] = rule
        self.lengths = sorted({len(k) for k in self.rules})

    def __len__(self) -> int:
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules.values())

    def without(self, *sources: str) -> "RuleSet":
        """Copy with every rule whose source is listed removed."""
        kept = [r for r in self.rules.values() if r.source not in sources]
        return RuleSet(self.system, self.mode, kept, self.alg, self.ell)

    def by_source(self, source: str) -> list[RewriteRule]:
        return [r for r in self.rules.values() if r.source == source]

    def find(self, word: Sequence[Letter]) -> tuple[int, RewriteRule | None, int]:
        """Leftmost redex: (position, rule or None for a vanishing run, length)."""
        ell = self.ell
        for pos in range(len(word)):
            for k in self.lengths:
                if pos + k <= len(word):
                    rule = self.rules.get(tuple(word[pos:pos + k]))
                    if rule is not None:
                        return pos, rule, k
            if ell is not None and pos + ell <= len(word):
                a = word[pos]
                if all(b == a for b in word[pos:pos + ell]):
                    return pos, None, ell
        return -1, None, 0

    def check_orientation(self) -> list[RewriteRule]:
        """Rules whose right side is not strictly below the left side."""
        bad = []
        for rule in self.rules.values():
            top = word_key(self.system, rule.lhs, self.mode)
            if any(word_key(self.system, w, self.mode) >= top for w, _ in rule.rhs):
                bad.append(rule)
            g = rule.rhs.grade(self.n)
            lg = Element.word(*rule.lhs).grade(self.n)
            if rule.rhs and g != lg:
                bad.append(rule)
        return bad

    def export(self) -> str:
        return "\n".join(str(r) for r in sorted(self.rules.values(), key=lambda r: word_key(self.system, r.lhs, self.mode)))


def _run_value(letter: Letter):
    """What a run of ell copies of ``letter`` reduces to: 0 for root letters, 1 for torus letters."""
    return 1 if letter.is_torus else 0


# naive reduction -------------------------------------------------------------------


def rewrite_normal_form(x: Element, rules: RuleSet, *, trace: bool = False,
                        budget: int | None = None) -> tuple[Element, ReductionTrace | None]:
    limit = default_budget() if budget is None else budget
    tr = ReductionTrace() if trace else None
    work: dict[tuple[Letter, ...], object] = dict(x.terms)
    done = Element()
    steps = 0
    system, mode = rules.system, rules.mode
    while work:
        word = max(work, key=lambda w: word_key(system, w, mode))
        c = work.pop(word)
        if not c:
            continue
        pos, rule, k = rules.find(word)
        if pos < 0:
            done._accumulate(word, c)
            continue
        steps += 1
        if steps > limit:
            raise BudgetError(f"reduction exceeded {limit} steps", tr)
        prefix, suffix = word[:pos], word[pos + k:]
        if tr is not None:
            tr.steps.append((word, pos, rule.source if rule else ("restricted" if not word[pos].is_torus else "torus order")))
        if rule is None:
            if _run_value(word[pos]):
                _acc(work, prefix + suffix, c)
            continue
        for w, d in rule.rhs.terms.items():
            _acc(work, prefix + w + suffix, c * d)
    return _sorted(done, system, mode), tr


def _sorted(x: Element, system: RootSystem, mode: str) -> Element:
    out = Element()
    for w in sorted(x.terms, key=lambda w: word_key(system, w, mode)):
        out._accumulate(w, x.terms[w])
    return out


def _acc(work: dict, word, c) -> None:
    old = work.get(word)
    new = c if old is None else old + c
    if new:
        work[word] = new
    else:
        work.pop(word, None)


def replay(x: Element, tr: ReductionTrace, rules: RuleSet) -> Element:
    """Apply a recorded trace step by step."""
    work = dict(x.terms)
    for word, pos, _src in tr.steps:
        c = work.pop(word)
        p, rule, k = rules.find(word)
        if p != pos:
            raise ReductionError(f"trace step does not match leftmost redex in {word}")
        if rule is None:
            if _run_value(word[pos]):
                _acc(work, word[:pos] + word[pos + k:], c)
            continue
        for w, d in rule.rhs.terms.items():
            _acc(work, word[:pos] + w + word[pos + k:], c * d)
    return Element(work)


def normal_form(x: Element, rules: RuleSet, *, trace: bool = False, budget: int | None = None):
    """Normal form of ``x``; returns (Element, trace) when ``trace`` is set.

    Without a trace the structured engine of the rule set's algebra is used
    when one is attached.
    """
    if trace or rules.alg is None:
        out, tr = rewrite_normal_form(x, rules, trace=trace, budget=budget)
        return (out, tr) if trace else out
    alg = rules.alg
    limit = default_budget() if budget is None else budget
    alg.set_budget(Budget(limit))
    try:
        res = from_elt(to_elt(x, alg))
    except BudgetExceeded as exc:
        raise BudgetError(str(exc)) from None
    finally:
        alg.set_budget(None)
    return res


# certification -------------------------------------------------------------------


@dataclass
class ZeroCertificate:
    steps: int = 0
    status: str = "PASS"


@dataclass
class Counterexample:
    residue: Element
    status: str = "FAIL"


@dataclass
class Inconclusive:
    reason: str
    status: str = "INCONCLUSIVE"


def certify_identity(lhs, rhs, rules: RuleSet | None = None, budget: int | None = None):
    """ZeroCertificate iff lhs - rhs has normal form 0."""
    if isinstance(lhs, Elt):
        alg = lhs.alg
        limit = default_budget() if budget is None else budget
        alg.set_budget(Budget(limit))
        try:
            diff = lhs - rhs
        except BudgetExceeded as exc:
            return Inconclusive(str(exc))
        finally:
            alg.set_budget(None)
        return ZeroCertificate() if not diff else Counterexample(from_elt(diff))
    if rules is None:
        raise ValueError("free-algebra input needs a rule set")
    try:
        res = normal_form(lhs - rhs, rules, budget=budget)
    except BudgetError as exc:
        return Inconclusive(str(exc))
    return ZeroCertificate() if not res else Counterexample(res)


# rule sets -----------------------------------------------------------------------


def _elt_to_rhs(alg: PBWAlgebra, d: dict) -> Element:
    return from_elt(d, alg.system)


def _solved_pairs(system: RootSystem, tables: Sequence[dict]) -> dict[tuple[Letter, Letter], tuple[str, Element]]:
    """Pairs of out-of-order letters solved by a single identity instance, by lowest tag."""
    found: dict = {}
    n = system.n
    for table in tables:
        for tag in sorted(table, key=_tag_key):
            ident = table[tag]
            for idx in ident.instances(n):
                if idx and ident.names and ident.names[-1] == "m" and idx[-1] != 1:
                    continue
                lhs, rhs = instantiate_free(ident, n, idx)
                diff = lhs - rhs
                bad = [(w, c) for w, c in diff if _out_of_order(system, w)]
                if len(bad) != 1 or len(bad[0][0]) != 2:
                    continue
                word, c = bad[0]
                if word in found:
                    continue
                solved = Element()
                for w, d in diff:
                    if w != word:
                        solved._accumulate(w, -d / c)
                found[word] = (tag, solved)
    return found


def _tag_key(tag: str):
    return tuple(int(p) if p.isdigit() else p for p in tag.split("."))


def _out_of_order(system: RootSystem, word: Sequence[Letter]) -> bool:
    ranks = [letter_rank(system, a) for a in word]
    return any(a > b for a, b in zip(ranks, ranks[1:]))


def _pbw_rule_list(alg: PBWAlgebra, tagged: dict, with_f: bool = True) -> list[RewriteRule]:
    system = alg.system
    N = len(system.roots)
    out: list[RewriteRule] = []
    for b in range(N):
        for a in range(b):
            lhs = (root_letter(system, b), root_letter(system, a))
            rhs = _elt_to_rhs(alg, {((), alg.T0, w): c for w, c in alg.E.words((b,), (a,)).items()})
            tag = _agreeing_tag(tagged, lhs, rhs, alg)
            out.append(RewriteRule(lhs, rhs, tag))
    if not with_f:
        return out
    for b in range(N):
        for a in range(b):
            lhs = (root_letter(system, a, "F"), root_letter(system, b, "F"))
            rhs = _elt_to_rhs(alg, {(w, alg.T0, ()): c for w, c in alg.F.words((a,), (b,)).items()})
            src = _agreeing_tag(tagged, (root_letter(system, b), root_letter(system, a)), None)
            out.append(RewriteRule(lhs, rhs, "tau " + src if src != "derived" else "derived"))
    for a in range(N):
        for b in range(N):
            lhs = (root_letter(system, a), root_letter(system, b, "F"))
            rhs = _elt_to_rhs(alg, alg.mul(alg.e_root(a), alg.f_root(b)))
            tag = _agreeing_tag(tagged, lhs, rhs, alg)
            if tag == "derived" and system.brackets[a] is None and system.brackets[b] is None:
                tag = "B4"
            out.append(RewriteRule(lhs, rhs, tag))
    n = system.n
    torus = [Letter(k, i, 0, False, p) for k in ("w", "W") for i in range(1, n + 1) for p in (1, -1)]
    for a in range(N):
        for t in torus:
            lhs = (root_letter(system, a), t)
            rhs = _elt_to_rhs(alg, alg.mul(alg.e_root(a), _torus_elt(alg, t)))
            out.append(RewriteRule(lhs, rhs, "B2" if t.kind == "w" else "B3"))
            lhs = (t, root_letter(system, a, "F"))
            rhs = _elt_to_rhs(alg, alg.mul(_torus_elt(alg, t), alg.f_root(a)))
            out.append(RewriteRule(lhs, rhs, "B2" if t.kind == "w" else "B3"))
    out += _torus_rules(system, torus, alg.ell)
    return out


def _torus_elt(alg: PBWAlgebra, t: Letter) -> dict:
    return alg.w(t.i, t.power) if t.kind == "w" else alg.wp(t.i, t.power)


def _torus_rules(system: RootSystem, torus: list[Letter], ell: int | None, mode: str = "pbw") -> list[RewriteRule]:
    out = []
    for x in torus:
        for y in torus:
            if x.kind == y.kind and x.i == y.i and x.power == -y.power:
                out.append(RewriteRule((x, y), Element.scalar(1), "B1"))
            elif letter_rank(system, x, mode) > letter_rank(system, y, mode):
                out.append(RewriteRule((x, y), Element.word(y, x), "B1"))
    if ell is not None:
        for x in torus:
            if x.power < 0:
                out.append(RewriteRule((x,), Element.word(*[x.inverse()] * (ell - 1)), "B1"))
    return out


def _agreeing_tag(tagged: dict, lhs, rhs, alg: PBWAlgebra | None = None) -> str:
    hit = tagged.get(lhs)
    if hit is None:
        return "derived"
    tag, solved = hit
    if rhs is not None and alg is not None and (not alg.generic or alg.params is not None):
        solved = Element({w: alg.c(c) for w, c in solved})
    if rhs is None or _same(solved, rhs):
        return tag
    return "derived"


def _same(x: Element, y: Element) -> bool:
    return not (x - y)


@lru_cache(maxsize=None)
def straightening_rules(n: int, ell: int | None = None, y: int | None = None, z: int | None = None,
                        restricted: bool = False, cartan: str = "B") -> RuleSet:
    """PBW-level rule set; each rule is tagged with the identity it instantiates, if any."""
    alg = algebra(cartan, n, ell, y, z, restricted)
    system = alg.system
    if cartan == "B":
        tagged = _solved_pairs(system, [STRAIGHTENING, powers(1)])
    else:
        tagged = {}
    rules = _pbw_rule_list(alg, tagged)
    return RuleSet(system, "pbw", rules, alg=alg, ell=alg.ell)


def serre_relations(system: RootSystem) -> list[tuple[str, Element]]:
    """Relations of U+: commuting pairs and the twisted adjoint Serre relations."""
    n = system.n
    rels = []
    e = [None] + [Element.word(Letter("E", i, i)) for i in range(1, n + 1)]
    A = system.cartan_matrix
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i == j:
                continue
            k = 1 - A[i - 1][j - 1]
            x = e[j]
            deg = [0] * n
            deg[j - 1] = 1
            for _ in range(k):
                q = group_pairing(system, tuple(deg), tuple(1 if t == i - 1 else 0 for t in range(n)))
                x = e[i] * x - (x * e[i]) * q
                deg[i - 1] += 1
            if k == 1 and i > j:
                continue
            rels.append((f"B5({i},{j})", x))
    return rels


def _orient(system: RootSystem, rel: Element, source: str) -> RewriteRule:
    top = max((w for w, _ in rel), key=lambda w: word_key(system, w, "generator"))
    c = rel.terms[top]
    rhs = Element()
    for w, d in rel:
        if w != top:
            rhs._accumulate(w, -d / c)
    return RewriteRule(top, rhs, source)


def _tau_element(x: Element) -> Element:
    out = Element()
    for w, c in x:
        nw = []
        for a in reversed(w):
            if a.kind == "E":
                nw.append(Letter("F", a.i, a.j, a.primed))
            elif a.kind == "F":
                nw.append(Letter("E", a.i, a.j, a.primed))
            elif a.kind == "w":
                nw.append(Letter("W", a.i, 0, False, a.power))
            else:
                nw.append(Letter("w", a.i, 0, False, a.power))
        out._accumulate(tuple(nw), c.swap_rs())
    return out


@lru_cache(maxsize=None)
def defining_rules(n: int, cartan: str = "B") -> RuleSet:
    """Generator-level rules: torus, conjugation, the e-f cross relation and Serre.

    Rule sources are short opaque labels that show up in traces.
    """
    system = root_system(cartan, n)
    if cartan == "B" and n < 2:
        raise ValueError("n >= 2 required")
    rules: list[RewriteRule] = []
    torus = [Letter(k, i, 0, False, p) for k in ("w", "W") for i in range(1, n + 1) for p in (1, -1)]
    for t in torus:
        for i in range(1, n + 1):
            ei, fi = Letter("E", i, i), Letter("F", i, i)
            unit = tuple(1 if k == i - 1 else 0 for k in range(n))
            tu = tuple(1 if k == t.i - 1 else 0 for k in range(n))
            if t.kind == "w":
                q = group_pairing(system, unit, tu) ** t.power        # w_j e_i = <w_i', w_j> e_i w_j
                rules.append(RewriteRule((t, ei), Element.word(ei, t, coef=q), "B2"))
                rules.append(RewriteRule((t, fi), Element.word(fi, t, coef=q.inverse()), "B2"))
            else:
                q = group_pairing(system, tu, unit) ** (-t.power)     # w_j' e_i = <w_j', w_i>^-1 e_i w_j'
                rules.append(RewriteRule((t, ei), Element.word(ei, t, coef=q), "B3"))
                rules.append(RewriteRule((t, fi), Element.word(fi, t, coef=q.inverse()), "B3"))
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            ei, fj = Letter("E", i, i), Letter("F", j, j)
            rhs = Element.word(fj, ei)
            if i == j:
                d = (system.r_i(i) - system.s_i(i)).inverse()
                rhs = rhs + Element.word(Letter("w", i), coef=d) - Element.word(Letter("W", i), coef=d)
            rules.append(RewriteRule((ei, fj), rhs, "B4"))
    for src, rel in serre_relations(system):
        rules.append(_orient(system, rel, src))
        rules.append(_orient(system, _tau_element(rel), src + "*"))
    rules += _torus_rules(system, torus, None, "generator")
    return RuleSet(system, "generator", rules)


# overlaps -------------------------------------------------------------------------


def overlap_words(rules: RuleSet, degree_bound: int = 3) -> list[tuple[tuple[Letter, ...], int, int]]:
    """Words of length <= degree_bound where two rule left sides overlap or nest.

    Each entry is (word, start of first redex, start of second redex).
    """
    out = []
    lhss = list(rules.rules)
    by_first: dict[Letter, list] = {}
    for l2 in lhss:
        by_first.setdefault(l2[0], []).append(l2)
    seen = set()
    for l1 in lhss:
        for k in range(1, len(l1)):
            suffix = l1[k:]
            for l2 in by_first.get(suffix[0], ()):
                if len(l2) <= len(suffix):
                    continue
                if tuple(l2[:len(suffix)]) != suffix:
                    continue
                word = l1 + l2[len(suffix):]
                if len(word) <= degree_bound and (word, k) not in seen:
                    seen.add((word, k))
                    out.append((word, 0, k))
        for l2 in lhss:
            if l2 != l1 and len(l2) < len(l1):
                for k in range(len(l1) - len(l2) + 1):
                    if l1[k:k + len(l2)] == l2 and len(l1) <= degree_bound:
                        out.append((l1, 0, k))
    return out


def _apply_at(word, pos, rules: RuleSet) -> Element:
    for k in rules.lengths:
        rule = rules.rules.get(tuple(word[pos:pos + k]))
        if rule is not None:
            out = Element()
            for w, d in rule.rhs:
                out._accumulate(word[:pos] + w + word[pos + k:], d)
            return out
    raise ReductionError(f"no rule at position {pos} of {word}")


def local_confluence(rules: RuleSet, degree_bound: int = 3, budget: int | None = None) -> list[dict]:
    """Overlap words whose two one-step reductions have different normal forms."""
    bad = []
    for word, p1, p2 in overlap_words(rules, degree_bound):
        a = _apply_at(word, p1, rules)
        b = _apply_at(word, p2, rules)
        na, _ = rewrite_normal_form(a, rules, budget=budget)
        nb, _ = rewrite_normal_form(b, rules, budget=budget)
        diff = na - nb
        if diff:
            bad.append({"word": word, "positions": (p1, p2), "difference": diff})
    return bad


# ideal membership ------------------------------------------------------------------


class DegreeTooLarge(ValueError):
    pass


def _words_of_degree(n: int, mu: tuple[int, ...], letters: list[Letter]) -> list[tuple[Letter, ...]]:
    out = []
    degs = [letter_degree(a, n) for a in letters]

    def rec(rem, acc):
        if not any(rem):
            out.append(tuple(acc))
            return
        for a, d in zip(letters, degs):
            if all(x <= y for x, y in zip(d, rem)):
                acc.append(a)
                rec(tuple(y - x for x, y in zip(d, rem)), acc)
                acc.pop()

    rec(tuple(mu), [])
    return out


def _reduce_row(row: dict, pivots: dict, order) -> dict:
    row = dict(row)
    while row:
        top = max(row, key=order)
        piv = pivots.get(top)
        if piv is None:
            return row
        c = row[top]
        for w, d in piv.items():
            v = row.get(w)
            nv = -c * d if v is None else v - c * d
            if nv:
                row[w] = nv
            else:
                row.pop(w, None)
    return row


class IdealOracle:
    """Row-reduced span of w * rho * w' (rho a defining relation of U+) in one degree."""

    def __init__(self, n: int, mu: tuple[int, ...], cartan: str = "B"):
        self.system = root_system(cartan, n)
        self.n = n
        self.mu = tuple(mu)
        gens = [Letter("E", i, i) for i in range(1, n + 1)]
        self.order = lambda w: word_key(self.system, w)
        self.pivots: dict = {}
        rels = serre_relations(self.system)
        for _src, rel in rels:
            nu = rel.grade(n)
            rest = tuple(a - b for a, b in zip(self.mu, nu))
            if any(x < 0 for x in rest):
                continue
            for outer in _words_of_degree(n, rest, gens):
                for k in range(len(outer) + 1):
                    left, right = outer[:k], outer[k:]
                    row = {}
                    for w, c in rel:
                        row[left + w + right] = c
                    self._insert(row)
        self.words = _words_of_degree(n, self.mu, gens)

    def _insert(self, row: dict) -> None:
        row = _reduce_row(row, self.pivots, self.order)
        if not row:
            return
        top = max(row, key=self.order)
        c = row[top]
        row = {w: d / c for w, d in row.items()}
        # keep pivots fully reduced against the new one
        for key, piv in list(self.pivots.items()):
            if top in piv:
                d = piv[top]
                new = dict(piv)
                for w, e in row.items():
                    v = new.get(w)
                    nv = -d * e if v is None else v - d * e
                    if nv:
                        new[w] = nv
                    else:
                        new.pop(w, None)
                self.pivots[key] = new
        self.pivots[top] = row

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def quotient_dimension(self) -> int:
        return len(self.words) - self.rank

    def contains(self, x: Element) -> bool:
        return not _reduce_row(dict(x.terms), self.pivots, self.order)


_ORACLES: dict = {}


def ideal_membership_oracle(x: Element, n: int, degree_bound: int = 8, cartan: str = "B") -> bool:
    """True iff x (a homogeneous element over e_1..e_n) lies in the ideal of U+ relations."""
    if not x:
        return True
    mu = x.grade(n)
    if isinstance(mu, str):
        parts: dict = {}
        for w, c in x:
            g = Element.word(*w).grade(n)
            parts.setdefault(g, Element())._accumulate(w, c)
        return all(ideal_membership_oracle(p, n, degree_bound, cartan) for p in parts.values())
    if any(a.kind != "E" or a.j != a.i or a.primed for w, _ in x for a in w):
        x = expand_generators(x, root_system(cartan, n))
    if sum(mu) > degree_bound:
        raise DegreeTooLarge(f"degree {sum(mu)} exceeds bound {degree_bound}")
    key = (cartan, n, mu)
    oracle = _ORACLES.get(key)
    if oracle is None:
        oracle = _ORACLES[key] = IdealOracle(n, mu, cartan)
    return oracle.contains(x)


def expand_generators(x: Element, system: RootSystem) -> Element:
    """Replace root letters by their generator expansions."""
    out = Element()
    for w, c in x:
        acc = Element.scalar(c)
        for a in w:
            if a.kind != "E":
                raise ValueError("only U+ words can be expanded")
            acc = acc * generator_expansion(system, letter_position(system, a))
        out = out + acc
    return out
