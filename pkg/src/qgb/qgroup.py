"""The two-parameter algebra of type B_n as a configured object.

An AlgebraInstance bundles the normal-ordering engine, both rule sets and
a table of root vectors.  Extended symbols E(a, b) with 1 <= a <= b <= 2n
(index b > n standing for (2n - b + 1)') follow the recursive conventions
used by the coproduct formulas.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from functools import lru_cache

from .catalog import instantiate, powers, root_letter
from .coeff import R, S, SpecializationMap
from .freealg import Element, Letter
from .pbw import Elt, PBWAlgebra, algebra
from .rewrite import (RuleSet, certify_identity, defining_rules, local_confluence,
                      straightening_rules, to_elt)
from .catalog import generator_expansion
from .rootsys import RootSystem, RootSystemError, kostant_partitions


class ValidationError(RuntimeError):
    def __init__(self, message: str, overlaps=()):
        super().__init__(message)
        self.overlaps = list(overlaps)


@dataclass(frozen=True)
class RootVectorEntry:
    position: int
    letter: Letter
    expansion: Element
    degree: tuple[int, ...]
    tau_image: Letter


@dataclass
class AlgebraInstance:
    n: int
    mode: str
    alg: PBWAlgebra
    generator_rules: RuleSet
    pbw_rules: RuleSet
    table: list[RootVectorEntry] = field(default_factory=list)
    validated: bool = False

    @property
    def system(self) -> RootSystem:
        return self.alg.system

    def elt(self, x: Element) -> Elt:
        return to_elt(x, self.alg)

    def E(self, i: int, j: int, primed: bool = False) -> Elt:
        return Elt(self.alg, self.alg.e_root(self.system.index_of(i, j, primed)))

    def F(self, i: int, j: int, primed: bool = False) -> Elt:
        return Elt(self.alg, self.alg.f_root(self.system.index_of(i, j, primed)))

    def e(self, i: int) -> Elt:
        return Elt(self.alg, self.alg.e(i))

    def f(self, i: int) -> Elt:
        return Elt(self.alg, self.alg.f(i))

    def w(self, i: int, k: int = 1) -> Elt:
        return Elt(self.alg, self.alg.w(i, k))

    def wp(self, i: int, k: int = 1) -> Elt:
        return Elt(self.alg, self.alg.wp(i, k))

    def one(self) -> Elt:
        return Elt(self.alg, self.alg.unit())

    def scalar(self, c) -> Elt:
        return Elt(self.alg, self.alg.scalar(self.alg.c(c)))

    def torus(self, omega=(), omega_prime=()) -> Elt:
        return Elt(self.alg, self.alg.torus(omega, omega_prime))


def _mode_name(ell, restricted) -> str:
    if ell is None:
        return "generic"
    return "restricted" if restricted else "specialized"


@lru_cache(maxsize=None)
def build(n: int, mode: str = "generic", ell: int | None = None, y: int | None = None,
          z: int | None = None, validate: bool = False, cartan: str = "B") -> AlgebraInstance:
    """Configured algebra.  ``mode`` is generic, specialized or restricted.

    With ``validate`` the rule sets are checked for local confluence on
    overlaps of length 3 (a few seconds at n = 3).
    """
    if cartan == "B" and n < 2:
        raise RootSystemError("rank n >= 2 required")
    if mode not in ("generic", "specialized", "restricted"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode != "generic":
        if ell is None or y is None or z is None:
            raise ValueError(f"{mode} mode needs ell, y and z")
        failures = SpecializationMap(ell, y, z).standing_assumptions()
        if failures:
            raise ValueError("standing assumptions fail: " + "; ".join(failures))
    else:
        ell = y = z = None
    restricted = mode == "restricted"
    alg = algebra(cartan, n, ell, y, z, restricted)
    gen = defining_rules(n, cartan)
    pbw = straightening_rules(n, ell, y, z, restricted, cartan)
    inst = AlgebraInstance(n, mode, alg, gen, pbw)
    system = alg.system
    for p, root in enumerate(system.roots):
        inst.table.append(RootVectorEntry(p, root_letter(system, p), generator_expansion(system, p),
                                          root.degree, root_letter(system, p, "F")))
    if validate:
        bad = local_confluence(gen) + local_confluence(pbw)
        if bad:
            raise ValidationError(f"{len(bad)} unresolved overlaps", bad)
        inst.validated = True
    return inst


def root_vector(n: int, i: int, j: int, primed: bool = False, cartan: str = "B") -> Element:
    """Generator expansion of E(i, j) or E(i, j')."""
    from .rootsys import root_system
    system = root_system(cartan, n)
    return generator_expansion(system, system.index_of(i, j, primed))


def tau(x: Element) -> Element:
    """Anti-automorphism e <-> f, w <-> w', r <-> s."""
    out = Element()
    for w, c in x:
        nw = []
        for a in reversed(w):
            kind = {"E": "F", "F": "E", "w": "W", "W": "w"}[a.kind]
            nw.append(Letter(kind, a.i, a.j, a.primed, a.power))
        out._accumulate(tuple(nw), c.swap_rs())
    return out


def tau_elt(x: Elt) -> Elt:
    return Elt(x.alg, x.alg.tau(x.d))


def pbw_monomials(inst: AlgebraInstance, mu) -> list[tuple[Letter, ...]]:
    """Ascending E-monomials of degree mu; exponents below ell in restricted mode."""
    system = inst.system
    out = []
    ell = inst.alg.ell
    for part in kostant_partitions(system, mu):
        if ell is not None and any(part.count(p) >= ell for p in set(part)):
            continue
        out.append(tuple(root_letter(system, p) for p in part))
    return out


# extended symbols ------------------------------------------------------------------


def omega_range(n: int, a: int, b: int) -> tuple[int, ...]:
    """Exponent vector of w_{a,b}: product of w_k over the support of E(a, b)."""
    t = [0] * n
    if b <= n:
        for k in range(a, b + 1):
            t[k - 1] += 1
    else:
        j = 2 * n - b + 1
        for k in range(a, n + 1):
            t[k - 1] += 1
        for k in range(j, n + 1):
            t[k - 1] += 1
    return tuple(t)


class ExtendedVectors:
    """E(a, b) for the index ranges reached by the coproduct formulas."""

    def __init__(self, inst: AlgebraInstance):
        self.inst = inst
        self.n = inst.n
        self._memo: dict = {}

    def __call__(self, a: int, b: int) -> Elt:
        key = (a, b)
        hit = self._memo.get(key)
        if hit is None:
            hit = self._memo[key] = self._compute(a, b)
        return hit

    def _compute(self, a: int, b: int) -> Elt:
        n, inst = self.n, self.inst
        e = inst.e
        if not (1 <= a <= b <= 2 * n):
            raise RootSystemError(f"no extended symbol E({a},{b})")
        if a <= n and b <= n:
            return inst.E(a, b)
        if a <= n and b > n and (2 * n - b + 1) > a:
            return inst.E(a, 2 * n - b + 1, True)
        if a == b == n + 1:
            return e(n)
        if a == n and b == n + 1:
            return (S ** 2 - R * S) * e(n) * e(n)
        if a == b:
            k = 2 * n - a
            if 1 <= k < n - 1:
                return (R * S) ** -2 * e(k + 1)
        k = 2 * n - b + 1
        prev = self(a, b - 1)
        if a == k:                                   # E(k, 2n-k+1)
            return S ** 2 * prev * e(k) - S ** -2 * e(k) * prev
        if a > n:                                    # E(2n-i+1, 2n-k+1), i > k
            return prev * e(k) - S ** -2 * e(k) * prev
        if a == k + 1:
            return R ** 2 * prev * e(k) - S ** -2 * e(k) * prev + self(k, 2 * n - k)
        if a > k + 1:
            return prev * e(k) - S ** -2 * e(k) * prev
        raise RootSystemError(f"no extended symbol E({a},{b})")

    def closed_form_diagonal(self, k: int) -> Elt:
        """Closed sum for E(k, 2n-k+1) in terms of ordinary root vectors."""
        n, inst = self.n, self.inst
        zeta = S ** 2 - R ** 2
        out = inst.scalar(0)
        for i in range(n - k):
            out = out + (-1) ** i * R ** (-2 * (i + 1)) * S ** -2 * zeta * self(k, k + i) * self(k, 2 * n - k - i)
        return out + (-1) ** (n - k) * R ** (-2 * (n - k)) * (S ** 2 - R * S) * inst.E(k, n) ** 2


# power identities ------------------------------------------------------------------


@dataclass
class CertRecord:
    tag: str
    params: str
    status: str
    millis: float
    residue: str = ""
    note: str = ""

    def line(self) -> str:
        """Tab-separated record: tag, status, params, millis and the residue when failing."""
        fields = [self.tag, self.status, self.params, f"{self.millis:.1f}"]
        if self.residue:
            fields.append(self.residue.replace("\t", " ").replace("\n", " "))
        return "\t".join(fields)


def power_identity_suite(inst: AlgebraInstance, m_max: int = 4, tags=None) -> list[CertRecord]:
    """Certify the power commutation identities for 1 <= m <= m_max."""
    table = powers(m_max)
    out = []
    for tag in sorted(table, key=_tagkey):
        if tags is not None and tag not in tags:
            continue
        ident = table[tag]
        for idx in ident.instances(inst.n):
            out.append(_certify(inst, tag, ident, idx))
    out += transport_checks(inst, m_max)
    return out


def _tagkey(tag: str):
    return tuple(int(p) for p in tag.split(".") if p.isdigit())


def _certify(inst: AlgebraInstance, tag: str, ident, idx) -> CertRecord:
    t0 = time.perf_counter()
    lhs, rhs = instantiate(ident, inst.alg, idx)
    cert = certify_identity(lhs, rhs)
    ms = (time.perf_counter() - t0) * 1000
    params = ",".join(f"{k}={v}" for k, v in zip(ident.names, idx))
    residue = str(cert.residue) if cert.status == "FAIL" else ""
    return CertRecord(tag, params, cert.status, ms, residue, ident.note)


def _ratio(p: Elt, q: Elt):
    """c with p = c q when both are multiples of one monomial, else None."""
    if len(p) != 1 or len(q) != 1:
        return None
    (kp, cp), = p.d.items()
    (kq, cq), = q.d.items()
    return cp / cq if kp == kq else None


def transport_checks(inst: AlgebraInstance, m_max: int = 4) -> list[CertRecord]:
    """The two power-transport formulas on concrete elements.

    x, y are e_1, e_2 (in both orders) and z is a multiple of E(1,2), taken
    from the bracket that defines E(1,2).  The hypotheses are certified
    before the conclusions; beta is read off the engine's products.
    """
    system = inst.system
    br = system.brackets[system.index_of(1, 2)]
    twist = inst.alg.c(br.twist)                     # E(1,2) = e1 e2 - twist e2 e1
    E12 = inst.E(1, 2)
    one = inst.alg.one
    setups = {
        "1": (inst.e(1), inst.e(2), one / twist, -(one / twist) * E12),
        "2": (inst.e(2), inst.e(1), twist, E12),
    }
    out = []
    for part, (x, y, alpha, z) in setups.items():
        if part == "1":
            beta = _ratio(z * x, x * z)
        else:
            beta = _ratio(y * z, z * y)
        ok = certify_identity(y * x, alpha * (x * y) + z).status == "PASS"
        if beta is None or not ok or alpha == beta:
            out.append(CertRecord("3.8." + part, "", "FAIL", 0.0, note="hypothesis not met"))
            continue
        for m in range(1, m_max + 1):
            t0 = time.perf_counter()
            q = (alpha ** m - beta ** m) / (alpha - beta)
            if part == "1":
                lhs = y * x ** m
                rhs = alpha ** m * (x ** m * y) + q * (x ** (m - 1) * z)
            else:
                lhs = y ** m * x
                rhs = alpha ** m * (x * y ** m) + q * (z * y ** (m - 1))
            cert = certify_identity(lhs, rhs)
            ms = (time.perf_counter() - t0) * 1000
            out.append(CertRecord("3.8." + part, f"m={m}", cert.status, ms,
                                  str(cert.residue) if cert.status == "FAIL" else ""))
    return out


def standing_assumptions(ell: int, y: int, z: int) -> list[str]:
    """Violated parameter hypotheses at r = q^y, s = q^z (q a primitive ell-th root)."""
    return SpecializationMap(ell, y, z).standing_assumptions()
