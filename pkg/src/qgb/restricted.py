"""Root-of-unity layer.

Centrality of ell-th powers, the Hopf ideal they generate, the restricted
quotient, integrals of its positive Borel part and their distinguished
group-likes, the determinant condition for the double and the ribbon
criterion.  Suites return CertRecord lists; tags are opaque identifiers.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import sympy

from .coeff import RationalFunction
from .hopf import (Functional, Tensor, antipode, character, counit,
                   counit_functional, coproduct, gamma_eta, harpoon, verify_coproduct_formula)
from .pbw import Elt
from .qgroup import AlgebraInstance, CertRecord, build
from .rewrite import key_word, to_elt
from .catalog import root_letter
from .freealg import Element
from .rootsys import RootSystemError, group_pairing, two_rho


def restricted_instance(n: int, ell: int, y: int, z: int) -> AlgebraInstance:
    if ell % 2 == 0:
        raise ValueError("the restricted quotient is built for odd ell only")
    return build(n, "restricted", ell, y, z)


def restricted_dimension(n: int, ell: int) -> int:
    if n < 2:
        raise RootSystemError("rank n >= 2 required")
    return ell ** (2 * n * n + 2 * n)


def _params(inst: AlgebraInstance, **extra) -> str:
    smap = inst.alg.smap
    base = f"n={inst.n},ell={smap.ell},y={smap.y},z={smap.z}"
    return ",".join([base] + [f"{k}={v}" for k, v in extra.items()])


def _timed(tag: str, params: str, note: str, fn: Callable[[], tuple[bool, str]]) -> CertRecord:
    t0 = time.perf_counter()
    ok, residue = fn()
    ms = (time.perf_counter() - t0) * 1000
    return CertRecord(tag, params, "PASS" if ok else "FAIL", ms, "" if ok else residue, note)


def root_label(inst: AlgebraInstance, p: int) -> str:
    return str(root_letter(inst.system, p))


def _generators(inst: AlgebraInstance) -> list[tuple[str, Elt]]:
    out = []
    for i in range(1, inst.n + 1):
        out += [(f"e{i}", inst.e(i)), (f"f{i}", inst.f(i)),
                (f"w{i}", inst.w(i)), (f"w{i}^-1", inst.w(i, -1)),
                (f"W{i}", inst.wp(i)), (f"W{i}^-1", inst.wp(i, -1))]
    return out


# centrality ------------------------------------------------------------------------


def central_suite(inst: AlgebraInstance) -> list[CertRecord]:
    """X^ell commutes with every generator, for X = E_a, F_a and X = w_k, w_k'.

    Runs in specialized (not restricted) mode, where the powers are nonzero.
    """
    if inst.mode != "specialized":
        raise ValueError("central_suite needs a specialized instance")
    ell = inst.alg.smap.ell
    gens = _generators(inst)
    out = []
    subjects = []
    for p in range(len(inst.system.roots)):
        label = root_label(inst, p)
        subjects.append((label, Elt(inst.alg, inst.alg.e_root(p)) ** ell, "root vector power"))
        subjects.append(("F" + label[1:], Elt(inst.alg, inst.alg.f_root(p)) ** ell, "root vector power"))
    for k in range(1, inst.n + 1):
        subjects.append((f"w{k}", inst.w(k, ell) - inst.one(), "group relation"))
        subjects.append((f"W{k}", inst.wp(k, ell) - inst.one(), "group relation"))
    for label, power, kind in subjects:
        def fn(power=power):
            for name, g in gens:
                diff = power * g - g * power
                if diff:
                    return False, f"[{name}] {len(diff)} terms"
            return not power.is_zero() or kind == "group relation", "power vanished"
        out.append(_timed("3.15", _params(inst, X=label), f"{kind} {label}^ell central", fn))
    return out


# Hopf ideal ------------------------------------------------------------------------


def project(x: Elt, target: AlgebraInstance) -> Elt:
    """Image of a specialized element in the restricted quotient."""
    system = target.system
    el = Element()
    for key, c in x.d.items():
        el._accumulate(key_word(system, key), c)
    return to_elt(el, target.alg)


def project_tensor(t: Tensor, target: AlgebraInstance) -> Tensor:
    out = Tensor(target.alg, {}, t.legs)
    for keys, c in t.d.items():
        factors = [project(Elt(t.alg, {k: t.alg.one}), target) for k in keys]
        out = out + Tensor.pure(*factors) * c
    return out


def ell_power_kinds(n: int) -> list[tuple[str, int, int]]:
    """Every (kind, k, j) covered by the ell-th power coproduct formulas."""
    out = [("ell-root", k, j) for k in range(1, n + 1) for j in range(k, n + 1)]
    out += [("ell-short", k, n) for k in range(1, n)]
    out += [("ell-primed", k, j) for k in range(1, n) for j in range(k + 1, n)]
    return out


_FORMULA_TAG = {"ell-root": "4.9", "ell-short": "4.11", "ell-primed": "4.12"}


def hopf_ideal_suite(inst: AlgebraInstance) -> list[CertRecord]:
    """Coproduct and antipode of the ell-th powers.

    Three checks per root power X^ell: the closed coproduct formula, the
    vanishing of Δ(X^ell) in u⊗u (so it lies in I⊗U + U⊗I) and the
    vanishing of S(X^ell) in u.  Simple roots also get the scalar form of
    S(e_k^ell).
    """
    if inst.mode != "specialized":
        raise ValueError("hopf_ideal_suite needs a specialized instance")
    smap = inst.alg.smap
    ell = smap.ell
    quot = build(inst.n, "restricted", ell, smap.y, smap.z)
    out = []
    for kind, k, j in ell_power_kinds(inst.n):
        tag = _FORMULA_TAG[kind]
        params = _params(inst, k=k, j=j)

        def formula(kind=kind, k=k, j=j):
            chk = verify_coproduct_formula(inst, kind, k, j, ell)
            return chk.status == "PASS", f"components {chk.mismatched}"
        out.append(_timed(tag, params, f"{kind} coproduct", formula))

    for p in range(len(inst.system.roots)):
        label = root_label(inst, p)
        X = Elt(inst.alg, inst.alg.e_root(p)) ** ell

        def ideal(X=X):
            img = project_tensor(coproduct(X), quot)
            return not img.d, f"{len(img.d)} surviving terms"
        out.append(_timed("4.2", _params(inst, X=label), "coproduct in I⊗U+U⊗I", ideal))

        def anti(X=X):
            img = project(antipode(X), quot)
            return not img.d, f"{len(img.d)} surviving terms"
        out.append(_timed("4.10", _params(inst, X=label), "antipode in I", anti))

    for k in range(1, inst.n + 1):
        def scalar_form(k=k):
            lhs = antipode(inst.e(k) ** ell)
            base = inst.w(k, -ell) * inst.e(k) ** ell
            if len(lhs) != 1 or len(base) != 1:
                return False, f"{len(lhs)} terms"
            (kl, cl), = lhs.d.items()
            (kb, _), = base.d.items()
            return kl == kb and bool(cl), "not a multiple of w^-ell e^ell"
        out.append(_timed("4.10", _params(inst, k=k), "S(e_k^ell) scalar form", scalar_form))
    return out


# integrals -------------------------------------------------------------------------


@dataclass
class IntegralElements:
    t: Elt
    x: Elt
    y: Elt
    y_prime: Elt
    F: Elt                                  # the same product over negative root vectors


def _hat_factors(inst: AlgebraInstance, i: int, family: str) -> list[Elt]:
    n = inst.n
    make = inst.E if family == "E" else inst.F
    if i == n:
        return [make(n, n)]
    out = [make(i, j) for j in range(i, n + 1)]
    out += [make(i, j, True) for j in range(n, i, -1)]
    return out


def integral_elements(inst: AlgebraInstance) -> IntegralElements:
    ell = inst.alg.ell
    if ell is None:
        raise ValueError("integrals live in the restricted quotient")
    t = inst.one()
    for i in range(1, inst.n + 1):
        s = inst.scalar(0)
        for k in range(ell):
            s = s + inst.w(i, k)
        t = t * s
    x = inst.one()
    F = inst.one()
    for i in range(1, inst.n + 1):
        for a in _hat_factors(inst, i, "E"):
            x = x * a ** (ell - 1)
        for a in _hat_factors(inst, i, "F"):
            F = F * a ** (ell - 1)
    return IntegralElements(t, x, t * x, x * t, F)


def _borel_generators(inst: AlgebraInstance) -> list[tuple[str, Elt]]:
    out = []
    for k in range(1, inst.n + 1):
        out += [(f"e{k}", inst.e(k)), (f"w{k}", inst.w(k)), (f"w{k}^-1", inst.w(k, -1))]
    return out


def integral_check(inst: AlgebraInstance, side: str = "left") -> list[CertRecord]:
    """b·y = ε(b)y (left) or y'·b = ε(b)y' (right) on Borel generators."""
    if side not in ("left", "right"):
        raise ValueError("side is left or right")
    ie = integral_elements(inst)
    tag = "7.1" if side == "left" else "7.2"
    target = ie.y if side == "left" else ie.y_prime
    out = [_timed(tag, _params(inst, side=side), "integral is nonzero",
                  lambda: (not target.is_zero(), "zero"))]
    for name, b in _borel_generators(inst):
        def fn(b=b):
            prod = b * target if side == "left" else target * b
            diff = prod - counit(b) * target
            return diff.is_zero(), f"{len(diff)} terms"
        out.append(_timed(tag, _params(inst, side=side, b=name), f"{side} integral against {name}", fn))
    return out


def counit_check(inst: AlgebraInstance) -> list[CertRecord]:
    ie = integral_elements(inst)
    return [_timed("7.3", _params(inst, element=name), "counit of integral vanishes",
                   lambda v=v: (not counit(v), str(counit(v))))
            for name, v in (("y", ie.y), ("y'", ie.y_prime))]


def antipode_integral_check(inst: AlgebraInstance) -> CertRecord:
    """S(y') is a nonzero multiple of y."""
    ie = integral_elements(inst)

    def fn():
        sy = antipode(ie.y_prime)
        (key, c), = list(ie.y.d.items())[:1]
        ratio = sy.d.get(key)
        if not ratio:
            return False, "no overlap with y"
        return (sy - ie.y * (ratio / c)).is_zero(), "not proportional"
    return _timed("7.1", _params(inst), "S(y') proportional to y", fn)


def gamma_value(inst: AlgebraInstance, k: int) -> RationalFunction:
    """<w'_{2rho}, w_k> as a generic monomial."""
    unit = tuple(1 if i == k - 1 else 0 for i in range(inst.n))
    return group_pairing(inst.system, two_rho(inst.n), unit)


def distinguished_functional(inst: AlgebraInstance) -> Functional:
    alg = inst.alg
    return character(alg, [alg.c(gamma_value(inst, k)) for k in range(1, inst.n + 1)], "γ")


def distinguished_check(inst: AlgebraInstance) -> list[CertRecord]:
    """y·a = γ(a)y on generators, the conjugation law of the F-product, and γ_i(g)."""
    alg = inst.alg
    n = inst.n
    ie = integral_elements(inst)
    y = ie.y
    out = []
    rho2 = two_rho(n)
    for k in range(1, n + 1):
        def on_w(k=k):
            # the product formula over the pairing matrix, evaluated independently
            prod = RationalFunction.one()
            for i in range(1, n + 1):
                prod = prod * inst.system.pairing_matrix[i - 1][k - 1] ** (i * (2 * n - i))
            gam = alg.c(gamma_value(inst, k))
            if alg.c(prod) != gam:
                return False, "closed forms disagree"
            diff = y * inst.w(k) - y * gam
            return diff.is_zero(), f"{len(diff)} terms"
        out.append(_timed("7.4", _params(inst, a=f"w{k}"), "y w_k = γ(w_k) y", on_w))

        def on_e(k=k):
            prod = y * inst.e(k)
            return prod.is_zero(), f"{len(prod)} terms"
        out.append(_timed("7.4", _params(inst, a=f"e{k}"), "y e_k = 0", on_e))

    for k in range(1, n + 1):
        def conj(k=k):
            unit = tuple(1 if i == k - 1 else 0 for i in range(n))
            c = alg.c(group_pairing(inst.system, unit, rho2).inverse())
            diff = inst.wp(k) * ie.F - c * (ie.F * inst.wp(k))
            return diff.is_zero() and not ie.F.is_zero(), f"{len(diff)} terms"
        out.append(_timed("7.6", _params(inst, k=k), "w_k' F = <w_k', w_2rho>^-1 F w_k'", conj))

    g = tuple(-v for v in rho2)
    for i in range(1, n + 1):
        def gam_g(i=i):
            gamma_i, _ = gamma_eta(inst, i)
            key = ((), alg.torus_norm(g + (0,) * n), ())
            unit = tuple(1 if t == i - 1 else 0 for t in range(n))
            return gamma_i.value(key) == alg.c(group_pairing(inst.system, unit, g)), "mismatch"
        out.append(_timed("7.6", _params(inst, i=i), "γ_i(g) = <w_i', g>", gam_g))
    return out


# dual integrals --------------------------------------------------------------------


def _bracket(a: Functional, b: Functional, v: RationalFunction) -> Functional:
    return a * b - (b * a) * v


def eta_root_functionals(inst: AlgebraInstance) -> dict:
    """η_{i,j} and η_{i,j'} from the convolution brackets."""
    from .coeff import R, S
    n = inst.n
    eta = {}
    simple = {i: gamma_eta(inst, i)[1] for i in range(1, n + 1)}
    for i in range(n, 0, -1):
        eta[(i, i, False)] = simple[i]
        for j in range(i + 1, n + 1):
            eta[(i, j, False)] = _bracket(eta[(i + 1, j, False)], simple[i], S ** 2)
    for i in range(1, n):
        eta[(i, n, True)] = _bracket(simple[n], eta[(i, n, False)], R * S)
        for j in range(n - 1, i, -1):
            eta[(i, j, True)] = _bracket(simple[j], eta[(i, j + 1, True)], R ** -2)
    return eta


def dual_integrals(inst: AlgebraInstance) -> tuple[Functional, Functional]:
    """(λ, λ') = (νη, ην)."""
    alg = inst.alg
    ell = alg.ell
    n = inst.n
    eta = eta_root_functionals(inst)
    nu = counit_functional(alg)
    for i in range(1, n + 1):
        gamma_i, _ = gamma_eta(inst, i)
        s = counit_functional(alg)
        power = counit_functional(alg)
        for _ in range(ell - 1):
            power = power * gamma_i
            s = s + power
        nu = nu * s
    prod = counit_functional(alg)
    for i in range(1, n + 1):
        seq = [(i, n, False)] if i == n else \
            [(i, j, False) for j in range(i, n + 1)] + [(i, j, True) for j in range(n, i, -1)]
        for key in seq:
            prod = prod * eta[key] ** (ell - 1)
    return nu * prod, prod * nu


def top_keys(inst: AlgebraInstance) -> list[tuple]:
    alg = inst.alg
    ell = alg.ell
    x = integral_elements(inst).x
    (key, _), = x.d.items()
    import itertools
    return [((), alg.torus_norm(tuple(t) + (0,) * inst.n), key[2])
            for t in itertools.product(range(ell), repeat=inst.n)]


def dual_integral_check(inst: AlgebraInstance, degree_bound: int = 40) -> list[CertRecord]:
    """γ_k λ' = γ_k(g) λ', η_k λ' = 0, ξλ = ξ(1)λ, on the top-degree keys.

    Both integrals are supported in top E-degree.  When that degree's
    height exceeds ``degree_bound`` the check is reported INCONCLUSIVE.
    """
    alg = inst.alg
    n = inst.n
    ell = alg.ell
    height = (ell - 1) * sum(two_rho(n))
    params = _params(inst, bound=degree_bound)
    if height > degree_bound:
        return [CertRecord("7.5", params, "INCONCLUSIVE", 0.0, "", f"top degree height {height} over bound")]
    lam, lam_p = dual_integrals(inst)
    keys = top_keys(inst)
    out = [_timed("7.5", params, "λ' nonzero", lambda: (any(lam_p.value(k) for k in keys), "zero")),
           _timed("7.5", params, "λ nonzero", lambda: (any(lam.value(k) for k in keys), "zero"))]
    g = tuple(-v for v in two_rho(n))
    for k in range(1, n + 1):
        gamma_k, eta_k = gamma_eta(inst, k)
        gk = gamma_k.value(((), alg.torus_norm(g + (0,) * n), ()))
        out.append(_timed("7.5", _params(inst, xi=f"γ{k}"), "γ_k λ' = γ_k(g) λ'",
                          lambda gk=gk, gamma_k=gamma_k: (not (gamma_k * lam_p).agrees(lam_p * gk, keys), "mismatch")))
        out.append(_timed("7.5", _params(inst, xi=f"γ{k}"), "γ_k λ = λ",
                          lambda gamma_k=gamma_k: (not (lam * gamma_k).agrees(lam, keys) or
                                                   not (gamma_k * lam).agrees(lam, keys), "mismatch")))
    eps = counit_functional(alg)
    out.append(_timed("7.5", params, "ε λ = λ", lambda: (not (eps * lam).agrees(lam, keys), "mismatch")))
    return out


# the double --------------------------------------------------------------------------


@dataclass
class DoubleCondition:
    n: int
    ell: int
    y: int
    z: int
    matrix: list[list[int]]
    det_symbolic: sympy.Expr
    det: int
    gcd: int
    closed_form_ok: bool
    from_pairing_ok: bool

    @property
    def holds(self) -> bool:
        return self.gcd == 1

    def __str__(self) -> str:
        return f"gcd({self.det},{self.ell})={self.gcd}: {'holds' if self.holds else 'fails'}"


_Y, _Z = sympy.symbols("y z")


def double_matrix(n: int, y=_Y, z=_Z) -> sympy.Matrix:
    """Column j holds the exponents of γ_j on w_1 .. w_n."""
    M = sympy.zeros(n, n)
    for i in range(n):
        M[i, i] = 2 * (y - z) if i < n - 1 else y - z
        if i + 1 < n:
            M[i, i + 1] = 2 * z
            M[i + 1, i] = -2 * y
    return M


def pairing_matrix_exponents(n: int, y=_Y, z=_Z) -> sympy.Matrix:
    """Same matrix read off the structure constants: entry (i, j) is log_θ <w_j', w_i>."""
    from .rootsys import root_system
    system = root_system("B", n)
    M = sympy.zeros(n, n)
    for i in range(n):
        for j in range(n):
            lp = system.pairing_matrix[j][i].laurent()
            (a, b), c = next(iter(lp.terms.items()))
            if len(lp.terms) != 1 or c != 1:
                raise ValueError("structure constant is not a monomial")
            M[i, j] = a * y + b * z
    return M


def double_condition(n: int, ell: int, y: int, z: int) -> DoubleCondition:
    if n < 2:
        raise RootSystemError("rank n >= 2 required")
    A = double_matrix(n)
    det = sympy.expand(A.det())
    closed = sympy.expand(2 ** (n - 1) * (_Y ** n + (-1) ** n * _Z ** n))
    P = pairing_matrix_exponents(n)
    value = int(det.subs({_Y: y, _Z: z}))
    numeric = [[int(A[i, j].subs({_Y: y, _Z: z})) for j in range(n)] for i in range(n)]
    return DoubleCondition(n, ell, y, z, numeric, det, value, math.gcd(value, ell),
                           sympy.expand(det - closed) == 0, sympy.expand(P - A) == sympy.zeros(n, n))


# ribbon ----------------------------------------------------------------------------


@dataclass
class NoWitness:
    n: int
    ell: int
    j: int
    congruence: str

    def __str__(self) -> str:
        return f"no witness: {self.congruence} has no solution"


@dataclass
class RibbonWitness:
    n: int
    ell: int
    a: tuple[int, ...]
    checks: list[CertRecord] = field(default_factory=list)

    @property
    def h(self) -> tuple[int, ...]:
        return self.a

    @property
    def delta_exponents(self) -> tuple[int, ...]:
        """w'_rho as a group word: exponents b_j with 2 b_j = j(2n-j) mod ell."""
        return tuple((-v) % self.ell for v in self.a)

    def __str__(self) -> str:
        return f"witness a={self.a}"


def ribbon_solve(n: int, ell: int, y: int | None = None, z: int | None = None):
    """Solve 2a_j = -j(2n-j) mod ell; with (y, z) also certify the witness."""
    if n < 2:
        raise RootSystemError("rank n >= 2 required")
    a = []
    for j, v in enumerate(two_rho(n), start=1):
        rhs = (-v) % ell
        sols = [t for t in range(ell) if (2 * t - rhs) % ell == 0]
        if not sols:
            return NoWitness(n, ell, j, f"2a_{j} = {-v} mod {ell}")
        a.append(sols[0])
    w = RibbonWitness(n, ell, tuple(a))
    if y is not None and z is not None:
        w.checks = ribbon_checks(restricted_instance(n, ell, y, z), w)
    return w


def _delta(inst: AlgebraInstance, exps, sign: int = 1) -> Functional:
    alg = inst.alg
    n = inst.n
    vals = []
    for k in range(1, n + 1):
        unit = tuple(1 if i == k - 1 else 0 for i in range(n))
        v = group_pairing(inst.system, tuple(exps), unit)
        vals.append(alg.c(v if sign > 0 else v.inverse()))
    return character(alg, vals, "δ" if sign > 0 else "δ^-1")


def ribbon_checks(inst: AlgebraInstance, w: RibbonWitness) -> list[CertRecord]:
    alg = inst.alg
    n = inst.n
    out = []
    h = inst.torus(w.a)
    h_inv = inst.torus(tuple(-v for v in w.a))
    g = inst.torus(tuple(-v for v in two_rho(n)))
    out.append(_timed("8.2", _params(inst), "h^2 = g", lambda: ((h * h - g).is_zero(), "mismatch")))

    delta = _delta(inst, w.delta_exponents)
    delta_inv = _delta(inst, w.delta_exponents, -1)
    gamma = distinguished_functional(inst)
    keys = [((), alg.torus_norm(tuple(t) + (0,) * n), ew)
            for t in [(0,) * n] + [tuple(1 if i == k else 0 for i in range(n)) for k in range(n)]
            for ew in [()] + [(inst.system.simple(k),) for k in range(1, n + 1)]]
    out.append(_timed("8.2", _params(inst), "δ^2 = γ", lambda: (not (delta * delta).agrees(gamma, keys), "mismatch")))
    out.append(_timed("8.2", _params(inst), "δ δ^-1 = ε",
                      lambda: (not (delta * delta_inv).agrees(counit_functional(alg), keys), "mismatch")))

    for name, a in _borel_generators(inst):
        def s2(a=a):
            lhs = antipode(antipode(a))
            rhs = h * harpoon(delta_inv, harpoon(delta, a, "left"), "right") * h_inv
            diff = lhs - rhs
            return diff.is_zero(), f"{len(diff)} terms"
        out.append(_timed("8.2", _params(inst, a=name), "S^2(a) = h(δ⇀a↼δ^-1)h^-1", s2))
    return out
