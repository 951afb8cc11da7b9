"""The recurrence language: CBN PCF plus a type of costs.

Costs have constants for zero and one unit and a binary sum; `numc` builds
the right-associated sum of n units.  Evaluation is cost-free CBN big-step
semantics, used only to define convergence of recurrences.  The module also
provides syntactic fixed-point unfolding and the cost-algebra structure that
recurrence extraction assigns to each computation type.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import cbpv_lang as cb
from . import pcf_lang as pcf
from .pcf_lang import (COST, NAT, App, Arith, Arrow, CPlus, Cost, FixCbn,
                       IfZ, Lam, Nat, Num, One, Pair, PcfTerm, PcfType, Prod,
                       Proj, TypeCheckError, TypingContext, Var, Zero,
                       apply_arith, fresh_name, subst, subst_many)
from .sexpr import read

EMPTY_CONTEXT = pcf.EMPTY_CONTEXT


def is_pcfc_type(ty: PcfType) -> bool:
    if isinstance(ty, (Nat, Cost)):
        return True
    if isinstance(ty, Prod):
        return is_pcfc_type(ty.left) and is_pcfc_type(ty.right)
    if isinstance(ty, Arrow):
        return is_pcfc_type(ty.dom) and is_pcfc_type(ty.cod)
    return False


# ---------------------------------------------------------------------------
# Typing: CBN rules, fix at every type, plus the cost constructors.

def typecheck_pcfc(ctx: TypingContext, t: PcfTerm) -> PcfType:
    if isinstance(t, Var):
        ty = ctx.lookup(t.name)
        if ty is None:
            raise TypeCheckError(f"unbound variable {t.name}", t)
        return ty
    if isinstance(t, Num):
        return NAT
    if isinstance(t, Zero) or isinstance(t, One):
        return COST
    if isinstance(t, CPlus):
        _expect(ctx, t.lhs, COST)
        _expect(ctx, t.rhs, COST)
        return COST
    if isinstance(t, Arith):
        _expect(ctx, t.lhs, NAT)
        _expect(ctx, t.rhs, NAT)
        return NAT
    if isinstance(t, IfZ):
        _expect(ctx, t.scrut, NAT)
        zty = typecheck_pcfc(ctx, t.zero)
        nty = typecheck_pcfc(ctx, t.nonzero)
        if zty != nty:
            raise TypeCheckError(f"ifz branches disagree: {zty} vs {nty}", t)
        return zty
    if isinstance(t, Pair):
        return Prod(typecheck_pcfc(ctx, t.fst), typecheck_pcfc(ctx, t.snd))
    if isinstance(t, Proj):
        ty = typecheck_pcfc(ctx, t.arg)
        if not isinstance(ty, Prod):
            raise TypeCheckError(f"projection from non-product {ty}", t)
        return ty.left if t.index == 1 else ty.right
    if isinstance(t, Lam):
        _check_annot(t.annot, t)
        return Arrow(t.annot, typecheck_pcfc(ctx.extend(t.var, t.annot), t.body))
    if isinstance(t, App):
        fty = typecheck_pcfc(ctx, t.fn)
        if not isinstance(fty, Arrow):
            raise TypeCheckError(f"application of non-function {fty}", t)
        aty = typecheck_pcfc(ctx, t.arg)
        if aty != fty.dom:
            raise TypeCheckError(f"argument type {aty} != domain {fty.dom}", t)
        return fty.cod
    if isinstance(t, FixCbn):
        _check_annot(t.annot, t)
        body = typecheck_pcfc(ctx.extend(t.var, t.annot), t.body)
        if body != t.annot:
            raise TypeCheckError(f"fix body has type {body}, annotation says {t.annot}", t)
        return t.annot
    raise TypeCheckError(f"not a recurrence-language term: {type(t).__name__}", t)


def _expect(ctx, t, want):
    got = typecheck_pcfc(ctx, t)
    if got != want:
        raise TypeCheckError(f"expected {want}, got {got}", t)


def _check_annot(ty, t):
    if not is_pcfc_type(ty):
        raise TypeCheckError(f"annotation {ty} is not a recurrence-language type", t)


def typecheck_closed(t: PcfTerm) -> PcfType:
    return typecheck_pcfc(EMPTY_CONTEXT, t)


# ---------------------------------------------------------------------------
# Cost numerals

def numc(n: int) -> PcfTerm:
    """The right-associated sum of n unit costs, ending in czero."""
    out: PcfTerm = Zero()
    for _ in range(n):
        out = CPlus(One(), out)
    return out


def cost_value(t: PcfTerm):
    """Natural number denoted by a canonical cost form, or None."""
    if isinstance(t, Zero):
        return 0
    if isinstance(t, One):
        return 1
    if isinstance(t, CPlus):
        a = cost_value(t.lhs)
        b = cost_value(t.rhs)
        if a is None or b is None:
            return None
        return a + b
    return None


# ---------------------------------------------------------------------------
# Cost-free evaluation

@dataclass(frozen=True)
class Converged:
    value: PcfTerm
    rules_used: int = 0


@dataclass(frozen=True)
class OutOfFuel:
    pass


@dataclass(frozen=True)
class Stuck:
    reason: str


class _FuelExhausted(Exception):
    pass


class _StuckError(Exception):
    def __init__(self, reason):
        super().__init__(reason)
        self.reason = reason


def eval_pcfc(t: PcfTerm, fuel: int = 100_000):
    """CBN evaluation to canonical form; records no costs."""
    budget = [fuel]
    try:
        value = _eval(t, budget)
    except _FuelExhausted:
        return OutOfFuel()
    except _StuckError as e:
        return Stuck(e.reason)
    return Converged(value, fuel - budget[0])


def _eval(t, budget):
    if budget[0] <= 0:
        raise _FuelExhausted()
    budget[0] -= 1
    if isinstance(t, (Num, Lam, Pair, Zero, One)):
        return t
    if isinstance(t, Arith):
        lhs = _eval(t.lhs, budget)
        rhs = _eval(t.rhs, budget)
        if not isinstance(lhs, Num) or not isinstance(rhs, Num):
            raise _StuckError("arithmetic on non-numerals")
        return Num(apply_arith(t.op, lhs.value, rhs.value))
    if isinstance(t, CPlus):
        lhs = _eval(t.lhs, budget)
        rhs = _eval(t.rhs, budget)
        a, b = cost_value(lhs), cost_value(rhs)
        if a is None or b is None:
            raise _StuckError("cost sum of non-costs")
        return numc(a + b)
    if isinstance(t, IfZ):
        scrut = _eval(t.scrut, budget)
        if not isinstance(scrut, Num):
            raise _StuckError("ifz on non-numeral")
        return _eval(t.zero if scrut.value == 0 else t.nonzero, budget)
    if isinstance(t, Proj):
        arg = _eval(t.arg, budget)
        if not isinstance(arg, Pair):
            raise _StuckError("projection from non-pair")
        return _eval(arg.fst if t.index == 1 else arg.snd, budget)
    if isinstance(t, App):
        fn = _eval(t.fn, budget)
        if not isinstance(fn, Lam):
            raise _StuckError("application of non-function")
        return _eval(subst(fn.body, fn.var, t.arg), budget)
    if isinstance(t, FixCbn):
        return _eval(subst(t.body, t.var, t), budget)
    raise _StuckError(f"no rule for {type(t).__name__}")


# ---------------------------------------------------------------------------
# Syntactic fixed-point unfolding

def unfold_fix(var: str, annot: PcfType, body: PcfTerm, n: int) -> PcfTerm:
    """The n-th approximation: zero is the immediate loop, each further level
    substitutes the previous one for the recursion variable."""
    approx: PcfTerm = FixCbn(var, annot, Var(var))
    for _ in range(n):
        approx = subst(body, var, approx)
    return approx


def omega(ty: PcfType) -> PcfTerm:
    """The canonical diverging term at ty; denotes infinity."""
    return FixCbn("w", ty, Var("w"))


def is_omega(t: PcfTerm) -> bool:
    return (isinstance(t, FixCbn) and isinstance(t.body, Var)
            and t.body.name == t.var)


# ---------------------------------------------------------------------------
# Cost algebras

@dataclass(frozen=True)
class CostAlgebra:
    """A carrier type with a structure map for adding costs to its elements.

    The structure map is an open term in cost_var : C and carrier_var :
    carrier; adding a summed cost is bounded by adding the summands one at a
    time (checked semantically in the test suite).
    """
    carrier: PcfType
    cost_var: str
    carrier_var: str
    structure: PcfTerm

    def add(self, cost: PcfTerm, target: PcfTerm) -> PcfTerm:
        return subst_many(self.structure,
                          {self.cost_var: cost, self.carrier_var: target})


def algebra_for(b: cb.CbpvCompType, potential_of) -> CostAlgebra:
    """Algebra assigned to a computation type.

    Returners carry the free algebra on C x potential; lazy pairs are
    componentwise; functions add the cost pointwise under a lambda.
    potential_of maps value types to their potential types.
    """
    c, x = "c", "x"
    if isinstance(b, cb.CFree):
        carrier = Prod(COST, potential_of(b.val))
        structure = Pair(CPlus(Var(c), Proj(1, Var(x))), Proj(2, Var(x)))
        return CostAlgebra(carrier, c, x, structure)
    if isinstance(b, cb.CWith):
        left = algebra_for(b.left, potential_of)
        right = algebra_for(b.right, potential_of)
        carrier = Prod(left.carrier, right.carrier)
        structure = Pair(left.add(Var(c), Proj(1, Var(x))),
                         right.add(Var(c), Proj(2, Var(x))))
        return CostAlgebra(carrier, c, x, structure)
    if isinstance(b, cb.CArrow):
        inner = algebra_for(b.cod, potential_of)
        dom = potential_of(b.dom)
        a = fresh_name("a", {c, x})
        carrier = Arrow(dom, inner.carrier)
        structure = Lam(a, dom, inner.add(Var(c), App(Var(x), Var(a))))
        return CostAlgebra(carrier, c, x, structure)
    raise TypeCheckError(f"not a computation type: {b!r}")


# ---------------------------------------------------------------------------
# Surface syntax (CBN PCF plus cost forms)

def parse_pcfc(text: str) -> PcfTerm:
    node = read(text)
    return pcf._parse_term(node, EMPTY_CONTEXT, typecheck_pcfc, allow_cost=True)


print_pcfc = pcf.print_term
