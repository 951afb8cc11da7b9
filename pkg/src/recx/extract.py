"""Recurrence extraction from the intermediate language.

Values get potentials (their size, or the future cost of using them) and
computations get complexities (an immediate cost acting on a potential via
the cost algebra of their type).  The end-user extractors for the two source
variants are the composites of the embeddings with this translation, so the
arithmetic monotonization lives in exactly one place: the calc clause.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import cbpv_lang as cb
from . import pcf_lang as pcf
from . import simplify as simplify_mod
from .embed import embed_cbn_program, embed_cbv_program
from .pcf_lang import (Arith, CPlus, FixCbn, IfZ, Lam, Num, One, Pair,
                       PcfTerm, PcfType, Proj, Prod, TypeCheckError, Zero,
                       subst, subst_many)
from .pcfc_lang import NAT, CostAlgebra, algebra_for, omega


@dataclass(frozen=True)
class ExtractionResult:
    term: PcfTerm
    target_type: PcfType


# ---------------------------------------------------------------------------
# Types

def potential_type(a: cb.CbpvValType) -> PcfType:
    if isinstance(a, cb.VNat):
        return NAT
    if isinstance(a, cb.VProd):
        return Prod(potential_type(a.left), potential_type(a.right))
    if isinstance(a, cb.VThunk):
        return complexity_carrier(a.comp)
    if isinstance(a, cb.VList):
        # A list's potential is its length.
        return NAT
    raise TypeCheckError(f"not a value type: {a!r}")


def complexity_algebra(b: cb.CbpvCompType) -> CostAlgebra:
    return algebra_for(b, potential_type)


def complexity_carrier(b: cb.CbpvCompType) -> PcfType:
    return complexity_algebra(b).carrier


# Applying a structure map textually duplicates its target under projections
# and leaves administrative redexes behind; across nested binds that would
# grow extracted terms exponentially.  These helpers contract
# projection-of-pair and application-of-lambda redexes as they arise, which
# the size order licenses as equalities in both directions.

def _proj(i: int, t: PcfTerm) -> PcfTerm:
    if isinstance(t, Pair):
        return t.fst if i == 1 else t.snd
    return Proj(i, t)


def _app(f: PcfTerm, v: PcfTerm) -> PcfTerm:
    if isinstance(f, Lam):
        return subst(f.body, f.var, v)
    return pcf.App(f, v)


def _alg_add(b: cb.CbpvCompType, cost: PcfTerm, target: PcfTerm) -> PcfTerm:
    """Add a cost to a complexity via the algebra of its computation type."""
    if isinstance(b, cb.CFree):
        return Pair(CPlus(cost, _proj(1, target)), _proj(2, target))
    if isinstance(b, cb.CWith):
        return Pair(_alg_add(b.left, cost, _proj(1, target)),
                    _alg_add(b.right, cost, _proj(2, target)))
    if isinstance(b, cb.CArrow):
        a = pcf.fresh_name("a", pcf.free_vars(cost) | pcf.free_vars(target))
        return Lam(a, potential_type(b.dom),
                   _alg_add(b.cod, cost, _app(target, pcf.Var(a))))
    raise TypeCheckError(f"not a computation type: {b!r}")


# ---------------------------------------------------------------------------
# Terms

def potential_term(ctx: cb.Context, v: cb.CbpvValTerm):
    """Potential of a value term; returns (recurrence, source value type)."""
    if isinstance(v, cb.Var):
        ty = ctx.lookup(v.name)
        if ty is None:
            raise TypeCheckError(f"unbound variable {v.name}")
        return pcf.Var(v.name), ty
    if isinstance(v, cb.Num):
        return Num(v.value), cb.VNAT
    if isinstance(v, cb.VPair):
        p1, t1 = potential_term(ctx, v.fst)
        p2, t2 = potential_term(ctx, v.snd)
        return Pair(p1, p2), cb.VProd(t1, t2)
    if isinstance(v, cb.Thunk):
        q, b = complexity_term(ctx, v.comp)
        return q, cb.VThunk(b)
    if isinstance(v, cb.Nil):
        return Num(0), cb.VList(cb.VNAT)
    if isinstance(v, cb.Cons):
        _, hty = potential_term(ctx, v.head)
        ptail, tty = potential_term(ctx, v.tail)
        if isinstance(v.tail, cb.Nil):
            tty = cb.VList(hty)
        return Arith("add", ptail, Num(1)), tty
    raise TypeCheckError(f"not a value term: {v!r}")


def complexity_term(ctx: cb.Context, m: cb.CbpvCompTerm):
    """Complexity of a computation; returns (recurrence, computation type)."""
    if isinstance(m, cb.Return):
        p, a = potential_term(ctx, m.val)
        return Pair(Zero(), p), cb.CFree(a)
    if isinstance(m, cb.Bind):
        q, fty = complexity_term(ctx, m.comp)
        if not isinstance(fty, cb.CFree):
            raise TypeCheckError(f"bind of non-returner {fty}")
        body, b = complexity_term(ctx.extend(m.var, fty.val), m.body)
        return _alg_add(b, _proj(1, q), subst(body, m.var, _proj(2, q))), b
    if isinstance(m, cb.Force):
        p, ty = potential_term(ctx, m.val)
        if not isinstance(ty, cb.VThunk):
            raise TypeCheckError(f"force of non-thunk {ty}")
        return p, ty.comp
    if isinstance(m, cb.Lam):
        body, b = complexity_term(ctx.extend(m.var, m.annot), m.body)
        return Lam(m.var, potential_type(m.annot), body), cb.CArrow(m.annot, b)
    if isinstance(m, cb.App):
        q, fty = complexity_term(ctx, m.fn)
        if not isinstance(fty, cb.CArrow):
            raise TypeCheckError(f"application of non-function {fty}")
        p, _ = potential_term(ctx, m.arg)
        return pcf.App(q, p), fty.cod
    if isinstance(m, cb.CPair):
        q1, b1 = complexity_term(ctx, m.fst)
        q2, b2 = complexity_term(ctx, m.snd)
        return Pair(q1, q2), cb.CWith(b1, b2)
    if isinstance(m, cb.Proj):
        q, wty = complexity_term(ctx, m.comp)
        if not isinstance(wty, cb.CWith):
            raise TypeCheckError(f"projection from {wty}")
        return Proj(m.index, q), (wty.left if m.index == 1 else wty.right)
    if isinstance(m, cb.Split):
        p, pty = potential_term(ctx, m.val)
        if not isinstance(pty, cb.VProd):
            raise TypeCheckError(f"split of non-pair {pty}")
        inner = ctx.extend(m.var1, pty.left).extend(m.var2, pty.right)
        body, b = complexity_term(inner, m.body)
        return subst_many(body, {m.var1: _proj(1, p), m.var2: _proj(2, p)}), b
    if isinstance(m, cb.IfZ):
        p, _ = potential_term(ctx, m.val)
        q1, b = complexity_term(ctx, m.zero)
        q2, _ = complexity_term(ctx, m.nonzero)
        return IfZ(p, q1, q2), b
    if isinstance(m, cb.Calc):
        pv, _ = potential_term(ctx, m.lhs)
        pw, _ = potential_term(ctx, m.rhs)
        body, b = complexity_term(ctx.extend(m.var, cb.VNAT), m.body)
        rhs_literal = isinstance(m.rhs, cb.Num)
        return subst(body, m.var, _calc_potential(m.op, pv, pw, rhs_literal)), b
    if isinstance(m, cb.Charge):
        q, b = complexity_term(ctx, m.comp)
        return _alg_add(b, One(), q), b
    if isinstance(m, cb.Fix):
        carrier = complexity_carrier(m.annot)
        body, b = complexity_term(ctx.extend(m.var, cb.VThunk(m.annot)), m.body)
        if b != m.annot:
            raise TypeCheckError(f"fix body type {b} != annotation {m.annot}")
        return FixCbn(m.var, carrier, body), b
    if isinstance(m, cb.LCase):
        p, lty = potential_term(ctx, m.val)
        if not isinstance(lty, cb.VList):
            raise TypeCheckError(f"lcase of non-list {lty}")
        qnil, b = complexity_term(ctx, m.nil_branch)
        inner = ctx.extend(m.head_var, lty.elem).extend(m.tail_var, lty)
        qcons, _ = complexity_term(inner, m.cons_branch)
        # Lengths say nothing about element sizes: the head's potential is
        # infinity, which drops out of recurrences that ignore elements.
        qcons = subst_many(qcons, {
            m.head_var: omega(potential_type(lty.elem)),
            m.tail_var: Arith("sub", p, Num(1)),
        })
        return IfZ(p, qnil, qcons), b
    raise TypeCheckError(f"not a computation term: {m!r}")


def _calc_potential(op: str, pv: PcfTerm, pw: PcfTerm,
                    rhs_literal: bool) -> PcfTerm:
    """Monotone upper bound for an arithmetic result.

    Addition and multiplication are monotone, so the potentials combine with
    the same operator.  Subtraction and division are antimonotone on the
    right, so they stay exact only when the source right operand is a
    literal numeral (a literal does not vary, so there is no monotonicity
    obligation) and otherwise collapse to the left potential.  A modulus is
    bounded by the right operand's potential minus one.
    """
    if op in ("add", "mul"):
        return Arith(op, pv, pw)
    if op in ("sub", "div"):
        if rhs_literal:
            return Arith(op, pv, pw)
        return pv
    if op == "mod":
        return Arith("sub", pw, Num(1))
    raise TypeCheckError(f"unknown operator {op}")


def extract_comp(m: cb.CbpvCompTerm) -> ExtractionResult:
    term, b = complexity_term(cb.EMPTY_CONTEXT, m)
    return ExtractionResult(term, complexity_carrier(b))


# ---------------------------------------------------------------------------
# End-user extraction: embed, then extract.

def extract_cbv(t: PcfTerm, simplify: bool = False,
                rules: "simplify_mod.RuleSet | None" = None) -> ExtractionResult:
    emb = embed_cbv_program(t)
    result = extract_comp(emb.term)
    if simplify:
        # The list axioms only come into play for programs that use lists.
        rules = rules or simplify_mod.RuleSet(list_axioms=_uses_lists(t))
        return ExtractionResult(simplify_mod.simplify(result.term, rules),
                                result.target_type)
    return result


def _uses_lists(t: PcfTerm) -> bool:
    if isinstance(t, (pcf.Nil, pcf.Cons, pcf.LCase)):
        return True
    return any(_uses_lists(s) for s in _children(t))


def _children(t: PcfTerm):
    for field in t.__dataclass_fields__:
        v = getattr(t, field)
        if isinstance(v, PcfTerm):
            yield v


def extract_cbn(t: PcfTerm, simplify: bool = False,
                rules: "simplify_mod.RuleSet | None" = None) -> ExtractionResult:
    emb = embed_cbn_program(t)
    result = extract_comp(emb.term)
    if simplify:
        rules = rules or simplify_mod.RuleSet()
        return ExtractionResult(simplify_mod.simplify(result.term, rules),
                                result.target_type)
    return result


def extract(t: PcfTerm, strategy: pcf.Strategy, simplify: bool = False,
            rules=None) -> ExtractionResult:
    if strategy is pcf.Strategy.CBV:
        return extract_cbv(t, simplify, rules)
    return extract_cbn(t, simplify, rules)
