"""Cost-preserving embeddings of both source variants into the polarized IR.

A charge is inserted exactly where the source machine charges a unit, and the
two machines must then agree on cost to the exact natural number; the
differential suite in the workbench enforces this.

The two translations charge in different places, mirroring how each variant
observes results:

* call-by-value terms are returners, and the unit for an application or a
  projection is charged at the elimination site;
* call-by-name types are computation types, and the unit is charged at the
  introduction site (inside a lambda body, on each lazy-pair component), so
  it fires when the surrounding elimination runs the body.

Operands that are already values are passed directly instead of being bound
and returned.  Binding a returner costs nothing, so this does not change any
cost, but it keeps literal numerals visible to the recurrence extractor,
whose subtraction/division clause is exact only against a literal.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import cbpv_lang as cb
from . import pcf_lang as pcf
from .pcf_lang import PcfTerm, PcfType, Strategy, TypeCheckError, fresh_name


class UnsupportedType(TypeCheckError):
    """Lists under call-by-name have no embedding here."""


@dataclass(frozen=True)
class EmbeddingResult:
    term: cb.CbpvCompTerm
    source_type: PcfType
    target_type: cb.CbpvCompType


def _ground_seq(operands, t, make, embed_fn, is_inline, inline_fn):
    """Evaluate operands left to right, binding only those that are not
    already values, then build the continuation from the resulting value
    terms."""
    avoid = set(pcf.free_vars(t)) | {"v"}
    vals, binds = [], []
    for op in operands:
        if is_inline(op):
            vals.append(inline_fn(op))
        else:
            name = fresh_name("u", avoid)
            avoid.add(name)
            binds.append((name, embed_fn(op)))
            vals.append(cb.Var(name))
    out = make(vals)
    for name, comp in reversed(binds):
        out = cb.Bind(name, comp, out)
    return out


# ---------------------------------------------------------------------------
# Call-by-name

def embed_cbn_type(a: PcfType) -> cb.CbpvCompType:
    if isinstance(a, pcf.Nat):
        return cb.CFree(cb.VNAT)
    if isinstance(a, pcf.Prod):
        return cb.CWith(embed_cbn_type(a.left), embed_cbn_type(a.right))
    if isinstance(a, pcf.Arrow):
        return cb.CArrow(cb.VThunk(embed_cbn_type(a.dom)), embed_cbn_type(a.cod))
    if isinstance(a, pcf.ListT):
        raise UnsupportedType("no CBN lists")
    raise TypeCheckError(f"not a CBN source type: {a}")


def _is_cbn_inline(t: PcfTerm) -> bool:
    # The only CBN values at the ground type are numerals.
    return isinstance(t, pcf.Num)


def _embed_cbn_inline(t: PcfTerm) -> cb.CbpvValTerm:
    return cb.Num(t.value)


def embed_cbn(t: PcfTerm) -> cb.CbpvCompTerm:
    """Translate a CBN term; free variables become thunk-typed variables."""
    if isinstance(t, pcf.Var):
        return cb.Force(cb.Var(t.name))
    if isinstance(t, pcf.Num):
        return cb.Return(cb.Num(t.value))
    if isinstance(t, pcf.Arith):
        return _ground_seq(
            (t.lhs, t.rhs), t,
            lambda vs: cb.Calc("v", t.op, vs[0], vs[1], cb.Return(cb.Var("v"))),
            embed_cbn, _is_cbn_inline, _embed_cbn_inline)
    if isinstance(t, pcf.IfZ):
        return _ground_seq(
            (t.scrut,), t,
            lambda vs: cb.IfZ(vs[0], embed_cbn(t.zero), embed_cbn(t.nonzero)),
            embed_cbn, _is_cbn_inline, _embed_cbn_inline)
    if isinstance(t, pcf.Pair):
        # Lazy pair: the unit for a future projection sits on each component.
        return cb.CPair(cb.Charge(embed_cbn(t.fst)), cb.Charge(embed_cbn(t.snd)))
    if isinstance(t, pcf.Proj):
        return cb.Proj(t.index, embed_cbn(t.arg))
    if isinstance(t, pcf.Lam):
        # The unit for a future application sits on the body.
        return cb.Lam(t.var, cb.VThunk(embed_cbn_type(t.annot)),
                      cb.Charge(embed_cbn(t.body)))
    if isinstance(t, pcf.App):
        return cb.App(embed_cbn(t.fn), cb.Thunk(embed_cbn(t.arg)))
    if isinstance(t, pcf.FixCbn):
        return cb.Fix(t.var, embed_cbn_type(t.annot), embed_cbn(t.body))
    raise TypeCheckError(f"not a CBN term: {pcf.print_term(t)}")


def embed_cbn_program(t: PcfTerm) -> EmbeddingResult:
    src = pcf.typecheck_closed(t, Strategy.CBN)
    term = embed_cbn(t)
    return EmbeddingResult(term, src, embed_cbn_type(src))


# ---------------------------------------------------------------------------
# Call-by-value

def embed_cbv_type(a: PcfType) -> cb.CbpvValType:
    if isinstance(a, pcf.Nat):
        return cb.VNAT
    if isinstance(a, pcf.Prod):
        return cb.VProd(embed_cbv_type(a.left), embed_cbv_type(a.right))
    if isinstance(a, pcf.Arrow):
        return cb.VThunk(cb.CArrow(embed_cbv_type(a.dom),
                                   cb.CFree(embed_cbv_type(a.cod))))
    if isinstance(a, pcf.ListT):
        return cb.VList(embed_cbv_type(a.elem))
    raise TypeCheckError(f"not a CBV source type: {a}")


def is_cbv_value(t: PcfTerm) -> bool:
    if isinstance(t, (pcf.Var, pcf.Num, pcf.Lam, pcf.RecCbv, pcf.Nil)):
        return True
    if isinstance(t, pcf.Pair):
        return is_cbv_value(t.fst) and is_cbv_value(t.snd)
    if isinstance(t, pcf.Cons):
        return is_cbv_value(t.head) and is_cbv_value(t.tail)
    return False


def embed_cbv_val(v: PcfTerm) -> cb.CbpvValTerm:
    """Value translation; CBV variables stand for values."""
    if isinstance(v, pcf.Var):
        return cb.Var(v.name)
    if isinstance(v, pcf.Num):
        return cb.Num(v.value)
    if isinstance(v, pcf.Pair):
        return cb.VPair(embed_cbv_val(v.fst), embed_cbv_val(v.snd))
    if isinstance(v, pcf.Lam):
        return cb.Thunk(cb.Lam(v.var, embed_cbv_type(v.annot), embed_cbv(v.body)))
    if isinstance(v, pcf.RecCbv):
        arrow = cb.CArrow(embed_cbv_type(v.dom), cb.CFree(embed_cbv_type(v.cod)))
        return cb.Thunk(cb.Fix(v.fn, arrow,
                               cb.Lam(v.var, embed_cbv_type(v.dom),
                                      embed_cbv(v.body))))
    if isinstance(v, pcf.Nil):
        return cb.Nil()
    if isinstance(v, pcf.Cons):
        return cb.Cons(embed_cbv_val(v.head), embed_cbv_val(v.tail))
    raise TypeCheckError(f"not a CBV value: {pcf.print_term(v)}")


def _seq_cbv(operands, t, make):
    return _ground_seq(operands, t, make, embed_cbv, is_cbv_value, embed_cbv_val)


def embed_cbv(t: PcfTerm) -> cb.CbpvCompTerm:
    """Term translation; every CBV term becomes a returner."""
    if is_cbv_value(t):
        return cb.Return(embed_cbv_val(t))
    if isinstance(t, pcf.Arith):
        return _seq_cbv(
            (t.lhs, t.rhs), t,
            lambda vs: cb.Calc("v", t.op, vs[0], vs[1], cb.Return(cb.Var("v"))))
    if isinstance(t, pcf.IfZ):
        return _seq_cbv(
            (t.scrut,), t,
            lambda vs: cb.IfZ(vs[0], embed_cbv(t.zero), embed_cbv(t.nonzero)))
    if isinstance(t, pcf.Pair):
        return _seq_cbv((t.fst, t.snd), t,
                        lambda vs: cb.Return(cb.VPair(vs[0], vs[1])))
    if isinstance(t, pcf.Proj):
        def make(vs):
            x1 = fresh_name("w1", pcf.free_vars(t))
            x2 = fresh_name("w2", pcf.free_vars(t) | {x1})
            picked = cb.Var(x1) if t.index == 1 else cb.Var(x2)
            return cb.Split(vs[0], x1, x2, cb.Charge(cb.Return(picked)))
        return _seq_cbv((t.arg,), t, make)
    if isinstance(t, pcf.App):
        return _seq_cbv(
            (t.fn, t.arg), t,
            lambda vs: cb.Charge(cb.App(cb.Force(vs[0]), vs[1])))
    if isinstance(t, pcf.Cons):
        return _seq_cbv((t.head, t.tail), t,
                        lambda vs: cb.Return(cb.Cons(vs[0], vs[1])))
    if isinstance(t, pcf.LCase):
        return _seq_cbv(
            (t.scrut,), t,
            lambda vs: cb.LCase(vs[0], embed_cbv(t.nil_branch),
                                t.head_var, t.tail_var,
                                embed_cbv(t.cons_branch)))
    raise TypeCheckError(f"not a CBV term: {pcf.print_term(t)}")


def embed_cbv_program(t: PcfTerm) -> EmbeddingResult:
    src = pcf.typecheck_closed(t, Strategy.CBV)
    term = embed_cbv(t)
    return EmbeddingResult(term, src, cb.CFree(embed_cbv_type(src)))


def embed(t: PcfTerm, strategy: Strategy) -> EmbeddingResult:
    if strategy is Strategy.CBV:
        return embed_cbv_program(t)
    return embed_cbn_program(t)


def embed_context(ctx: pcf.TypingContext, strategy: Strategy) -> cb.Context:
    out = cb.EMPTY_CONTEXT
    for name in ctx.names():
        ty = ctx.lookup(name)
        if strategy is Strategy.CBV:
            out = out.extend(name, embed_cbv_type(ty))
        else:
            out = out.extend(name, cb.VThunk(embed_cbn_type(ty)))
    return out
