"""The polarized intermediate language: values vs computations.

Value types classify inert data (naturals, eager pairs, thunks, lists);
computation types classify things that run (returners F A, lazy pairs, and
functions).  Variables only ever stand for values.  A single effect, charge,
incurs one unit of cost; everything else is free.
"""

from __future__ import annotations

from dataclasses import dataclass

from .pcf_lang import ARITH_OPS, TypeCheckError, fresh_name
from .sexpr import Atom, ParseError, expect_atom, expect_list, read


# ---------------------------------------------------------------------------
# Types

class CbpvValType:
    def __str__(self):
        return print_val_type(self)


class CbpvCompType:
    def __str__(self):
        return print_comp_type(self)


@dataclass(frozen=True)
class VNat(CbpvValType):
    pass


@dataclass(frozen=True)
class VProd(CbpvValType):
    left: CbpvValType
    right: CbpvValType


@dataclass(frozen=True)
class VThunk(CbpvValType):
    comp: CbpvCompType


@dataclass(frozen=True)
class VList(CbpvValType):
    elem: CbpvValType


@dataclass(frozen=True)
class CFree(CbpvCompType):
    val: CbpvValType


@dataclass(frozen=True)
class CWith(CbpvCompType):
    left: CbpvCompType
    right: CbpvCompType


@dataclass(frozen=True)
class CArrow(CbpvCompType):
    dom: CbpvValType
    cod: CbpvCompType


VNAT = VNat()


# ---------------------------------------------------------------------------
# Terms

class CbpvValTerm:
    def __str__(self):
        return print_val(self)


class CbpvCompTerm:
    def __str__(self):
        return print_comp(self)


@dataclass(frozen=True)
class Var(CbpvValTerm):
    name: str


@dataclass(frozen=True)
class Num(CbpvValTerm):
    value: int


@dataclass(frozen=True)
class VPair(CbpvValTerm):
    fst: CbpvValTerm
    snd: CbpvValTerm


@dataclass(frozen=True)
class Thunk(CbpvValTerm):
    comp: CbpvCompTerm


@dataclass(frozen=True)
class Nil(CbpvValTerm):
    pass


@dataclass(frozen=True)
class Cons(CbpvValTerm):
    head: CbpvValTerm
    tail: CbpvValTerm


@dataclass(frozen=True)
class Return(CbpvCompTerm):
    val: CbpvValTerm


@dataclass(frozen=True)
class Bind(CbpvCompTerm):
    var: str
    comp: CbpvCompTerm
    body: CbpvCompTerm


@dataclass(frozen=True)
class Force(CbpvCompTerm):
    val: CbpvValTerm


@dataclass(frozen=True)
class Lam(CbpvCompTerm):
    var: str
    annot: CbpvValType
    body: CbpvCompTerm


@dataclass(frozen=True)
class App(CbpvCompTerm):
    fn: CbpvCompTerm
    arg: CbpvValTerm


@dataclass(frozen=True)
class CPair(CbpvCompTerm):
    fst: CbpvCompTerm
    snd: CbpvCompTerm


@dataclass(frozen=True)
class Proj(CbpvCompTerm):
    index: int
    comp: CbpvCompTerm


@dataclass(frozen=True)
class Split(CbpvCompTerm):
    val: CbpvValTerm
    var1: str
    var2: str
    body: CbpvCompTerm


@dataclass(frozen=True)
class IfZ(CbpvCompTerm):
    val: CbpvValTerm
    zero: CbpvCompTerm
    nonzero: CbpvCompTerm


@dataclass(frozen=True)
class Calc(CbpvCompTerm):
    """Compute op on two naturals, binding the result in the continuation."""
    var: str
    op: str
    lhs: CbpvValTerm
    rhs: CbpvValTerm
    body: CbpvCompTerm


@dataclass(frozen=True)
class Charge(CbpvCompTerm):
    comp: CbpvCompTerm


@dataclass(frozen=True)
class Fix(CbpvCompTerm):
    """Recursion; the bound variable is the recursive call as a thunk."""
    var: str
    annot: CbpvCompType
    body: CbpvCompTerm


@dataclass(frozen=True)
class LCase(CbpvCompTerm):
    val: CbpvValTerm
    nil_branch: CbpvCompTerm
    head_var: str
    tail_var: str
    cons_branch: CbpvCompTerm


def is_terminal(m: CbpvCompTerm) -> bool:
    """Terminal computations: returners, lazy pairs and lambdas."""
    return isinstance(m, (Return, CPair, Lam))


class PolarityError(TypeCheckError):
    """A computation where a value belongs, or vice versa."""


# ---------------------------------------------------------------------------
# Typing

class Context:
    """Variables may only denote values, so contexts map to value types."""

    __slots__ = ("_bindings",)

    def __init__(self, bindings: dict | None = None):
        self._bindings = dict(bindings) if bindings else {}

    def extend(self, name: str, ty: CbpvValType) -> "Context":
        new = dict(self._bindings)
        new[name] = ty
        return Context(new)

    def lookup(self, name):
        return self._bindings.get(name)

    def __contains__(self, name):
        return name in self._bindings


EMPTY_CONTEXT = Context()


def typecheck_val(ctx: Context, v: CbpvValTerm) -> CbpvValType:
    if isinstance(v, CbpvCompTerm):
        raise PolarityError("computation in value position", None)
    if isinstance(v, Var):
        ty = ctx.lookup(v.name)
        if ty is None:
            raise TypeCheckError(f"unbound variable {v.name}")
        return ty
    if isinstance(v, Num):
        if v.value < 0:
            raise TypeCheckError("numerals are naturals")
        return VNAT
    if isinstance(v, VPair):
        return VProd(typecheck_val(ctx, v.fst), typecheck_val(ctx, v.snd))
    if isinstance(v, Thunk):
        return VThunk(typecheck_comp(ctx, v.comp))
    if isinstance(v, Nil):
        return VList(VNAT)
    if isinstance(v, Cons):
        hty = typecheck_val(ctx, v.head)
        if isinstance(v.tail, Nil):
            return VList(hty)
        tty = typecheck_val(ctx, v.tail)
        if not isinstance(tty, VList) or tty.elem != hty:
            raise TypeCheckError(f"cons of {hty} onto {tty}")
        return tty
    raise PolarityError(f"not a value term: {v!r}")


def typecheck_comp(ctx: Context, m: CbpvCompTerm) -> CbpvCompType:
    if isinstance(m, CbpvValTerm):
        raise PolarityError("value in computation position")
    if isinstance(m, Return):
        return CFree(typecheck_val(ctx, m.val))
    if isinstance(m, Bind):
        mty = typecheck_comp(ctx, m.comp)
        if not isinstance(mty, CFree):
            raise TypeCheckError(f"bind of non-returner {mty}")
        return typecheck_comp(ctx.extend(m.var, mty.val), m.body)
    if isinstance(m, Force):
        vty = typecheck_val(ctx, m.val)
        if not isinstance(vty, VThunk):
            raise TypeCheckError(f"force of non-thunk {vty}")
        return vty.comp
    if isinstance(m, Lam):
        return CArrow(m.annot, typecheck_comp(ctx.extend(m.var, m.annot), m.body))
    if isinstance(m, App):
        fty = typecheck_comp(ctx, m.fn)
        if not isinstance(fty, CArrow):
            raise TypeCheckError(f"application of non-function {fty}")
        aty = typecheck_val(ctx, m.arg)
        if aty != fty.dom:
            raise TypeCheckError(f"argument type {aty} != domain {fty.dom}")
        return fty.cod
    if isinstance(m, CPair):
        return CWith(typecheck_comp(ctx, m.fst), typecheck_comp(ctx, m.snd))
    if isinstance(m, Proj):
        ty = typecheck_comp(ctx, m.comp)
        if not isinstance(ty, CWith):
            raise TypeCheckError(f"projection from non-pair {ty}")
        return ty.left if m.index == 1 else ty.right
    if isinstance(m, Split):
        vty = typecheck_val(ctx, m.val)
        if not isinstance(vty, VProd):
            raise TypeCheckError(f"split of non-pair {vty}")
        inner = ctx.extend(m.var1, vty.left).extend(m.var2, vty.right)
        return typecheck_comp(inner, m.body)
    if isinstance(m, IfZ):
        vty = typecheck_val(ctx, m.val)
        if vty != VNAT:
            raise TypeCheckError(f"ifz scrutinee has type {vty}")
        zty = typecheck_comp(ctx, m.zero)
        nty = typecheck_comp(ctx, m.nonzero)
        if zty != nty:
            raise TypeCheckError(f"ifz branches disagree: {zty} vs {nty}")
        return zty
    if isinstance(m, Calc):
        if m.op not in ARITH_OPS:
            raise TypeCheckError(f"unknown operator {m.op}")
        for side in (m.lhs, m.rhs):
            ty = typecheck_val(ctx, side)
            if ty != VNAT:
                raise TypeCheckError(f"calc operand has type {ty}")
        return typecheck_comp(ctx.extend(m.var, VNAT), m.body)
    if isinstance(m, Charge):
        return typecheck_comp(ctx, m.comp)
    if isinstance(m, Fix):
        body = typecheck_comp(ctx.extend(m.var, VThunk(m.annot)), m.body)
        if body != m.annot:
            raise TypeCheckError(f"fix body has type {body}, annotation says {m.annot}")
        return m.annot
    if isinstance(m, LCase):
        vty = typecheck_val(ctx, m.val)
        if not isinstance(vty, VList):
            raise TypeCheckError(f"lcase scrutinee has type {vty}")
        nil_ty = typecheck_comp(ctx, m.nil_branch)
        inner = ctx.extend(m.head_var, vty.elem).extend(m.tail_var, vty)
        cons_ty = typecheck_comp(inner, m.cons_branch)
        if nil_ty != cons_ty:
            raise TypeCheckError(f"lcase branches disagree: {nil_ty} vs {cons_ty}")
        return nil_ty
    raise PolarityError(f"not a computation term: {m!r}")


# ---------------------------------------------------------------------------
# Free variables and substitution (of value terms only)

def free_vars(t) -> frozenset:
    if isinstance(t, Var):
        return frozenset((t.name,))
    if isinstance(t, (Num, Nil)):
        return frozenset()
    if isinstance(t, VPair):
        return free_vars(t.fst) | free_vars(t.snd)
    if isinstance(t, Thunk):
        return free_vars(t.comp)
    if isinstance(t, Cons):
        return free_vars(t.head) | free_vars(t.tail)
    if isinstance(t, Return):
        return free_vars(t.val)
    if isinstance(t, Bind):
        return free_vars(t.comp) | (free_vars(t.body) - {t.var})
    if isinstance(t, Force):
        return free_vars(t.val)
    if isinstance(t, Lam):
        return free_vars(t.body) - {t.var}
    if isinstance(t, App):
        return free_vars(t.fn) | free_vars(t.arg)
    if isinstance(t, CPair):
        return free_vars(t.fst) | free_vars(t.snd)
    if isinstance(t, Proj):
        return free_vars(t.comp)
    if isinstance(t, Split):
        return free_vars(t.val) | (free_vars(t.body) - {t.var1, t.var2})
    if isinstance(t, IfZ):
        return free_vars(t.val) | free_vars(t.zero) | free_vars(t.nonzero)
    if isinstance(t, Calc):
        return (free_vars(t.lhs) | free_vars(t.rhs)
                | (free_vars(t.body) - {t.var}))
    if isinstance(t, Charge):
        return free_vars(t.comp)
    if isinstance(t, Fix):
        return free_vars(t.body) - {t.var}
    if isinstance(t, LCase):
        return (free_vars(t.val) | free_vars(t.nil_branch)
                | (free_vars(t.cons_branch) - {t.head_var, t.tail_var}))
    raise ValueError(f"unknown term {t!r}")


def subst(t, name: str, repl: CbpvValTerm):
    return subst_many(t, {name: repl})


def subst_many(t, mapping: dict):
    if not mapping:
        return t
    repl_fv = frozenset().union(*(free_vars(v) for v in mapping.values()))
    return _subst(t, dict(mapping), repl_fv)


def _subst(t, mapping, repl_fv):
    if isinstance(t, Var):
        return mapping.get(t.name, t)
    if isinstance(t, (Num, Nil)):
        return t
    if isinstance(t, VPair):
        return VPair(_subst(t.fst, mapping, repl_fv), _subst(t.snd, mapping, repl_fv))
    if isinstance(t, Thunk):
        return Thunk(_subst(t.comp, mapping, repl_fv))
    if isinstance(t, Cons):
        return Cons(_subst(t.head, mapping, repl_fv), _subst(t.tail, mapping, repl_fv))
    if isinstance(t, Return):
        return Return(_subst(t.val, mapping, repl_fv))
    if isinstance(t, Bind):
        comp = _subst(t.comp, mapping, repl_fv)
        (var,), body = _binders((t.var,), t.body, mapping, repl_fv)
        return Bind(var, comp, body)
    if isinstance(t, Force):
        return Force(_subst(t.val, mapping, repl_fv))
    if isinstance(t, Lam):
        (var,), body = _binders((t.var,), t.body, mapping, repl_fv)
        return Lam(var, t.annot, body)
    if isinstance(t, App):
        return App(_subst(t.fn, mapping, repl_fv), _subst(t.arg, mapping, repl_fv))
    if isinstance(t, CPair):
        return CPair(_subst(t.fst, mapping, repl_fv), _subst(t.snd, mapping, repl_fv))
    if isinstance(t, Proj):
        return Proj(t.index, _subst(t.comp, mapping, repl_fv))
    if isinstance(t, Split):
        val = _subst(t.val, mapping, repl_fv)
        (v1, v2), body = _binders((t.var1, t.var2), t.body, mapping, repl_fv)
        return Split(val, v1, v2, body)
    if isinstance(t, IfZ):
        return IfZ(_subst(t.val, mapping, repl_fv),
                   _subst(t.zero, mapping, repl_fv),
                   _subst(t.nonzero, mapping, repl_fv))
    if isinstance(t, Calc):
        lhs = _subst(t.lhs, mapping, repl_fv)
        rhs = _subst(t.rhs, mapping, repl_fv)
        (var,), body = _binders((t.var,), t.body, mapping, repl_fv)
        return Calc(var, t.op, lhs, rhs, body)
    if isinstance(t, Charge):
        return Charge(_subst(t.comp, mapping, repl_fv))
    if isinstance(t, Fix):
        (var,), body = _binders((t.var,), t.body, mapping, repl_fv)
        return Fix(var, t.annot, body)
    if isinstance(t, LCase):
        val = _subst(t.val, mapping, repl_fv)
        nil_b = _subst(t.nil_branch, mapping, repl_fv)
        (h, tl), cons_b = _binders((t.head_var, t.tail_var), t.cons_branch,
                                   mapping, repl_fv)
        return LCase(val, nil_b, h, tl, cons_b)
    raise ValueError(f"unknown term {t!r}")


def _binders(binders, body, mapping, repl_fv):
    inner = {k: v for k, v in mapping.items() if k not in binders}
    if not inner:
        return tuple(binders), body
    new_binders = []
    renames = {}
    body_fv = None
    for b in binders:
        if b in repl_fv:
            if body_fv is None:
                body_fv = free_vars(body)
            avoid = (repl_fv | body_fv | set(inner) | set(new_binders)
                     | set(binders))
            nb = fresh_name(b, avoid)
            renames[b] = Var(nb)
            new_binders.append(nb)
        else:
            new_binders.append(b)
    if renames:
        body = _subst(body, renames, frozenset(renames))
    return tuple(new_binders), _subst(body, inner,
                                      frozenset().union(*(free_vars(v) for v in inner.values())))


# ---------------------------------------------------------------------------
# Alpha-equivalence

def alpha_eq(a, b) -> bool:
    return _alpha(a, b, {}, {}, 0)


def _bind(env_a, env_b, names_a, names_b, depth):
    ea, eb = dict(env_a), dict(env_b)
    for na, nb in zip(names_a, names_b):
        ea[na] = eb[nb] = depth
        depth += 1
    return ea, eb, depth


def _alpha(a, b, env_a, env_b, depth):
    if type(a) is not type(b):
        return False
    if isinstance(a, Var):
        return env_a.get(a.name, a.name) == env_b.get(b.name, b.name)
    if isinstance(a, Num):
        return a.value == b.value
    if isinstance(a, Nil):
        return True
    if isinstance(a, (VPair, CPair)):
        return (_alpha(a.fst, b.fst, env_a, env_b, depth)
                and _alpha(a.snd, b.snd, env_a, env_b, depth))
    if isinstance(a, Thunk):
        return _alpha(a.comp, b.comp, env_a, env_b, depth)
    if isinstance(a, Cons):
        return (_alpha(a.head, b.head, env_a, env_b, depth)
                and _alpha(a.tail, b.tail, env_a, env_b, depth))
    if isinstance(a, Return):
        return _alpha(a.val, b.val, env_a, env_b, depth)
    if isinstance(a, Bind):
        if not _alpha(a.comp, b.comp, env_a, env_b, depth):
            return False
        ea, eb, d = _bind(env_a, env_b, (a.var,), (b.var,), depth)
        return _alpha(a.body, b.body, ea, eb, d)
    if isinstance(a, Force):
        return _alpha(a.val, b.val, env_a, env_b, depth)
    if isinstance(a, Lam):
        if a.annot != b.annot:
            return False
        ea, eb, d = _bind(env_a, env_b, (a.var,), (b.var,), depth)
        return _alpha(a.body, b.body, ea, eb, d)
    if isinstance(a, App):
        return (_alpha(a.fn, b.fn, env_a, env_b, depth)
                and _alpha(a.arg, b.arg, env_a, env_b, depth))
    if isinstance(a, Proj):
        return a.index == b.index and _alpha(a.comp, b.comp, env_a, env_b, depth)
    if isinstance(a, Split):
        if not _alpha(a.val, b.val, env_a, env_b, depth):
            return False
        ea, eb, d = _bind(env_a, env_b, (a.var1, a.var2), (b.var1, b.var2), depth)
        return _alpha(a.body, b.body, ea, eb, d)
    if isinstance(a, IfZ):
        return (_alpha(a.val, b.val, env_a, env_b, depth)
                and _alpha(a.zero, b.zero, env_a, env_b, depth)
                and _alpha(a.nonzero, b.nonzero, env_a, env_b, depth))
    if isinstance(a, Calc):
        if a.op != b.op:
            return False
        if not (_alpha(a.lhs, b.lhs, env_a, env_b, depth)
                and _alpha(a.rhs, b.rhs, env_a, env_b, depth)):
            return False
        ea, eb, d = _bind(env_a, env_b, (a.var,), (b.var,), depth)
        return _alpha(a.body, b.body, ea, eb, d)
    if isinstance(a, Charge):
        return _alpha(a.comp, b.comp, env_a, env_b, depth)
    if isinstance(a, Fix):
        if a.annot != b.annot:
            return False
        ea, eb, d = _bind(env_a, env_b, (a.var,), (b.var,), depth)
        return _alpha(a.body, b.body, ea, eb, d)
    if isinstance(a, LCase):
        if not (_alpha(a.val, b.val, env_a, env_b, depth)
                and _alpha(a.nil_branch, b.nil_branch, env_a, env_b, depth)):
            return False
        ea, eb, d = _bind(env_a, env_b, (a.head_var, a.tail_var),
                          (b.head_var, b.tail_var), depth)
        return _alpha(a.cons_branch, b.cons_branch, ea, eb, d)
    raise ValueError(f"unknown term {a!r}")


# ---------------------------------------------------------------------------
# Charge surgery (harness helpers)

def erase_charges(t):
    """Drop every charge node; the result evaluates with cost 0."""
    return _map_charges(t, lambda charge: charge.comp)


def double_charges(t):
    """Replace each charge with two; observed cost exactly doubles."""
    return _map_charges(t, Charge)


def _map_charges(t, f):
    rec = lambda s: _map_charges(s, f)
    if isinstance(t, (Var, Num, Nil)):
        return t
    if isinstance(t, VPair):
        return VPair(rec(t.fst), rec(t.snd))
    if isinstance(t, Thunk):
        return Thunk(rec(t.comp))
    if isinstance(t, Cons):
        return Cons(rec(t.head), rec(t.tail))
    if isinstance(t, Return):
        return Return(rec(t.val))
    if isinstance(t, Bind):
        return Bind(t.var, rec(t.comp), rec(t.body))
    if isinstance(t, Force):
        return Force(rec(t.val))
    if isinstance(t, Lam):
        return Lam(t.var, t.annot, rec(t.body))
    if isinstance(t, App):
        return App(rec(t.fn), rec(t.arg))
    if isinstance(t, CPair):
        return CPair(rec(t.fst), rec(t.snd))
    if isinstance(t, Proj):
        return Proj(t.index, rec(t.comp))
    if isinstance(t, Split):
        return Split(rec(t.val), t.var1, t.var2, rec(t.body))
    if isinstance(t, IfZ):
        return IfZ(rec(t.val), rec(t.zero), rec(t.nonzero))
    if isinstance(t, Calc):
        return Calc(t.var, t.op, rec(t.lhs), rec(t.rhs), rec(t.body))
    if isinstance(t, Charge):
        return f(Charge(rec(t.comp)))
    if isinstance(t, Fix):
        return Fix(t.var, t.annot, rec(t.body))
    if isinstance(t, LCase):
        return LCase(rec(t.val), rec(t.nil_branch), t.head_var, t.tail_var,
                     rec(t.cons_branch))
    raise ValueError(f"unknown term {t!r}")


# ---------------------------------------------------------------------------
# Printing

def print_val_type(ty: CbpvValType) -> str:
    if isinstance(ty, VNat):
        return "nat"
    if isinstance(ty, VProd):
        return f"(prod {print_val_type(ty.left)} {print_val_type(ty.right)})"
    if isinstance(ty, VThunk):
        return f"(thunk {print_comp_type(ty.comp)})"
    if isinstance(ty, VList):
        return f"(list {print_val_type(ty.elem)})"
    raise ValueError(f"unknown value type {ty!r}")


def print_comp_type(ty: CbpvCompType) -> str:
    if isinstance(ty, CFree):
        return f"(free {print_val_type(ty.val)})"
    if isinstance(ty, CWith):
        return f"(with {print_comp_type(ty.left)} {print_comp_type(ty.right)})"
    if isinstance(ty, CArrow):
        return f"(-> {print_val_type(ty.dom)} {print_comp_type(ty.cod)})"
    raise ValueError(f"unknown computation type {ty!r}")


def print_val(v: CbpvValTerm) -> str:
    if isinstance(v, Var):
        return v.name
    if isinstance(v, Num):
        return f"(num {v.value})"
    if isinstance(v, VPair):
        return f"(pair {print_val(v.fst)} {print_val(v.snd)})"
    if isinstance(v, Thunk):
        return f"(thunk {print_comp(v.comp)})"
    if isinstance(v, Nil):
        return "nil"
    if isinstance(v, Cons):
        return f"(cons {print_val(v.head)} {print_val(v.tail)})"
    raise ValueError(f"unknown value term {v!r}")


def print_comp(m: CbpvCompTerm) -> str:
    if isinstance(m, Return):
        return f"(return {print_val(m.val)})"
    if isinstance(m, Bind):
        return f"(bind ({m.var} {print_comp(m.comp)}) {print_comp(m.body)})"
    if isinstance(m, Force):
        return f"(force {print_val(m.val)})"
    if isinstance(m, Lam):
        return f"(lam ({m.var} {print_val_type(m.annot)}) {print_comp(m.body)})"
    if isinstance(m, App):
        return f"(app {print_comp(m.fn)} {print_val(m.arg)})"
    if isinstance(m, CPair):
        return f"(cpair {print_comp(m.fst)} {print_comp(m.snd)})"
    if isinstance(m, Proj):
        return f"(cproj{m.index} {print_comp(m.comp)})"
    if isinstance(m, Split):
        return f"(split {print_val(m.val)} ({m.var1} {m.var2}) {print_comp(m.body)})"
    if isinstance(m, IfZ):
        return f"(ifz {print_val(m.val)} {print_comp(m.zero)} {print_comp(m.nonzero)})"
    if isinstance(m, Calc):
        return (f"(calc ({m.var} {m.op} {print_val(m.lhs)} {print_val(m.rhs)}) "
                f"{print_comp(m.body)})")
    if isinstance(m, Charge):
        return f"(charge {print_comp(m.comp)})"
    if isinstance(m, Fix):
        return f"(cfix ({m.var} {print_comp_type(m.annot)}) {print_comp(m.body)})"
    if isinstance(m, LCase):
        return (f"(lcase {print_val(m.val)} {print_comp(m.nil_branch)} "
                f"({m.head_var} {m.tail_var} {print_comp(m.cons_branch)}))")
    raise ValueError(f"unknown computation term {m!r}")


# ---------------------------------------------------------------------------
# Parsing

def parse_comp_text(text: str) -> CbpvCompTerm:
    return _parse_comp(read(text))


def parse_val_text(text: str) -> CbpvValTerm:
    return _parse_val(read(text))


def _parse_val_type(node) -> CbpvValType:
    if isinstance(node, Atom):
        if node.text == "nat":
            return VNAT
        raise ParseError(f"unknown value type '{node.text}'", node.line, node.col)
    head = expect_atom(node.items[0], "type keyword")
    args = node.items[1:]
    if head.text == "prod" and len(args) == 2:
        return VProd(_parse_val_type(args[0]), _parse_val_type(args[1]))
    if head.text == "thunk" and len(args) == 1:
        return VThunk(_parse_comp_type(args[0]))
    if head.text == "list" and len(args) == 1:
        return VList(_parse_val_type(args[0]))
    raise ParseError(f"bad value type '({head.text} ...)'", node.line, node.col)


def _parse_comp_type(node) -> CbpvCompType:
    lst = expect_list(node, "computation type")
    head = expect_atom(lst.items[0], "type keyword")
    args = lst.items[1:]
    if head.text == "free" and len(args) == 1:
        return CFree(_parse_val_type(args[0]))
    if head.text == "with" and len(args) == 2:
        return CWith(_parse_comp_type(args[0]), _parse_comp_type(args[1]))
    if head.text == "->" and len(args) == 2:
        return CArrow(_parse_val_type(args[0]), _parse_comp_type(args[1]))
    raise ParseError(f"bad computation type '({head.text} ...)'", node.line, node.col)


def _parse_val(node) -> CbpvValTerm:
    from .pcf_lang import is_identifier
    if isinstance(node, Atom):
        if node.text == "nil":
            return Nil()
        if is_identifier(node.text):
            return Var(node.text)
        raise ParseError(f"unexpected atom '{node.text}'", node.line, node.col)
    head = expect_atom(node.items[0], "value keyword")
    kw, args = head.text, node.items[1:]
    if kw == "num" and len(args) == 1:
        lit = expect_atom(args[0], "numeral")
        if not lit.text.isdigit():
            raise ParseError(f"bad numeral '{lit.text}'", lit.line, lit.col)
        return Num(int(lit.text))
    if kw == "pair" and len(args) == 2:
        return VPair(_parse_val(args[0]), _parse_val(args[1]))
    if kw == "thunk" and len(args) == 1:
        return Thunk(_parse_comp(args[0]))
    if kw == "cons" and len(args) == 2:
        return Cons(_parse_val(args[0]), _parse_val(args[1]))
    raise ParseError(f"unknown value form '{kw}'", node.line, node.col)


def _parse_comp(node) -> CbpvCompTerm:
    from .pcf_lang import is_identifier
    lst = expect_list(node, "computation")
    if not lst.items:
        raise ParseError("empty form", lst.line, lst.col)
    head = expect_atom(lst.items[0], "computation keyword")
    kw, args = head.text, lst.items[1:]

    def arity(n):
        if len(args) != n:
            raise ParseError(f"'{kw}' takes {n} arguments, got {len(args)}",
                             lst.line, lst.col)

    if kw == "return":
        arity(1)
        return Return(_parse_val(args[0]))
    if kw == "bind":
        arity(2)
        binder = expect_list(args[0], "binding (x M)")
        if len(binder.items) != 2:
            raise ParseError("bind binding is (x M)", binder.line, binder.col)
        x = expect_atom(binder.items[0], "variable").text
        return Bind(x, _parse_comp(binder.items[1]), _parse_comp(args[1]))
    if kw == "force":
        arity(1)
        return Force(_parse_val(args[0]))
    if kw == "lam":
        arity(2)
        binder = expect_list(args[0], "binder (x A)")
        x = expect_atom(binder.items[0], "variable").text
        return Lam(x, _parse_val_type(binder.items[1]), _parse_comp(args[1]))
    if kw == "app":
        arity(2)
        return App(_parse_comp(args[0]), _parse_val(args[1]))
    if kw == "cpair":
        arity(2)
        return CPair(_parse_comp(args[0]), _parse_comp(args[1]))
    if kw in ("cproj1", "cproj2"):
        arity(1)
        return Proj(1 if kw == "cproj1" else 2, _parse_comp(args[0]))
    if kw == "split":
        arity(3)
        pair_binder = expect_list(args[1], "binder (x1 x2)")
        x1 = expect_atom(pair_binder.items[0], "variable").text
        x2 = expect_atom(pair_binder.items[1], "variable").text
        return Split(_parse_val(args[0]), x1, x2, _parse_comp(args[2]))
    if kw == "ifz":
        arity(3)
        return IfZ(_parse_val(args[0]), _parse_comp(args[1]), _parse_comp(args[2]))
    if kw == "calc":
        arity(2)
        form = expect_list(args[0], "calc binding (v op V W)")
        if len(form.items) != 4:
            raise ParseError("calc binding is (v op V W)", form.line, form.col)
        v = expect_atom(form.items[0], "variable").text
        op = expect_atom(form.items[1], "operator").text
        if op not in ARITH_OPS:
            raise ParseError(f"unknown operator '{op}'", form.line, form.col)
        return Calc(v, op, _parse_val(form.items[2]),
                    _parse_val(form.items[3]), _parse_comp(args[1]))
    if kw == "charge":
        arity(1)
        return Charge(_parse_comp(args[0]))
    if kw == "cfix":
        arity(2)
        binder = expect_list(args[0], "binder (x B)")
        x = expect_atom(binder.items[0], "variable").text
        return Fix(x, _parse_comp_type(binder.items[1]), _parse_comp(args[1]))
    if kw == "lcase":
        arity(3)
        branch = expect_list(args[2], "cons branch (h t M)")
        if len(branch.items) != 3:
            raise ParseError("lcase cons branch is (h t M)", branch.line, branch.col)
        h = expect_atom(branch.items[0], "variable").text
        tl = expect_atom(branch.items[1], "variable").text
        return LCase(_parse_val(args[0]), _parse_comp(args[1]), h, tl,
                     _parse_comp(branch.items[2]))
    raise ParseError(f"unknown computation form '{kw}'", lst.line, lst.col)
