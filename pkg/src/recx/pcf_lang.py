"""Source language: a PCF with flat naturals, products, functions and CBV lists.

Two variants share one term vocabulary and differ only in how fixed points are
formed: the call-by-name variant has `fix` at every type, the call-by-value
variant has `rec` (recursive functions) at arrow types only, plus eager lists.

This module also hosts the constructors that the recurrence language adds on
top of the CBN fragment (the cost type `C` with `czero`/`cone`/`cplus`); they
share substitution, alpha-equivalence and printing, but `typecheck_pcf`
rejects them.  Numerals are arbitrary-precision naturals; subtraction is
truncated (monus) and division/modulus are totalized with x/0 = x mod 0 = 0.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass

from .sexpr import Atom, ParseError, expect_atom, expect_list, read


# ---------------------------------------------------------------------------
# Types

class PcfType:
    """Base class for source- and recurrence-language types."""

    def __str__(self):
        return print_type(self)


@dataclass(frozen=True)
class Nat(PcfType):
    pass


@dataclass(frozen=True)
class Cost(PcfType):
    """The cost type of the recurrence language; not a PCF type."""


@dataclass(frozen=True)
class Prod(PcfType):
    left: PcfType
    right: PcfType


@dataclass(frozen=True)
class Arrow(PcfType):
    dom: PcfType
    cod: PcfType


@dataclass(frozen=True)
class ListT(PcfType):
    elem: PcfType


NAT = Nat()
COST = Cost()


def is_pcf_type(ty: PcfType) -> bool:
    """True when ty mentions no Cost (i.e. is a type of the source language)."""
    if isinstance(ty, Nat):
        return True
    if isinstance(ty, Cost):
        return False
    if isinstance(ty, Prod):
        return is_pcf_type(ty.left) and is_pcf_type(ty.right)
    if isinstance(ty, Arrow):
        return is_pcf_type(ty.dom) and is_pcf_type(ty.cod)
    if isinstance(ty, ListT):
        return is_pcf_type(ty.elem)
    return False


# ---------------------------------------------------------------------------
# Terms

class PcfTerm:
    def __str__(self):
        return print_term(self)


@dataclass(frozen=True)
class Var(PcfTerm):
    name: str


@dataclass(frozen=True)
class Num(PcfTerm):
    value: int


ARITH_OPS = ("add", "sub", "mul", "div", "mod")


@dataclass(frozen=True)
class Arith(PcfTerm):
    op: str
    lhs: PcfTerm
    rhs: PcfTerm


@dataclass(frozen=True)
class IfZ(PcfTerm):
    scrut: PcfTerm
    zero: PcfTerm
    nonzero: PcfTerm


@dataclass(frozen=True)
class Pair(PcfTerm):
    fst: PcfTerm
    snd: PcfTerm


@dataclass(frozen=True)
class Proj(PcfTerm):
    index: int  # 1 or 2
    arg: PcfTerm


@dataclass(frozen=True)
class Lam(PcfTerm):
    var: str
    annot: PcfType
    body: PcfTerm


@dataclass(frozen=True)
class App(PcfTerm):
    fn: PcfTerm
    arg: PcfTerm


@dataclass(frozen=True)
class FixCbn(PcfTerm):
    """CBN fixed point, legal at every type."""
    var: str
    annot: PcfType
    body: PcfTerm


@dataclass(frozen=True)
class RecCbv(PcfTerm):
    """CBV recursive function: fn is in scope in body at type dom -> cod."""
    fn: str
    var: str
    dom: PcfType
    cod: PcfType
    body: PcfTerm


@dataclass(frozen=True)
class Nil(PcfTerm):
    pass


@dataclass(frozen=True)
class Cons(PcfTerm):
    head: PcfTerm
    tail: PcfTerm


@dataclass(frozen=True)
class LCase(PcfTerm):
    scrut: PcfTerm
    nil_branch: PcfTerm
    head_var: str
    tail_var: str
    cons_branch: PcfTerm


# Recurrence-language cost constructors (rejected by typecheck_pcf).

@dataclass(frozen=True)
class Zero(PcfTerm):
    pass


@dataclass(frozen=True)
class One(PcfTerm):
    pass


@dataclass(frozen=True)
class CPlus(PcfTerm):
    lhs: PcfTerm
    rhs: PcfTerm


class Strategy(enum.Enum):
    CBV = "cbv"
    CBN = "cbn"


# ---------------------------------------------------------------------------
# Errors

class TypeCheckError(Exception):
    def __init__(self, msg: str, term: PcfTerm | None = None):
        if term is not None:
            msg = f"{msg} (in {print_term(term)})"
        super().__init__(msg)
        self.term = term


class StrategyError(TypeCheckError):
    """A fixed-point former used under the wrong evaluation strategy."""


# ---------------------------------------------------------------------------
# Typing context

class TypingContext:
    """Immutable variable -> type map; extension shadows older bindings."""

    __slots__ = ("_bindings",)

    def __init__(self, bindings: dict | None = None):
        self._bindings = dict(bindings) if bindings else {}

    def extend(self, name: str, ty: PcfType) -> "TypingContext":
        new = dict(self._bindings)
        new[name] = ty
        return TypingContext(new)

    def lookup(self, name: str):
        return self._bindings.get(name)

    def names(self):
        return self._bindings.keys()

    def __contains__(self, name: str) -> bool:
        return name in self._bindings

    def __len__(self) -> int:
        return len(self._bindings)


EMPTY_CONTEXT = TypingContext()


# ---------------------------------------------------------------------------
# Shared arithmetic: the single implementation both machines must use.

def apply_arith(op: str, a: int, b: int) -> int:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b if a >= b else 0
    if op == "mul":
        return a * b
    if op == "div":
        return a // b if b != 0 else 0
    if op == "mod":
        return a % b if b != 0 else 0
    raise ValueError(f"unknown arithmetic operator {op!r}")


# ---------------------------------------------------------------------------
# Typechecking

def typecheck_pcf(ctx: TypingContext, t: PcfTerm, strategy: Strategy) -> PcfType:
    """Return the unique type of t, or raise TypeCheckError/StrategyError.

    Typing is syntax-directed; annotations on binders make it a total
    function of the tree.
    """
    if isinstance(t, Var):
        ty = ctx.lookup(t.name)
        if ty is None:
            raise TypeCheckError(f"unbound variable {t.name}", t)
        return ty
    if isinstance(t, Num):
        if t.value < 0:
            raise TypeCheckError("numerals are naturals", t)
        return NAT
    if isinstance(t, Arith):
        if t.op not in ARITH_OPS:
            raise TypeCheckError(f"unknown operator {t.op}", t)
        _expect(ctx, t.lhs, NAT, strategy)
        _expect(ctx, t.rhs, NAT, strategy)
        return NAT
    if isinstance(t, IfZ):
        _expect(ctx, t.scrut, NAT, strategy)
        ty = typecheck_pcf(ctx, t.zero, strategy)
        ty2 = typecheck_pcf(ctx, t.nonzero, strategy)
        if ty != ty2:
            raise TypeCheckError(f"ifz branches disagree: {ty} vs {ty2}", t)
        return ty
    if isinstance(t, Pair):
        return Prod(typecheck_pcf(ctx, t.fst, strategy),
                    typecheck_pcf(ctx, t.snd, strategy))
    if isinstance(t, Proj):
        ty = typecheck_pcf(ctx, t.arg, strategy)
        if not isinstance(ty, Prod):
            raise TypeCheckError(f"projection from non-product {ty}", t)
        return ty.left if t.index == 1 else ty.right
    if isinstance(t, Lam):
        _check_annot(t.annot, t)
        body = typecheck_pcf(ctx.extend(t.var, t.annot), t.body, strategy)
        return Arrow(t.annot, body)
    if isinstance(t, App):
        fty = typecheck_pcf(ctx, t.fn, strategy)
        if not isinstance(fty, Arrow):
            raise TypeCheckError(f"application of non-function {fty}", t)
        aty = typecheck_pcf(ctx, t.arg, strategy)
        if aty != fty.dom:
            raise TypeCheckError(f"argument type {aty} != domain {fty.dom}", t)
        return fty.cod
    if isinstance(t, FixCbn):
        if strategy is Strategy.CBV:
            raise StrategyError("fix is call-by-name only; CBV recursion uses rec at function types", t)
        _check_annot(t.annot, t)
        body = typecheck_pcf(ctx.extend(t.var, t.annot), t.body, strategy)
        if body != t.annot:
            raise TypeCheckError(f"fix body has type {body}, annotation says {t.annot}", t)
        return t.annot
    if isinstance(t, RecCbv):
        if strategy is Strategy.CBN:
            raise StrategyError("rec is call-by-value only", t)
        _check_annot(t.dom, t)
        _check_annot(t.cod, t)
        inner = ctx.extend(t.fn, Arrow(t.dom, t.cod)).extend(t.var, t.dom)
        body = typecheck_pcf(inner, t.body, strategy)
        if body != t.cod:
            raise TypeCheckError(f"rec body has type {body}, annotation says {t.cod}", t)
        return Arrow(t.dom, t.cod)
    if isinstance(t, (Nil, Cons, LCase)):
        if strategy is Strategy.CBN:
            raise StrategyError("lists are call-by-value only", t)
        if isinstance(t, Nil):
            # Lists are monomorphic per program; a bare nil with no cons hint
            # is given element type nat.
            return ListT(NAT)
        if isinstance(t, Cons):
            hty = typecheck_pcf(ctx, t.head, strategy)
            tty = _list_type_of(ctx, t.tail, strategy, hty)
            if tty.elem != hty:
                raise TypeCheckError(f"cons head {hty} vs tail elements {tty.elem}", t)
            return tty
        sty = typecheck_pcf(ctx, t.scrut, strategy)
        if not isinstance(sty, ListT):
            raise TypeCheckError(f"lcase scrutinee has non-list type {sty}", t)
        nil_ty = typecheck_pcf(ctx, t.nil_branch, strategy)
        inner = ctx.extend(t.head_var, sty.elem).extend(t.tail_var, sty)
        cons_ty = typecheck_pcf(inner, t.cons_branch, strategy)
        if nil_ty != cons_ty:
            raise TypeCheckError(f"lcase branches disagree: {nil_ty} vs {cons_ty}", t)
        return nil_ty
    if isinstance(t, (Zero, One, CPlus)):
        raise TypeCheckError("cost constructors belong to the recurrence language", t)
    raise TypeCheckError(f"unknown term {t!r}", t)


def _expect(ctx, t, want, strategy):
    got = typecheck_pcf(ctx, t, strategy)
    if got != want:
        raise TypeCheckError(f"expected {want}, got {got}", t)


def _check_annot(ty, t):
    if not is_pcf_type(ty):
        raise TypeCheckError(f"annotation {ty} is not a source-language type", t)


def _list_type_of(ctx, tail, strategy, elem_hint) -> ListT:
    # Bare nil is only typeable as a tail/branch; give it the hinted type.
    if isinstance(tail, Nil):
        return ListT(elem_hint)
    ty = typecheck_pcf(ctx, tail, strategy)
    if not isinstance(ty, ListT):
        raise TypeCheckError(f"cons tail has non-list type {ty}", tail)
    return ty


def typecheck_closed(t: PcfTerm, strategy: Strategy) -> PcfType:
    return typecheck_pcf(EMPTY_CONTEXT, t, strategy)


# ---------------------------------------------------------------------------
# Free variables, substitution, alpha-equivalence

def free_vars(t: PcfTerm) -> frozenset:
    if isinstance(t, Var):
        return frozenset((t.name,))
    if isinstance(t, (Num, Nil, Zero, One)):
        return frozenset()
    if isinstance(t, (Arith, CPlus)):
        return free_vars(t.lhs) | free_vars(t.rhs)
    if isinstance(t, IfZ):
        return free_vars(t.scrut) | free_vars(t.zero) | free_vars(t.nonzero)
    if isinstance(t, Pair):
        return free_vars(t.fst) | free_vars(t.snd)
    if isinstance(t, Proj):
        return free_vars(t.arg)
    if isinstance(t, Lam):
        return free_vars(t.body) - {t.var}
    if isinstance(t, App):
        return free_vars(t.fn) | free_vars(t.arg)
    if isinstance(t, FixCbn):
        return free_vars(t.body) - {t.var}
    if isinstance(t, RecCbv):
        return free_vars(t.body) - {t.fn, t.var}
    if isinstance(t, Cons):
        return free_vars(t.head) | free_vars(t.tail)
    if isinstance(t, LCase):
        return (free_vars(t.scrut) | free_vars(t.nil_branch)
                | (free_vars(t.cons_branch) - {t.head_var, t.tail_var}))
    raise ValueError(f"unknown term {t!r}")


def fresh_name(base: str, avoid) -> str:
    if base not in avoid:
        return base
    stem = base.rstrip("0123456789") or "x"
    k = 1
    while f"{stem}{k}" in avoid:
        k += 1
    return f"{stem}{k}"


def subst(t: PcfTerm, name: str, repl: PcfTerm) -> PcfTerm:
    """Capture-avoiding substitution of repl for free occurrences of name."""
    return subst_many(t, {name: repl})


def subst_many(t: PcfTerm, mapping: dict) -> PcfTerm:
    mapping = {k: v for k, v in mapping.items()}
    if not mapping:
        return t
    repl_fv = frozenset().union(*(free_vars(v) for v in mapping.values()))
    return _subst(t, mapping, repl_fv)


def _subst(t, mapping, repl_fv):
    if isinstance(t, Var):
        return mapping.get(t.name, t)
    if isinstance(t, (Num, Nil, Zero, One)):
        return t
    if isinstance(t, Arith):
        return Arith(t.op, _subst(t.lhs, mapping, repl_fv), _subst(t.rhs, mapping, repl_fv))
    if isinstance(t, CPlus):
        return CPlus(_subst(t.lhs, mapping, repl_fv), _subst(t.rhs, mapping, repl_fv))
    if isinstance(t, IfZ):
        return IfZ(_subst(t.scrut, mapping, repl_fv),
                   _subst(t.zero, mapping, repl_fv),
                   _subst(t.nonzero, mapping, repl_fv))
    if isinstance(t, Pair):
        return Pair(_subst(t.fst, mapping, repl_fv), _subst(t.snd, mapping, repl_fv))
    if isinstance(t, Proj):
        return Proj(t.index, _subst(t.arg, mapping, repl_fv))
    if isinstance(t, App):
        return App(_subst(t.fn, mapping, repl_fv), _subst(t.arg, mapping, repl_fv))
    if isinstance(t, Cons):
        return Cons(_subst(t.head, mapping, repl_fv), _subst(t.tail, mapping, repl_fv))
    if isinstance(t, Lam):
        binders, body = _under_binders((t.var,), t.body, mapping, repl_fv)
        return Lam(binders[0], t.annot, body)
    if isinstance(t, FixCbn):
        binders, body = _under_binders((t.var,), t.body, mapping, repl_fv)
        return FixCbn(binders[0], t.annot, body)
    if isinstance(t, RecCbv):
        binders, body = _under_binders((t.fn, t.var), t.body, mapping, repl_fv)
        return RecCbv(binders[0], binders[1], t.dom, t.cod, body)
    if isinstance(t, LCase):
        scrut = _subst(t.scrut, mapping, repl_fv)
        nil_b = _subst(t.nil_branch, mapping, repl_fv)
        binders, cons_b = _under_binders((t.head_var, t.tail_var), t.cons_branch,
                                         mapping, repl_fv)
        return LCase(scrut, nil_b, binders[0], binders[1], cons_b)
    raise ValueError(f"unknown term {t!r}")


def _under_binders(binders, body, mapping, repl_fv):
    """Descend under binders: drop shadowed entries, rename to avoid capture."""
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
            avoid = repl_fv | body_fv | set(inner) | set(new_binders) | set(binders)
            nb = fresh_name(b, avoid)
            renames[b] = Var(nb)
            new_binders.append(nb)
        else:
            new_binders.append(b)
    if renames:
        body = _subst(body, renames, frozenset(renames))
    inner_fv = frozenset().union(*(free_vars(v) for v in inner.values()))
    return tuple(new_binders), _subst(body, inner, inner_fv)


def alpha_eq(a: PcfTerm, b: PcfTerm) -> bool:
    """Structural equality up to renaming of bound variables."""
    return _alpha(a, b, {}, {}, 0)


def _alpha(a, b, env_a, env_b, depth):
    if type(a) is not type(b):
        return False
    if isinstance(a, Var):
        ia, ib = env_a.get(a.name, a.name), env_b.get(b.name, b.name)
        return ia == ib
    if isinstance(a, (Num,)):
        return a.value == b.value
    if isinstance(a, (Nil, Zero, One)):
        return True
    if isinstance(a, Arith):
        return (a.op == b.op and _alpha(a.lhs, b.lhs, env_a, env_b, depth)
                and _alpha(a.rhs, b.rhs, env_a, env_b, depth))
    if isinstance(a, CPlus):
        return (_alpha(a.lhs, b.lhs, env_a, env_b, depth)
                and _alpha(a.rhs, b.rhs, env_a, env_b, depth))
    if isinstance(a, IfZ):
        return (_alpha(a.scrut, b.scrut, env_a, env_b, depth)
                and _alpha(a.zero, b.zero, env_a, env_b, depth)
                and _alpha(a.nonzero, b.nonzero, env_a, env_b, depth))
    if isinstance(a, Pair):
        return (_alpha(a.fst, b.fst, env_a, env_b, depth)
                and _alpha(a.snd, b.snd, env_a, env_b, depth))
    if isinstance(a, Proj):
        return a.index == b.index and _alpha(a.arg, b.arg, env_a, env_b, depth)
    if isinstance(a, App):
        return (_alpha(a.fn, b.fn, env_a, env_b, depth)
                and _alpha(a.arg, b.arg, env_a, env_b, depth))
    if isinstance(a, Cons):
        return (_alpha(a.head, b.head, env_a, env_b, depth)
                and _alpha(a.tail, b.tail, env_a, env_b, depth))
    if isinstance(a, Lam):
        if a.annot != b.annot:
            return False
        ea, eb = dict(env_a), dict(env_b)
        ea[a.var] = eb[b.var] = depth
        return _alpha(a.body, b.body, ea, eb, depth + 1)
    if isinstance(a, FixCbn):
        if a.annot != b.annot:
            return False
        ea, eb = dict(env_a), dict(env_b)
        ea[a.var] = eb[b.var] = depth
        return _alpha(a.body, b.body, ea, eb, depth + 1)
    if isinstance(a, RecCbv):
        if a.dom != b.dom or a.cod != b.cod:
            return False
        ea, eb = dict(env_a), dict(env_b)
        ea[a.fn] = eb[b.fn] = depth
        ea[a.var] = eb[b.var] = depth + 1
        return _alpha(a.body, b.body, ea, eb, depth + 2)
    if isinstance(a, LCase):
        if not _alpha(a.scrut, b.scrut, env_a, env_b, depth):
            return False
        if not _alpha(a.nil_branch, b.nil_branch, env_a, env_b, depth):
            return False
        ea, eb = dict(env_a), dict(env_b)
        ea[a.head_var] = eb[b.head_var] = depth
        ea[a.tail_var] = eb[b.tail_var] = depth + 1
        return _alpha(a.cons_branch, b.cons_branch, ea, eb, depth + 2)
    raise ValueError(f"unknown term {a!r}")


# ---------------------------------------------------------------------------
# Printing

def print_type(ty: PcfType) -> str:
    if isinstance(ty, Nat):
        return "nat"
    if isinstance(ty, Cost):
        return "cost"
    if isinstance(ty, Prod):
        return f"(prod {print_type(ty.left)} {print_type(ty.right)})"
    if isinstance(ty, Arrow):
        return f"(-> {print_type(ty.dom)} {print_type(ty.cod)})"
    if isinstance(ty, ListT):
        return f"(list {print_type(ty.elem)})"
    raise ValueError(f"unknown type {ty!r}")


def print_term(t: PcfTerm) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Num):
        return f"(num {t.value})"
    if isinstance(t, Arith):
        return f"({t.op} {print_term(t.lhs)} {print_term(t.rhs)})"
    if isinstance(t, IfZ):
        return f"(ifz {print_term(t.scrut)} {print_term(t.zero)} {print_term(t.nonzero)})"
    if isinstance(t, Pair):
        return f"(pair {print_term(t.fst)} {print_term(t.snd)})"
    if isinstance(t, Proj):
        return f"(proj{t.index} {print_term(t.arg)})"
    if isinstance(t, Lam):
        return f"(lam ({t.var} {print_type(t.annot)}) {print_term(t.body)})"
    if isinstance(t, App):
        return f"(app {print_term(t.fn)} {print_term(t.arg)})"
    if isinstance(t, FixCbn):
        return f"(fix ({t.var} {print_type(t.annot)}) {print_term(t.body)})"
    if isinstance(t, RecCbv):
        return (f"(rec ({t.fn} {t.var} {print_type(t.dom)} {print_type(t.cod)}) "
                f"{print_term(t.body)})")
    if isinstance(t, Nil):
        return "nil"
    if isinstance(t, Cons):
        return f"(cons {print_term(t.head)} {print_term(t.tail)})"
    if isinstance(t, LCase):
        return (f"(lcase {print_term(t.scrut)} {print_term(t.nil_branch)} "
                f"({t.head_var} {t.tail_var} {print_term(t.cons_branch)}))")
    if isinstance(t, Zero):
        return "czero"
    if isinstance(t, One):
        return "cone"
    if isinstance(t, CPlus):
        return f"(cplus {print_term(t.lhs)} {print_term(t.rhs)})"
    raise ValueError(f"unknown term {t!r}")


# ---------------------------------------------------------------------------
# Parsing

RESERVED = frozenset("""
nat cost prod list num add sub mul div mod ifz pair proj1 proj2 lam app fix
rec nil cons lcase let czero cone cplus return bind force thunk split calc
charge cfix cpair cproj1 cproj2 free with ->
""".split())

_IDENT_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_'!?-]*$")


def is_identifier(text: str) -> bool:
    return bool(_IDENT_RE.match(text)) and text not in RESERVED


def parse_type(node, allow_cost: bool = False) -> PcfType:
    if isinstance(node, Atom):
        if node.text == "nat":
            return NAT
        if node.text == "cost" and allow_cost:
            return COST
        raise ParseError(f"unknown type '{node.text}'", node.line, node.col)
    if not node.items:
        raise ParseError("empty type form", node.line, node.col)
    head = expect_atom(node.items[0], "type keyword")
    args = node.items[1:]
    if head.text == "prod" and len(args) == 2:
        return Prod(parse_type(args[0], allow_cost), parse_type(args[1], allow_cost))
    if head.text == "->" and len(args) == 2:
        return Arrow(parse_type(args[0], allow_cost), parse_type(args[1], allow_cost))
    if head.text == "list" and len(args) == 1:
        return ListT(parse_type(args[0], allow_cost))
    raise ParseError(f"bad type form '({head.text} ...)'", node.line, node.col)


def parse_type_text(text: str, allow_cost: bool = False) -> PcfType:
    return parse_type(read(text), allow_cost)


def infer_strategy(node) -> Strategy:
    """Scan the raw tree: `fix` marks CBN, `rec`/lists mark CBV.

    Terms using neither former default to CBV (the strategies type them
    identically); mixing both is an error.
    """
    saw_cbn = saw_cbv = False
    stack = [node]
    while stack:
        n = stack.pop()
        if isinstance(n, Atom):
            if n.text == "nil":
                saw_cbv = True
            continue
        if n.items and isinstance(n.items[0], Atom):
            kw = n.items[0].text
            if kw == "fix":
                saw_cbn = True
            elif kw in ("rec", "cons", "lcase"):
                saw_cbv = True
        stack.extend(n.items)
    if saw_cbn and saw_cbv:
        raise ParseError("program mixes fix (CBN) with rec/list syntax (CBV)",
                         node.line, node.col)
    return Strategy.CBN if saw_cbn else Strategy.CBV


def parse_pcf(text: str):
    """Parse a source program; returns (term, inferred strategy).

    `let` is surface sugar for an application of a lambda, so elaborating it
    needs the type of the bound expression; programs containing `let` (or
    `lcase` enclosing one) are therefore typechecked along the way and may
    raise TypeCheckError here.
    """
    node = read(text)
    strategy = infer_strategy(node)
    typer = lambda ctx, t: typecheck_pcf(ctx, t, strategy)
    term = _parse_term(node, EMPTY_CONTEXT, typer, allow_cost=False)
    return term, strategy


def parse_pcf_term(text: str, strategy: Strategy) -> PcfTerm:
    node = read(text)
    typer = lambda ctx, t: typecheck_pcf(ctx, t, strategy)
    return _parse_term(node, EMPTY_CONTEXT, typer, allow_cost=False)


def _parse_binder(node, what: str) -> str:
    atom = expect_atom(node, what)
    if not is_identifier(atom.text):
        raise ParseError(f"bad {what} '{atom.text}'", atom.line, atom.col)
    return atom.text


def _parse_term(node, ctx, typer, allow_cost) -> PcfTerm:
    if isinstance(node, Atom):
        text = node.text
        if text == "nil":
            return Nil()
        if allow_cost and text == "czero":
            return Zero()
        if allow_cost and text == "cone":
            return One()
        if is_identifier(text):
            return Var(text)
        raise ParseError(f"unexpected atom '{text}'", node.line, node.col)
    if not node.items:
        raise ParseError("empty form", node.line, node.col)
    head = expect_atom(node.items[0], "term keyword")
    kw, args = head.text, node.items[1:]

    def sub(n, c=None):
        return _parse_term(n, c if c is not None else ctx, typer, allow_cost)

    def arity(n):
        if len(args) != n:
            raise ParseError(f"'{kw}' takes {n} arguments, got {len(args)}",
                             node.line, node.col)

    if kw == "num":
        arity(1)
        lit = expect_atom(args[0], "numeral")
        if not lit.text.isdigit():
            raise ParseError(f"bad numeral '{lit.text}'", lit.line, lit.col)
        return Num(int(lit.text))
    if kw in ARITH_OPS:
        arity(2)
        return Arith(kw, sub(args[0]), sub(args[1]))
    if kw == "cplus" and allow_cost:
        arity(2)
        return CPlus(sub(args[0]), sub(args[1]))
    if kw == "ifz":
        arity(3)
        return IfZ(sub(args[0]), sub(args[1]), sub(args[2]))
    if kw == "pair":
        arity(2)
        return Pair(sub(args[0]), sub(args[1]))
    if kw in ("proj1", "proj2"):
        arity(1)
        return Proj(1 if kw == "proj1" else 2, sub(args[0]))
    if kw == "lam":
        arity(2)
        binder = expect_list(args[0], "binder (x T)")
        if len(binder.items) != 2:
            raise ParseError("lam binder is (x T)", binder.line, binder.col)
        x = _parse_binder(binder.items[0], "variable")
        ty = parse_type(binder.items[1], allow_cost)
        return Lam(x, ty, sub(args[1], ctx.extend(x, ty)))
    if kw == "app":
        arity(2)
        return App(sub(args[0]), sub(args[1]))
    if kw == "fix":
        arity(2)
        binder = expect_list(args[0], "binder (x T)")
        if len(binder.items) != 2:
            raise ParseError("fix binder is (x T)", binder.line, binder.col)
        x = _parse_binder(binder.items[0], "variable")
        ty = parse_type(binder.items[1], allow_cost)
        return FixCbn(x, ty, sub(args[1], ctx.extend(x, ty)))
    if kw == "rec" and not allow_cost:
        arity(2)
        binder = expect_list(args[0], "binder (f x T U)")
        if len(binder.items) != 4:
            raise ParseError("rec binder is (f x T U)", binder.line, binder.col)
        f = _parse_binder(binder.items[0], "function variable")
        x = _parse_binder(binder.items[1], "variable")
        dom = parse_type(binder.items[2])
        cod = parse_type(binder.items[3])
        inner = ctx.extend(f, Arrow(dom, cod)).extend(x, dom)
        return RecCbv(f, x, dom, cod, sub(args[1], inner))
    if kw == "cons" and not allow_cost:
        arity(2)
        return Cons(sub(args[0]), sub(args[1]))
    if kw == "lcase" and not allow_cost:
        arity(3)
        scrut = sub(args[0])
        nil_b = sub(args[1])
        branch = expect_list(args[2], "cons branch (h t M)")
        if len(branch.items) != 3:
            raise ParseError("lcase cons branch is (h t M)", branch.line, branch.col)
        h = _parse_binder(branch.items[0], "head variable")
        tl = _parse_binder(branch.items[1], "tail variable")
        sty = typer(ctx, scrut)
        if not isinstance(sty, ListT):
            raise TypeCheckError(f"lcase scrutinee has non-list type {sty}", scrut)
        inner = ctx.extend(h, sty.elem).extend(tl, ListT(sty.elem))
        return LCase(scrut, nil_b, h, tl, sub(args[2].items[2], inner))
    if kw == "let":
        arity(2)
        binder = expect_list(args[0], "binding (x M)")
        if len(binder.items) != 2:
            raise ParseError("let binding is (x M)", binder.line, binder.col)
        x = _parse_binder(binder.items[0], "variable")
        bound = sub(binder.items[1])
        ty = typer(ctx, bound)
        body = sub(args[1], ctx.extend(x, ty))
        return App(Lam(x, ty, body), bound)
    raise ParseError(f"unknown form '{kw}'", node.line, node.col)
