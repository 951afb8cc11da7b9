"""Rewriting extracted recurrences into readable form.

Every enabled rewrite is an exact equation of the denotational model, so
simplification never changes what a recurrence denotes; that invariant is
sampled in the test suite.  In particular the conditional only beta-reduces
on a zero scrutinee; on a non-zero numeral the model takes the join of the
branches, so that redex contracts only when the branches are alpha-equal.
The immediate loop `fix x. x` denotes infinity and is left untouched.
"""

from __future__ import annotations

from dataclasses import dataclass

from .pcf_lang import (App, Arith, CPlus, FixCbn, IfZ, Lam, Num, One, Pair,
                       PcfTerm, Proj, Var, Zero, alpha_eq, apply_arith,
                       free_vars, subst)


@dataclass(frozen=True)
class RuleSet:
    """Which rewrite groups are enabled; the beta group is always on."""
    core_beta: bool = True
    monoid_eta: bool = False
    list_axioms: bool = False

    @staticmethod
    def from_level(level: str) -> "RuleSet":
        if level in ("", "core"):
            return RuleSet()
        if level == "eta":
            return RuleSet(monoid_eta=True)
        if level == "lists":
            return RuleSet(monoid_eta=True, list_axioms=True)
        raise ValueError(f"unknown simplify level {level!r}")


DEFAULT_MAX_PASSES = 200


def simplify(t: PcfTerm, rules: RuleSet | None = None,
             max_passes: int = DEFAULT_MAX_PASSES) -> PcfTerm:
    """Bottom-up rewriting iterated to a fixed point (bounded by max_passes)."""
    rules = rules or RuleSet()
    for _ in range(max_passes):
        new = _pass(t, rules)
        if new == t:
            return new
        t = new
    return t


def _pass(t: PcfTerm, rules: RuleSet) -> PcfTerm:
    t = _rewrite_children(t, rules)
    return _rewrite_node(t, rules)


def _rewrite_children(t, rules):
    if isinstance(t, Arith):
        # The model reads subtraction/division against a literal right
        # operand exactly and ignores any other right operand.  Rewriting
        # inside a compound right operand could fold it into a literal and
        # silently switch clauses, so that position is left alone.
        if t.op in ("sub", "div") and not isinstance(t.rhs, Num):
            return Arith(t.op, _pass(t.lhs, rules), t.rhs)
        return Arith(t.op, _pass(t.lhs, rules), _pass(t.rhs, rules))
    if isinstance(t, CPlus):
        return CPlus(_pass(t.lhs, rules), _pass(t.rhs, rules))
    if isinstance(t, IfZ):
        return IfZ(_pass(t.scrut, rules), _pass(t.zero, rules),
                   _pass(t.nonzero, rules))
    if isinstance(t, Pair):
        return Pair(_pass(t.fst, rules), _pass(t.snd, rules))
    if isinstance(t, Proj):
        return Proj(t.index, _pass(t.arg, rules))
    if isinstance(t, Lam):
        return Lam(t.var, t.annot, _pass(t.body, rules))
    if isinstance(t, App):
        return App(_pass(t.fn, rules), _pass(t.arg, rules))
    if isinstance(t, FixCbn):
        return FixCbn(t.var, t.annot, _pass(t.body, rules))
    return t


def _rewrite_node(t, rules):
    # beta group
    if isinstance(t, App) and isinstance(t.fn, Lam):
        if not (isinstance(t.arg, Num)
                and _feeds_op_right_operand(t.fn.body, t.fn.var)):
            return subst(t.fn.body, t.fn.var, t.arg)
    if isinstance(t, Proj) and isinstance(t.arg, Pair):
        return t.arg.fst if t.index == 1 else t.arg.snd
    if isinstance(t, IfZ) and isinstance(t.scrut, Num):
        if t.scrut.value == 0:
            return t.zero
        if alpha_eq(t.zero, t.nonzero):
            # On a non-zero numeral the model joins the branches; equal
            # branches make that the branch itself.
            return t.nonzero
        return t
    # commuting conversion: projections move into the conditional
    if isinstance(t, Proj) and isinstance(t.arg, IfZ):
        inner = t.arg
        return IfZ(inner.scrut, Proj(t.index, inner.zero),
                   Proj(t.index, inner.nonzero))
    # closed arithmetic, folded with the model's interpretation
    if isinstance(t, Arith) and isinstance(t.lhs, Num) and isinstance(t.rhs, Num):
        if t.op == "mod":
            # The model reads a modulus as its right operand less one.
            return Num(apply_arith("sub", t.rhs.value, 1))
        return Num(apply_arith(t.op, t.lhs.value, t.rhs.value))
    # cost-sum normalization
    if isinstance(t, CPlus):
        normal = _normalize_cplus(t)
        if normal is not None:
            return normal
    if rules.list_axioms:
        # (E + 1) - 1 contracts to E
        if (isinstance(t, Arith) and t.op == "sub"
                and t.rhs == Num(1) and isinstance(t.lhs, Arith)
                and t.lhs.op == "add" and t.lhs.rhs == Num(1)):
            return t.lhs.lhs
    if rules.monoid_eta:
        # surjective pairing
        if (isinstance(t, Pair) and isinstance(t.fst, Proj)
                and isinstance(t.snd, Proj) and t.fst.index == 1
                and t.snd.index == 2 and t.fst.arg == t.snd.arg):
            return t.fst.arg
        # eta for functions
        if (isinstance(t, Lam) and isinstance(t.body, App)
                and t.body.arg == Var(t.var)
                and t.var not in free_vars(t.body.fn)):
            return t.body.fn
    return t


def _normalize_cplus(t: CPlus):
    """Flatten a cost sum to leading units followed by the symbolic leaves,
    right-associated.  Reassociation uses the monoid structure; collecting
    the unit constants is exact in the model, where the sum is strict
    addition of naturals."""
    leaves = []
    _flatten_cplus(t, leaves)
    units = 0
    rest = []
    for leaf in leaves:
        if isinstance(leaf, Zero):
            continue
        if isinstance(leaf, One):
            units += 1
        else:
            rest.append(leaf)
    if not rest:
        out: PcfTerm = Zero()
        for _ in range(units):
            out = CPlus(One(), out)
    else:
        out = rest[-1]
        for leaf in reversed(rest[:-1]):
            out = CPlus(leaf, out)
        for _ in range(units):
            out = CPlus(One(), out)
    return None if out == t else out


def _flatten_cplus(t, acc):
    if isinstance(t, CPlus):
        _flatten_cplus(t.lhs, acc)
        _flatten_cplus(t.rhs, acc)
    else:
        acc.append(t)


def _feeds_op_right_operand(body, name: str) -> bool:
    """Does the variable stand directly as the right operand of a
    subtraction or division?  Beta-substituting a literal there would switch
    the model from the ignore-the-right-operand clause to the exact one."""
    if isinstance(body, Arith) and body.op in ("sub", "div"):
        if body.rhs == Var(name):
            return True
    if isinstance(body, (Lam, FixCbn)) and body.var == name:
        return False  # shadowed below this point
    for field in body.__dataclass_fields__:
        child = getattr(body, field)
        if isinstance(child, PcfTerm) and _feeds_op_right_operand(child, name):
            return True
    return False
