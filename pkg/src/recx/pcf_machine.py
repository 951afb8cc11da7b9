"""Cost-instrumented big-step evaluator for both PCF variants.

One unit of cost is charged for pair projections and (possibly recursive)
function applications; every other rule is free.  Fuel counts big-step rule
applications, independently of cost, so divergence detection does not depend
on the cost model.  Evaluation is substitution-based: auditable, and fast
enough at the scale this toolchain targets.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import pcf_lang as pcf
from .pcf_lang import (App, Arith, Cons, FixCbn, IfZ, LCase, Lam, Nil, Num,
                       Pair, PcfTerm, Proj, RecCbv, Strategy, apply_arith,
                       subst, subst_many)

INF = float("inf")


class EvalOutcome:
    pass


@dataclass(frozen=True)
class Converged(EvalOutcome):
    value: PcfTerm
    cost: int
    rules_used: int = 0


@dataclass(frozen=True)
class OutOfFuel(EvalOutcome):
    pass


@dataclass(frozen=True)
class Stuck(EvalOutcome):
    reason: str


class _FuelExhausted(Exception):
    pass


class _StuckError(Exception):
    def __init__(self, reason):
        super().__init__(reason)
        self.reason = reason


class _Budget:
    __slots__ = ("remaining", "limit")

    def __init__(self, fuel: int):
        self.remaining = fuel
        self.limit = fuel

    def tick(self):
        if self.remaining <= 0:
            raise _FuelExhausted()
        self.remaining -= 1

    @property
    def used(self):
        return self.limit - self.remaining


def is_canonical(t: PcfTerm, strategy: Strategy) -> bool:
    """Canonical forms: numerals, lambdas and rec-functions for both
    strategies; eager pairs/lists of canonicals under CBV, lazy pairs under
    CBN."""
    if isinstance(t, (Num, Lam, RecCbv)):
        return True
    if isinstance(t, Pair):
        if strategy is Strategy.CBN:
            return True
        return is_canonical(t.fst, strategy) and is_canonical(t.snd, strategy)
    if strategy is Strategy.CBV and isinstance(t, Nil):
        return True
    if strategy is Strategy.CBV and isinstance(t, Cons):
        return is_canonical(t.head, strategy) and is_canonical(t.tail, strategy)
    return False


def eval_pcf(t: PcfTerm, strategy: Strategy, fuel: int = 100_000,
             trace=None) -> EvalOutcome:
    """Evaluate a closed, well-typed term.

    Returns Converged(value, cost, rules_used) where rules_used is the number
    of big-step rule applications in the (unique) derivation, or OutOfFuel.
    Stuck is only reachable on ill-typed or open input.
    """
    budget = _Budget(fuel)
    try:
        value, cost = _eval(t, strategy, budget, trace)
    except _FuelExhausted:
        return OutOfFuel()
    except _StuckError as e:
        return Stuck(e.reason)
    return Converged(value, cost, budget.used)


def observed_cost(t: PcfTerm, strategy: Strategy, fuel: int = 100_000):
    """Cost projection of eval_pcf; OutOfFuel reads as infinity."""
    outcome = eval_pcf(t, strategy, fuel)
    if isinstance(outcome, Converged):
        return outcome.cost
    if isinstance(outcome, OutOfFuel):
        return INF
    raise AssertionError(f"evaluation stuck: {outcome.reason}")


def _eval(t, strategy, budget, trace):
    budget.tick()
    if trace is not None:
        trace.append(f"pcf {type(t).__name__} {pcf.print_term(t)[:72]}")
    cbv = strategy is Strategy.CBV

    if isinstance(t, Num):
        return t, 0
    if isinstance(t, (Lam, RecCbv)):
        return t, 0
    if isinstance(t, Nil):
        return t, 0
    if isinstance(t, Pair):
        if not cbv:
            return t, 0
        fst, c1 = _eval(t.fst, strategy, budget, trace)
        snd, c2 = _eval(t.snd, strategy, budget, trace)
        return Pair(fst, snd), c1 + c2
    if isinstance(t, Cons):
        head, c1 = _eval(t.head, strategy, budget, trace)
        tail, c2 = _eval(t.tail, strategy, budget, trace)
        return Cons(head, tail), c1 + c2
    if isinstance(t, Arith):
        lhs, c1 = _eval(t.lhs, strategy, budget, trace)
        rhs, c2 = _eval(t.rhs, strategy, budget, trace)
        if not isinstance(lhs, Num) or not isinstance(rhs, Num):
            raise _StuckError("arithmetic on non-numerals")
        return Num(apply_arith(t.op, lhs.value, rhs.value)), c1 + c2
    if isinstance(t, IfZ):
        scrut, c1 = _eval(t.scrut, strategy, budget, trace)
        if not isinstance(scrut, Num):
            raise _StuckError("ifz on non-numeral")
        branch = t.zero if scrut.value == 0 else t.nonzero
        val, c2 = _eval(branch, strategy, budget, trace)
        return val, c1 + c2
    if isinstance(t, Proj):
        arg, c1 = _eval(t.arg, strategy, budget, trace)
        if not isinstance(arg, Pair):
            raise _StuckError("projection from non-pair")
        comp = arg.fst if t.index == 1 else arg.snd
        if cbv:
            return comp, c1 + 1  # components already canonical
        val, c2 = _eval(comp, strategy, budget, trace)
        return val, c1 + c2 + 1
    if isinstance(t, App):
        fn, c1 = _eval(t.fn, strategy, budget, trace)
        if cbv:
            arg, c2 = _eval(t.arg, strategy, budget, trace)
            if isinstance(fn, Lam):
                body = subst(fn.body, fn.var, arg)
            elif isinstance(fn, RecCbv):
                body = subst_many(fn.body, {fn.fn: fn, fn.var: arg})
            else:
                raise _StuckError("application of non-function")
            val, c3 = _eval(body, strategy, budget, trace)
            return val, c1 + c2 + c3 + 1
        if not isinstance(fn, Lam):
            raise _StuckError("application of non-function")
        val, c2 = _eval(subst(fn.body, fn.var, t.arg), strategy, budget, trace)
        return val, c1 + c2 + 1
    if isinstance(t, FixCbn):
        if cbv:
            raise _StuckError("fix under CBV")
        val, c = _eval(subst(t.body, t.var, t), strategy, budget, trace)
        return val, c
    if isinstance(t, LCase):
        if not cbv:
            raise _StuckError("lcase under CBN")
        scrut, c1 = _eval(t.scrut, strategy, budget, trace)
        if isinstance(scrut, Nil):
            val, c2 = _eval(t.nil_branch, strategy, budget, trace)
            return val, c1 + c2
        if isinstance(scrut, Cons):
            body = subst_many(t.cons_branch,
                              {t.head_var: scrut.head, t.tail_var: scrut.tail})
            val, c2 = _eval(body, strategy, budget, trace)
            return val, c1 + c2
        raise _StuckError("lcase on non-list")
    raise _StuckError(f"no rule for {type(t).__name__}")
