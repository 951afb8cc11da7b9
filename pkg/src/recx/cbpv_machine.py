"""Big-step machine for the intermediate language; only `charge` costs.

Every rule sums the costs of its premises; the charge rule adds one.  Fuel
counts rule applications as in the source-language machine.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import cbpv_lang as cbpv
from .cbpv_lang import (App, Bind, Calc, CbpvCompTerm, Charge, CPair, Fix,
                        Force, IfZ, LCase, Lam, Num, Proj, Return, Split,
                        Thunk, is_terminal, subst, subst_many)
from .pcf_lang import apply_arith

INF = float("inf")


class CbpvOutcome:
    pass


@dataclass(frozen=True)
class Terminal(CbpvOutcome):
    term: CbpvCompTerm
    cost: int
    rules_used: int = 0


@dataclass(frozen=True)
class OutOfFuel(CbpvOutcome):
    pass


@dataclass(frozen=True)
class Stuck(CbpvOutcome):
    reason: str


class _FuelExhausted(Exception):
    pass


class _StuckError(Exception):
    def __init__(self, reason):
        super().__init__(reason)
        self.reason = reason


class _Budget:
    __slots__ = ("remaining", "limit")

    def __init__(self, fuel):
        self.remaining = fuel
        self.limit = fuel

    def tick(self):
        if self.remaining <= 0:
            raise _FuelExhausted()
        self.remaining -= 1

    @property
    def used(self):
        return self.limit - self.remaining


def eval_cbpv(m: CbpvCompTerm, fuel: int = 100_000, trace=None) -> CbpvOutcome:
    """Evaluate a closed, well-typed computation to a terminal."""
    budget = _Budget(fuel)
    try:
        term, cost = _eval(m, budget, trace)
    except _FuelExhausted:
        return OutOfFuel()
    except _StuckError as e:
        return Stuck(e.reason)
    return Terminal(term, cost, budget.used)


def _eval(m, budget, trace):
    budget.tick()
    if trace is not None:
        trace.append(f"cbpv {type(m).__name__} {cbpv.print_comp(m)[:72]}")

    if is_terminal(m):
        return m, 0
    if isinstance(m, Bind):
        comp, c1 = _eval(m.comp, budget, trace)
        if not isinstance(comp, Return):
            raise _StuckError("bind of non-returner")
        body, c2 = _eval(subst(m.body, m.var, comp.val), budget, trace)
        return body, c1 + c2
    if isinstance(m, Force):
        if not isinstance(m.val, Thunk):
            raise _StuckError("force of non-thunk")
        return _eval(m.val.comp, budget, trace)
    if isinstance(m, App):
        fn, c1 = _eval(m.fn, budget, trace)
        if not isinstance(fn, Lam):
            raise _StuckError("application of non-lambda terminal")
        body, c2 = _eval(subst(fn.body, fn.var, m.arg), budget, trace)
        return body, c1 + c2
    if isinstance(m, Proj):
        pair, c1 = _eval(m.comp, budget, trace)
        if not isinstance(pair, CPair):
            raise _StuckError("projection from non-pair terminal")
        comp = pair.fst if m.index == 1 else pair.snd
        body, c2 = _eval(comp, budget, trace)
        return body, c1 + c2
    if isinstance(m, Split):
        if not isinstance(m.val, cbpv.VPair):
            raise _StuckError("split of non-pair value")
        body = subst_many(m.body, {m.var1: m.val.fst, m.var2: m.val.snd})
        return _eval(body, budget, trace)
    if isinstance(m, IfZ):
        if not isinstance(m.val, Num):
            raise _StuckError("ifz on non-numeral")
        return _eval(m.zero if m.val.value == 0 else m.nonzero, budget, trace)
    if isinstance(m, Calc):
        if not isinstance(m.lhs, Num) or not isinstance(m.rhs, Num):
            raise _StuckError("calc on non-numerals")
        result = Num(apply_arith(m.op, m.lhs.value, m.rhs.value))
        return _eval(subst(m.body, m.var, result), budget, trace)
    if isinstance(m, Charge):
        body, c = _eval(m.comp, budget, trace)
        return body, c + 1
    if isinstance(m, Fix):
        unrolled = subst(m.body, m.var, Thunk(m))
        return _eval(unrolled, budget, trace)
    if isinstance(m, LCase):
        if isinstance(m.val, cbpv.Nil):
            return _eval(m.nil_branch, budget, trace)
        if isinstance(m.val, cbpv.Cons):
            body = subst_many(m.cons_branch,
                              {m.head_var: m.val.head, m.tail_var: m.val.tail})
            return _eval(body, budget, trace)
        raise _StuckError("lcase on non-list value")
    raise _StuckError(f"no rule for {type(m).__name__}")
