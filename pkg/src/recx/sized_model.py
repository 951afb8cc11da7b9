"""Denotational evaluation of recurrences in sized domains.

Naturals and costs live in the flat domain with one extra element standing
simultaneously for non-termination and infinity; it is the top of the size
order and absorbs every elimination.  Products and function spaces are
pointwise.  The conditional is monotonized: an undefined scrutinee gives
bottom, zero gives the first branch, anything else the join of both.
Ill-monotone arithmetic is read as an upper bound: a general subtraction or
division is its left operand, a modulus is its right operand less one.  The
discarded operand still participates strictly: evaluation runs it, so a
finite denotation must not paper over its divergence.

Fixed points are fuel-indexed: a fixed point denotes its fuel-th
approximant.  Approximants increase in the information order, and more
defined means smaller in the size order, so exhausting fuel only degrades a
bound towards infinity; it never makes it unsound.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import pcf_lang as pcf
from .pcf_lang import (App, Arith, CPlus, FixCbn, IfZ, Lam, Num, One, Pair,
                       PcfTerm, Proj, Var, Zero)

DEFAULT_FIX_FUEL = 100


class SizedValue:
    pass


class _Bottom(SizedValue):
    """Non-termination and infinity in one element; greatest in the size
    order, absorbed by application and projection."""

    __slots__ = ()

    def __repr__(self):
        return "inf"


BOTTOM = _Bottom()


@dataclass(frozen=True)
class Fin(SizedValue):
    n: int

    def __repr__(self):
        return str(self.n)


@dataclass(frozen=True)
class PairV(SizedValue):
    fst: SizedValue
    snd: SizedValue

    def __repr__(self):
        return f"({self.fst!r}, {self.snd!r})"


class Closure(SizedValue):
    __slots__ = ("param", "body", "env", "model", "_memo")

    def __init__(self, param, body, env, model):
        self.param = param
        self.body = body
        self.env = env
        self.model = model
        self._memo = {}

    def __repr__(self):
        return "<fun>"


class JoinFun(SizedValue):
    """Lazy pointwise join of two function values."""

    __slots__ = ("left", "right", "_memo")

    def __init__(self, left, right):
        self.left = left
        self.right = right
        self._memo = {}

    def __repr__(self):
        return "<fun-join>"


class ShapeMismatch(Exception):
    """Joined or compared values disagree in shape; indicates ill-typed use."""


class SizeUndecidable(Exception):
    """The size order is only decided at first-order types."""


def is_function_value(v: SizedValue) -> bool:
    return isinstance(v, (Closure, JoinFun))


# ---------------------------------------------------------------------------
# Join and size order

def join(v: SizedValue, w: SizedValue) -> SizedValue:
    if v is BOTTOM or w is BOTTOM:
        return BOTTOM
    if isinstance(v, Fin) and isinstance(w, Fin):
        return v if v.n >= w.n else w
    if isinstance(v, PairV) and isinstance(w, PairV):
        return PairV(join(v.fst, w.fst), join(v.snd, w.snd))
    if is_function_value(v) and is_function_value(w):
        if v is w:
            return v
        return JoinFun(v, w)
    raise ShapeMismatch(f"join of {v!r} and {w!r}")


def _norm(v: SizedValue) -> SizedValue:
    """Collapse an all-bottom pair to bottom: in the product domain the
    least element is the pair of least elements."""
    if isinstance(v, PairV):
        fst, snd = _norm(v.fst), _norm(v.snd)
        if fst is BOTTOM and snd is BOTTOM:
            return BOTTOM
        return PairV(fst, snd)
    return v


def size_leq(v: SizedValue, w: SizedValue) -> bool:
    """Decide the size order at first-order types (ground and pairs)."""
    v, w = _norm(v), _norm(w)
    return _size_leq(v, w)


def _size_leq(v, w):
    if is_function_value(v) or is_function_value(w):
        raise SizeUndecidable("size order at function type is not decidable")
    if w is BOTTOM:
        if isinstance(v, PairV):
            return _size_leq(v.fst, BOTTOM) and _size_leq(v.snd, BOTTOM)
        return True
    if v is BOTTOM:
        if isinstance(w, PairV):
            return _size_leq(BOTTOM, w.fst) and _size_leq(BOTTOM, w.snd)
        return False
    if isinstance(v, Fin) and isinstance(w, Fin):
        return v.n <= w.n
    if isinstance(v, PairV) and isinstance(w, PairV):
        return _size_leq(v.fst, w.fst) and _size_leq(v.snd, w.snd)
    raise ShapeMismatch(f"size comparison of {v!r} and {w!r}")


def value_eq(v: SizedValue, w: SizedValue) -> bool:
    """Semantic equality at first-order types."""
    return size_leq(v, w) and size_leq(w, v)


def is_first_order(v: SizedValue) -> bool:
    if isinstance(v, PairV):
        return is_first_order(v.fst) and is_first_order(v.snd)
    return isinstance(v, Fin) or v is BOTTOM


# ---------------------------------------------------------------------------
# The evaluator

class SizedModel:
    """Denotation of recurrence-language terms at a fixed fix-point fuel.

    Closure applications are memoized per closure instance, which makes the
    joins introduced by the monotonized conditional affordable: without
    sharing, every conditional on a non-zero scrutinee would double the work
    of the recurrences underneath it.
    """

    def __init__(self, fix_fuel: int = DEFAULT_FIX_FUEL):
        self.fix_fuel = fix_fuel

    def denote(self, t: PcfTerm, env: dict | None = None) -> SizedValue:
        return self._den(t, env or {})

    def apply(self, fn: SizedValue, arg: SizedValue) -> SizedValue:
        if fn is BOTTOM:
            return BOTTOM
        if isinstance(fn, Closure):
            memo = fn._memo
            if arg in memo:
                return memo[arg]
            env = dict(fn.env)
            env[fn.param] = arg
            out = self._den(fn.body, env)
            memo[arg] = out
            return out
        if isinstance(fn, JoinFun):
            memo = fn._memo
            if arg in memo:
                return memo[arg]
            out = join(self.apply(fn.left, arg), self.apply(fn.right, arg))
            memo[arg] = out
            return out
        raise ShapeMismatch(f"application of non-function {fn!r}")

    def project(self, v: SizedValue, index: int) -> SizedValue:
        if v is BOTTOM:
            return BOTTOM
        if isinstance(v, PairV):
            return v.fst if index == 1 else v.snd
        raise ShapeMismatch(f"projection from {v!r}")

    def _den(self, t, env):
        if isinstance(t, Var):
            try:
                return env[t.name]
            except KeyError:
                raise ShapeMismatch(f"unbound variable {t.name}") from None
        if isinstance(t, Num):
            return Fin(t.value)
        if isinstance(t, Zero):
            return Fin(0)
        if isinstance(t, One):
            return Fin(1)
        if isinstance(t, CPlus):
            a = self._den(t.lhs, env)
            b = self._den(t.rhs, env)
            if a is BOTTOM or b is BOTTOM:
                return BOTTOM
            return Fin(a.n + b.n)
        if isinstance(t, Arith):
            return self._arith(t, env)
        if isinstance(t, IfZ):
            scrut = self._den(t.scrut, env)
            if scrut is BOTTOM:
                return BOTTOM
            if not isinstance(scrut, Fin):
                raise ShapeMismatch("conditional on non-ground value")
            if scrut.n == 0:
                return self._den(t.zero, env)
            return join(self._den(t.zero, env), self._den(t.nonzero, env))
        if isinstance(t, Pair):
            return PairV(self._den(t.fst, env), self._den(t.snd, env))
        if isinstance(t, Proj):
            return self.project(self._den(t.arg, env), t.index)
        if isinstance(t, Lam):
            return Closure(t.var, t.body, env, self)
        if isinstance(t, App):
            fn = self._den(t.fn, env)
            arg = self._den(t.arg, env)
            return self.apply(fn, arg)
        if isinstance(t, FixCbn):
            return self._fix(t, env)
        raise ShapeMismatch(f"no denotation for {type(t).__name__}")

    def _arith(self, t, env):
        op = t.op
        if op in ("add", "mul"):
            a = self._den(t.lhs, env)
            b = self._den(t.rhs, env)
            if a is BOTTOM or b is BOTTOM:
                return BOTTOM
            return Fin(pcf.apply_arith(op, a.n, b.n))
        if op in ("sub", "div"):
            if isinstance(t.rhs, Num):
                a = self._den(t.lhs, env)
                if a is BOTTOM:
                    return BOTTOM
                return Fin(pcf.apply_arith(op, a.n, t.rhs.value))
            # Antimonotone right operand: the bound is the left side alone,
            # strict in the right side (evaluation still runs it).
            b = self._den(t.rhs, env)
            if b is BOTTOM:
                return BOTTOM
            return self._den(t.lhs, env)
        if op == "mod":
            # Bounded by the right operand less one; strict in the left.
            a = self._den(t.lhs, env)
            if a is BOTTOM:
                return BOTTOM
            b = self._den(t.rhs, env)
            if b is BOTTOM:
                return BOTTOM
            return Fin(pcf.apply_arith("sub", b.n, 1))
        raise ShapeMismatch(f"unknown operator {op}")

    def _fix(self, t, env):
        # The fuel-th approximant: iterate the body from bottom.  Once an
        # iterate repeats (decidable at first-order values) the chain is
        # stationary and equals every later approximant.
        approx: SizedValue = BOTTOM
        for _ in range(self.fix_fuel):
            new_env = dict(env)
            new_env[t.var] = approx
            new = self._den(t.body, new_env)
            if is_first_order(new) and new == approx:
                return new
            approx = new
        return approx


def denote(t: PcfTerm, env: dict | None = None,
           fuel: int = DEFAULT_FIX_FUEL) -> SizedValue:
    """Denote a term in a fresh model with the given fix-point fuel."""
    return SizedModel(fuel).denote(t, env)
