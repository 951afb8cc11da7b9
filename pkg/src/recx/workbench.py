"""Corpus, random program generation, differential cost tests and the
end-to-end bound checker.

The bound checker realizes the bounding relations at observable types: costs
and naturals compare against the denoted cost/potential components, products
componentwise, lists by length, and functions extensionally at sampled
numeric arguments.  An infinite bound holds trivially; running out of fuel on
the operational side with a finite bound is inconclusive, never a violation.
"""

from __future__ import annotations

import itertools
import random
import threading
from dataclasses import dataclass, field

from . import cbpv_machine, pcf_machine, pcfc_lang, sized_model
from . import cbpv_lang as cb
from . import pcf_lang as pcf
from .embed import embed, embed_cbn, embed_cbv_val
from .extract import extract
from .pcf_lang import (App, Arith, Arrow, Cons, FixCbn, IfZ, LCase, Lam,
                       ListT, NAT, Nil, Num, Pair, PcfTerm, Prod, Proj,
                       RecCbv, Strategy, Var)
from .pcfc_lang import COST, numc
from .sized_model import BOTTOM, Fin, PairV, SizedModel

INF = float("inf")

HOLDS = "HOLDS"
HOLDS_TRIVIALLY_INF = "HOLDS_TRIVIALLY_INF"
VIOLATION = "VIOLATION"
INCONCLUSIVE_FUEL = "INCONCLUSIVE_FUEL"

DEFAULT_SAMPLES = (0, 1, 2, 3, 5, 8, 13)
DEFAULT_FUEL = 100_000


# ---------------------------------------------------------------------------
# Bound reports

@dataclass
class BoundReport:
    program_id: str
    strategy: str
    fuel_used: int
    observed_cost: object  # int or INF
    observed_value: str
    bound_cost: object  # int or INF
    bound_potential: str
    verdict: str
    notes: tuple = ()

    def to_json_dict(self) -> dict:
        enc = lambda x: "inf" if x == INF else x
        return {
            "id": self.program_id,
            "strategy": self.strategy,
            "observed_cost": enc(self.observed_cost),
            "bound_cost": enc(self.bound_cost),
            "verdict": self.verdict,
            "fuel": self.fuel_used,
        }


class _CheckState:
    def __init__(self):
        self.violations = []
        self.trivial = False
        self.inconclusive = False
        self.skipped_functions = 0
        self.cost_bounds = []  # every cost bound compared along the way

    def verdict(self) -> str:
        if self.violations:
            return VIOLATION
        if self.inconclusive:
            return INCONCLUSIVE_FUEL
        if self.trivial:
            return HOLDS_TRIVIALLY_INF
        return HOLDS


def _value_str(v) -> str:
    return repr(v) if isinstance(v, sized_model.SizedValue) else str(v)


def list_length(v: PcfTerm) -> int:
    n = 0
    while isinstance(v, Cons):
        n += 1
        v = v.tail
    return n


def list_literal(values) -> PcfTerm:
    out: PcfTerm = Nil()
    for x in reversed(list(values)):
        out = Cons(Num(x), out)
    return out


# ---------------------------------------------------------------------------
# check_bound

def check_bound(t: PcfTerm, strategy: Strategy, fuel: int = DEFAULT_FUEL,
                samples=DEFAULT_SAMPLES, denote_fuel: int = sized_model.DEFAULT_FIX_FUEL,
                program_id: str = "program") -> BoundReport:
    ty = pcf.typecheck_closed(t, strategy)
    model = SizedModel(denote_fuel)
    bound = model.denote(extract(t, strategy).term)
    state = _CheckState()

    outcome = pcf_machine.eval_pcf(t, strategy, fuel)
    fuel_used = outcome.rules_used if isinstance(outcome, pcf_machine.Converged) else fuel

    if strategy is Strategy.CBV:
        obs_cost, obs_val = _check_comp_cbv(t, outcome, bound, ty, state,
                                            model, fuel, samples, 0)
        bound_cost = _ground(model.project(bound, 1))
        bound_pot = model.project(bound, 2)
    else:
        obs_cost, obs_val = _check_cbn(t, bound, ty, state, model, fuel, samples,
                                       top_outcome=outcome)
        if isinstance(ty, pcf.Nat):
            bound_cost = _ground(model.project(bound, 1))
            bound_pot = model.project(bound, 2)
        else:
            # No single top-level cost at negative types; report the largest
            # cost bound compared during the recursion.
            bound_cost = max(state.cost_bounds, default=0)
            bound_pot = bound

    notes = tuple(state.violations[:4])
    if state.skipped_functions:
        notes += (f"{state.skipped_functions} function position(s) beyond "
                  "sampling depth",)
    return BoundReport(
        program_id=program_id,
        strategy=strategy.value,
        fuel_used=fuel_used,
        observed_cost=obs_cost,
        observed_value=obs_val,
        bound_cost=bound_cost,
        bound_potential=_value_str(bound_pot),
        verdict=state.verdict(),
        notes=notes,
    )


def _ground(v):
    """Fin -> int, bottom -> INF."""
    if v is BOTTOM:
        return INF
    if isinstance(v, Fin):
        return v.n
    # a structured bound (pair/function); callers only use this at ground type
    return v


def _check_comp_cbv(t, outcome, bound, ty, state, model, fuel, samples, depth):
    """CBV expression bounding: bound is a (cost, potential) pair value."""
    bc = _ground(model.project(bound, 1))
    bp = model.project(bound, 2)
    state.cost_bounds.append(bc)
    if isinstance(outcome, pcf_machine.OutOfFuel):
        if bc == INF:
            state.trivial = True
        else:
            state.inconclusive = True
        return INF, "out-of-fuel"
    if isinstance(outcome, pcf_machine.Stuck):
        raise AssertionError(f"stuck evaluation: {outcome.reason}")
    if bc == INF:
        state.trivial = True
    elif outcome.cost > bc:
        state.violations.append(
            f"cost {outcome.cost} exceeds bound {bc} for {pcf.print_term(t)[:60]}")
    _check_val_cbv(outcome.value, bp, ty, state, model, fuel, samples, depth)
    return outcome.cost, pcf.print_term(outcome.value)


def _check_val_cbv(v, pot, ty, state, model, fuel, samples, depth):
    """CBV value bounding against a denoted potential; functions are
    sampled extensionally at numeric arguments, one level deep."""
    if isinstance(ty, pcf.Nat):
        g = _ground(pot)
        if g == INF:
            state.trivial = True
        elif v.value > g:
            state.violations.append(f"value {v.value} exceeds potential {g}")
        return
    if isinstance(ty, Prod):
        _check_val_cbv(v.fst, model.project(pot, 1), ty.left, state, model,
                       fuel, samples, depth)
        _check_val_cbv(v.snd, model.project(pot, 2), ty.right, state, model,
                       fuel, samples, depth)
        return
    if isinstance(ty, ListT):
        g = _ground(pot)
        length = list_length(v)
        if g == INF:
            state.trivial = True
        elif length > g:
            state.violations.append(f"length {length} exceeds potential {g}")
        return
    if isinstance(ty, Arrow):
        if depth >= 1 or not isinstance(ty.dom, pcf.Nat):
            state.skipped_functions += 1
            return
        for n in samples:
            if isinstance(v, Lam):
                body = pcf.subst(v.body, v.var, Num(n))
            elif isinstance(v, RecCbv):
                body = pcf.subst_many(v.body, {v.fn: v, v.var: Num(n)})
            else:
                raise AssertionError("function value expected")
            outcome = pcf_machine.eval_pcf(body, Strategy.CBV, fuel)
            app_bound = model.apply(pot, Fin(n))
            _check_comp_cbv(body, outcome, app_bound, ty.cod, state, model,
                            fuel, samples, depth + 1)
        return
    raise AssertionError(f"unexpected type {ty}")


def _check_cbn(t, bound, ty, state, model, fuel, samples, top_outcome=None,
               depth=0):
    """CBN bounding: observable naturals carry (cost, value) bounds, products
    recurse through projections, functions through sampled applications."""
    if isinstance(ty, pcf.Nat):
        outcome = top_outcome or pcf_machine.eval_pcf(t, Strategy.CBN, fuel)
        bc = _ground(model.project(bound, 1))
        bp = _ground(model.project(bound, 2))
        state.cost_bounds.append(bc)
        if isinstance(outcome, pcf_machine.OutOfFuel):
            if bc == INF:
                state.trivial = True
            else:
                state.inconclusive = True
            return INF, "out-of-fuel"
        if bc == INF:
            state.trivial = True
        elif outcome.cost > bc:
            state.violations.append(
                f"cost {outcome.cost} exceeds bound {bc} for {pcf.print_term(t)[:60]}")
        if bp == INF:
            state.trivial = True
        elif outcome.value.value > bp:
            state.violations.append(f"value {outcome.value.value} exceeds {bp}")
        return outcome.cost, pcf.print_term(outcome.value)
    if isinstance(ty, Prod):
        _check_cbn(Proj(1, t), model.project(bound, 1), ty.left, state, model,
                   fuel, samples, depth=depth)
        _check_cbn(Proj(2, t), model.project(bound, 2), ty.right, state, model,
                   fuel, samples, depth=depth)
    elif isinstance(ty, Arrow):
        if depth >= 1 or not isinstance(ty.dom, pcf.Nat):
            state.skipped_functions += 1
        else:
            for n in samples:
                arg_bound = PairV(Fin(0), Fin(n))
                _check_cbn(App(t, Num(n)), model.apply(bound, arg_bound),
                           ty.cod, state, model, fuel, samples, depth=depth + 1)
    else:
        raise AssertionError(f"unexpected CBN type {ty}")
    if top_outcome is not None:
        if isinstance(top_outcome, pcf_machine.Converged):
            return top_outcome.cost, pcf.print_term(top_outcome.value)
        return INF, "out-of-fuel"
    return None, ""


# ---------------------------------------------------------------------------
# Differential cost testing

@dataclass(frozen=True)
class DiffResult:
    pcf_cost: object
    cbpv_cost: object
    equal: bool
    both_converged: bool
    value_match: bool


def diff_cost(t: PcfTerm, strategy: Strategy, fuel: int = DEFAULT_FUEL) -> DiffResult:
    """Exact cost agreement between the source machine and the embedding.

    The intermediate machine gets a larger rule budget: the embedding spends
    strictly more rule applications (binds, forces) for the same cost.
    """
    r1 = pcf_machine.eval_pcf(t, strategy, fuel)
    if isinstance(r1, pcf_machine.Stuck):
        raise AssertionError(f"stuck evaluation: {r1.reason}")
    embedded = embed(t, strategy).term
    if not isinstance(r1, pcf_machine.Converged):
        # Preservation only constrains converging source runs; don't chase
        # the other machine any further than the same budget.
        r2 = cbpv_machine.eval_cbpv(embedded, fuel)
        c2 = r2.cost if isinstance(r2, cbpv_machine.Terminal) else INF
        return DiffResult(INF, c2, True, False, True)
    r2 = cbpv_machine.eval_cbpv(embedded, 20 * max(r1.rules_used, 1) + 1000)
    if isinstance(r2, cbpv_machine.Terminal):
        value_match = _values_correspond(r1.value, r2.term, strategy)
        return DiffResult(r1.cost, r2.cost, r1.cost == r2.cost and value_match,
                          True, value_match)
    return DiffResult(r1.cost, INF, False, False, False)


def _values_correspond(v: PcfTerm, terminal, strategy: Strategy) -> bool:
    if strategy is Strategy.CBV:
        return cb.alpha_eq(terminal, cb.Return(embed_cbv_val(v)))
    return cb.alpha_eq(terminal, embed_cbn(v))


# ---------------------------------------------------------------------------
# Random well-typed program generation

@dataclass
class GenConfig:
    seed: int = 0
    max_depth: int = 4
    strategy: Strategy = Strategy.CBV
    type_bias: float = 0.75  # probability of a plain nat result
    recursion_rate: float = 0.4


def gen_program(cfg: GenConfig) -> PcfTerm:
    """Generate a closed, well-typed program of observable type.

    Generation follows the typing rules, so the result always typechecks
    under cfg.strategy (asserted).  Recursions are mostly well-founded
    (argument strictly decreasing towards a zero test), with a small rate of
    genuinely diverging programs to exercise fuel handling.
    """
    rng = random.Random(cfg.seed)
    gen = _Generator(rng, cfg)
    ty = gen.observable_type()
    t = gen.term((), ty, cfg.max_depth)
    got = pcf.typecheck_closed(t, cfg.strategy)
    assert got == ty, f"generator broke typing: {got} vs {ty}"
    return t


class _Generator:
    def __init__(self, rng: random.Random, cfg: GenConfig):
        self.rng = rng
        self.cfg = cfg
        self.cbv = cfg.strategy is Strategy.CBV
        self.counter = itertools.count()

    def fresh(self, base="x"):
        return f"{base}{next(self.counter)}"

    def observable_type(self):
        r = self.rng.random()
        if r < self.cfg.type_bias:
            return NAT
        if r < self.cfg.type_bias + 0.15:
            return Prod(NAT, NAT)
        if self.cbv and r < self.cfg.type_bias + 0.22:
            return ListT(NAT)
        return Prod(NAT, Prod(NAT, NAT))

    def term(self, ctx, ty, depth):
        rng = self.rng
        if isinstance(ty, pcf.Nat):
            return self.nat_term(ctx, depth)
        if isinstance(ty, Prod):
            candidates = [n for n, t in ctx if t == ty]
            if candidates and rng.random() < 0.2:
                return Var(rng.choice(candidates))
            if depth > 0 and rng.random() < 0.15:
                other = NAT
                side = rng.random() < 0.5
                inner = Prod(ty, other) if side else Prod(other, ty)
                return Proj(1 if side else 2, self.term(ctx, inner, 0))
            return Pair(self.term(ctx, ty.left, depth - 1),
                        self.term(ctx, ty.right, depth - 1))
        if isinstance(ty, ListT):
            return self.list_term(ctx, ty, depth)
        if isinstance(ty, Arrow):
            return self.function_term(ctx, ty, depth)
        raise AssertionError(ty)

    def nat_term(self, ctx, depth):
        rng = self.rng
        nat_vars = [n for n, t in ctx if t == NAT]
        if depth <= 0:
            if nat_vars and rng.random() < 0.6:
                return Var(rng.choice(nat_vars))
            return Num(rng.randrange(0, 10))
        roll = rng.random()
        if roll < 0.18:
            return Num(rng.randrange(0, 10))
        if roll < 0.30 and nat_vars:
            return Var(rng.choice(nat_vars))
        if roll < 0.52:
            op = rng.choice(("add", "add", "mul", "sub", "div", "mod"))
            return Arith(op, self.nat_term(ctx, depth - 1),
                         self.nat_term(ctx, depth - 1))
        if roll < 0.62:
            return IfZ(self.nat_term(ctx, depth - 1),
                       self.nat_term(ctx, depth - 1),
                       self.nat_term(ctx, depth - 1))
        if roll < 0.70:
            p = self.term(ctx, Prod(NAT, NAT), depth - 1)
            return Proj(rng.choice((1, 2)), p)
        if roll < 0.70 + self.cfg.recursion_rate * 0.5:
            return self.recursive_call(ctx, depth)
        if roll < 0.92:
            # let-style application
            x = self.fresh("a")
            bound_ty = NAT if rng.random() < 0.7 else Prod(NAT, NAT)
            bound = self.term(ctx, bound_ty, depth - 1)
            body = self.nat_term(ctx + ((x, bound_ty),), depth - 1)
            return App(Lam(x, bound_ty, body), bound)
        if self.cbv and rng.random() < 0.5:
            xs = self.list_term(ctx, ListT(NAT), depth - 1)
            h, tl = self.fresh("h"), self.fresh("t")
            nil_b = self.nat_term(ctx, depth - 1)
            # Heads get infinite potential, so use them sparingly.
            cons_ctx = ctx + (((h, NAT),) if rng.random() < 0.25 else ())
            cons_b = self.nat_term(cons_ctx, depth - 1)
            return LCase(xs, nil_b, h, tl, cons_b)
        if not self.cbv and rng.random() < 0.3:
            # lazy value recursion: converges when the taken branch ignores it
            x = self.fresh("z")
            return FixCbn(x, NAT, IfZ(Num(0), self.nat_term(ctx, depth - 1),
                                      Var(x)))
        return Arith("add", self.nat_term(ctx, depth - 1), Num(rng.randrange(0, 4)))

    def list_term(self, ctx, ty, depth):
        rng = self.rng
        list_vars = [n for n, t in ctx if t == ty]
        if depth <= 0 or rng.random() < 0.25:
            if list_vars and rng.random() < 0.5:
                return Var(rng.choice(list_vars))
            return list_literal(rng.randrange(0, 9)
                                for _ in range(rng.randrange(0, 5)))
        return Cons(self.nat_term(ctx, depth - 1),
                    self.list_term(ctx, ty, depth - 1))

    def function_term(self, ctx, ty, depth):
        x = self.fresh("p")
        body = self.term(ctx + ((x, ty.dom),), ty.cod, depth - 1)
        return Lam(x, ty.dom, body)

    def recursive_call(self, ctx, depth):
        """A first-order recursive function applied to a small numeral."""
        rng = self.rng
        f, x = self.fresh("f"), self.fresh("n")
        arg = Num(rng.randrange(0, 16))
        diverge = rng.random() < 0.06
        inner_ctx = ctx + ((x, NAT),)
        base = self.nat_term(inner_ctx, max(depth - 2, 0))
        if diverge:
            dec = Var(x)  # no decrease: runs out of fuel
        elif rng.random() < 0.6:
            dec = Arith("sub", Var(x), Num(rng.randrange(1, 3)))
        else:
            dec = Arith("div", Var(x), Num(rng.randrange(2, 4)))
        if self.cbv:
            step = self.combine(App(Var(f), dec), inner_ctx, depth)
            fn = RecCbv(f, x, NAT, NAT, IfZ(Var(x), base, step))
            return App(fn, arg)
        step = self.combine(App(Var(f), dec), inner_ctx, depth)
        fn = FixCbn(f, Arrow(NAT, NAT),
                    Lam(x, NAT, IfZ(Var(x), base, step)))
        return App(fn, arg)

    def combine(self, call, ctx, depth):
        rng = self.rng
        op = rng.choice(("add", "add", "mul"))
        other = (Num(rng.randrange(0, 5)) if rng.random() < 0.7
                 else self.nat_term(ctx, max(depth - 3, 0)))
        return Arith(op, other, call) if rng.random() < 0.5 else Arith(op, call, other)


def gen_pcfc_ground(seed: int, max_depth: int = 4) -> PcfTerm:
    """Closed recurrence-language term of type nat or cost."""
    rng = random.Random(seed)
    ty = NAT if rng.random() < 0.6 else COST
    t = _gen_pcfc(rng, (), ty, max_depth)
    assert pcfc_lang.typecheck_closed(t) == ty
    return t


def _gen_pcfc(rng, ctx, ty, depth):
    p = pcf
    my_vars = [n for n, t in ctx if t == ty]
    if isinstance(ty, Prod):
        return Pair(_gen_pcfc(rng, ctx, ty.left, depth - 1),
                    _gen_pcfc(rng, ctx, ty.right, depth - 1))
    if isinstance(ty, Arrow):
        x = f"v{rng.randrange(10**6)}"
        return Lam(x, ty.dom, _gen_pcfc(rng, ctx + ((x, ty.dom),), ty.cod, depth - 1))
    # ground: nat or cost
    if depth <= 0:
        if my_vars and rng.random() < 0.5:
            return Var(rng.choice(my_vars))
        return Num(rng.randrange(0, 8)) if ty == NAT else (
            p.Zero() if rng.random() < 0.5 else p.One())
    roll = rng.random()
    if roll < 0.2:
        if ty == NAT:
            return Num(rng.randrange(0, 8))
        return numc(rng.randrange(0, 4))
    if roll < 0.45:
        if ty == NAT:
            op = rng.choice(("add", "mul", "sub", "div", "mod"))
            return Arith(op, _gen_pcfc(rng, ctx, NAT, depth - 1),
                         _gen_pcfc(rng, ctx, NAT, depth - 1))
        return p.CPlus(_gen_pcfc(rng, ctx, COST, depth - 1),
                       _gen_pcfc(rng, ctx, COST, depth - 1))
    if roll < 0.6:
        return IfZ(_gen_pcfc(rng, ctx, NAT, depth - 1),
                   _gen_pcfc(rng, ctx, ty, depth - 1),
                   _gen_pcfc(rng, ctx, ty, depth - 1))
    if roll < 0.7:
        side = rng.random() < 0.5
        other = NAT if rng.random() < 0.5 else COST
        inner = Prod(ty, other) if side else Prod(other, ty)
        return Proj(1 if side else 2, _gen_pcfc(rng, ctx, inner, depth - 1))
    if roll < 0.85:
        x = f"b{rng.randrange(10**6)}"
        bty = NAT if rng.random() < 0.6 else COST
        return App(Lam(x, bty, _gen_pcfc(rng, ctx + ((x, bty),), ty, depth - 1)),
                   _gen_pcfc(rng, ctx, bty, depth - 1))
    if roll < 0.92:
        # guarded value recursion; converges (the guard picks the base branch)
        x = f"r{rng.randrange(10**6)}"
        return FixCbn(x, ty, IfZ(Num(0), _gen_pcfc(rng, ctx, ty, depth - 1), Var(x)))
    # a genuinely diverging recurrence
    x = f"w{rng.randrange(10**6)}"
    return FixCbn(x, ty, Var(x))


# ---------------------------------------------------------------------------
# Shrinking (derivation-directed: only closed well-typed candidates)

def shrink_program(t: PcfTerm, strategy: Strategy, still_fails) -> PcfTerm:
    """Greedy shrink: keep replacing the witness with the smallest failing
    closed well-typed candidate drawn from its own subterms and numeral
    reductions."""
    current = t
    improved = True
    while improved:
        improved = False
        want = pcf.typecheck_closed(current, strategy)
        for cand in sorted(_shrink_candidates(current, strategy, want),
                           key=_term_size):
            if _term_size(cand) >= _term_size(current):
                continue
            try:
                if still_fails(cand):
                    current = cand
                    improved = True
                    break
            except Exception:
                continue
    return current


def _shrink_candidates(t, strategy, want):
    for sub in _subterms(t):
        if sub is t:
            continue
        if pcf.free_vars(sub):
            continue
        try:
            if pcf.typecheck_closed(sub, strategy) == want:
                yield sub
        except pcf.TypeCheckError:
            continue
    if isinstance(t, IfZ):
        yield t.zero
        yield t.nonzero
    for small in _numeral_shrinks(t):
        yield small


def _subterms(t):
    yield t
    for f in t.__dataclass_fields__:
        v = getattr(t, f)
        if isinstance(v, PcfTerm):
            yield from _subterms(v)


def _numeral_shrinks(t):
    # halve the first large numeral found (breadth-first)
    queue = [(t, ())]
    while queue:
        node, path = queue.pop(0)
        if isinstance(node, Num) and node.value > 0:
            yield _replace(t, path, Num(node.value // 2))
            return
        for f in node.__dataclass_fields__:
            v = getattr(node, f)
            if isinstance(v, PcfTerm):
                queue.append((v, path + (f,)))


def _replace(t, path, new):
    if not path:
        return new
    f = path[0]
    kwargs = {g: getattr(t, g) for g in t.__dataclass_fields__}
    kwargs[f] = _replace(kwargs[f], path[1:], new)
    return type(t)(**kwargs)


def _term_size(t):
    return 1 + sum(_term_size(getattr(t, f)) for f in t.__dataclass_fields__
                   if isinstance(getattr(t, f), PcfTerm))


# ---------------------------------------------------------------------------
# Corpus

@dataclass(frozen=True)
class CorpusEntry:
    name: str
    kind: str  # "pcf" or "recurrence"
    strategy: Strategy | None
    source: str | None = None
    build: object = None  # callable for programmatic entries

    def term(self) -> PcfTerm:
        if self.build is not None:
            return self.build()
        if self.kind == "pcf":
            term, _ = pcf.parse_pcf(self.source)
            return term
        return pcfc_lang.parse_pcfc(self.source)


EXP_SOURCE = """
(rec (f n nat nat)
  (ifz n
    (num 1)
    (let (r (app f (div n (num 2))))
      (let (s (mul r r))
        (ifz (mod n (num 2)) s (mul (num 2) s))))))
"""

MERGESORT_SOURCE = """
(let (dv (rec (dv xs (list nat) (prod (list nat) (list nat)))
  (lcase xs
    (pair nil nil)
    (h t (lcase t
      (pair (cons h nil) nil)
      (h2 t2 (let (p (app dv t2))
        (pair (cons h (proj1 p)) (cons h2 (proj2 p))))))))))
(let (mg (rec (mg p (prod (list nat) (list nat)) (list nat))
  (lcase (proj1 p)
    (proj2 p)
    (h1 t1 (lcase (proj2 p)
      (proj1 p)
      (h2 t2 (ifz (sub (num 1) (sub (num 1) (sub h1 h2)))
        (cons h1 (app mg (pair t1 (proj2 p))))
        (cons h2 (app mg (pair (proj1 p) t2))))))))))
(rec (srt xs (list nat) (list nat))
  (lcase xs
    nil
    (h t (lcase t
      (cons h nil)
      (h2 t2 (let (q (app dv xs))
        (app mg (pair (app srt (proj1 q)) (app srt (proj2 q))))))))))))
"""


def exp_term() -> PcfTerm:
    term, _ = pcf.parse_pcf(EXP_SOURCE)
    return term


def mergesort_term() -> PcfTerm:
    term, _ = pcf.parse_pcf(MERGESORT_SOURCE)
    return term


def fig_recurrence_term(c: int = 1, d: int = 1) -> PcfTerm:
    """The sorting recurrence, transcribed directly in the recurrence
    language with stub divide/merge recurrences: divide on a length k costs
    c*k and yields the two half lengths; merge on lengths (k, l) costs
    d*(k+l) and yields k+l."""
    g, k, q, n = "g", "k", "q", "n"
    tocost = FixCbn(g, Arrow(NAT, COST),
                    Lam(k, NAT,
                        IfZ(Var(k), pcf.Zero(),
                            pcf.CPlus(pcf.One(),
                                      App(Var(g), Arith("sub", Var(k), Num(1)))))))

    def times_cost(factor, expr):
        out = App(tocost, expr)
        for _ in range(factor - 1):
            out = pcf.CPlus(App(tocost, expr), out)
        return out

    divide = Lam(k, NAT,
                 Pair(times_cost(c, Var(k)),
                      Pair(Arith("div", Arith("add", Var(k), Num(1)), Num(2)),
                           Arith("div", Var(k), Num(2)))))
    merge = Lam(q, Prod(NAT, NAT),
                Pair(times_cost(d, Arith("add", Proj(1, Var(q)), Proj(2, Var(q)))),
                     Arith("add", Proj(1, Var(q)), Proj(2, Var(q)))))

    def let(name, ty, bound, body):
        return App(Lam(name, ty, body), bound)

    halves = Prod(NAT, NAT)
    srt = "srt"
    general = let("dd", Prod(COST, halves), App(divide, Var(n)),
              let("s1", Prod(COST, NAT), App(Var(srt), Proj(1, Proj(2, Var("dd")))),
              let("s2", Prod(COST, NAT), App(Var(srt), Proj(2, Proj(2, Var("dd")))),
              let("m", Prod(COST, NAT),
                  App(merge, Pair(Proj(2, Var("s1")), Proj(2, Var("s2")))),
                  Pair(pcf.CPlus(numc(7),
                                 pcf.CPlus(Proj(1, Var("dd")),
                                           pcf.CPlus(Proj(1, Var("s1")),
                                                     pcf.CPlus(Proj(1, Var("s2")),
                                                               Proj(1, Var("m")))))),
                       Proj(2, Var("m")))))))
    body = Lam(n, NAT,
               IfZ(Var(n), Pair(pcf.Zero(), Num(0)),
                   IfZ(Arith("sub", Var(n), Num(1)), Pair(pcf.Zero(), Num(1)),
                       general)))
    return FixCbn(srt, Arrow(NAT, Prod(COST, NAT)), body)


def corpus() -> list:
    """Named reference programs exercised by the suites."""
    entries = [
        CorpusEntry("exp", "pcf", Strategy.CBV, EXP_SOURCE),
        CorpusEntry("mergesort", "pcf", Strategy.CBV, MERGESORT_SOURCE),
        CorpusEntry("sort-recurrence", "recurrence", None,
                    build=fig_recurrence_term),
        CorpusEntry("omega", "pcf", Strategy.CBN, "(fix (w nat) w)"),
        CorpusEntry("omega-cbv", "pcf", Strategy.CBV,
                    "(app (rec (f x nat nat) (app f x)) (num 0))"),
        CorpusEntry("cbn-lazy-pair", "pcf", Strategy.CBN,
                    "(proj2 (fix (p (prod nat nat)) "
                    "(pair (num 3) (add (proj1 p) (num 1)))))"),
        CorpusEntry("cbn-const-omega", "pcf", Strategy.CBN,
                    "(app (lam (x nat) (num 3)) (fix (w nat) w))"),
        CorpusEntry("cbn-fix-const", "pcf", Strategy.CBN, "(fix (x nat) (num 5))"),
        CorpusEntry("cbn-double", "pcf", Strategy.CBN,
                    "(app (fix (f (-> nat nat)) (lam (x nat) "
                    "(ifz x (num 0) (add (num 2) (app f (sub x (num 1))))))) (num 6))"),
        # a conditional at function type: the bound joins the branches
        CorpusEntry("cbn-branchy-function", "pcf", Strategy.CBN,
                    "(app (ifz (num 1) (lam (x nat) (add x (num 1))) "
                    "(lam (x nat) (mul x (num 3)))) (num 5))"),
        CorpusEntry("monus-underflow", "pcf", Strategy.CBV, "(sub (num 5) (num 7))"),
        CorpusEntry("div-by-zero", "pcf", Strategy.CBV, "(div (num 7) (num 0))"),
        CorpusEntry("mod-by-zero", "pcf", Strategy.CBV, "(mod (num 7) (num 0))"),
        CorpusEntry("mod-small", "pcf", Strategy.CBV, "(mod (num 7) (num 3))"),
        CorpusEntry("div-floor", "pcf", Strategy.CBV, "(div (num 7) (num 2))"),
        CorpusEntry("identity-app", "pcf", Strategy.CBV,
                    "(app (lam (x nat) x) (num 0))"),
        CorpusEntry("proj-pair", "pcf", Strategy.CBV,
                    "(proj1 (pair (num 2) (num 3)))"),
        CorpusEntry("let-chain", "pcf", Strategy.CBV,
                    "(let (a (num 3)) (let (b (add a a)) (mul b b)))"),
        CorpusEntry("compose", "pcf", Strategy.CBV,
                    "(app (app (lam (f (-> nat nat)) (lam (x nat) (app f (app f x)))) "
                    "(lam (y nat) (add y (num 1)))) (num 5))"),
        CorpusEntry("sum-list", "pcf", Strategy.CBV,
                    "(app (rec (sum xs (list nat) nat) (lcase xs (num 0) "
                    "(h t (add h (app sum t))))) "
                    "(cons (num 1) (cons (num 2) (cons (num 3) nil))))"),
        CorpusEntry("length-list", "pcf", Strategy.CBV,
                    "(app (rec (len xs (list nat) nat) (lcase xs (num 0) "
                    "(h t (add (num 1) (app len t))))) "
                    "(cons (num 4) (cons (num 4) nil)))"),
    ]
    return entries


def corpus_instances() -> list:
    """Closed, runnable instances derived from the corpus (functions applied
    to concrete arguments)."""
    out = []
    for e in corpus():
        if e.kind != "pcf":
            continue
        if e.name == "exp":
            for n in (0, 1, 2, 4, 8):
                out.append((f"exp@{n}", Strategy.CBV, App(e.term(), Num(n))))
        elif e.name == "mergesort":
            for xs in ((), (5,), (3, 1), (9, 2, 5, 1), (4, 4, 1, 7, 0, 2)):
                out.append((f"mergesort@{len(xs)}", Strategy.CBV,
                            App(e.term(), list_literal(xs))))
        else:
            out.append((e.name, e.strategy, e.term()))
    return out


# ---------------------------------------------------------------------------
# Suite driver

@dataclass
class SuiteResult:
    reports: list = field(default_factory=list)
    diffs: list = field(default_factory=list)

    @property
    def violations(self):
        return [r for r in self.reports if r.verdict == VIOLATION]

    @property
    def diff_failures(self):
        return [(pid, d) for pid, d in self.diffs if not d.equal]

    def converging(self):
        return [r for r in self.reports if r.observed_cost != INF]

    def trivially_inf_fraction(self) -> float:
        conv = self.converging()
        if not conv:
            return 0.0
        triv = [r for r in conv if r.verdict == HOLDS_TRIVIALLY_INF]
        return len(triv) / len(conv)


def run_suite(count: int = 100, seed: int = 0, fuel: int = DEFAULT_FUEL,
              strategies=(Strategy.CBV, Strategy.CBN),
              denote_fuel: int = sized_model.DEFAULT_FIX_FUEL,
              include_corpus: bool = True, samples=DEFAULT_SAMPLES,
              progress=None) -> SuiteResult:
    result = SuiteResult()
    programs = []
    if include_corpus:
        programs.extend(corpus_instances())
    for strategy in strategies:
        for i in range(count):
            cfg = GenConfig(seed=seed * 1_000_003 + i, strategy=strategy)
            pid = f"gen-{strategy.value}-{i:04d}"
            programs.append((pid, strategy, gen_program(cfg)))
    for pid, strategy, term in programs:
        d = diff_cost(term, strategy, fuel)
        result.diffs.append((pid, d))
        report = check_bound(term, strategy, fuel, samples, denote_fuel, pid)
        result.reports.append(report)
        if progress is not None:
            progress(report, d)
    return result


# ---------------------------------------------------------------------------
# Deep evaluations need a thread with a large stack (the machines recurse).

def run_deep(fn, *args, stack_mb: int = 512, **kwargs):
    """Run fn in a worker thread with a large stack and recursion limit."""
    import sys
    out: dict = {}

    def work():
        old = sys.getrecursionlimit()
        sys.setrecursionlimit(500_000)
        try:
            out["value"] = fn(*args, **kwargs)
        except BaseException as e:  # re-raised in the caller
            out["error"] = e
        finally:
            sys.setrecursionlimit(old)

    old_size = threading.stack_size(stack_mb * 1024 * 1024)
    try:
        worker = threading.Thread(target=work, name="recx-deep")
        worker.start()
        worker.join()
    finally:
        threading.stack_size(old_size)
    if "error" in out:
        raise out["error"]
    return out["value"]
