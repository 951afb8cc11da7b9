import pytest
from hypothesis import given, strategies as st

import recx.cbpv_lang as cb
import recx.pcf_lang as pcf
import recx.pcfc_lang as pcfc
from recx.embed import embed
from recx.extract import (complexity_carrier, complexity_term, extract,
                          extract_cbn, extract_cbv, potential_term,
                          potential_type)
from recx.pcf_lang import (App, Arrow, NAT, Num, Prod, Strategy, Var,
                           parse_pcf)
from recx.pcfc_lang import COST
from recx.sized_model import BOTTOM, Fin, PairV, SizedModel, denote
from recx.simplify import RuleSet, simplify
from recx.workbench import GenConfig, exp_term, gen_program

CBV, CBN = Strategy.CBV, Strategy.CBN


class TestPotentialTypes:
    def test_naturals(self):
        assert potential_type(cb.VNAT) == NAT

    def test_lists_abstract_to_lengths(self):
        assert potential_type(cb.VList(cb.VNAT)) == NAT
        assert potential_type(cb.VList(cb.VProd(cb.VNAT, cb.VNAT))) == NAT

    def test_thunked_function(self):
        ty = cb.VThunk(cb.CArrow(cb.VNAT, cb.CFree(cb.VNAT)))
        assert potential_type(ty) == Arrow(NAT, Prod(COST, NAT))

    def test_returner_carrier_is_cost_times_potential(self):
        assert complexity_carrier(cb.CFree(cb.VNAT)) == Prod(COST, NAT)


class TestClauses:
    def test_charge_adds_one_through_the_free_algebra(self):
        q, ty = complexity_term(cb.EMPTY_CONTEXT, cb.Charge(cb.Return(cb.Num(0))))
        assert ty == cb.CFree(cb.VNAT)
        assert denote(q) == PairV(Fin(1), Fin(0))

    def test_thunk_potential_is_the_complexity(self):
        m = cb.Charge(cb.Return(cb.Num(3)))
        p, _ = potential_term(cb.EMPTY_CONTEXT, cb.Thunk(m))
        q, _ = complexity_term(cb.EMPTY_CONTEXT, m)
        assert p == q

    def test_list_potential_is_its_length(self):
        v = cb.Cons(cb.Num(9), cb.Cons(cb.Num(9), cb.Nil()))
        p, ty = potential_term(cb.EMPTY_CONTEXT, v)
        assert ty == cb.VList(cb.VNAT)
        assert simplify(p) == Num(2)

    def test_cons_head_sizes_are_dropped(self):
        big = cb.Cons(cb.Num(10**9), cb.Nil())
        small = cb.Cons(cb.Num(0), cb.Nil())
        assert potential_term(cb.EMPTY_CONTEXT, big)[0] == \
            potential_term(cb.EMPTY_CONTEXT, small)[0]

    def test_lcase_head_gets_infinite_potential(self):
        # using the head makes the value bound infinite, not wrong
        m = cb.LCase(cb.Cons(cb.Num(5), cb.Nil()),
                     cb.Return(cb.Num(0)), "h", "t",
                     cb.Return(cb.Var("h")))
        q, _ = complexity_term(cb.EMPTY_CONTEXT, m)
        model = SizedModel()
        out = model.denote(q)
        assert model.project(out, 2) is BOTTOM  # head size unknowable
        assert model.project(out, 1) == Fin(0)  # but its cost is exact

    def test_mod_potential_is_right_operand_less_one(self):
        m = cb.Calc("v", "mod", cb.Num(7), cb.Num(3), cb.Return(cb.Var("v")))
        q, _ = complexity_term(cb.EMPTY_CONTEXT, m)
        assert denote(q) == PairV(Fin(0), Fin(2))

    def test_general_subtraction_keeps_the_left_potential(self):
        ctx = cb.EMPTY_CONTEXT.extend("a", cb.VNAT).extend("b", cb.VNAT)
        m = cb.Calc("v", "sub", cb.Var("a"), cb.Var("b"), cb.Return(cb.Var("v")))
        q, _ = complexity_term(ctx, m)
        out = denote(q, {"a": Fin(9), "b": Fin(4)})
        assert out == PairV(Fin(0), Fin(9))

    def test_literal_subtraction_is_exact(self):
        ctx = cb.EMPTY_CONTEXT.extend("a", cb.VNAT)
        m = cb.Calc("v", "sub", cb.Var("a"), cb.Num(4), cb.Return(cb.Var("v")))
        q, _ = complexity_term(ctx, m)
        assert denote(q, {"a": Fin(9)}) == PairV(Fin(0), Fin(5))


@st.composite
def programs(draw):
    seed = draw(st.integers(0, 5_000))
    strategy = draw(st.sampled_from([CBV, CBN]))
    return gen_program(GenConfig(seed=seed, strategy=strategy)), strategy


class TestTypingTheorem:
    @given(programs())
    def test_extraction_typechecks_at_the_translated_type(self, prog):
        t, strategy = prog
        emb = embed(t, strategy)
        q, b = complexity_term(cb.EMPTY_CONTEXT, emb.term)
        assert b == emb.target_type
        got = pcfc.typecheck_pcfc(pcfc.EMPTY_CONTEXT, q)
        assert got == complexity_carrier(b)

    @given(programs())
    def test_simplified_extraction_types_unchanged(self, prog):
        t, strategy = prog
        raw = extract(t, strategy)
        cooked = extract(t, strategy, simplify=True)
        assert pcfc.typecheck_pcfc(pcfc.EMPTY_CONTEXT, cooked.term) == \
            raw.target_type


class TestEndUserExtraction:
    def test_numeral_costs_nothing(self):
        out = extract_cbv(Num(5))
        assert denote(out.term) == PairV(Fin(0), Fin(5))

    def test_identity_application_costs_one(self):
        t, _ = parse_pcf("(app (lam (x nat) x) (num 0))")
        out = extract_cbv(t)
        assert denote(out.term) == PairV(Fin(1), Fin(0))

    def test_cbn_variable_extracts_to_itself(self):
        t = pcf.Lam("x", NAT, Var("x"))
        out = extract_cbn(t)
        model = SizedModel()
        fn = model.denote(out.term)
        assert model.apply(fn, PairV(Fin(0), Fin(7))) == PairV(Fin(1), Fin(7))

    def test_exp_satisfies_the_expected_recurrence(self):
        model = SizedModel(100)
        pot = model.project(model.denote(extract_cbv(exp_term()).term), 2)

        def T(n):
            return model.project(model.apply(pot, Fin(n)), 1).n

        def unrolled(n):
            return 0 if n == 0 else 3 + unrolled(n // 2)

        for n in (0, 1, 2, 3, 4, 8, 16, 31, 32):
            assert T(n) == unrolled(n)

    def test_extract_is_the_composite_of_embed_and_translate(self):
        t, _ = parse_pcf("(add (num 1) (num 2))")
        via_composite = complexity_term(cb.EMPTY_CONTEXT, embed(t, CBV).term)[0]
        assert extract_cbv(t).term == via_composite
