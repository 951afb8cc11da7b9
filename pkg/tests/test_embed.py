import pytest
from hypothesis import given, strategies as st

import recx.cbpv_lang as cb
import recx.pcf_lang as pcf
from recx.cbpv_lang import CArrow, CFree, CWith, VNAT, VThunk
from recx.embed import (UnsupportedType, embed, embed_cbn, embed_cbn_type,
                        embed_cbv, embed_cbv_type, embed_cbv_val,
                        embed_context, is_cbv_value)
from recx.pcf_lang import (Arrow, ListT, NAT, Num, Prod, Strategy,
                           TypingContext, Var, parse_pcf, parse_pcf_term)
from recx.workbench import GenConfig, diff_cost, gen_program

CBV, CBN = Strategy.CBV, Strategy.CBN


class TestTypeTranslation:
    def test_cbn_nat_is_a_returner(self):
        assert embed_cbn_type(NAT) == CFree(VNAT)

    def test_cbn_function_thunks_its_domain(self):
        assert embed_cbn_type(Arrow(NAT, NAT)) == CArrow(VThunk(CFree(VNAT)),
                                                         CFree(VNAT))

    def test_cbn_product_is_negative(self):
        assert embed_cbn_type(Prod(NAT, NAT)) == CWith(CFree(VNAT), CFree(VNAT))

    def test_cbn_lists_unsupported(self):
        with pytest.raises(UnsupportedType):
            embed_cbn_type(ListT(NAT))

    def test_cbv_function_is_a_thunked_arrow(self):
        assert embed_cbv_type(Arrow(NAT, NAT)) == VThunk(
            CArrow(VNAT, CFree(VNAT)))

    def test_cbv_nat_and_lists(self):
        assert embed_cbv_type(NAT) == VNAT
        assert embed_cbv_type(ListT(NAT)) == cb.VList(VNAT)


class TestTermTranslation:
    def test_cbn_numeral_returns_itself(self):
        assert embed_cbn(Num(3)) == cb.Return(cb.Num(3))

    def test_cbn_variable_is_forced(self):
        assert embed_cbn(Var("x")) == cb.Force(cb.Var("x"))

    def test_cbn_application_thunks_the_argument(self):
        t = pcf.App(Var("f"), Num(1))
        out = embed_cbn(t)
        assert out == cb.App(cb.Force(cb.Var("f")),
                             cb.Thunk(cb.Return(cb.Num(1))))

    def test_cbn_lambda_charges_its_body(self):
        out = embed_cbn(pcf.Lam("x", NAT, Num(0)))
        assert isinstance(out, cb.Lam)
        assert isinstance(out.body, cb.Charge)

    def test_cbv_value_is_returned(self):
        assert embed_cbv(Num(5)) == cb.Return(cb.Num(5))

    def test_cbv_rec_becomes_a_thunked_fix(self):
        t = parse_pcf_term("(rec (f x nat nat) x)", CBV)
        v = embed_cbv_val(t)
        assert isinstance(v, cb.Thunk)
        assert isinstance(v.comp, cb.Fix)
        assert isinstance(v.comp.body, cb.Lam)

    def test_cbv_application_charges_at_the_call(self):
        t, _ = parse_pcf("(app (lam (x nat) x) (num 0))")
        out = embed_cbv(t)
        assert isinstance(out, cb.Charge)
        assert isinstance(out.comp, cb.App)


@st.composite
def programs(draw):
    seed = draw(st.integers(0, 6_000))
    strategy = draw(st.sampled_from([CBV, CBN]))
    return gen_program(GenConfig(seed=seed, strategy=strategy)), strategy


class TestTypingCommutes:
    @given(programs())
    def test_translation_typechecks_at_translated_type(self, prog):
        t, strategy = prog
        emb = embed(t, strategy)
        got = cb.typecheck_comp(cb.EMPTY_CONTEXT, emb.term)
        assert got == emb.target_type

    @given(st.integers(0, 3_000))
    def test_open_terms_commute_cbv(self, seed):
        t = gen_program(GenConfig(seed=seed, strategy=CBV, max_depth=3))
        opened = pcf.App(pcf.Lam("arg", NAT, t), Var("arg"))
        ctx = TypingContext({"arg": NAT})
        ty = pcf.typecheck_pcf(ctx, opened, CBV)
        translated = embed_cbv(opened)
        got = cb.typecheck_comp(embed_context(ctx, CBV), translated)
        assert got == CFree(embed_cbv_type(ty))

    @given(st.integers(0, 3_000))
    def test_open_terms_commute_cbn(self, seed):
        t = gen_program(GenConfig(seed=seed, strategy=CBN, max_depth=3))
        while isinstance(pcf.typecheck_closed(t, CBN), Prod):
            t = pcf.Proj(1, t)
        opened = pcf.Arith("add", Var("arg"), t)
        ctx = TypingContext({"arg": NAT})
        ty = pcf.typecheck_pcf(ctx, opened, CBN)
        translated = embed_cbn(opened)
        got = cb.typecheck_comp(embed_context(ctx, CBN), translated)
        assert got == embed_cbn_type(ty)


class TestValueLemmas:
    @given(st.integers(0, 3_000))
    def test_values_translate_to_returners(self, seed):
        t = gen_program(GenConfig(seed=seed, strategy=CBV, max_depth=3))
        if not is_cbv_value(t):
            t = pcf.Pair(Num(1), pcf.Lam("x", NAT, t))
        assert embed_cbv(t) == cb.Return(embed_cbv_val(t))

    @given(st.integers(0, 3_000))
    def test_substitution_commutes_with_translation(self, seed):
        body = gen_program(GenConfig(seed=seed, strategy=CBV, max_depth=3))
        cases = [
            (pcf.Arith("add", Var("hole"), body), Num(3)),
            (pcf.Proj(1, Var("hole")), pcf.Pair(Num(1), Num(2))),
            (pcf.App(Var("hole"), body), pcf.Lam("y", NAT, Var("y"))),
        ]
        for opened, v in cases:
            lhs = embed_cbv(pcf.subst(opened, "hole", v))
            rhs = cb.subst(embed_cbv(opened), "hole", embed_cbv_val(v))
            assert cb.alpha_eq(lhs, rhs)


class TestCostPreservation:
    @given(programs())
    def test_costs_agree_exactly(self, prog):
        t, strategy = prog
        d = diff_cost(t, strategy, fuel=1_200)
        assert d.equal, d
        if d.both_converged:
            assert d.value_match

    def test_corpus_spot_checks(self):
        for src, cost in [("(app (lam (x nat) x) (num 0))", 1),
                          ("(proj1 (pair (num 2) (num 3)))", 1),
                          ("(let (a (num 3)) (let (b (add a a)) (mul b b)))", 2)]:
            t, s = parse_pcf(src)
            d = diff_cost(t, s)
            assert d.both_converged and d.equal
            assert d.pcf_cost == cost == d.cbpv_cost
