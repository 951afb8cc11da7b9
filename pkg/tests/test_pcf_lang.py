import pytest
from hypothesis import given, strategies as st

import recx.pcf_lang as pcf
from recx.pcf_lang import (EMPTY_CONTEXT, Arrow, Lam, NAT, Num, Prod,
                           RecCbv, Strategy, StrategyError, TypeCheckError,
                           TypingContext, Var, alpha_eq, free_vars, parse_pcf,
                           print_term, subst, typecheck_pcf)
from recx.sexpr import ParseError
from recx.workbench import GenConfig, gen_program

CBV, CBN = Strategy.CBV, Strategy.CBN


def tc(term, strategy=CBV, ctx=EMPTY_CONTEXT):
    return typecheck_pcf(ctx, term, strategy)


class TestTypecheck:
    def test_identity_function(self):
        t = Lam("x", NAT, Var("x"))
        assert tc(t) == Arrow(NAT, NAT)

    def test_fix_under_cbv_is_strategy_error(self):
        t = pcf.FixCbn("x", NAT, Var("x"))
        with pytest.raises(StrategyError):
            tc(t, CBV)
        assert tc(t, CBN) == NAT

    def test_rec_under_cbn_is_strategy_error(self):
        t = RecCbv("f", "x", NAT, NAT, Var("x"))
        with pytest.raises(StrategyError):
            tc(t, CBN)
        assert tc(t, CBV) == Arrow(NAT, NAT)

    def test_lcase_on_nil(self):
        t = pcf.LCase(pcf.Nil(), Num(0), "h", "t", Num(1))
        assert tc(t, CBV) == NAT

    def test_lists_under_cbn_rejected(self):
        with pytest.raises(StrategyError):
            tc(pcf.Nil(), CBN)

    def test_ill_typed_application(self):
        with pytest.raises(TypeCheckError):
            tc(pcf.App(Num(1), Num(2)))

    def test_branch_disagreement(self):
        with pytest.raises(TypeCheckError):
            tc(pcf.IfZ(Num(0), Num(1), pcf.Pair(Num(1), Num(2))))

    def test_cost_constructors_rejected_in_source(self):
        with pytest.raises(TypeCheckError):
            tc(pcf.Zero(), CBV)

    def test_shadowing(self):
        inner = Lam("x", Prod(NAT, NAT), Var("x"))
        t = Lam("x", NAT, pcf.App(inner, pcf.Pair(Var("x"), Var("x"))))
        assert tc(t) == Arrow(NAT, Prod(NAT, NAT))


class TestSubst:
    def test_free_occurrence(self):
        assert subst(Var("x"), "x", Num(3)) == Num(3)

    def test_bound_occurrence_shielded(self):
        t = Lam("x", NAT, Var("x"))
        assert subst(t, "x", Num(3)) == t

    def test_capture_avoidance_renames(self):
        t = Lam("y", NAT, Var("x"))
        out = subst(t, "x", Var("y"))
        assert isinstance(out, Lam)
        assert out.var != "y"
        assert out.body == Var("y")
        assert alpha_eq(out, Lam("z", NAT, Var("y")))

    def test_rec_binders(self):
        t = RecCbv("f", "x", NAT, NAT, pcf.App(Var("f"), Var("g")))
        out = subst(t, "g", Var("x"))
        # the substituted x must not be captured by rec's argument binder
        assert pcf.typecheck_pcf(
            TypingContext({"x": NAT}), out, CBV) == Arrow(NAT, NAT)
        assert "x" in free_vars(out)


class TestParse:
    def test_numeral(self):
        t, _ = parse_pcf("(num 5)")
        assert t == Num(5)

    def test_identity_application(self):
        t, s = parse_pcf("(app (lam (x nat) x) (num 0))")
        assert t == pcf.App(Lam("x", NAT, Var("x")), Num(0))
        assert s == CBV

    def test_rec_infers_cbv(self):
        t, s = parse_pcf(
            "(rec (f x nat nat) (ifz x (num 1) (app f (sub x (num 1)))))")
        assert isinstance(t, RecCbv)
        assert s == CBV

    def test_fix_infers_cbn(self):
        _, s = parse_pcf("(fix (x nat) x)")
        assert s == CBN

    def test_mixed_strategies_rejected(self):
        with pytest.raises(ParseError):
            parse_pcf("(pair (fix (x nat) x) (cons (num 1) nil))")

    def test_let_desugars_to_application(self):
        t, _ = parse_pcf("(let (x (num 3)) (add x x))")
        assert t == pcf.App(Lam("x", NAT, pcf.Arith("add", Var("x"), Var("x"))),
                            Num(3))

    def test_let_infers_bound_type(self):
        t, _ = parse_pcf("(let (p (pair (num 1) (num 2))) (proj1 p))")
        assert t.fn.annot == Prod(NAT, NAT)

    def test_parse_error_has_position(self):
        with pytest.raises(ParseError) as err:
            parse_pcf("(num 5))")
        assert err.value.line == 1

    def test_comments(self):
        t, _ = parse_pcf("; a numeral\n(num 7) ; trailing\n")
        assert t == Num(7)

    def test_list_syntax(self):
        t, s = parse_pcf("(lcase (cons (num 1) nil) (num 0) (h t h))")
        assert s == CBV
        assert tc(t, CBV) == NAT


@st.composite
def programs(draw):
    seed = draw(st.integers(0, 10_000))
    strategy = draw(st.sampled_from([CBV, CBN]))
    return gen_program(GenConfig(seed=seed, strategy=strategy)), strategy


class TestProperties:
    @given(programs())
    def test_roundtrip_through_printer(self, prog):
        t, strategy = prog
        text = print_term(t)
        back = pcf.parse_pcf_term(text, strategy)
        assert alpha_eq(back, t)

    @given(programs())
    def test_weakening(self, prog):
        t, strategy = prog
        ty = tc(t, strategy)
        widened = TypingContext({"fresh-var": Prod(NAT, NAT)})
        assert typecheck_pcf(widened, t, strategy) == ty

    @given(st.integers(0, 10_000))
    def test_substitution_lemma(self, seed):
        # x:nat |- t : A and |- v : nat imply |- t[v/x] : A
        t = gen_program(GenConfig(seed=seed, strategy=CBV, max_depth=3))
        ty = tc(t, CBV)
        opened = pcf.App(Lam("hole", NAT, t), Var("hole"))
        ctx = TypingContext({"hole": NAT})
        assert typecheck_pcf(ctx, opened, CBV) == ty
        closed = subst(opened, "hole", Num(4))
        assert tc(closed, CBV) == ty

    @given(programs())
    def test_typing_deterministic(self, prog):
        t, strategy = prog
        assert tc(t, strategy) == tc(t, strategy)
