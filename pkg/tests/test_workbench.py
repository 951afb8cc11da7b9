import json

import recx.pcf_lang as pcf
from recx.pcf_lang import App, FixCbn, NAT, Num, Strategy, Var, parse_pcf
from recx.pcf_machine import Converged, eval_pcf
from recx.sized_model import Fin, PairV, SizedModel
from recx.workbench import (GenConfig, HOLDS, HOLDS_TRIVIALLY_INF, INF,
                            INCONCLUSIVE_FUEL, VIOLATION, check_bound, corpus,
                            corpus_instances, diff_cost, exp_term,
                            fig_recurrence_term, gen_program, list_literal,
                            mergesort_term, run_suite, shrink_program)

CBV, CBN = Strategy.CBV, Strategy.CBN


def unrolled_exp_cost(n):
    return 0 if n == 0 else 3 + unrolled_exp_cost(n // 2)


class TestCheckBound:
    def test_numeral_holds_tightly(self):
        rep = check_bound(Num(5), CBV)
        assert rep.verdict == HOLDS
        assert rep.observed_cost == 0 and rep.bound_cost == 0
        assert rep.bound_potential == "5"

    def test_exp_at_8(self):
        # applying the function costs one unit on top of the recurrence
        rep = check_bound(App(exp_term(), Num(8)), CBV)
        assert rep.verdict == HOLDS
        assert rep.bound_cost == 1 + unrolled_exp_cost(8)
        assert rep.observed_cost == rep.bound_cost  # tight here

    def test_exp_value_is_an_upper_bound_not_exact(self):
        # even inputs over-approximate the value: the potential squares then
        # doubles regardless of parity
        rep = check_bound(App(exp_term(), Num(4)), CBV)
        assert rep.verdict == HOLDS
        assert int(rep.bound_potential) >= 16

    def test_divergent_program_with_infinite_bound(self):
        rep = check_bound(FixCbn("w", NAT, Var("w")), CBN, fuel=2_000)
        assert rep.verdict == HOLDS_TRIVIALLY_INF
        assert rep.observed_cost == INF and rep.bound_cost == INF

    def test_function_typed_program_sampled(self):
        rep = check_bound(exp_term(), CBV, samples=(0, 1, 2, 5))
        assert rep.verdict == HOLDS

    def test_cbn_product_recurses_through_projections(self):
        t, s = parse_pcf("(pair (num 1) (add (num 2) (num 3)))")
        rep = check_bound(t, CBN)
        assert rep.verdict == HOLDS

    def test_inconclusive_when_fuel_runs_out_with_finite_bound(self):
        # terminating but expensive: tiny fuel starves the machine while the
        # bound stays finite
        t, _ = parse_pcf(
            "(app (rec (f n nat nat) (ifz n (num 0) (app f (sub n (num 1)))))"
            " (num 50))")
        rep = check_bound(t, CBV, fuel=20)
        assert rep.verdict == INCONCLUSIVE_FUEL

    def test_report_json_schema(self):
        rep = check_bound(Num(3), CBV, program_id="n3")
        d = rep.to_json_dict()
        assert set(d) == {"id", "strategy", "observed_cost", "bound_cost",
                          "verdict", "fuel"}
        assert json.loads(json.dumps(d)) == d

    def test_infinity_encodes_as_string(self):
        rep = check_bound(FixCbn("w", NAT, Var("w")), CBN, fuel=500)
        d = rep.to_json_dict()
        assert d["observed_cost"] == "inf" and d["bound_cost"] == "inf"


class TestNegativeControls:
    """The checkers must be able to fail: a tampered pipeline may not pass."""

    def test_diff_detects_a_broken_embedding(self):
        import recx.cbpv_machine as cm
        from recx.cbpv_lang import double_charges
        from recx.embed import embed
        t, s = parse_pcf("(app (lam (x nat) x) (num 0))")
        tampered = double_charges(embed(t, s).term)
        r1 = eval_pcf(t, s)
        r2 = cm.eval_cbpv(tampered)
        assert r1.cost != r2.cost  # a wrong embedding is visible

    def test_checker_detects_an_under_approximating_bound(self):
        from recx.workbench import _check_comp_cbv, _CheckState
        t, _ = parse_pcf("(app (lam (x nat) x) (num 9))")
        outcome = eval_pcf(t, CBV)
        state = _CheckState()
        lying_bound = PairV(Fin(0), Fin(0))  # claims zero cost and size
        _check_comp_cbv(t, outcome, lying_bound, NAT, state, SizedModel(),
                        1000, (), 0)
        assert state.verdict() == VIOLATION

    def test_checker_detects_a_value_bound_failure(self):
        from recx.workbench import _check_val_cbv, _CheckState
        state = _CheckState()
        _check_val_cbv(Num(7), Fin(3), pcf.NAT, state, SizedModel(),
                       1000, (), 0)
        assert state.verdict() == VIOLATION


class TestDiffCost:
    def test_identity_application(self):
        t, s = parse_pcf("(app (lam (x nat) x) (num 0))")
        d = diff_cost(t, s)
        assert (d.pcf_cost, d.cbpv_cost, d.equal) == (1, 1, True)

    def test_numeral(self):
        d = diff_cost(Num(3), CBV)
        assert (d.pcf_cost, d.cbpv_cost, d.equal) == (0, 0, True)

    def test_exp_at_16(self):
        d = diff_cost(App(exp_term(), Num(16)), CBV)
        assert d.both_converged and d.equal

    def test_divergence_is_vacuous(self):
        d = diff_cost(FixCbn("w", NAT, Var("w")), CBN, fuel=300)
        assert d.equal and not d.both_converged


class TestGenerator:
    def test_deterministic_per_seed(self):
        a = gen_program(GenConfig(seed=42, strategy=CBV))
        b = gen_program(GenConfig(seed=42, strategy=CBV))
        assert a == b

    def test_always_typechecks(self):
        for seed in range(200):
            for strategy in (CBV, CBN):
                t = gen_program(GenConfig(seed=seed, strategy=strategy))
                pcf.typecheck_closed(t, strategy)  # must not raise

    def test_convergence_rate(self):
        converged = 0
        for seed in range(300):
            t = gen_program(GenConfig(seed=seed, strategy=CBV))
            if isinstance(eval_pcf(t, CBV, 100_000), Converged):
                converged += 1
        assert converged / 300 >= 0.30

    def test_shrinking_preserves_typing_and_failure(self):
        big = gen_program(GenConfig(seed=11, strategy=CBV))
        # pretend "contains an application" is the failure of interest
        def fails(t):
            return "(app " in pcf.print_term(t)
        if not fails(big):
            big = App(pcf.Lam("x", NAT, Var("x")), Num(0))
        small = shrink_program(big, CBV, fails)
        assert fails(small)
        pcf.typecheck_closed(small, CBV)


class TestCorpus:
    def test_required_entries_present(self):
        names = {e.name for e in corpus()}
        assert {"exp", "mergesort", "sort-recurrence", "omega"} <= names

    def test_exp_typechecks_cbv(self):
        assert pcf.typecheck_closed(exp_term(), CBV) == pcf.Arrow(NAT, NAT)

    def test_mergesort_sorts(self):
        out = eval_pcf(App(mergesort_term(), list_literal([4, 1, 3, 1, 2])), CBV)
        assert isinstance(out, Converged)
        values = []
        v = out.value
        while isinstance(v, pcf.Cons):
            values.append(v.head.value)
            v = v.tail
        assert values == [1, 1, 2, 3, 4]

    def test_omega_diverges(self):
        entry = next(e for e in corpus() if e.name == "omega")
        assert not isinstance(eval_pcf(entry.term(), CBN, 2_000), Converged)

    def test_every_pcf_entry_typechecks(self):
        for e in corpus():
            if e.kind == "pcf":
                pcf.typecheck_closed(e.term(), e.strategy)

    def test_instances_run_clean(self):
        for pid, strategy, t in corpus_instances():
            pcf.typecheck_closed(t, strategy)


class TestSortRecurrenceTranscription:
    def test_size_component_is_the_identity(self):
        model = SizedModel(100)
        rec = model.denote(fig_recurrence_term())
        for n in range(33):  # every length, not just powers of two
            assert model.project(model.apply(rec, Fin(n)), 2) == Fin(n)

    def test_cost_component_matches_the_unrolled_recurrence(self):
        model = SizedModel(100)
        rec = model.denote(fig_recurrence_term())

        def unrolled(n):
            return 0 if n <= 1 else 7 + 2 * n + 2 * unrolled(n // 2)

        for n in (2, 4, 8, 16, 32):
            assert model.project(model.apply(rec, Fin(n)), 1) == Fin(unrolled(n))

    def test_general_divide_merge_constants(self):
        c, d = 2, 3
        model = SizedModel(100)
        rec = model.denote(fig_recurrence_term(c, d))

        def unrolled(n):
            return 0 if n <= 1 else 7 + (c + d) * n + 2 * unrolled(n // 2)

        for n in (2, 4, 8, 16):
            assert model.project(model.apply(rec, Fin(n)), 1) == Fin(unrolled(n))


class TestSuite:
    def test_small_suite_is_clean(self):
        result = run_suite(count=15, seed=7, include_corpus=False)
        assert not result.violations
        assert not result.diff_failures
        lines = [json.dumps(r.to_json_dict()) for r in result.reports]
        assert all(json.loads(line)["verdict"] for line in lines)
