"""Command-line driver for the whole pipeline.

Commands: run, emit-cbpv, extract, eval-recurrence, check-bound, diff-cost,
suite, report.  Exit codes: 0 success (bounds hold, costs agree), 1 a bound
violation or cost mismatch (or an evaluation that ran out of fuel under
`run`), 2 parse or type errors in the input, 3 internal assertion failures.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import cbpv_lang, pcf_machine, pcfc_lang, report, workbench
from . import pcf_lang as pcf
from .embed import embed
from .extract import extract
from .pcf_lang import Strategy, TypeCheckError
from .sexpr import ParseError
from .simplify import RuleSet
from .sized_model import Fin, SizedModel
from .workbench import INF, check_bound, diff_cost, run_deep, run_suite


def _read_input(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _load_program(args):
    text = _read_input(args.input)
    term, inferred = pcf.parse_pcf(text)
    strategy = Strategy(args.strategy) if args.strategy else inferred
    pcf.typecheck_closed(term, strategy)
    return term, strategy


def _emit(args, payload: dict, text: str):
    if args.output == "json":
        print(json.dumps(payload))
    else:
        print(text)


def _enc(x):
    return "inf" if x == INF else x


def _add_common(p):
    p.add_argument("input", help="program file ('-' for stdin)")
    p.add_argument("--strategy", choices=["cbv", "cbn"],
                   help="evaluation strategy (default: inferred from the program)")
    p.add_argument("--fuel", type=int, default=workbench.DEFAULT_FUEL,
                   help="big-step rule budget (default 100000)")
    p.add_argument("--denote-fuel", type=int, default=100,
                   help="fixed-point approximation depth for denotation")
    p.add_argument("--output", choices=["text", "json"], default="text")
    p.add_argument("--trace", action="store_true",
                   help="log one line per machine rule to stderr")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="recx",
        description="cost analysis: run programs, extract recurrences, "
                    "check bounding")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="evaluate a program, print value and cost")
    _add_common(p)

    p = sub.add_parser("emit-cbpv", help="print the cost-instrumented "
                                         "intermediate-language translation")
    _add_common(p)

    p = sub.add_parser("extract", help="print the extracted recurrence")
    _add_common(p)
    p.add_argument("--simplify", nargs="?", const="core", default=None,
                   choices=["core", "eta", "lists"],
                   help="rewrite the recurrence (levels: core, eta, lists)")
    p.add_argument("--emit", choices=["recurrence", "cbpv"], default="recurrence")

    p = sub.add_parser("eval-recurrence",
                       help="denote a recurrence and apply it to sample points")
    _add_common(p)
    p.add_argument("--samples", default="0,1,2,4,8",
                   help="comma-separated naturals to apply the recurrence to")
    p.add_argument("--pcfc", action="store_true",
                   help="input is recurrence-language text, not a source program")
    p.add_argument("--simplify", nargs="?", const="core", default=None,
                   choices=["core", "eta", "lists"])

    p = sub.add_parser("check-bound", help="compare observed cost/value "
                                           "against the denoted recurrence")
    _add_common(p)
    p.add_argument("--samples", default="0,1,2,3,5,8,13")

    p = sub.add_parser("diff-cost", help="differential cost test between the "
                                         "source and intermediate machines")
    _add_common(p)

    p = sub.add_parser("suite", help="corpus plus generated programs: "
                                     "cost preservation and bounding")
    p.add_argument("--count", type=int, default=100,
                   help="generated programs per strategy")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fuel", type=int, default=workbench.DEFAULT_FUEL)
    p.add_argument("--denote-fuel", type=int, default=100)
    p.add_argument("--output", choices=["text", "json"], default="json")

    p = sub.add_parser("report", help="run the suite and write JSONL/CSV "
                                      "reports with figures")
    p.add_argument("--outdir", default="reports")
    p.add_argument("--count", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fuel", type=int, default=workbench.DEFAULT_FUEL)
    p.add_argument("--denote-fuel", type=int, default=100)

    return ap


def _parse_samples(text: str):
    try:
        return tuple(int(x) for x in text.split(",") if x.strip() != "")
    except ValueError:
        raise ParseError(f"bad sample list {text!r}")


def cmd_run(args) -> int:
    term, strategy = _load_program(args)
    trace = [] if args.trace else None
    outcome = pcf_machine.eval_pcf(term, strategy, args.fuel, trace)
    if trace:
        for line in trace:
            print(line, file=sys.stderr)
    if isinstance(outcome, pcf_machine.Converged):
        _emit(args, {"value": pcf.print_term(outcome.value),
                     "cost": outcome.cost, "rules": outcome.rules_used},
              f"value: {pcf.print_term(outcome.value)}\ncost: {outcome.cost}")
        return 0
    _emit(args, {"outcome": "out-of-fuel", "fuel": args.fuel},
          f"out of fuel after {args.fuel} rules")
    return 1


def cmd_emit_cbpv(args) -> int:
    term, strategy = _load_program(args)
    emb = embed(term, strategy)
    _emit(args, {"cbpv": cbpv_lang.print_comp(emb.term),
                 "type": str(emb.target_type)},
          cbpv_lang.print_comp(emb.term))
    return 0


def cmd_extract(args) -> int:
    term, strategy = _load_program(args)
    if args.emit == "cbpv":
        return cmd_emit_cbpv(args)
    rules = RuleSet.from_level(args.simplify) if args.simplify else None
    result = extract(term, strategy, simplify=args.simplify is not None,
                     rules=rules)
    _emit(args, {"recurrence": pcfc_lang.print_pcfc(result.term),
                 "type": str(result.target_type)},
          pcfc_lang.print_pcfc(result.term))
    return 0


def cmd_eval_recurrence(args) -> int:
    samples = _parse_samples(args.samples)
    if args.pcfc or args.input.endswith(".pcfc"):
        rec = pcfc_lang.parse_pcfc(_read_input(args.input))
        ty = pcfc_lang.typecheck_closed(rec)
    else:
        term, strategy = _load_program(args)
        rec = extract(term, strategy,
                      simplify=args.simplify is not None,
                      rules=RuleSet.from_level(args.simplify)
                      if args.simplify else None).term
        ty = pcfc_lang.typecheck_closed(rec)
    model = SizedModel(args.denote_fuel)
    denoted = model.denote(rec)
    rows = [(n, _apply_recurrence(model, denoted, ty, n)) for n in samples]
    if args.output == "json":
        for n, v in rows:
            print(json.dumps({"n": n, "value": repr(v)}))
    else:
        for n, v in rows:
            print(f"{n} -> {v!r}")
    return 0


def _sample_argument(dom, n):
    """A sized value of the recurrence's domain type standing for the
    natural n: plain naturals stay naturals, complexity pairs get zero cost,
    and pairs in general are filled pointwise."""
    from .sized_model import BOTTOM, PairV
    if isinstance(dom, pcf.Cost) or isinstance(dom, pcf.Nat):
        return Fin(n)
    if isinstance(dom, pcf.Prod):
        left = (Fin(0) if isinstance(dom.left, pcf.Cost)
                else _sample_argument(dom.left, n))
        return PairV(left, _sample_argument(dom.right, n))
    return BOTTOM  # function-typed domains have no canonical sample


def _apply_recurrence(model, denoted, ty, n):
    from .sized_model import Closure, JoinFun, PairV
    if isinstance(denoted, (Closure, JoinFun)) and isinstance(ty, pcf.Arrow):
        return model.apply(denoted, _sample_argument(ty.dom, n))
    if (isinstance(denoted, PairV) and isinstance(ty, pcf.Prod)
            and isinstance(ty.right, pcf.Arrow)
            and isinstance(denoted.snd, (Closure, JoinFun))):
        # complexity of a function program: (cost of reaching the function,
        # potential function)
        return model.apply(denoted.snd, _sample_argument(ty.right.dom, n))
    return denoted


def cmd_check_bound(args) -> int:
    term, strategy = _load_program(args)
    rep = check_bound(term, strategy, args.fuel, _parse_samples(args.samples),
                      args.denote_fuel, program_id=args.input)
    _emit(args, rep.to_json_dict(),
          "\n".join(f"{k}: {v}" for k, v in rep.to_json_dict().items()))
    return 1 if rep.verdict == workbench.VIOLATION else 0


def cmd_diff_cost(args) -> int:
    term, strategy = _load_program(args)
    if args.trace:
        from . import cbpv_machine, pcf_machine
        from .embed import embed as embed_fn
        for machine, run in (
                ("pcf", lambda tr: pcf_machine.eval_pcf(term, strategy,
                                                        args.fuel, tr)),
                ("cbpv", lambda tr: cbpv_machine.eval_cbpv(
                    embed_fn(term, strategy).term, args.fuel, tr))):
            trace = []
            run(trace)
            for line in trace:
                print(line, file=sys.stderr)
    d = diff_cost(term, strategy, args.fuel)
    _emit(args, {"pcf_cost": _enc(d.pcf_cost), "cbpv_cost": _enc(d.cbpv_cost),
                 "equal": d.equal, "both_converged": d.both_converged},
          f"pcf: {_enc(d.pcf_cost)}  cbpv: {_enc(d.cbpv_cost)}  equal: {d.equal}")
    return 0 if d.equal else 1


def cmd_suite(args) -> int:
    result = run_suite(count=args.count, seed=args.seed, fuel=args.fuel,
                       denote_fuel=args.denote_fuel)
    for rep in result.reports:
        print(json.dumps(rep.to_json_dict()))
    bad_diffs = result.diff_failures
    summary = {
        "programs": len(result.reports),
        "violations": len(result.violations),
        "diff_failures": len(bad_diffs),
        "converging": len(result.converging()),
        "trivially_inf_fraction": round(result.trivially_inf_fraction(), 4),
    }
    print(json.dumps({"summary": summary}), file=sys.stderr)
    return 1 if (result.violations or bad_diffs) else 0


def cmd_report(args) -> int:
    result = run_suite(count=args.count, seed=args.seed, fuel=args.fuel,
                       denote_fuel=args.denote_fuel)
    paths = report.write_report(result, args.outdir, fuel=args.fuel)
    for kind, path in paths.items():
        print(f"{kind}: {path}")
    bad = result.violations or result.diff_failures
    return 1 if bad else 0


COMMANDS = {
    "run": cmd_run,
    "emit-cbpv": cmd_emit_cbpv,
    "extract": cmd_extract,
    "eval-recurrence": cmd_eval_recurrence,
    "check-bound": cmd_check_bound,
    "diff-cost": cmd_diff_cost,
    "suite": cmd_suite,
    "report": cmd_report,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ParseError, TypeCheckError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except AssertionError as e:
        print(f"internal assertion failed: {e}", file=sys.stderr)
        return 3


def entry():
    sys.exit(run_deep(main))


if __name__ == "__main__":
    entry()
