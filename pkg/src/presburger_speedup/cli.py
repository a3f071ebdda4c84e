"""Command line front end.

Exit codes: 0 success, 1 when ``decide`` answers FALSE, 2 on parse or
usage errors, 3 when a size or step budget runs out.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from .bench import bench_growth, fit_linear
from .grammar import ParseError, parse, render
from .grounding import ground
from .logic import BudgetExceeded, size
from .mp_model import Mp, check_residue_axiom, parse_elem
from .oracle import Budget, grid_report
from .pra_families import (
    gen_div,
    gen_hyp,
    gen_induction_instance,
    gen_mul,
    gen_pra_alt_axiom,
    pra_minus_axioms,
)
from .qe import DEFAULT_NODE_BUDGET, decide_explained, eliminate_all
from .rcf_families import gen_hyp_rcf, gen_lub_instance, gen_odd_degree_axiom, gen_pow, gen_root, gen_sqrt_axiom

EXIT_OK, EXIT_FALSE, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3

FAMILIES = (
    "mul",
    "hyp",
    "div",
    "pra-alt-axiom",
    "pra-minus-axioms",
    "induction",
    "pow",
    "hyp-rcf",
    "root",
    "sqrt-axiom",
    "odd-degree-axiom",
    "lub",
)
RCF_FAMILIES = {"pow", "hyp-rcf", "root", "sqrt-axiom", "odd-degree-axiom", "lub"}


class UsageError(Exception):
    pass


def _need(value, flag: str, family: str):
    if value is None:
        raise UsageError(f"{family} needs {flag}")
    return value


def _generate(args: argparse.Namespace):
    fam, compressed = args.family, not args.naive
    match fam:
        case "mul":
            return [gen_mul(_need(args.n, "--n", fam), compressed)]
        case "hyp":
            return [gen_hyp(_need(args.n, "--n", fam), compressed)]
        case "div":
            return [gen_div(_need(args.n, "--n", fam), compressed)]
        case "pra-alt-axiom":
            return [gen_pra_alt_axiom(_need(args.p, "--p", fam))]
        case "pra-minus-axioms":
            return pra_minus_axioms()
        case "induction":
            return [gen_induction_instance(parse(_need(args.phi, "--phi", fam)), args.var)]
        case "pow":
            return [gen_pow(_need(args.n, "--n", fam), compressed)]
        case "hyp-rcf":
            return [gen_hyp_rcf(_need(args.n, "--n", fam), compressed)]
        case "root":
            return [gen_root(_need(args.n, "--n", fam), compressed)]
        case "sqrt-axiom":
            return [gen_sqrt_axiom()]
        case "odd-degree-axiom":
            return [gen_odd_degree_axiom(_need(args.m, "--m", fam))]
        case "lub":
            return [gen_lub_instance(parse(_need(args.phi, "--phi", fam), rcf=True), args.var)]
    raise UsageError(f"unknown family {fam}")


def _cmd_parse(args) -> int:
    f = parse(args.formula, rcf=args.rcf)
    print(repr(f))
    return EXIT_OK


def _cmd_print(args) -> int:
    print(render(parse(args.formula, rcf=args.rcf)))
    return EXIT_OK


def _cmd_size(args) -> int:
    s = size(parse(args.formula, rcf=args.rcf), rcf=args.rcf)
    print(f"node_count={s.node_count} paper_symbols={s.paper_symbols} rendered_len={s.rendered_len}")
    return EXIT_OK


def _cmd_decide(args) -> int:
    f = parse(args.formula)
    if args.ground:
        f = ground(f)
    d = decide_explained(f, args.budget)
    print("TRUE" if d.value else "FALSE")
    if args.explain:
        for lit, rules in d.rules:
            print(f"  {render(lit)}: rules {rules}")
    return EXIT_OK if d.value else EXIT_FALSE


def _cmd_qe(args) -> int:
    f = parse(args.formula)
    out, trace = eliminate_all(f, args.budget)
    print(render(out))
    if args.trace:
        Path(args.trace).write_text(trace.to_json() + "\n", encoding="utf-8")
    return EXIT_OK


def _cmd_gen(args) -> int:
    rcf = args.family in RCF_FAMILIES
    for f in _generate(args):
        print(render(f))
        if args.size:
            s = size(f, rcf=rcf)
            print(f"# node_count={s.node_count} paper_symbols={s.paper_symbols} rendered_len={s.rendered_len}")
    return EXIT_OK


def _cmd_mp(args) -> int:
    model = Mp(args.p)
    if args.mp_command == "residue":
        x = parse_elem(args.elem, model)
        r = model.divisible_with_remainder(x, args.m)
        print(f"{x} mod {args.m}: " + ("none" if r is None else f"remainder {r}"))
        return EXIT_OK
    res = check_residue_axiom(args.p, args.m, args.samples, args.seed)
    status = "holds" if res.holds else "fails"
    print(f"M_{args.p}: residue axiom for m={args.m} {status} on {res.samples} samples ({res.complete} with a residue)")
    for x in res.missing[:5]:
        print(f"  no residue: {x}")
    return EXIT_OK


def _cmd_oracle(args) -> int:
    f, g = parse(args.f), parse(args.g)
    names = [v.strip() for v in args.vars.split(",") if v.strip()] if args.vars else []
    b = Budget(witness_bound=args.witness_bound)
    rep = grid_report(f, g, names, args.bound, b)
    if rep.ok:
        print(f"EQUIVALENT on {rep.points} points")
    else:
        print(f"NOT CONFIRMED: {len(rep.disagreements)} disagreements, {len(rep.unknowns)} unknown on {rep.points} points")
        for env in (rep.disagreements + rep.unknowns)[:5]:
            print(f"  at {env}")
    return EXIT_OK


def _cmd_bench(args) -> int:
    rep = bench_growth(args.max_n, args.seed)
    text = rep.to_csv()
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    fits = {fam: fit_linear(rep.family(fam)) for fam in ("Mul", "Hyp", "Div", "Pow", "Root")}
    print(json.dumps({"metadata": rep.metadata, "linear_fits": fits}), file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="presburger-speedup", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    for name, fn, helptext in (
        ("parse", _cmd_parse, "parse a formula and show its syntax tree"),
        ("print", _cmd_print, "parse a formula and print it canonically"),
        ("size", _cmd_size, "node count, symbol count and rendered length"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("formula")
        p.add_argument("--rcf", action="store_true", help="use the RCF signature (* allowed, no =_m)")
        p.set_defaults(fn=fn)

    p = sub.add_parser("decide", help="decide a closed Presburger sentence")
    p.add_argument("formula")
    p.add_argument("--budget", type=int, default=DEFAULT_NODE_BUDGET)
    p.add_argument("--ground", action="store_true", help="expand finitely bounded quantifiers first")
    p.add_argument("--explain", action="store_true", help="list the literal rules used")
    p.set_defaults(fn=_cmd_decide)

    p = sub.add_parser("qe", help="eliminate all quantifiers")
    p.add_argument("formula")
    p.add_argument("--trace", metavar="OUT.json")
    p.add_argument("--budget", type=int, default=DEFAULT_NODE_BUDGET)
    p.set_defaults(fn=_cmd_qe)

    p = sub.add_parser("gen", help="generate a formula family member")
    p.add_argument("family", choices=FAMILIES)
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--phi")
    p.add_argument("--var", default="x")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--compressed", action="store_true", help="Solovay-compressed form (default)")
    g.add_argument("--naive", action="store_true", help="naive recursive expansion")
    p.add_argument("--size", action="store_true", help="also print sizes")
    p.set_defaults(fn=_cmd_gen)

    p = sub.add_parser("mp", help="the nonstandard models M_p")
    p.add_argument("--p", type=int, required=True)
    msub = p.add_subparsers(dest="mp_command", required=True)
    r = msub.add_parser("residue", help="remainder of an element by m")
    r.add_argument("--m", type=int, required=True)
    r.add_argument("--elem", required=True, help="n, or q/d X + a0 with d like 3^2*7")
    c = msub.add_parser("check-axiom", help="sampled check of the residue axiom for m")
    c.add_argument("--m", type=int, required=True)
    c.add_argument("--samples", type=int, default=100)
    c.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=_cmd_mp)

    p = sub.add_parser("oracle", help="bounded brute-force checks")
    osub = p.add_subparsers(dest="oracle_command", required=True)
    e = osub.add_parser("equiv", help="compare two formulas on a grid")
    e.add_argument("f")
    e.add_argument("g")
    e.add_argument("--vars", default="")
    e.add_argument("--bound", type=int, default=20)
    e.add_argument("--witness-bound", type=int, default=60)
    p.set_defaults(fn=_cmd_oracle)

    p = sub.add_parser("bench", help="benchmarks")
    bsub = p.add_subparsers(dest="bench_command", required=True)
    gr = bsub.add_parser("growth", help="size growth table as CSV")
    gr.add_argument("--max-n", type=int, default=6)
    gr.add_argument("--seed", type=int, default=0)
    gr.add_argument("--out")
    p.set_defaults(fn=_cmd_bench)
    return ap


def run_cli(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE
    try:
        return args.fn(args)
    except (ParseError, UsageError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as e:
        print(f"budget exhausted: {e}", file=sys.stderr)
        return EXIT_BUDGET


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
