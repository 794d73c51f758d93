"""Command line front end.

Exit codes: 0 success, 1 check failure, 2 usage error, 3 budget exceeded.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .cnf import CardinalitySpec, encode_cpp, prime_implicates_cardinality, to_dimacs
from .errors import BudgetExceeded, SubstLabError
from .exact import integer_inverse
from .oracle import DESC, LEX, build_table, tighten_L1, verify_bijection
from .subst import derive_boxes, forward_eliminate, generate_descending, generate_note1, render_linear
from .workbench import InstanceFile, run_growth, run_property_suite, selftest_worked_example, table_text

OK, CHECK_FAILED, USAGE, BUDGET = 0, 1, 2, 3


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text if text.endswith("\n") else text + "\n")
    else:
        print(text.rstrip("\n"))


def cmd_selftest(args):
    res = selftest_worked_example()
    print(res.render())
    return OK if res.passed else CHECK_FAILED


def cmd_gen(args):
    make = generate_descending if args.descending else generate_note1
    s = make(args.n, args.seed, args.bound)
    meta = {"generator": make.__name__, "n": args.n, "seed": args.seed, "bound": args.bound}
    doc = InstanceFile(None, s, meta)
    doc.instance = doc.require_instance()
    _emit(doc.render(), args.out)
    return OK


def cmd_elim(args):
    s = InstanceFile.load(args.file).require_system()
    for st in forward_eliminate(s).steps:
        print(st.render())
    return OK


def cmd_invert(args):
    s = InstanceFile.load(args.file).require_system()
    inv = integer_inverse(s.B)
    for i, row in enumerate(inv.rows):
        print(f"x{i + 1} = " + render_linear([(v, f"y{j + 1}") for j, v in enumerate(row)]))
    return OK


def cmd_boxes(args):
    s = InstanceFile.load(args.file).require_system()
    for i, (lo, hi) in enumerate(derive_boxes(s), start=1):
        print(f"y{i} in [{lo}, {hi}]")
    return OK


def cmd_table(args):
    s = InstanceFile.load(args.file).require_system()
    print(table_text(s, args.order))
    return OK


def cmd_bijection(args):
    doc = InstanceFile.load(args.file)
    rep = verify_bijection(doc.require_instance(), doc.require_system())
    print(json.dumps({
        "x_count": rep.x_count, "y_count": rep.y_count, "matched": rep.matched,
        "extra_y": [list(y) for y in rep.extra_y],
        "out_of_box_x": [list(x) for x in rep.out_of_box_x],
        "holds": rep.holds,
    }, indent=2))
    return OK if rep.holds else CHECK_FAILED


def cmd_tighten(args):
    doc = InstanceFile.load(args.file)
    s = doc.require_system()
    tightened = tighten_L1(doc.require_instance(), build_table(s, DESC), args.k)
    _emit(InstanceFile(tightened, s, dict(doc.meta, tightened_k=args.k)).render(), args.out)
    return OK


def cmd_encode(args):
    doc = InstanceFile.load(args.file)
    if doc.system is not None:
        spec = CardinalitySpec(doc.system.n, doc.system.c)
    else:
        inst = doc.require_instance()
        spec = CardinalitySpec(inst.n, inst.c, inst.a)
    _emit(to_dimacs(encode_cpp(spec)), args.out)
    return OK


def cmd_primes(args):
    print(to_dimacs(prime_implicates_cardinality(args.n, args.c)).rstrip("\n"))
    return OK


def cmd_growth(args):
    _, text = run_growth(args.n_max, args.out)
    if not args.out:
        print(text.rstrip("\n"))
    return OK


def cmd_suite(args):
    rep = run_property_suite(args.count, args.seed)
    _emit(rep.to_json() if args.json else rep.to_text(), args.out)
    return OK if rep.passed else CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="substlab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("selftest", help="reproduce the 3-variable worked example").set_defaults(func=cmd_selftest)

    g = sub.add_parser("gen", help="generate a substitution system")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--bound", type=int, default=10)
    g.add_argument("--descending", action="store_true", help="superincreasing first row")
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    for name, func, text in (
        ("elim", cmd_elim, "forward elimination with unit pivots"),
        ("invert", cmd_invert, "integer inverse substitutions"),
        ("boxes", cmd_boxes, "R1 boxes of a system"),
        ("bijection", cmd_bijection, "brute-force bijection check"),
    ):
        sp = sub.add_parser(name, help=text)
        sp.add_argument("file")
        sp.set_defaults(func=func)

    t = sub.add_parser("table", help="interpretation table")
    t.add_argument("file")
    t.add_argument("--order", choices=(LEX, DESC), default=LEX)
    t.set_defaults(func=cmd_table)

    k = sub.add_parser("tighten", help="raise L1 to exclude row k of the descending table")
    k.add_argument("file")
    k.add_argument("--k", type=int, required=True)
    k.add_argument("--out")
    k.set_defaults(func=cmd_tighten)

    e = sub.add_parser("encode", help="CNF encoding as DIMACS")
    e.add_argument("file")
    e.add_argument("--out")
    e.set_defaults(func=cmd_encode)

    pr = sub.add_parser("primes", help="prime implicates of exactly-c-of-n")
    pr.add_argument("--n", type=int, required=True)
    pr.add_argument("--c", type=int, required=True)
    pr.set_defaults(func=cmd_primes)

    gr = sub.add_parser("growth", help="implicate-count growth table as CSV")
    gr.add_argument("--n-max", type=int, required=True)
    gr.add_argument("--out")
    gr.set_defaults(func=cmd_growth)

    su = sub.add_parser("suite", help="property suite over generated systems")
    su.add_argument("--count", type=int, default=100)
    su.add_argument("--seed", type=int, default=42)
    su.add_argument("--json", action="store_true")
    su.add_argument("--out")
    su.set_defaults(func=cmd_suite)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceeded as e:
        print(f"substlab: {e}", file=sys.stderr)
        return BUDGET
    except (SubstLabError, ValueError, OSError) as e:
        print(f"substlab: {e}", file=sys.stderr)
        return CHECK_FAILED if isinstance(e, SubstLabError) else USAGE
