"""Command-line interface.

Exit codes: 0 success or feasible, 1 semantic failure, 2 parse or usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import io
from .certificates import check_dual, check_primal
from .core import validate
from .evaluator import best_tree, fmt, g_table, tree_to_dot
from .io import ConversionError, ParseError
from .rates import approx_rate, exact_rate


class UsageError(Exception):
    pass


def _load(path: str):
    system = io.load_system(path)
    problems = validate(system)
    if problems:
        for p in problems:
            print(p, file=sys.stderr)
        raise SystemExit(1)
    return system


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def cmd_validate(args) -> int:
    system = io.load_system(args.path)
    problems = validate(system)
    for p in problems:
        print(p)
    if not problems:
        print(f"ok: {len(system)} functions")
    return 1 if problems else 0


def cmd_table(args) -> int:
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    system = _load(args.path)
    for n, g in enumerate(g_table(system, args.n), 1):
        print(f"{n}\t{fmt(g)}")
    if args.dot:
        _write(args.dot, tree_to_dot(system, best_tree(system, args.n)))
    if args.plot:
        from .report import plot_growth
        plot_growth(system, args.n, args.plot, title=args.path)
    return 0


def cmd_rate(args) -> int:
    system = _load(args.path)
    if args.eps is not None:
        try:
            eps = io.parse_rational(args.eps)
        except ValueError as exc:
            raise UsageError(f"--eps: {exc}") from None
        if eps <= 0:
            raise UsageError("--eps must be positive")
        iv = approx_rate(system, eps)
        print(f"{fmt(iv.lo)}\t{fmt(iv.hi)}")
    else:
        print(fmt(exact_rate(system)))
    return 0


def cmd_witness(args) -> int:
    from .report import witness_bundle
    from .rates import witness_pseudo_loop

    system = _load(args.path)
    bundle = witness_bundle(system)
    if args.format == "json":
        print(json.dumps(bundle, indent=2))
    else:
        loop = witness_pseudo_loop(system)
        print(f"rate\t{bundle['rate']}")
        print(f"marked\t{loop.marked}")
        print(loop.to_text())
        print("primal\t" + json.dumps(bundle["primal"]))
        print("dual\t" + json.dumps(bundle["dual"]))
        print(f"objective_equal\t{bundle['checks']['objective_equal']}")
    if args.dot:
        _write(args.dot, witness_pseudo_loop(system).to_dot())
    return 0 if all(bundle["checks"].values()) else 1


def cmd_certify(args) -> int:
    system = _load(args.path)
    with open(args.cert, encoding="utf-8") as fh:
        doc = io.loads_certificate_doc(fh.read())
    parts = {doc["kind"]: doc} if "kind" in doc else {k: doc[k] for k in ("primal", "dual") if k in doc}
    ok = True
    theta = None
    if "primal" in parts:
        cert = io.primal_from_dict(system, parts["primal"])
        theta = cert.theta
        bad = check_primal(system, cert)
        for b in bad:
            print(f"primal violated\t{b}")
        if not bad:
            print(f"primal feasible\ttheta = {fmt(cert.theta)}")
        ok &= not bad
    if "dual" in parts:
        cert = io.dual_from_dict(system, parts["dual"])
        bad, objective = check_dual(system, cert)
        for b in bad:
            print(f"dual violated\t{b}")
        if not bad:
            print(f"dual feasible\tobjective = {fmt(objective)}")
        ok &= not bad
        claimed = parts["dual"].get("objective")
        if claimed is not None:
            try:
                claimed = io.parse_rational(claimed)
            except ValueError as exc:
                raise ParseError(f"objective: {exc}") from None
            if claimed != objective:
                print(f"objective mismatch\tclaimed {fmt(claimed)}, computed {fmt(objective)}")
                ok = False
        if theta is not None and not bad and objective != theta:
            print(f"objective mismatch\tdual {fmt(objective)} != theta {fmt(theta)}")
            ok = False
    if "loop" in doc:
        loop = io.loop_from_dict(system, doc["loop"])
        print(f"loop valid\trate = {fmt(loop.rate)}")
        if theta is not None and loop.rate != theta:
            print(f"objective mismatch\tloop rate {fmt(loop.rate)} != theta {fmt(theta)}")
            ok = False
    return 0 if ok else 1


def cmd_convert(args) -> int:
    with open(args.inpath, encoding="utf-8") as fh:
        text = fh.read()
    if args.source == "chipfire":
        system = io.chipfire_to_system(io.loads_chipfire(text))
    else:
        system = io.loads_grammar(text)
    problems = validate(system)
    if problems:
        for p in problems:
            print(p, file=sys.stderr)
        return 1
    sys.stdout.write(io.dumps_system(system))
    return 0


def cmd_report(args) -> int:
    from .report import write_report

    system = _load(args.path)
    for p in write_report(system, args.n, args.out, title=args.path):
        print(p)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="repgrowth", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", help="check a system file")
    s.add_argument("path")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("table", help="print n and g(n)")
    s.add_argument("path")
    s.add_argument("--n", type=int, default=18)
    s.add_argument("--dot", help="write the optimal tree for n as Graphviz")
    s.add_argument("--plot", help="write a convergence figure (png/pdf/svg)")
    s.set_defaults(func=cmd_table)

    s = sub.add_parser("rate", help="growth rate, exact or bracketed")
    s.add_argument("path")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--exact", action="store_true", help="exact rational (default)")
    g.add_argument("--eps", help="bracket width, e.g. 1/100")
    s.set_defaults(func=cmd_rate)

    s = sub.add_parser("witness", help="optimal pseudo-loop with primal and dual certificates")
    s.add_argument("path")
    s.add_argument("--format", choices=("json", "text"), default="json")
    s.add_argument("--dot", help="write the loop as Graphviz, main path highlighted")
    s.set_defaults(func=cmd_witness)

    s = sub.add_parser("certify", help="check a primal, dual or witness certificate")
    s.add_argument("path")
    s.add_argument("--cert", required=True)
    s.set_defaults(func=cmd_certify)

    s = sub.add_parser("convert", help="chip-firing graph or CNF grammar to a system file")
    s.add_argument("--from", dest="source", choices=("chipfire", "grammar"), required=True)
    s.add_argument("inpath")
    s.set_defaults(func=cmd_convert)

    s = sub.add_parser("report", help="write table, figure and witness files")
    s.add_argument("path")
    s.add_argument("--n", type=int, default=200)
    s.add_argument("--out", default="report")
    s.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except ConversionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())
