"""Batch command-line front end.

Subcommands: count, reduce, schemes, series, lp, double-scaling, check.
Exact quantities print as integers or fractions "p/q"; decimals appear only
in the asymptotics subcommands.  Output is deterministic for a given
configuration.  Exit codes: 0 ok, 1 invariant violation, 2 usage error,
3 search budget refused.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import asymptotics, enumeration, interchange, series
from .chains import scheme_from_core, scheme_signature, structural_budget
from .errors import MelonforgeError, SearchTooLarge
from .graphs import degree, degree_via_jackets, face_profile
from .reduction import core as core_decomposition

EXIT_VIOLATION = 1
EXIT_BUDGET = 3


def _emit(args, kind: str, text: str, **payload):
    if args.format == "json":
        print(json.dumps({"record": kind, **payload}, sort_keys=True))
    else:
        print(text)


def _frac(x) -> str:
    f = Fraction(x)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def cmd_count(args) -> int:
    table = enumeration.count_rooted(args.dim, args.k, workers=args.workers,
                                     budget=args.budget)
    if args.by_degree:
        for delta, n in sorted(table.counts.items()):
            _emit(args, "count", f"{delta}: {n}", degree=delta, count=n)
    _emit(args, "total", f"total: {table.total}", total=table.total)
    return 0


def cmd_reduce(args) -> int:
    with open(args.input) as fh:
        g = interchange.graph_from_record(json.load(fh))
    if g.root is None:
        print("error: reduction needs a rooted graph", file=sys.stderr)
        return 2
    decomp = core_decomposition(g)
    if args.to == "core":
        out = interchange.decomposition_to_record(decomp)
    else:
        if decomp.core is None:
            print("error: melonic graph has an empty core and no scheme",
                  file=sys.stderr)
            return EXIT_VIOLATION
        out = interchange.scheme_to_record(scheme_from_core(decomp.core))
    text = json.dumps(out, sort_keys=True, indent=2)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def cmd_schemes(args) -> int:
    cat = enumeration.scheme_catalog(args.dim, args.degree, args.max_k,
                                     workers=args.workers, budget=args.budget)
    lines = [interchange.dump_line(interchange.scheme_to_record(e.scheme))
             for e in cat.entries]
    if args.out:
        with open(args.out, "w") as fh:
            fh.write("\n".join(lines) + ("\n" if lines else ""))
    else:
        for line in lines:
            print(line)
    _emit(args, "catalog",
          f"schemes: {len(cat.entries)} (k_max={cat.k_max}, "
          f"complete={'yes' if cat.complete else 'no'})",
          schemes=len(cat.entries), k_max=cat.k_max, complete=cat.complete)
    return 0


def cmd_series(args) -> int:
    if args.closed_form:
        if args.degree != args.dim - 2:
            print("error: the closed form covers degree D-2 only", file=sys.stderr)
            return 2
        f = series.closed_form_first_degree(args.dim, args.order)
    else:
        if args.catalog:
            sigs = []
            with open(args.catalog) as fh:
                for line in fh:
                    if line.strip():
                        s = interchange.scheme_from_record(interchange.load_line(line))
                        sigs.append(scheme_signature(s))
        else:
            cat = enumeration.scheme_catalog(args.dim, args.degree, args.max_k,
                                             workers=args.workers,
                                             budget=args.budget)
            sigs = cat.signatures()
        f = series.assemble_degree_series(args.dim, sigs, args.order)
    for i, c in enumerate(f.coeffs):
        if args.decimal:
            _emit(args, "coefficient", f"z^{i}: {_frac(c)} ({float(c):.6g})",
                  power=i, value=_frac(c), decimal=float(c))
        else:
            _emit(args, "coefficient", f"z^{i}: {_frac(c)}", power=i, value=_frac(c))
    return 0


def cmd_lp(args) -> int:
    lp = asymptotics.beta(args.dim, args.degree)
    if not lp.feasible:
        _emit(args, "lp", "infeasible", feasible=False)
        return 0
    pairs = " ".join(f"({x},{y})" for x, y in lp.pairs)
    _emit(args, "lp", f"beta: {lp.beta} via {pairs}",
          feasible=True, beta=lp.beta, pairs=[list(p) for p in lp.pairs])
    return 0


def cmd_double_scaling(args) -> int:
    z = Fraction(args.z)
    val = asymptotics.double_scaling(args.dim, args.N, z)
    z1 = asymptotics.shifted_critical(args.dim, args.N)
    _emit(args, "double-scaling", f"value: {val:.12g}", value=val)
    _emit(args, "shifted-critical", f"z1: {_frac(z1)} ({float(z1):.12g})",
          z1=_frac(z1))
    margin = float(z1) - float(z)
    _emit(args, "margin", f"distance to domain boundary: {margin:.12g}",
          margin=margin)
    return 0


def cmd_check(args) -> int:
    from .graphs import relabel
    import random
    failures = []

    def check(name, ok):
        _emit(args, "check", f"{name}: {'ok' if ok else 'FAIL'}",
              name=name, ok=bool(ok))
        if not ok:
            failures.append(name)

    for k in range(1, args.max_k + 1):
        for g in enumeration.enumerate_rooted(args.dim, k, workers=args.workers,
                                              budget=args.budget):
            fp = face_profile(g)
            d = degree(g)
            ok1 = (args.dim * (args.dim + 1) * k
                   == 2 * sum(p * n for p, n in fp.by_half_length.items()))
            ok2 = args.dim * (args.dim - 1) * k == 2 * fp.total + 2 * d - 2 * args.dim
            rhs = args.dim * (args.dim + 1) + sum(
                ((args.dim - 1) * p - args.dim - 1) * n
                for p, n in fp.by_half_length.items() if p >= 2)
            ok3 = (args.dim + 1) * d + 2 * fp.by_half_length.get(1, 0) == rhs
            ok4 = d == degree_via_jackets(g)
            if not (ok1 and ok2 and ok3 and ok4):
                check(f"face identities k={k}", False)
                break
        else:
            check(f"face identities and jackets k={k}", True)

    # core order-independence on random melon insertions
    rng = random.Random(20240601)
    from .reduction import insert_melon, reduce_to_core_graph
    from .graphs import canonical_encoding, validate
    seed = validate(args.dim, 2,
                    [[0, 1]] * 2 + [[1, 0]] * (args.dim - 1), root=(0, 0))
    ok = True
    for _ in range(args.trials):
        g = seed
        for _ in range(rng.randrange(1, 9)):
            g = insert_melon(g, rng.choice(list(g.edges())), rng.random() < 0.5)
        encs = {canonical_encoding(reduce_to_core_graph(g, random.Random(t)))
                for t in range(4)}
        if len(encs) != 1:
            ok = False
            break
    check("core order-independence", ok)

    # dipole calculus audit
    from .chains import find_dipoles
    from .removal import audit_dipole_removal
    ok = True
    rows = 0
    for k in range(2, args.max_k + 1):
        for g in enumeration.enumerate_rooted(args.dim, k, workers=args.workers,
                                              budget=args.budget):
            for q in (1, 2):
                if q > args.dim - 2:
                    continue
                for dip in find_dipoles(g, q):
                    audit = audit_dipole_removal(g, dip.black, dip.white)
                    rows += 1
                    if args.dipole_calculus:
                        r = audit["report"]
                        _emit(args, "removal",
                              f"k={k} q={r.q} case={r.case} C={r.components} "
                              f"r={sum(r.type_b_per_component)} "
                              f"predicted={r.predicted_delta} "
                              f"actual={audit['actual_delta']}",
                              k=k, q=r.q, case=r.case, components=r.components,
                              predicted=r.predicted_delta,
                              actual=audit["actual_delta"])
                    if not (audit["delta_ok"] and audit["faces_ok"]):
                        ok = False
    check(f"dipole calculus audit ({rows} removals)", ok)

    # catalog bound check
    delta = 1 if args.dim == 3 else args.dim - 2
    cat = enumeration.scheme_catalog(args.dim, delta, args.max_k,
                                     workers=args.workers, budget=args.budget)
    check(f"5*delta structural bound over {len(cat.entries)} schemes",
          all(structural_budget(e.scheme) <= 5 * delta for e in cat.entries))

    return EXIT_VIOLATION if failures else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="melonforge",
        description="classification and exact enumeration of rooted colored "
                    "graphs of fixed degree")
    ap.add_argument("--format", choices=("text", "json"), default="text")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--budget", type=int, default=None,
                    help="state-count refusal threshold "
                         "(default MELONFORGE_BUDGET or 10^9)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", help="degree census of rooted graphs")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--by-degree", action="store_true")
    p.set_defaults(fn=cmd_count)

    p = sub.add_parser("reduce", help="core decomposition or scheme of a graph")
    p.add_argument("--to", choices=("core", "scheme"), required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", dest="output")
    p.set_defaults(fn=cmd_reduce)

    p = sub.add_parser("schemes", help="catalog the schemes of one degree")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--max-k", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_schemes)

    p = sub.add_parser("series", help="fixed-degree counting series")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--catalog", help="scheme file (one JSON record per line)")
    p.add_argument("--max-k", type=int, default=None,
                   help="catalog horizon when no catalog file is given")
    p.add_argument("--closed-form", action="store_true")
    p.add_argument("--decimal", action="store_true")
    p.set_defaults(fn=cmd_series)

    p = sub.add_parser("lp", help="maximal broken-chain count of a degree")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--degree", type=int, required=True)
    p.set_defaults(fn=cmd_lp)

    p = sub.add_parser("double-scaling", help="resummed series at finite N")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--z", required=True, help="evaluation point, fraction p/q")
    p.set_defaults(fn=cmd_double_scaling)

    p = sub.add_parser("check", help="run the invariant suite over a range")
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--max-k", type=int, default=3)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--dipole-calculus", action="store_true",
                   help="emit the per-removal audit table")
    p.set_defaults(fn=cmd_check)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "series" and not args.closed_form and not args.catalog:
        if args.max_k is None:
            print("error: need --catalog, --max-k, or --closed-form",
                  file=sys.stderr)
            return 2
    try:
        return args.fn(args)
    except SearchTooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except MelonforgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
