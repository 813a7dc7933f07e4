"""Command line entry point.

Exit codes: 0 success, 1 a verified negative answer, 2 bad input,
3 a size cap or search budget was hit.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import json
import random
import sys
from fractions import Fraction

from .canon import CapExceeded
from .erdosposa import (
    DEFAULT_ORACLE_CAP,
    ConstantOverflowError,
    MinorOracle,
    ep_duality,
    fpt_pw_deletion,
    verify_certificate,
)
from .generators import complete_graph, parse_family_member, random_graph
from .graph import RootedGraph
from .io import (
    GraphFileError,
    certificate_document,
    check_document,
    dump_document,
    load_document,
    parse_family,
    read_graph_file,
)
from .minors import SearchBudgetExceeded, deletion_folio, find_model, find_rooted_model, q_folio
from .pathwidth import exact_pathwidth, pathwidth_at_most

EXIT_OK, EXIT_NO, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3


class _InputError(Exception):
    pass


def _out(args, text: str) -> None:
    if getattr(args, "json", None):
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _bags(pd) -> str:
    return " | ".join(" ".join(map(str, sorted(b))) for b in pd.bags)


def _family(spec: str):
    try:
        return parse_family(spec)
    except ValueError as exc:
        raise _InputError(str(exc)) from None


def _cap(args) -> int:
    if args.cap is not None:
        print(f"warning: oracle cap overridden to {args.cap}", file=sys.stderr)
        return args.cap
    return DEFAULT_ORACLE_CAP


def cmd_pathwidth(args) -> int:
    g, _ = read_graph_file(args.file)
    cap = max(_cap(args), 24) if args.cap is None else args.cap
    if args.at_most is not None:
        ok, pd = pathwidth_at_most(g, args.at_most, cap)
        print("yes" if ok else "no")
        if ok:
            print("bags:", _bags(pd))
        return EXIT_OK if ok else EXIT_NO
    width, pd = exact_pathwidth(g, cap)
    print(f"pathwidth {width}")
    print("bags:", _bags(pd))
    return EXIT_OK


def cmd_minor(args) -> int:
    g, roots = read_graph_file(args.file)
    h = parse_family_member(args.pattern)
    if args.pattern_roots:
        h_roots = tuple(int(x) for x in args.pattern_roots.split(","))
        if len(h_roots) != len(roots):
            raise _InputError("pattern and host need the same number of roots")
        model = find_rooted_model(RootedGraph(h, h_roots), RootedGraph(g, roots), budget=args.budget)
    else:
        model = find_model(h, g, budget=args.budget)
    if model is None:
        print("no model")
        return EXIT_NO
    for x in sorted(model.branch_sets):
        print(f"{x}: {' '.join(map(str, sorted(model.branch_sets[x])))}")
    return EXIT_OK


def cmd_nu(args) -> int:
    g, _ = read_graph_file(args.file)
    fam = _family(args.family)
    oracle = MinorOracle(fam, g, _cap(args))
    packing = oracle.packing()
    doc = certificate_document("packing", g, args.family.split(","), packing=packing)
    print(f"nu {len(packing)}", file=sys.stderr if args.json is None else sys.stdout)
    _out(args, dump_document(doc))
    return EXIT_OK


def cmd_tau(args) -> int:
    from .erdosposa import Transversal

    g, _ = read_graph_file(args.file)
    fam = _family(args.family)
    oracle = MinorOracle(fam, g, _cap(args))
    k, xs = oracle.tau_mask(g.full)
    doc = certificate_document("transversal", g, args.family.split(","), transversal=Transversal(xs))
    print(f"tau {k}", file=sys.stderr if args.json is None else sys.stdout)
    _out(args, dump_document(doc))
    return EXIT_OK


def cmd_duality(args) -> int:
    g, _ = read_graph_file(args.file)
    fam = _family(args.family)
    if fam.forest_index is None:
        raise _InputError("family must contain a forest")
    cert = ep_duality(fam, g, mode=args.mode, reduction_threshold=args.reduction_threshold)
    for w in cert.warnings:
        print(f"warning: {w}", file=sys.stderr)
    if not verify_certificate(fam, g, cert):
        print("certificate failed verification", file=sys.stderr)
        return EXIT_NO
    doc = certificate_document("duality", g, args.family.split(","), cert=cert)
    print(f"packing {len(cert.packing)} transversal {len(cert.transversal)} ratio {cert.ratio:g} "
          f"mode {cert.mode}", file=sys.stderr if args.json is None else sys.stdout)
    _out(args, dump_document(doc))
    return EXIT_OK


def cmd_fpt(args) -> int:
    g, _ = read_graph_file(args.file)
    xs = fpt_pw_deletion(g, args.t, args.k, mode=args.mode)
    if xs is None:
        print("no")
        return EXIT_NO
    doc = certificate_document("fpt", g, extra={"t": args.t, "k": args.k, "transversal": sorted(xs)})
    print("yes", file=sys.stderr if args.json is None else sys.stdout)
    _out(args, dump_document(doc))
    return EXIT_OK


def cmd_folio(args) -> int:
    from .canon import canonical_graph

    g, roots = read_graph_file(args.file)
    rg = RootedGraph(g, roots)

    def show(folio):
        out = {}
        for key, encs in folio.entries:
            rows = []
            for e in sorted(encs):
                c = canonical_graph(e)
                rows.append({"n": c.n, "edges": c.graph.edges(), "roots": list(c.roots)})
            out[",".join(map(str, key))] = rows
        return out

    if args.p is None:
        payload = {"q": args.q, "entries": show(q_folio(rg, args.q))}
    else:
        df = deletion_folio(rg, args.p, args.q)
        payload = {"p": args.p, "q": args.q, "layers": [
            {",".join(map(str, xs)): [show(f) for f in sorted(fs, key=lambda f: repr(f.entries))]
             for xs, fs in layer}
            for layer in df.layers
        ]}
    _out(args, json.dumps(payload, sort_keys=True, indent=2) + "\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    g, _ = read_graph_file(args.file)
    with open(args.certificate, encoding="utf-8") as fh:
        try:
            doc = load_document(fh.read())
        except ValueError as exc:
            raise _InputError(f"certificate: {exc}") from None
    ok, reason = check_document(doc, g)
    print("verified" if ok else f"rejected: {reason}")
    return EXIT_OK if ok else EXIT_NO


def ratio_rows(family_spec: str, n: int, samples: int, seed: int, cap: int) -> list[dict]:
    """Exact tau/nu on ``samples`` random graphs on ``n`` vertices plus K_n."""
    fam = parse_family(family_spec)
    rng = random.Random(seed)
    graphs = [("K%d" % n, complete_graph(n))]
    for i in range(samples):
        graphs.append((f"G{i}", random_graph(n, rng.random(), rng)))
    rows = []
    for name, g in graphs:
        oracle = MinorOracle(fam, g, cap)
        nu = oracle.nu_mask(g.full)
        tau, _ = oracle.tau_mask(g.full)
        ratio = "" if nu == 0 else str(Fraction(tau, nu))
        rows.append({"seed": seed, "graph": name, "n": n, "nu": nu, "tau": tau, "ratio": ratio})
    return rows


def cmd_ratio(args) -> int:
    rows = ratio_rows(args.family, args.n, args.samples, args.seed, _cap(args))
    buf = _io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=["seed", "graph", "n", "nu", "tau", "ratio"], lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    text = buf.getvalue()
    if args.csv:
        with open(args.csv, "w", encoding="ascii", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    ratios = [Fraction(r["ratio"]) for r in rows if r["ratio"]]
    hist: dict[str, int] = {}
    for r in rows:
        key = r["ratio"] or "nu=0"
        hist[key] = hist.get(key, 0) + 1
    best = max(ratios) if ratios else None
    print(f"max ratio {best if best is not None else '-'}", file=sys.stderr)
    for key in sorted(hist):
        print(f"  {key}: {hist[key]}", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="forestminors", description=__doc__.splitlines()[0])
    p.add_argument("--cap", type=int, default=None, help="override the exact-oracle size cap")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("pathwidth", help="exact pathwidth with a witness decomposition")
    s.add_argument("file")
    s.add_argument("--at-most", type=int, dest="at_most")
    s.set_defaults(func=cmd_pathwidth)

    s = sub.add_parser("minor", help="search for a minor model")
    s.add_argument("file")
    s.add_argument("--pattern", required=True, help="pattern name, e.g. K3 or P4+K1")
    s.add_argument("--pattern-roots", dest="pattern_roots", help="comma-separated pattern roots")
    s.add_argument("--budget", type=int, default=2_000_000)
    s.set_defaults(func=cmd_minor)

    for name, fn, helptext in (("nu", cmd_nu, "exact packing number"), ("tau", cmd_tau, "exact transversal number")):
        s = sub.add_parser(name, help=helptext)
        s.add_argument("file")
        s.add_argument("--family", required=True)
        s.add_argument("--json")
        s.set_defaults(func=fn)

    s = sub.add_parser("duality", help="packing and transversal certificate")
    s.add_argument("file")
    s.add_argument("--family", required=True)
    s.add_argument("--mode", choices=["faithful", "practical"], default="practical")
    s.add_argument("--reduction-threshold", type=int, default=2, dest="reduction_threshold")
    s.add_argument("--json")
    s.set_defaults(func=cmd_duality)

    s = sub.add_parser("fpt", help="delete at most k vertices to get pathwidth below t")
    s.add_argument("file")
    s.add_argument("--t", type=int, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--mode", choices=["faithful", "practical"], default="practical")
    s.add_argument("--json")
    s.set_defaults(func=cmd_fpt)

    s = sub.add_parser("folio", help="dump a q-folio or p-deletion q-folio")
    s.add_argument("file")
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--p", type=int)
    s.add_argument("--json")
    s.set_defaults(func=cmd_folio)

    s = sub.add_parser("verify", help="re-check a certificate document")
    s.add_argument("file")
    s.add_argument("certificate")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("ratio", help="exact tau/nu on random graphs and K_n")
    s.add_argument("--family", required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--samples", type=int, default=20)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--csv")
    s.set_defaults(func=cmd_ratio)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GraphFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (_InputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (CapExceeded, SearchBudgetExceeded, ConstantOverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
