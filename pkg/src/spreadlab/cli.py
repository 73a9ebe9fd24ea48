"""Command-line driver.

Every command prints ``key = value`` lines: a header with the tool version
and the configuration (seed included), then the result payload.  Stdout is
byte-identical for identical configurations; the wall time goes to stderr.
Exit status: 0 when the claim checked holds, 1 when it is falsified, 2 for
parse, budget and configuration errors.
"""

from __future__ import annotations

import argparse
import math
import os
import resource
import sys
import time

from . import __version__

EXIT_OK, EXIT_FALSIFIED, EXIT_ERROR = 0, 1, 2


class Report:
    def __init__(self, command, config):
        self.lines = [f"tool = spreadlab {__version__}", f"command = {command}"]
        for k, v in config.items():
            self.lines.append(f"config.{k} = {v}")
        self.status = EXIT_OK

    def add(self, key, value):
        self.lines.append(f"{key} = {_fmt(value)}")

    def extend(self, lines, prefix=""):
        self.lines.extend(prefix + ln for ln in lines)

    def figure(self, path):
        self.add("figure", path)

    def fail(self):
        self.status = EXIT_FALSIFIED

    def text(self):
        return "\n".join(self.lines) + "\n"


def _fmt(v):
    if v == math.inf:
        return "infinity"
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, (list, tuple)):
        return ",".join(_fmt(x) for x in v)
    return str(v)


def _seed(args):
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get("SPREADLAB_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise ValueError(f"SPREADLAB_SEED must be an integer, got {env!r}") from None


def _table(G, budget):
    from .conjtab import conjugacy_classes

    tab = getattr(G, "_class_table", None)
    if tab is None:
        tab = conjugacy_classes(G, budget=budget)
        G._class_table = tab
    return tab


def _group(ref):
    from .ingest import load_group

    return load_group(ref)


def _perm(text, degree):
    from .permcore import Perm

    return Perm.from_cycles(text, degree)


def _subgroups(G, how):
    from .ingest import parse_subgroups
    from .subfpr import curated_sp4_phi_maximals, maximal_subgroups_tiny

    if how == "tiny":
        return maximal_subgroups_tiny(G)
    if how == "curated":
        spec = getattr(G, "spec", None)
        if spec is None or (spec.family, spec.m, spec.F.q, spec.auto) != ("Sp", 2, 4, "phi"):
            raise ValueError("curated maximal subgroups exist only for zoo:Sp4(4):phi")
        return curated_sp4_phi_maximals(G)
    with open(how) as fh:
        return parse_subgroups(fh.read(), G)


# -- commands --------------------------------------------------------------------

def cmd_zoo_build(args, rep):
    from .ingest import format_perm_group

    G = _group(args.group)
    rep.add("order", G.order())
    rep.add("degree", G.degree)
    rep.add("generators", len(G.gens))
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(format_perm_group(G))
        rep.add("written", args.output)


def cmd_classes(args, rep):
    from .conjtab import format_table

    G = _group(args.group)
    T = _table(G, args.budget)
    rep.add("order", G.order())
    rep.add("classes", len(T))
    rep.extend(format_table(T).splitlines())
    if args.figures:
        from .figures import histogram

        rep.figure(histogram(args.figures, "class_sizes.png", [math.log10(c.size) for c in T],
                             f"class sizes of {args.group}", "log10 class size"))


def cmd_coset_classes(args, rep):
    from .conjtab import coset_classes, format_table

    G = _group(args.group)
    if args.theta:
        T, theta = G, _perm(args.theta, G.degree)
    else:
        if getattr(G, "theta_perm", None) is None:
            raise ValueError("group has no outer automorphism; pass --theta")
        T, theta = G.inner, G.theta_perm
    tab = coset_classes(T, theta, budget=args.budget)
    rep.add("inner_order", T.order())
    rep.add("classes", len(tab))
    rep.extend(format_table(tab).splitlines())


def cmd_spread(args, rep):
    from .spread import exact_spread, exact_uniform_spread

    G = _group(args.group)
    fn = exact_spread if args.mode == "exact" else exact_uniform_spread
    res = fn(G, reduce=not args.no_reduce, node_limit=args.node_limit)
    rep.add("order", G.order())
    if args.mode == "exact":
        rep.add("s", res.value)
        u = exact_uniform_spread(G, node_limit=args.node_limit)
        rep.add("u", u.value)
        rep.add("exhaustive", res.exhaustive and u.exhaustive)
        if not (res.exhaustive and u.exhaustive):
            rep.fail()
        res = u
    else:
        rep.add("u", res.value)
        rep.add("exhaustive", res.exhaustive)
        if not res.exhaustive:
            rep.fail()
    if res.class_id is not None:
        rep.add("u.class", res.class_id)
    rep.add("u.cover", " ; ".join(str(x) for x in res.cover) or "-")
    for cid, v in sorted(res.per_class.items()):
        rep.add(f"u.per_class.{cid}", "skipped" if v is None else v)
    if args.figures and res.per_class:
        from .figures import bars

        ids = sorted(c for c, v in res.per_class.items() if v is not None)
        rep.figure(bars(args.figures, "uniform_spread_by_class.png", ids,
                        [res.per_class[c] for c in ids], f"cover value by class, {args.group}",
                        "minimum cover - 1"))


def cmd_certify(args, rep):
    from .spread import auto_s_class, certify_uniform_spread

    G = _group(args.group)
    T = _table(G, args.budget)
    if args.auto_class:
        sc, _ = auto_s_class(G, T)
    elif args.s_class is not None:
        sc = args.s_class
        if not 0 < sc < len(T):
            raise ValueError(f"class {sc} out of range 1..{len(T) - 1}")
    else:
        raise ValueError("give --class or --auto-class")
    cert = certify_uniform_spread(G, sc, args.k, N=args.N, seed=rep.seed, table=T,
                                  jobs=args.jobs, group_id=args.group)
    text = cert.to_text()
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
        rep.add("certificate", args.output)
    rep.add("s_class", sc)
    rep.add("s_order", T[sc].order)
    rep.add("stage1", "pass" if cert.stage1_ok else "open")
    for cid, _, p in cert.stage1:
        rep.add(f"P.{cid}", p)
    counts = {}
    for r in cert.records:
        counts[r.status] = counts.get(r.status, 0) + 1
    for k in sorted(counts):
        rep.add(f"records.{k}", counts[k])
    rep.add("result", "success" if cert.success else "failure")
    if not cert.success:
        rep.fail()
    if args.figures:
        from .figures import bars

        ids = [cid for cid, _, _ in cert.stage1]
        rep.figure(bars(args.figures, "nongeneration_probability.png", ids,
                        [p for _, _, p in cert.stage1], f"P(x, s), s in class {sc}", "P"))


def cmd_replay(args, rep):
    from .permcore import ParseError
    from .spread import parse_certificate, read_certificate_text, replay_certificate

    text = read_certificate_text(args.certificate)
    head = dict(ln.split(" = ", 1) for ln in text.splitlines()[1:3] if " = " in ln)
    if "group" not in head:
        raise ParseError("line 2: missing group field")
    G = _group(args.group or head["group"])
    cert = parse_certificate(text, G.degree)
    problems = replay_certificate(G, cert, _table(G, args.budget))
    rep.add("group", cert.group)
    rep.add("k", cert.k)
    rep.add("s_class", cert.s_class)
    rep.add("records", len(cert.records))
    rep.add("claimed", "success" if cert.success else "failure")
    for p in problems:
        rep.add("problem", p)
    ok = cert.success and not problems
    rep.add("replay", "verified" if ok else "rejected")
    if not ok:
        rep.fail()


def cmd_fpr(args, rep):
    from .subfpr import exact_fpr, sp4_phi_bound_records

    G = _group(args.group)
    T = _table(G, args.budget)
    M = _subgroups(G, args.subgroups)
    ids = [args.x_class] if args.x_class is not None else T.prime_order_ids()
    matrix = []
    for cid in ids:
        row = []
        for H in M:
            f = exact_fpr(G, T, cid, H)
            row.append(f)
            rep.add(f"fpr.{cid}.{H.label}", f)
        matrix.append(row)
    if args.subgroups == "curated":
        recs = sp4_phi_bound_records(G, T, M)
        for r in recs:
            for fam, b, h in r.bounds:
                rep.add(f"bound.{r.x_class}.{r.label}.{fam}", f"{b} holds={'yes' if h else 'NO'}")
        good = all(r.ok for r in recs)
        rep.add("bounds", "hold" if good else "violated")
        if not good:
            rep.fail()
    if args.figures and matrix:
        from .figures import heatmap

        rep.figure(heatmap(args.figures, "fpr.png", ids, [H.label for H in M], matrix,
                           f"fixed point ratios, {args.group}"))


def cmd_probbound(args, rep):
    from .subfpr import prob_bound_report

    G = _group(args.group)
    T = _table(G, args.budget)
    M = _subgroups(G, args.subgroups)
    r = prob_bound_report(G, T, args.s_class, M)
    rep.extend(r.lines())
    rep.add("holds", r.holds)
    if not r.holds:
        rep.fail()
    if args.figures:
        from .figures import bars

        rep.figure(bars(args.figures, "probability_bound.png", [c for c, _, _ in r.rows],
                        [p for _, p, _ in r.rows], f"P(x, s) against the bound, s in class "
                        f"{args.s_class}", "probability", ref=[b for _, _, b in r.rows],
                        ref_label="sum of fixed point ratios"))


def cmd_graph(args, rep):
    from .spread import generating_graph, graph_diameter

    G = _group(args.group)
    g = generating_graph(G)
    d = graph_diameter(g)
    rep.add("vertices", len(g.ranks))
    rep.add("edges", int(g.adjacency.sum()) // 2)
    rep.add("diameter", "disconnected" if d is None else d)
    if args.figures:
        from .figures import histogram

        rep.figure(histogram(args.figures, "generating_graph_degrees.png",
                             g.adjacency.sum(axis=1).tolist(), f"generating graph of {args.group}",
                             "degree"))


def cmd_shintani(args, rep):
    from . import shintani as sh
    from .ffield import make_field, prime_factors

    big, small = _group(args.big), _group(args.small)
    theta = _perm(args.theta, big.degree) if args.theta else None
    specs = []
    for s in args.subspaces or ["1,totally-isotropic"]:
        k, _, flavor = s.partition(",")
        specs.append((int(k), flavor or "totally-isotropic"))
    r = sh.verify_shintani(big, small, e=args.e, subspace_specs=tuple(specs),
                           orthogonal=not args.no_orthogonal, theta=theta)
    rep.extend(r.lines())
    ok = r.ok
    if args.sz:
        c = sh.sz_fixed_subgroup_check(small, seed=rep.seed)
        rep.add("sz.outer_involutions", c.outer_involutions)
        rep.add("sz.fixed_orders", [f"{k}:{v}" for k, v in c.fixed_orders.items()])
        rep.add("sz.graph_order", c.graph_order)
        rep.add("sz.verdict", "pass" if c.ok else "FAIL")
        ok &= c.ok
    if args.norm_check:
        m, q, e = (int(t) for t in args.norm_check.split(","))
        ps = prime_factors(q)
        if len(ps) != 1:
            raise ValueError(f"{q} is not a prime power")
        F = make_field(ps[0], round(math.log(q, ps[0])))
        bad = sh.norm_identity_samples(m, F, e, samples=args.norm_samples, seed=rep.seed)
        rep.add("norm.samples", args.norm_samples)
        rep.add("norm.failures", bad)
        ok &= bad == 0
    if not ok:
        rep.fail()
    if args.figures:
        from .figures import paired_profile

        a, b = r.stats["centralizer"]
        rep.figure(paired_profile(args.figures, "centralizer_profiles.png", a, b,
                                  "centralizer orders"))


def cmd_accept(args, rep):
    from .acceptance import run_all

    only = {int(t) for t in args.only.split(",")} if args.only else None
    results = run_all(only, echo=lambda s: print(s, file=sys.stderr, flush=True))
    for res in results:
        rep.add(f"criterion.{res.number}", f"{'pass' if res.ok else 'FAIL'} {res.detail}")
    if not all(r.ok for r in results):
        rep.fail()


# -- parser -----------------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="spreadlab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"spreadlab {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="random seed (default: $SPREADLAB_SEED or 0)")
    common.add_argument("--budget", type=int, default=2_000_000,
                        help="element-enumeration cap")
    common.add_argument("--memory-gib", type=float, default=4.0,
                        help="address-space cap in GiB (0 disables)")
    common.add_argument("--figures", metavar="DIR", default=None,
                        help="also write matplotlib figures into DIR")
    common.add_argument("-o", "--output", default=None, help="output file")
    sub = p.add_subparsers(dest="command", required=True)

    z = sub.add_parser("zoo").add_subparsers(dest="action", required=True)
    b = z.add_parser("build", parents=[common], help="build a zoo/atlas group")
    b.add_argument("group")
    b.set_defaults(func=cmd_zoo_build)

    c = sub.add_parser("classes", parents=[common], help="conjugacy classes")
    c.add_argument("group")
    c.set_defaults(func=cmd_classes)

    c = sub.add_parser("coset-classes", parents=[common], help="T-classes in an outer coset")
    c.add_argument("group")
    c.add_argument("--theta", default=None, help="normalizing permutation in cycle notation")
    c.set_defaults(func=cmd_coset_classes)

    s = sub.add_parser("spread").add_subparsers(dest="mode", required=True)
    for mode in ("exact", "uniform"):
        e = s.add_parser(mode, parents=[common])
        e.add_argument("group")
        e.add_argument("--no-reduce", action="store_true",
                       help="use all anchors instead of prime-order ones")
        e.add_argument("--node-limit", type=int, default=None)
        e.set_defaults(func=cmd_spread)
    e = s.add_parser("certify", parents=[common])
    e.add_argument("group")
    e.add_argument("--class", dest="s_class", type=int, default=None)
    e.add_argument("--auto-class", action="store_true")
    e.add_argument("-k", type=int, required=True)
    e.add_argument("-N", type=int, default=100, help="random draws per tuple")
    e.add_argument("--jobs", type=int, default=1)
    e.set_defaults(func=cmd_certify)
    e = s.add_parser("replay", parents=[common])
    e.add_argument("certificate")
    e.add_argument("--group", default=None, help="override the group named in the file")
    e.set_defaults(func=cmd_replay)

    f = sub.add_parser("fpr", parents=[common], help="fixed point ratios")
    f.add_argument("group")
    f.add_argument("--subgroups", required=True, help="tiny, curated or a subgroup file")
    f.add_argument("--class", dest="x_class", type=int, default=None)
    f.set_defaults(func=cmd_fpr)

    f = sub.add_parser("probbound", parents=[common], help="P(x, s) against fpr sums")
    f.add_argument("group")
    f.add_argument("--class", dest="s_class", type=int, required=True)
    f.add_argument("--subgroups", default="tiny")
    f.set_defaults(func=cmd_probbound)

    g = sub.add_parser("graph").add_subparsers(dest="action", required=True)
    d = g.add_parser("diameter", parents=[common])
    d.add_argument("group")
    d.set_defaults(func=cmd_graph)

    h = sub.add_parser("shintani").add_subparsers(dest="action", required=True)
    v = h.add_parser("verify", parents=[common])
    v.add_argument("--big", required=True)
    v.add_argument("--small", required=True)
    v.add_argument("--theta", default=None)
    v.add_argument("-e", type=int, default=None)
    v.add_argument("--subspaces", action="append", metavar="K,FLAVOR",
                   help="e.g. 1,totally-isotropic or 2,nondegenerate (repeatable)")
    v.add_argument("--no-orthogonal", action="store_true")
    v.add_argument("--sz", action="store_true", help="outer involution check on the small group")
    v.add_argument("--norm-check", metavar="M,Q,E", default=None)
    v.add_argument("--norm-samples", type=int, default=500)
    v.set_defaults(func=cmd_shintani)

    a = sub.add_parser("accept", parents=[common], help="run the acceptance suite")
    a.add_argument("--only", default=None, help="comma-separated criterion numbers")
    a.set_defaults(func=cmd_accept)
    return p


def _config(args):
    skip = {"func", "command", "mode", "action", "memory_gib", "figures"}
    return {k: _fmt(v) if v is not None else "-" for k, v in sorted(vars(args).items())
            if k not in skip}


def _limit_memory(gib):
    if gib and gib > 0:
        cap = int(gib * (1 << 30))
        soft, hard = resource.getrlimit(resource.RLIMIT_AS)
        if hard != resource.RLIM_INFINITY:
            cap = min(cap, hard)
        resource.setrlimit(resource.RLIMIT_AS, (cap, hard))


def main(argv=None):
    from .ffield import FieldError
    from .ingest import ValidationFailed
    from .permcore import BudgetExceeded, ParseError

    parser = build_parser()
    args = parser.parse_args(argv)
    t = time.perf_counter()
    try:
        seed = _seed(args)
        args.seed = seed
        _limit_memory(args.memory_gib)
        name = " ".join(x for x in (args.command, getattr(args, "mode", None),
                                    getattr(args, "action", None)) if x)
        rep = Report(name, _config(args))
        rep.seed = seed
        args.func(args, rep)
    except (ParseError, ValidationFailed, BudgetExceeded, FieldError, ValueError, OSError,
            MemoryError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    out = rep.text()
    if args.output and args.func not in (cmd_zoo_build, cmd_certify):
        with open(args.output, "w") as fh:
            fh.write(out)
    sys.stdout.write(out)
    print(f"wall_time = {time.perf_counter() - t:.3f} s", file=sys.stderr)
    return rep.status


if __name__ == "__main__":
    sys.exit(main())
