"""``tplkit`` command line.

Exit status: 0 on success, 1 on a domain error (bad file contents, failed
precondition, infeasible ledger), 2 on a usage error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import _accel
from .errors import FormatError, TplkitError
from .filtrating import (
    AttachmentPattern,
    BoundaryLedger,
    ManifoldContext,
    PermutationGroup,
    assemble_boundary,
    bounds_ok,
    enumerate_patterns,
    euler_feasible,
    model_of_germ,
    realization_accounting,
)
from .invariants import bowen_franks, flow_equivalence_certificate, parry_sullivan
from .search import (
    SearchBudget,
    apply_step,
    MoveStep,
    conjugacy_search,
    flow_equiv_search,
    germ_equiv_search,
)
from .shift import (
    AdjacencyMatrix,
    EdgeGraph,
    amalgamate,
    as_edge_graph,
    contract,
    expand,
    in_split,
    out_split,
    periodic_point_counts,
)
from .template import (
    Template,
    crush_to_edge_graph,
    genus,
    slide_sites,
    split_sites,
    symbolic_orbits,
    unsplit_sites,
    validate,
)
from .thicken import thicken

FORMATS = ("text", "json", "dot")


class UsageError(Exception):
    """Bad flag values detected after argparse (exit 2)."""


# ---------------------------------------------------------------------------
# input helpers


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from None


def _is_template_text(text: str) -> bool:
    for ln in text.splitlines():
        tok = ln.split("#", 1)[0].split()
        if tok:
            return tok[0] in ("branchline", "strip")
    return False


def _vertex_names(text: str):
    for ln in text.splitlines():
        s = ln.strip()
        if s.startswith("# vertices:"):
            return s.split(":", 1)[1].split()
    return None


def load_graph(path: str) -> EdgeGraph:
    """MAT v1 file as an edge graph; a ``# vertices: ...`` comment names rows."""
    text = _read(path)
    if _is_template_text(text):
        return crush_to_edge_graph(Template.parse(text))
    m = AdjacencyMatrix.parse(text)
    names = _vertex_names(text)
    if m.is_transition() and names:
        if len(names) != m.n:
            raise FormatError(f"'# vertices:' lists {len(names)} names for a {m.n}x{m.n} matrix")
        return EdgeGraph.from_matrix(m.entries, names)
    return as_edge_graph(m)


def load_template(path: str) -> Template:
    t = Template.parse(_read(path))
    problems = validate(t)
    if problems:
        from .errors import TemplateError

        raise TemplateError(problems)
    return t


def graph_text(g: EdgeGraph) -> str:
    return "# vertices: " + " ".join(g.vertices) + "\n" + g.adjacency().format()


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def _need(args, allowed):
    if args.format not in allowed:
        raise UsageError(f"--format {args.format} is not supported by '{args.cmd}' "
                         f"(choose from {', '.join(allowed)})")


# ---------------------------------------------------------------------------
# subcommands (each returns the text to print)


def cmd_validate(args):
    _need(args, ("text", "json"))
    text = _read(args.file)
    if _is_template_text(text):
        problems = validate(Template.parse(text))
        kind = "template"
    else:
        load_graph(args.file)
        problems, kind = [], "matrix"
    if args.format == "json":
        out = _dump({"kind": kind, "valid": not problems, "problems": problems})
    else:
        out = "ok" if not problems else "\n".join(f"invalid: {p}" for p in problems)
    if problems:
        sys.stdout.write(out + "\n")
        raise _Quiet(1)
    return out


def cmd_crush(args):
    g = crush_to_edge_graph(load_template(args.file))
    if args.format == "json":
        return _dump(g.to_json())
    if args.format == "dot":
        return g.to_dot("crush").rstrip("\n")
    return graph_text(g).rstrip("\n")


def cmd_genus(args):
    _need(args, ("text", "json"))
    g = genus(load_template(args.file))
    return _dump({"genus": g}) if args.format == "json" else str(g)


def cmd_thicken(args):
    _need(args, ("text", "json"))
    b = thicken(load_template(args.file))
    return _dump(b.to_json()) if args.format == "json" else b.summary()


def cmd_orbits(args):
    _need(args, ("text", "json"))
    if args.k < 1:
        raise UsageError("--k must be >= 1")
    g = load_graph(args.file)
    if args.count:
        counts = periodic_point_counts(g, args.k)
        if args.format == "json":
            return _dump({"periodic_points": counts})
        return "\n".join(f"{k} {c}" for k, c in enumerate(counts, 1))
    words = symbolic_orbits(g, args.k)
    if args.format == "json":
        return _dump({"orbits": [list(w.symbols) for w in words]})
    return "\n".join(str(w) for w in words)


def cmd_invariants(args):
    _need(args, ("text", "json"))
    g = load_graph(args.file)
    if args.which == "cert":
        if not args.other:
            raise UsageError("invariants cert needs a second file")
        v = flow_equivalence_certificate(g, load_graph(args.other))
        if args.format == "json":
            return _dump(v.to_json())
        return v.kind + (f": {v.witness}" if v.witness else "")
    if args.other:
        raise UsageError(f"invariants {args.which} takes one file")
    ps, bf = parry_sullivan(g), bowen_franks(g)
    if args.format == "json":
        data = {"ps": ps, "bf": bf.to_json()}
        if args.which != "all":
            data = {args.which: data[args.which]}
        return _dump(data)
    if args.which == "ps":
        return str(ps)
    if args.which == "bf":
        return str(bf)
    return f"ps {ps}\nbf {bf}"


def _split_list(s: str | None, what: str):
    if not s:
        raise UsageError(f"--{what} is required for this surgery")
    return [x for x in s.replace(",", " ").split() if x]


def _parse_parts(s: str | None):
    if not s or "|" not in s:
        raise UsageError("--parts must look like 'a,b|c'")
    left, right = s.split("|", 1)
    return _split_list(left, "parts"), _split_list(right, "parts")


def cmd_surgery(args):
    g = load_graph(args.file)
    op = args.op
    if op in ("out-split", "in-split"):
        if not args.vertex:
            raise UsageError("--vertex is required for a split")
        fn = out_split if op == "out-split" else in_split
        h = fn(g, args.vertex, _parse_parts(args.parts))
    elif op == "amalgamate":
        vs = _split_list(args.vertices, "vertices")
        if len(vs) != 2:
            raise UsageError("--vertices takes exactly two ids")
        h = amalgamate(g, vs[0], vs[1], args.direction)
    elif op == "expand":
        e = _split_list(args.edge, "edge")
        if len(e) != 2:
            raise UsageError("--edge takes exactly two ids 'u,w'")
        h = expand(g, (e[0], e[1]))
    else:
        if not args.vertex:
            raise UsageError("--vertex is required for contract")
        h = contract(g, args.vertex)
    if args.format == "json":
        return _dump(h.to_json())
    if args.format == "dot":
        return h.to_dot().rstrip("\n")
    return graph_text(h).rstrip("\n")


def _parse_move(spec: str) -> MoveStep:
    parts = spec.split(":")
    kind = parts[0]
    try:
        if kind == "slide" and len(parts) == 2:
            return MoveStep("slide", {"branch_line": parts[1]})
        if kind == "split" and len(parts) == 3:
            return MoveStep("split", {"branch_line": parts[1], "gap": int(parts[2])})
        if kind == "unsplit" and len(parts) == 3:
            return MoveStep("unsplit", {"branch_lines": [parts[1], parts[2]]})
    except ValueError:
        pass
    raise UsageError(f"--apply {spec!r}: expected slide:Q, split:Q:GAP or unsplit:QA:QB")


def cmd_moves(args):
    _need(args, ("text", "json"))
    t = load_template(args.file)
    if args.apply:
        for spec in args.apply:
            t = apply_step(t, _parse_move(spec))
        return _dump(t.to_json()) if args.format == "json" else t.format().rstrip("\n")
    sites = {
        "slide": slide_sites(t),
        "split": [list(s) for s in split_sites(t)],
        "unsplit": [list(s) for s in unsplit_sites(t)],
    }
    if args.format == "json":
        return _dump(sites)
    lines = [f"slide:{q}" for q in sites["slide"]]
    lines += [f"split:{q}:{j}" for q, j in sites["split"]]
    lines += [f"unsplit:{a}:{b}" for a, b in sites["unsplit"]]
    return "\n".join(lines) if lines else "(no moves)"


def _curve_ids(args):
    if args.template:
        return list(thicken(load_template(args.template)).curve_ids)
    if args.curves is None:
        raise UsageError("enumerate needs --curves or --template")
    c = args.curves.strip()
    if c.isdigit():
        n = int(c)
        if n < 0:
            raise UsageError("--curves must be >= 0")
        if n <= 26:
            return [chr(ord("a") + i) for i in range(n)]
        return [f"c{i + 1}" for i in range(n)]
    ids = [x for x in c.replace(",", " ").split() if x]
    if len(set(ids)) != len(ids):
        raise UsageError("--curves lists a curve twice")
    return ids


def cmd_enumerate(args):
    _need(args, ("text", "json"))
    if args.m < 0:
        raise UsageError("--m must be >= 0")
    curves = _curve_ids(args)
    ctx = ManifoldContext(args.m)
    group = None
    if args.mod_symmetry:
        group = PermutationGroup.parse(_read(args.mod_symmetry), curves)
    pats = enumerate_patterns(curves, ctx, group)
    if args.count_only:
        return _dump({"count": len(pats)}) if args.format == "json" else str(len(pats))
    if args.format == "json":
        return _dump({"m": ctx.m, "curves": curves, "count": len(pats),
                      "patterns": [p.to_json(ctx) for p in pats]})
    return "\n".join(str(p) for p in pats)


def cmd_assemble(args):
    _need(args, ("text", "json"))
    b = thicken(load_template(args.file))
    if args.pattern and args.germ_model:
        raise UsageError("give either --pattern or --germ-model, not both")
    if args.germ_model:
        p = model_of_germ(b)
    elif args.pattern:
        p = AttachmentPattern.parse(args.pattern)
    else:
        raise UsageError("assemble needs --pattern or --germ-model")
    ledger = assemble_boundary(b, p)
    if args.format == "json":
        out = {"pattern": p.to_json(ManifoldContext(args.m)), "ledger": ledger.to_json(),
               "euler_feasible": euler_feasible(ledger)}
        return _dump(out)
    chk = bounds_ok(p, ManifoldContext(args.m))
    return (
        f"pattern: {p}\n"
        f"bounds (m={args.m}): {'ok' if chk else 'violated: ' + chk.violation}\n"
        + ledger.format().rstrip("\n")
    )


def cmd_euler(args):
    _need(args, ("text", "json"))
    ledger = BoundaryLedger.parse(_read(args.file))
    ok = euler_feasible(ledger)
    if args.format == "json":
        return _dump({"euler_feasible": ok, "chi_entrance": ledger.euler_entrance,
                      "chi_exit": ledger.euler_exit})
    return f"{str(ok).lower()} (chi {ledger.euler_entrance} vs {ledger.euler_exit})"


def cmd_account(args):
    _need(args, ("text", "json"))
    acc = realization_accounting(BoundaryLedger.parse(_read(args.file)))
    if args.format == "json":
        return _dump(acc.to_json())
    return f"r = {acc.r}\n{acc.n_formula}"


def cmd_search(args):
    _need(args, ("text", "json"))
    if args.depth < 1 or args.states < 1 or not args.time > 0:
        raise UsageError("--depth, --states and --time must be positive")
    budget = SearchBudget(args.depth, args.states, args.time)
    if args.calculus == "germ":
        a, b = load_template(args.a), load_template(args.b)
        res = germ_equiv_search(a, b, budget)
    else:
        a, b = load_graph(args.a), load_graph(args.b)
        fn = conjugacy_search if args.calculus == "conj" else flow_equiv_search
        res = fn(a, b, budget)
    if args.format == "json":
        return _dump(res.to_json(a, b))
    lines = [res.verdict]
    if res.trace is not None:
        for st in res.trace.steps:
            lines.append(f"  {st.kind} {json.dumps(st.site, sort_keys=True)}")
    if res.certificate:
        lines.append(f"  certificate {json.dumps(res.certificate, sort_keys=True)}")
    if res.reason:
        lines.append(f"  {res.reason}")
    return "\n".join(lines)


def cmd_export(args):
    _need(args, ("json", "dot"))
    text = _read(args.file)
    if _is_template_text(text):
        t = load_template(args.file)
        if args.format == "json":
            return _dump(t.to_json())
        return crush_to_edge_graph(t).to_dot("crush").rstrip("\n")
    g = load_graph(args.file)
    return _dump(g.to_json()) if args.format == "json" else g.to_dot().rstrip("\n")


def cmd_selftest(args):
    _need(args, ("text", "json"))
    from . import selftest

    results = selftest.run(args.seed, args.count)
    ok = all(r.passed for r in results)
    if args.format == "json":
        out = _dump({"seed": args.seed, "passed": ok, "checks": [r.to_json() for r in results]})
    else:
        out = "\n".join(str(r) for r in results)
    if not ok:
        sys.stdout.write(out + "\n")
        raise _Quiet(1)
    return out


# ---------------------------------------------------------------------------
# parser and dispatch


class _Quiet(Exception):
    """Exit with a status after output was already written."""

    def __init__(self, code):
        self.code = code


DISPATCH = {
    "validate": cmd_validate,
    "crush": cmd_crush,
    "genus": cmd_genus,
    "thicken": cmd_thicken,
    "orbits": cmd_orbits,
    "invariants": cmd_invariants,
    "surgery": cmd_surgery,
    "moves": cmd_moves,
    "enumerate": cmd_enumerate,
    "assemble": cmd_assemble,
    "euler": cmd_euler,
    "account": cmd_account,
    "search": cmd_search,
    "export": cmd_export,
    "selftest": cmd_selftest,
}

# library operation -> the one subcommand that exposes it
OPERATIONS = {
    "shift.AdjacencyMatrix.parse": "validate",
    "template.validate": "validate",
    "template.crush_to_edge_graph": "crush",
    "template.genus": "genus",
    "thicken.thicken": "thicken",
    "template.symbolic_orbits": "orbits",
    "shift.periodic_point_counts": "orbits",
    "invariants.parry_sullivan": "invariants",
    "invariants.bowen_franks": "invariants",
    "invariants.flow_equivalence_certificate": "invariants",
    "shift.out_split": "surgery",
    "shift.in_split": "surgery",
    "shift.amalgamate": "surgery",
    "shift.expand": "surgery",
    "shift.contract": "surgery",
    "template.slide_move": "moves",
    "template.split_move": "moves",
    "template.unsplit_move": "moves",
    "filtrating.enumerate_patterns": "enumerate",
    "filtrating.bounds_ok": "assemble",
    "filtrating.model_of_germ": "assemble",
    "filtrating.assemble_boundary": "assemble",
    "filtrating.euler_feasible": "euler",
    "filtrating.realization_accounting": "account",
    "search.conjugacy_search": "search",
    "search.flow_equiv_search": "search",
    "search.germ_equiv_search": "search",
    "shift.EdgeGraph.to_dot": "export",
    "template.Template.to_json": "export",
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default="text",
                        help="output format (default: text)")
    p = argparse.ArgumentParser(
        prog="tplkit",
        description="Templates, edge shifts and filtrating neighbourhoods.",
    )
    p.add_argument("--version", action="version", version="tplkit 0.1.0")
    sub = p.add_subparsers(dest="cmd", metavar="COMMAND", required=True)

    def add(name, help_):
        return sub.add_parser(name, help=help_, parents=[common], description=help_)

    s = add("validate", "check a TPL v1 or MAT v1 file")
    s.add_argument("file")
    s = add("crush", "collapse a template to its edge graph")
    s.add_argument("file")
    s = add("genus", "handlebody genus of a thickened template")
    s.add_argument("file")
    s = add("thicken", "entrance/exit surfaces and dividing curves")
    s.add_argument("file")
    s = add("orbits", "periodic words (or --count: periodic points) up to period K")
    s.add_argument("file", help="TPL v1 (crushed first) or MAT v1")
    s.add_argument("--k", type=int, default=3)
    s.add_argument("--count", action="store_true", help="print tr(A^k) for k = 1..K")
    s = add("invariants", "Parry-Sullivan number / Bowen-Franks group")
    s.add_argument("which", choices=("ps", "bf", "all", "cert"))
    s.add_argument("file")
    s.add_argument("other", nargs="?", help="second file (cert only)")
    s = add("surgery", "apply one edge-graph surgery to a MAT v1 file")
    s.add_argument("op", choices=("out-split", "in-split", "amalgamate", "expand", "contract"))
    s.add_argument("file")
    s.add_argument("--vertex")
    s.add_argument("--parts", help="two blocks of neighbours, e.g. '1,2|3'")
    s.add_argument("--vertices", help="two vertex ids, e.g. '1a,1b'")
    s.add_argument("--direction", choices=("out", "in"), default="out")
    s.add_argument("--edge", help="edge 'u,w' to subdivide")
    s = add("moves", "list template move sites, or --apply moves in order")
    s.add_argument("file")
    s.add_argument("--apply", action="append", metavar="MOVE",
                   help="slide:Q | split:Q:GAP | unsplit:QA:QB (repeatable)")
    s = add("enumerate", "attachment patterns satisfying the genus/puncture bounds")
    s.add_argument("--curves", help="a count N, or ids 'a,b,c'")
    s.add_argument("--template", help="take the curves from this template's thickening")
    s.add_argument("--m", type=int, default=0, help="number of S1xS2 summands (default 0)")
    s.add_argument("--mod-symmetry", metavar="FILE",
                   help="permutation group file (cycle notation, one generator per line)")
    s.add_argument("--count-only", action="store_true")
    s = add("assemble", "closed boundary surfaces after attaching a pattern")
    s.add_argument("file")
    s.add_argument("--pattern", help="e.g. '{c1,c3}:0 {c2}:0'")
    s.add_argument("--germ-model", action="store_true", help="a 2-handle on every curve")
    s.add_argument("--m", type=int, default=0)
    s = add("euler", "entrance/exit Euler balance of a ledger file")
    s.add_argument("file")
    s = add("account", "realization accounting (r and the n formula) of a ledger file")
    s.add_argument("file")
    s = add("search", "bounded search for a move sequence")
    s.add_argument("calculus", choices=("conj", "floweq", "germ"))
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--depth", type=int, default=4)
    s.add_argument("--states", type=int, default=50_000)
    s.add_argument("--time", type=float, default=60.0)
    s = add("export", "JSON of a template/graph, or DOT of its (crushed) edge graph")
    s.add_argument("file")
    s = add("selftest", "seeded randomized property checks")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--count", type=int, default=50, help="instances per check")
    return p


def main(argv=None) -> int:
    _accel.set_threads()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.cmd == "export" and args.format == "text":
        args.format = "json"
    try:
        out = DISPATCH[args.cmd](args)
    except UsageError as exc:
        print(f"tplkit {args.cmd}: error: {exc}", file=sys.stderr)
        return 2
    except _Quiet as q:
        return q.code
    except TplkitError as exc:
        print(f"tplkit {args.cmd}: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(out + "\n")
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
