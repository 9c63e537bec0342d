"""Command-line front end.

Exit codes: 0 success, 1 verification failure (or a failed experiment),
2 bad arguments or unreadable input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from . import io
from .construct.basic import (
    apex_add,
    cocktail_party,
    corner_clique,
    strong_product,
    subgraph_extend,
    unit_rep_path,
)
from .construct.extendable import clique_sum, ktree_cs_rep, treewidth_rep
from .construct.pipeline import CliqueSumTree, pipeline_minor
from .fragility import (
    FragilityContext,
    balanced_separator,
    fragility_experiment,
    report_json,
    run_sample,
)
from .geometry import Box, GeometryError
from .graph import (
    CliqueCapExceeded,
    GraphError,
    KTreePlan,
    greedy_star_coloring,
    random_ktree_plan,
)
from .representation import (
    CertificateError,
    CsRep,
    EnvelopeRep,
    Report,
    TouchingRep,
    envelope_from_boxes,
    verify_cs_rep,
    verify_envelope_rep,
    verify_touching_rep,
)


class UsageError(Exception):
    pass


def _ints(text: str) -> list[int]:
    text = text.strip()
    if not text:
        return []
    try:
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def verify_any(c, require_comparable: bool = True) -> Report:
    if isinstance(c, CsRep):
        return verify_cs_rep(c, require_comparable)
    if isinstance(c, EnvelopeRep):
        return verify_envelope_rep(c)
    return verify_touching_rep(c, require_comparable)


def as_envelope(c) -> EnvelopeRep:
    if isinstance(c, EnvelopeRep):
        return c
    if isinstance(c, CsRep):
        c = c.base
    return envelope_from_boxes(c)


def _emit(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _write_cert(c, args) -> int:
    rep = verify_any(c)
    report = {"kind": type(c).__name__, "n": c.graph.n, "dim": c.dim, "ok": rep.ok,
              "violations": [v.as_dict() for v in rep.violations[:50]]}
    if not rep.ok:
        print(json.dumps(report, indent=1), file=sys.stderr)
        return 1
    _emit(io.dumps(io.certificate_to_json(c)), args.output)
    if args.report:
        Path(args.report).write_text(io.dumps(report))
    else:
        print(json.dumps(report), file=sys.stderr)
    return 0


def _read_touching(path: str) -> TouchingRep:
    c = io.read_certificate(path)
    if isinstance(c, CsRep):
        return c.base
    if not isinstance(c, TouchingRep):
        raise UsageError(f"{path}: expected a touching representation")
    return c


def _read_plan(args) -> KTreePlan:
    if args.plan:
        plan = io.plan_from_json(io.read_json(args.plan))
        if args.k is not None and plan.k != args.k:
            raise UsageError(f"--k {args.k} disagrees with the plan (k={plan.k})")
        return plan
    if args.k is None or args.n is None:
        raise UsageError("give --plan, or --k and --n for a random plan")
    return random_ktree_plan(args.k, args.n, np.random.default_rng(args.seed))


def cmd_build(args) -> int:
    what = args.what
    if what == "corner":
        return _write_cert(corner_clique(args.d), args)
    if what == "cocktail":
        return _write_cert(cocktail_party(args.n), args)
    if what == "apex":
        return _write_cert(apex_add(_read_touching(args.input), _ints(args.neighbors)), args)
    if what == "product":
        left = _read_touching(args.input)
        right = unit_rep_path(args.path) if args.path else _read_touching(args.right)
        return _write_cert(strong_product(left, right), args)
    if what == "subgraph":
        r = _read_touching(args.input)
        keep = [tuple(e) for e in io.read_json(args.keep)]
        coloring = greedy_star_coloring(r.graph, r.volume_order())
        return _write_cert(subgraph_extend(r, keep, coloring), args)
    if what == "ktree":
        return _write_cert(ktree_cs_rep(_read_plan(args)), args)
    if what == "treewidth":
        g = io.graph_from_json(io.read_json(args.graph))
        td = io.treedecomp_from_json(io.read_json(args.decomposition))
        return _write_cert(treewidth_rep(g, td), args)
    if what == "cliquesum":
        c1, c2 = io.read_certificate(args.input), io.read_certificate(args.right)
        if not isinstance(c1, CsRep) or not isinstance(c2, CsRep):
            raise UsageError("cliquesum needs two clique-sum extendable certificates")
        glue = _ints(args.glue)
        target = _ints(args.root) if args.root is not None else list(c2.root)
        if len(glue) != len(target):
            raise UsageError("--glue and --root must have equal length")
        cert, _ = clique_sum(c1, glue, c2, dict(zip(glue, target)))
        return _write_cert(cert, args)
    if what == "minor-pipeline":
        tree = CliqueSumTree.from_json(io.read_json(args.tree))
        keep = [tuple(e) for e in io.read_json(args.keep)] if args.keep else None
        rep, res = pipeline_minor(tree, keep)
        code = _write_cert(rep, args)
        print(json.dumps(res.summary()), file=sys.stderr)
        return code
    raise UsageError(f"unknown build target {what}")


def cmd_verify(args) -> int:
    c = io.read_certificate(args.certificate, strict=not args.lax)
    rep = verify_any(c, not args.allow_incomparable)
    out = {"kind": type(c).__name__, "n": c.graph.n, "dim": c.dim, "ok": rep.ok,
           "violations": [v.as_dict() for v in rep.violations], "notes": rep.notes}
    _emit(json.dumps(out, indent=1, sort_keys=True) + "\n", args.output)
    return 0 if rep.ok else 1


def _checked_envelope(path: str) -> EnvelopeRep:
    c = io.read_certificate(path)
    rep = verify_any(c)
    if not rep.ok:
        raise CertificateError(f"{path} does not verify", rep)
    return as_envelope(c)


def cmd_sample(args) -> int:
    e = _checked_envelope(args.certificate)
    ctx = FragilityContext(e, args.k)
    smp = run_sample(ctx, args.seed, args.index, keep_schedule=True)
    out = {"k": args.k, "seed": args.seed, "index": args.index,
           "offsets": [io.format_rational(x) for x in smp.schedule.offsets],
           "deleted": sorted(smp.deleted), "width": smp.width, "bag_limit": ctx.f + 1,
           "decomposition": smp.decomposition.to_json(), "violations": smp.violations}
    _emit(json.dumps(out, indent=1, sort_keys=True) + "\n", args.output)
    return 0 if not smp.violations else 1


def cmd_experiment(args) -> int:
    e = _checked_envelope(args.certificate)
    report = fragility_experiment(e, args.k, args.samples, args.seed, timing=args.timing)
    _emit(report_json(report), args.output)
    return 0 if not report["violations"] else 1


def cmd_separate(args) -> int:
    e = _checked_envelope(args.certificate)
    res = balanced_separator(e, args.k, args.seed)
    _emit(json.dumps(res.as_dict(), indent=1, sort_keys=True) + "\n", args.output)
    return 0 if res.balanced else 1


def cmd_info(args) -> int:
    obj = io.read_json(args.certificate)
    c = io.certificate_from_json(obj, strict=not args.lax)
    out = {"kind": io.certificate_kind(obj), "n": c.graph.n, "edges": len(c.graph.edges), "dim": c.dim}
    if isinstance(c, CsRep):
        out.update(root=list(c.root), epsilon=io.format_rational(c.epsilon), cliques=len(c.clique_points))
    if isinstance(c, EnvelopeRep):
        out.update(s=c.s, t=c.t, declared=c.declared)
    print(json.dumps(out, sort_keys=True))
    return 0


# --- SVG ------------------------------------------------------------------

def render_svg(r: TouchingRep, axes: Sequence[int] = (0, 1), size: int = 480) -> str:
    """Boxes projected to two axes, with vertex labels and dashed lines at contacts."""
    d = r.dim
    if any(a >= d for a in axes):
        raise UsageError(f"axes {list(axes)} out of range for dimension {d}")

    def side(b: Box, a: int):
        return (b[a].lo, b[a].hi) if a >= 0 else (Fraction(0), Fraction(1))

    ax, ay = (axes[0], axes[1] if len(axes) > 1 else -1)
    rects = [(side(b, ax), side(b, ay)) for b in r.boxes]
    xs = [x for (sx, _) in rects for x in sx]
    ys = [y for (_, sy) in rects for y in sy]
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    scale = Fraction(size - 40) / max(x1 - x0, y1 - y0, Fraction(1, 10**9))

    def px(x):
        return float(20 + (x - x0) * scale)

    def py(y):
        return float(size - 20 - (y - y0) * scale)

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}">',
             '<rect width="100%" height="100%" fill="white"/>']
    for v, ((a, b), (c, e)) in enumerate(rects):
        hue = (v * 47) % 360
        parts.append(f'<rect x="{px(a):.3f}" y="{py(e):.3f}" width="{px(b) - px(a):.3f}" '
                     f'height="{py(c) - py(e):.3f}" fill="hsl({hue},60%,80%)" fill-opacity="0.6" '
                     f'stroke="black" stroke-width="0.5"/>')
        parts.append(f'<text x="{(px(a) + px(b)) / 2:.3f}" y="{(py(c) + py(e)) / 2:.3f}" '
                     f'font-size="10" text-anchor="middle">{v}</text>')
    for u, v in sorted(r.graph.edges):
        (ua, ub), (uc, ue) = rects[u]
        (va, vb), (vc, ve) = rects[v]
        lx, hx = max(ua, va), min(ub, vb)
        ly, hy = max(uc, vc), min(ue, ve)
        if lx <= hx and ly <= hy:
            parts.append(f'<line x1="{px(lx):.3f}" y1="{py(ly):.3f}" x2="{px(hx):.3f}" y2="{py(hy):.3f}" '
                         f'stroke="red" stroke-dasharray="3,2"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def cmd_plot(args) -> int:
    c = io.read_certificate(args.certificate)
    if isinstance(c, CsRep):
        c = c.base
    if isinstance(c, EnvelopeRep):
        c = TouchingRep(c.graph, c.dim, c.outer)
    axes = _ints(args.axes) if args.axes else list(range(min(2, c.dim)))
    if c.dim > 2 and not args.axes:
        raise UsageError("dimension above 2: choose a projection with --axes")
    _emit(render_svg(c, axes), args.output)
    return 0


# --- parser ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="boxdim", description="Touching box representations and grid fragility.")
    p.add_argument("--cap", type=int, help="clique-enumeration cap (overrides BOXDIM_CLIQUE_CAP)")
    sub = p.add_subparsers(dest="verb", required=True)

    b = sub.add_parser("build", help="build and verify a certificate")
    b.add_argument("what", choices=["corner", "apex", "product", "subgraph", "ktree", "treewidth",
                                    "cliquesum", "cocktail", "minor-pipeline"])
    b.add_argument("-i", "--input", help="input certificate")
    b.add_argument("--right", help="second certificate (product, cliquesum)")
    b.add_argument("--path", type=int, help="product with a unit path of this many vertices")
    b.add_argument("--neighbors", default="", help="apex neighbours, comma-separated")
    b.add_argument("--keep", help="JSON list of edges to keep")
    b.add_argument("--plan", help="k-tree plan JSON")
    b.add_argument("--graph", help="graph JSON")
    b.add_argument("--decomposition", help="tree decomposition JSON")
    b.add_argument("--tree", help="clique-sum tree JSON")
    b.add_argument("--glue", default="", help="glue clique in the first certificate")
    b.add_argument("--root", help="matching root vertices of the second certificate")
    b.add_argument("--k", type=int)
    b.add_argument("--n", type=int)
    b.add_argument("--d", type=int, default=2)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("-o", "--output")
    b.add_argument("--report", help="write the verification report here")
    b.set_defaults(func=cmd_build)

    v = sub.add_parser("verify", help="verify a certificate file")
    v.add_argument("certificate")
    v.add_argument("--allow-incomparable", action="store_true")
    v.add_argument("--lax", action="store_true", help="warn on unknown fields instead of failing")
    v.add_argument("-o", "--output")
    v.set_defaults(func=cmd_verify)

    for name, func, help_ in (("sample", cmd_sample, "draw one deletion sample"),
                              ("experiment", cmd_experiment, "run a fragility experiment"),
                              ("separate", cmd_separate, "balanced separator")):
        s = sub.add_parser(name, help=help_)
        s.add_argument("certificate")
        s.add_argument("--k", type=int, required=True)
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("-o", "--output")
        if name == "sample":
            s.add_argument("--index", type=int, default=0)
        if name == "experiment":
            s.add_argument("--samples", type=int, default=100)
            s.add_argument("--timing", action="store_true", help="include wall-clock time in the report")
        s.set_defaults(func=func)

    pl = sub.add_parser("plot", help="SVG drawing of a certificate")
    pl.add_argument("certificate")
    pl.add_argument("--axes", help="two axes to project onto, e.g. 0,2")
    pl.add_argument("-o", "--output")
    pl.set_defaults(func=cmd_plot)

    inf = sub.add_parser("info", help="summary of a certificate file")
    inf.add_argument("certificate")
    inf.add_argument("--lax", action="store_true")
    inf.set_defaults(func=cmd_info)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    if args.cap is not None:
        os.environ["BOXDIM_CLIQUE_CAP"] = str(args.cap)
    try:
        return args.func(args)
    except CertificateError as e:
        print(f"error: {e}", file=sys.stderr)
        if e.report is not None:
            print(str(e.report), file=sys.stderr)
        return 1
    except (UsageError, io.FormatError, GraphError, GeometryError, CliqueCapExceeded,
            FileNotFoundError, KeyError, TypeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
