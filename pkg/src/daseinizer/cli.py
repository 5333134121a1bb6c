"""Command-line interface.

Exit status: 0 on success, 1 on a domain or usage error, 2 when ``verify``
finds a failing check.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Sequence

from . import export
from .borel import BorelSet
from .daseinisation import inner_support, outer_support
from .errors import DaseinizerError, InvariantError
from .language import Primitive, names, parse, represent, to_text
from .models import Model, load_model
from .operators import Projector, spectral_projector
from .presheaf import DEFAULT_SEARCH_CAP, global_sections, spectral_presheaf
from .tolerance import get_eps, set_eps
from .truth import classical_truth, membership_valuation, truth_object, truth_value_proposition
from .verify import format_report, run_suite


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fmt(pattern) -> str:
    return "{" + ",".join(str(k) for k in sorted(pattern)) + "}"


def _table(rows: list[list[str]]) -> str:
    widths = [max(len(r[c]) for r in rows) for c in range(len(rows[0]))]
    return "\n".join("  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip() for r in rows) + "\n"


def _load(args) -> Model:
    model = load_model(args.model)
    # precedence: --eps, then DASEINIZER_EPS, then the model file
    if args.eps is not None:
        set_eps(args.eps)
    elif "DASEINIZER_EPS" not in os.environ and model.tolerance is not None:
        set_eps(model.tolerance)
    return model


def cmd_poset(args, out) -> int:
    model = _load(args)
    poset = model.poset()
    if args.dot:
        out.write(export.to_dot(poset, title=model.name))
        return 0
    if args.json:
        out.write(export.dumps(export.poset_json(poset)))
        return 0
    rows = [["context", "minimals", "ranks", "below"]]
    for i, v in enumerate(poset):
        below = sorted(poset.label(j) for j in poset.below(i) if j != i)
        rows.append([v.label, str(v.size), ",".join(map(str, v.ranks)), ", ".join(below) or "-"])
    out.write(f"{len(poset)} contexts in dimension {poset.dim}\n")
    out.write(_table(rows))
    return 0


def _projector_for(model: Model, op: str, borel: str | None) -> Projector:
    a = model.operator(op)
    if borel is not None:
        return spectral_projector(a, BorelSet.parse(borel))
    try:
        return Projector(a.matrix)
    except InvariantError:
        raise InvariantError(
            f"operator {op!r} is not a projector; pass --set to daseinise a spectral projector of it"
        ) from None


def cmd_daseinise(args, out) -> int:
    model = _load(args)
    poset = model.poset()
    p = _projector_for(model, args.op, args.set)
    if args.json:
        data = {
            "schemaVersion": export.SCHEMA_VERSION,
            "outer": {v.label: sorted(outer_support(p, v)) for v in poset},
            "inner": {v.label: sorted(inner_support(p, v)) for v in poset},
        }
        out.write(export.dumps(data))
        return 0
    rows = [["context", "outer", "inner"]]
    for v in poset:
        rows.append([v.label, _fmt(outer_support(p, v)), _fmt(inner_support(p, v))])
    out.write(_table(rows))
    return 0


def cmd_eval(args, out) -> int:
    model = _load(args)
    poset = model.poset()
    prop = parse(args.prop)
    s = represent(prop, model.operators, poset)
    if args.json:
        out.write(export.dumps(export.subobject_json(s)))
        return 0
    out.write(f"proposition: {to_text(prop)}\n")
    rows = [["context", "subset"]] + [[v.label, _fmt(s[i])] for i, v in enumerate(poset)]
    out.write(_table(rows))
    return 0


def _truth_value(model: Model, text: str, state_name: str):
    poset = model.poset()
    prop = parse(text)
    state = model.state(state_name)
    if isinstance(prop, Primitive):
        value = truth_value_proposition(model.operator(prop.name), prop.delta, state, poset)
    else:
        names(prop)  # resolve every name before building anything
        value = membership_valuation(represent(prop, model.operators, poset), truth_object(state, poset))
    return prop, value


def cmd_truth(args, out) -> int:
    model = _load(args)
    prop, value = _truth_value(model, args.prop, args.state)
    if args.json:
        out.write(export.dumps(export.omega_json(value)))
        return 0
    out.write(f"proposition: {to_text(prop)}\nstate: {args.state}\n")
    rows = [["context", "total", "sieve"]]
    for i, v in enumerate(value.poset):
        s = value[i]
        rows.append([v.label, "yes" if s.is_total() else "no", str(s)])
    out.write(_table(rows))
    return 0


def cmd_sections(args, out) -> int:
    model = _load(args)
    poset = model.poset()
    found = global_sections(spectral_presheaf(poset), cap=args.cap)
    out.write(f"global sections: {len(found)}\n")
    if args.list:
        for n, s in enumerate(found, start=1):
            picks = ", ".join(f"{poset.label(i)}={x.index}" for i, x in enumerate(s.elements))
            out.write(f"  {n}: {picks}\n")
    return 0


def cmd_verify(args, out) -> int:
    model = _load(args)
    checks = run_suite(model)
    out.write(f"model: {model.name}\n")
    out.write(format_report(checks))
    return 2 if any(c.ok is False for c in checks) else 0


def cmd_export(args, out) -> int:
    model = _load(args)
    poset = model.poset()
    if args.state and not args.prop:
        raise InvariantError("--state needs --prop")
    value = s = None
    if args.prop and args.state:
        _, value = _truth_value(model, args.prop, args.state)
    elif args.prop:
        s = represent(parse(args.prop), model.operators, poset)
    if args.dot:
        highlight = None
        if value is not None:
            top = poset.index(args.stage) if args.stage else poset.maximal()[0]
            highlight = value[top]
        out.write(export.to_dot(poset, highlight=highlight, title=model.name))
    elif value is not None:
        out.write(export.dumps(export.omega_json(value)))
    elif s is not None:
        out.write(export.dumps(export.subobject_json(s)))
    else:
        out.write(export.dumps(export.poset_json(poset)))
    return 0


def cmd_classical(args, out) -> int:
    model = _load(args)
    if model.classical is None:
        raise InvariantError(f"model {model.name!r} has no classical block")
    value = classical_truth(model.classical, args.quantity, BorelSet.parse(args.set), state=args.state)
    out.write(f"{value}\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="daseinizer", description="Daseinisation and truth values over finite context posets.")
    parser.add_argument("--eps", type=float, default=None, help="numeric tolerance (overrides DASEINIZER_EPS)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def command(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("model", help="model file, or the name of a bundled model")
        p.set_defaults(func=func)
        return p

    p = command("poset", cmd_poset, "generate and print the context poset")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--dot", action="store_true")
    fmt.add_argument("--json", action="store_true")

    p = command("daseinise", cmd_daseinise, "outer and inner daseinisation of a projector")
    p.add_argument("--op", required=True, help="operator name (a projector unless --set is given)")
    p.add_argument("--set", help="interval set: daseinise the spectral projector E[op in set]")
    p.add_argument("--json", action="store_true")

    p = command("eval", cmd_eval, "represent a proposition as a clopen sub-object")
    p.add_argument("--prop", required=True)
    p.add_argument("--json", action="store_true")

    p = command("truth", cmd_truth, "truth value of a proposition in a state")
    p.add_argument("--prop", required=True)
    p.add_argument("--state", required=True)
    p.add_argument("--json", action="store_true")

    p = command("sections", cmd_sections, "count global sections of the spectral presheaf")
    p.add_argument("--list", action="store_true", help="also print every section")
    p.add_argument("--cap", type=int, default=DEFAULT_SEARCH_CAP, help="search node cap")

    command("verify", cmd_verify, "run the invariant suite")

    p = command("export", cmd_export, "export the poset, a sub-object or a truth value")
    fmt = p.add_mutually_exclusive_group(required=True)
    fmt.add_argument("--dot", action="store_true")
    fmt.add_argument("--json", action="store_true")
    p.add_argument("--prop")
    p.add_argument("--state")
    p.add_argument("--stage", help="context whose sieve is highlighted in DOT output (default: first maximal)")

    p = command("classical", cmd_classical, "classical truth value in a model's classical block")
    p.add_argument("--quantity", required=True)
    p.add_argument("--set", required=True)
    p.add_argument("--state", required=True)
    return parser


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    eps = get_eps()
    try:
        return args.func(args, out)
    except DaseinizerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    finally:
        set_eps(eps)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
