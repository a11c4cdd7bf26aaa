"""Command-line front end: `feynmat <command> INPUT [options]`.

INPUT is a graph document (JSON), a matrix literal, or the name of a bundled
fixture such as `dunce_cap`. Exit status: 0 on success, 1 on invalid input,
2 when an internal consistency check fails.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from .errors import DomainError, FeynmatError, IntegrityError, SchemaError
from .fixtures import fixture_dir
from .graph import FeynGraph, Momentum, cycle_matroid, incidence_matrix
from .integrand import momentum_space, parametric, to_document, to_text
from .linalg import FIELDS, ExactMatrix, cast_to_field, format_matrix, is_totally_unimodular, parse_matrix
from .matroid import (CircuitSystem, RepresentedMatroid, circuits_of, coloops, dual, format_matroid,
                      is_regular_by_binary_test, standardize)
from .reduce import DotPair, reduce_graph, reduce_matrix, scalarize
from .symanzik import (DotTable, phi_second, psi_base_expansion, psi_block_det,
                       psi_circuit_gram)

COMMANDS = ("circuits", "dual", "check", "symanzik", "reduce", "integrand")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="feynmat", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("input", help="graph JSON, matrix literal, or fixture name")
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--field", choices=FIELDS, default="Q",
                       help="field for the representation (default Q)")
        p.add_argument("--legs", default="",
                       help="comma-separated external columns of a matrix input")
        return p

    add("circuits", "list the circuits")
    add("dual", "print the dual representation")
    add("check", "1PI, total unimodularity and regularity verdicts")
    p = add("symanzik", "first or second Symanzik polynomial")
    which = p.add_mutually_exclusive_group()
    which.add_argument("--first", dest="which", action="store_const", const="first")
    which.add_argument("--second", dest="which", action="store_const", const="second")
    p.add_argument("--method", choices=("bases", "block", "gram"), default="bases")
    p.set_defaults(which="first")
    for name, text in (("reduce", "coextend dot pairs and scalarize"),
                       ("integrand", "momentum-space and parametric integrands")):
        p = add(name, text)
        p.add_argument("--pairs", default="",
                       help="dot pairs e1:e2[=name], comma separated")
        p.add_argument("--flip", default="",
                       help="pairs e1:e2 whose free sign is flipped, comma separated")
    return parser


def _load(source: str, field: str) -> FeynGraph | ExactMatrix:
    path = Path(source)
    if not path.exists():
        for suffix in (".json", ".txt"):
            candidate = fixture_dir() / f"{source}{suffix}"
            if candidate.is_file():
                path = candidate
                break
        else:
            raise SchemaError(f"{source}: no such file or fixture")
    text = path.read_text()
    if path.suffix == ".json" or text.lstrip().startswith("{"):
        try:
            return FeynGraph.from_json(text)
        except SchemaError as exc:
            raise SchemaError(f"{path}: {exc}") from None
    try:
        return parse_matrix(text, field)
    except FeynmatError as exc:
        raise SchemaError(f"{path}: {exc}") from None


def _split(text: str) -> list[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


def _matroid(obj, field: str, legs: Sequence[str] = ()) -> RepresentedMatroid:
    if isinstance(obj, FeynGraph):
        m = cycle_matroid(obj).matrix
        if field != "Q":
            m = cast_to_field(m, 2 if field == "GF2" else 3)
        return RepresentedMatroid.from_matrix(m)
    m = obj.drop([obj.index(x) for x in legs]) if legs else obj
    return RepresentedMatroid.from_matrix(m)


def _emit(args, text: str, doc) -> str:
    if args.format == "json":
        return json.dumps(doc, indent=2) + "\n"
    return text


def _circuits(args, obj) -> str:
    m = _matroid(obj, args.field, _split(args.legs))
    cs = circuits_of(m).ordered()
    text = "".join("{" + ", ".join(c) + "}\n" for c in cs)
    return _emit(args, text, {"ground": list(m.ground), "circuits": [list(c) for c in cs]})


def _matrix_doc(m: ExactMatrix) -> dict:
    return {"field": m.field, "labels": list(m.labels),
            "rows": [[str(x) for x in r] for r in m.rows]}


def _dual(args, obj) -> str:
    d = dual(standardize(_matroid(obj, args.field, _split(args.legs))))
    return _emit(args, format_matroid(d), _matrix_doc(d.matrix))


def _check(args, obj) -> str:
    m = _matroid(obj, args.field, _split(args.legs))
    raw = incidence_matrix(obj) if isinstance(obj, FeynGraph) else m.matrix
    verdicts = {"rank": m.rank, "loops": m.nullity, "1PI": not coloops(m), "coloops": coloops(m)}
    if raw.field == "Q" and raw.is_signed_unit():
        tu = is_totally_unimodular(raw)
        verdicts["totally_unimodular"] = tu.ok
        if not tu.ok:
            verdicts["tu_witness"] = {"rows": list(tu.rows), "columns": list(tu.columns),
                                      "value": str(tu.value)}
        verdicts["regular"] = is_regular_by_binary_test(m)
    else:
        verdicts["totally_unimodular"] = None
        verdicts["regular"] = None
    lines = []
    for k, v in verdicts.items():
        if isinstance(v, bool):
            v = "true" if v else "false"
        elif v is None:
            v = "n/a"
        elif isinstance(v, list):
            v = " ".join(v) or "-"
        elif isinstance(v, dict):
            v = f"rows {v['rows']} columns {v['columns']} det {v['value']}"
        lines.append(f"{k}: {v}")
    return _emit(args, "\n".join(lines) + "\n", verdicts)


def _poly_out(args, p, order=None, extra=None) -> str:
    doc = {"terms": p.to_json(order)}
    if extra:
        doc.update(extra)
    text = "\n".join(p.to_lines(order)) + "\n" if p else "0\n"
    return _emit(args, text, doc)


def _symanzik(args, obj) -> str:
    legs = _split(args.legs)
    if args.which == "first":
        m = _matroid(obj, args.field, legs)
        fn = {"bases": psi_base_expansion, "block": psi_block_det, "gram": psi_circuit_gram}
        return _poly_out(args, fn[args.method](m), list(m.ground))
    if isinstance(obj, FeynGraph):
        dots = DotTable.for_graph(obj)
        p = phi_second(obj, dots)
        order = list(obj.edge_ids)
    else:
        dots = DotTable(tuple(legs))
        p = phi_second(obj, dots, legs=legs)
        order = [x for x in obj.labels if x not in legs]
    return _poly_out(args, p, order, {"dots": dots.meaning()})


def _pairs(args) -> list[DotPair]:
    flips = {frozenset(x.split(":")) for x in _split(args.flip)}
    pairs = [DotPair.parse(x) for x in _split(args.pairs)]
    out = [DotPair(p.first, p.second, p.label, p.key in flips) for p in pairs]
    unused = flips - {p.key for p in out}
    if unused:
        raise DomainError(f"--flip names pairs not in --pairs: {sorted(map(sorted, unused))}")
    return out


def _frac(x) -> str:
    return str(x)


def _combo(pair, alpha, beta) -> str:
    return str(Momentum(((f"k_{pair[0]}", alpha), (f"k_{pair[1]}", beta))))


def _reduce_matrix(args, m: ExactMatrix) -> str:
    pairs = _pairs(args)
    out, steps = reduce_matrix(m, pairs)
    circuits = circuits_of(out).ordered()
    doc = {"pairs": [str(p) for p in pairs], "matrix": _matrix_doc(out),
           "new_elements": [{"label": x.label, "pair": list(x.pair), "alpha": _frac(x.alpha),
                             "beta": _frac(x.beta), "case": x.case} for x in steps],
           "circuits": [list(c) for c in circuits]}
    lines = [f"pairs: {' '.join(doc['pairs']) or '-'}", "matrix:"]
    lines += ["  " + ln for ln in format_matrix(out).splitlines()]
    lines.append("new elements:")
    lines += [f"  k_{x.label} = {_combo(x.pair, x.alpha, x.beta)}  (case {x.case})" for x in steps]
    lines.append("circuits:")
    lines += ["  {" + ", ".join(c) + "}" for c in circuits]
    return _emit(args, "\n".join(lines) + "\n", doc)


def _reduce(args, obj) -> str:
    if isinstance(obj, ExactMatrix):
        return _reduce_matrix(args, obj)
    g = obj
    pairs = _pairs(args)
    rf = reduce_graph(g, pairs, include_legs=bool(g.externals))
    terms = scalarize(g, pairs, include_legs=bool(g.externals))
    ground = tuple(g.edge_ids) + rf.new_labels
    circuits = CircuitSystem(ground, circuits_of(rf.matrix).circuits).ordered()
    doc = {
        "graph": g.name or None,
        "pairs": [str(p) for p in pairs],
        "discarded": [{"pair": list(d.pair), "witness": d.witness,
                       "alpha": _frac(d.alpha), "beta": _frac(d.beta)} for d in rf.discarded],
        "matrix": _matrix_doc(rf.full_matrix()),
        "graph_rank": rf.graph_rank,
        "new_elements": [{"label": x.label, "momentum": str(x.momentum), "pair": list(x.pair),
                          "alpha": _frac(x.alpha), "beta": _frac(x.beta), "case": x.case}
                         for x in rf.new_elements],
        "circuits": [list(c) for c in circuits],
        "scalar_terms": [{"coefficient": _frac(t.coefficient),
                          "shifts": {e: s for e, s in t.power_shift},
                          "mass_factor": str(t.mass_factor)} for t in terms],
        "notes": list(rf.notes),
    }
    lines = [f"graph: {g.name or '-'}", f"pairs: {' '.join(doc['pairs']) or '-'}", "discarded:"]
    for d in rf.discarded:
        lines.append(f"  {d.pair[0]}:{d.pair[1]} -> {d.witness} "
                     f"(k_{d.witness} = {_combo(d.pair, d.alpha, d.beta)})")
    lines.append("matrix:")
    lines += ["  " + ln for ln in format_matrix(rf.full_matrix()).splitlines()]
    lines.append("new elements:")
    for x in rf.new_elements:
        lines.append(f"  k_{x.label} = {_combo(x.pair, x.alpha, x.beta)} = {x.momentum}"
                     f"  (case {x.case})")
    lines.append("circuits:")
    lines += ["  {" + ", ".join(c) + "}" for c in circuits]
    lines.append("scalar terms:")
    for t in terms:
        shifts = ", ".join(f"{e}:{s}" for e, s in t.power_shift) or "-"
        mass = "" if t.mass_factor == 1 else f" * {t.mass_factor}"
        lines.append(f"  {t.coefficient}{mass}  shifts {{{shifts}}}")
    for note in rf.notes:
        lines.append(f"note: {note}")
    return _emit(args, "\n".join(lines) + "\n", doc)


def _integrand(args, obj) -> str:
    if isinstance(obj, ExactMatrix):
        legs = _split(args.legs)
        ms, par = momentum_space(obj, legs=legs), parametric(obj, legs=legs)
    else:
        rf = reduce_graph(obj, _pairs(args), include_legs=True)
        ms, par = momentum_space(rf), parametric(rf)
    if args.format == "json":
        return json.dumps(to_document(ms, par), indent=2) + "\n"
    return to_text(ms, par)


HANDLERS = {"circuits": _circuits, "dual": _dual, "check": _check, "symanzik": _symanzik,
            "reduce": _reduce, "integrand": _integrand}


def run(argv: Sequence[str] | None = None) -> tuple[int, str, str]:
    """Execute one job; returns (exit status, stdout text, stderr text)."""
    args = build_parser().parse_args(argv)
    try:
        obj = _load(args.input, args.field)
        return 0, HANDLERS[args.command](args, obj), ""
    except IntegrityError as exc:
        return 2, "", f"feynmat {args.command}: integrity error: {exc}\n"
    except (FeynmatError, KeyError) as exc:
        return 1, "", f"feynmat {args.command}: {exc}\n"


def main(argv: Sequence[str] | None = None) -> int:
    try:
        status, out, err = run(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    sys.stdout.write(out)
    sys.stderr.write(err)
    return status


if __name__ == "__main__":
    sys.exit(main())
