"""Command-line front end. Every report is JSON tagged ``"schema": "cupform/1"``.

Exit status: 0 on success, 1 on a domain error (structured error JSON on
stdout), 2 on malformed input or usage.
"""

import argparse
import json
import os
import sys
from pathlib import Path

from cupform import analysis, fixtures, geometry, schemas, tensor
from cupform.errors import CupformError, NotCertified, SchemaError, ShapeError
from cupform.exactpoly import (
    format_rational,
    form_from_json,
    form_to_json,
    parse_rational,
    point_from_json,
    point_to_json,
)


def _read_doc(arg, what):
    """Inline JSON if it looks like JSON, ``-`` for stdin, otherwise a path."""
    try:
        if arg == "-":
            text = sys.stdin.read()
        elif arg.lstrip()[:1] in "{[":
            text = arg
        else:
            text = Path(arg).read_text()
        return json.loads(text)
    except OSError as exc:
        raise SchemaError(f"{what}: cannot read {arg!r}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{what}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def _load(arg, schema, what, build):
    if arg is None:
        raise SchemaError(f"--{what} is required for this command")
    doc = _read_doc(arg, what)
    schemas.validate(doc, schema, what)
    try:
        return build(doc)
    except (TypeError, ZeroDivisionError) as exc:
        raise SchemaError(f"{what}: {exc}") from None
    except ValueError as exc:
        if isinstance(exc, CupformError):
            raise
        raise SchemaError(f"{what}: {exc}") from None


def _form(args):
    return _load(args.form, schemas.FORM, "form", form_from_json)


def _phi(args):
    return _load(args.phi, schemas.PHI, "phi", geometry.IntersectionData.from_json)


def _tensor(args):
    def build(doc):
        try:
            return tensor.tensor_from_json(doc)
        except ValueError as exc:
            if isinstance(exc, CupformError):
                raise
            raise ShapeError(str(exc)) from None

    return _load(args.tensor, schemas.TENSOR, "tensor", build)


def _point(args, required=True):
    if args.point is None and not required:
        return None
    return _load(args.point, schemas.POINT, "point", point_from_json)


# --- commands; each returns the "result" object ---


def cmd_hessian(args):
    F = _form(args)
    if args.symbolic or args.point is None:
        H = analysis.hessian_symbolic(F)
        return {"mode": "symbolic", "hessian": analysis.symbolic_to_json(H),
                "text": [[str(x) for x in row] for row in H] if H.ndim == 2 else None}
    p = _point(args)
    return {"mode": "at_point", "point": point_to_json(p), "hessian": tensor.tensor_to_json(analysis.hessian_at(F, p))}


def cmd_honest(args):
    return analysis.honest(_form(args)).to_json()


def cmd_nondegenerate(args):
    return analysis.nondegenerate(_form(args)).to_json()


def cmd_rank_at(args):
    F, p = _form(args), _point(args)
    rb = tensor.rank_bounds(analysis.hessian_at(F, p))
    doc = rb.to_json()
    exact = rb.upper is not None and rb.lower == rb.upper
    doc["rank"] = rb.lower if exact else None
    doc["heuristic"] = rb.caller_certified
    return doc


def cmd_wf_member(args):
    F, p = _form(args), _point(args)
    wp = analysis.is_wf_member(F, p)
    return {
        "member": wp is not None,
        "point": point_to_json(p),
        "certificate": wp.to_json() if wp else None,
        "minor_check": analysis.rank_one_by_minors(F, p),
    }


def cmd_wf_search(args):
    F = _form(args)
    res = analysis.wf_search(F, seed=args.seed, starts=args.starts, rat_depth=args.rat_depth)
    return res.to_json()


def cmd_normal_form(args):
    F, p = _form(args), _point(args)
    wp = analysis.is_wf_member(F, p)
    if wp is None:
        raise NotCertified("point is not a certified member of W_F")
    return analysis.normal_form_at(F, wp, refine=not args.no_refine).to_json()


def cmd_peel(args):
    return {"points": [w.to_json() for w in analysis.peel(_form(args))]}


def cmd_build_form(args):
    F = geometry.form_from_intersection(_phi(args))
    return {"form": form_to_json(F), "text": str(F)}


def cmd_intersection_of(args):
    return {"phi": geometry.intersection_from_form(_form(args)).to_json()}


def cmd_blowup(args):
    F = _form(args)
    spec = _load(args.spec, schemas.BLOWUP, "spec", geometry.BlowupSpec.from_json)
    if args.override_a is not None:
        spec.a = _rational(args.override_a)
    G = geometry.blowup_form(F, spec)
    return {"form": form_to_json(G), "text": str(G), "spec": spec.to_json()}


def _rational(text):
    try:
        return parse_rational(text)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"not an exact rational: {text!r} ({exc})") from None


def cmd_blowup_point(args):
    F = _form(args)
    a = _rational(args.override_a) if args.override_a is not None else None
    G = geometry.blowup_point(F, a=a)
    used = a if a is not None else geometry.default_point_self_intersection(F.degree)
    return {"form": form_to_json(G), "text": str(G), "a": format_rational(used), "a_default": a is None}


def cmd_exceptional_rank(args):
    F = _form(args)
    p = _point(args, required=False)
    rep = geometry.exceptional_rank_report(F, p, k=args.k, q=args.q, seed=args.seed)
    return rep.to_json()


def cmd_candidates(args):
    if args.phi is not None:
        src = _phi(args)
    else:
        src = _form(args)
    cs = geometry.candidate_exceptionals(src, seed=args.seed, starts=args.starts, rat_depth=args.rat_depth)
    return cs.to_json()


def cmd_tensor_rank(args):
    T = _tensor(args)
    doc = tensor.rank_bounds(T).to_json()
    doc["heuristic"] = doc["upper"] != doc["lower"]
    return doc


def cmd_hyperdet(args):
    if args.tensor is not None:
        T = _tensor(args)
        return {"value": format_rational(tensor.cayley_hyperdet_222(T)), "symbolic": False}
    F = _form(args)
    H = analysis.hessian_symbolic(F)
    if H.shape != (2, 2, 2):
        raise ShapeError(f"Cayley hyperdeterminant needs a 2x2x2 hypermatrix, H_F is {'x'.join(map(str, H.shape))}")
    D = tensor.cayley_hyperdet_222(H)
    return {"value": str(D), "form": form_to_json(D), "identically_zero": D.is_zero(), "symbolic": True}


def cmd_paper_examples(args):
    examples = fixtures.paper_examples()
    if args.name:
        if args.name not in examples:
            raise SchemaError(f"unknown example {args.name!r}; known: {', '.join(sorted(examples))}")
        return {"examples": {args.name: examples[args.name]}}
    return {"examples": examples}


COMMANDS = {
    "hessian": (cmd_hessian, "derivative hypermatrix H_F, symbolic or at --point"),
    "honest": (cmd_honest, "is H_F(v) nonzero for every v"),
    "nondegenerate": (cmd_nondegenerate, "does the hyperdeterminant of H_F vanish identically"),
    "rank-at": (cmd_rank_at, "rank bounds of H_F(p)"),
    "wf-member": (cmd_wf_member, "certified test of rank H_F(p) = 1"),
    "wf-search": (cmd_wf_search, "locate and certify rank-one points"),
    "normal-form": (cmd_normal_form, "coordinates putting a rank-one point in normal form"),
    "peel": (cmd_peel, "exact rational rank-one points with F(p) != 0"),
    "build-form": (cmd_build_form, "form from intersection data"),
    "intersection-of": (cmd_intersection_of, "intersection data from a form"),
    "blowup": (cmd_blowup, "blow-up form from --spec"),
    "blowup-point": (cmd_blowup_point, "blow-up of a point"),
    "exceptional-rank": (cmd_exceptional_rank, "rank of H_F at the exceptional class"),
    "candidates": (cmd_candidates, "candidate exceptional classes"),
    "tensor-rank": (cmd_tensor_rank, "rank bounds of an explicit tensor"),
    "hyperdet": (cmd_hyperdet, "Cayley 2x2x2 hyperdeterminant"),
    "paper-examples": (cmd_paper_examples, "print the shipped worked inputs"),
}


def _env_seed():
    raw = os.environ.get("CUPFORM_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        return 0


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--form", help="form JSON (file, inline or -)")
    common.add_argument("--phi", help="intersection data JSON")
    common.add_argument("--tensor", help="tensor JSON")
    common.add_argument("--point", help="point JSON, e.g. '[1, 0, \"1/2\"]'")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--starts", type=int, default=24)
    common.add_argument("--rat-depth", type=int, default=10**6)
    common.add_argument("--summary", action="store_true", help="one-line summary on stderr")

    parser = _Parser(prog="cupform", description="Exact analysis of intersection forms.")
    parser.add_argument("--paper-examples", action="store_true", help="same as the paper-examples command")
    sub = parser.add_subparsers(dest="command")
    for name, (_, helptext) in COMMANDS.items():
        sp = sub.add_parser(name, parents=[common], help=helptext)
        if name == "hessian":
            sp.add_argument("--symbolic", action="store_true")
        if name == "normal-form":
            sp.add_argument("--no-refine", action="store_true")
        if name in ("blowup", "blowup-point"):
            sp.add_argument("--override-a", help="exact rational a = E^n")
        if name == "blowup":
            sp.add_argument("--spec", help="BlowupSpec JSON")
        if name == "exceptional-rank":
            sp.add_argument("--k", type=int, choices=(0, 1, 2), required=True)
            sp.add_argument("--q", type=int, default=None)
        if name == "paper-examples":
            sp.add_argument("name", nargs="?")
    return parser


def _summary(command, result):
    for key in ("honest", "status", "member", "complete", "rank", "rank_lower", "lower", "value"):
        if key in result:
            return f"{command}: {key}={result[key]}"
    return f"{command}: ok"


def _emit(doc, out, stream):
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        stream.write(text)


def run(argv=None, stdout=None, stderr=None):
    """Run one command; returns the exit status."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    out = None
    try:
        args = parser.parse_args(argv)
        if args.paper_examples and args.command is None:
            args = parser.parse_args(["paper-examples"])
        if args.command is None:
            raise _UsageError("a command is required")
        out = args.out
        if args.seed is None:
            args.seed = _env_seed()
        func = COMMANDS[args.command][0]
        result = func(args)
        doc = {"schema": schemas.SCHEMA_TAG, "command": args.command, "result": result}
        schemas.validate(doc, schemas.report_schema(args.command), "report")
        _emit(doc, out, stdout)
        if getattr(args, "summary", False):
            stderr.write(_summary(args.command, result) + "\n")
        return 0
    except _UsageError as exc:
        _emit({"schema": schemas.SCHEMA_TAG, "error": {"code": "USAGE", "message": str(exc)}}, None, stdout)
        return 2
    except SchemaError as exc:
        _emit({"schema": schemas.SCHEMA_TAG, "error": {"code": exc.code, "message": str(exc)}}, None, stdout)
        return 2
    except CupformError as exc:
        _emit({"schema": schemas.SCHEMA_TAG, "error": {"code": exc.code, "message": str(exc)}}, out, stdout)
        return 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
