"""The ``ittm`` command.

Exit codes: 0 success or a positive answer, 1 a negative answer, 64 usage,
65 malformed input data, 70 internal error.  ``wo check`` separates its two
negative answers: 1 for not linear, 2 for ill-founded.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

EX_OK, EX_NEG, EX_USAGE, EX_DATA, EX_SOFTWARE = 0, 1, 64, 65, 70


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _emit(args, text: str, payload: dict):
    if args.format == "json":
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


def _trace(args, msg: str):
    if getattr(args, "trace", False):
        print(msg, file=sys.stderr)


def _burst_default() -> int:
    raw = os.environ.get("ITTM_BURST_DEFAULT")
    if raw is None:
        return 10_000
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"ITTM_BURST_DEFAULT must be a positive integer, got {raw!r}")
    if value < 1:
        raise UsageError("ITTM_BURST_DEFAULT must be a positive integer")
    return value


def _arg(parse, text: str, what: str, *extra):
    """Parse a command-line value; a bad value is a usage error, not bad data."""
    try:
        return parse(text, *extra)
    except ValueError as exc:
        raise UsageError(f"bad {what} {text!r}: {exc}") from None


def _program(path: str):
    from .vm import load_program, shipped_program
    if Path(path).is_file():
        return load_program(path)
    return shipped_program(Path(path).name)


def _load_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


# -- subcommands ------------------------------------------------------------------

def cmd_run(args) -> int:
    from .ordinal import format_ordinal, parse_ordinal
    from .seqreal import format_seqreal, parse_seqreal
    from .vm import BudgetExceeded, Halted, LimitUnresolved, NoOutput, format_certificate, run
    p = _program(args.program)
    x = _arg(parse_seqreal, args.input, "--input")
    budget = _arg(parse_ordinal, args.budget, "--budget")
    burst = args.burst if args.burst is not None else _burst_default()
    hook = None
    if args.trace:
        hook = lambda stage, c: print(f"stage {format_ordinal(stage)} {c}", file=sys.stderr)
    out = run(p, x, budget, burst, accelerate=not args.no_accelerate, trace=hook)
    stage = format_ordinal(out.stage)
    if isinstance(out, Halted):
        if args.emit_cert:
            Path(args.emit_cert).write_text(format_certificate(out.certificate))
        _emit(args, f"halted stage={stage} output={format_seqreal(out.output)}",
              {"outcome": "halted", "stage": stage, "output": format_seqreal(out.output)})
        return EX_OK
    if isinstance(out, NoOutput):
        _emit(args, f"no-output stage={stage}", {"outcome": "no-output", "stage": stage})
    elif isinstance(out, BudgetExceeded):
        _emit(args, f"budget-exceeded stage={stage}", {"outcome": "budget-exceeded", "stage": stage})
    elif isinstance(out, LimitUnresolved):
        _emit(args, f"limit-unresolved stage={stage} reason={out.reason}",
              {"outcome": "limit-unresolved", "stage": stage, "reason": out.reason})
    return EX_NEG


def cmd_cert(args) -> int:
    from .seqreal import parse_seqreal
    from .vm import parse_certificate, validate_certificate
    p = _program(args.program)
    cert = parse_certificate(Path(args.certificate).read_text())
    v = validate_certificate(p, _arg(parse_seqreal, args.input, "--input"), cert)
    if v.accepted:
        _emit(args, "accepted", {"accepted": True})
        return EX_OK
    _emit(args, f"rejected clause={v.clause} index={v.index} reason={v.reason}",
          {"accepted": False, "clause": v.clause, "index": v.index, "reason": v.reason})
    return EX_NEG


def cmd_wo(args) -> int:
    from .ordinal import format_ordinal
    from .wellorder import IllFounded, NotLinear, decide_well_order, load_relation, vm_decide_well_order
    r = load_relation(args.file)
    if args.vm:
        verdict = vm_decide_well_order(r)
        if not isinstance(verdict, bool):
            raise RuntimeError(f"the machine did not halt: {verdict}")
        _emit(args, "well-order" if verdict else "not-well-order", {"well_order": verdict})
        return EX_OK if verdict else EX_NEG
    d = decide_well_order(r)
    if isinstance(d, NotLinear):
        kind, *elems = d.violation
        _emit(args, f"not-linear {kind} " + " ".join(map(str, elems)),
              {"decision": "not-linear", "violation": kind, "elements": elems})
        return 1
    if isinstance(d, IllFounded):
        _emit(args, "ill-founded cycle " + " ".join(map(str, d.cycle)),
              {"decision": "ill-founded", "cycle": list(d.cycle)})
        return 2
    ot = format_ordinal(d.order_type)
    _emit(args, f"well-order order-type={ot}", {"decision": "well-order", "order_type": ot})
    return EX_OK


def cmd_hc(args) -> int:
    from .hsets import collapse, hc_elem, hc_equiv, hf_literal, load_code
    x = load_code(args.files[0])
    if args.op == "collapse":
        if len(args.files) != 1:
            raise UsageError("hc collapse takes one file")
        v = hf_literal(collapse(x))
        _emit(args, v, {"value": v})
        return EX_OK
    if len(args.files) != 2:
        raise UsageError(f"hc {args.op} takes two files")
    y = load_code(args.files[1])
    answer = hc_equiv(x, y) if args.op == "eq" else hc_elem(x, y)
    _emit(args, str(answer).lower(), {"answer": answer})
    return EX_OK if answer else EX_NEG


def cmd_real(args) -> int:
    from . import realline as R
    P, Q = _arg(R.parse_point, args.x, "point"), _arg(R.parse_point, args.y, "point")
    if args.op == "cmp":
        rel = R.compare_points(P, Q)
        _emit(args, rel, {"relation": rel})
        return EX_OK
    op = {"add": R.add_points, "sub": R.subtract_points, "mul": R.multiply_points, "div": R.divide_points}[args.op]
    out = op(P, Q)
    q = R.to_rational(out)
    _emit(args, str(out), {"presentation": str(out), "value": str(q)})
    _trace(args, f"value {q}")
    return EX_OK


def _assignment(pairs, S) -> dict:
    out = {}
    for item in pairs or []:
        var, _, idx = item.partition("=")
        if not var.startswith("v") or not var[1:].isdigit() or not idx.isdigit():
            raise UsageError(f"assignment must look like v0=2, got {item!r}")
        out[int(var[1:])] = S.domain[int(idx)]
    return out


def cmd_model(args) -> int:
    from .logic import parse_formula
    from .modelkit import load_structure, quotient_presentation, structure_to_json, tarski_eval, tarski_vaught_check
    from .logic import format_formula
    S = load_structure(args.file)
    if args.op == "eval":
        if not args.formula:
            raise UsageError("model eval needs a formula")
        phi = _arg(parse_formula, args.formula, "formula", S.language)
        value = tarski_eval(S, phi, _assignment(args.assign, S))
        _emit(args, str(value).lower(), {"value": value})
        return EX_OK if value else EX_NEG
    if args.op == "quotient":
        if not args.relation:
            raise UsageError("model quotient needs --relation")
        E = [(S.domain[a], S.domain[b]) for a, b in _load_json(args.relation)]
        Q = quotient_presentation(S, E)
        data = structure_to_json(Q)
        print(json.dumps(data, sort_keys=True) if args.format == "json" else json.dumps(data, indent=2, sort_keys=True))
        return EX_OK
    if args.subset is None:
        raise UsageError("model tv needs --subset")
    subset = [S.domain[int(i)] for i in args.subset.split(",") if i != ""]
    res = tarski_vaught_check(subset, S, args.depth)
    if res.holds:
        _emit(args, "elementary", {"holds": True})
        return EX_OK
    text = format_formula(res.formula)
    _emit(args, f"fails witness={text}", {"holds": False, "formula": text})
    return EX_NEG


def cmd_henkin(args) -> int:
    from .henkin import henkin_run, load_theory, make_oracle, term_model
    from .logic import format_formula
    from .modelkit import structure_to_json
    spec = load_theory(args.file)
    oracle = make_oracle(spec)
    state = henkin_run(oracle, args.steps)
    for c in state.commitments:
        _trace(args, f"{'' if c.index is None else c.index}\t{format_formula(c.formula)}")
    model = term_model(state, oracle)
    summary = {"steps": state.processed, "commitments": len(state.commitments),
               "representatives": list(model.structure.domain), "unsettled": list(model.unsettled),
               "incomplete": [[s, list(a)] for s, a in model.incomplete]}
    if args.emit_model:
        S = model.structure
        data = structure_to_json_names(S)
        data["classes"] = {r: list(cl) for r, cl in model.classes.items()}
        Path(args.emit_model).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    _emit(args, f"steps={state.processed} commitments={len(state.commitments)} "
                f"classes={len(model.structure.domain)} representatives={','.join(model.structure.domain)} "
                f"unsettled={len(model.unsettled)}",
          summary)
    return EX_OK


def structure_to_json_names(S) -> dict:
    """Structure tables keyed by element names rather than positions."""
    lang = {str(c): {"name": s.name, "kind": s.kind, "arity": s.arity} for c, s in S.language.symbols.items()}
    return {
        "language": lang,
        "domain": list(S.domain),
        "constants": dict(S.constants),
        "functions": {k: sorted([list(a), v] for a, v in t.items()) for k, t in S.functions.items()},
        "relations": {k: sorted(list(t) for t in rel) for k, rel in S.relations.items()},
    }


def cmd_csb(args) -> int:
    from .effmaps import bijection_to_json, csb_bijection, load_instance, myhill_permutation
    inst = load_instance(args.file)
    if args.command == "csb":
        h = csb_bijection(inst.A, inst.B, inst.f, inst.g)
    else:
        if inst.universe is None:
            raise ValueError("a myhill instance needs a universe")
        h = myhill_permutation(inst.A, inst.B, inst.f, inst.g, inst.universe)
    data = bijection_to_json(h)
    if args.format == "json":
        print(json.dumps(data, sort_keys=True))
    else:
        for x, y in data["forward"]:
            print(f"{x} -> {y}")
    return EX_OK


# -- dispatch -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--trace", action="store_true", help="human-readable trace on standard error")

    top = _Parser(prog="ittm", description="Infinite time Turing machines and effective model theory.")
    sub = top.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", parents=[common], help="run a program")
    p.add_argument("program")
    p.add_argument("--input", default="fs:{}")
    p.add_argument("--budget", required=True)
    p.add_argument("--burst", type=int)
    p.add_argument("--emit-cert")
    p.add_argument("--no-accelerate", action="store_true")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("cert", parents=[common], help="validate a run certificate")
    p.add_argument("program")
    p.add_argument("certificate")
    p.add_argument("--input", default="fs:{}")
    p.set_defaults(func=cmd_cert)

    p = sub.add_parser("wo", parents=[common], help="decide well-orderedness")
    p.add_argument("op", choices=("check",))
    p.add_argument("file")
    p.add_argument("--vm", action="store_true", help="use the shipped machine instead of the native decider")
    p.set_defaults(func=cmd_wo)

    p = sub.add_parser("hc", parents=[common], help="hereditarily countable set codes")
    p.add_argument("op", choices=("eq", "mem", "collapse"))
    p.add_argument("files", nargs="+")
    p.set_defaults(func=cmd_hc)

    p = sub.add_parser("real", parents=[common], help="arithmetic on real presentations")
    p.add_argument("op", choices=("add", "sub", "mul", "div", "cmp"))
    p.add_argument("x")
    p.add_argument("y")
    p.set_defaults(func=cmd_real)

    p = sub.add_parser("model", parents=[common], help="finite structures")
    p.add_argument("op", choices=("eval", "quotient", "tv"))
    p.add_argument("file")
    p.add_argument("formula", nargs="?")
    p.add_argument("--assign", action="append", help="variable binding such as v0=2 (domain position)")
    p.add_argument("--relation", help="JSON file of index pairs for quotient")
    p.add_argument("--subset", help="comma-separated domain positions for tv")
    p.add_argument("--depth", type=int, default=1)
    p.set_defaults(func=cmd_model)

    p = sub.add_parser("henkin", parents=[common], help="Henkin completion and term model")
    p.add_argument("op", choices=("build",))
    p.add_argument("file")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--emit-model")
    p.set_defaults(func=cmd_henkin)

    for name in ("csb", "myhill"):
        p = sub.add_parser(name, parents=[common], help=f"{name} bijection for an instance file")
        p.add_argument("file")
        p.set_defaults(func=cmd_csb)
    return top


def main(argv=None) -> int:
    from .effmaps import HypothesisError
    from .henkin import ConsistencyUnknown
    from .logic import FormulaError
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "steps", 1) is not None and getattr(args, "steps", 1) < 1:
            raise UsageError("--steps must be at least 1")
        if getattr(args, "burst", None) is not None and args.burst < 1:
            raise UsageError("--burst must be at least 1")
        return args.func(args)
    except UsageError as exc:
        print(f"ittm: usage error: {exc}", file=sys.stderr)
        return EX_USAGE
    except ConsistencyUnknown as exc:
        print(f"ittm: {exc}", file=sys.stderr)
        return EX_NEG
    except (OSError, ValueError, KeyError, ArithmeticError, FormulaError, HypothesisError) as exc:
        print(f"ittm: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EX_DATA
    except Exception as exc:  # noqa: BLE001
        print(f"ittm: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EX_SOFTWARE


if __name__ == "__main__":
    sys.exit(main())
