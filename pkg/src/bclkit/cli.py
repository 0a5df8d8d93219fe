"""Command-line front end.

Subcommands: parse, check, conditions, decide, count, filtrate, verify.
Exit codes: 0 = true/valid/verified, 1 = false/countermodel/rejected,
2 = usage or input error.  ``--json`` switches to machine-readable output.
"""

from __future__ import annotations

import argparse
import json
import sys

from .conditions import (
    ConditionError, ConditionSet, admissible, parse_conditions,
)
from .decision import (
    BudgetError, SearchConfig, count_admissible, decide, demodal_complete,
    filtrate, filtration_classes,
)
from .proofs import ProofError, proof_from_json, verify
from .registry import logic
from .semantics import (
    BoundedValid, Countermodel, ModelError, Valid, evaluate, holds_in_model,
    model_from_json, model_to_json,
)
from .syntax import (
    And, Arrow, Box, ClosureSet, Diamond, Formula, Neg, Or, ParseError, Var,
    parse, to_text,
)

_USAGE_ERRORS = (ParseError, ModelError, ConditionError, ProofError,
                 BudgetError, json.JSONDecodeError, OSError, ValueError)


def _emit(payload, as_json: bool, text: str):
    if as_json:
        print(json.dumps(payload, sort_keys=True, indent=2))
    else:
        print(text)


def _load_json(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _conds_from_args(args) -> ConditionSet:
    if getattr(args, "logic", None):
        return logic(args.logic).conditions
    if getattr(args, "conds", None):
        return parse_conditions(args.conds)
    raise ConditionError("give either --logic NAME or --conds FLAGS")


def _ast_dict(f: Formula):
    if isinstance(f, Var):
        return {"op": "var", "name": f.name}
    if isinstance(f, (Neg, Box, Diamond)):
        return {"op": {"~": "not", "[]": "box", "<>": "diamond"}[f.op],
                "child": _ast_dict(f.child)}
    op = {"&": "and", "|": "or", "->": "arrow"}[f.op]
    return {"op": op, "left": _ast_dict(f.left), "right": _ast_dict(f.right)}


def _split_formulas(text: str):
    return [parse(part) for part in text.split(";") if part.strip()]


# ---------------------------------------------------------------------------
# subcommand handlers

def _cmd_parse(args) -> int:
    f = parse(args.formula)
    _emit({"formula": to_text(f), "ast": _ast_dict(f)}, args.json, to_text(f))
    return 0


def _cmd_check(args) -> int:
    model = model_from_json(_load_json(args.model))
    f = parse(args.formula)
    per_world = {w: evaluate(model, w, f) for w in model.worlds}
    if args.world is not None:
        if args.world not in model.valuation:
            raise ModelError(f"unknown world {args.world!r}")
        holds = per_world[args.world]
    else:
        holds = all(per_world.values())
    _emit({"formula": to_text(f), "holds": holds,
           "world": args.world, "per_world": per_world},
          args.json,
          f"{to_text(f)}: {'holds' if holds else 'fails'}"
          + (f" at {args.world}" if args.world else " in the model")
          + ("" if holds else "  (" + ", ".join(
              f"{w}={'1' if v else '0'}" for w, v in per_world.items()) + ")"))
    return 0 if holds else 1


def _cmd_conditions(args) -> int:
    model = model_from_json(_load_json(args.model))
    conds = _conds_from_args(args)
    report = admissible(model, conds)
    payload = {
        "admissible": report.ok,
        "violations": [
            {"condition": v.condition, "world": v.world,
             "pair": [to_text(p) if isinstance(p, Formula) else str(p)
                      for p in v.pair],
             "requires": v.requires, "reason": v.reason}
            for v in report.violations
        ],
    }
    lines = ["admissible"] if report.ok else [v.render() for v in report.violations]
    _emit(payload, args.json, "\n".join(lines))
    return 0 if report.ok else 1


def _verdict_payload(verdict):
    if isinstance(verdict, Valid):
        return {"verdict": "valid", "searched_worlds": verdict.searched_worlds,
                "bound": verdict.bound}
    if isinstance(verdict, BoundedValid):
        return {"verdict": "bounded_valid",
                "searched_worlds": verdict.searched_worlds,
                "bound": verdict.bound}
    return {"verdict": "countermodel", "world": verdict.world,
            "model": model_to_json(verdict.model)}


def _cmd_decide(args) -> int:
    f = parse(args.formula)
    conds = _conds_from_args(args)
    cfg = SearchConfig(
        max_worlds=args.max_worlds,
        pad=not args.no_pad,
        budget=args.budget,
        jobs=args.jobs,
        deterministic=args.deterministic,
    )
    verdict = decide(f, conds, cfg)
    payload = _verdict_payload(verdict)
    if isinstance(verdict, Valid):
        text = f"valid (complete at {verdict.bound} world(s))"
        code = 0
    elif isinstance(verdict, BoundedValid):
        text = (f"no countermodel up to {verdict.searched_worlds} world(s); "
                f"completeness bound "
                + (str(verdict.bound) if verdict.bound is not None else "unknown"))
        code = 0
    else:
        text = (f"countermodel at {verdict.world}:\n"
                + json.dumps(model_to_json(verdict.model), sort_keys=True, indent=2))
        code = 1
    _emit(payload, args.json, text)
    return code


def _cmd_count(args) -> int:
    carrier = ClosureSet(_split_formulas(args.carrier))
    conds = _conds_from_args(args)
    count = count_admissible(carrier, conds, pad=not args.no_pad,
                             budget=args.budget)
    _emit({"count": count, "carrier": [to_text(g) for g in carrier]},
          args.json, str(count))
    return 0


def _cmd_filtrate(args) -> int:
    model = model_from_json(_load_json(args.model))
    gamma = ClosureSet(_split_formulas(args.gamma)) if args.gamma \
        else model.carrier
    classes = filtration_classes(model, gamma)
    filtered = filtrate(model, gamma)
    if args.mplus:
        filtered = demodal_complete(filtered)
    doc = model_to_json(filtered)
    _emit({"model": doc, "classes": classes}, args.json,
          json.dumps(doc, sort_keys=True, indent=2))
    return 0


def _cmd_verify(args) -> int:
    proof = proof_from_json(_load_json(args.proof))
    result = verify(proof)
    payload = {"verified": result.ok, "calculus": proof.calculus.name,
               "steps": len(proof.steps)}
    if not result.ok:
        payload["step"] = result.step
        payload["reason"] = result.reason
        text = f"rejected at step {result.step}: {result.reason}"
    else:
        text = f"verified ({len(proof.steps)} steps, {proof.calculus.name})"
    _emit(payload, args.json, text)
    return 0 if result.ok else 1


# ---------------------------------------------------------------------------
# argument parsing

def _add_conds_options(sub):
    group = sub.add_mutually_exclusive_group(required=True)
    group.add_argument("--logic", help="registered logic name, e.g. BCL or MBCL+T")
    group.add_argument("--conds", help="condition flags, e.g. a1,a2,b0,b1,b2")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bclkit",
        description="Boolean Connexive Logic toolkit: models, decisions, proofs.")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("parse", help="parse a formula and print its canonical form")
    p.add_argument("formula")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_parse)

    p = subs.add_parser("check", help="evaluate a formula in a model document")
    p.add_argument("formula")
    p.add_argument("--model", required=True, help="model JSON file")
    p.add_argument("--world", help="evaluate at this world only")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_check)

    p = subs.add_parser("conditions", help="report condition violations of a model")
    p.add_argument("--model", required=True, help="model JSON file")
    _add_conds_options(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_conditions)

    p = subs.add_parser("decide", help="bounded validity decision")
    p.add_argument("formula")
    _add_conds_options(p)
    p.add_argument("--max-worlds", type=int, default=2)
    p.add_argument("--no-pad", action="store_true",
                   help="skip negation-tower padding for gcun condition sets")
    p.add_argument("--budget", type=int, default=None,
                   help=f"enumeration budget (also env BCLKIT_BUDGET)")
    p.add_argument("--jobs", type=int, default=1,
                   help="worker threads for the partitioned search")
    p.add_argument("--deterministic", action="store_true",
                   help="always report the enumeration-least countermodel")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_decide)

    p = subs.add_parser("count", help="count admissible relations over a carrier")
    p.add_argument("--carrier", required=True,
                   help="semicolon-separated formulas; their closure is the carrier")
    _add_conds_options(p)
    p.add_argument("--no-pad", action="store_true")
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_count)

    p = subs.add_parser("filtrate", help="quotient a model through a closure set")
    p.add_argument("--model", required=True, help="model JSON file")
    p.add_argument("--gamma", help="semicolon-separated formulas (default: carrier)")
    p.add_argument("--mplus", action="store_true",
                   help="also close the result under demodalized images")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_filtrate)

    p = subs.add_parser("verify", help="check a Hilbert-style proof document")
    p.add_argument("--proof", required=True, help="proof JSON file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
