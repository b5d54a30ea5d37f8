"""Command-line front end.

Exit codes: 0 success or definite verdict, 1 property violation or rejected
proof, 2 usage error, 3 unknown verdict.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .closure import Signature, SignatureError, UCL_GUARDS, closure
from .construction import (
    AtomSpace,
    audit_canonicity,
    audit_existence,
    audit_standardness,
    audit_truth,
    build_standard_model,
)
from .corpus import AGREEMENT_LOGICS, formula_corpus
from .proof import ScriptFormatError, SystemId, check_proof, parse_script
from .semantics import FrameClass, ModelError, frame_violations, model_from_json, model_to_json
from .solver import as_c_logic, brute_force_sat, brute_force_sat_many, closure_sat, decide_valid
from .syntax import ParseError, language_level, modal_depth, parse, render

OK, VIOLATION, USAGE, UNKNOWN = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=False)


def _formula(text: str):
    try:
        return parse(text)
    except ParseError as e:
        raise UsageError(f"cannot parse formula: {e}") from None


def _logic(text: str) -> SystemId:
    try:
        return as_c_logic(text)
    except ValueError as e:
        raise UsageError(str(e)) from None


def _iota(text: Optional[str]):
    if text is None:
        return None
    try:
        return tuple(int(x) for x in text.replace(",", " ").split())
    except ValueError:
        raise UsageError(f"bad index set {text!r}; expected e.g. '1 2'") from None


def _signature(args) -> Signature:
    try:
        return Signature.of(_logic(args.logic), _formula(args.formula), _iota(args.iota))
    except SignatureError as e:
        raise UsageError(str(e)) from None


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


# -- subcommands -------------------------------------------------------------

def cmd_parse(args, out) -> int:
    f = _formula(args.formula)
    if args.json:
        out.write(_dump({"formula": render(f), "language": language_level(f),
                         "modal_depth": modal_depth(f)}) + "\n")
    else:
        out.write(render(f) + "\n")
    return OK


def cmd_check_model(args, out) -> int:
    try:
        model = model_from_json(_read(args.model))
    except (ModelError, json.JSONDecodeError, TypeError) as e:
        raise UsageError(f"bad model file: {e}") from None
    f = _formula(args.formula)
    try:
        ext = model.extension(f)
    except ModelError as e:
        raise UsageError(str(e)) from None
    truth = {s: bool(ext >> k & 1) for k, s in enumerate(model.states)}
    bad = frame_violations(model, FrameClass(args.frame), model.indices) if args.frame else []
    if args.json:
        doc = {"formula": render(f), "truth": truth}
        if args.frame:
            doc["frame"] = args.frame
            doc["frame_violations"] = [list(v) for v in bad]
        out.write(_dump(doc) + "\n")
    else:
        for s, v in truth.items():
            out.write(f"{s}: {'true' if v else 'false'}\n")
        for i, cond, s in bad:
            out.write(f"frame violation: relation {i} not {cond} at {s}\n")
    return VIOLATION if bad else OK


def cmd_prove(args, out) -> int:
    try:
        system = SystemId.parse(args.system)
    except ValueError as e:
        raise UsageError(str(e)) from None
    try:
        script = parse_script(_read(args.script))
    except ScriptFormatError as e:
        out.write(f"rejected: {e}\n")
        return VIOLATION
    goal = _formula(args.goal) if args.goal else None
    result = check_proof(system, script, goal)
    if args.json:
        out.write(_dump({"system": system.name, "ok": result.ok, "line": result.line,
                         "reason": result.reason}) + "\n")
    else:
        out.write(("ok" if result.ok else f"rejected: line {result.line}: {result.reason}") + "\n")
    return OK if result.ok else VIOLATION


def cmd_closure(args, out) -> int:
    cl = closure(_signature(args), args.guard)
    if args.json:
        out.write(_dump(cl.rendered()) + "\n")
    else:
        out.write("\n".join(cl.rendered()) + "\n")
    return OK


def cmd_atoms(args, out) -> int:
    space = AtomSpace(_signature(args), guard=args.guard)
    rows = [atom.rendered() for atom in space.atoms]
    if args.json:
        out.write(_dump([{"atom": k, "members": r} for k, r in enumerate(rows)]) + "\n")
    else:
        for k, r in enumerate(rows):
            out.write(f"{k}: {{{', '.join(r)}}}\n")
    return OK


def cmd_build(args, out) -> int:
    sig = _signature(args)
    M = build_standard_model(sig, args.depth, pruned=args.pruned, guard=args.guard)
    out.write(model_to_json(M.model, indent=None if args.compact else 2) + "\n")
    return OK


def cmd_audit(args, out) -> int:
    sig = _signature(args)
    space = AtomSpace(sig, guard=args.guard, relation=args.relation)
    M = build_standard_model(sig, args.depth, space=space)
    reports = [
        audit_canonicity(space),
        audit_standardness(M),
        audit_truth(sig, M),
        audit_existence(sig, M),
    ]
    if args.json:
        out.write(_dump(reports) + "\n")
    else:
        for r in reports:
            extra = " (no interior states)" if r.get("no_interior_states") else ""
            out.write(f"{r['audit']}: {'ok' if r['ok'] else str(r['violation_count']) + ' violations'}{extra}\n")
    return OK if all(r["ok"] for r in reports) else VIOLATION


def _verdict_code(status: str) -> int:
    return UNKNOWN if status == "unknown" else OK


def cmd_sat(args, out) -> int:
    f = _formula(args.formula)
    system = _logic(args.logic)
    verdicts = []
    if args.engine in ("closure", "both"):
        verdicts.append(closure_sat(f, system, args.depth, _iota(args.iota)))
    if args.engine in ("oracle", "both"):
        verdicts.append(brute_force_sat(f, system.frame, args.bound))
    definite = [v for v in verdicts if v.definite]
    status = definite[0].status if definite else "unknown"
    if args.json:
        out.write(_dump({"status": status, "verdicts": [v.to_dict() for v in verdicts]}) + "\n")
    else:
        out.write(status + "\n")
        for v in verdicts:
            out.write(f"  {v.engine}: {v.status}{' (' + v.reason + ')' if v.reason else ''}\n")
    if len({v.status for v in definite}) > 1:
        return VIOLATION
    return _verdict_code(status)


def cmd_valid(args, out) -> int:
    f = _formula(args.formula)
    result = decide_valid(f, _logic(args.logic), args.depth, args.bound)
    if args.json:
        doc = result.to_dict()
        if result.witness is not None:
            doc["witness"] = result.witness.to_dict()
        out.write(_dump(doc) + "\n")
    else:
        out.write(result.status + "\n")
        if result.witness is not None:
            out.write(model_to_json(result.witness.model) + f" at {result.witness.state}\n")
    return _verdict_code(result.status)


def cmd_oracle_compare(args, out) -> int:
    formulas = formula_corpus(max_size=args.max_size, max_depth=args.max_depth)
    logics = args.logics.split(",") if args.logics else list(AGREEMENT_LOGICS)
    summary = []
    failed = False
    for name in logics:
        system = _logic(name)
        oracle = brute_force_sat_many(formulas, system.frame, args.bound)
        counts: dict = {}
        disagreements = []
        for f, o in zip(formulas, oracle):
            c = closure_sat(f, system)
            key = f"{c.status}/{o.status}"
            counts[key] = counts.get(key, 0) + 1
            if c.definite and o.definite and c.status != o.status:
                disagreements.append(render(f))
        failed |= bool(disagreements)
        summary.append({"logic": system.logic, "formulas": len(formulas), "closure/oracle": dict(sorted(counts.items())),
                        "disagreements": disagreements})
    if args.json:
        out.write(_dump(summary) + "\n")
    else:
        for s in summary:
            pairs = ", ".join(f"{k}={v}" for k, v in s["closure/oracle"].items())
            out.write(f"{s['logic']}: {s['formulas']} formulas; {pairs}; disagreements={len(s['disagreements'])}\n")
    return VIOLATION if failed else OK


# -- argument parsing ----------------------------------------------------------

def _signature_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("-l", "--logic", required=True, help="CK, CD, CT, CB, CS4 or CS5")
    p.add_argument("-f", "--formula", required=True)
    p.add_argument("-i", "--iota", help="index bound, e.g. '1 2' (default: indices of the formula)")
    p.add_argument("--guard", choices=UCL_GUARDS, default="meets")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="modalbench", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="print the canonical rendering of a formula")
    p.add_argument("-f", "--formula", required=True)
    p.set_defaults(run=cmd_parse)

    p = sub.add_parser("check-model", help="evaluate a formula at every state of a JSON model")
    p.add_argument("-m", "--model", required=True)
    p.add_argument("-f", "--formula", required=True)
    p.add_argument("--frame", choices=[c.value for c in FrameClass])
    p.set_defaults(run=cmd_check_model)

    p = sub.add_parser("prove", help="check a proof script")
    p.add_argument("-s", "--system", required=True, help="e.g. AX_CS5")
    p.add_argument("-p", "--script", required=True)
    p.add_argument("-g", "--goal", help="formula the script must end with")
    p.set_defaults(run=cmd_prove)

    p = sub.add_parser("closure", help="list the closure of a signature")
    _signature_flags(p)
    p.set_defaults(run=cmd_closure)

    p = sub.add_parser("atoms", help="list the atoms of a signature")
    _signature_flags(p)
    p.set_defaults(run=cmd_atoms)

    p = sub.add_parser("build", help="emit the standard model as JSON")
    _signature_flags(p)
    p.add_argument("-d", "--depth", type=int, help="path length bound (default: modal depth + 1)")
    p.add_argument("--pruned", action="store_true", help="keep only witness paths")
    p.add_argument("--compact", action="store_true")
    p.set_defaults(run=cmd_build)

    p = sub.add_parser("audit", help="run the canonicity, standardness, truth and existence audits")
    _signature_flags(p)
    p.add_argument("-d", "--depth", type=int)
    p.add_argument("--relation", choices=("repaired", "literal"), default="repaired")
    p.set_defaults(run=cmd_audit)

    p = sub.add_parser("sat", help="decide satisfiability")
    p.add_argument("-l", "--logic", required=True)
    p.add_argument("-f", "--formula", required=True)
    p.add_argument("-i", "--iota")
    p.add_argument("-d", "--depth", type=int)
    p.add_argument("-b", "--bound", type=int, default=3, help="oracle state bound")
    p.add_argument("--engine", choices=("closure", "oracle", "both"), default="both")
    p.set_defaults(run=cmd_sat)

    p = sub.add_parser("valid", help="decide validity")
    p.add_argument("-l", "--logic", required=True)
    p.add_argument("-f", "--formula", required=True)
    p.add_argument("-d", "--depth", type=int)
    p.add_argument("-b", "--bound", type=int, default=3, help="oracle state bound")
    p.set_defaults(run=cmd_valid)

    p = sub.add_parser("oracle-compare", help="engine agreement sweep over the exhaustive corpus")
    p.add_argument("--logics", help="comma-separated, default CK,CT,CB")
    p.add_argument("--max-size", type=int, default=4)
    p.add_argument("--max-depth", type=int, default=2)
    p.add_argument("-b", "--bound", type=int, default=4)
    p.set_defaults(run=cmd_oracle_compare)

    for p in sub.choices.values():
        p.add_argument("--json", action="store_true", help="machine-readable output")
    return parser


def run(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return USAGE if e.code else OK
    if getattr(args, "depth", None) is not None and args.depth < 0:
        err.write("error: depth must be >= 0\n")
        return USAGE
    if getattr(args, "bound", None) is not None and not 1 <= args.bound <= 8:
        err.write("error: bound must be between 1 and 8\n")
        return USAGE
    try:
        return args.run(args, out)
    except UsageError as e:
        err.write(f"error: {e}\n")
        return USAGE


def main() -> None:
    sys.exit(run())
