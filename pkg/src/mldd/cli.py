"""Command-line front end.

Exit codes: 0 positive verdict, 1 negative verdict, 2 error or exhausted limit.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time

from . import fixtures
from .bisim import (
    BisimError, BisimKind, SearchLimitExceeded, check_bisim, dump_relation,
    find_bisim, load_relation,
)
from .formula import DialectError, dialect_of
from .game import GameError, Limits, LimitExceeded, sat_boolean_dd
from .kripke import FrameClass, KripkeModel, ModelError, satisfies, validate
from .oracle import AlphabetError, brute_sat, equivalent_upto, spec_for
from .syntax import ParseError, parse, to_text
from .translations import DIRECTIONS

OK, NEGATIVE, ERROR = 0, 1, 2


class CliError(Exception):
    pass


class Report:
    """Collects one command's result; printed as text or JSON."""

    def __init__(self, command: str, inputs: dict):
        self.command = command
        self.inputs = inputs
        self.data = {}
        self.lines = []
        self.witness = []
        self.verdict = None
        self.start = time.perf_counter()

    def digest(self) -> str:
        payload = json.dumps(self.inputs, sort_keys=True).encode()
        return hashlib.sha1(payload).hexdigest()[:16]

    def emit(self, as_json: bool, out=None):
        out = out or sys.stdout
        if as_json:
            doc = {"command": self.command, "inputs_digest": self.digest(),
                   "verdict": self.verdict, "witness": self.witness,
                   "timing": round(time.perf_counter() - self.start, 6), **self.data}
            out.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        else:
            for line in self.lines:
                out.write(line + "\n")


def _formula(text: str):
    return parse(text)


def _model(path: str) -> KripkeModel:
    try:
        m = KripkeModel.load(path)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read model {path}: {exc}") from None
    problems = validate(m)
    if problems:
        raise CliError(f"invalid model {path}: {problems[0]}")
    return m


def _write(path: str, text: str):
    with open(path, "w") as fh:
        fh.write(text)


# -- commands --------------------------------------------------------------------

def cmd_parse(args) -> tuple:
    rep = Report("parse", {"formula": args.formula})
    f = _formula(args.formula)
    dialect = dialect_of(f)
    name = dialect.value if dialect else "none"
    rep.verdict = "ok"
    rep.data.update(canonical=to_text(f), dialect=name)
    rep.lines += [to_text(f), f"dialect: {name}"]
    return rep, OK


def cmd_check(args) -> tuple:
    rep = Report("check", {"model": args.model, "world": args.world, "formula": args.formula})
    m = _model(args.model)
    f = _formula(args.formula)
    value = satisfies(m, args.world, f)
    rep.verdict = "true" if value else "false"
    rep.lines.append(rep.verdict)
    return rep, OK if value else NEGATIVE


def cmd_sat(args) -> tuple:
    rep = Report("sat", {"formula": args.formula, "engine": args.engine,
                         "max_worlds": args.max_worlds})
    f = _formula(args.formula)
    if args.engine == "game":
        limits = Limits.from_env()
        if args.max_nodes is not None or args.max_seconds is not None:
            limits = Limits(args.max_nodes if args.max_nodes is not None else limits.max_nodes,
                            args.max_seconds if args.max_seconds is not None
                            else limits.max_seconds, limits.max_hintikka)
        res = sat_boolean_dd(f, limits)
        verdict, model, world = res.verdict, res.model, res.world
    else:
        res = brute_sat(f, spec_for(f, max_worlds=args.max_worlds))
        verdict = "sat" if res.found else "none_within_bound"
        model, world = res.model, res.world
        rep.data["bound"] = args.max_worlds
    rep.verdict = verdict
    if verdict == "sat":
        if not satisfies(model, world, f):
            raise CliError("internal error: witness failed verification")
        rep.data.update(world=world, model=model.to_json())
        k = len(model.worlds)
        rep.lines.append(f"SAT at {world} ({k} world{'' if k == 1 else 's'})")
        if args.witness:
            _write(args.witness, model.dumps())
            rep.witness.append(args.witness)
            rep.lines.append(f"witness written to {args.witness}")
        else:
            rep.lines.append(model.dumps().rstrip())
        return rep, OK
    if verdict == "unsat":
        rep.lines.append("UNSAT")
        return rep, NEGATIVE
    if verdict == "none_within_bound":
        rep.lines.append(f"no model with at most {args.max_worlds} worlds")
        return rep, NEGATIVE
    rep.lines.append("limit exceeded")
    return rep, ERROR


def cmd_translate(args) -> tuple:
    rep = Report("translate", {"formula": args.formula, "dir": args.dir})
    out = DIRECTIONS[args.dir](_formula(args.formula))
    rep.verdict = "ok"
    rep.data["result"] = to_text(out)
    rep.lines.append(to_text(out))
    return rep, OK


def cmd_bisim(args) -> tuple:
    rep = Report("bisim", {"kind": args.kind, "left": args.left, "right": args.right,
                           "relation": args.relation, "search": args.search})
    kind = BisimKind(args.kind)
    m, m2 = _model(args.left), _model(args.right)
    if args.search:
        w, w2 = args.search
        try:
            z = find_bisim(kind, m, w, m2, w2)
        except SearchLimitExceeded as exc:
            rep.verdict = "limit_exceeded"
            rep.lines.append(f"limit exceeded: {exc}")
            return rep, ERROR
        if z is None:
            rep.verdict = "none"
            rep.lines.append(f"no {kind.value}-bisimulation relates {w} and {w2}")
            return rep, NEGATIVE
        rep.verdict = "found"
        rep.data["relation"] = sorted([list(p) for p in z])
        if args.out:
            _write(args.out, dump_relation(z))
            rep.witness.append(args.out)
            rep.lines.append(f"relation written to {args.out}")
        else:
            rep.lines.append(dump_relation(z).rstrip())
        return rep, OK
    if not args.relation:
        raise CliError("give a relation file or --search W W2")
    try:
        z = load_relation(args.relation)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read relation {args.relation}: {exc}") from None
    problems = check_bisim(kind, m, m2, z)
    rep.data["violations"] = problems
    if problems:
        rep.verdict = "violations"
        rep.lines += problems
        return rep, NEGATIVE
    rep.verdict = "ok"
    rep.lines.append("ok")
    return rep, OK


def cmd_equiv(args) -> tuple:
    rep = Report("equiv", {"f": args.f, "g": args.g, "frames": args.frames,
                           "max_size": args.max_size})
    f, g = _formula(args.f), _formula(args.g)
    frames = FrameClass.ALL if args.frames == "all" else FrameClass.FINITE_STRICT_TOTAL_ORDER
    res = equivalent_upto(f, g, spec_for(f, g, max_worlds=args.max_size, frame_class=frames))
    rep.data["bound"] = args.max_size
    if res.equivalent:
        rep.verdict = "equivalent"
        rep.lines.append(f"equivalent on every model with at most {args.max_size} worlds "
                         f"(frames: {args.frames})")
        return rep, OK
    rep.verdict = "countermodel"
    rep.data.update(world=res.world, left=res.left, right=res.right,
                    model=res.model.to_json())
    rep.lines.append(f"countermodel at {res.world}: left {str(res.left).lower()}, "
                     f"right {str(res.right).lower()}")
    if args.countermodel:
        _write(args.countermodel, res.model.dumps())
        rep.witness.append(args.countermodel)
        rep.lines.append(f"countermodel written to {args.countermodel}")
    else:
        rep.lines.append(res.model.dumps().rstrip())
    return rep, NEGATIVE


def cmd_fixtures(args) -> tuple:
    rep = Report("fixtures", {})
    rep.verdict = "ok"
    listing = {}
    for name in fixtures.names():
        files = {part: str(fixtures.path(name, part)) for part in ("left", "right", "relation")}
        listing[name] = {"files": files, "point": list(fixtures.POINTS[name]),
                         "illustrative": name in fixtures.ILLUSTRATIVE}
        note = " (illustrative)" if name in fixtures.ILLUSTRATIVE else ""
        rep.lines.append(f"{name}{note}: " + " ".join(files.values()))
    rep.data["fixtures"] = listing
    return rep, OK


# -- entry point -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="mldd",
        description="Modal logic with definite descriptions: parse, check, decide, "
                    "translate and compare models.",
        epilog="Exit codes: 0 positive, 1 negative, 2 error or limit. "
               "MLDD_LIMITS sets game budgets, e.g. MLDD_LIMITS='nodes=100000,seconds=5'.")
    ap.add_argument("--json", action="store_true", help="machine-readable output")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="print canonical form and dialect")
    p.add_argument("formula")
    p.set_defaults(run=cmd_parse)

    p = sub.add_parser("check", help="evaluate a formula at a world of a model file")
    p.add_argument("model")
    p.add_argument("world")
    p.add_argument("formula")
    p.set_defaults(run=cmd_check)

    p = sub.add_parser("sat", help="decide satisfiability")
    p.add_argument("formula")
    p.add_argument("--engine", choices=("game", "oracle"), default="game",
                   help="game: Boolean-DD decision procedure; oracle: bounded search")
    p.add_argument("--max-worlds", type=int, default=4, help="oracle bound (default 4)")
    p.add_argument("--max-nodes", type=int, default=None, help="game search node budget")
    p.add_argument("--max-seconds", type=float, default=None, help="game time budget")
    p.add_argument("--witness", metavar="PATH", help="write the witness model here")
    p.set_defaults(run=cmd_sat)

    p = sub.add_parser("translate", help="translate between logics")
    p.add_argument("--dir", required=True, choices=sorted(DIRECTIONS))
    p.add_argument("formula")
    p.set_defaults(run=cmd_translate)

    p = sub.add_parser("bisim", help="check or search for a bisimulation")
    p.add_argument("--kind", required=True, choices=[k.value for k in BisimKind])
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("relation", nargs="?", help="relation file (JSON array of pairs)")
    p.add_argument("--search", nargs=2, metavar=("W", "W2"),
                   help="search for a relation containing (W, W2)")
    p.add_argument("--out", metavar="PATH", help="write a found relation here")
    p.set_defaults(run=cmd_bisim)

    p = sub.add_parser("equiv", help="bounded pointwise equivalence")
    p.add_argument("f")
    p.add_argument("g")
    p.add_argument("--frames", choices=("all", "linear"), default="all")
    p.add_argument("--max-size", type=int, default=4)
    p.add_argument("--countermodel", metavar="PATH", help="write a countermodel here")
    p.set_defaults(run=cmd_equiv)

    p = sub.add_parser("fixtures", help="list the shipped model pairs")
    p.set_defaults(run=cmd_fixtures)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        rep, code = args.run(args)
    except ParseError as exc:
        return _fail(args, f"syntax error: {exc}")
    except (CliError, DialectError, GameError, ModelError, BisimError, AlphabetError,
            LimitExceeded, ValueError, KeyError) as exc:
        return _fail(args, f"error: {exc}")
    rep.emit(args.json)
    return code


def _fail(args, message: str) -> int:
    if args.json:
        sys.stdout.write(json.dumps({"command": args.command, "verdict": "error",
                                     "error": message}, indent=2) + "\n")
    else:
        sys.stderr.write(message + "\n")
    return ERROR


if __name__ == "__main__":
    sys.exit(main())
