"""Command line interface for lpsem.

Program arguments are file paths; a bare name such as ``gc`` or ``gc.lp`` is
looked up in ``$LPSEM_FIXTURES`` and then among the bundled fixtures. Goals
use the program syntax with uppercase variables, e.g. ``"connected(X,Y)"``.

Exit status: 0 on success, 1 when a goal is refuted or a check finds
violations, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from . import coalgebra, cotree, intfunctor, resolution, saturation
from .generators import LISTNAT_SIGNATURE
from .lawvere import format_substitution
from .syntax import (
    ParseError,
    Program,
    classify,
    format_atom,
    format_clause,
    load_program,
    parse_query,
)

FIXTURE_ENV = "LPSEM_FIXTURES"
FORMATS = cotree.EXPORT_FORMATS


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    program: str | None
    command: str
    depth: int = 4
    fuel: int = 8
    max_context: int | None = None
    max_depth: int = 2
    fmt: str = "ascii"
    seed: int = 0

    def __post_init__(self):
        for name in ("depth", "fuel", "max_depth", "seed"):
            if getattr(self, name) < 0:
                raise UsageError(f"--{name.replace('_', '-')} must be non-negative")
        if self.max_context is not None and self.max_context < 0:
            raise UsageError("--max-context must be non-negative")
        if self.fmt not in FORMATS:
            raise UsageError(f"--format must be one of {', '.join(FORMATS)}")


def fixture_dirs() -> list:
    dirs = []
    if os.environ.get(FIXTURE_ENV):
        dirs.append(Path(os.environ[FIXTURE_ENV]))
    dirs.append(Path(str(resources.files("lpsem") / "fixtures")))
    return dirs


def resolve_program(name: str) -> Path:
    path = Path(name)
    if path.is_file():
        return path
    for d in fixture_dirs():
        for candidate in (d / name, d / f"{name}.lp"):
            if candidate.is_file():
                return candidate
    raise UsageError(f"no program file {name!r} (searched the working directory and fixtures)")


def read_program(name: str) -> Program:
    try:
        return load_program(resolve_program(name))
    except ParseError as exc:
        raise UsageError(f"{name}: {exc}") from exc


def read_goal(program: Program, text: str) -> tuple:
    """The goal atoms and their variable names."""
    try:
        q = parse_query(text, program.signature)
    except ParseError as exc:
        raise UsageError(f"goal: {exc}") from exc
    return q.atoms, q.names


def single_goal(program: Program, text: str) -> tuple:
    atoms, names = read_goal(program, text)
    if len(atoms) != 1:
        raise UsageError("expected a single atom")
    return atoms[0], names


def emit(obj) -> None:
    print(json.dumps(obj, indent=2, ensure_ascii=False))


def _report_exit(report) -> int:
    emit(report.as_dict())
    return 0 if report.ok else 1


# ------------------------------------------------------------------ commands


def cmd_parse(args) -> int:
    program = read_program(args.program)
    if args.json:
        emit({"clauses": [format_clause(c) for c in program.clauses],
              "functions": dict(program.signature.functions),
              "predicates": dict(program.signature.predicates)})
    else:
        for i, c in program.numbered():
            print(f"{i}. {format_clause(c, canonical=args.canonical)}")
    return 0


def cmd_classify(args) -> int:
    print(classify(read_program(args.program)))
    return 0


def _print_proof(node, names, indent=0):
    print("  " * indent + f"{format_atom(node.goal, names=names)}  [clause {node.clause_index}]")
    for c in node.children:
        _print_proof(c, names, indent + 1)


def cmd_prove(args) -> int:
    program = read_program(args.program)
    goal, names = single_goal(program, args.goal)
    result = resolution.tm_prove(program, goal, args.fuel)
    print(result.outcome)
    if args.trace and result.proof is not None:
        _print_proof(result.proof, names)
    return 0 if result.proved else 1


def cmd_solve(args) -> int:
    program = read_program(args.program)
    goals, names = read_goal(program, args.goal)
    found = 0
    for ans in resolution.sld_solve(program, goals, args.fuel):
        extra = [f"_G{j}" for j in range(ans.answer.source - len(names))]
        text = format_substitution(ans.answer, names=list(names) + extra,
                                   target_names=names, omit_identity=True)
        print(f"{text}  ({ans.steps} steps)" if args.steps else text)
        found += 1
        if args.max_answers and found >= args.max_answers:
            break
    if not found:
        print("no answers")
    return 0 if found else 1


def cmd_tree(args) -> int:
    program = read_program(args.program)
    goal, _ = single_goal(program, args.goal)
    sys.stdout.write(cotree.export_tree(cotree.build_cotree(program, goal, args.depth), args.format))
    return 0


def cmd_approx(args) -> int:
    program = read_program(args.program)
    goal, _ = single_goal(program, args.goal)
    mode = args.mode or ("ext" if classify(program).existential else "plain")
    try:
        ap = coalgebra.approximant(program, goal, args.level, mode, max_level=args.max_level)
    except (coalgebra.ExistentialEscape, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    n = goal.context_size
    if args.json:
        emit(ap.as_dict(bound=n))
    else:
        print(ap.format(bound=n))
    return 0


def _bounds(args, n: int) -> saturation.Bounds:
    m = args.max_context if args.max_context is not None else n + 2
    return saturation.Bounds(m, args.max_depth)


def cmd_saturate(args) -> int:
    program = read_program(args.program)
    goal, _ = single_goal(program, args.goal)
    emit(saturation.saturate(program, goal, _bounds(args, goal.context_size)).as_dict())
    return 0


def cmd_check(args) -> int:
    kind = args.kind
    if kind in ("monad", "dist"):
        sig = read_program(args.program).signature if args.program else LISTNAT_SIGNATURE
        if kind == "monad":
            report = intfunctor.check_monad_laws(sig, args.samples, args.seed)
            report.merge(intfunctor.check_canonical_invariance(sig, min(args.samples, 500), args.seed))
        else:
            report = intfunctor.check_dist_naturality(sig, args.samples, args.seed)
            if args.program:
                report.merge(coalgebra.dist_factorization_suite(read_program(args.program)))
        return _report_exit(report)
    if kind == "bridge" and not args.program:
        return _report_exit(resolution.random_bridge_suite(args.samples, args.seed, args.fuel))
    if not args.program:
        raise UsageError(f"check {kind} needs a program")
    program = read_program(args.program)
    if kind == "bridge":
        if args.goal:
            goal, _ = single_goal(program, args.goal)
            return _report_exit(resolution.verify_bridge(program, goal, args.fuel))
        return _report_exit(resolution.bridge_suite(program, fuel=args.fuel))
    if kind == "saturation":
        if not args.goal:
            raise UsageError("check saturation needs a goal atom")
        goal, _ = single_goal(program, args.goal)
        return _report_exit(saturation.saturation_report(program, goal, _bounds(args, goal.context_size)))
    max_context = 2 if args.max_context is None else args.max_context
    if kind == "lax":
        report = coalgebra.lax_suite(program, max_context, args.slice_depth, args.level)
    else:
        report = coalgebra.inj_suite(program, max_context, args.max_target, args.slice_depth, args.level)
    return _report_exit(report)


def cmd_oracle(args) -> int:
    program = read_program(args.program)
    max_context = 2 if args.max_context is None else args.max_context
    return _report_exit(coalgebra.oracle_suite(program, max_context, args.slice_depth, args.max_level))


# -------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lpsem", description=__doc__.split("\n\n")[0],
                                epilog=f"Programs are also looked up in ${FIXTURE_ENV} and the bundled fixtures.")
    sub = p.add_subparsers(dest="command", required=True, metavar="command")

    def program_cmd(name, help_text, goal=False):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("program", help="program file or fixture name")
        if goal:
            sp.add_argument("goal", help='goal atom, e.g. "list(cons(X,nil))"')
        return sp

    sp = program_cmd("parse", "parse and print a program")
    sp.add_argument("--canonical", action="store_true", help="print variables as x1, x2, ...")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_parse)

    program_cmd("classify", "report existential clauses").set_defaults(func=cmd_classify)

    sp = program_cmd("prove", "term-matching proof search", goal=True)
    sp.add_argument("--fuel", type=int, default=8, help="maximum proof depth (default 8)")
    sp.add_argument("--trace", action="store_true", help="print the proof tree")
    sp.set_defaults(func=cmd_prove)

    sp = program_cmd("solve", "SLD answers by iterative deepening", goal=True)
    sp.add_argument("--fuel", type=int, default=8, help="maximum derivation length (default 8)")
    sp.add_argument("--max-answers", type=int, default=0, help="stop after this many answers")
    sp.add_argument("--steps", action="store_true", help="show derivation lengths")
    sp.set_defaults(func=cmd_solve)

    sp = program_cmd("tree", "coinductive tree of a goal", goal=True)
    sp.add_argument("--depth", type=int, default=4)
    sp.add_argument("--format", choices=FORMATS, default="ascii")
    sp.set_defaults(func=cmd_tree)

    sp = program_cmd("approx", "level-k approximant of a goal", goal=True)
    sp.add_argument("--level", type=int, default=2)
    sp.add_argument("--mode", choices=coalgebra.MODES, help="default: plain unless the program has existentials")
    sp.add_argument("--max-level", type=int, default=6)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_approx)

    sp = program_cmd("saturate", "tabulate the extended step over bounded substitutions", goal=True)
    sp.add_argument("--max-context", type=int, help="largest source context (default n+2)")
    sp.add_argument("--max-depth", type=int, default=2, help="largest term depth (default 2)")
    sp.set_defaults(func=cmd_saturate)

    sp = sub.add_parser("check", help="run a law or property suite; prints a JSON report")
    sp.add_argument("kind", choices=("lax", "inj", "saturation", "monad", "dist", "bridge"))
    sp.add_argument("program", nargs="?", help="program file or fixture name")
    sp.add_argument("goal", nargs="?", help="goal atom (saturation; optional for bridge)")
    sp.add_argument("--max-context", type=int, help="largest context in the slice")
    sp.add_argument("--max-target", type=int, default=4, help="largest injection target (inj)")
    sp.add_argument("--max-depth", type=int, default=2, help="term depth bound for saturation")
    sp.add_argument("--slice-depth", type=int, default=1, help="term depth of enumerated atoms")
    sp.add_argument("--level", type=int, default=3, help="tree depth compared")
    sp.add_argument("--fuel", type=int, default=8)
    sp.add_argument("--samples", type=int, default=1000, help="random samples (monad, dist, bridge)")
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_check)

    sp = program_cmd("oracle", "compare approximants with cut trees")
    sp.add_argument("--max-context", type=int)
    sp.add_argument("--slice-depth", type=int, default=1)
    sp.add_argument("--max-level", type=int, default=4)
    sp.set_defaults(func=cmd_oracle)
    return p


def config_from(args) -> RunConfig:
    return RunConfig(
        program=getattr(args, "program", None),
        command=args.command,
        depth=getattr(args, "depth", 4),
        fuel=getattr(args, "fuel", 8),
        max_context=getattr(args, "max_context", None),
        max_depth=getattr(args, "max_depth", 2),
        fmt=getattr(args, "format", "ascii"),
        seed=getattr(args, "seed", 0),
    )


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config_from(args)
        return args.func(args)
    except UsageError as exc:
        print(f"lpsem: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
