"""Term-matching (TM) resolution and SLD resolution.

TM resolution proves an atom exactly as given: a clause applies only when its
head *matches* the goal, so ``list(cons(x1,x2))`` is not a theorem of ListNat
although ``list(cons(0,nil))`` is. SLD resolution unifies instead and computes
answer substitutions. For every answer ``sigma`` of a goal ``t`` found by SLD,
TM proves ``sigma(t)``; :func:`verify_bridge` checks that.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .lawvere import Substitution, apply, clause_matcher, mgu, subst_term
from .generators import random_atom, random_program
from .syntax import App, Atom, Program, Var, distinct, enumerate_atoms, format_atom, term_vars


class Outcome(enum.Enum):
    PROVED = "Proved"
    FAILED_FINITE = "FailedFinite"
    FUEL_EXHAUSTED = "FuelExhausted"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class ProofNode:
    goal: Atom
    clause_index: int
    matcher: Substitution
    children: tuple = ()

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children)

    def height(self) -> int:
        return 1 + max((c.height() for c in self.children), default=0)


@dataclass(frozen=True)
class TmResult:
    outcome: Outcome
    proof: ProofNode | None = None

    @property
    def proved(self) -> bool:
        return self.outcome is Outcome.PROVED


def _prove(program: Program, goal: Atom, fuel: int):
    # Returns (proof or None, whether the fuel bound was reached somewhere).
    if fuel == 0:
        return None, True
    hit = False
    for idx, clause in program.numbered():
        theta = clause_matcher(clause, goal)
        if theta is None:
            continue
        body = distinct(apply(theta, b) for b in clause.body)
        kids = []
        for b in body:
            node, h = _prove(program, b, fuel - 1)
            hit = hit or h
            if node is None:
                kids = None
                if hit:
                    break
                # keep exploring siblings: only a fuel hit separates divergence from failure
            elif kids is not None:
                kids.append(node)
        if kids is not None:
            return ProofNode(goal, idx, theta, tuple(kids)), hit
    return None, hit


def tm_prove(program: Program, goal: Atom, max_depth: int) -> TmResult:
    """Depth-first TM proof search, clauses in program order.

    ``max_depth`` bounds the number of and-node generations. The result is
    FailedFinite only when the whole search space below the bound was explored
    without reaching the bound; otherwise an unproved goal is FuelExhausted.
    """
    if max_depth < 0:
        raise ValueError("fuel must be >= 0")
    proof, hit = _prove(program, goal, max_depth)
    if proof is not None:
        return TmResult(Outcome.PROVED, proof)
    return TmResult(Outcome.FUEL_EXHAUSTED if hit else Outcome.FAILED_FINITE)


def replay(program: Program, node: ProofNode) -> list:
    """Re-validate a proof using matching only; returns a list of problems."""
    problems = []
    clause = program.clause(node.clause_index)
    theta = node.matcher
    if theta.target != clause.context_size or theta.source < node.goal.context_size:
        return [f"matcher does not fit clause {node.clause_index}"]
    if apply(theta, clause.head) != node.goal.widen(theta.source):
        problems.append(f"matcher does not map clause {node.clause_index} head to {node.goal}")
    expected = distinct(apply(theta, b) for b in clause.body)
    if [c.goal for c in node.children] != expected:
        problems.append(f"children of {node.goal} do not cover the instantiated body")
    for c in node.children:
        problems.extend(replay(program, c))
    return problems


# ---------------------------------------------------------------- SLD


@dataclass(frozen=True)
class SldAnswer:
    answer: Substitution
    steps: int

    def instantiate(self, goal: Atom) -> Atom:
        return apply(self.answer, goal)


def _shift(atom: Atom, by: int, context: int) -> Atom:
    terms = [Var(i + by) for i in range(atom.context_size)]
    return Atom(atom.predicate, tuple(subst_term(a, terms) for a in atom.args), context)


def _normalize(terms: tuple, m: int) -> Substitution:
    # query variables keep their index; any other variable is numbered after them
    mapping = {i: Var(i) for i in range(m)}
    for t in terms:
        for v in term_vars(t):
            if v not in mapping:
                mapping[v] = Var(len(mapping))
    return Substitution(len(mapping), m, tuple(_rename(t, mapping) for t in terms))


def _rename(t, mapping: dict):
    if isinstance(t, Var):
        return mapping[t.index]
    return App(t.symbol, tuple(_rename(a, mapping) for a in t.args)) if t.args else t


def _sld(program: Program, goals: tuple, answer: tuple, ctx: int, steps: int, limit: int):
    if not goals:
        if steps == limit:
            yield answer, steps
        return
    if steps == limit:
        return
    selected, rest = goals[0], goals[1:]
    for _, clause in program.numbered():
        k = clause.context_size
        wide = ctx + k
        head = _shift(clause.head, ctx, wide)
        sigma = mgu(selected.widen(wide), head)
        if sigma is None:
            continue
        new_goals = tuple(apply(sigma, _shift(b, ctx, wide)) for b in clause.body) + tuple(
            apply(sigma, g.widen(wide)) for g in rest)
        new_answer = tuple(subst_term(t, sigma.terms) for t in answer)
        yield from _sld(program, new_goals, new_answer, wide, steps + 1, limit)


def sld_solve(program: Program, goals: Sequence[Atom], max_steps: int) -> Iterator[SldAnswer]:
    """SLD answers by iterative deepening on the number of resolution steps.

    Leftmost selection, clauses in program order. Answers of derivations with
    ``s`` steps are produced in round ``s``, so each derivation yields exactly
    one answer; the stream ends when ``max_steps`` is exhausted.
    """
    goals = tuple(goals)
    if len({g.context_size for g in goals}) > 1:
        raise ValueError("goals must share one context")
    m = goals[0].context_size if goals else 0
    query = tuple(Var(i) for i in range(m))
    for limit in range(max_steps + 1):
        for terms, steps in _sld(program, goals, query, m, 0, limit):
            yield SldAnswer(_normalize(terms, m), steps)


# ------------------------------------------------------------- bridging


@dataclass
class BridgeReport:
    checked: list = field(default_factory=list)
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def merge(self, other: BridgeReport) -> BridgeReport:
        self.checked.extend(other.checked)
        self.violations.extend(other.violations)
        return self

    def as_dict(self) -> dict:
        return {"check": "bridge", "checked": len(self.checked),
                "violations": self.violations, "ok": self.ok}


def verify_bridge(program: Program, goal: Atom, fuel: int,
                  max_answers: int | None = None) -> BridgeReport:
    """Check that TM proves ``sigma(goal)`` for every SLD answer ``sigma`` within ``fuel``.

    A derivation of ``s`` steps gives a TM proof of height at most ``s``, so the
    TM search runs with the same fuel.
    """
    report = BridgeReport()
    for i, ans in enumerate(sld_solve(program, [goal], fuel)):
        if max_answers is not None and i >= max_answers:
            break
        inst = ans.instantiate(goal)
        result = tm_prove(program, inst, fuel)
        entry = {"goal": format_atom(goal), "answer": str(ans.answer),
                 "instance": format_atom(inst), "steps": ans.steps,
                 "tm": str(result.outcome)}
        report.checked.append(entry)
        if not result.proved:
            report.violations.append(entry)
    return report


def bridge_suite(program: Program, max_context: int = 2, depth: int = 1, fuel: int = 8,
                 max_answers: int | None = 50) -> BridgeReport:
    """:func:`verify_bridge` over every atom of a bounded slice."""
    report = BridgeReport()
    for n in range(max_context + 1):
        for atom in enumerate_atoms(program.signature, n, depth):
            report.merge(verify_bridge(program, atom, fuel, max_answers))
    return report


def random_bridge_suite(programs: int = 200, seed: int = 0, fuel: int = 6,
                        goals_per_program: int = 3,
                        max_answers: int | None = 20) -> BridgeReport:
    """:func:`verify_bridge` on seeded random non-existential programs."""
    rng = random.Random(seed)
    report = BridgeReport()
    for _ in range(programs):
        prog = random_program(rng, existential=False)
        for _ in range(goals_per_program):
            goal = random_atom(rng, prog.signature, rng.randint(0, 2), 1)
            report.merge(verify_bridge(prog, goal, fuel, max_answers))
    return report
