"""The one-step coalgebra of a program and its approximants.

``step`` sends an atom to the set of matched clause bodies, a set of sets of
atoms. Iterating it ``k`` times and keeping the atom at every layer gives the
level-``k`` approximant ``(A, {{(B, ...), ...}, ...})``, which must agree with
the coinductive tree cut at depth ``k``. The checkers here compare the two
sides of the lax square for substitutions and demand equality for injections.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterable

from .cotree import CoTree, build_cotree, subst_tree, tree_leq
from .intfunctor import ExtAtom, ExtSet, LawReport, as_ext, dist_law, pointwise
from .lawvere import (
    Injection,
    Substitution,
    apply,
    clause_matcher,
    enumerate_injections,
    enumerate_substitutions,
    injection_subst,
    mgm,
)
from .syntax import App, Atom, Program, Var, classify, enumerate_atoms, format_atom


class NotGround(ValueError):
    def __init__(self, clause_index: int):
        super().__init__(f"clause {clause_index} has variables")
        self.clause_index = clause_index


class ExistentialEscape(ValueError):
    def __init__(self, clause_index: int):
        super().__init__(f"clause {clause_index} has existential variables; use the extended step")
        self.clause_index = clause_index


EMPTY = frozenset()


# ------------------------------------------------------------------ ground


@dataclass(frozen=True)
class GroundCoalgebra:
    table: dict

    def __call__(self, atom: Atom) -> frozenset:
        return self.table.get(atom, EMPTY)


def _require_ground(program: Program):
    for i, c in program.numbered():
        if c.context_size:
            raise NotGround(i)


def ground_step(program: Program) -> GroundCoalgebra:
    """``A -> {body(C) | head(C) = A}`` for a variable-free program."""
    _require_ground(program)
    table: dict = {}
    for _, c in program.numbered():
        table.setdefault(c.head, set()).add(frozenset(c.body))
    return GroundCoalgebra({a: frozenset(v) for a, v in table.items()})


# ---------------------------------------------------------------- one step


def _require_non_existential(program: Program):
    witnesses = classify(program).witnesses
    if witnesses:
        raise ExistentialEscape(witnesses[0])


def step(program: Program, atom: Atom) -> frozenset:
    """Bodies of all clauses whose head matches ``atom``, as sets of atoms over its context."""
    _require_non_existential(program)
    out = set()
    for _, c in program.numbered():
        theta = mgm(c.head, atom)
        if theta is not None:
            out.add(frozenset(apply(theta, b) for b in c.body))
    return frozenset(out)


def step_ext(program: Program, atom: Atom | ExtAtom) -> frozenset:
    """Like :func:`step`, with fresh body variables as shared existentials.

    Each body becomes an :class:`ExtSet` bound over the context of ``atom``.
    """
    if isinstance(atom, ExtAtom):
        atom = atom.atom
    out = set()
    for _, c in program.numbered():
        theta = clause_matcher(c, atom)
        if theta is not None:
            out.add(ExtSet.of((apply(theta, b) for b in c.body), atom.context_size))
    return frozenset(out)


# ------------------------------------------------------------- approximants


@dataclass(frozen=True, slots=True)
class Approximant:
    """Level 0 is the atom alone; level ``k+1`` adds a set of sets of level-``k`` approximants."""

    atom: Atom
    level: int
    children: frozenset | None = None

    def project(self) -> Approximant:
        """Drop the innermost layer."""
        if self.level == 0:
            raise ValueError("level-0 approximant has no projection")
        if self.level == 1:
            return Approximant(self.atom, 0)
        return Approximant(self.atom, self.level - 1, frozenset(
            frozenset(c.project() for c in s) for s in self.children))

    def format(self, bound: int | None = None) -> str:
        name = format_atom(self.atom, bound=bound)
        if self.children is None:
            return name
        sets = sorted("{" + ", ".join(sorted(c.format(bound) for c in s)) + "}"
                      if s else "∅" for s in self.children)
        body = "{" + ", ".join(sets) + "}" if sets else "∅"
        return f"({name}, {body})"

    def __str__(self):
        return self.format()

    def as_dict(self, bound: int | None = None) -> dict:
        out = {"atom": format_atom(self.atom, bound=bound), "level": self.level}
        if self.children is not None:
            out["children"] = sorted(
                (sorted((c.as_dict(bound) for c in s), key=repr) for s in self.children),
                key=repr)
        return out


MODES = ("plain", "ext")


@functools.lru_cache(maxsize=100_000)
def _approx(program: Program, atom: Atom, k: int, ext: bool) -> Approximant:
    if k == 0:
        return Approximant(atom, 0)
    if ext:
        value = step_ext(program, atom)
        children = frozenset(frozenset(_approx(program, a, k - 1, True) for a in s.atoms)
                             for s in value)
    else:
        value = step(program, atom)
        children = frozenset(frozenset(_approx(program, a, k - 1, False) for a in s)
                             for s in value)
    return Approximant(atom, k, children)


def approximant(program: Program, atom: Atom | ExtAtom, k: int, mode: str = "plain",
                max_level: int = 6) -> Approximant:
    """The level-``k`` element built by iterating :func:`step` or :func:`step_ext`."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if not 0 <= k <= max_level:
        raise ValueError(f"level {k} outside 0..{max_level}")
    if mode == "plain":
        _require_non_existential(program)
    if isinstance(atom, ExtAtom):
        atom = atom.atom
    return _approx(program, atom, k, mode == "ext")


def ground_approximant(program: Program, atom: Atom, k: int) -> Approximant:
    _require_ground(program)
    return approximant(program, atom, k, "plain", max_level=max(k, 6))


def approximant_of_tree(tree: CoTree) -> Approximant:
    """Read a depth-``k`` tree as a level-``k`` approximant (clause labels forgotten)."""
    def conv(node, level):
        if node.truncated:
            return Approximant(node.atom, 0)
        return Approximant(node.atom, level, frozenset(
            frozenset(conv(c, level - 1) for c in o.children) for o in node.or_nodes))
    return conv(tree.root, tree.depth)


# ------------------------------------------------------------------ orders


def _match_ext(p, t, bound: int, h: dict) -> bool:
    if isinstance(p, Var):
        if p.index < bound:
            return p == t
        if not isinstance(t, Var) or t.index < bound:
            return False
        if p.index in h:
            return h[p.index] == t.index
        if t.index in h.values():
            return False
        h[p.index] = t.index
        return True
    return (isinstance(t, App) and p.symbol == t.symbol and len(p.args) == len(t.args)
            and all(_match_ext(a, b, bound, h) for a, b in zip(p.args, t.args)))


def _embeds(atoms: list, target: tuple, bound: int, h: dict) -> bool:
    if not atoms:
        return True
    first, rest = atoms[0], atoms[1:]
    for cand in target:
        if cand.predicate != first.predicate or len(cand.args) != len(first.args):
            continue
        trial = dict(h)
        if all(_match_ext(a, b, bound, trial) for a, b in zip(first.args, cand.args)):
            if _embeds(rest, target, bound, trial):
                return True
    return False


def set_leq(s, t) -> bool:
    """``s`` is a subset of ``t``; for extended sets, up to an injective renaming of existentials."""
    if isinstance(s, ExtSet):
        if s.bound != t.bound or s.existentials > t.existentials:
            return False
        if not s.existentials:
            ctx = t.bound + t.existentials
            return {a.widen(ctx) for a in s.atoms} <= set(t.atoms)
        return _embeds(list(s.atoms), t.atoms, s.bound, {})
    return s <= t


def value_leq(left: Iterable, right: Iterable) -> bool:
    """The set-of-sets order on a discrete carrier: every left set lies inside some right set."""
    right = list(right)
    members = set(right)
    return all(s in members or any(set_leq(s, t) for t in right) for s in left)


def reindex_value(sub: Substitution, value: frozenset) -> frozenset:
    """Apply ``sub`` inside every set of a step value."""
    out = set()
    for s in value:
        if isinstance(s, ExtSet):
            out.add(s.reindex(sub))
        else:
            out.add(frozenset(apply(sub, a) for a in s))
    return frozenset(out)


# ---------------------------------------------------------------- checkers


@dataclass(frozen=True, slots=True)
class Witness:
    holds: bool
    strict: bool
    failure: str = ""

    def __bool__(self):
        return self.holds

    def __str__(self):
        return "Holds" if self.holds else f"FailsAt({self.failure})"


@functools.lru_cache(maxsize=50_000)
def _tree(program: Program, atom: Atom, k: int) -> CoTree:
    return build_cotree(program, atom, k)


@functools.lru_cache(maxsize=50_000)
def _step_any(program: Program, atom: Atom) -> frozenset:
    if classify(program).existential:
        return step_ext(program, atom)
    return step(program, atom)


def check_lax(program: Program, sub: Substitution, atom: Atom, k: int = 3) -> Witness:
    """``sub`` applied to the step of ``atom`` is below the step of the substituted atom.

    Checked for one step and, through :func:`tree_leq`, for the depth-``k`` trees.
    """
    moved = apply(sub, atom)
    left = reindex_value(sub, _step_any(program, atom))
    right = _step_any(program, moved)
    if not value_leq(left, right):
        return Witness(False, False, f"step of {format_atom(moved)}")
    lt = subst_tree(sub, _tree(program, atom, k))
    rt = _tree(program, moved, k)
    order = tree_leq(lt, rt)
    if not order:
        return Witness(False, False, " / ".join(order.path))
    return Witness(True, left == right and lt == rt)


def check_inj_strict(program: Program, injection: Injection, atom: Atom, k: int = 3) -> Witness:
    """Renaming along an injection commutes with the extended step and with trees exactly."""
    if atom.context_size != injection.source:
        raise ValueError("atom must live over the injection's source")
    sub = injection_subst(injection)
    moved = apply(sub, atom)
    if reindex_value(sub, step_ext(program, atom)) != step_ext(program, moved):
        return Witness(False, False, f"step of {format_atom(moved)}")
    lt = subst_tree(sub, _tree(program, atom, k))
    rt = _tree(program, moved, k)
    if lt != rt:
        return Witness(False, False, f"tree of {format_atom(moved)}")
    if approximant_of_tree(lt) != approximant(program, moved, k, "ext", max_level=k):
        return Witness(False, False, f"approximant of {format_atom(moved)}")
    return Witness(True, True)


# ------------------------------------------------------------------ suites


def lax_suite(program: Program, max_context: int = 2, depth: int = 1, k: int = 3,
              atom_depth: int | None = None) -> LawReport:
    """:func:`check_lax` over every substitution ``n -> m`` and atom over ``m`` in a slice."""
    report = LawReport("lax")
    atom_depth = depth if atom_depth is None else atom_depth
    sig = program.signature
    subs = {(n, m): enumerate_substitutions(sig, n, m, depth)
            for n in range(max_context + 1) for m in range(max_context + 1)}
    for m in range(max_context + 1):
        for atom in enumerate_atoms(sig, m, atom_depth):
            for n in range(max_context + 1):
                for sub in subs[n, m]:
                    w = check_lax(program, sub, atom, k)
                    report.record("lax", w.holds, lambda: f"{sub} on {format_atom(atom)}")
                    if not w.strict:
                        report.note("non-strict")
    return report


def inj_suite(program: Program, max_source: int = 2, max_target: int = 4, depth: int = 1,
              k: int = 3) -> LawReport:
    report = LawReport("inj")
    for n in range(max_source + 1):
        atoms = enumerate_atoms(program.signature, n, depth)
        for m in range(n, max_target + 1):
            for inj in enumerate_injections(n, m):
                for atom in atoms:
                    w = check_inj_strict(program, inj, atom, k)
                    report.record("injection", w.holds,
                                  lambda: f"{inj.mapping}->{m} on {format_atom(atom)}")
    return report


def oracle_suite(program: Program, max_context: int = 2, depth: int = 1,
                 max_k: int = 4) -> LawReport:
    """Approximants and cut trees agree; projections are compatible."""
    report = LawReport("oracle")
    modes = ["ext"] if classify(program).existential else ["plain", "ext"]
    for n in range(max_context + 1):
        for atom in enumerate_atoms(program.signature, n, depth):
            for k in range(max_k + 1):
                from_tree = approximant_of_tree(_tree(program, atom, k))
                for mode in modes:
                    ap = approximant(program, atom, k, mode, max_level=max_k)
                    report.record(f"tree = approximant ({mode})", ap == from_tree,
                                  f"{format_atom(atom)} at level {k}")
                    if k:
                        prev = approximant(program, atom, k - 1, mode, max_level=max_k)
                        report.record("projection", ap.project() == prev,
                                      f"{format_atom(atom)} at level {k}")
    return report


def ext_agrees_with_step(program: Program, atom: Atom) -> bool:
    """On a program without existentials the extended step is the plain one."""
    plain = frozenset(frozenset(as_ext(a) for a in s) for s in step(program, atom))
    ext = frozenset(s.members() for s in step_ext(program, atom))
    return plain == ext


def raw_step(program: Program, atom: Atom) -> list:
    """Per matching clause: its existential count and matched body over the widened context."""
    out = []
    for _, c in program.numbered():
        theta = clause_matcher(c, atom)
        if theta is not None:
            out.append((len(c.existentials), [apply(theta, b) for b in c.body]))
    return out


def factored_step(program: Program, atom: Atom) -> frozenset:
    """Raw clause matching followed by the distributive law, clause by clause."""
    n = atom.context_size
    out: frozenset = frozenset()
    for e, body in raw_step(program, atom):
        out |= dist_law(n, e, [body])
    return out


def dist_factorization_suite(program: Program, max_context: int = 2, depth: int = 1) -> LawReport:
    """The distributive law applied to raw matches gives the pointwise extended step."""
    report = LawReport("dist-factorization")
    for n in range(max_context + 1):
        for atom in enumerate_atoms(program.signature, n, depth):
            report.record("factorization",
                          factored_step(program, atom) == pointwise(step_ext(program, atom)),
                          lambda: format_atom(atom))
    return report
