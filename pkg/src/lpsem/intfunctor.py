"""Atoms with bound variables plus fresh existentials, and the monad they form.

An element of the extended-context functor at ``n`` is an atom over ``n + k``
where ``x1..xn`` are bound and the remaining ``k`` variables are existentials,
identified up to injective renaming of the existentials. We keep one
representative per class: unused existentials dropped, the rest numbered by
first occurrence. Existentials print as ``z1, z2, ...``.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from typing import Iterable

from .lawvere import (
    ContextMismatch,
    Injection,
    Substitution,
    apply,
    compose,
    identity_subst,
    injection_subst,
    subst_term,
)
from .generators import random_atom, random_substitution
from .syntax import Atom, Signature, Var, distinct, format_atom


def existential_order(atom: Atom, bound: int) -> list:
    """Indices >= ``bound`` occurring in ``atom``, in first-occurrence order."""
    return [v for v in atom.variables() if v >= bound]


def _rename(atom: Atom, bound: int, order: list) -> Atom:
    k = len(order)
    mapping = {v: Var(bound + j) for j, v in enumerate(order)}
    terms = [Var(i) if i < bound else mapping.get(i, Var(i)) for i in range(atom.context_size)]
    return Atom(atom.predicate, tuple(subst_term(a, terms) for a in atom.args), bound + k)


@dataclass(frozen=True, slots=True)
class ExtAtom:
    bound: int
    existentials: int
    atom: Atom

    def __post_init__(self):
        if self.atom.context_size != self.bound + self.existentials:
            raise ValueError("atom context must be bound + existentials")

    @property
    def context_size(self) -> int:
        return self.atom.context_size

    @property
    def predicate(self) -> str:
        return self.atom.predicate

    def is_canonical(self) -> bool:
        return existential_order(self.atom, self.bound) == list(
            range(self.bound, self.bound + self.existentials))

    def __str__(self):
        return format_atom(self.atom, bound=self.bound)


def canonicalize(atom: Atom, bound: int) -> ExtAtom:
    """The representative of ``atom`` with ``x1..x{bound}`` bound."""
    if bound > atom.context_size:
        raise ContextMismatch(f"bound {bound} exceeds context {atom.context_size}")
    order = existential_order(atom, bound)
    if order == list(range(bound, atom.context_size)):
        return ExtAtom(bound, len(order), atom)
    return ExtAtom(bound, len(order), _rename(atom, bound, order))


def embed(atom: Atom) -> ExtAtom:
    """Unit of the monad: no existentials."""
    return ExtAtom(atom.context_size, 0, atom)


def as_ext(atom: Atom | ExtAtom) -> ExtAtom:
    return atom if isinstance(atom, ExtAtom) else embed(atom)


def int_map(f: Substitution, e: ExtAtom) -> ExtAtom:
    """Action of ``f: n -> n'`` on an extended atom over ``n'``.

    ``f`` acts on the bound variables; each existential stays a distinct fresh
    variable (the arrow ``f + k``).
    """
    if f.target != e.bound:
        raise ContextMismatch(f"substitution targets {f.target}, atom is bound over {e.bound}")
    return canonicalize(apply(f.extend(e.existentials), e.atom), f.source)


def reindex_injection(i: Injection, e: ExtAtom) -> ExtAtom:
    """Action of an injection ``i: n -> m`` sending an element at ``n`` to ``m``."""
    return int_map(injection_subst(i), e)


# ------------------------------------------------------------------ monad


@dataclass(frozen=True, slots=True)
class NestedExtAtom:
    """``k`` outer existentials over ``n``, then ``inner`` bound over ``n + k``."""

    bound: int
    existentials: int
    inner: ExtAtom

    def __post_init__(self):
        if self.inner.bound != self.bound + self.existentials:
            raise ValueError("inner bound must be outer bound + outer existentials")


def nest(e: ExtAtom) -> NestedExtAtom:
    """Unit at the outer level (``eta`` applied to an extended atom)."""
    return NestedExtAtom(e.bound, 0, e)


def nest_inner(e: ExtAtom) -> NestedExtAtom:
    """``eta`` applied inside: the existentials of ``e`` become outer ones."""
    return NestedExtAtom(e.bound, e.existentials, embed(e.atom))


def flatten(ne: NestedExtAtom) -> ExtAtom:
    """Multiplication: merge outer then inner existentials over the outer bound."""
    return canonicalize(ne.inner.atom, ne.bound)


@dataclass(frozen=True, slots=True)
class TripleNestedExtAtom:
    bound: int
    outer: int
    middle: int
    inner: ExtAtom

    def __post_init__(self):
        if self.inner.bound != self.bound + self.outer + self.middle:
            raise ValueError("inconsistent nesting")


def flatten_outer(t: TripleNestedExtAtom) -> NestedExtAtom:
    """``mu`` at the outer two levels."""
    return NestedExtAtom(t.bound, t.outer + t.middle, t.inner)


def flatten_inner(t: TripleNestedExtAtom) -> NestedExtAtom:
    """``mu`` applied under the outer level."""
    middle = flatten(NestedExtAtom(t.bound + t.outer, t.middle, t.inner))
    return NestedExtAtom(t.bound, t.outer, middle)


# ------------------------------------------------------------ set carriers


def _shape(atom: Atom, bound: int) -> tuple:
    def key(t):
        if isinstance(t, Var):
            return (0, t.index) if t.index < bound else (0, -1)
        return (1, t.symbol, tuple(key(a) for a in t.args))
    return (atom.predicate, tuple(key(a) for a in atom.args))


_MAX_TIE_PERMUTATIONS = 5040


def _joint_canonical(atoms: list, bound: int) -> tuple:
    # (k, canonical atoms, existentials of the input in canonical order)
    if not atoms:
        return 0, (), []
    if all(v < bound for a in atoms for v in a.variables()):
        return 0, tuple(sorted((a.widen(bound) for a in atoms), key=Atom.key)), []
    groups: dict = {}
    for a in atoms:
        groups.setdefault(_shape(a, bound), []).append(a)
    ordered = [groups[s] for s in sorted(groups)]
    ties = math.prod(math.factorial(len(g)) for g in ordered)
    if ties > _MAX_TIE_PERMUTATIONS:
        choices = [ordered]
    else:
        choices = itertools.product(*(itertools.permutations(g) for g in ordered))
    best = None
    for choice in choices:
        seq = [a for g in choice for a in g]
        order: list = []
        for a in seq:
            for v in a.variables():
                if v >= bound and v not in order:
                    order.append(v)
        renamed = tuple(_rename(a, bound, order) for a in seq)
        key = tuple(a.key() for a in renamed)
        if best is None or key < best[0]:
            best = (key, order, renamed)
    k = len(best[1])
    return k, tuple(a.widen(bound + k) for a in best[2]), best[1]


def joint_renaming(atoms: Iterable[Atom], bound: int) -> Substitution:
    """The renaming that puts a set of atoms sharing existentials in canonical form.

    The atoms are over one context ``c >= bound``; the result is a permutation
    ``c -> c`` fixing ``x1..x{bound}`` and sending the existentials to
    ``bound .. bound+k-1`` in the order chosen by :meth:`ExtSet.of`. Slots that
    do not occur go last.
    """
    atoms = distinct(atoms)
    if not atoms:
        return identity_subst(bound)
    c = atoms[0].context_size
    _, _, order = _joint_canonical(atoms, bound)
    slot = {v: bound + j for j, v in enumerate(order)}
    unused = [v for v in range(bound, c) if v not in slot]
    slot.update({v: bound + len(order) + j for j, v in enumerate(unused)})
    return Substitution(c, c, tuple(Var(i) if i < bound else Var(slot[i]) for i in range(c)))


@dataclass(frozen=True, slots=True)
class ExtSet:
    """A finite set of atoms over ``bound`` sharing ``existentials`` fresh variables.

    This is the value of one clause body after matching: ``edge(x1,z1)`` and
    ``connected(z1,x2)`` share ``z1``. Build with :meth:`of`, which puts the set
    in canonical form (duplicates dropped, existentials renumbered, atoms in a
    fixed order) so that equal sets compare equal.
    """

    bound: int
    existentials: int
    atoms: tuple

    @classmethod
    def of(cls, atoms: Iterable[Atom], bound: int) -> ExtSet:
        atoms = distinct(atoms)
        k, canon, _ = _joint_canonical(atoms, bound)
        return cls(bound, k, canon)

    def members(self) -> frozenset:
        """The set of extended atoms, each canonical on its own (sharing forgotten)."""
        return frozenset(canonicalize(a, self.bound) for a in self.atoms)

    def reindex(self, f: Substitution) -> ExtSet:
        if f.target != self.bound:
            raise ContextMismatch("substitution does not target the bound context")
        g = f.extend(self.existentials)
        return ExtSet.of((apply(g, a) for a in self.atoms), f.source)

    def __iter__(self):
        return iter(self.atoms)

    def __len__(self):
        return len(self.atoms)

    def __str__(self):
        return "{" + ", ".join(format_atom(a, bound=self.bound) for a in self.atoms) + "}"


def pointwise(value: Iterable[ExtSet]) -> frozenset:
    """Forget sharing: a set of sets of extended atoms."""
    return frozenset(s.members() for s in value)


def format_value(value: Iterable) -> str:
    """Print a set of sets (of atoms, extended atoms or ExtSets) deterministically."""
    inner = []
    for s in value:
        if isinstance(s, ExtSet):
            inner.append(str(s))
        else:
            inner.append("{" + ", ".join(sorted(str(a) for a in s)) + "}")
    return "{" + ", ".join(sorted(inner)) + "}"


def dist_law(bound: int, existentials: int, value: Iterable[Iterable[Atom]]) -> frozenset:
    """The comparison from an extended set-of-sets to a set-of-sets of extended atoms.

    ``value`` holds atoms over ``bound + existentials``; each atom is sent to its
    own class, so existentials shared between atoms are not tracked.
    """
    ctx = bound + existentials
    out = set()
    for s in value:
        inner = set()
        for a in s:
            if a.context_size != ctx:
                raise ContextMismatch(f"atom over {a.context_size}, expected {ctx}")
            inner.add(canonicalize(a, bound))
        out.add(frozenset(inner))
    return frozenset(out)


# ------------------------------------------------------------ law checking


@dataclass
class LawReport:
    name: str
    checked: int = 0
    violations: list = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def record(self, law: str, holds: bool, detail):
        """Count one check; ``detail`` may be a callable, evaluated only on failure."""
        self.checked += 1
        if not holds:
            self.violations.append({"law": law, "sample": detail() if callable(detail) else detail})

    def note(self, key: str, amount: int = 1):
        self.notes[key] = self.notes.get(key, 0) + amount

    def merge(self, other: LawReport) -> LawReport:
        self.checked += other.checked
        self.violations.extend(other.violations)
        for k, v in other.notes.items():
            self.note(k, v)
        return self

    def as_dict(self) -> dict:
        out = {"check": self.name, "checked": self.checked,
               "violations": self.violations, "ok": self.ok}
        if self.notes:
            out["notes"] = dict(self.notes)
        return out


def _lowest_context(signature: Signature) -> int:
    # without constants there are no atoms over the empty context
    return 0 if signature.constants else 1


def random_ext_atom(rng: random.Random, signature: Signature, bound: int,
                    max_existentials: int = 3, max_depth: int = 2) -> ExtAtom:
    k = rng.randint(0, max_existentials)
    return canonicalize(random_atom(rng, signature, bound + k, max_depth), bound)


def check_monad_laws(signature: Signature, samples: int = 1000, seed: int = 0,
                     max_bound: int = 3) -> LawReport:
    """Unit and associativity laws of (embed, flatten) on random samples."""
    rng = random.Random(seed)
    report = LawReport("monad")
    lo = _lowest_context(signature)
    if not signature.predicates:
        return report
    for _ in range(samples):
        n = rng.randint(lo, max_bound)
        e = random_ext_atom(rng, signature, n)
        report.record("left unit", flatten(nest(e)) == e, str(e))
        report.record("right unit", flatten(nest_inner(e)) == e, str(e))
        # triple nesting: split the existentials of a random atom into three layers
        k, l = rng.randint(0, 2), rng.randint(0, 2)
        inner = random_ext_atom(rng, signature, n + k + l)
        t = TripleNestedExtAtom(n, k, l, inner)
        left = flatten(flatten_outer(t))
        right = flatten(flatten_inner(t))
        report.record("associativity", left == right,
                      f"{format_atom(inner.atom, bound=inner.bound)} over {n}+{k}+{l}")
    return report


def check_canonical_invariance(signature: Signature, samples: int = 500, seed: int = 0,
                               max_bound: int = 3) -> LawReport:
    """``canonicalize`` is blind to injective renamings that fix the bound variables."""
    rng = random.Random(seed)
    report = LawReport("canonical-invariance")
    lo = _lowest_context(signature)
    if not signature.predicates:
        return report
    for _ in range(samples):
        n = rng.randint(lo, max_bound)
        k = rng.randint(0, 3)
        a = random_atom(rng, signature, n + k, 2)
        extra = rng.randint(0, 3)
        slots = rng.sample(range(n, n + k + extra), k)
        iota = Injection(n + k, n + k + extra, tuple(range(n)) + tuple(slots))
        b = apply(injection_subst(iota), a)
        ca = canonicalize(a, n)
        report.record("injection invariance", ca == canonicalize(b, n), str(ca))
        report.record("idempotence", canonicalize(ca.atom, n) == ca, str(ca))
    return report


def check_functor_laws(signature: Signature, samples: int = 500, seed: int = 0) -> LawReport:
    """``int_map`` preserves identities and composition."""
    rng = random.Random(seed)
    report = LawReport("int-functor")
    lo = _lowest_context(signature)
    if not signature.predicates:
        return report
    for _ in range(samples):
        n2 = rng.randint(lo, 3)
        e = random_ext_atom(rng, signature, n2)
        report.record("identity", int_map(identity_subst(n2), e) == e, str(e))
        n1, n0 = rng.randint(lo, 3), rng.randint(lo, 3)
        f = random_substitution(rng, signature, n1, n2, 1)
        g = random_substitution(rng, signature, n0, n1, 1)
        report.record("composition",
                      int_map(compose(g, f), e) == int_map(g, int_map(f, e)),
                      f"{e} under {f} then {g}")
    return report


def check_dist_naturality(signature: Signature, samples: int = 200, seed: int = 0) -> LawReport:
    """The distributive law commutes with reindexing along injections."""
    rng = random.Random(seed)
    report = LawReport("dist-naturality")
    lo = _lowest_context(signature)
    if not signature.predicates:
        return report
    for _ in range(samples):
        n = rng.randint(lo, 2)
        k = rng.randint(0, 2)
        value = [[random_atom(rng, signature, n + k, 1) for _ in range(rng.randint(0, 3))]
                 for _ in range(rng.randint(0, 3))]
        m = n + rng.randint(0, 2)
        i = Injection(n, m, tuple(rng.sample(range(m), n)))
        g = injection_subst(i).extend(k)
        moved = [[apply(g, a) for a in s] for s in value]
        left = dist_law(m, k, moved)
        right = frozenset(frozenset(reindex_injection(i, e) for e in s)
                          for s in dist_law(n, k, value))
        report.record("naturality", left == right, f"{len(value)} sets over {n}+{k}")
    return report
