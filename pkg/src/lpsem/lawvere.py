"""Substitutions as arrows of the Lawvere theory generated by a signature.

An arrow ``n -> m`` is an m-tuple of terms over ``x1..xn``. Acting on atoms it
goes the other way: an atom over ``m`` becomes an atom over ``n`` by
simultaneous replacement of ``x_i`` with the i-th term.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .syntax import (
    App,
    Atom,
    Clause,
    Signature,
    Term,
    Var,
    _max_var,
    enumerate_terms,
    format_term,
    term_depth,
)


class ContextMismatch(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class Substitution:
    source: int
    target: int
    terms: tuple

    def __post_init__(self):
        if len(self.terms) != self.target:
            raise ValueError(f"{len(self.terms)} terms for target context {self.target}")
        for t in self.terms:
            if _max_var(t) >= self.source:
                raise ValueError(f"term {format_term(t)} is not over context {self.source}")

    def __str__(self):
        return format_substitution(self)

    def is_identity(self) -> bool:
        return self.source == self.target and all(
            t == Var(i) for i, t in enumerate(self.terms)
        )

    def extend(self, k: int) -> Substitution:
        """``f + k``: act as ``self`` on the first variables, as identity on k more."""
        if k == 0:
            return self
        s = self.source
        return Substitution(s + k, self.target + k,
                            self.terms + tuple(Var(s + j) for j in range(k)))


def subst_term(t: Term, terms: Sequence) -> Term:
    if isinstance(t, Var):
        return terms[t.index]
    if t._top < 0:
        return t
    return App(t.symbol, tuple(subst_term(a, terms) for a in t.args))


def apply(sub: Substitution, atom: Atom) -> Atom:
    """The action ``At(sub)``: an atom over ``sub.target`` to one over ``sub.source``."""
    if atom.context_size != sub.target:
        raise ContextMismatch(
            f"atom over context {atom.context_size}, substitution targets {sub.target}"
        )
    return Atom(atom.predicate, tuple(subst_term(a, sub.terms) for a in atom.args), sub.source)


def compose(g: Substitution, f: Substitution) -> Substitution:
    """``g: k -> n`` after ``f: n -> m``, giving ``k -> m``.

    ``apply(compose(g, f), A) == apply(g, apply(f, A))``.
    """
    if g.target != f.source:
        raise ContextMismatch(f"cannot compose {g.source}->{g.target} with {f.source}->{f.target}")
    return Substitution(g.source, f.target, tuple(subst_term(t, g.terms) for t in f.terms))


def identity_subst(n: int) -> Substitution:
    return Substitution(n, n, tuple(Var(i) for i in range(n)))


@dataclass(frozen=True, slots=True)
class Injection:
    """An injective map ``{0..source-1} -> {0..target-1}``."""

    source: int
    target: int
    mapping: tuple

    def __post_init__(self):
        if len(self.mapping) != self.source:
            raise ValueError("mapping length must equal source")
        if len(set(self.mapping)) != self.source:
            raise ValueError(f"{self.mapping} is not injective")
        if any(not 0 <= j < self.target for j in self.mapping):
            raise ValueError(f"{self.mapping} leaves target {self.target}")

    def then(self, other: Injection) -> Injection:
        """``other`` after ``self``."""
        if self.target != other.source:
            raise ContextMismatch("injections do not compose")
        return Injection(self.source, other.target,
                         tuple(other.mapping[j] for j in self.mapping))


def canonical_inclusion(n: int, m: int) -> Injection:
    return Injection(n, m, tuple(range(n)))


def injection_subst(i: Injection) -> Substitution:
    """The renaming arrow ``J(i): m -> n`` for an injection ``i: n -> m``.

    Applying it to an atom over ``n`` renames ``x_j`` to ``x_{i(j)}``, giving
    the same atom seen over ``m``.
    """
    return Substitution(i.target, i.source, tuple(Var(j) for j in i.mapping))


def enumerate_injections(n: int, m: int) -> list:
    return [Injection(n, m, p) for p in itertools.permutations(range(m), n)]


def enumerate_substitutions(signature: Signature, n: int, m: int, depth: int) -> list:
    """All arrows ``n -> m`` whose terms have depth <= ``depth``."""
    terms = enumerate_terms(signature, n, depth)
    return [Substitution(n, m, ts) for ts in itertools.product(terms, repeat=m)]


def substitution_depth(sub: Substitution) -> int:
    return max((term_depth(t) for t in sub.terms), default=0)


def format_substitution(sub: Substitution, names: Sequence | None = None,
                        target_names: Sequence | None = None,
                        omit_identity: bool = False) -> str:
    """``{x1->t1, x2->t2}``; keys are target variables, values terms over the source."""
    parts = []
    for i, t in enumerate(sub.terms):
        if omit_identity and t == Var(i) and (
                names is None or target_names is None
                or (i < len(names) and names[i] == target_names[i])):
            continue
        key = target_names[i] if target_names is not None else f"x{i + 1}"
        parts.append(f"{key}->{format_term(t, names=names)}")
    return "{" + ", ".join(parts) + "}"


# ---------------------------------------------------------------- matching


def _match(pattern: Term, target: Term, binding: dict) -> bool:
    if isinstance(pattern, Var):
        seen = binding.get(pattern.index)
        if seen is None:
            binding[pattern.index] = target
            return True
        return seen == target
    if isinstance(target, Var) or pattern.symbol != target.symbol or len(pattern.args) != len(target.args):
        return False
    return all(_match(p, t, binding) for p, t in zip(pattern.args, target.args))


def _match_atoms(pattern: Atom, target: Atom) -> dict | None:
    if pattern.predicate != target.predicate or pattern.arity != target.arity:
        return None
    binding: dict = {}
    for p, t in zip(pattern.args, target.args):
        if not _match(p, t, binding):
            return None
    return binding


def mgm(pattern: Atom, target: Atom) -> Substitution | None:
    """Most general matcher: ``theta`` with ``apply(theta, pattern) == target``.

    ``pattern`` is over ``k``, ``target`` over ``n``; the result is ``n -> k``.
    Pattern variables that do not occur in the pattern are sent to the same
    variable of the target context, and the match is refused when that variable
    does not exist there.
    """
    binding = _match_atoms(pattern, target)
    if binding is None:
        return None
    n = target.context_size
    terms = []
    for i in range(pattern.context_size):
        t = binding.get(i)
        if t is None:
            if i >= n:
                return None
            t = Var(i)
        terms.append(t)
    return Substitution(n, pattern.context_size, tuple(terms))


def clause_matcher(clause: Clause, goal: Atom) -> Substitution | None:
    """Match ``clause.head`` against ``goal`` with fresh existentials.

    Returns ``theta: (n + e) -> k`` where ``n`` is the goal context, ``k`` the
    clause context and ``e`` the number of existential variables of the clause;
    the j-th existential goes to the fresh variable ``x_{n+j+1}``. The head
    instance ``apply(theta, head)`` is ``goal`` widened to ``n + e``.
    """
    binding = _match_atoms(clause.head, goal)
    if binding is None:
        return None
    n = goal.context_size
    for j, v in enumerate(clause.existentials):
        binding[v] = Var(n + j)
    return Substitution(n + len(clause.existentials), clause.context_size,
                        tuple(binding[i] for i in range(clause.context_size)))


# --------------------------------------------------------------- unification


def _walk(t: Term, binding: dict) -> Term:
    while isinstance(t, Var) and t.index in binding:
        t = binding[t.index]
    return t


def _occurs(v: int, t: Term, binding: dict) -> bool:
    t = _walk(t, binding)
    if isinstance(t, Var):
        return t.index == v
    return any(_occurs(v, a, binding) for a in t.args)


def _unify(a: Term, b: Term, binding: dict) -> bool:
    a, b = _walk(a, binding), _walk(b, binding)
    if isinstance(a, Var) and isinstance(b, Var):
        if a.index != b.index:
            # bind the younger variable so older (query) variables survive
            hi, lo = (a, b) if a.index > b.index else (b, a)
            binding[hi.index] = lo
        return True
    if isinstance(a, Var):
        if _occurs(a.index, b, binding):
            return False
        binding[a.index] = b
        return True
    if isinstance(b, Var):
        return _unify(b, a, binding)
    if a.symbol != b.symbol or len(a.args) != len(b.args):
        return False
    return all(_unify(x, y, binding) for x, y in zip(a.args, b.args))


def _resolve(t: Term, binding: dict) -> Term:
    t = _walk(t, binding)
    if isinstance(t, Var) or not t.args:
        return t
    return App(t.symbol, tuple(_resolve(a, binding) for a in t.args))


def mgu(a: Atom, b: Atom) -> Substitution | None:
    """Idempotent most general unifier ``n -> n`` of two atoms over one context."""
    if a.context_size != b.context_size:
        raise ContextMismatch("mgu needs atoms over one context")
    if a.predicate != b.predicate or a.arity != b.arity:
        return None
    binding: dict = {}
    for x, y in zip(a.args, b.args):
        if not _unify(x, y, binding):
            return None
    n = a.context_size
    return Substitution(n, n, tuple(_resolve(Var(i), binding) for i in range(n)))
