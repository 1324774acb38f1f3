"""Seeded random terms, atoms, substitutions and programs for the law checks."""

from __future__ import annotations

import random

from .lawvere import Substitution, subst_term
from .syntax import App, Atom, Clause, Program, Signature, Var

LISTNAT_SIGNATURE = Signature(
    functions=(("0", 0), ("s", 1), ("nil", 0), ("cons", 2)),
    predicates=(("nat", 1), ("list", 1)),
)


def random_term(rng: random.Random, signature: Signature, n: int, depth: int):
    leaves = [Var(i) for i in range(n)] + [App(c) for c in signature.constants]
    compound = [(f, k) for f, k in signature.functions if k > 0]
    if depth > 0 and compound and (not leaves or rng.random() < 0.5):
        f, k = rng.choice(compound)
        return App(f, tuple(random_term(rng, signature, n, depth - 1) for _ in range(k)))
    if not leaves:
        raise ValueError("signature has no ground terms and the context is empty")
    return rng.choice(leaves)


def _has_terms(signature: Signature, n: int) -> bool:
    return n > 0 or bool(signature.constants)


def random_atom(rng: random.Random, signature: Signature, n: int, depth: int) -> Atom:
    preds = [(p, k) for p, k in signature.predicates if k == 0 or _has_terms(signature, n)]
    if not preds:
        raise ValueError("no atoms exist over this context")
    p, k = rng.choice(preds)
    return Atom(p, tuple(random_term(rng, signature, n, depth) for _ in range(k)), n)


def random_substitution(rng: random.Random, signature: Signature, n: int, m: int,
                        depth: int) -> Substitution:
    if m and not _has_terms(signature, n):
        raise ValueError("no terms over this context")
    return Substitution(n, m, tuple(random_term(rng, signature, n, depth) for _ in range(m)))


def random_signature(rng: random.Random) -> Signature:
    functions = [("a", 0), ("b", 0)]
    if rng.random() < 0.8:
        functions.append(("f", 1))
    if rng.random() < 0.5:
        functions.append(("g", 2))
    preds = [("p", 1), ("q", rng.randint(1, 2)), ("r", rng.randint(0, 2))]
    return Signature(tuple(functions), tuple(preds))


def _rename_vars(atom: Atom, mapping: dict, n: int) -> Atom:
    terms = [mapping.get(i) for i in range(atom.context_size)]
    return Atom(atom.predicate, tuple(subst_term(a, terms) for a in atom.args), n)


def random_program(rng: random.Random, clauses: int = 5, existential: bool = False,
                   max_vars: int = 2, depth: int = 1) -> Program:
    """A random program; body variables come from the head unless ``existential``."""
    sig = random_signature(rng)
    out = []
    for _ in range(rng.randint(1, clauses)):
        k = rng.randint(0, max_vars)
        head = random_atom(rng, sig, k, depth)
        head_vars = sorted(set(head.variables()))
        body = []
        for _ in range(rng.choice([0, 0, 1, 1, 2])):
            if existential:
                body.append(random_atom(rng, sig, k, depth))
            else:
                b = random_atom(rng, sig, len(head_vars), depth)
                to_head = {j: Var(v) for j, v in enumerate(head_vars)}
                body.append(_rename_vars(b, to_head, k))
        # the clause context is its variables in first-occurrence order
        order: list = []
        for a in (head, *body):
            order.extend(v for v in a.variables() if v not in order)
        mapping = {v: Var(j) for j, v in enumerate(order)}
        n = len(order)
        out.append(Clause(_rename_vars(head, mapping, n),
                          tuple(_rename_vars(b, mapping, n) for b in body), n))
    return Program(sig, tuple(out))
