"""Saturated values: the extended step tabulated over every substitution in a bound.

For an atom ``A`` over ``n`` the saturated value records, for every arrow
``f: m -> n`` with ``m <= M`` and term depth ``<= d``, the extended step of
``f(A)``. Desaturating reads the identity entry back. A table is coherent when
moving an entry along any further ``g: m' -> m`` lands below the entry for
``g . f``, with equality when ``g`` only renames variables injectively.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .coalgebra import reindex_value, step_ext, value_leq
from .intfunctor import format_value
from .lawvere import (
    Substitution,
    apply,
    compose,
    enumerate_substitutions,
    format_substitution,
    identity_subst,
    substitution_depth,
)
from .syntax import App, Atom, Program, Signature, Var, enumerate_terms, format_atom


@dataclass(frozen=True, slots=True)
class Bounds:
    max_context: int
    max_depth: int

    def __post_init__(self):
        if self.max_context < 0 or self.max_depth < 0:
            raise ValueError("bounds must be non-negative")

    @classmethod
    def default(cls, n: int) -> Bounds:
        return cls(n + 2, 2)

    def admits(self, sub: Substitution) -> bool:
        return sub.source <= self.max_context and substitution_depth(sub) <= self.max_depth


@dataclass(frozen=True)
class SaturatedValue:
    root: Atom
    bounds: Bounds
    table: dict = field(repr=False)
    signature: Signature = field(default=None, repr=False, compare=False)

    def __getitem__(self, sub: Substitution) -> frozenset:
        return self.table[sub]

    def corrupted(self, sub: Substitution, value: frozenset) -> SaturatedValue:
        """A copy with one entry replaced; used to test the coherence checker."""
        if sub not in self.table:
            raise KeyError(f"{sub} is outside the table")
        table = dict(self.table)
        table[sub] = value
        return SaturatedValue(self.root, self.bounds, table, self.signature)

    def as_dict(self) -> dict:
        return {
            "root": format_atom(self.root),
            "bounds": {"max_context": self.bounds.max_context, "max_depth": self.bounds.max_depth},
            "table": {table_key(s): value_strings(v) for s, v in self.table.items()},
        }


def table_key(sub: Substitution) -> str:
    """``m:{x1->t1, ...}``; the source context is part of the key."""
    return f"{sub.source}:{format_substitution(sub)}"


def value_strings(value: frozenset) -> list:
    return sorted(str(s) for s in value)


def saturate(program: Program, atom: Atom, bounds: Bounds | None = None) -> SaturatedValue:
    n = atom.context_size
    bounds = bounds or Bounds.default(n)
    table = {}
    for m in range(bounds.max_context + 1):
        for sub in enumerate_substitutions(program.signature, m, n, bounds.max_depth):
            table[sub] = step_ext(program, apply(sub, atom))
    return SaturatedValue(atom, bounds, table, program.signature)


def desaturate(sat: SaturatedValue) -> frozenset:
    return sat.table[identity_subst(sat.root.context_size)]


# ----------------------------------------------------------------- coherence


@dataclass
class CoherenceReport:
    checked: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def as_dict(self) -> dict:
        return {"check": "saturation", "checked": self.checked,
                "violations": self.violations, "ok": self.ok}


def _var_depths(sub: Substitution) -> dict:
    # deepest position of each variable among the terms of ``sub``
    out: dict = {}

    def walk(t, d):
        if isinstance(t, Var):
            out[t.index] = max(out.get(t.index, 0), d)
        else:
            for a in t.args:
                walk(a, d + 1)

    for t in sub.terms:
        walk(t, 0)
    return out


def _continuations(signature, f: Substitution, m2: int, depth: int):
    """Every ``g: m2 -> f.source`` that matters for ``g . f`` within ``depth``.

    Only the values of ``g`` on variables occurring in ``f`` affect ``g . f``
    or the moved entry, so the other components take one fixed term. Each
    occurring variable ranges over terms shallow enough to keep ``g . f``
    within ``depth``.
    """
    m = f.source
    used = _var_depths(f)
    filler = [Var(0)] if m2 else [App(c) for c in signature.constants[:1]]
    if not filler and len(used) < m:
        return
    pools = []
    for v in range(m):
        if v in used:
            pools.append(enumerate_terms(signature, m2, depth - used[v]))
        else:
            pools.append(filler)
    occurring = sorted(used)
    for terms in itertools.product(*pools):
        g = Substitution(m2, m, tuple(terms))
        renaming = [terms[v] for v in occurring]
        injective = (all(isinstance(t, Var) for t in renaming)
                     and len(set(renaming)) == len(renaming) and m <= m2)
        yield g, injective


def check_coherence(sat: SaturatedValue, bounds: Bounds | None = None) -> CoherenceReport:
    """Entries moved along ``g`` sit below the entry at ``g . f``; equal for injective renamings."""
    bounds = bounds or sat.bounds
    signature = sat.signature
    report = CoherenceReport()
    for f, value in sat.table.items():
        if not bounds.admits(f):
            continue
        for m2 in range(bounds.max_context + 1):
            for g, injective in _continuations(signature, f, m2, bounds.max_depth):
                if not value and not injective:
                    # the empty set is below everything; g . f is in the table by construction
                    report.checked += 1
                    continue
                gf = compose(g, f)
                target = sat.table.get(gf)
                if target is None:
                    continue
                moved = reindex_value(g, value)
                ok = moved == target or (not injective and value_leq(moved, target))
                report.checked += 1
                if not ok:
                    report.violations.append({
                        "f": table_key(f), "g": table_key(g),
                        "relation": "=" if injective else "<=",
                        "moved": format_value(moved), "entry": format_value(target),
                    })
    return report


def saturation_report(program: Program, atom: Atom, bounds: Bounds | None = None) -> CoherenceReport:
    return check_coherence(saturate(program, atom, bounds))


def check_naturality(program: Program, atom: Atom, sigma: Substitution,
                     bounds: Bounds | None = None) -> list:
    """Entries of the saturation at ``sigma(A)`` that disagree with the ``sigma``-reindexed table of ``A``."""
    base = saturate(program, atom, bounds)
    moved = saturate(program, apply(sigma, atom), bounds)
    bad = []
    for tau, value in moved.table.items():
        other = base.table.get(compose(tau, sigma))
        if other is not None and other != value:
            bad.append(table_key(tau))
    return bad


def extends(small: SaturatedValue, large: SaturatedValue) -> bool:
    """Every entry of ``small`` appears unchanged in ``large``."""
    return all(large.table.get(s) == v for s, v in small.table.items())

