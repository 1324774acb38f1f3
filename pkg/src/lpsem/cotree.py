"""Coinductive and-or trees, cut at a depth bound.

An and-node holds a goal atom. Its or-nodes (drawn as ``•``) are the clauses
whose head matches the goal, and each or-node's children are the distinct
atoms of the matched body. Fresh body variables extend the context: a node's
atom lives over the root's bound variables plus every existential introduced
on the path to it, and prints those as ``z1, z2, ...``.

Existentials of one or-node are numbered canonically (the order used by
:class:`~lpsem.intfunctor.ExtSet`), so trees built from atoms that differ
only by a renaming of existentials are structurally equal.
"""

from __future__ import annotations

import functools
import json
from dataclasses import dataclass, field
from typing import Iterator

from .intfunctor import ExtAtom, canonicalize, joint_renaming
from .lawvere import (
    ContextMismatch,
    Substitution,
    apply,
    clause_matcher,
    compose,
)
from .syntax import Atom, Program, distinct, format_atom, format_term, parse_atom


@dataclass(frozen=True, slots=True)
class OrNode:
    clause_index: int
    matcher: Substitution
    children: tuple = ()


@dataclass(frozen=True, slots=True)
class AndNode:
    atom: Atom
    or_nodes: tuple = ()
    truncated: bool = False

    def nodes(self) -> Iterator[AndNode]:
        yield self
        for o in self.or_nodes:
            for c in o.children:
                yield from c.nodes()


@dataclass(frozen=True)
class CoTree:
    root: AndNode
    bound: int
    depth: int
    program: Program = field(compare=False, repr=False, default=None)

    @property
    def atom(self) -> Atom:
        return self.root.atom

    def ext_atom(self, node: AndNode) -> ExtAtom:
        return canonicalize(node.atom, self.bound)

    def size(self) -> int:
        return sum(1 for _ in self.root.nodes())


def _expand(program: Program, atom: Atom) -> Iterator[tuple]:
    # (clause index, matcher, children atoms) for every clause whose head matches
    for idx, clause in program.numbered():
        theta = clause_matcher(clause, atom)
        if theta is None:
            continue
        raw = distinct(apply(theta, b) for b in clause.body)
        if not raw:
            yield idx, theta, ()
            continue
        pi = joint_renaming(raw, atom.context_size)
        yield idx, compose(pi, theta), tuple(apply(pi, a) for a in raw)


@functools.lru_cache(maxsize=200_000)
def _build(program: Program, atom: Atom, depth: int) -> AndNode:
    if depth == 0:
        return AndNode(atom, (), True)
    return AndNode(atom, tuple(
        OrNode(idx, theta, tuple(_build(program, a, depth - 1) for a in kids))
        for idx, theta, kids in _expand(program, atom)
    ))


def build_cotree(program: Program, root: Atom | ExtAtom, depth: int) -> CoTree:
    """The coinductive tree of ``root`` with and-nodes of generation ``depth`` truncated."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    if isinstance(root, ExtAtom):
        return CoTree(_build(program, root.atom, depth), root.bound, depth, program)
    return CoTree(_build(program, root, depth), root.context_size, depth, program)


def _truncate(node: AndNode, depth: int) -> AndNode:
    if node.truncated:
        return node
    if depth == 0:
        return AndNode(node.atom, (), True)
    return AndNode(node.atom, tuple(
        OrNode(o.clause_index, o.matcher, tuple(_truncate(c, depth - 1) for c in o.children))
        for o in node.or_nodes
    ))


def truncate(tree: CoTree, depth: int) -> CoTree:
    if not 0 <= depth <= tree.depth:
        raise ValueError(f"cannot truncate a depth-{tree.depth} tree to {depth}")
    return CoTree(_truncate(tree.root, depth), tree.bound, depth, tree.program)


def conformance_problems(program: Program, tree: CoTree) -> list:
    """Every expanded node must carry exactly the or-nodes and children a fresh expansion gives."""
    problems = []
    for node in tree.root.nodes():
        if node.truncated:
            continue
        expected = [(i, th, kids) for i, th, kids in _expand(program, node.atom)]
        actual = [(o.clause_index, o.matcher, tuple(c.atom for c in o.children))
                  for o in node.or_nodes]
        if actual != expected:
            problems.append(format_atom(node.atom, bound=tree.bound))
    return problems


# ---------------------------------------------------------------- substitution


def _subst(program: Program, node: AndNode, g: Substitution) -> AndNode:
    # g: c' -> c, where node.atom lives over c
    atom = apply(g, node.atom)
    if node.truncated:
        return AndNode(atom, (), True)
    c = node.atom.context_size
    ors = []
    for o in node.or_nodes:
        e = o.matcher.source - c
        ge = g.extend(e)
        theta = compose(ge, o.matcher)
        # prune or-nodes whose clause head no longer matches the substituted goal
        if apply(theta, program.clause(o.clause_index).head) != atom.widen(theta.source):
            continue
        moved = [apply(ge, ch.atom) for ch in o.children]
        pi = joint_renaming(moved, atom.context_size) if moved else None
        if pi is not None:
            theta = compose(pi, theta)
            gc = compose(pi, ge)
        else:
            gc = ge
        kids = distinct(_subst(program, ch, gc) for ch in o.children)
        ors.append(OrNode(o.clause_index, theta, tuple(kids)))
    return AndNode(atom, tuple(distinct(ors)))


def subst_tree(sub: Substitution, tree: CoTree) -> CoTree:
    """Apply ``sub`` to every node, carrying existentials along, then prune.

    ``sub`` is an arrow ``n' -> n`` where ``n`` is the tree's bound context.
    Or-nodes whose matcher stops matching are dropped and identical children
    are merged, so the result may have fewer or-nodes than the tree built for
    the substituted root, never more.
    """
    if sub.target != tree.bound:
        raise ContextMismatch(f"substitution targets {sub.target}, tree is bound over {tree.bound}")
    if tree.program is None:
        raise ValueError("tree does not record its program")
    g = sub.extend(tree.root.atom.context_size - tree.bound)
    return CoTree(_subst(tree.program, tree.root, g), sub.source, tree.depth, tree.program)


# ---------------------------------------------------------------------- order


@dataclass(frozen=True, slots=True)
class TreeOrderWitness:
    holds: bool
    depth: int
    path: tuple = ()

    def __bool__(self):
        return self.holds

    def __str__(self):
        if self.holds:
            return "Holds"
        return "FailsAt(" + " / ".join(self.path) + ")"


def _leq(a: AndNode, b: AndNode, depth: int):
    """None when ``a <= b``, otherwise the first or-node of ``a`` without a partner."""
    if a.atom != b.atom:
        return ()
    if depth == 0 or a.truncated or b.truncated:
        return None
    for o1 in a.or_nodes:
        if not any(
            all(any(c1.atom == c2.atom and _leq(c1, c2, depth - 1) is None
                    for c2 in o2.children)
                for c1 in o1.children)
            for o2 in b.or_nodes
        ):
            return (f"•{o1.clause_index}",)
    return None


def tree_leq(t1: CoTree, t2: CoTree, depth: int | None = None) -> TreeOrderWitness:
    """The finite-powerset order lifted to trees, compared down to the shallower bound.

    ``t1 <= t2`` when every or-node of ``t1``'s root has an or-node of ``t2``'s
    root covering its children: each child of the first has an equal-atom child
    of the second with a larger subtree.
    """
    if t1.root.atom != t2.root.atom or t1.bound != t2.bound:
        raise ValueError("trees have different roots")
    d = min(t1.depth, t2.depth) if depth is None else min(depth, t1.depth, t2.depth)
    bad = _leq(t1.root, t2.root, d)
    if bad is None:
        return TreeOrderWitness(True, d)
    return TreeOrderWitness(False, d, (format_atom(t1.root.atom, bound=t1.bound),) + bad)


# --------------------------------------------------------------------- export


def _ascii(node: AndNode, bound: int, indent: int, out: list):
    pad = "  " * indent
    mark = " ..." if node.truncated else ""
    out.append(f"{pad}{format_atom(node.atom, bound=bound)}{mark}")
    for o in node.or_nodes:
        out.append(f"{pad}  • {o.clause_index}")
        for c in o.children:
            _ascii(c, bound, indent + 2, out)


def _dot_label(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def _dot(tree: CoTree) -> str:
    lines = ["digraph cotree {", "  node [fontname=\"Helvetica\"];"]
    counter = iter(range(1 << 30))

    def visit(node: AndNode) -> str:
        me = f"a{next(counter)}"
        label = _dot_label(format_atom(node.atom, bound=tree.bound))
        style = ", style=dashed" if node.truncated else ""
        lines.append(f'  {me} [label="{label}", shape=plaintext{style}];')
        for o in node.or_nodes:
            oid = f"o{next(counter)}"
            lines.append(f'  {oid} [label="", xlabel="{o.clause_index}", shape=circle, '
                         f'style=filled, fillcolor=black, width=0.12, height=0.12];')
            lines.append(f"  {me} -> {oid};")
            for c in o.children:
                lines.append(f"  {oid} -> {visit(c)};")
        return me

    visit(tree.root)
    lines.append("}")
    return "\n".join(lines) + "\n"


def _json_node(node: AndNode, bound: int) -> dict:
    return {
        "atom": format_atom(node.atom, bound=bound),
        "context": node.atom.context_size,
        "truncated": node.truncated,
        "or_nodes": [
            {
                "clause": o.clause_index,
                "matcher": {
                    "source": o.matcher.source,
                    "target": o.matcher.target,
                    "terms": [format_term(t, bound=bound) for t in o.matcher.terms],
                },
                "children": [_json_node(c, bound) for c in o.children],
            }
            for o in node.or_nodes
        ],
    }


def tree_to_dict(tree: CoTree) -> dict:
    return {"bound": tree.bound, "depth": tree.depth, "root": _json_node(tree.root, tree.bound)}


def _read_node(data: dict, bound: int) -> AndNode:
    atom = parse_atom(data["atom"], data["context"], canonical=True, bound=bound)
    ors = []
    for o in data["or_nodes"]:
        m = o["matcher"]
        terms = tuple(
            parse_atom(f"t({t})", m["source"], canonical=True, bound=bound).args[0]
            for t in m["terms"]
        )
        ors.append(OrNode(o["clause"], Substitution(m["source"], m["target"], terms),
                          tuple(_read_node(c, bound) for c in o["children"])))
    return AndNode(atom, tuple(ors), data["truncated"])


def tree_from_dict(data: dict, program: Program | None = None) -> CoTree:
    return CoTree(_read_node(data["root"], data["bound"]), data["bound"], data["depth"], program)


EXPORT_FORMATS = ("ascii", "dot", "json")


def export_tree(tree: CoTree, fmt: str = "ascii") -> str:
    match fmt:
        case "ascii":
            out: list = []
            _ascii(tree.root, tree.bound, 0, out)
            return "\n".join(out) + "\n"
        case "dot":
            return _dot(tree)
        case "json":
            return json.dumps(tree_to_dict(tree), indent=2) + "\n"
        case _:
            raise ValueError(f"unknown format {fmt!r}; expected one of {', '.join(EXPORT_FORMATS)}")


def or_node_summary(node: AndNode, bound: int) -> list:
    """``(clause, [child atoms])`` per or-node, printed; handy for golden comparisons."""
    return [(o.clause_index, [format_atom(c.atom, bound=bound) for c in o.children])
            for o in node.or_nodes]

