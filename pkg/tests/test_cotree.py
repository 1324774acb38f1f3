import itertools
import json
from importlib import resources
from pathlib import Path

import jsonschema
import pytest

from helpers import A
from lpsem.cotree import (
    EXPORT_FORMATS,
    build_cotree,
    conformance_problems,
    export_tree,
    or_node_summary,
    subst_tree,
    tree_from_dict,
    tree_leq,
    tree_to_dict,
    truncate,
)
from lpsem.lawvere import (
    ContextMismatch,
    Substitution,
    apply,
    compose,
    enumerate_injections,
    enumerate_substitutions,
    identity_subst,
    injection_subst,
)
from lpsem.syntax import Var, enumerate_atoms

GOLDEN = Path(__file__).parent / "golden"


def _summary(tree, node=None):
    return or_node_summary(node or tree.root, tree.bound)


def test_listnat_plus_ground_tree(listnat_plus):
    t = build_cotree(listnat_plus, A("list(cons(0,nil))"), 4)
    assert _summary(t) == [(4, ["nat(0)", "list(nil)"]), (5, ["list(nil)"])]
    leaves = [c for o in t.root.or_nodes for c in o.children]
    for leaf in leaves:
        (o,) = leaf.or_nodes
        assert o.clause_index in (1, 3) and o.children == ()
        assert not leaf.truncated


def test_listnat_plus_open_tree(listnat_plus):
    t = build_cotree(listnat_plus, A("list(cons(x1,x2))"), 2)
    assert _summary(t) == [(4, ["nat(x1)", "list(x2)"])]
    for c in t.root.or_nodes[0].children:
        assert c.or_nodes == () and not c.truncated


def test_gc_chain(gc):
    t = build_cotree(gc, A("connected(x1,x2)"), 4)
    node, seen = t.root, []
    for level in range(1, 5):
        (o,) = node.or_nodes
        assert o.clause_index == 2
        edge, conn = o.children
        seen.append((str(t.ext_atom(edge)), _summary(t, node)[0][1]))
        node = conn
    assert [s[1] for s in seen] == [
        ["edge(x1,z1)", "connected(z1,x2)"],
        ["edge(z1,z2)", "connected(z2,x2)"],
        ["edge(z2,z3)", "connected(z3,x2)"],
        ["edge(z3,z4)", "connected(z4,x2)"],
    ]
    assert node.truncated and node.or_nodes == ()
    # edge atoms have no clause, so they close without or-nodes
    first_edge = t.root.or_nodes[0].children[0]
    assert first_edge.or_nodes == () and not first_edge.truncated


FIG2_DEPTH3 = """\
a
  • 1
    b
    c
  • 2
    b
    d
      • 3
        a
          • 1
            b ...
            c ...
          • 2
            b ...
            d ...
        c
"""


def test_ground_tree_shape(abcd):
    assert export_tree(build_cotree(abcd, A("a"), 3), "ascii") == FIG2_DEPTH3
    deep = build_cotree(abcd, A("a"), 12)
    assert conformance_problems(abcd, deep) == []
    assert truncate(deep, 3) == build_cotree(abcd, A("a"), 3)


def test_conformance_on_corpus(corpus):
    for prog in corpus.values():
        for n in range(3):
            for atom in enumerate_atoms(prog.signature, n, 1):
                assert conformance_problems(prog, build_cotree(prog, atom, 4)) == []


def test_depth_zero_is_single_truncated_node(listnat):
    t = build_cotree(listnat, A("nat(0)"), 0)
    assert t.root.truncated and t.size() == 1
    assert export_tree(t, "ascii") == "nat(0) ...\n"
    with pytest.raises(ValueError):
        build_cotree(listnat, A("nat(0)"), -1)


def test_truncation_coherence(corpus):
    for prog in corpus.values():
        for atom in enumerate_atoms(prog.signature, 1, 1)[:20]:
            full = build_cotree(prog, atom, 5)
            for d in range(5):
                assert truncate(full, d) == build_cotree(prog, atom, d)
    with pytest.raises(ValueError):
        truncate(build_cotree(corpus["gc"], A("connected(x1,x2)"), 2), 3)


# ----------------------------------------------------------------- order


def test_tree_leq_reflexive_and_root_mismatch(gc, listnat):
    t = build_cotree(gc, A("connected(x1,x2)"), 4)
    assert tree_leq(t, t)
    assert str(tree_leq(t, t)) == "Holds"
    with pytest.raises(ValueError):
        tree_leq(t, build_cotree(gc, A("connected(x1,x1)"), 4))


def test_truncated_tree_is_least(listnat):
    atom = A("list(cons(0,nil))")
    small, big = build_cotree(listnat, atom, 0), build_cotree(listnat, atom, 4)
    assert tree_leq(small, big) and tree_leq(big, small)


def test_gc_substitution_example(gc):
    sub = Substitution(1, 2, (Var(0), Var(0)))
    moved = subst_tree(sub, build_cotree(gc, A("connected(x1,x2)"), 4))
    direct = build_cotree(gc, A("connected(x1,x1)"), 4)
    assert tree_leq(moved, direct)
    assert moved != direct
    # the substituted tree is the old chain with x2 replaced by x1
    assert _summary(moved) == [(2, ["edge(x1,z1)", "connected(z1,x1)"])]
    # the directly built tree also applies the fact connected(X,X)
    assert [o.clause_index for o in direct.root.or_nodes] == [1, 2]


def test_listnat_substitution_example(listnat):
    sub = Substitution(0, 2, (A("t(0)").args[0], A("t(nil)").args[0]))
    moved = subst_tree(sub, build_cotree(listnat, A("list(cons(x1,x2))"), 6))
    direct = build_cotree(listnat, A("list(cons(0,nil))"), 6)
    assert tree_leq(moved, direct)
    witness = tree_leq(direct, moved)
    assert not witness and str(witness).startswith("FailsAt(list(cons(0,nil))")
    ors = [sum(len(n.or_nodes) for n in t.root.nodes()) for t in (moved, direct)]
    assert ors == [1, 3]


def test_subst_identity(corpus):
    for prog in corpus.values():
        for atom in enumerate_atoms(prog.signature, 2, 1)[:30]:
            t = build_cotree(prog, atom, 4)
            assert subst_tree(identity_subst(2), t) == t


def test_subst_context_mismatch(gc):
    t = build_cotree(gc, A("connected(x1,x2)"), 2)
    with pytest.raises(ContextMismatch):
        subst_tree(identity_subst(1), t)


def test_tree_laxness_on_slice(listnat, gc):
    for prog in (listnat, gc):
        for n, m in itertools.product(range(3), range(3)):
            for atom in enumerate_atoms(prog.signature, n, 1):
                tree = build_cotree(prog, atom, 4)
                for sub in enumerate_substitutions(prog.signature, m, n, 1):
                    moved = subst_tree(sub, tree)
                    direct = build_cotree(prog, apply(sub, atom), 4)
                    assert tree_leq(moved, direct), (atom, sub)


def test_injections_act_strictly(corpus):
    for prog in corpus.values():
        for n in range(3):
            for atom in enumerate_atoms(prog.signature, n, 1)[:25]:
                tree = build_cotree(prog, atom, 4)
                for m in range(n, 4):
                    for i in enumerate_injections(n, m):
                        sub = injection_subst(i)
                        assert subst_tree(sub, tree) == build_cotree(prog, apply(sub, atom), 4)


def test_gc_inclusion_example(gc):
    sub = injection_subst(enumerate_injections(2, 3)[0])
    t = build_cotree(gc, A("connected(x1,x2)"), 4)
    moved = subst_tree(sub, t)
    assert moved == build_cotree(gc, A("connected(x1,x2)", 3), 4)
    assert tree_leq(moved, moved)


def test_tree_leq_is_transitive(listnat, gc):
    for prog, atom, tau, sigma in [
        (gc, A("connected(x1,x2)"), Substitution(2, 2, (Var(0), Var(0))),
         Substitution(1, 2, (Var(0), Var(0)))),
        (listnat, A("list(cons(x1,x2))"), Substitution(1, 2, (A("t(0)").args[0], Var(0))),
         Substitution(0, 1, (A("t(nil)").args[0],))),
    ]:
        target = apply(compose(sigma, tau), atom)
        base = build_cotree(prog, atom, 4)
        family = [
            build_cotree(prog, target, 4),
            build_cotree(prog, target, 2),
            subst_tree(compose(sigma, tau), base),
            subst_tree(sigma, build_cotree(prog, apply(tau, atom), 4)),
            subst_tree(sigma, subst_tree(tau, base)),
        ]
        for a, b, c in itertools.product(family, repeat=3):
            if tree_leq(a, b) and tree_leq(b, c):
                assert tree_leq(a, c)


# ---------------------------------------------------------------- export


def test_export_formats(listnat_plus):
    t = build_cotree(listnat_plus, A("list(cons(0,nil))"), 4)
    dot = export_tree(t, "dot")
    assert dot.startswith("digraph cotree {")
    root_edges = [l for l in dot.splitlines() if l.strip().startswith("a0 -> o")]
    assert len(root_edges) == 2
    assert "fillcolor=black" in dot
    assert json.loads(export_tree(t, "json"))["root"]["atom"] == "list(cons(0,nil))"
    assert set(EXPORT_FORMATS) == {"ascii", "dot", "json"}
    with pytest.raises(ValueError):
        export_tree(t, "svg")


def test_dot_golden(gc):
    golden = GOLDEN / "gc_tree_depth4.dot"
    got = export_tree(build_cotree(gc, A("connected(x1,x2)"), 4), "dot")
    assert got == golden.read_text()


def _schema():
    return json.loads((resources.files("lpsem") / "schemas" / "cotree.schema.json").read_text())


def test_json_validates_and_round_trips(corpus):
    schema = _schema()
    jsonschema.Draft202012Validator.check_schema(schema)
    for prog in corpus.values():
        for n in range(3):
            for atom in enumerate_atoms(prog.signature, n, 1)[:15]:
                t = build_cotree(prog, atom, 3)
                data = json.loads(export_tree(t, "json"))
                jsonschema.validate(data, schema)
                assert tree_from_dict(data, prog) == t
                assert tree_to_dict(tree_from_dict(data)) == data


def test_schema_rejects_malformed():
    schema = _schema()
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate({"bound": 0, "depth": 1, "root": {"atom": "a"}}, schema)
