import functools
import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import A, T, substitutions, atoms
from lpsem.generators import LISTNAT_SIGNATURE, random_atom, random_substitution
from lpsem.lawvere import (
    ContextMismatch,
    Injection,
    Substitution,
    apply,
    canonical_inclusion,
    clause_matcher,
    compose,
    enumerate_injections,
    enumerate_substitutions,
    format_substitution,
    identity_subst,
    injection_subst,
    mgm,
    mgu,
)
from lpsem.syntax import Var, enumerate_atoms, enumerate_terms, format_term, parse_program

SIG = LISTNAT_SIGNATURE


def sub(source, *terms):
    return Substitution(source, len(terms), tuple(T(t, source) for t in terms))


def test_apply_examples():
    assert apply(sub(0, "0", "nil"), A("list(cons(x1,x2))")) == A("list(cons(0,nil))")
    assert apply(sub(1, "x1", "x1"), A("connected(x1,x2)")) == A("connected(x1,x1)")
    a = A("list(cons(x1,x2))")
    assert apply(identity_subst(2), a) == a


def test_apply_context_mismatch():
    with pytest.raises(ContextMismatch):
        apply(identity_subst(1), A("connected(x1,x2)"))


def test_substitution_validates_terms():
    with pytest.raises(ValueError):
        Substitution(1, 1, (Var(1),))
    with pytest.raises(ValueError):
        Substitution(1, 2, (Var(0),))


def test_compose_examples():
    f = sub(1, "s(x1)")
    g = sub(0, "0")
    assert compose(g, f) == sub(0, "s(0)")
    assert compose(identity_subst(1), f) == f
    assert compose(f, identity_subst(1)) == f
    with pytest.raises(ContextMismatch):
        compose(f, sub(0, "0"))


def test_compose_associative_seeded():
    rng = random.Random(0)
    for _ in range(500):
        a, b, c, d = (rng.randint(0, 3) for _ in range(4))
        h = random_substitution(rng, SIG, a, b, 2)
        g = random_substitution(rng, SIG, b, c, 2)
        f = random_substitution(rng, SIG, c, d, 2)
        assert compose(compose(h, g), f) == compose(h, compose(g, f))


@settings(max_examples=200)
@given(st.data())
def test_apply_is_functorial(data):
    k, n, m = (data.draw(st.integers(0, 3)) for _ in range(3))
    g = data.draw(substitutions(k, n))
    f = data.draw(substitutions(n, m))
    a = data.draw(atoms(n=m))
    assert apply(compose(g, f), a) == apply(g, apply(f, a))
    assert apply(identity_subst(m), a) == a


def test_identity_and_injections():
    assert identity_subst(0).terms == ()
    inc = injection_subst(canonical_inclusion(2, 3))
    a = A("connected(x1,x2)")
    assert apply(inc, a) == a.widen(3)
    assert injection_subst(Injection(3, 3, (0, 1, 2))) == identity_subst(3)
    swap = injection_subst(Injection(2, 2, (1, 0)))
    assert apply(swap, a) == A("connected(x2,x1)")


def test_injection_validation():
    with pytest.raises(ValueError):
        Injection(2, 3, (0, 0))
    with pytest.raises(ValueError):
        Injection(2, 2, (0, 2))
    assert len(enumerate_injections(2, 4)) == 12
    assert enumerate_injections(0, 3) == [Injection(0, 3, ())]


def test_injection_subst_preserves_composition():
    for n, m, k in itertools.product(range(3), range(4), range(5)):
        for i in enumerate_injections(n, m):
            for j in enumerate_injections(m, k):
                assert injection_subst(i.then(j)) == compose(injection_subst(j), injection_subst(i))


def test_enumerate_substitutions_examples():
    assert [format_substitution(s) for s in enumerate_substitutions(SIG, 0, 1, 0)] == [
        "{x1->0}", "{x1->nil}"]
    for n in range(3):
        assert enumerate_substitutions(SIG, n, 0, 2) == [Substitution(n, 0, ())]
    got = {format_term(s.terms[0]) for s in enumerate_substitutions(SIG, 1, 1, 1)}
    leaves = ["x1", "0", "nil"]
    assert got == set(leaves) | {f"s({t})" for t in leaves} | {
        f"cons({a},{b})" for a in leaves for b in leaves}


def test_enumerate_substitutions_deterministic_and_distinct():
    first = enumerate_substitutions(SIG, 2, 2, 1)
    assert first == enumerate_substitutions(SIG, 2, 2, 1)
    assert len(first) == len(set(first)) == 24 ** 2


def test_format_substitution():
    s = sub(2, "x1", "x1")
    assert str(s) == "{x1->x1, x2->x1}"
    assert format_substitution(s, names=["X", "Y"], target_names=["X", "Y"], omit_identity=True) == "{Y->X}"


# ------------------------------------------------------------------ matching


def test_mgm_examples():
    assert mgm(A("list(cons(x1,x2))"), A("list(cons(0,nil))")) == sub(0, "0", "nil")
    assert mgm(A("nat(x1)"), A("nat(x1)")) == identity_subst(1)
    assert mgm(A("nat(s(x1))"), A("nat(x1)")) is None
    assert mgm(A("nat(x1)"), A("list(x1)")) is None


def test_mgm_unused_pattern_variables():
    # x2 is absent from the pattern: it maps to itself when the target has room
    assert mgm(A("nat(x1)", 2), A("nat(0)", 2)) == sub(2, "0", "x2")
    assert mgm(A("nat(x1)", 2), A("nat(0)", 1)) is None


@functools.lru_cache(maxsize=None)
def _subs(n, k, d):
    return enumerate_substitutions(SIG, n, k, d)


def test_mgm_sound_and_complete_on_slice():
    # terms bound to pattern variables are subterms of the depth<=1 target,
    # so depth-1 arrows already exhaust the depth-2 search on this slice
    slice_ = [a for n in range(3) for a in enumerate_atoms(SIG, n, 1)]
    for pattern in slice_:
        if sorted(pattern.variables()) != list(range(pattern.context_size)):
            continue
        for target in slice_:
            if target.predicate != pattern.predicate:
                continue
            theta = mgm(pattern, target)
            found = any(apply(s, pattern) == target
                        for s in _subs(target.context_size, pattern.context_size, 1))
            assert (theta is not None) == found, (pattern, target)
            if theta is not None:
                assert apply(theta, pattern) == target


def test_mgm_agrees_with_depth_two_search_on_samples():
    rng = random.Random(5)
    for _ in range(60):
        target = random_atom(rng, SIG, rng.randint(0, 2), 2)
        pattern = random_atom(rng, SIG, 1, 2)
        if pattern.variables() != [0] or pattern.predicate != target.predicate:
            continue
        found = any(apply(s, pattern) == target for s in _subs(target.context_size, 1, 2))
        assert (mgm(pattern, target) is not None) == found


def test_clause_matcher_fresh_existentials():
    c = parse_program("connected(X,Y) :- edge(X,Z), connected(Z,Y).").clause(1)
    theta = clause_matcher(c, A("connected(x1,x2)"))
    assert theta == Substitution(3, 3, (Var(0), Var(1), Var(2)))
    theta = clause_matcher(c, A("connected(x1,x1)"))
    assert theta == Substitution(2, 3, (Var(0), Var(0), Var(1)))
    assert apply(theta, c.head) == A("connected(x1,x1)", 2)


# --------------------------------------------------------------- unification


def test_mgu_examples():
    goal = A("connected(x1,x2)", 3)
    head = A("connected(x3,x3)", 3)
    s = mgu(goal, head)
    assert s.terms[:2] == (Var(0), Var(0))
    assert mgu(A("nat(s(0))"), A("nat(s(0))")) == identity_subst(0)
    assert mgu(A("nat(x1)"), A("list(x1)")) is None
    assert mgu(A("nat(x1)"), A("nat(s(x1))")) is None


def test_mgu_idempotent_and_sound_seeded():
    rng = random.Random(2)
    for _ in range(500):
        n = rng.randint(1, 3)
        a, b = random_atom(rng, SIG, n, 2), random_atom(rng, SIG, n, 2)
        s = mgu(a, b)
        if s is None:
            continue
        assert apply(s, a) == apply(s, b)
        assert compose(s, s) == s


def test_mgu_is_most_general_on_slice():
    for n, d in ((0, 1), (1, 1), (2, 0)):
        slice_ = enumerate_atoms(SIG, n, d)
        unifiers = enumerate_substitutions(SIG, n, n, 1)
        for a in slice_:
            for b in slice_:
                if a.predicate != b.predicate:
                    continue
                s = mgu(a, b)
                solutions = [t for t in unifiers if apply(t, a) == apply(t, b)]
                assert (s is not None) == bool(solutions) or n == 0
                if s is None:
                    assert not solutions
                    continue
                assert apply(s, a) == apply(s, b)
                # every unifier factors through the idempotent mgu as t = t . s
                for t in solutions:
                    assert compose(t, s) == t
