"""Shared test data: corpus programs, atom shorthand and hypothesis strategies."""

from importlib import resources

from hypothesis import strategies as st

from lpsem.generators import LISTNAT_SIGNATURE
from lpsem.lawvere import Substitution
from lpsem.syntax import App, Atom, Var, load_program, parse_atom

CORPUS = ("listnat", "listnat_plus", "gc", "bad", "ground_abcd")

# criterion number -> (passed, title, seconds); filled by the acceptance module
ACCEPTANCE: dict = {}


def program(name):
    return load_program(resources.files("lpsem") / "fixtures" / f"{name}.lp")


def A(text, n=None, bound=None):
    """Atom in printed form: ``x1, x2`` bound, ``z1`` after ``bound``."""
    return parse_atom(text, n, canonical=True, bound=bound)


def T(text, n=0):
    return A(f"t({text})", n).args[0]


def terms(signature, n, depth=2):
    leaves = [Var(i) for i in range(n)] + [App(c) for c in signature.constants]
    compound = [(f, k) for f, k in signature.functions if k > 0]
    base = st.sampled_from(leaves)
    if not compound or depth == 0:
        return base
    return st.recursive(
        base,
        lambda inner: st.sampled_from(compound).flatmap(
            lambda fk: st.tuples(*[inner] * fk[1]).map(lambda args, f=fk[0]: App(f, args))),
        max_leaves=6,
    )


def atoms(signature=LISTNAT_SIGNATURE, n=None):
    ns = st.integers(0, 3) if n is None else st.just(n)

    def over(k):
        preds = st.sampled_from(signature.predicates)
        return preds.flatmap(lambda pa: st.tuples(*[terms(signature, k)] * pa[1]).map(
            lambda args, p=pa[0]: Atom(p, args, k)))
    return ns.flatmap(over)


def substitutions(source, target, signature=LISTNAT_SIGNATURE):
    return st.tuples(*[terms(signature, source)] * target).map(
        lambda ts: Substitution(source, target, ts))
