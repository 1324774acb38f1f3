"""Term-matching and SLD resolution, coinductive trees, and their executable semantics."""

from .syntax import (
    App,
    Atom,
    Clause,
    ParseError,
    Program,
    Signature,
    Var,
    classify,
    enumerate_atoms,
    format_atom,
    format_term,
    load_program,
    parse_atom,
    parse_program,
    parse_query,
)
from .lawvere import (
    Injection,
    Substitution,
    apply,
    compose,
    enumerate_substitutions,
    identity_subst,
    injection_subst,
    mgm,
    mgu,
)
from .intfunctor import ExtAtom, ExtSet, canonicalize, dist_law, embed, flatten, int_map
from .resolution import Outcome, sld_solve, tm_prove, verify_bridge
from .cotree import CoTree, build_cotree, export_tree, subst_tree, tree_leq
from .coalgebra import (
    approximant,
    approximant_of_tree,
    check_inj_strict,
    check_lax,
    ground_approximant,
    ground_step,
    step,
    step_ext,
)
from .saturation import Bounds, check_coherence, desaturate, saturate

__all__ = [name for name in dir() if not name.startswith("_")]
