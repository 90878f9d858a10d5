"""Finite-algebra toolkit: admissible-relation calculus, quantified identity
checking, and term-system searches on free clones."""

from .algebra import (
    App,
    CapExceeded,
    FiniteAlgebra,
    Operation,
    Term,
    Var,
    eval_term,
    load_algebra,
    parse_term,
    power,
    product,
    save_algebra,
)
from .caps import DEFAULT_CAPS, Caps, caps_from_env
from .fixtures import FIXTURES, resolve
from .freeclone import (
    Clone,
    FreeRelations,
    TermTable,
    clone_as_algebra,
    dump_clone,
    free_relations,
    generate_clone,
    identity_holds,
    principal_sigma_4ary,
    restrict_table,
    slot_identifications,
    table_of_term,
)
from .identities import (
    IdentitySpec,
    RelClass,
    UnsupportedError,
    Verdict,
    builtin,
    builtin_names,
    candidate_pool,
    check_for_all,
    class_member,
    evaluate,
    expr_str,
    free_seed_assignment,
    free_seed_verdict,
)
from .maltsev import (
    Dichotomy,
    ExpansionCheck,
    ExpansionSpec,
    SearchResult,
    TermSystem,
    check_any_expansion,
    enumerate_expansions,
    find_directed_jonsson,
    find_jonsson,
    find_majority,
    find_mal_f,
    find_pixley,
    find_vr,
    mal_implication_experiment,
    slmore_dichotomy,
    subst_vars,
    variation_count,
)
from .parser import SpecParseError, parse_expr, parse_spec
from .relations import (
    BinRel,
    admissible_closure,
    compose,
    compose_alt,
    congruence_gen,
    converse,
    enumerate_relations,
    intersect,
    is_admissible,
    is_congruence,
    is_reflexive_admissible,
    is_tolerance,
    rel_power,
    symmetric_closure,
    tolerance_gen,
    transitive_closure,
    union,
)
from .uadmissible import (
    UAdmRel,
    bar_u,
    enumerate_u,
    from_components,
    from_congruences,
    greedy_decomposition,
    is_u_admissible,
    pair_families,
    principal_decomposition,
    transitive_closure_u,
)

__version__ = "0.1.0"
