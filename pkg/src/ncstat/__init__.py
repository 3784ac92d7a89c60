"""Finite-dimensional non-commutative probability.

States on direct sums of matrix algebras, unital *-homomorphisms in
multiplicity form, completely positive unital maps through block Choi
matrices, disintegration of states along homomorphisms, and the relative
entropy as an additive invariant of hypotheses.
"""

from .algebra import (
    DEFAULT_ATOL,
    DEFAULT_CUTOFF,
    AlgebraElement,
    AlgebraSpec,
    State,
    ValidationReport,
    Violation,
    absolutely_continuous,
    direct_sum_algebras,
    element_from_blocks,
    hermitian_exp,
    hermitian_log,
    hermitian_pinv,
    partial_trace_left,
    state_distance,
    support_projection,
    validate_state,
)
from .entropy import (
    ChainRuleReport,
    ExpansionCheck,
    InfiniteRegimeReport,
    chain_rule_report,
    chain_rule_triple,
    conditional_entropy,
    convex_sum_morphisms,
    convex_sum_objects,
    functoriality_defect,
    re_expansions,
    re_functor,
    relative_entropy,
    tensor_inclusion_morphism,
    von_neumann_entropy,
)
from .errors import (
    AlgebraMismatchError,
    FactorizationError,
    NonIntegralMultiplicityError,
    NotAHomomorphismError,
    ObjectMismatchError,
    ShapeError,
)
from .generators import (
    GeneratorConfig,
    gen_algebra,
    gen_alpha_family,
    gen_composable_pair,
    gen_element,
    gen_morphism,
    gen_optimal_morphism,
    gen_star_hom,
    gen_state,
    gen_unitary_element,
    haar_unitary,
    rng_for,
)
from .hypotheses import (
    AlphaFamily,
    NCMorphism,
    NCObject,
    NoDisintegration,
    RectificationResult,
    build_hypothesis_from_alphas,
    compose_morphisms,
    construct_optimal_hypothesis,
    extract_alphas,
    identity_morphism,
    is_optimal,
    rectify_morphism,
    rectify_pair,
    validate_morphism,
)
from .laws import LawReport, LawResult, run_laws
from .maps import (
    CPUMap,
    RawLinearMap,
    StarHom,
    ad_cpu,
    ad_hom,
    ad_unitary,
    apply_cpu,
    apply_hom,
    compose_cpu,
    compose_homs,
    conjugate_state,
    cpu_from_functions,
    cpu_pushforward_state,
    hom_from_raw,
    hom_to_raw,
    identity_cpu,
    identity_hom,
    pushforward_state,
    strip_conjugators,
    validate_cpu,
)

__version__ = "0.1.0"

__all__ = [
    "AlgebraElement",
    "AlgebraMismatchError",
    "AlgebraSpec",
    "AlphaFamily",
    "CPUMap",
    "ChainRuleReport",
    "DEFAULT_ATOL",
    "DEFAULT_CUTOFF",
    "ExpansionCheck",
    "FactorizationError",
    "GeneratorConfig",
    "InfiniteRegimeReport",
    "LawReport",
    "LawResult",
    "NCMorphism",
    "NCObject",
    "NoDisintegration",
    "NonIntegralMultiplicityError",
    "NotAHomomorphismError",
    "ObjectMismatchError",
    "RawLinearMap",
    "RectificationResult",
    "ShapeError",
    "StarHom",
    "State",
    "ValidationReport",
    "Violation",
    "absolutely_continuous",
    "ad_cpu",
    "ad_hom",
    "ad_unitary",
    "apply_cpu",
    "apply_hom",
    "build_hypothesis_from_alphas",
    "chain_rule_report",
    "chain_rule_triple",
    "compose_cpu",
    "compose_homs",
    "compose_morphisms",
    "conditional_entropy",
    "conjugate_state",
    "construct_optimal_hypothesis",
    "convex_sum_morphisms",
    "convex_sum_objects",
    "cpu_from_functions",
    "cpu_pushforward_state",
    "direct_sum_algebras",
    "element_from_blocks",
    "extract_alphas",
    "functoriality_defect",
    "gen_algebra",
    "gen_alpha_family",
    "gen_composable_pair",
    "gen_element",
    "gen_morphism",
    "gen_optimal_morphism",
    "gen_star_hom",
    "gen_state",
    "gen_unitary_element",
    "haar_unitary",
    "hermitian_exp",
    "hermitian_log",
    "hermitian_pinv",
    "hom_from_raw",
    "hom_to_raw",
    "identity_cpu",
    "identity_hom",
    "identity_morphism",
    "is_optimal",
    "partial_trace_left",
    "pushforward_state",
    "re_expansions",
    "re_functor",
    "rectify_morphism",
    "rectify_pair",
    "relative_entropy",
    "rng_for",
    "run_laws",
    "state_distance",
    "strip_conjugators",
    "support_projection",
    "tensor_inclusion_morphism",
    "validate_cpu",
    "validate_morphism",
    "validate_state",
    "von_neumann_entropy",
]
