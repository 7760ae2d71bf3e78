"""procat: an executable calculus for pro-categories over decidable bases.

Represent eventually periodic towers (and finite poset systems) of finite
sets or finitely generated abelian groups, decide monomorphism, epimorphism,
their strong variants, isomorphism, movability and stability levelwise, and
emit certificates a verifier can replay.
"""

from .category import FGAB, FINSET, by_name, dualize
from .deciders import (
    Verdict,
    check_bimorphism,
    check_epi,
    check_iso,
    check_mono,
    check_movability,
    check_stability,
    check_strong_epi,
    check_strong_mono,
    eventually_iso,
    extract_bimorphic_subtower,
    fill_square,
    rank,
    tor_level_morphism,
    tor_system,
)
from .prosys import (
    FinitePosetIndex,
    Horizon,
    LevelMorphism,
    PosetLevelMorphism,
    PosetSystem,
    ProMorphism,
    SubtowerSelector,
    TowerIndex,
    TowerSystem,
    cofinite_reindex,
    constant_system,
    default_horizon,
    equalize_on_subtower,
    factor_through_subtower,
    inverse_limit_finset_tower,
    levelize,
    pro_hom_to_object,
    projection_morphism,
    sub2,
    subtower,
    validate_system,
)
from .zlinalg import (
    IntMatrix,
    InvariantFactors,
    SnfResult,
    invariant_factors,
    kernel_generators,
    lattice_contains,
    smith_normal_form,
    solve_matrix_equation,
)

__version__ = "0.1.0"
