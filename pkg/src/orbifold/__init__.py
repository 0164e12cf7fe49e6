"""Folding finite categories by automorphism groups, and unfolding them again."""
from .action import CategoryAction, check_action, is_foldable, is_semiregular, is_translative
from .category import Category, CatMorphism, check_morphism, compose_path, is_simple, validate_category
from .errors import *  # noqa: F401,F403
from .flat import (
    FlatCategoryRepresentation,
    RightGroupalCategory,
    check_flat_iso,
    check_flat_rep,
    flat_rep_from_orbit,
    flat_rep_from_representation,
    unfold_flat,
)
from .groups import AbelianGroup, FiniteGroup
from .iso import find_isomorphism
from .orbitfold import Representation, build_representation, choose_transversal, orbit_category
from .partialcat import FlatRepresentation, PartialSubcategory, check_defining, property_catalogue, search_maximal
from .unfold import bounded_unfold, induced_action, projection, unfold, verify_roundtrips

__all__ = [
    "AbelianGroup",
    "CatMorphism",
    "Category",
    "CategoryAction",
    "FiniteGroup",
    "FlatCategoryRepresentation",
    "FlatRepresentation",
    "PartialSubcategory",
    "Representation",
    "RightGroupalCategory",
    "bounded_unfold",
    "build_representation",
    "check_action",
    "check_defining",
    "check_flat_iso",
    "check_flat_rep",
    "check_morphism",
    "choose_transversal",
    "compose_path",
    "find_isomorphism",
    "flat_rep_from_orbit",
    "flat_rep_from_representation",
    "induced_action",
    "is_foldable",
    "is_semiregular",
    "is_simple",
    "is_translative",
    "orbit_category",
    "projection",
    "property_catalogue",
    "search_maximal",
    "unfold",
    "unfold_flat",
    "validate_category",
    "verify_roundtrips",
]
