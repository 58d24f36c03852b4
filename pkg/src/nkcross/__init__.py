"""Crosses of order k, their hulls and holomorphic extension, on planar disc factors."""
from .errors import NKCrossError
from .geometry import UNIT_DISC, BaseSet, Disc, DiscAutomorphism, PairAD, make_pair, mobius_transport, unit_interval_pair
from .extremal import ExtremalField, h_closed_form, h_eval, h_grid_solve, h_product_max
from .cross import CrossSpec, MembershipReport, decompose_check, decompose_mask, gen_family, in_center, in_cross, merge, path_to_center, project
from .singular import Polynomial, SingularSet, delta_sets, fiber, is_pluripolar
from .hull import CompositeHull2, composite_hull2_value, hull_value, in_hull, lemma_inc_value, sample_hull, slice_grid
from .extend import (SampledFunction, check_sep_holo, compare_on_hull, extend_poly, extend_rational,
                     make_function)

__version__ = "0.1.0"

__all__ = [
    "NKCrossError",
    "UNIT_DISC",
    "BaseSet",
    "Disc",
    "DiscAutomorphism",
    "PairAD",
    "make_pair",
    "mobius_transport",
    "unit_interval_pair",
    "ExtremalField",
    "h_closed_form",
    "h_eval",
    "h_grid_solve",
    "h_product_max",
    "CrossSpec",
    "MembershipReport",
    "decompose_check",
    "decompose_mask",
    "gen_family",
    "in_center",
    "in_cross",
    "merge",
    "path_to_center",
    "project",
    "Polynomial",
    "SingularSet",
    "delta_sets",
    "fiber",
    "is_pluripolar",
    "CompositeHull2",
    "composite_hull2_value",
    "hull_value",
    "in_hull",
    "lemma_inc_value",
    "sample_hull",
    "slice_grid",
    "SampledFunction",
    "check_sep_holo",
    "compare_on_hull",
    "extend_poly",
    "extend_rational",
    "make_function",
]
