"""Exact Chow rings of toric quotients, wall-crossing flips and tree virtual classes."""

from .algebra import AlgebraError, GradedAlgebra, RingMap, TensorAlgebra, from_presentation, tensor
from .flips import (
    CorrespondenceClass,
    FlipData,
    FlipError,
    LoopReport,
    all_flips,
    check_projection_formula,
    correspondence_class,
    flip_from_wall,
    flip_pullback,
    flip_pushforward,
    loop_independence_check,
    perturbed_flip,
    product_ring,
    tautological_ring,
    tree_virtual_pushforward,
)
from .presentations import bundle_ring, point_ring, weighted_blowup_ring, wps_ring
from .toric import ToricError, ToricQuotient

__all__ = [
    "AlgebraError",
    "CorrespondenceClass",
    "FlipData",
    "FlipError",
    "GradedAlgebra",
    "LoopReport",
    "RingMap",
    "TensorAlgebra",
    "ToricError",
    "ToricQuotient",
    "all_flips",
    "bundle_ring",
    "check_projection_formula",
    "correspondence_class",
    "flip_from_wall",
    "flip_pullback",
    "flip_pushforward",
    "from_presentation",
    "loop_independence_check",
    "perturbed_flip",
    "point_ring",
    "product_ring",
    "tautological_ring",
    "tensor",
    "tree_virtual_pushforward",
    "weighted_blowup_ring",
    "wps_ring",
]
