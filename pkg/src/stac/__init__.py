"""Shape transformation of minority classes in 3D image/label volumes.

Selected label classes are enlarged by backward-warping image and label
along the steepest descent of the classes' signed distance function, with a
displacement that decays exponentially with distance from the boundary.
"""
__version__ = "0.1.0"

from .deform import AugmentParams, deformation_map, gradient_field, weight_field
from .exceptions import *  # noqa: F401,F403
from .grid import (GridPoint, LabelVolume, ScalarVolume, VectorField,
                   sample_nearest, sample_trilinear)
from .metrics import (ClassStats, average_surface_distance, class_histogram,
                      dice, select_minority)
from .phantom import PhantomSpec, generate, make_spec
from .sdf import (brute_force_sdf, edt_squared, evolve_level_set_step,
                  signed_distance)
from .warp import (AugmentedPair, augment_pair, augment_with_sdf, warp_label,
                   warp_scalar)
from .estimator import ShapeTransformAugmenter

__all__ = [
    "AugmentParams", "AugmentedPair", "ClassStats", "GridPoint", "LabelVolume",
    "PhantomSpec", "ScalarVolume", "ShapeTransformAugmenter", "VectorField",
    "augment_pair", "augment_with_sdf", "average_surface_distance",
    "brute_force_sdf", "class_histogram", "deformation_map", "dice",
    "edt_squared", "evolve_level_set_step", "generate", "gradient_field",
    "make_spec", "sample_nearest", "sample_trilinear", "select_minority",
    "signed_distance", "warp_label", "warp_scalar", "weight_field",
]
