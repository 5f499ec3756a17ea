"""Backward warping and the end-to-end augmentation routes."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

import numpy as np

from . import __version__
from .deform import AugmentParams, deformation_map
from .exceptions import MinorityAbsent
from .grid import (LabelVolume, ScalarVolume, VectorField, check_same_grid,
                   nearest, trilinear, voxel_coordinates)
from .sdf import signed_distance


@dataclass(frozen=True, eq=False)
class AugmentedPair:
    image: ScalarVolume
    label: LabelVolume
    provenance: dict = field(default_factory=dict)


def _sample_points(d: VectorField) -> np.ndarray:
    return voxel_coordinates(d.dims) + d.data / np.asarray(d.spacing)


def warp_scalar(x: ScalarVolume, d: VectorField) -> ScalarVolume:
    """``out(p) = x(p + d(p) / spacing)`` with trilinear sampling."""
    check_same_grid(x, d)
    return x.replace(trilinear(x.data, _sample_points(d)))


def warp_label(y: LabelVolume, d: VectorField) -> LabelVolume:
    """Nearest-neighbor counterpart of :func:`warp_scalar`."""
    check_same_grid(y, d)
    return y.replace(nearest(y.data, _sample_points(d)))


def _minority_list(minority: Iterable[int]) -> list:
    return sorted({int(c) for c in minority})


def _apply(x, y, phi, params, provenance):
    d = deformation_map(phi, params)
    return AugmentedPair(warp_scalar(x, d), warp_label(y, d), provenance)


def _provenance(params, minority, sdf_source, sources) -> dict:
    return {
        "tool": "stac",
        "version": __version__,
        "params": params.to_dict(),
        "minority": minority,
        "sdf_source": sdf_source,
        "sources": dict(sources or {}),
    }


def augment_pair(x: ScalarVolume, y: LabelVolume, minority: Iterable[int],
                 params: AugmentParams = AugmentParams(),
                 sources: Optional[Mapping[str, str]] = None) -> AugmentedPair:
    """Enlarge (or shrink) the classes in ``minority`` using an SDF derived from ``y``."""
    check_same_grid(x, y)
    classes = _minority_list(minority)
    if not classes or not np.isin(y.data, classes).any():
        raise MinorityAbsent(f"none of the classes {classes} occur in the label volume")
    phi = signed_distance(y, classes, boundary=params.boundary)
    return _apply(x, y, phi, params, _provenance(params, classes, "labels", sources))


def augment_with_sdf(x: ScalarVolume, y_pseudo: LabelVolume, phi_pre: ScalarVolume,
                     params: AugmentParams = AugmentParams(),
                     minority: Optional[Iterable[int]] = None,
                     sources: Optional[Mapping[str, str]] = None) -> AugmentedPair:
    """Same transform as :func:`augment_pair`, driven by an externally supplied SDF.

    ``phi_pre`` is used as-is, in millimeters; ``params.boundary`` is ignored.
    ``minority`` is only recorded in the provenance.
    """
    check_same_grid(x, y_pseudo, phi_pre)
    classes = _minority_list(minority) if minority is not None else None
    return _apply(x, y_pseudo, phi_pre, params, _provenance(params, classes, "supplied", sources))
