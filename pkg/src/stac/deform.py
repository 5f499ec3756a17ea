"""Normal field, SDF-based weight and the adaptive deformation map."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .exceptions import DomainError, TooThin
from .grid import ScalarVolume, VectorField
from .sdf import BOUNDARY_CONVENTIONS


@dataclass(frozen=True)
class AugmentParams:
    """Hyperparameters of the shape transform.

    Parameters
    ----------
    alpha : float
        Peak displacement in millimeters, reached where ``|phi| = 0``.
    beta : float
        Decay rate per millimeter; must be <= 0 so distant voxels stay put.
    enlarge : bool
        Sample each output voxel from ``p - W * n`` (steepest descent of the
        SDF), which grows the selected region. ``False`` reverses the offset.
    literal_sign : bool
        Sample from ``p + W * grad(phi)`` instead. This shrinks the region
        and overrides ``enlarge``; it exists for side-by-side comparison.
    epsilon : float
        Gradient magnitudes below this produce zero displacement.
    boundary : {"midpoint", "voxel"}
        Boundary convention used when an SDF is derived from labels.
    """

    alpha: float = 1.0
    beta: float = -1.0
    enlarge: bool = True
    literal_sign: bool = False
    epsilon: float = 1e-8
    boundary: str = "midpoint"

    def __post_init__(self):
        if not np.isfinite(self.alpha) or self.alpha < 0:
            raise DomainError(f"alpha must be >= 0, got {self.alpha}")
        if not np.isfinite(self.beta) or self.beta > 0:
            raise DomainError(f"beta must be <= 0, got {self.beta}")
        if not self.epsilon > 0:
            raise DomainError(f"epsilon must be > 0, got {self.epsilon}")
        if self.boundary not in BOUNDARY_CONVENTIONS:
            raise DomainError(f"boundary must be one of {BOUNDARY_CONVENTIONS}")

    @property
    def direction(self) -> float:
        """Sign applied to the unit normal when forming the sampling offset."""
        if self.literal_sign:
            return 1.0
        return -1.0 if self.enlarge else 1.0

    def to_dict(self) -> dict:
        return asdict(self)


def gradient_field(phi: ScalarVolume) -> VectorField:
    """Physical-unit gradient: central differences inside, one-sided on faces."""
    if min(phi.dims) < 2:
        raise TooThin(f"every axis needs at least 2 voxels, got {phi.dims}")
    grads = np.gradient(phi.data, *phi.spacing, edge_order=1)
    return VectorField(np.stack(grads, axis=-1), phi.spacing)


def weight_field(phi: ScalarVolume, params: AugmentParams) -> ScalarVolume:
    """``alpha * exp(beta * |phi|)`` at every voxel."""
    return phi.replace(params.alpha * np.exp(params.beta * np.abs(phi.data)))


def unit_normals(phi: ScalarVolume, epsilon: float = 1e-8) -> VectorField:
    grad = gradient_field(phi).data
    norm = np.linalg.norm(grad, axis=-1, keepdims=True)
    unit = np.where(norm >= epsilon, grad / np.maximum(norm, epsilon), 0.0)
    return VectorField(unit, phi.spacing)


def deformation_map(phi: ScalarVolume, params: AugmentParams = AugmentParams()) -> VectorField:
    """Sampling offsets (mm) for backward warping: ``direction * W * grad(phi)/|grad(phi)|``."""
    if min(phi.dims) < 2:
        raise TooThin(f"every axis needs at least 2 voxels, got {phi.dims}")
    if params.alpha == 0:
        return VectorField.zeros(phi.dims, phi.spacing)
    normals = unit_normals(phi, params.epsilon).data
    w = weight_field(phi, params).data
    return VectorField(params.direction * w[..., None] * normals, phi.spacing)
