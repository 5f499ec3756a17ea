"""Volume containers and interpolation samplers.

Arrays are indexed ``data[i, j, k]`` with ``i`` along x. Flattening with
``order="F"`` gives the x-fastest linear order used on disk. Voxel centers
sit at integer coordinates; spacing is in millimeters per voxel.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np

from .exceptions import DomainError, ShapeMismatch

Spacing = Tuple[float, float, float]


def _check_spacing(spacing) -> Spacing:
    sp = tuple(float(s) for s in spacing)
    if len(sp) != 3:
        raise DomainError(f"spacing must have 3 components, got {len(sp)}")
    if not all(np.isfinite(s) and s > 0 for s in sp):
        raise DomainError(f"spacing components must be positive, got {sp}")
    return sp


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class ScalarVolume:
    """3D grid of real values (images, SDFs, weights)."""

    data: np.ndarray
    spacing: Spacing = (1.0, 1.0, 1.0)

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim != 3 or min(data.shape) < 1:
            raise DomainError(f"expected a non-empty 3D array, got shape {data.shape}")
        if not np.all(np.isfinite(data)):
            raise DomainError("scalar volume contains NaN or Inf")
        object.__setattr__(self, "data", _frozen(data))
        object.__setattr__(self, "spacing", _check_spacing(self.spacing))

    @property
    def dims(self) -> Tuple[int, int, int]:
        return tuple(int(n) for n in self.data.shape)

    def replace(self, data) -> "ScalarVolume":
        return ScalarVolume(data, self.spacing)


@dataclass(frozen=True, eq=False)
class LabelVolume:
    """3D grid of class IDs in [0, 255]; 0 is background."""

    data: np.ndarray
    spacing: Spacing = (1.0, 1.0, 1.0)

    def __post_init__(self):
        raw = np.asarray(self.data)
        if raw.ndim != 3 or min(raw.shape) < 1:
            raise DomainError(f"expected a non-empty 3D array, got shape {raw.shape}")
        if raw.dtype != np.uint8:
            if raw.size and (raw.min() < 0 or raw.max() > 255):
                raise DomainError("class IDs must lie in [0, 255]")
            if np.issubdtype(raw.dtype, np.floating) and not np.all(raw == np.round(raw)):
                raise DomainError("class IDs must be integers")
        object.__setattr__(self, "data", _frozen(raw.astype(np.uint8)))
        object.__setattr__(self, "spacing", _check_spacing(self.spacing))

    @property
    def dims(self) -> Tuple[int, int, int]:
        return tuple(int(n) for n in self.data.shape)

    @property
    def classes(self) -> Tuple[int, ...]:
        return tuple(int(c) for c in np.unique(self.data))

    def replace(self, data) -> "LabelVolume":
        return LabelVolume(data, self.spacing)


@dataclass(frozen=True, eq=False)
class VectorField:
    """3-component vector per voxel, in physical units. ``data`` has shape (nx, ny, nz, 3)."""

    data: np.ndarray
    spacing: Spacing = (1.0, 1.0, 1.0)

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim != 4 or data.shape[-1] != 3 or min(data.shape[:3]) < 1:
            raise DomainError(f"expected shape (nx, ny, nz, 3), got {data.shape}")
        if not np.all(np.isfinite(data)):
            raise DomainError("vector field contains NaN or Inf")
        object.__setattr__(self, "data", _frozen(data))
        object.__setattr__(self, "spacing", _check_spacing(self.spacing))

    @property
    def dims(self) -> Tuple[int, int, int]:
        return tuple(int(n) for n in self.data.shape[:3])

    def magnitude(self) -> np.ndarray:
        return np.linalg.norm(self.data, axis=-1)

    @classmethod
    def zeros(cls, dims, spacing=(1.0, 1.0, 1.0)) -> "VectorField":
        return cls(np.zeros(tuple(dims) + (3,)), spacing)


@dataclass(frozen=True)
class GridPoint:
    """Continuous position in voxel-index units."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        if not all(np.isfinite(v) for v in (self.x, self.y, self.z)):
            raise DomainError("grid point components must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=np.float64)


Volume = Union[ScalarVolume, LabelVolume, VectorField]


def check_same_grid(*vols: Volume) -> None:
    """Raise ShapeMismatch unless all volumes share dims and spacing."""
    first = vols[0]
    for v in vols[1:]:
        if v.dims != first.dims:
            raise ShapeMismatch(f"dims differ: {first.dims} vs {v.dims}")
        if not np.allclose(v.spacing, first.spacing, rtol=1e-12, atol=0):
            raise ShapeMismatch(f"spacing differs: {first.spacing} vs {v.spacing}")


def voxel_coordinates(dims: Sequence[int]) -> np.ndarray:
    """Integer voxel-center coordinates, shape (nx, ny, nz, 3)."""
    return np.stack(np.meshgrid(*(np.arange(n, dtype=np.float64) for n in dims),
                                indexing="ij"), axis=-1)


# vectorized samplers; ``coords`` has shape (..., 3) in voxel-index units

def trilinear(data: np.ndarray, coords: np.ndarray) -> np.ndarray:
    """Clamp-to-edge trilinear interpolation of ``data`` at ``coords``.

    Nested lerps of the form ``a + f * (b - a)`` keep integer coordinates and
    constant neighborhoods exact.
    """
    data = np.asarray(data, dtype=np.float64)
    coords = np.asarray(coords, dtype=np.float64)
    lo, hi, frac = [], [], []
    for axis, n in enumerate(data.shape):
        c = np.clip(coords[..., axis], 0.0, n - 1)
        i0 = np.floor(c).astype(np.intp)
        lo.append(i0)
        hi.append(np.minimum(i0 + 1, n - 1))
        frac.append(c - i0)

    def lerp(a, b, f):
        return a + f * (b - a)

    def along_z(ix, iy):
        return lerp(data[ix, iy, lo[2]], data[ix, iy, hi[2]], frac[2])

    def along_y(ix):
        return lerp(along_z(ix, lo[1]), along_z(ix, hi[1]), frac[1])

    return np.asarray(lerp(along_y(lo[0]), along_y(hi[0]), frac[0]), dtype=np.float64)


def nearest(data: np.ndarray, coords: np.ndarray) -> np.ndarray:
    """Clamp-to-edge nearest-neighbor lookup; exact halves round to the smaller index."""
    coords = np.asarray(coords, dtype=np.float64)
    idx = []
    for axis, n in enumerate(data.shape):
        c = np.clip(coords[..., axis], 0.0, n - 1)
        idx.append(np.ceil(c - 0.5).astype(np.intp))
    return data[tuple(idx)]


def sample_trilinear(vol: ScalarVolume, p: GridPoint) -> float:
    return float(trilinear(vol.data, p.as_array()[None])[0])


def sample_nearest(vol: LabelVolume, p: GridPoint) -> int:
    return int(nearest(vol.data, p.as_array()[None])[0])
