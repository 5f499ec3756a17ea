"""Seeded synthetic image/label volumes with analytic signed distances.

Geometry is given in voxel-index units (voxel centers at integers). Noise is
drawn from numpy's Philox4x32-10 counter-based generator keyed by the seed,
which yields the same stream on every platform.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .exceptions import SpecInvalid
from .grid import LabelVolume, ScalarVolume, voxel_coordinates

PRESETS = ("sphere", "ellipsoid", "box", "multi_organ")


@dataclass(frozen=True)
class Shape:
    kind: str  # "sphere" | "ellipsoid" | "box"
    class_id: int
    center: Tuple[float, float, float]
    size: Tuple[float, float, float]  # radius repeated, semi-axes, or box half-widths

    def extent(self) -> np.ndarray:
        return np.asarray(self.size, dtype=np.float64)

    def contains(self, pts: np.ndarray) -> np.ndarray:
        rel = pts - np.asarray(self.center)
        if self.kind == "sphere":
            return (rel ** 2).sum(axis=-1) <= self.size[0] ** 2
        if self.kind == "ellipsoid":
            return ((rel / self.extent()) ** 2).sum(axis=-1) <= 1.0
        if self.kind == "box":
            return np.all(np.abs(rel) <= self.extent(), axis=-1)
        raise SpecInvalid(f"unknown shape kind {self.kind!r}")

    def sdf(self, pts: np.ndarray) -> np.ndarray:
        """Exact signed distance in voxel units (negative inside)."""
        rel = np.asarray(pts, dtype=np.float64) - np.asarray(self.center)
        if self.kind == "sphere":
            return np.linalg.norm(rel, axis=-1) - self.size[0]
        if self.kind == "box":
            q = np.abs(rel) - self.extent()
            outside = np.linalg.norm(np.maximum(q, 0.0), axis=-1)
            return outside + np.minimum(q.max(axis=-1), 0.0)
        if self.kind == "ellipsoid":
            return ellipsoid_sdf(rel, self.extent())
        raise SpecInvalid(f"unknown shape kind {self.kind!r}")


def _closest_point_t(p2a2: np.ndarray, a2: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    # g(t) = sum(a_i^2 p_i^2 / (a_i^2 + t)^2) - 1 is decreasing on (-min a^2, inf)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        with np.errstate(divide="ignore", invalid="ignore"):
            g = np.nan_to_num((p2a2 / (a2 + mid[..., None]) ** 2), nan=0.0).sum(axis=-1) - 1.0
        pos = g > 0
        lo = np.where(pos, mid, lo)
        hi = np.where(pos, hi, mid)
    return 0.5 * (lo + hi)


def ellipsoid_sdf(rel: np.ndarray, semi_axes: np.ndarray) -> np.ndarray:
    """Signed distance to an axis-aligned ellipsoid by closest-point root finding.

    Works in the first octant (the problem is symmetric). The closest surface
    point is ``x_i = a_i^2 p_i / (a_i^2 + t)`` for the root ``t`` of the
    normal-equation constraint. Inside points on the plane of the shortest
    axis have no such root when they lie near the center; they take the
    degenerate solution instead.
    """
    rel = np.asarray(rel, dtype=np.float64)
    a = np.asarray(semi_axes, dtype=np.float64)
    order = np.argsort(a)  # shortest axis first
    a_s = a[order]
    a2 = a_s ** 2
    p = np.abs(rel.reshape(-1, 3)[:, order])
    inside = ((p / a_s) ** 2).sum(axis=1) <= 1.0
    lo = np.where(inside, -a2[0], 0.0)
    hi = np.where(inside, 0.0, a_s[-1] * np.linalg.norm(p, axis=1) + 1.0)
    t = _closest_point_t((p * a_s) ** 2, a2, lo, hi)
    with np.errstate(divide="ignore", invalid="ignore"):
        closest = np.where(p == 0, 0.0, a2 * p / (a2 + t[:, None]))
        dist = np.linalg.norm(closest - p, axis=1)
        denom = a2[1:] - a2[0]
        xo = np.where(denom > 0, a2[1:] * p[:, 1:] / denom, 0.0)
        rem = 1.0 - ((xo / a_s[1:]) ** 2).sum(axis=1)
    degenerate = inside & (p[:, 0] == 0) & (rem > 0) & np.all(denom > 0)
    if degenerate.any():
        cand = np.concatenate([a_s[0] * np.sqrt(np.maximum(rem, 0.0))[:, None], xo], axis=1)
        d_alt = np.linalg.norm(cand - p, axis=1)
        dist = np.where(degenerate, d_alt, dist)
    return np.where(inside, -dist, dist).reshape(rel.shape[:-1])


class Phantom(NamedTuple):
    image: ScalarVolume
    label: LabelVolume
    sdf: Dict[int, Callable[[np.ndarray], np.ndarray]]


@dataclass(frozen=True)
class PhantomSpec:
    preset: str
    dims: Tuple[int, int, int]
    shapes: Tuple[Shape, ...]
    spacing: Tuple[float, float, float] = (1.0, 1.0, 1.0)
    means: Dict[int, float] = field(default_factory=dict)
    noise: float = 0.0
    seed: int = 0

    def class_mean(self, c: int) -> float:
        return float(self.means.get(c, 100.0 * c))

    def validate(self) -> None:
        if len(self.dims) != 3 or min(self.dims) < 1:
            raise SpecInvalid(f"dims must be 3 positive integers, got {self.dims}")
        if not self.shapes:
            raise SpecInvalid("phantom needs at least one shape")
        if self.noise < 0:
            raise SpecInvalid("noise amplitude must be >= 0")
        if not 0 <= self.seed < 2 ** 64:
            raise SpecInvalid("seed must be a 64-bit unsigned integer")
        for s in self.shapes:
            if s.kind not in ("sphere", "ellipsoid", "box"):
                raise SpecInvalid(f"unknown shape kind {s.kind!r}")
            if not 1 <= s.class_id <= 255:
                raise SpecInvalid(f"class IDs must lie in [1, 255], got {s.class_id}")
            if np.any(s.extent() <= 0):
                raise SpecInvalid("shape sizes must be positive")
            lo = np.asarray(s.center) - s.extent()
            hi = np.asarray(s.center) + s.extent()
            if np.any(lo < 2) or np.any(hi > np.asarray(self.dims) - 3):
                raise SpecInvalid(f"{s.kind} of class {s.class_id} is closer than 2 voxels to the border")


def make_spec(preset: str, dims: Optional[Sequence[int]] = None, seed: int = 0,
              spacing=(1.0, 1.0, 1.0), radius: Optional[float] = None,
              minority_radius: Optional[float] = None,
              semi_axes: Optional[Sequence[float]] = None,
              half_widths: Optional[Sequence[float]] = None,
              center: Optional[Sequence[float]] = None,
              noise: float = 10.0, means: Optional[Dict[int, float]] = None) -> PhantomSpec:
    """Build a PhantomSpec for one of the named presets, centered in the volume by default."""
    if preset not in PRESETS:
        raise SpecInvalid(f"unknown preset {preset!r}; choose from {PRESETS}")
    if dims is None:
        dims = (96, 64, 64) if preset == "multi_organ" else (64, 64, 64)
    dims = tuple(int(n) for n in dims)
    mid = tuple((n - 1) / 2.0 for n in dims)
    c = tuple(float(v) for v in center) if center is not None else mid
    if preset == "sphere":
        r = 20.0 if radius is None else float(radius)
        shapes = (Shape("sphere", 1, c, (r, r, r)),)
    elif preset == "ellipsoid":
        ax = tuple(float(v) for v in (semi_axes or (20.0, 14.0, 10.0)))
        shapes = (Shape("ellipsoid", 1, c, ax),)
    elif preset == "box":
        hw = tuple(float(v) for v in (half_widths or (15.0, 10.0, 8.0)))
        shapes = (Shape("box", 1, c, hw),)
    else:
        big = 24.0 if radius is None else float(radius)
        small = 6.0 if minority_radius is None else float(minority_radius)
        # majority against the low-x side, minority in the remaining room
        cx_big = 2.0 + big + 1.0
        cx_small = dims[0] - 1 - 2.0 - small - 1.0
        shapes = (Shape("sphere", 1, (cx_big, mid[1], mid[2]), (big,) * 3),
                  Shape("sphere", 2, (cx_small, mid[1], mid[2]), (small,) * 3))
    spec = PhantomSpec(preset, dims, shapes, tuple(float(s) for s in spacing),
                       dict(means or {}), float(noise), int(seed))
    spec.validate()
    return spec


def generate(spec: PhantomSpec) -> Phantom:
    """Rasterize the spec: membership at voxel centers, per-class mean plus uniform noise."""
    spec.validate()
    pts = voxel_coordinates(spec.dims)
    label = np.zeros(spec.dims, dtype=np.uint8)
    owner = np.zeros(spec.dims, dtype=np.int32)
    for s in spec.shapes:
        inside = s.contains(pts)
        clash = inside & (owner != 0) & (owner != s.class_id)
        if clash.any():
            raise SpecInvalid(f"class {s.class_id} overlaps another class")
        owner[inside] = s.class_id
        label[inside] = s.class_id
    means = np.zeros(256)
    for c in range(1, 256):
        means[c] = spec.class_mean(c)
    means[0] = spec.class_mean(0)
    image = means[label]
    if spec.noise > 0:
        rng = np.random.Generator(np.random.Philox(spec.seed))
        image = image + rng.uniform(-spec.noise, spec.noise, size=spec.dims)
    by_class: Dict[int, list] = {}
    for s in spec.shapes:
        by_class.setdefault(s.class_id, []).append(s)
    sdfs = {c: _union_sdf(shapes) for c, shapes in by_class.items()}
    return Phantom(ScalarVolume(image, spec.spacing), LabelVolume(label, spec.spacing), sdfs)


def _union_sdf(shapes):
    def sdf(pts):
        return np.min([s.sdf(pts) for s in shapes], axis=0)
    return sdf
