"""Exact Euclidean distance transforms and signed distance functions.

The squared EDT is computed with the separable lower-envelope-of-parabolas
algorithm of Felzenszwalb and Huttenlocher, one O(n) pass per axis, with
each pass scaled by that axis' spacing so anisotropic grids stay exact.
"""
from __future__ import annotations

import os
from typing import Iterable, Union

import numba
import numpy as np

from .exceptions import CflViolation, EmptyMask, FullMask, TooLarge
from .grid import LabelVolume, ScalarVolume

#: SDF volumes are plain scalar volumes holding signed millimeter distances.
SdfVolume = ScalarVolume

BRUTE_FORCE_MAX_VOXELS = 32 ** 3

# the bundled TBB is too old for numba and only produces a warning
numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

BOUNDARY_CONVENTIONS = ("voxel", "midpoint")


def configure_threads(n: int | None = None) -> int:
    """Apply the ``STAC_THREADS`` cap to the parallel kernels (0 means auto)."""
    if n is None:
        try:
            n = int(os.environ.get("STAC_THREADS", "0"))
        except ValueError:
            n = 0
    limit = numba.config.NUMBA_NUM_THREADS
    n = limit if n <= 0 else min(n, limit)
    numba.set_num_threads(n)
    return n


@numba.njit(cache=True)
def _envelope_row(f, out, s, v, z):
    n = f.shape[0]
    s2 = s * s
    k = -1
    for q in range(n):
        fq = f[q]
        if not np.isfinite(fq):
            continue
        if k < 0:
            k = 0
            v[0] = q
            z[0] = -np.inf
            z[1] = np.inf
            continue
        while True:
            p = v[k]
            x = (fq - f[p] + s2 * (q * q - p * p)) / (2.0 * s2 * (q - p))
            if x <= z[k]:
                k -= 1
                if k < 0:
                    break
            else:
                break
        if k < 0:
            k = 0
            v[0] = q
            z[0] = -np.inf
            z[1] = np.inf
            continue
        k += 1
        v[k] = q
        z[k] = x
        z[k + 1] = np.inf
    if k < 0:
        for q in range(n):
            out[q] = np.inf
        return
    k = 0
    for q in range(n):
        while z[k + 1] < q:
            k += 1
        d = s * (q - v[k])
        out[q] = d * d + f[v[k]]


@numba.njit(parallel=True, cache=True)
def _envelope_rows(rows, s):
    m, n = rows.shape
    out = np.empty_like(rows)
    for r in numba.prange(m):
        v = np.empty(n, dtype=np.int64)
        z = np.empty(n + 1, dtype=np.float64)
        _envelope_row(rows[r], out[r], s, v, z)
    return out


def _edt_sq_array(mask: np.ndarray, spacing) -> np.ndarray:
    f = np.where(mask, 0.0, np.inf)
    for axis in range(3):
        moved = np.ascontiguousarray(np.moveaxis(f, axis, -1))
        shape = moved.shape
        res = _envelope_rows(moved.reshape(-1, shape[-1]), float(spacing[axis]))
        f = np.moveaxis(res.reshape(shape), -1, axis)
    return np.ascontiguousarray(f)


def _as_mask(mask) -> tuple[np.ndarray, tuple]:
    if isinstance(mask, (LabelVolume, ScalarVolume)):
        return mask.data != 0, mask.spacing
    return np.asarray(mask) != 0, None


def edt_squared(mask, spacing=None) -> ScalarVolume:
    """Squared distance (mm^2) from each voxel center to the nearest foreground center.

    ``mask`` may be a LabelVolume (nonzero is foreground) or a boolean array.
    """
    arr, own_spacing = _as_mask(mask)
    if spacing is None:
        spacing = own_spacing or (1.0, 1.0, 1.0)
    if arr.ndim != 3:
        raise ValueError(f"expected a 3D mask, got shape {arr.shape}")
    if not arr.any():
        raise EmptyMask("mask has no foreground voxel")
    return ScalarVolume(_edt_sq_array(arr, spacing), spacing)


def minority_mask(label: LabelVolume, minority: Iterable[int]) -> np.ndarray:
    classes = sorted({int(c) for c in minority})
    if not classes:
        raise EmptyMask("minority class set is empty")
    return np.isin(label.data, classes)


def _check_partition(mask: np.ndarray) -> None:
    if not mask.any():
        raise EmptyMask("no voxel belongs to the selected classes")
    if mask.all():
        raise FullMask("every voxel belongs to the selected classes")


def _apply_boundary(phi: np.ndarray, spacing, boundary: str) -> np.ndarray:
    if boundary == "voxel":
        return phi
    if boundary == "midpoint":
        return phi - np.sign(phi) * (0.5 * min(spacing))
    raise ValueError(f"boundary must be one of {BOUNDARY_CONVENTIONS}, got {boundary!r}")


def signed_distance(label: LabelVolume, minority: Iterable[int], boundary: str = "voxel") -> SdfVolume:
    """Signed distance to the region whose labels are in ``minority``.

    Negative inside, positive outside. With ``boundary="voxel"`` each voxel
    holds the distance to the nearest center of the opposite set, so
    ``|phi| >= min(spacing)``. ``boundary="midpoint"`` pulls every value half
    a (smallest) voxel toward zero, placing the zero level between the
    boundary voxel centers instead of on them.
    """
    mask = minority_mask(label, minority)
    _check_partition(mask)
    sp = label.spacing
    outside = np.sqrt(_edt_sq_array(mask, sp))
    inside = np.sqrt(_edt_sq_array(~mask, sp))
    phi = np.where(mask, -inside, outside)
    return ScalarVolume(_apply_boundary(phi, sp, boundary), sp)


def _pairwise_min_sq(points: np.ndarray, targets: np.ndarray, spacing) -> np.ndarray:
    """Minimum squared distance from each point to any target, by exhaustive search."""
    sp = np.asarray(spacing, dtype=np.float64)
    a = points * sp
    b = targets * sp
    bb = (b * b).sum(axis=1)
    out = np.empty(len(a))
    # |a - b|^2 = |a|^2 + |b|^2 - 2 a.b; integer-exact in float64 for unit spacing
    for lo in range(0, len(a), 1024):
        blk = a[lo:lo + 1024]
        d2 = (blk * blk).sum(axis=1)[:, None] + bb[None, :] - 2.0 * (blk @ b.T)
        out[lo:lo + 1024] = d2.min(axis=1)
    return np.maximum(out, 0.0)


def brute_force_sdf(label: LabelVolume, minority: Iterable[int], boundary: str = "voxel") -> SdfVolume:
    """Exhaustive nearest-voxel search; an independent check of :func:`signed_distance`."""
    if label.data.size > BRUTE_FORCE_MAX_VOXELS:
        raise TooLarge(f"{label.data.size} voxels exceeds the brute-force limit of {BRUTE_FORCE_MAX_VOXELS}")
    mask = minority_mask(label, minority)
    _check_partition(mask)
    inside = np.argwhere(mask).astype(np.float64)
    outside = np.argwhere(~mask).astype(np.float64)
    phi = np.empty(mask.shape)
    phi[mask] = -np.sqrt(_pairwise_min_sq(inside, outside, label.spacing))
    phi[~mask] = np.sqrt(_pairwise_min_sq(outside, inside, label.spacing))
    return ScalarVolume(_apply_boundary(phi, label.spacing, boundary), label.spacing)


def brute_force_edt_squared(mask: np.ndarray, spacing=(1.0, 1.0, 1.0)) -> np.ndarray:
    """All-pairs minimum squared distance to foreground; O(V^2), small volumes only."""
    mask = np.asarray(mask, dtype=bool)
    if mask.size > BRUTE_FORCE_MAX_VOXELS:
        raise TooLarge(f"{mask.size} voxels exceeds the brute-force limit")
    if not mask.any():
        raise EmptyMask("mask has no foreground voxel")
    every = np.argwhere(np.ones(mask.shape, dtype=bool)).astype(np.float64)
    fg = np.argwhere(mask).astype(np.float64)
    return _pairwise_min_sq(every, fg, spacing).reshape(mask.shape)


def _upwind_differences(phi: np.ndarray, axis: int, h: float):
    # linear-extrapolation ghost cells keep one-sided slopes at the faces
    first = np.take(phi, [0], axis=axis)
    second = np.take(phi, [1], axis=axis) if phi.shape[axis] > 1 else first
    last = np.take(phi, [-1], axis=axis)
    penult = np.take(phi, [-2], axis=axis) if phi.shape[axis] > 1 else last
    padded = np.concatenate([2 * first - second, phi, 2 * last - penult], axis=axis)
    n = phi.shape[axis]
    centre = padded.take(np.arange(1, n + 1), axis=axis)
    minus = (centre - padded.take(np.arange(0, n), axis=axis)) / h
    plus = (padded.take(np.arange(2, n + 2), axis=axis) - centre) / h
    return minus, plus


def evolve_level_set_step(phi: ScalarVolume, speed: Union[ScalarVolume, float], dt: float) -> ScalarVolume:
    """One explicit Euler step of ``dphi/dt = V * |grad phi|`` with Godunov upwinding.

    Negative speed moves the zero level outward (the region phi < 0 grows).
    """
    v = speed.data if isinstance(speed, ScalarVolume) else np.full(phi.dims, float(speed))
    if v.shape != phi.data.shape:
        raise ValueError(f"speed shape {v.shape} does not match phi {phi.data.shape}")
    h_min = min(phi.spacing)
    vmax = float(np.abs(v).max())
    if dt < 0 or dt * vmax > 0.5 * h_min:
        raise CflViolation(f"dt*max|V| = {dt * vmax:g} exceeds 0.5*min(spacing) = {0.5 * h_min:g}")
    if vmax == 0.0:
        return phi.replace(phi.data)
    grow_sq = np.zeros_like(phi.data)    # used where V < 0
    shrink_sq = np.zeros_like(phi.data)  # used where V > 0
    for axis in range(3):
        if phi.dims[axis] == 1:
            continue
        dm, dp = _upwind_differences(phi.data, axis, phi.spacing[axis])
        grow_sq += np.maximum(dm, 0.0) ** 2 + np.minimum(dp, 0.0) ** 2
        shrink_sq += np.minimum(dm, 0.0) ** 2 + np.maximum(dp, 0.0) ** 2
    grad = np.where(v < 0, np.sqrt(grow_sq), np.sqrt(shrink_sq))
    return phi.replace(phi.data + dt * v * grad)
