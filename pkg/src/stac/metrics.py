"""Class-imbalance statistics, minority selection, Dice and ASD."""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Dict, Optional, Tuple, Union

import numpy as np

from .exceptions import DomainError, EmptySurface, NoForeground, ShapeMismatch
from .grid import LabelVolume, check_same_grid
from .sdf import _edt_sq_array


@dataclass(frozen=True)
class ClassStats:
    counts: Dict[int, int]
    fractions: Dict[int, float]
    imbalance_ratio: Optional[float]
    minority: Optional[Tuple[int, ...]] = None

    @property
    def foreground(self) -> Dict[int, int]:
        return {c: n for c, n in self.counts.items() if c != 0 and n > 0}

    def with_minority(self, minority) -> "ClassStats":
        return replace(self, minority=tuple(sorted(int(c) for c in minority)))

    def to_dict(self) -> dict:
        return {
            "counts": {str(c): n for c, n in sorted(self.counts.items())},
            "fractions": {str(c): f for c, f in sorted(self.fractions.items())},
            "imbalance_ratio": self.imbalance_ratio,
            "minority": list(self.minority) if self.minority is not None else [],
        }


def class_histogram(y: LabelVolume) -> ClassStats:
    """Exact voxel counts per class present in ``y``.

    The imbalance ratio compares the largest and smallest foreground classes;
    it is ``None`` when there is no foreground.
    """
    data = y.data if isinstance(y, LabelVolume) else np.asarray(y)
    ids, counts = np.unique(data, return_counts=True)
    total = int(counts.sum())
    count_map = {int(c): int(n) for c, n in zip(ids, counts)}
    fractions = {c: n / total for c, n in count_map.items()}
    fg = [n for c, n in count_map.items() if c != 0]
    ratio = max(fg) / min(fg) if fg else None
    return ClassStats(count_map, fractions, ratio)


def parse_policy(policy: Union[str, Tuple[str, float]]) -> Tuple[str, float]:
    if isinstance(policy, tuple):
        kind, value = policy
    else:
        kind, _, value = str(policy).partition(":")
    kind = kind.strip()
    if kind == "fraction":
        t = float(value)
        if not 0 < t <= 1:
            raise DomainError(f"fraction threshold must lie in (0, 1], got {t}")
        return kind, t
    if kind == "bottom":
        k = int(value)
        if k < 1:
            raise DomainError(f"bottom:k needs k >= 1, got {k}")
        return kind, k
    raise DomainError(f"unknown minority policy {policy!r}; use fraction:T or bottom:K")


def select_minority(stats: ClassStats, policy="fraction:0.01") -> Tuple[int, ...]:
    """Pick the minority set M from foreground classes.

    ``fraction:T`` keeps every foreground class whose fraction is below T;
    ``bottom:K`` keeps the K smallest, ties broken by ascending class ID.
    """
    fg = stats.foreground
    if not fg:
        raise NoForeground("label volume has no foreground class")
    kind, value = parse_policy(policy)
    if kind == "fraction":
        chosen = [c for c in fg if stats.fractions[c] < value]
    else:
        chosen = sorted(fg, key=lambda c: (fg[c], c))[:value]
    return tuple(sorted(chosen))


def _class_masks(a, b, c):
    a_data = a.data if isinstance(a, LabelVolume) else np.asarray(a)
    b_data = b.data if isinstance(b, LabelVolume) else np.asarray(b)
    if isinstance(a, LabelVolume) and isinstance(b, LabelVolume):
        check_same_grid(a, b)
    elif a_data.shape != b_data.shape:
        raise ShapeMismatch(f"shapes differ: {a_data.shape} vs {b_data.shape}")
    return a_data == c, b_data == c


def dice(a: LabelVolume, b: LabelVolume, c: int) -> float:
    """Dice overlap of class ``c``; 1.0 when both masks are empty."""
    ma, mb = _class_masks(a, b, c)
    total = int(ma.sum()) + int(mb.sum())
    if total == 0:
        return 1.0
    return 2.0 * int(np.logical_and(ma, mb).sum()) / total


def surface_voxels(mask: np.ndarray) -> np.ndarray:
    """Foreground voxels with at least one 6-neighbor outside the mask (or the volume)."""
    padded = np.pad(mask, 1, constant_values=False)
    interior = padded[1:-1, 1:-1, 1:-1].copy()
    for axis in range(3):
        for shift in (-1, 1):
            interior &= np.roll(padded, shift, axis=axis)[1:-1, 1:-1, 1:-1]
    return mask & ~interior


def average_surface_distance(a: LabelVolume, b: LabelVolume, c: int) -> float:
    """Symmetric average surface distance (mm) between the class-``c`` masks."""
    ma, mb = _class_masks(a, b, c)
    if not ma.any() or not mb.any():
        raise EmptySurface(f"class {c} is missing from at least one volume")
    spacing = a.spacing if isinstance(a, LabelVolume) else (1.0, 1.0, 1.0)
    sa, sb = surface_voxels(ma), surface_voxels(mb)
    to_b = np.sqrt(_edt_sq_array(sb, spacing))[sa]
    to_a = np.sqrt(_edt_sq_array(sa, spacing))[sb]
    return float(0.5 * (to_b.mean() + to_a.mean()))
