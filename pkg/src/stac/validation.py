"""Input coercion shared by the estimator and the CLI."""
from __future__ import annotations

from typing import Iterable, Tuple, Union

import numpy as np

from .exceptions import DomainError
from .grid import LabelVolume, ScalarVolume, check_same_grid

ArrayOrScalarVolume = Union[np.ndarray, ScalarVolume]
ArrayOrLabelVolume = Union[np.ndarray, LabelVolume]


def as_scalar_volume(x, spacing=None) -> ScalarVolume:
    if isinstance(x, ScalarVolume):
        if spacing is not None and tuple(map(float, spacing)) != x.spacing:
            raise DomainError(f"spacing {tuple(spacing)} conflicts with volume spacing {x.spacing}")
        return x
    return ScalarVolume(np.asarray(x), spacing if spacing is not None else (1.0, 1.0, 1.0))


def as_label_volume(y, spacing=None) -> LabelVolume:
    if isinstance(y, LabelVolume):
        if spacing is not None and tuple(map(float, spacing)) != y.spacing:
            raise DomainError(f"spacing {tuple(spacing)} conflicts with volume spacing {y.spacing}")
        return y
    return LabelVolume(np.asarray(y), spacing if spacing is not None else (1.0, 1.0, 1.0))


def check_volume_pair(x, y, spacing=None) -> Tuple[ScalarVolume, LabelVolume]:
    """Coerce an (image, label) pair to volumes on one grid.

    Plain arrays take ``spacing`` (default isotropic 1 mm); volumes keep their own.
    """
    xv = as_scalar_volume(x, spacing if not isinstance(x, ScalarVolume) else None)
    yv = as_label_volume(y, spacing if not isinstance(y, LabelVolume) else None)
    check_same_grid(xv, yv)
    return xv, yv


def parse_class_list(text: Union[str, Iterable[int]]) -> Tuple[int, ...]:
    """``"1,3,5"`` or an iterable of ints -> sorted unique class IDs in [0, 255]."""
    if isinstance(text, str):
        parts = [p for p in text.replace(" ", "").split(",") if p]
        try:
            ids = [int(p) for p in parts]
        except ValueError as exc:
            raise DomainError(f"invalid class list {text!r}") from exc
    else:
        ids = [int(c) for c in text]
    if not ids:
        raise DomainError("class list is empty")
    if any(not 0 <= c <= 255 for c in ids):
        raise DomainError(f"class IDs must lie in [0, 255], got {ids}")
    return tuple(sorted(set(ids)))
