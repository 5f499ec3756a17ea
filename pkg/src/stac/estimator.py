"""scikit-learn style wrapper around the augmentation.

The estimator learns which classes count as minority from the training
labels, then applies the shape transform to (image, label) pairs::

    aug = ShapeTransformAugmenter(alpha=1.0, beta=-1.0, minority="bottom:2")
    image_t, label_t = aug.fit_resample(image, label)
"""
from __future__ import annotations


import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .deform import AugmentParams
from .grid import ScalarVolume
from .metrics import class_histogram, select_minority
from .validation import as_scalar_volume, check_volume_pair, parse_class_list
from .warp import AugmentedPair, augment_pair, augment_with_sdf


class ShapeTransformAugmenter(BaseEstimator):
    """Enlarge minority classes of 3D image/label pairs.

    Parameters
    ----------
    alpha : float, default=1.0
        Peak displacement in millimeters.
    beta : float, default=-1.0
        Exponential decay of the displacement per millimeter from the boundary.
    minority : str or sequence of int, default="fraction:0.01"
        Either an explicit list of class IDs, or a selection policy evaluated
        on the labels passed to ``fit``: ``"fraction:T"`` or ``"bottom:K"``.
    enlarge : bool, default=True
        ``False`` shrinks the selected classes instead.
    literal_sign : bool, default=False
        Sample from ``p + W * grad(phi)``, which shrinks the selected classes.
    boundary : {"midpoint", "voxel"}, default="midpoint"
        Where the zero level of label-derived SDFs sits.
    spacing : tuple of float, optional
        Voxel spacing for plain-array inputs.
    epsilon : float, default=1e-8
        Gradient floor below which no displacement is applied.

    Attributes
    ----------
    stats_ : ClassStats
        Class histogram of the labels seen in ``fit``.
    minority_ : tuple of int
        Classes that ``transform`` enlarges.
    """

    def __init__(self, alpha=1.0, beta=-1.0, minority="fraction:0.01", enlarge=True,
                 literal_sign=False, boundary="midpoint", spacing=None, epsilon=1e-8):
        self.alpha = alpha
        self.beta = beta
        self.minority = minority
        self.enlarge = enlarge
        self.literal_sign = literal_sign
        self.boundary = boundary
        self.spacing = spacing
        self.epsilon = epsilon

    def _params(self) -> AugmentParams:
        return AugmentParams(alpha=self.alpha, beta=self.beta, enlarge=self.enlarge,
                             literal_sign=self.literal_sign, epsilon=self.epsilon,
                             boundary=self.boundary)

    def fit(self, X, y):
        self._params()  # validate hyperparameters early
        _, yv = check_volume_pair(X, y, self.spacing)
        stats = class_histogram(yv)
        if isinstance(self.minority, str) and ":" in self.minority:
            chosen = select_minority(stats, self.minority)
        else:
            chosen = parse_class_list(self.minority)
        self.stats_ = stats.with_minority(chosen)
        self.minority_ = tuple(chosen)
        return self

    def augment(self, X, y, sdf=None) -> AugmentedPair:
        """Transform one pair and return volumes plus provenance.

        If ``sdf`` is given (e.g. a network's predicted SDF for an unlabeled
        image), it drives the deformation instead of one derived from ``y``.
        """
        check_is_fitted(self, "minority_")
        xv, yv = check_volume_pair(X, y, self.spacing)
        params = self._params()
        if sdf is None:
            return augment_pair(xv, yv, self.minority_, params)
        phi = as_scalar_volume(sdf, xv.spacing if not isinstance(sdf, ScalarVolume) else None)
        return augment_with_sdf(xv, yv, phi, params, minority=self.minority_)

    def transform(self, X, y, sdf=None):
        """Return the transformed ``(image, label)``, as arrays when arrays were given."""
        out = self.augment(X, y, sdf)
        if isinstance(X, ScalarVolume):
            return out.image, out.label
        return np.asarray(out.image.data), np.asarray(out.label.data)

    def fit_resample(self, X, y):
        return self.fit(X, y).transform(X, y)

    def fit_transform(self, X, y):
        return self.fit_resample(X, y)
