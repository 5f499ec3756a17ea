import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays
from scipy import ndimage

from stac.exceptions import DomainError, ShapeMismatch
from stac.grid import (GridPoint, LabelVolume, ScalarVolume, VectorField,
                       check_same_grid, nearest, sample_nearest,
                       sample_trilinear, trilinear)


def test_constant_volume_samples_constant():
    vol = ScalarVolume(np.full((4, 5, 6), 5.0))
    for p in [(0.3, 1.7, 2.2), (-4, 10, 2.5), (3, 4, 5)]:
        assert sample_trilinear(vol, GridPoint(*p)) == 5.0


def test_integer_point_returns_stored_value():
    data = np.arange(5 * 6 * 7, dtype=float).reshape(5, 6, 7)
    vol = ScalarVolume(data)
    assert sample_trilinear(vol, GridPoint(2, 3, 4)) == data[2, 3, 4]


def test_linear_interpolation_along_x():
    vol = ScalarVolume(np.array([0.0, 10.0]).reshape(2, 1, 1))
    assert sample_trilinear(vol, GridPoint(0.25, 0, 0)) == pytest.approx(2.5)


def test_nearest_examples():
    lab = LabelVolume(np.array([1, 2], dtype=np.uint8).reshape(2, 1, 1))
    assert sample_nearest(lab, GridPoint(1, 0, 0)) == 2
    assert sample_nearest(lab, GridPoint(0.49, 0, 0)) == 1
    assert sample_nearest(lab, GridPoint(-3, 0, 0)) == 1
    assert sample_nearest(lab, GridPoint(0.5, 0, 0)) == 1  # tie -> smaller index
    assert sample_nearest(lab, GridPoint(0.51, 0, 0)) == 2


def test_volumes_are_immutable():
    vol = ScalarVolume(np.zeros((2, 2, 2)))
    with pytest.raises(ValueError):
        vol.data[0, 0, 0] = 1.0


@pytest.mark.parametrize("bad", [(0, 1, 1), (1, -1, 1), (1, 1)])
def test_spacing_validation(bad):
    with pytest.raises(DomainError):
        ScalarVolume(np.zeros((2, 2, 2)), bad)


def test_non_finite_rejected():
    with pytest.raises(DomainError):
        ScalarVolume(np.array([np.nan]).reshape(1, 1, 1))
    with pytest.raises(DomainError):
        VectorField(np.full((1, 1, 1, 3), np.inf))


def test_label_range_checked():
    with pytest.raises(DomainError):
        LabelVolume(np.array([256]).reshape(1, 1, 1))
    with pytest.raises(DomainError):
        LabelVolume(np.array([-1]).reshape(1, 1, 1))


def test_check_same_grid():
    a = ScalarVolume(np.zeros((2, 2, 2)))
    with pytest.raises(ShapeMismatch):
        check_same_grid(a, ScalarVolume(np.zeros((2, 2, 3))))
    with pytest.raises(ShapeMismatch):
        check_same_grid(a, ScalarVolume(np.zeros((2, 2, 2)), (1, 1, 2)))


volumes = arrays(np.float64, st.tuples(st.integers(1, 5), st.integers(1, 5), st.integers(1, 5)),
                 elements=st.floats(-1e3, 1e3))
points = st.lists(st.floats(-3, 8), min_size=3, max_size=3)


@settings(max_examples=200, deadline=None)
@given(volumes, points)
def test_trilinear_matches_scipy_and_is_bounded(data, p):
    coords = np.array(p)
    got = trilinear(data, coords[None])[0]
    clamped = np.clip(coords, 0, np.array(data.shape) - 1)
    expected = ndimage.map_coordinates(data, clamped[:, None], order=1, mode="nearest")[0]
    assert got == pytest.approx(expected, abs=1e-9)
    lo = np.floor(clamped).astype(int)
    hi = np.minimum(lo + 1, np.array(data.shape) - 1)
    block = data[lo[0]:hi[0] + 1, lo[1]:hi[1] + 1, lo[2]:hi[2] + 1]
    assert block.min() - 1e-9 <= got <= block.max() + 1e-9


@settings(max_examples=100, deadline=None)
@given(volumes)
def test_trilinear_exact_at_voxel_centers(data):
    coords = np.stack(np.meshgrid(*(np.arange(n) for n in data.shape), indexing="ij"), -1)
    assert np.array_equal(trilinear(data, coords.astype(float)), data)


@settings(max_examples=100, deadline=None)
@given(arrays(np.uint8, (3, 4, 2), elements=st.integers(0, 5)), points)
def test_nearest_returns_present_value(data, p):
    assert nearest(data, np.array(p)[None])[0] in set(data.ravel())
