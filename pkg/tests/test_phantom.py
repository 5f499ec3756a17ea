import numpy as np
import pytest

from stac.exceptions import SpecInvalid
from stac.grid import voxel_coordinates
from stac.phantom import PRESETS, Shape, PhantomSpec, ellipsoid_sdf, generate, make_spec


@pytest.mark.parametrize("preset", PRESETS)
def test_presets_generate(preset):
    ph = generate(make_spec(preset, seed=3))
    assert ph.image.dims == ph.label.dims
    for c, sdf in ph.sdf.items():
        inside = sdf(voxel_coordinates(ph.label.dims)) <= 0
        assert np.array_equal(inside, ph.label.data == c)


def test_seed_determinism():
    a = generate(make_spec("sphere", dims=(24,) * 3, radius=6, seed=5))
    b = generate(make_spec("sphere", dims=(24,) * 3, radius=6, seed=5))
    c = generate(make_spec("sphere", dims=(24,) * 3, radius=6, seed=6))
    assert np.array_equal(a.image.data, b.image.data)
    assert not np.array_equal(a.image.data, c.image.data)


def test_noise_bounds():
    ph = generate(make_spec("sphere", dims=(24,) * 3, radius=6, noise=3.0))
    resid = ph.image.data - 100.0 * ph.label.data
    assert np.abs(resid).max() <= 3.0


def test_noise_free_means():
    ph = generate(make_spec("multi_organ", noise=0.0, means={0: 5.0}))
    assert set(np.unique(ph.image.data)) == {5.0, 100.0, 200.0}


def test_multi_organ_ratio():
    ph = generate(make_spec("multi_organ"))
    counts = np.bincount(ph.label.data.ravel())
    assert counts[2] / counts[1] == pytest.approx((6 / 24) ** 3, rel=0.05)


def test_margin_and_overlap_rejected():
    with pytest.raises(SpecInvalid):
        make_spec("sphere", dims=(20,) * 3, radius=9)
    overlap = PhantomSpec("x", (40,) * 3, (Shape("sphere", 1, (15,) * 3, (6,) * 3),
                                            Shape("sphere", 2, (20,) * 3, (6,) * 3)))
    with pytest.raises(SpecInvalid):
        generate(overlap)
    with pytest.raises(SpecInvalid):
        make_spec("torus")


def _dense_ellipsoid_distance(p, a, n=400):
    u, v = np.meshgrid(np.linspace(0, np.pi, n), np.linspace(0, 2 * np.pi, 2 * n), indexing="ij")
    surf = np.stack([a[0] * np.sin(u) * np.cos(v), a[1] * np.sin(u) * np.sin(v), a[2] * np.cos(u)], -1)
    return np.sqrt(((surf.reshape(-1, 3)[None] - p[:, None]) ** 2).sum(-1)).min(1)


def test_ellipsoid_sdf_against_dense_surface():
    a = np.array([20.0, 14.0, 10.0])
    rng = np.random.default_rng(0)
    pts = np.concatenate([rng.uniform(-25, 25, (40, 3)), [[0, 0, 0], [3, 2, 0], [0, 5, 0]]])
    got = np.abs(ellipsoid_sdf(pts, a))
    np.testing.assert_allclose(got, _dense_ellipsoid_distance(pts, a), atol=0.05)
    inside = ((pts / a) ** 2).sum(1) <= 1
    assert np.array_equal(ellipsoid_sdf(pts, a) <= 0, inside)


def test_sphere_shaped_ellipsoid_matches_sphere():
    pts = np.random.default_rng(1).uniform(-9, 9, (200, 3))
    np.testing.assert_allclose(ellipsoid_sdf(pts, np.array([5.0, 5.0, 5.0])),
                               np.linalg.norm(pts, axis=1) - 5.0, atol=1e-9)


def test_box_sdf():
    box = Shape("box", 1, (0, 0, 0), (2, 1, 1))
    pts = np.array([[0, 0, 0], [3, 0, 0], [3, 2, 0], [1.5, 0, 0]], float)
    np.testing.assert_allclose(box.sdf(pts), [-1, 1, np.sqrt(2), -0.5])
