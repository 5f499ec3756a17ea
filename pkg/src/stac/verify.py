"""Self-check suite run by ``stac verify``.

Each check compares the library against an oracle that does not share its
code path: brute-force distances, the analytic sphere, bit-identity, and the
closed-form boundary displacement ``r* = alpha * exp(beta * r*)``.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, List

import numpy as np

from .deform import AugmentParams
from .grid import LabelVolume, ScalarVolume, voxel_coordinates
from .phantom import generate, make_spec
from .sdf import brute_force_edt_squared, edt_squared, signed_distance
from .warp import augment_pair, augment_with_sdf

ENLARGEMENT_TOLERANCE = 0.15


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: {self.detail} ({self.seconds:.2f}s)"


def boundary_fixed_point(alpha: float = 1.0, beta: float = -1.0, tol: float = 1e-12) -> float:
    """Root of ``r = alpha * exp(beta * r)`` on [0, alpha] by bisection."""
    lo, hi = 0.0, float(alpha)
    if alpha == 0:
        return 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid - alpha * np.exp(beta * mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def equivalent_radius(count: int, voxel_volume: float = 1.0) -> float:
    """Radius of the ball whose volume equals ``count`` voxels."""
    return float((3.0 * count * voxel_volume / (4.0 * np.pi)) ** (1.0 / 3.0))


def random_masks(n: int, size: int = 16, seed: int = 0):
    rng = np.random.default_rng(seed)
    for _ in range(n):
        density = rng.uniform(0.005, 0.5)
        mask = rng.random((size, size, size)) < density
        if not mask.any():
            mask[tuple(rng.integers(0, size, 3))] = True
        yield mask


def check_edt(n_masks: int = 100, seed: int = 0) -> CheckResult:
    t0 = time.perf_counter()
    bad = 0
    edt_time = 0.0
    for mask in random_masks(n_masks, seed=seed):
        t = time.perf_counter()
        fast = edt_squared(mask).data
        edt_time += time.perf_counter() - t
        if not np.array_equal(fast, brute_force_edt_squared(mask)):
            bad += 1
    return CheckResult("edt brute-force equivalence", bad == 0,
                       f"{n_masks - bad}/{n_masks} masks exact, edt time {edt_time:.2f}s",
                       time.perf_counter() - t0)


def sphere_phantom(radius: float = 20.0, n: int = 64, seed: int = 0):
    return generate(make_spec("sphere", dims=(n, n, n), radius=radius, seed=seed))


def check_sphere_sdf() -> CheckResult:
    t0 = time.perf_counter()
    ph = sphere_phantom()
    phi = signed_distance(ph.label, [1])
    err = float(np.abs(phi.data - ph.sdf[1](voxel_coordinates(ph.label.dims))).max())
    return CheckResult("sphere sdf max error", err <= 1.0, f"{err:.4f} voxels (limit 1.0)",
                       time.perf_counter() - t0)


def check_identity() -> CheckResult:
    t0 = time.perf_counter()
    ph = sphere_phantom()
    out = augment_pair(ph.image, ph.label, [1], AugmentParams(alpha=0.0))
    same = (np.array_equal(out.image.data, ph.image.data)
            and np.array_equal(out.label.data, ph.label.data))
    return CheckResult("identity warp (alpha=0)", same,
                       "bit-identical" if same else "outputs differ", time.perf_counter() - t0)


def radius_growth(label_before: LabelVolume, label_after: LabelVolume, c: int = 1) -> float:
    return (equivalent_radius(int((label_after.data == c).sum()))
            - equivalent_radius(int((label_before.data == c).sum())))


def check_enlargement(params: AugmentParams = AugmentParams()) -> CheckResult:
    """Label-derived SDF, end to end: equivalent-radius growth of the sphere."""
    t0 = time.perf_counter()
    ph = sphere_phantom()
    target = boundary_fixed_point(params.alpha, params.beta)
    growth = radius_growth(ph.label, augment_pair(ph.image, ph.label, [1], params).label)
    ok = abs(growth - target) <= ENLARGEMENT_TOLERANCE
    return CheckResult("enlargement magnitude (label-derived sdf)", ok,
                       f"radius +{growth:.3f} vs {target:.4f} +/- {ENLARGEMENT_TOLERANCE}",
                       time.perf_counter() - t0)


def check_enlargement_analytic(params: AugmentParams = AugmentParams()) -> CheckResult:
    """Same measurement, with the warp driven by the exact sphere SDF."""
    t0 = time.perf_counter()
    ph = sphere_phantom()
    phi = ScalarVolume(ph.sdf[1](voxel_coordinates(ph.label.dims)), ph.label.spacing)
    target = boundary_fixed_point(params.alpha, params.beta)
    growth = radius_growth(ph.label, augment_with_sdf(ph.image, ph.label, phi, params).label)
    ok = abs(growth - target) <= ENLARGEMENT_TOLERANCE
    return CheckResult("enlargement magnitude (analytic sdf)", ok,
                       f"radius +{growth:.3f} vs {target:.4f} +/- {ENLARGEMENT_TOLERANCE}",
                       time.perf_counter() - t0)


CHECKS: List[Callable[[], CheckResult]] = [
    lambda: check_edt(25),
    check_sphere_sdf,
    check_identity,
    check_enlargement_analytic,
    check_enlargement,
]


def run_all() -> List[CheckResult]:
    return [check() for check in CHECKS]
