import numpy as np
import pytest

from zollspec.numrange import (ConvexRegion, field_of_values, hausdorff,
                               limit_range, numerical_range_k)
from zollspec.operator import compression
from zollspec.polysphere import AmbientPolynomial

ZERO = AmbientPolynomial.zero()
ZETA2 = AmbientPolynomial.zeta(2)
QUAD = AmbientPolynomial({(2, 0, 0): 4, (0, 2, 0): -1, (1, 1, 0): 4j})


def test_segment_case():
    r = field_of_values(np.diag([0.0, 1.0]).astype(complex))
    assert r.kind == "segment"
    ends = sorted(r.vertices.real)
    assert abs(ends[0]) <= 1e-12 and abs(ends[1] - 1) <= 1e-12


def test_point_case():
    r = field_of_values(-0.25 * np.eye(4, dtype=complex))
    assert r.kind == "point"
    assert abs(r.vertices[0] + 0.25) <= 1e-14
    assert r.diameter() == 0.0


def test_jordan_block_disk():
    J = np.array([[0, 1], [0, 0]], dtype=complex)
    r = field_of_values(J, n_angles=720)
    radii = np.abs(r.vertices)
    assert np.max(np.abs(radii - 0.5)) <= 1e-6
    # random-vector oracle stays inside (up to polygon sagitta)
    rng = np.random.default_rng(51)
    for _ in range(2000):
        v = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        v /= np.linalg.norm(v)
        assert r.contains(np.vdot(v, J @ v), tol=1e-4)


def test_angle_count_validation():
    with pytest.raises(ValueError):
        field_of_values(np.eye(2, dtype=complex), n_angles=4)


def test_numerical_range_free():
    r = numerical_range_k(ZERO, 3)
    assert r.kind == "point"
    assert abs(r.vertices[0] + 0.25) <= 1e-14


def test_numerical_range_zeta2_disk():
    r = numerical_range_k(ZETA2, 1)
    B = compression(ZETA2, 1)
    radius = abs(B[2, 0]) / 2
    d = np.abs(r.vertices - (-0.25))
    assert np.max(np.abs(d - radius)) <= 1e-8
    # oracle: random Rayleigh quotients stay inside
    rng = np.random.default_rng(52)
    for _ in range(500):
        v = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        v /= np.linalg.norm(v)
        assert r.contains(np.vdot(v, B @ v), tol=1e-3)


def test_spectral_containment():
    for k in (3, 6, 10):
        r = numerical_range_k(QUAD, k)
        for lam in np.linalg.eigvals(compression(QUAD, k)):
            assert r.contains(lam, tol=1e-8)


def test_limit_range_free():
    r = limit_range(ZERO, 100)
    assert r.kind == "point"
    assert abs(r.vertices[0] + 0.25) <= 1e-14


def test_limit_range_real_segment():
    # V = z^2 averages to 1/2 - z^2/2, so the limit is [-1/4, 1/4]
    r = limit_range(AmbientPolynomial({(0, 0, 2): 1.0}), 4000)
    assert r.kind == "segment"
    ends = sorted(r.vertices.real)
    assert abs(ends[0] + 0.25) <= 1e-3
    assert abs(ends[1] - 0.25) <= 1e-3
    assert np.max(np.abs(r.vertices.imag)) <= 1e-12


def test_limit_range_validation():
    with pytest.raises(ValueError):
        limit_range(ZERO, 50)


def test_hausdorff_trivial():
    p0 = ConvexRegion.from_points([0.0 + 0.0j])
    p1 = ConvexRegion.from_points([1.0 + 0.0j])
    assert hausdorff(p0, p0) == 0.0
    assert abs(hausdorff(p0, p1) - 1.0) <= 1e-15


def test_hausdorff_scaled_disks():
    th = np.linspace(0, 2 * np.pi, 10000, endpoint=False)
    d1 = ConvexRegion.from_points(np.exp(1j * th))
    d2 = ConvexRegion.from_points(1.1 * np.exp(1j * th))
    assert abs(hausdorff(d1, d2, n=8192) - 0.1) <= 1e-6


def test_convex_region_properties():
    r = field_of_values(np.array([[0, 1], [0, 0]], dtype=complex))
    v = np.append(r.vertices, r.vertices[0])
    cross = np.imag((v[1:-1] - v[:-2]).conj() * (v[2:] - v[1:-1]))
    assert np.all(cross >= -1e-12)  # counterclockwise convex polyline
    b = r.boundary_points(512)
    assert b.size >= 512
    with pytest.raises(ValueError):
        ConvexRegion.from_points([])


def test_range_convergence_to_limit():
    limit = limit_range(QUAD, 1500)
    d = [hausdorff(numerical_range_k(QUAD, k, n_angles=180), limit)
         for k in (5, 10, 20)]
    assert d[0] > d[1] > d[2]


def test_averaged_values_near_cluster_range():
    # sampled averaged-potential values sit close inside the k=20 range
    from zollspec.operator import SPHERE
    from zollspec.radon import radon_poly
    from zollspec.sphharm import fibonacci_sphere

    region = numerical_range_k(QUAD, 20, n_angles=180)
    boundary = region.boundary_points(4096)
    vt = radon_poly(QUAD)
    pts = fibonacci_sphere(500)
    vals = vt.evaluate(pts[:, 0], pts[:, 1], pts[:, 2]) + SPHERE.q0
    limit = limit_range(QUAD, 1500)
    allowed = 0.1 * limit.diameter()
    for z in vals:
        if region.contains(z, tol=1e-12):
            continue
        assert np.min(np.abs(boundary - z)) <= allowed
