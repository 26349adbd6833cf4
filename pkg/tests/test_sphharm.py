import math

import numpy as np
import pytest
from scipy.special import sph_harm_y

from zollspec.polysphere import AmbientPolynomial, X, Z
from zollspec.sphharm import (HarmonicIndex, basis_indices, basis_position,
                              fibonacci_sphere, gram_matrix,
                              harmonic_coefficients, multiplication_block,
                              multiplication_matrix, quadrature_rule,
                              sup_norm_estimate, ylm_eval, ylm_matrix,
                              ylm_polynomial, ylm_rows)

ZETA2 = AmbientPolynomial.zeta(2)
QUAD = AmbientPolynomial({(2, 0, 0): 4, (0, 2, 0): -1, (1, 1, 0): 4j})


def surface_monomial_integral(i, j, k):
    """Exact integral of x^i y^j z^k over the sphere (double factorials)."""
    if i % 2 or j % 2 or k % 2:
        return 0.0
    def df(n):
        out = 1
        while n > 1:
            out *= n
            n -= 2
        return out
    return 4 * math.pi * df(i - 1) * df(j - 1) * df(k - 1) / df(i + j + k + 1)


def test_harmonic_index_validation():
    HarmonicIndex(3, -3)
    with pytest.raises(ValueError):
        HarmonicIndex(2, 3)
    with pytest.raises(ValueError):
        ylm_eval((2, 3), 0.1, 0.2)


def test_basis_ordering():
    idx = basis_indices(2)
    assert len(idx) == 9
    assert idx[0] == HarmonicIndex(0, 0)
    assert idx[basis_position(2, -1)] == HarmonicIndex(2, -1)


def test_quadrature_trivials():
    rule = quadrature_rule(8)
    assert abs(rule.integrate(np.ones(rule.npoints)) - 4 * np.pi) <= 1e-12
    pts = rule.cartesian()
    assert abs(rule.integrate(pts[:, 2] ** 2) - 4 * np.pi / 3) <= 1e-12


def test_quadrature_band_exactness_monomials():
    band = 10
    rule = quadrature_rule(band)
    pts = rule.cartesian()
    rng = np.random.default_rng(21)
    for _ in range(40):
        e = rng.integers(0, band + 1, size=3)
        if e.sum() > band:
            continue
        vals = pts[:, 0] ** e[0] * pts[:, 1] ** e[1] * pts[:, 2] ** e[2]
        exact = surface_monomial_integral(*e)
        assert abs(rule.integrate(vals) - exact) <= 1e-12 * max(1.0, abs(exact))


def test_ylm_values():
    assert abs(ylm_eval((0, 0), 0.37, 2.2) - 1 / math.sqrt(4 * math.pi)) < 1e-15
    th = 0.7
    assert abs(ylm_eval((1, 0), th, 0.0)
               - math.sqrt(3 / (4 * math.pi)) * math.cos(th)) < 1e-15
    with pytest.raises(ValueError):
        ylm_eval((1, 0), -0.2, 0.0)


def test_ylm_against_scipy():
    rng = np.random.default_rng(22)
    theta = rng.uniform(0, np.pi, 12)
    phi = rng.uniform(0, 2 * np.pi, 12)
    for l in range(0, 9):
        for m in range(-l, l + 1):
            ours = ylm_eval((l, m), theta, phi)
            ref = sph_harm_y(l, m, theta, phi)
            assert np.max(np.abs(ours - ref)) < 5e-14


def test_orthonormality_pair():
    rule = quadrature_rule(12)
    w = rule.weights_flat()
    th = np.arccos(np.repeat(rule.x, rule.nazi))
    ph = np.tile(rule.azimuths(), rule.npolar)
    v53 = ylm_eval((5, 3), th, ph)
    v52 = ylm_eval((5, 2), th, ph)
    assert abs(np.sum(w * v53 * np.conj(v52))) <= 1e-12
    assert abs(np.sum(w * v53 * np.conj(v53)) - 1) <= 1e-12


@pytest.mark.parametrize("lmax", [6, 16])
def test_gram_identity(lmax):
    G = gram_matrix(lmax)
    assert np.max(np.abs(G - np.eye(G.shape[0]))) <= 1e-12


def test_ylm_rows_matches_matrix():
    rule = quadrature_rule(10)
    Y_full = ylm_matrix(4, rule)
    rows, index = ylm_rows([2, 4], rule)
    for l in (2, 4):
        for m in range(-l, l + 1):
            a = Y_full[basis_position(l, m)]
            b = rows[index[(l, m)]]
            assert np.max(np.abs(a - b)) < 1e-14


def test_harmonic_coefficients_zeta2():
    coeffs = harmonic_coefficients(ZETA2, 3)
    big = {(i.l, i.m): c for i, c in coeffs.items() if abs(c) > 1e-12}
    assert set(big) == {(2, 2)}
    # positive multiple of Y22 with this normalization
    assert big[(2, 2)].real > 0 and abs(big[(2, 2)].imag) < 1e-13


def test_harmonic_coefficients_constant():
    coeffs = harmonic_coefficients(AmbientPolynomial.constant(1.0), 2)
    assert abs(coeffs[HarmonicIndex(0, 0)] - math.sqrt(4 * math.pi)) < 1e-12
    others = [c for i, c in coeffs.items() if i.l > 0]
    assert max(abs(c) for c in others) < 1e-13


def test_harmonic_coefficients_quadratic_degrees():
    coeffs = harmonic_coefficients(QUAD, 4)
    for idx, c in coeffs.items():
        if idx.l not in (0, 2):
            assert abs(c) < 1e-12


def test_harmonic_reconstruction():
    rng = np.random.default_rng(23)
    coeffs = harmonic_coefficients(QUAD, 2)
    pts = rng.standard_normal((50, 3))
    pts /= np.linalg.norm(pts, axis=1)[:, None]
    theta = np.arccos(pts[:, 2])
    phi = np.arctan2(pts[:, 1], pts[:, 0])
    recon = sum(c * ylm_eval(i, theta, phi) for i, c in coeffs.items())
    direct = QUAD.evaluate(pts[:, 0], pts[:, 1], pts[:, 2])
    assert np.max(np.abs(recon - direct)) <= 1e-10


def test_harmonic_coefficients_refuses_aliasing():
    with pytest.raises(ValueError, match="aliasing"):
        harmonic_coefficients(ZETA2, 1)


def test_multiplication_identity():
    M = multiplication_matrix(AmbientPolynomial.constant(1.0), 4)
    assert np.max(np.abs(M.data - np.eye(25))) <= 1e-12


def test_multiplication_z_entry():
    # z = sqrt(4 pi / 3) Y10, so <z Y00, Y10> = 1/sqrt(3); quadrature agrees
    M = multiplication_matrix(Z, 1)
    entry = M.data[basis_position(1, 0), basis_position(0, 0)]
    assert abs(entry - 1 / math.sqrt(3)) <= 1e-12
    rule = quadrature_rule(4)
    pts = rule.cartesian()
    th = np.arccos(np.repeat(rule.x, rule.nazi))
    ph = np.tile(rule.azimuths(), rule.npolar)
    integrand = pts[:, 2] * ylm_eval((0, 0), th, ph) * np.conj(ylm_eval((1, 0), th, ph))
    assert abs(rule.integrate(integrand) - entry) <= 1e-12


def test_multiplication_selection_rules():
    M = multiplication_matrix(ZETA2, 5).data
    for (l1, m1) in [(i.l, i.m) for i in basis_indices(5)]:
        for (l2, m2) in [(i.l, i.m) for i in basis_indices(5)]:
            if m1 != m2 + 2 or abs(l1 - l2) > 2:
                assert M[basis_position(l1, m1), basis_position(l2, m2)] == 0


def test_multiplication_adjoint_and_hermitian():
    M = multiplication_matrix(QUAD, 5).data
    Mc = multiplication_matrix(QUAD.conjugate(), 5).data
    assert np.max(np.abs(Mc - M.conj().T)) <= 1e-12
    Mr = multiplication_matrix(X * X + 2 * Z, 5).data
    assert np.max(np.abs(Mr - Mr.conj().T)) <= 1e-12


def test_multiplication_band_check():
    rule = quadrature_rule(4)
    with pytest.raises(ValueError, match="band"):
        multiplication_matrix(ZETA2, 5, rule=rule)
    with pytest.raises(ValueError, match="band"):
        harmonic_coefficients(ZETA2, 4, rule=rule)


def test_multiplication_block_matches_full():
    M = multiplication_matrix(QUAD, 5).data
    for k in (2, 4):
        sl = slice(k * k, k * k + 2 * k + 1)
        B = multiplication_block(QUAD, k)
        assert np.max(np.abs(B - M[sl, sl])) <= 1e-12


def test_ylm_polynomial_matches_eval():
    rng = np.random.default_rng(24)
    theta = rng.uniform(0, np.pi, 25)
    phi = rng.uniform(0, 2 * np.pi, 25)
    xs = np.sin(theta) * np.cos(phi)
    ys = np.sin(theta) * np.sin(phi)
    zs = np.cos(theta)
    for l in range(0, 7):
        for m in range(-l, l + 1):
            p = ylm_polynomial(l, m)
            vals = p.evaluate(xs, ys, zs)
            ref = ylm_eval((l, m), theta, phi)
            assert np.max(np.abs(vals - ref)) < 1e-12


def test_sup_norm_estimates():
    one = AmbientPolynomial.constant(1.0)
    assert abs(sup_norm_estimate(one) - 1.01) <= 1e-12
    assert abs(sup_norm_estimate(Z) - 1.01) <= 2e-2
    assert abs(sup_norm_estimate(ZETA2) - 1.01) <= 2e-2
    assert sup_norm_estimate(AmbientPolynomial.zero()) == 0.0
    assert abs(sup_norm_estimate(QUAD) - 4.04) <= 5e-2


def test_fibonacci_lattice():
    pts = fibonacci_sphere(500)
    assert pts.shape == (500, 3)
    assert np.max(np.abs(np.linalg.norm(pts, axis=1) - 1)) < 1e-12
    # quasi-uniform: mean of each coordinate near zero
    assert np.max(np.abs(pts.mean(axis=0))) < 0.01


def test_operator_matrix_csv(tmp_path):
    M = multiplication_matrix(Z, 1)
    path = tmp_path / "m.csv"
    with open(path, "w") as fh:
        M.to_csv(fh)
    lines = path.read_text().splitlines()
    assert lines[0] == "row,col,re,im"
    assert len(lines) == 1 + 16
