import numpy as np
import pytest

from zollspec.polysphere import (R2, X, Y, Z, AmbientPolynomial, SpherePoint,
                                 poisson_bracket, poly_eval)

ZETA = AmbientPolynomial.zeta()


def random_int_poly(rng, max_degree, complex_coeffs=True):
    """Random polynomial with small integer coefficients (exact arithmetic)."""
    terms = {}
    for _ in range(rng.integers(1, 6)):
        e = tuple(int(v) for v in rng.integers(0, max_degree + 1, size=3))
        if sum(e) > max_degree:
            continue
        c = complex(int(rng.integers(-4, 5)),
                    int(rng.integers(-4, 5)) if complex_coeffs else 0)
        terms[e] = terms.get(e, 0) + c
    return AmbientPolynomial(terms)


def test_eval_examples():
    assert poly_eval(AmbientPolynomial.zeta(2), SpherePoint(1, 0, 0)) == 1
    assert poly_eval(Z, SpherePoint(0, 0, 1)) == 1
    p = (2 * X + 1j * Y) * (2 * X + 1j * Y)
    assert poly_eval(p, SpherePoint(0, 1, 0)) == -1


def test_algebra_examples():
    assert (X + (-1) * X).is_zero
    sq = ZETA * ZETA
    assert sq.terms == {(2, 0, 0): 1 + 0j, (1, 1, 0): 2j, (0, 2, 0): -1 + 0j}
    assert (2 * Z).terms == {(0, 0, 1): 2 + 0j}


def test_degree_and_zero():
    assert AmbientPolynomial.zero().degree is None
    assert AmbientPolynomial.constant(3).degree == 0
    assert (X * Y * Z).degree == 3


def test_bracket_generators():
    assert poisson_bracket(X, Y) == Z
    assert poisson_bracket(Y, Z) == X
    assert poisson_bracket(Z, X) == Y


def test_bracket_quadratic_example():
    # {a^2 x^2 - y^2, 2axy} = 4az(a^2x^2 + y^2) at a = 2
    p = AmbientPolynomial({(2, 0, 0): 4, (0, 2, 0): -1})
    q = AmbientPolynomial({(1, 1, 0): 4})
    expected = AmbientPolynomial({(2, 0, 1): 32, (0, 2, 1): 8})
    assert poisson_bracket(p, q) == expected
    quarter = 0.25 * poisson_bracket(p, q)
    assert quarter == AmbientPolynomial({(2, 0, 1): 8, (0, 2, 1): 2})


def test_casimir_kills_everything():
    rng = np.random.default_rng(11)
    for _ in range(20):
        p = random_int_poly(rng, 6)
        assert poisson_bracket(R2, p).is_zero


def test_antisymmetry_exact():
    rng = np.random.default_rng(12)
    for _ in range(30):
        p = random_int_poly(rng, 6)
        q = random_int_poly(rng, 6)
        assert (poisson_bracket(p, q) + poisson_bracket(q, p)).is_zero


def test_leibniz_exact():
    rng = np.random.default_rng(13)
    for _ in range(30):
        p = random_int_poly(rng, 4)
        q = random_int_poly(rng, 4)
        r = random_int_poly(rng, 4)
        lhs = poisson_bracket(p * q, r)
        rhs = p * poisson_bracket(q, r) + poisson_bracket(p, r) * q
        assert lhs == rhs


def test_jacobi_identity_exact():
    rng = np.random.default_rng(14)
    for _ in range(30):
        p = random_int_poly(rng, 3)
        q = random_int_poly(rng, 3)
        r = random_int_poly(rng, 3)
        total = (poisson_bracket(p, poisson_bracket(q, r))
                 + poisson_bracket(q, poisson_bracket(r, p))
                 + poisson_bracket(r, poisson_bracket(p, q)))
        assert total.is_zero


@pytest.mark.parametrize("l", [1, 2, 3])
def test_holomorphic_bracket_identity_sampled(l):
    # {Re f, Im f} = z (dx Re f)^2 + (dy Re f)^2 for f = c (x+iy)^(2l)
    f = 0.7 * AmbientPolynomial.zeta(2 * l)
    F, G = f.real, f.imag
    lhs = poisson_bracket(F, G)
    fx, fy = F.partial("x"), F.partial("y")
    rhs = Z * (fx * fx + fy * fy)
    D = lhs - rhs
    rng = np.random.default_rng(15)
    pts = rng.standard_normal((1000, 3))
    pts /= np.linalg.norm(pts, axis=1)[:, None]
    vals = D.evaluate(pts[:, 0], pts[:, 1], pts[:, 2])
    assert np.max(np.abs(vals)) <= 1e-10


def test_reduce_mod_sphere():
    # z^2 and 1 - x^2 - y^2 agree on the sphere
    z2 = Z * Z
    other = AmbientPolynomial.constant(1) - X * X - Y * Y
    assert (z2 - other).reduce_mod_sphere().is_zero
    assert (R2 - AmbientPolynomial.constant(1)).reduce_mod_sphere().is_zero
    # idempotent on reduced input
    p = X * Y + Z
    assert p.reduce_mod_sphere() == p


def test_clean_strips_dust():
    p = AmbientPolynomial({(1, 0, 0): 1.0 + 1e-17j, (0, 1, 0): 1e-17})
    q = p.clean()
    assert q == X
    assert AmbientPolynomial.zero().clean().is_zero


def test_azimuthal_shifts():
    assert AmbientPolynomial.zeta(2).azimuthal_shifts() == {2}
    assert Z.azimuthal_shifts() == {0}
    quad = AmbientPolynomial({(2, 0, 0): 4, (0, 2, 0): -1, (1, 1, 0): 4j})
    assert quad.azimuthal_shifts() == {-2, 0, 2}
    assert (X * X + Y * Y).azimuthal_shifts() == {0}


def test_partial_derivatives():
    p = X * X * Y + 3 * Z
    assert p.partial("x") == 2 * (X * Y)
    assert p.partial("y") == X * X
    assert p.partial("z") == AmbientPolynomial.constant(3)


def test_conjugate_and_parts():
    p = AmbientPolynomial({(1, 0, 0): 1 + 2j})
    assert p.conjugate().terms == {(1, 0, 0): 1 - 2j}
    assert p.real == X
    assert p.imag == 2 * X


def test_monomial_round_trip():
    p = AmbientPolynomial({(2, 0, 0): 4, (0, 2, 0): -1, (1, 1, 0): 4j})
    q = AmbientPolynomial.from_monomials(p.to_monomials())
    assert p == q


def test_from_monomials_rejects_unknown_key():
    with pytest.raises(ValueError, match="qx"):
        AmbientPolynomial.from_monomials([{"qx": 1}])
    with pytest.raises(ValueError, match="negative"):
        AmbientPolynomial.from_monomials([{"px": -1, "re": 1.0}])


def test_sphere_point_validation():
    SpherePoint(1.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        SpherePoint(1.0, 1.0, 0.0)
    p = SpherePoint.normalized(3.0, 4.0, 0.0)
    assert abs(p.x - 0.6) < 1e-15 and abs(p.y - 0.8) < 1e-15
    assert p.antipode().x == -p.x
    with pytest.raises(ValueError):
        SpherePoint.normalized(0.0, 0.0, 0.0)


def test_vectorized_evaluate():
    p = X * X + 1j * Z
    xs = np.array([1.0, 0.0])
    ys = np.array([0.0, 0.0])
    zs = np.array([0.0, 1.0])
    vals = p.evaluate(xs, ys, zs)
    assert np.allclose(vals, [1.0, 1.0j])
