"""Complex polynomials in the ambient coordinates (x, y, z) of the sphere.

Potentials, averaged potentials and bracket fields are all carried around
as ``AmbientPolynomial`` values: a sparse map from exponent triples to
complex coefficients, with exact coefficient arithmetic.  The module also
provides the rotation-algebra Poisson bracket {x,y}=z, {y,z}=x, {z,x}=y,
extended to polynomials by bilinearity and Leibniz; concretely

    {f, g}(r) = r . (grad f x grad g),

which makes x^2+y^2+z^2 a Casimir, so the bracket of two restrictions to
the unit sphere does not depend on the chosen polynomial representatives.

Polynomials are not reduced modulo x^2+y^2+z^2-1 automatically;
``reduce_mod_sphere`` gives a canonical representative (z-exponent <= 1)
when an exact equality-of-functions test is wanted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_COEFF_EPS = 0.0  # stored coefficients are pruned only when exactly zero


def _pruned(terms):
    return {e: c for e, c in terms.items() if c != 0}


class AmbientPolynomial:
    """Sparse complex polynomial in (x, y, z)."""

    __slots__ = ("_terms",)

    def __init__(self, terms=None):
        self._terms = _pruned(dict(terms) if terms else {})

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def constant(cls, c):
        return cls({(0, 0, 0): complex(c)})

    @classmethod
    def variable(cls, name):
        try:
            e = {"x": (1, 0, 0), "y": (0, 1, 0), "z": (0, 0, 1)}[name]
        except KeyError:
            raise ValueError(f"unknown variable {name!r}") from None
        return cls({e: 1.0 + 0.0j})

    @classmethod
    def zeta(cls, power=1):
        """(x + iy)**power."""
        p = cls({(1, 0, 0): 1.0, (0, 1, 0): 1.0j})
        out = cls.constant(1.0)
        for _ in range(power):
            out = out * p
        return out

    @classmethod
    def from_monomials(cls, monomials):
        """Build from the config schema: [{"px","py","pz","re","im"}, ...]."""
        terms = {}
        for mono in monomials:
            unknown = set(mono) - {"px", "py", "pz", "re", "im"}
            if unknown:
                raise ValueError(f"unknown monomial key {sorted(unknown)[0]!r}")
            e = (int(mono.get("px", 0)), int(mono.get("py", 0)), int(mono.get("pz", 0)))
            if min(e) < 0:
                raise ValueError(f"negative exponent in monomial {mono!r}")
            c = complex(float(mono.get("re", 0.0)), float(mono.get("im", 0.0)))
            terms[e] = terms.get(e, 0.0) + c
        return cls(terms)

    # -- views ---------------------------------------------------------

    @property
    def terms(self):
        return dict(self._terms)

    @property
    def degree(self):
        """Total degree, or None for the zero polynomial."""
        if not self._terms:
            return None
        return max(i + j + k for (i, j, k) in self._terms)

    @property
    def is_zero(self):
        return not self._terms

    def coefficient_scale(self):
        """Largest |Re c| or |Im c| over stored coefficients (0 if zero)."""
        if not self._terms:
            return 0.0
        return max(max(abs(c.real), abs(c.imag)) for c in self._terms.values())

    # -- algebra --------------------------------------------------------

    def __add__(self, other):
        other = _as_poly(other)
        terms = dict(self._terms)
        for e, c in other._terms.items():
            terms[e] = terms.get(e, 0.0) + c
        return AmbientPolynomial(terms)

    __radd__ = __add__

    def __neg__(self):
        return AmbientPolynomial({e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            return AmbientPolynomial({e: c * other for e, c in self._terms.items()})
        other = _as_poly(other)
        terms = {}
        for (i1, j1, k1), c1 in self._terms.items():
            for (i2, j2, k2), c2 in other._terms.items():
                e = (i1 + i2, j1 + j2, k1 + k2)
                terms[e] = terms.get(e, 0.0) + c1 * c2
        return AmbientPolynomial(terms)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, AmbientPolynomial):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __repr__(self):
        if not self._terms:
            return "AmbientPolynomial(0)"
        bits = []
        for (i, j, k) in sorted(self._terms):
            c = self._terms[(i, j, k)]
            mono = "".join(f"{v}^{e}" if e > 1 else v
                           for v, e in zip("xyz", (i, j, k)) if e)
            bits.append(f"({c:g})" + ("*" + mono if mono else ""))
        return "AmbientPolynomial(" + " + ".join(bits) + ")"

    def conjugate(self):
        """Complex conjugate as a function of the (real) coordinates."""
        return AmbientPolynomial({e: c.conjugate() for e, c in self._terms.items()})

    @property
    def real(self):
        return AmbientPolynomial({e: complex(c.real) for e, c in self._terms.items()})

    @property
    def imag(self):
        return AmbientPolynomial({e: complex(c.imag) for e, c in self._terms.items()})

    def partial(self, axis):
        """Partial derivative; axis is 0, 1, 2 or 'x', 'y', 'z'."""
        if isinstance(axis, str):
            axis = "xyz".index(axis)
        terms = {}
        for e, c in self._terms.items():
            if e[axis] == 0:
                continue
            d = list(e)
            d[axis] -= 1
            terms[tuple(d)] = c * e[axis]
        return AmbientPolynomial(terms)

    # -- evaluation -----------------------------------------------------

    def evaluate(self, x, y, z):
        """Value at coordinates; accepts scalars or broadcasting arrays."""
        x = np.asarray(x)
        y = np.asarray(y)
        z = np.asarray(z)
        out = np.zeros(np.broadcast(x, y, z).shape, dtype=np.complex128)
        for (i, j, k), c in self._terms.items():
            out += c * (x ** i) * (y ** j) * (z ** k)
        if out.ndim == 0:
            return complex(out)
        return out

    def __call__(self, point):
        """Value at a SpherePoint (or any length-3 coordinate triple)."""
        if isinstance(point, SpherePoint):
            return self.evaluate(point.x, point.y, point.z)
        x, y, z = point
        return self.evaluate(x, y, z)

    # -- representatives on the sphere -----------------------------------

    def reduce_mod_sphere(self):
        """Canonical representative with z-exponent <= 1.

        Substitutes z^2 -> 1 - x^2 - y^2 until no exponent triple has
        k >= 2.  Two polynomials agree as functions on the unit sphere
        iff their reductions have identical term maps.
        """
        work = dict(self._terms)
        done = {}
        while work:
            (i, j, k), c = work.popitem()
            if c == 0:
                continue
            if k <= 1:
                done[(i, j, k)] = done.get((i, j, k), 0.0) + c
                continue
            for e2, c2 in (((i, j, k - 2), c),
                           ((i + 2, j, k - 2), -c),
                           ((i, j + 2, k - 2), -c)):
                work[e2] = work.get(e2, 0.0) + c2
        return AmbientPolynomial(done)

    def clean(self, rel_tol=5e-14):
        """Drop coefficient parts below rel_tol times the largest part.

        Used after quadrature-based synthesis, where exact zeros come back
        as ~1e-16 dust that would otherwise poison sign tests.
        """
        scale = self.coefficient_scale()
        if scale == 0.0:
            return AmbientPolynomial()
        cut = rel_tol * scale
        terms = {}
        for e, c in self._terms.items():
            re = c.real if abs(c.real) > cut else 0.0
            im = c.imag if abs(c.imag) > cut else 0.0
            if re != 0.0 or im != 0.0:
                terms[e] = complex(re, im)
        return AmbientPolynomial(terms)

    def azimuthal_shifts(self):
        """Possible m-jumps of multiplication by this polynomial.

        Rewrites the polynomial exactly in (zeta, conj zeta, z) and returns
        the set of exponent differences p - q with nonzero coefficient.
        The arithmetic involves only dyadic rationals, so cancellations
        (for example x^2 + 2ixy - y^2 -> zeta^2) are exact.
        """
        acc = {}
        for (i, j, k), c in self._terms.items():
            # x^i = 2^-i sum_a C(i,a) zeta^a zetabar^(i-a)
            # y^j = (-i/2)^j sum_b C(j,b) (-1)^(j-b) zeta^b zetabar^(j-b)
            base = c * (0.5 ** i) * ((-0.5j) ** j)
            for a in range(i + 1):
                ca = math.comb(i, a)
                for b in range(j + 1):
                    cb = math.comb(j, b) * ((-1) ** (j - b))
                    e = (a + b, (i - a) + (j - b), k)
                    acc[e] = acc.get(e, 0.0) + base * ca * cb
        return {p - q for (p, q, _s), c in acc.items() if c != 0}

    # -- serialization ----------------------------------------------------

    def to_monomials(self):
        """Inverse of from_monomials (deterministic exponent order)."""
        return [
            {"px": i, "py": j, "pz": k,
             "re": self._terms[(i, j, k)].real,
             "im": self._terms[(i, j, k)].imag}
            for (i, j, k) in sorted(self._terms)
        ]


def _as_poly(v):
    if isinstance(v, AmbientPolynomial):
        return v
    if isinstance(v, (int, float, complex)):
        return AmbientPolynomial.constant(v)
    raise TypeError(f"cannot interpret {type(v).__name__} as a polynomial")


X = AmbientPolynomial.variable("x")
Y = AmbientPolynomial.variable("y")
Z = AmbientPolynomial.variable("z")
ZETA = AmbientPolynomial.zeta()
R2 = X * X + Y * Y + Z * Z


def poisson_bracket(p, q):
    """Rotation-algebra bracket {p, q} = r . (grad p x grad q).

    Exactly antisymmetric and Leibniz; {x,y} = z and cyclic; the radius
    squared is a Casimir, term by term.
    """
    px, py, pz = p.partial(0), p.partial(1), p.partial(2)
    qx, qy, qz = q.partial(0), q.partial(1), q.partial(2)
    return (X * (py * qz - pz * qy)
            + Y * (pz * qx - px * qz)
            + Z * (px * qy - py * qx))


@dataclass(frozen=True)
class SpherePoint:
    """Unit vector, checked to 1e-12 in |x^2+y^2+z^2 - 1|."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        r2 = self.x * self.x + self.y * self.y + self.z * self.z
        if abs(r2 - 1.0) > 1e-12:
            raise ValueError(f"not a unit vector: |r^2 - 1| = {abs(r2 - 1.0):.3e}")

    @classmethod
    def normalized(cls, x, y, z):
        r = math.sqrt(x * x + y * y + z * z)
        if r == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return cls(x / r, y / r, z / r)

    @classmethod
    def from_array(cls, v):
        return cls(float(v[0]), float(v[1]), float(v[2]))

    def as_array(self):
        return np.array([self.x, self.y, self.z])

    def antipode(self):
        return SpherePoint(-self.x, -self.y, -self.z)


def poly_eval(p, pt):
    """Value of p at a SpherePoint (exact monomial summation)."""
    return p(pt)
