"""Orthonormal spherical harmonics, band-exact quadrature and operator matrices.

Conventions (fixed throughout the package):

* fully normalized complex harmonics with the Condon-Shortley phase,
  so <Y_lm, Y_l'm'> = delta under <f, g> = integral of f * conj(g) with
  the plain (unnormalized, total mass 4 pi) surface measure;
* bases are truncated at degree L and ordered by (l, m), so index
  (l, m) sits at position l^2 + l + m and dim = (L+1)^2;
* product quadrature: Gauss-Legendre in cos(theta) times a uniform
  azimuthal grid, exact for spherical polynomials up to the stated band.

Matrices of multiplication operators are assembled by quadrature at band
2L + deg(V); entries that vanish by the degree or azimuthal selection
rules are zeroed structurally, so that e.g. potentials holomorphic in
x + iy give exactly triangular matrices in any m-sorted ordering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import _kernels
from .polysphere import AmbientPolynomial

# -- basis bookkeeping ----------------------------------------------------


@dataclass(frozen=True)
class HarmonicIndex:
    l: int
    m: int

    def __post_init__(self):
        if self.l < 0 or abs(self.m) > self.l:
            raise ValueError(f"invalid harmonic index (l={self.l}, m={self.m})")


def basis_size(lmax):
    return (lmax + 1) ** 2


def basis_indices(lmax):
    """All HarmonicIndex with l <= lmax, sorted by (l, m)."""
    return [HarmonicIndex(l, m) for l in range(lmax + 1) for m in range(-l, l + 1)]


def basis_position(l, m):
    """Position of (l, m) in the (l, m)-sorted basis."""
    return l * l + l + m


def block_slice(k):
    """Index range of the degree-k eigenspace in the sorted basis."""
    return slice(k * k, k * k + 2 * k + 1)


def degree_array(lmax):
    return np.repeat(np.arange(lmax + 1), 2 * np.arange(lmax + 1) + 1)


def order_array(lmax):
    return np.concatenate([np.arange(-l, l + 1) for l in range(lmax + 1)])


# -- quadrature ------------------------------------------------------------


@dataclass(frozen=True)
class QuadratureRule:
    """Product rule on S^2, exact through total harmonic degree `band`."""

    band: int
    x: np.ndarray = field(repr=False)      # Gauss-Legendre nodes in cos(theta)
    w: np.ndarray = field(repr=False)      # matching weights (sum = 2)
    nazi: int

    @property
    def npolar(self):
        return self.x.shape[0]

    @property
    def npoints(self):
        return self.npolar * self.nazi

    def azimuths(self):
        return 2.0 * np.pi * np.arange(self.nazi) / self.nazi

    def weights_flat(self):
        """Weights for the flat (polar-major) point ordering; sum = 4 pi."""
        return np.repeat(self.w * (2.0 * np.pi / self.nazi), self.nazi)

    def cartesian(self):
        """Node coordinates, shape (npoints, 3), polar-major ordering."""
        phi = self.azimuths()
        sin_t = np.sqrt(1.0 - self.x ** 2)
        xs = np.outer(sin_t, np.cos(phi)).ravel()
        ys = np.outer(sin_t, np.sin(phi)).ravel()
        zs = np.repeat(self.x, self.nazi)
        return np.column_stack([xs, ys, zs])

    def integrate(self, values):
        """Integral against the surface measure of point values (flat order)."""
        return complex(np.dot(self.weights_flat(), np.asarray(values)))


@lru_cache(maxsize=64)
def quadrature_rule(band):
    """Smallest product rule exact for harmonic degree <= band."""
    if band < 0:
        raise ValueError("band must be nonnegative")
    npolar = max((band + 2) // 2, 1)
    x, w = np.polynomial.legendre.leggauss(npolar)
    return QuadratureRule(band=band, x=x, w=w, nazi=band + 1)


# -- pointwise harmonics ----------------------------------------------------


def _legendre_single(l, m, x):
    """Normalized P_l^m along one (l, m), vectorized over x."""
    x = np.asarray(x, dtype=np.float64)
    t = np.sqrt((1.0 - x) * (1.0 + x))
    pmm = np.full(x.shape, 1.0 / math.sqrt(4.0 * math.pi))
    for mm in range(1, m + 1):
        pmm = -math.sqrt((2.0 * mm + 1.0) / (2.0 * mm)) * t * pmm
    if l == m:
        return pmm
    p_prev2 = pmm
    p_prev = math.sqrt(2.0 * m + 3.0) * x * pmm
    for ll in range(m + 2, l + 1):
        a = math.sqrt((4.0 * ll * ll - 1.0) / (ll * ll - m * m))
        b = math.sqrt(((ll - 1.0) ** 2 - m * m) / (4.0 * (ll - 1.0) ** 2 - 1.0))
        p = a * (x * p_prev - b * p_prev2)
        p_prev2, p_prev = p_prev, p
    return p_prev


def ylm_eval(idx, theta, phi):
    """Y_lm at colatitude theta in [0, pi] and azimuth phi (broadcasting)."""
    if not isinstance(idx, HarmonicIndex):
        idx = HarmonicIndex(*idx)
    theta = np.asarray(theta, dtype=np.float64)
    if np.any(theta < -1e-12) or np.any(theta > np.pi + 1e-12):
        raise ValueError("theta must lie in [0, pi]")
    phi = np.asarray(phi, dtype=np.float64)
    pm = _legendre_single(idx.l, abs(idx.m), np.cos(theta))
    sign = 1.0 if idx.m >= 0 else (-1.0) ** idx.m
    out = sign * pm * np.exp(1j * idx.m * phi)
    if out.ndim == 0:
        return complex(out)
    return out


def ylm_rows(degrees, rule):
    """Y_lm values for selected degrees only.

    Returns (rows, index) with rows of shape (sum of 2l+1, npoints) and
    index mapping (l, m) to its row.  Cheaper than a full ylm_matrix when
    just a few degree blocks are needed.
    """
    degrees = sorted(set(int(l) for l in degrees))
    lmax = degrees[-1]
    tab = _kernels.legendre_table(lmax, rule.x)
    phi = rule.azimuths()
    phases = np.exp(1j * np.outer(np.arange(-lmax, lmax + 1), phi))
    nrows = sum(2 * l + 1 for l in degrees)
    rows = np.empty((nrows, rule.npoints), dtype=np.complex128)
    index = {}
    r = 0
    for l in degrees:
        for m in range(-l, l + 1):
            pm = tab[:, l * (l + 1) // 2 + abs(m)]
            sign = 1.0 if m >= 0 else (-1.0) ** m
            rows[r] = (sign * np.outer(pm, phases[m + lmax])).ravel()
            index[(l, m)] = r
            r += 1
    return rows, index


def ylm_matrix(lmax, rule, polar_slice=None):
    """Matrix of Y_lm values, shape ((lmax+1)^2, npoints), flat point order.

    `polar_slice` restricts to a contiguous range of polar nodes, which
    lets callers assemble large Gram/multiplication matrices in blocks.
    """
    x = rule.x if polar_slice is None else rule.x[polar_slice]
    tab = _kernels.legendre_table(lmax, x)          # (npolar, npairs)
    phi = rule.azimuths()
    npolar, nazi = x.shape[0], rule.nazi
    out = np.empty((basis_size(lmax), npolar * nazi), dtype=np.complex128)
    phases = np.exp(1j * np.outer(np.arange(-lmax, lmax + 1), phi))
    for l in range(lmax + 1):
        for m in range(-l, l + 1):
            pm = tab[:, l * (l + 1) // 2 + abs(m)]
            sign = 1.0 if m >= 0 else (-1.0) ** m
            out[basis_position(l, m)] = (
                sign * np.outer(pm, phases[m + lmax])).ravel()
    return out


# -- harmonic analysis of polynomials ---------------------------------------


def harmonic_coefficients(p, lmax, rule=None):
    """Coefficients <p, Y_lm> for l <= lmax of an ambient polynomial.

    Refuses truncations below the polynomial degree: those would alias
    high components instead of representing the function.
    """
    deg = p.degree or 0
    if lmax < deg:
        raise ValueError(f"lmax={lmax} below polynomial degree {deg} (aliasing)")
    band = lmax + deg
    if rule is None:
        rule = quadrature_rule(band)
    elif rule.band < band:
        raise ValueError(f"quadrature band {rule.band} < required {band}")
    pts = rule.cartesian()
    vals = p.evaluate(pts[:, 0], pts[:, 1], pts[:, 2])
    wv = rule.weights_flat() * vals
    Y = ylm_matrix(lmax, rule)
    coeffs = Y.conj() @ wv
    return {idx: complex(coeffs[basis_position(idx.l, idx.m)])
            for idx in basis_indices(lmax)}


def synthesize(coeffs, theta, phi):
    """Pointwise sum of coeff * Y_lm over a coefficient map."""
    out = None
    for idx, c in coeffs.items():
        term = c * ylm_eval(idx, theta, phi)
        out = term if out is None else out + term
    return out


@lru_cache(maxsize=256)
def _legendre_poly_fractions(l):
    """Coefficients of the Legendre polynomial P_l, exact rationals."""
    if l == 0:
        return (Fraction(1),)
    p_prev = [Fraction(1)]
    p = [Fraction(0), Fraction(1)]
    for n in range(1, l):
        nxt = [Fraction(0)] * (n + 2)
        for i, c in enumerate(p):
            nxt[i + 1] += Fraction(2 * n + 1, n + 1) * c
        for i, c in enumerate(p_prev):
            nxt[i] -= Fraction(n, n + 1) * c
        p_prev, p = p, nxt
    return tuple(p)


def ylm_polynomial(l, m):
    """Y_lm as an ambient polynomial (equal to Y_lm on the unit sphere)."""
    HarmonicIndex(l, m)
    ma = abs(m)
    coeffs = list(_legendre_poly_fractions(l))
    for _ in range(ma):  # m-th derivative
        coeffs = [coeffs[i] * i for i in range(1, len(coeffs))]
    norm = math.sqrt((2 * l + 1) / (4.0 * math.pi)
                     * math.factorial(l - ma) / math.factorial(l + ma))
    sign = (-1.0) ** ma if m >= 0 else 1.0
    zpoly = AmbientPolynomial(
        {(0, 0, i): complex(sign * norm * float(c))
         for i, c in enumerate(coeffs) if c != 0})
    if ma == 0:
        return zpoly
    azim = AmbientPolynomial.zeta(ma) if m > 0 else AmbientPolynomial.zeta(ma).conjugate()
    return azim * zpoly


# -- operator matrices -------------------------------------------------------


@dataclass
class OperatorMatrix:
    """Dense matrix of an operator in the (l, m)-sorted truncated basis."""

    data: np.ndarray
    lmax: int
    provenance: str = ""

    def __post_init__(self):
        n = basis_size(self.lmax)
        if self.data.shape != (n, n):
            raise ValueError(
                f"matrix shape {self.data.shape} does not match lmax={self.lmax}")

    @property
    def dim(self):
        return self.data.shape[0]

    def norm(self):
        """Spectral norm (largest singular value)."""
        return float(np.linalg.norm(self.data, 2))

    def to_csv(self, fh):
        fh.write("row,col,re,im\n")
        for i in range(self.dim):
            for j in range(self.dim):
                v = self.data[i, j]
                fh.write(f"{i},{j},{v.real:.17g},{v.imag:.17g}\n")


def _selection_mask(V, lmax):
    degv = V.degree or 0
    shifts = sorted(V.azimuthal_shifts())
    ls = degree_array(lmax)
    ms = order_array(lmax)
    ok_l = np.abs(ls[:, None] - ls[None, :]) <= degv
    ok_m = np.isin(ms[:, None] - ms[None, :], shifts)
    return ok_l & ok_m


def multiplication_matrix(V, lmax, rule=None, chunk_points=200_000):
    """Matrix of multiplication by V on the basis truncated at lmax.

    Entries are <V Y_(l'm'), Y_(lm)>, assembled by quadrature of band
    2 lmax + deg(V); a coarser rule is a hard error.  Structural zeros
    from the degree and azimuthal selection rules are enforced exactly.
    """
    degv = V.degree or 0
    band = 2 * lmax + degv
    if rule is None:
        rule = quadrature_rule(band)
    elif rule.band < band:
        raise ValueError(f"quadrature band {rule.band} < required {band}")
    n = basis_size(lmax)
    M = np.zeros((n, n), dtype=np.complex128)
    rows_per_chunk = max(1, chunk_points // rule.nazi)
    phi = rule.azimuths()
    cos_p, sin_p = np.cos(phi), np.sin(phi)
    for start in range(0, rule.npolar, rows_per_chunk):
        sl = slice(start, min(start + rows_per_chunk, rule.npolar))
        Y = ylm_matrix(lmax, rule, polar_slice=sl)
        xc = rule.x[sl]
        sin_t = np.sqrt(1.0 - xc ** 2)
        xs = np.outer(sin_t, cos_p).ravel()
        ys = np.outer(sin_t, sin_p).ravel()
        zs = np.repeat(xc, rule.nazi)
        vals = V.evaluate(xs, ys, zs)
        wv = np.repeat(rule.w[sl] * (2.0 * np.pi / rule.nazi), rule.nazi) * vals
        M += (Y.conj() * wv) @ Y.T
    M[~_selection_mask(V, lmax)] = 0.0
    return OperatorMatrix(M, lmax, provenance=f"mult[{V!r}] L={lmax}")


def multiplication_block(V, k, rule=None):
    """The degree-k diagonal block of multiplication by V, (2k+1) square."""
    degv = V.degree or 0
    band = 2 * k + degv
    if rule is None:
        rule = quadrature_rule(band)
    elif rule.band < band:
        raise ValueError(f"quadrature band {rule.band} < required {band}")
    pts = rule.cartesian()
    vals = V.evaluate(pts[:, 0], pts[:, 1], pts[:, 2])
    wv = rule.weights_flat() * vals
    Y = ylm_matrix(k, rule)[block_slice(k), :]
    B = (Y.conj() * wv) @ Y.T
    shifts = sorted(V.azimuthal_shifts())
    ms = np.arange(-k, k + 1)
    B[~np.isin(ms[:, None] - ms[None, :], shifts)] = 0.0
    return B


def gram_matrix(lmax, rule=None):
    """Quadrature Gram matrix of the truncated basis (identity if exact)."""
    return multiplication_matrix(AmbientPolynomial.constant(1.0), lmax, rule=rule).data


# -- miscellaneous sphere sampling -------------------------------------------


def fibonacci_sphere(n):
    """Deterministic quasi-uniform lattice of n points on S^2."""
    i = np.arange(n)
    z = 1.0 - (2.0 * i + 1.0) / n
    golden = np.pi * (3.0 - np.sqrt(5.0))
    phi = golden * i
    r = np.sqrt(1.0 - z ** 2)
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def sup_norm_estimate(V, n_samples=8192):
    """Upper-bound surrogate for sup |V| on the sphere.

    Max over a dense deterministic lattice, inflated by 1.01.  Used as
    the multiplication-operator norm when sizing cluster disks.
    """
    if V.is_zero:
        return 0.0
    pts = fibonacci_sphere(n_samples)
    vals = V.evaluate(pts[:, 0], pts[:, 1], pts[:, 2])
    return 1.01 * float(np.max(np.abs(vals)))
