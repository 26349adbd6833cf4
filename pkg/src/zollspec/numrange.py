"""Numerical ranges of cluster compressions and their large-k limit.

The range of the shifted operator on the degree-k eigenspace equals the
field of values of compression(V, k), since the Laplacian acts there as
the scalar Lambda_k - 1/4.  Boundaries are computed by the supporting
hyperplane method: for each direction, the top eigenpair of the Hermitian
part of the rotated matrix yields one boundary point (the range is convex
by the Toeplitz-Hausdorff theorem, so this traces all of it).

The limit object is the convex hull of the averaged potential plus q0
over all oriented great circles, sampled on a deterministic lattice.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .operator import SPHERE, compression
from .radon import radon_poly
from .sphharm import fibonacci_sphere

_DEGENERATE_REL = 1e-9


def _monotone_chain(points):
    """Convex hull (counterclockwise, no repeated endpoint) of 2d points."""
    pts = sorted(set((float(p[0]), float(p[1])) for p in points))
    if len(pts) <= 2:
        return pts

    def half(seq):
        out = []
        for p in seq:
            while len(out) > 1 and (
                    (out[-1][0] - out[-2][0]) * (p[1] - out[-2][1])
                    - (p[0] - out[-2][0]) * (out[-1][1] - out[-2][1])) <= 0.0:
                out.pop()
            out.append(p)
        return out

    lower = half(pts)
    upper = half(reversed(pts))
    return lower[:-1] + upper[:-1]


@dataclass
class ConvexRegion:
    """Convex subset of the plane: a point, a segment or a CCW polygon."""

    vertices: np.ndarray  # complex, closed implicitly (last connects to first)
    kind: str             # "point" | "segment" | "polygon"

    @classmethod
    def from_points(cls, values):
        """Convex hull of a cloud of complex values, degeneracy-flagged."""
        values = np.asarray(values, dtype=np.complex128).ravel()
        if values.size == 0:
            raise ValueError("cannot build a region from no points")
        xy = np.column_stack([values.real, values.imag])
        center = xy.mean(axis=0)
        spread = np.linalg.svd(xy - center, compute_uv=False) \
            if xy.shape[0] > 1 else np.zeros(2)
        scale = max(np.max(np.abs(xy - center)), 1e-300)
        if xy.shape[0] == 1 or spread[0] <= _DEGENERATE_REL * max(scale, 1.0):
            return cls(np.array([values.mean()]), "point")
        if spread[1] <= _DEGENERATE_REL * spread[0]:
            d = xy - center
            axis = d[np.argmax(np.abs(d).sum(axis=1))]
            t = d @ (axis / np.linalg.norm(axis))
            lo, hi = values[np.argmin(t)], values[np.argmax(t)]
            return cls(np.array([lo, hi]), "segment")
        hull = _monotone_chain(xy)
        return cls(np.array([complex(x, y) for x, y in hull]), "polygon")

    def diameter(self):
        v = self.vertices
        if v.size == 1:
            return 0.0
        return float(np.max(np.abs(v[:, None] - v[None, :])))

    def boundary_points(self, n=2048):
        """Points sampled along the boundary (vertices always included)."""
        v = self.vertices
        if v.size == 1:
            return v.copy()
        loop = np.append(v, v[0]) if self.kind == "polygon" else v
        seg = np.abs(np.diff(loop))
        per = float(seg.sum())
        out = [loop[:-1] if self.kind == "polygon" else loop]
        for a, b, ln in zip(loop[:-1], loop[1:], seg):
            extra = int(np.ceil(ln / per * n)) if per > 0 else 0
            if extra > 1:
                t = np.arange(1, extra) / extra
                out.append(a + t * (b - a))
        return np.concatenate(out)

    def contains(self, z, tol=0.0):
        """Membership test with additive slack tol."""
        v = self.vertices
        if self.kind == "point":
            return bool(abs(z - v[0]) <= tol)
        if self.kind == "segment":
            a, b = v[0], v[1]
            ab = b - a
            t = np.clip(((z - a) * ab.conjugate()).real / abs(ab) ** 2, 0.0, 1.0)
            return bool(abs(z - (a + t * ab)) <= tol)
        loop = np.append(v, v[0])
        for a, b in zip(loop[:-1], loop[1:]):
            cross = ((b - a).conjugate() * (z - a)).imag
            if cross < -tol * max(abs(b - a), 1e-300):
                return False
        return True

    def to_csv(self, fh):
        fh.write("re,im\n")
        for z in self.vertices:
            fh.write(f"{z.real:.17g},{z.imag:.17g}\n")


def field_of_values(B, n_angles=360):
    """Field of values of a dense matrix by supporting hyperplanes.

    One boundary point per direction: the top eigenvector of the Hermitian
    part of e^(i theta) B, evaluated as a Rayleigh quotient of B.  All
    eigenvalues of B lie inside the result.
    """
    if n_angles < 8:
        raise ValueError("need at least 8 supporting angles")
    B = np.asarray(B, dtype=np.complex128)
    pts = np.empty(n_angles, dtype=np.complex128)
    for j in range(n_angles):
        rot = np.exp(1j * (2.0 * np.pi * j / n_angles))
        K = 0.5 * (rot * B + (rot * B).conj().T)
        _, vecs = np.linalg.eigh(K)
        v = vecs[:, -1]
        pts[j] = v.conj() @ (B @ v)
    return ConvexRegion.from_points(pts)


def numerical_range_k(V, k, n_angles=360):
    """Shifted numerical range of the cluster-k compression."""
    return field_of_values(compression(V, k), n_angles=n_angles)


def limit_range(V, n_samples=400):
    """Convex hull of (averaged potential + q0) over the geodesic sphere."""
    if n_samples < 100:
        raise ValueError("need at least 100 lattice samples")
    vt = radon_poly(V)
    pts = fibonacci_sphere(n_samples)
    vals = vt.evaluate(pts[:, 0], pts[:, 1], pts[:, 2]) + SPHERE.q0
    return ConvexRegion.from_points(vals)


def hausdorff(region_a, region_b, n=2048):
    """Symmetric Hausdorff distance between boundary samplings."""
    pa = region_a.boundary_points(n)
    pb = region_b.boundary_points(n)
    xa = np.column_stack([pa.real, pa.imag])
    xb = np.column_stack([pb.real, pb.imag])
    d = cdist(xa, xb)
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))
