"""Truncated Hamiltonians H_L = Laplacian + multiplication, and their clusters.

The Laplacian on degree-l harmonics is l(l+1) = (l + 1/2)^2 - 1/4, so the
natural cluster centers are Lambda_k = (k + 1/2)^2 and the constant
curvature term is q0 = -1/4.  Eigenvalues of the truncated operator are
assigned to the disk of radius 1/4 + sup|V| around the nearest Lambda_k;
assignments are only certified for k <= L - deg(V), because multiplication
by V couples degree l to degrees within deg(V).

Spectral projectors for a cluster are formed from the eigendecomposition;
a contour-quadrature mode (trapezoid rule on the mid-gap circle) is kept
for cross-validation.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from .sphharm import (OperatorMatrix, basis_size, block_slice, degree_array,
                      multiplication_block, multiplication_matrix,
                      sup_norm_estimate)


@dataclass(frozen=True)
class SphereConstants:
    period: float = 2.0 * np.pi
    morse_index: float = 2.0
    q0: float = -0.25

    def cluster_center(self, k):
        """Lambda_k = (k + 1/2)^2."""
        return (k + 0.5) ** 2

    def laplace_eigenvalue(self, l):
        return float(l * (l + 1))


SPHERE = SphereConstants()

UNASSIGNED = -1
AMBIGUOUS = -2


def hamiltonian(V, lmax, rule=None):
    """H_L: diagonal l(l+1) plus the multiplication matrix of V."""
    degv = V.degree or 0
    if lmax < degv:
        raise ValueError(f"lmax={lmax} below potential degree {degv}")
    if V.is_zero:
        M = np.zeros((basis_size(lmax),) * 2, dtype=np.complex128)
    else:
        M = multiplication_matrix(V, lmax, rule=rule).data.copy()
    ls = degree_array(lmax)
    M[np.diag_indices_from(M)] += ls * (ls + 1.0)
    return OperatorMatrix(M, lmax, provenance=f"hamiltonian[{V!r}] L={lmax}")


@dataclass
class SpectrumResult:
    """Eigenvalues of a truncated Hamiltonian with cluster assignments.

    cluster_of holds a cluster index per eigenvalue, UNASSIGNED for
    eigenvalues in no disk and AMBIGUOUS for eigenvalues in overlapping
    disks; trusted_band is the largest certified cluster index.
    """

    eigenvalues: np.ndarray
    vectors: np.ndarray | None = None
    residuals: np.ndarray | None = None
    cluster_of: np.ndarray | None = None
    trusted_band: int | None = None
    disk_radius: float | None = None

    def cluster_counts(self):
        """Multiplicity per assigned cluster index."""
        counts = {}
        if self.cluster_of is None:
            return counts
        for k in self.cluster_of:
            if k >= 0:
                counts[int(k)] = counts.get(int(k), 0) + 1
        return counts

    def eigenvalues_in_cluster(self, k):
        if self.cluster_of is None:
            raise ValueError("clusters not assigned yet")
        return self.eigenvalues[self.cluster_of == k]


def spectrum(H, want_vectors=False):
    """All eigenvalues of the dense matrix, sorted by (Re, Im).

    With want_vectors, right eigenvectors and the residuals
    ||H v - lambda v|| (unit v) are returned as well.
    """
    try:
        if want_vectors:
            evals, vecs = np.linalg.eig(H.data)
        else:
            evals = np.linalg.eigvals(H.data)
            vecs = None
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(
            f"eigensolver failed to converge on {H.provenance or 'matrix'}") from exc
    order = np.lexsort((evals.imag, evals.real))
    evals = evals[order]
    residuals = None
    if vecs is not None:
        vecs = vecs[:, order]
        residuals = np.linalg.norm(H.data @ vecs - vecs * evals[None, :], axis=0)
    return SpectrumResult(eigenvalues=evals, vectors=vecs, residuals=residuals)


def cluster_assign(result, V, lmax):
    """Assign each eigenvalue to a disk of radius 1/4 + sup|V| around Lambda_k."""
    radius = 0.25 + sup_norm_estimate(V)
    degv = V.degree or 0
    kmax = lmax + degv + 2
    centers = SPHERE.cluster_center(np.arange(kmax + 1))
    dist = np.abs(result.eigenvalues[:, None] - centers[None, :])
    inside = dist <= radius
    hits = inside.sum(axis=1)
    cluster = np.full(result.eigenvalues.shape[0], UNASSIGNED, dtype=np.int64)
    one = hits == 1
    cluster[one] = np.argmax(inside[one], axis=1)
    cluster[hits > 1] = AMBIGUOUS
    return replace(result, cluster_of=cluster, trusted_band=lmax - degv,
                   disk_radius=radius)


def compression(V, k, rule=None):
    """Degree-k block of multiplication by V, shifted by q0 = -1/4.

    This is the restriction to the k-th eigenspace of the time average of
    the conjugated perturbation, which on the round sphere is exactly the
    block-diagonal part (see block_average).
    """
    n = 2 * k + 1
    B = np.zeros((n, n), dtype=np.complex128) if V.is_zero \
        else multiplication_block(V, k, rule=rule)
    B[np.diag_indices_from(B)] += SPHERE.q0
    return B


def harmonic_projector(lmax, k):
    """Exact projector onto the degree-k harmonics in the truncated basis."""
    d = np.zeros(basis_size(lmax))
    d[block_slice(k)] = 1.0
    return OperatorMatrix(np.diag(d).astype(np.complex128), lmax,
                          provenance=f"harmonic projector k={k}")


def cluster_projectors(H, V, ks, result=None, cond_limit=1e8):
    """Spectral projectors of H onto the clusters in ks, as a dict.

    Built from the eigendecomposition: mathematically equal to the contour
    integral of the resolvent around the cluster.  Emits a warning naming
    the cluster when the eigenvector basis is so ill conditioned that the
    projector is unreliable.
    """
    if result is None or result.vectors is None:
        result = spectrum(H, want_vectors=True)
    if result.cluster_of is None:
        result = cluster_assign(result, V, H.lmax)
    X = result.vectors
    cond = np.linalg.cond(X)
    if cond > cond_limit:
        warnings.warn(
            f"defective cluster basis: eigenvector condition number {cond:.2e}",
            RuntimeWarning, stacklevel=2)
    Xinv = np.linalg.inv(X)
    out = {}
    for k in ks:
        idx = np.flatnonzero(result.cluster_of == k)
        if idx.size == 0:
            raise ValueError(f"no eigenvalues assigned to cluster {k}")
        P = X[:, idx] @ Xinv[idx, :]
        out[int(k)] = OperatorMatrix(P, H.lmax,
                                     provenance=f"cluster projector k={k}")
    return out


def cluster_projector(H, V, k, result=None):
    return cluster_projectors(H, V, [k], result=result)[int(k)]


def cluster_projector_contour(H, k, n_nodes=64):
    """Resolvent contour quadrature on the mid-gap circle around Lambda_k.

    Trapezoid rule with n_nodes on the circle of radius
    (Lambda_k - Lambda_(k-1))/2 = k; cross-validation for the
    eigendecomposition route.
    """
    if k < 1:
        raise ValueError("contour mode needs k >= 1 (mid-gap radius k)")
    center = SPHERE.cluster_center(k)
    radius = float(k)
    n = H.dim
    P = np.zeros((n, n), dtype=np.complex128)
    eye = np.eye(n, dtype=np.complex128)
    for j in range(n_nodes):
        w = np.exp(2j * np.pi * j / n_nodes)
        z = center + radius * w
        P += w * np.linalg.solve(z * eye - H.data, eye)
    P *= radius / n_nodes
    return OperatorMatrix(P, H.lmax, provenance=f"contour projector k={k}")


def block_diagonal_part(M, lmax):
    """Zero all entries of M coupling different harmonic degrees."""
    out = np.zeros_like(M)
    for k in range(lmax + 1):
        sl = block_slice(k)
        out[sl, sl] = M[sl, sl]
    return out


def block_average(M, lmax, n_nodes):
    """Discrete time average of e^(itA~) M e^(-itA~), trapezoid in t.

    A~ acts as k + 1/2 on degree-k harmonics.  With more than lmax nodes
    the phase averages vanish exactly off the block diagonal, so this is
    an independent oracle for block_diagonal_part.
    """
    if n_nodes <= lmax:
        raise ValueError(f"need more than lmax={lmax} nodes, got {n_nodes}")
    ls = degree_array(lmax) + 0.5
    out = np.zeros_like(M, dtype=np.complex128)
    for j in range(n_nodes):
        t = 2.0 * np.pi * j / n_nodes
        d = np.exp(1j * t * ls)
        out += (d[:, None] * M) * d.conj()[None, :]
    return out / n_nodes
