"""Numpy implementations of the hot kernels.

Same contracts (and the same deterministic start vectors) as the compiled
core in ``_core.pyx``; selected automatically when the extension is not
built.  Kept dependency-light: numpy plus two scipy.linalg helpers.
"""

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal, solve_triangular

_LCG_MUL = 6364136223846793005
_LCG_INC = 1442695040888963407
_LCG_SEED = 0x243F6A8885A308D3
_MASK64 = (1 << 64) - 1


def lcg_vector(n):
    """Deterministic complex start vector (fixed LCG, unit norm)."""
    state = _LCG_SEED
    out = np.empty(n, dtype=np.complex128)
    for i in range(n):
        state = (state * _LCG_MUL + _LCG_INC) & _MASK64
        re = (state >> 11) * 2.0 ** -53 - 0.5
        state = (state * _LCG_MUL + _LCG_INC) & _MASK64
        im = (state >> 11) * 2.0 ** -53 - 0.5
        out[i] = re + 1j * im
    return out / np.linalg.norm(out)


def legendre_table(lmax, x):
    """Normalized associated Legendre values P_l^m(x) for all 0<=m<=l<=lmax.

    Returns an array of shape (len(x), (lmax+1)(lmax+2)/2) with row layout
    pair(l, m) = l(l+1)/2 + m.  Normalization is the full spherical-harmonic
    one (Condon-Shortley sign included), so Y_lm = table * exp(i m phi) for
    m >= 0.
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    npts = x.shape[0]
    npairs = (lmax + 1) * (lmax + 2) // 2
    table = np.empty((npts, npairs), dtype=np.float64)
    t = np.sqrt((1.0 - x) * (1.0 + x))
    pmm = np.full(npts, 1.0 / np.sqrt(4.0 * np.pi))
    for m in range(lmax + 1):
        if m > 0:
            pmm = (-np.sqrt((2.0 * m + 1.0) / (2.0 * m))) * t * pmm
        table[:, m * (m + 1) // 2 + m] = pmm
        if m < lmax:
            p_prev2 = pmm
            p_prev = np.sqrt(2.0 * m + 3.0) * x * pmm
            table[:, (m + 1) * (m + 2) // 2 + m] = p_prev
            for l in range(m + 2, lmax + 1):
                a = np.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
                b = np.sqrt(((l - 1.0) ** 2 - m * m) / (4.0 * (l - 1.0) ** 2 - 1.0))
                p = a * (x * p_prev - b * p_prev2)
                table[:, l * (l + 1) // 2 + m] = p
                p_prev2 = p_prev
                p_prev = p
    return table


def _lanczos_sigma_min(T, lam, tol, maxit):
    n = T.shape[0]
    diag = np.diagonal(T) - lam
    if np.min(np.abs(diag)) == 0.0:
        return 0.0
    A = T - lam * np.eye(n, dtype=np.complex128)
    q = lcg_vector(n)
    qold = np.zeros(n, dtype=np.complex128)
    beta = 0.0
    sig = 0.0
    sigold = 0.0
    alphas = []
    betas = []
    for it in range(maxit):
        u = solve_triangular(A, q, lower=False, trans="C")
        w = solve_triangular(A, u, lower=False)
        if not np.all(np.isfinite(w)):
            return 0.0
        w -= beta * qold
        alpha = float(np.real(np.vdot(q, w)))
        w -= alpha * q
        alphas.append(alpha)
        if len(alphas) == 1:
            sig = alpha
        else:
            sig = float(
                eigvalsh_tridiagonal(
                    np.asarray(alphas),
                    np.asarray(betas),
                    select="i",
                    select_range=(len(alphas) - 1, len(alphas) - 1),
                )[0]
            )
        if not np.isfinite(sig):
            return 0.0
        if it > 0 and abs(sig - sigold) <= tol * sig:
            break
        beta = float(np.linalg.norm(w))
        if beta == 0.0:
            break
        betas.append(beta)
        qold = q
        q = w / beta
        sigold = sig
    if sig <= 0.0:
        return float(np.min(np.abs(diag)))
    return 1.0 / np.sqrt(sig)


def triangular_sigma_min(T, shifts, tol=1e-10, maxit=99):
    """Smallest singular value of T - shift*I for each shift.

    T must be upper triangular (e.g. a complex Schur factor); the singular
    values then agree with those of the original matrix.  Uses inverse
    Lanczos iteration with two triangular solves per step.
    """
    T = np.ascontiguousarray(T, dtype=np.complex128)
    shifts = np.ascontiguousarray(shifts, dtype=np.complex128)
    out = np.empty(shifts.shape[0], dtype=np.float64)
    for i, lam in enumerate(shifts):
        out[i] = _lanczos_sigma_min(T, lam, tol, maxit)
    return out
