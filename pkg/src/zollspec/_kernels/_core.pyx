# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Compiled kernels: normalized Legendre tables and triangular sigma_min.

Mirrors ``_fallback.py`` exactly (same recurrences, same Lanczos schedule,
same deterministic start vector) so the two backends are interchangeable.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, isfinite, sqrt

cnp.import_array()

cdef unsigned long long LCG_MUL = 6364136223846793005ULL
cdef unsigned long long LCG_INC = 1442695040888963407ULL
cdef unsigned long long LCG_SEED = 0x243F6A8885A308D3ULL
cdef double TWO_M53 = 2.0 ** -53


def lcg_vector(n):
    """Deterministic complex start vector (fixed LCG, unit norm)."""
    cdef Py_ssize_t i, nn = n
    out = np.empty(nn, dtype=np.complex128)
    cdef double complex[::1] ov = out
    cdef unsigned long long state = LCG_SEED
    cdef double re, im
    for i in range(nn):
        state = state * LCG_MUL + LCG_INC
        re = <double>(state >> 11) * TWO_M53 - 0.5
        state = state * LCG_MUL + LCG_INC
        im = <double>(state >> 11) * TWO_M53 - 0.5
        ov[i] = re + 1j * im
    return out / np.linalg.norm(out)


def legendre_table(lmax, x):
    """Normalized associated Legendre values P_l^m(x) for all 0<=m<=l<=lmax.

    Returns shape (len(x), (lmax+1)(lmax+2)/2), pair layout l(l+1)/2 + m,
    spherical-harmonic normalization with the Condon-Shortley sign.
    """
    cdef int L = lmax
    xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[::1] xs = xv
    cdef Py_ssize_t npts = xs.shape[0]
    cdef Py_ssize_t npairs = (L + 1) * (L + 2) // 2
    out = np.empty((npts, npairs), dtype=np.float64)
    cdef double[:, ::1] tab = out

    cdiag_a = np.zeros(L + 1)
    cnext_a = np.zeros(L + 1)
    a_a = np.zeros((L + 1, L + 1))
    b_a = np.zeros((L + 1, L + 1))
    cdef Py_ssize_t l, m
    for m in range(1, L + 1):
        cdiag_a[m] = -sqrt((2.0 * m + 1.0) / (2.0 * m))
    for m in range(0, L + 1):
        cnext_a[m] = sqrt(2.0 * m + 3.0)
        for l in range(m + 2, L + 1):
            a_a[l, m] = sqrt((4.0 * l * l - 1.0) / (<double>l * l - <double>m * m))
            b_a[l, m] = sqrt(((l - 1.0) ** 2 - <double>m * m)
                             / (4.0 * (l - 1.0) ** 2 - 1.0))
    cdef double[::1] cdiag = cdiag_a
    cdef double[::1] cnext = cnext_a
    cdef double[:, ::1] av = a_a
    cdef double[:, ::1] bv = b_a

    cdef double inv_sqrt4pi = 1.0 / sqrt(4.0 * np.pi)
    cdef Py_ssize_t j
    cdef double xj, t, pmm, p_prev, p_prev2, p
    with nogil:
        for j in range(npts):
            xj = xs[j]
            t = sqrt((1.0 - xj) * (1.0 + xj))
            pmm = inv_sqrt4pi
            for m in range(L + 1):
                if m > 0:
                    pmm = cdiag[m] * t * pmm
                tab[j, m * (m + 1) // 2 + m] = pmm
                if m < L:
                    p_prev2 = pmm
                    p_prev = cnext[m] * xj * pmm
                    tab[j, (m + 1) * (m + 2) // 2 + m] = p_prev
                    for l in range(m + 2, L + 1):
                        p = av[l, m] * (xj * p_prev - bv[l, m] * p_prev2)
                        tab[j, l * (l + 1) // 2 + m] = p
                        p_prev2 = p_prev
                        p_prev = p
    return out


cdef int _sturm_count(double* d, double* e, int m, double x) nogil:
    cdef int i, cnt = 0
    cdef double q = d[0] - x
    if q < 0.0:
        cnt += 1
    for i in range(1, m):
        if q == 0.0:
            q = 1e-300
        q = d[i] - x - e[i - 1] * e[i - 1] / q
        if q < 0.0:
            cnt += 1
    return cnt


cdef double _tridiag_max_eig(double* d, double* e, int m) nogil:
    cdef int i, it
    cdef double r, lo, hi, mid
    lo = d[0]
    hi = d[0]
    for i in range(m):
        r = 0.0
        if i > 0:
            r += fabs(e[i - 1])
        if i < m - 1:
            r += fabs(e[i])
        if d[i] - r < lo:
            lo = d[i] - r
        if d[i] + r > hi:
            hi = d[i] + r
    for it in range(200):
        if hi - lo <= 1e-14 * max(fabs(lo), fabs(hi)) + 1e-300:
            break
        mid = 0.5 * (lo + hi)
        if _sturm_count(d, e, m, mid) >= m:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


cdef double _one_shift(double complex[:, ::1] T, double complex lam,
                       double complex* q, double complex* qold,
                       double complex* u, double complex* w,
                       double complex* v0, double* d, double* e,
                       double tol, int maxit) nogil:
    cdef Py_ssize_t n = T.shape[0]
    cdef Py_ssize_t i, j
    cdef int it, m
    cdef double dmin = 1e308, dd
    cdef double complex s, piv
    cdef double beta = 0.0, sig = 0.0, sigold = 0.0, alpha, nrm2

    for i in range(n):
        dd = abs(T[i, i] - lam)
        if dd < dmin:
            dmin = dd
    if dmin == 0.0:
        return 0.0

    for i in range(n):
        q[i] = v0[i]
        qold[i] = 0.0

    for it in range(maxit):
        # u = (T - lam)^{-H} q : forward substitution on the lower factor
        for i in range(n):
            s = q[i]
            for j in range(i):
                s = s - (T[j, i].conjugate()) * u[j]
            piv = (T[i, i] - lam).conjugate()
            u[i] = s / piv
        # w = (T - lam)^{-1} u : backward substitution
        for i in range(n - 1, -1, -1):
            s = u[i]
            for j in range(i + 1, n):
                s = s - T[i, j] * w[j]
            w[i] = s / (T[i, i] - lam)
        nrm2 = 0.0
        for i in range(n):
            nrm2 += w[i].real * w[i].real + w[i].imag * w[i].imag
        if not isfinite(nrm2):
            return 0.0
        # w -= beta*qold; alpha = Re <q, w>; w -= alpha*q
        alpha = 0.0
        for i in range(n):
            w[i] = w[i] - beta * qold[i]
            alpha += (q[i].conjugate() * w[i]).real
        for i in range(n):
            w[i] = w[i] - alpha * q[i]
        d[it] = alpha
        m = it + 1
        if m == 1:
            sig = alpha
        else:
            sig = _tridiag_max_eig(d, e, m)
        if not isfinite(sig):
            return 0.0
        if it > 0 and fabs(sig - sigold) <= tol * sig:
            break
        nrm2 = 0.0
        for i in range(n):
            nrm2 += w[i].real * w[i].real + w[i].imag * w[i].imag
        beta = sqrt(nrm2)
        if beta == 0.0:
            break
        e[it] = beta
        for i in range(n):
            qold[i] = q[i]
            q[i] = w[i] / beta
        sigold = sig
    if sig <= 0.0:
        return dmin
    return 1.0 / sqrt(sig)


def triangular_sigma_min(T, shifts, double tol=1e-10, int maxit=99):
    """Smallest singular value of T - shift*I for each shift.

    T must be upper triangular (e.g. a complex Schur factor); the singular
    values then agree with those of the original matrix.  Uses inverse
    Lanczos iteration with two triangular solves per step.
    """
    Tv = np.ascontiguousarray(T, dtype=np.complex128)
    sv = np.ascontiguousarray(shifts, dtype=np.complex128)
    cdef double complex[:, ::1] Tm = Tv
    cdef double complex[::1] sm = sv
    cdef Py_ssize_t n = Tm.shape[0]
    cdef Py_ssize_t nsh = sm.shape[0]
    out = np.empty(nsh, dtype=np.float64)
    cdef double[::1] ov = out

    v0_a = lcg_vector(n)
    scratch = np.empty((4, n), dtype=np.complex128)
    dwork = np.empty(maxit, dtype=np.float64)
    ework = np.empty(maxit, dtype=np.float64)
    cdef double complex[:, ::1] sc = scratch
    cdef double complex[::1] v0 = v0_a
    cdef double[::1] dv = dwork
    cdef double[::1] ev = ework
    cdef Py_ssize_t k
    with nogil:
        for k in range(nsh):
            ov[k] = _one_shift(Tm, sm[k], &sc[0, 0], &sc[1, 0], &sc[2, 0],
                               &sc[3, 0], &v0[0], &dv[0], &ev[0], tol, maxit)
    return out
