"""numba implementations of the hot loops.

Each function here has a counterpart with the same signature and semantics
in :mod:`medkit.kernels._numpy`; ``tests/test_kernels.py`` checks them
against each other.
"""

import numpy as np
from numba import njit

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV_2_53 = 1.0 / 9007199254740992.0

MAX_SWEEPS = 60

# status codes shared with the numpy backend
OK = 0
NOT_CONVERGED = 1
SINGULAR = 2


@njit(cache=True)
def jacobi_eigh(a, tol=1e-15):
    """Cyclic complex Jacobi.  Returns (ascending values, vectors, sweeps)."""
    d = a.shape[0]
    A = np.empty((d, d), dtype=np.complex128)
    for i in range(d):
        for k in range(d):
            A[i, k] = 0.5 * (a[i, k] + np.conj(a[k, i]))
    V = np.eye(d, dtype=np.complex128)
    norm = 0.0
    for i in range(d):
        for k in range(d):
            norm += A[i, k].real ** 2 + A[i, k].imag ** 2
    norm = np.sqrt(norm)
    sweeps = 0
    if norm > 0.0:
        while True:
            off = 0.0
            for p in range(d):
                for q in range(p + 1, d):
                    off += A[p, q].real ** 2 + A[p, q].imag ** 2
            off = np.sqrt(2.0 * off)
            if off <= tol * norm:
                break
            if sweeps >= MAX_SWEEPS:
                sweeps = -1
                break
            sweeps += 1
            for p in range(d):
                for q in range(p + 1, d):
                    beta = A[p, q]
                    mag = abs(beta)
                    if mag < 1e-300:
                        continue
                    alpha = A[p, p].real
                    gamma = A[q, q].real
                    theta = (gamma - alpha) / (2.0 * mag)
                    if theta == 0.0:
                        t = 1.0
                    else:
                        t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                    c = 1.0 / np.sqrt(t * t + 1.0)
                    s = t * c
                    e = beta / mag
                    ec = np.conj(e)
                    # A <- A G, G = [[c, s], [-s*conj(e), c*conj(e)]]
                    for k in range(d):
                        akp = A[k, p]
                        akq = A[k, q]
                        A[k, p] = c * akp - s * ec * akq
                        A[k, q] = s * akp + c * ec * akq
                    # A <- G^H A
                    for k in range(d):
                        apk = A[p, k]
                        aqk = A[q, k]
                        A[p, k] = c * apk - s * e * aqk
                        A[q, k] = s * apk + c * e * aqk
                    A[p, q] = 0.0
                    A[q, p] = 0.0
                    A[p, p] = A[p, p].real
                    A[q, q] = A[q, q].real
                    for k in range(d):
                        vkp = V[k, p]
                        vkq = V[k, q]
                        V[k, p] = c * vkp - s * ec * vkq
                        V[k, q] = s * vkp + c * ec * vkq
    w = np.empty(d)
    for i in range(d):
        w[i] = A[i, i].real
    order = np.argsort(w)
    ws = np.empty(d)
    Vs = np.empty((d, d), dtype=np.complex128)
    for i in range(d):
        ws[i] = w[order[i]]
        for k in range(d):
            Vs[k, i] = V[k, order[i]]
    return ws, Vs, sweeps


@njit(cache=True)
def _herm(a):
    return 0.5 * (a + np.conj(a.T))


@njit(cache=True)
def _inv_sqrt(L, cutoff):
    w, V, _ = jacobi_eigh(L)
    d = L.shape[0]
    wmax = w[d - 1]
    singular = False
    D = np.zeros((d, d), dtype=np.complex128)
    if wmax <= 0.0:
        return D, True
    for i in range(d):
        if w[i] > cutoff * wmax:
            D[i, i] = 1.0 / np.sqrt(w[i])
        else:
            singular = True
    return V @ D @ np.conj(V.T), singular


@njit(cache=True)
def _evaluate(W, Pi):
    n, d, _ = W.shape
    M = np.zeros((d, d), dtype=np.complex128)
    for j in range(n):
        M += Pi[j] @ W[j]
    Mh = _herm(M)
    p_lower = 0.0
    for i in range(d):
        p_lower += Mh[i, i].real
    eps = 0.0
    for j in range(n):
        w, _, _ = jacobi_eigh(W[j] - Mh)
        if w[d - 1] > eps:
            eps = w[d - 1]
    return p_lower, p_lower + d * eps


@njit(cache=True)
def med_iterate(W, Pi0, step, max_iters, gap, cutoff):
    """Run POVM updates until the dual gap closes.

    ``step <= 0`` selects the fixed-point map Pi_j <- W_j Pi_j W_j; a positive
    ``step`` uses (I + step W_j) Pi_j (I + step W_j).  Both are followed by the
    completeness renormalisation L^{-1/2} (.) L^{-1/2}.

    Returns (Pi, p_lower, p_upper, iterations, status, dips) where ``dips``
    counts sweeps on which p_lower fell by more than 1e-12.
    """
    n, d, _ = W.shape
    Pi = Pi0.copy()
    eye = np.eye(d, dtype=np.complex128)
    B = np.empty_like(Pi)
    p_lower, p_upper = _evaluate(W, Pi)
    dips = 0
    it = 0
    status = NOT_CONVERGED
    if p_upper - p_lower <= gap:
        return Pi, p_lower, p_upper, it, OK, dips
    while it < max_iters:
        it += 1
        L = np.zeros((d, d), dtype=np.complex128)
        for j in range(n):
            if step <= 0.0:
                B[j] = W[j] @ Pi[j] @ W[j]
            else:
                X = eye + step * W[j]
                B[j] = X @ Pi[j] @ X
            L += B[j]
        R, singular = _inv_sqrt(_herm(L), cutoff)
        if singular:
            status = SINGULAR
            break
        for j in range(n):
            Pi[j] = _herm(R @ B[j] @ R)
        prev = p_lower
        p_lower, p_upper = _evaluate(W, Pi)
        if p_lower < prev - 1e-12:
            dips += 1
        if p_upper - p_lower <= gap:
            status = OK
            break
    return Pi, p_lower, p_upper, it, status, dips


@njit(cache=True)
def _unit(seed, index):
    z = seed + (index + np.uint64(1)) * _GOLDEN
    z = (z ^ (z >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    z = z ^ (z >> _S31)
    return (z >> _S11) * _INV_2_53


@njit(cache=True)
def count_successes(prior_cdf, outcome_cdf, seed, start, stop):
    """Successes over trials ``start .. stop-1``; trial t uses draws 2t, 2t+1."""
    n = prior_cdf.shape[0]
    s = np.uint64(seed)
    hits = 0
    for t in range(start, stop):
        u = _unit(s, np.uint64(2 * t))
        j = 0
        while j < n - 1 and u >= prior_cdf[j]:
            j += 1
        v = _unit(s, np.uint64(2 * t + 1))
        i = 0
        while i < n - 1 and v >= outcome_cdf[j, i]:
            i += 1
        if i == j:
            hits += 1
    return hits
