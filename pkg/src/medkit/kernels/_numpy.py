"""Pure-numpy implementations mirroring :mod:`medkit.kernels._numba`.

The Jacobi solver is batched: one rotation index pair (p, q) is applied to
a whole stack of matrices at once, with per-matrix angles.
"""

import numpy as np

from .. import rng

MAX_SWEEPS = 60
OK = 0
NOT_CONVERGED = 1
SINGULAR = 2


def jacobi_eigh_batch(a, tol=1e-15):
    """Batched cyclic complex Jacobi over the last two axes.

    Returns (values ascending, vectors, sweeps); ``sweeps`` is -1 if any
    matrix in the batch failed to converge.
    """
    a = np.asarray(a, dtype=np.complex128)
    squeeze = a.ndim == 2
    A = a[None] if squeeze else a
    A = 0.5 * (A + np.conj(np.swapaxes(A, -1, -2)))
    nb, d, _ = A.shape
    V = np.broadcast_to(np.eye(d, dtype=np.complex128), A.shape).copy()
    norm = np.sqrt(np.sum(np.abs(A) ** 2, axis=(1, 2)))
    iu = np.triu_indices(d, 1)
    sweeps = 0
    while d > 1:
        off = np.sqrt(2.0 * np.sum(np.abs(A[:, iu[0], iu[1]]) ** 2, axis=1))
        if np.all(off <= tol * norm):
            break
        if sweeps >= MAX_SWEEPS:
            sweeps = -1
            break
        sweeps += 1
        for p in range(d):
            for q in range(p + 1, d):
                beta = A[:, p, q]
                mag = np.abs(beta)
                live = mag >= 1e-300
                if not live.any():
                    continue
                safe = np.where(live, mag, 1.0)
                theta = (A[:, q, q].real - A[:, p, p].real) / (2.0 * safe)
                t = np.where(theta == 0.0, 1.0,
                             np.sign(theta) / (np.abs(theta) + np.sqrt(theta * theta + 1.0)))
                c = np.where(live, 1.0 / np.sqrt(t * t + 1.0), 1.0)
                s = np.where(live, t * c, 0.0)
                e = np.where(live, beta / safe, 1.0)
                ec = np.conj(e)
                c_, s_, e_, ec_ = c[:, None], s[:, None], e[:, None], ec[:, None]
                akp, akq = A[:, :, p].copy(), A[:, :, q].copy()
                A[:, :, p] = c_ * akp - s_ * ec_ * akq
                A[:, :, q] = s_ * akp + c_ * ec_ * akq
                apk, aqk = A[:, p, :].copy(), A[:, q, :].copy()
                A[:, p, :] = c_ * apk - s_ * e_ * aqk
                A[:, q, :] = s_ * apk + c_ * e_ * aqk
                A[live, p, q] = 0.0
                A[live, q, p] = 0.0
                A[:, p, p] = A[:, p, p].real
                A[:, q, q] = A[:, q, q].real
                vkp, vkq = V[:, :, p].copy(), V[:, :, q].copy()
                V[:, :, p] = c_ * vkp - s_ * ec_ * vkq
                V[:, :, q] = s_ * vkp + c_ * ec_ * vkq
    w = np.real(np.diagonal(A, axis1=1, axis2=2)).copy()
    order = np.argsort(w, axis=1, kind="stable")
    w = np.take_along_axis(w, order, axis=1)
    V = np.take_along_axis(V, order[:, None, :], axis=2)
    if squeeze:
        return w[0], V[0], sweeps
    return w, V, sweeps


def jacobi_eigh(a, tol=1e-15):
    return jacobi_eigh_batch(np.asarray(a), tol)


def _herm(a):
    return 0.5 * (a + np.conj(np.swapaxes(a, -1, -2)))


def _evaluate(W, Pi):
    d = W.shape[1]
    Mh = _herm(np.einsum("jab,jbc->ac", Pi, W))
    p_lower = float(np.trace(Mh).real)
    w, _, _ = jacobi_eigh_batch(W - Mh[None])
    eps = max(0.0, float(w[:, -1].max()))
    return p_lower, p_lower + d * eps


def med_iterate(W, Pi0, step, max_iters, gap, cutoff):
    W = np.asarray(W, dtype=np.complex128)
    Pi = np.array(Pi0, dtype=np.complex128)
    d = W.shape[1]
    p_lower, p_upper = _evaluate(W, Pi)
    dips = 0
    it = 0
    if p_upper - p_lower <= gap:
        return Pi, p_lower, p_upper, it, OK, dips
    status = NOT_CONVERGED
    X = W if step <= 0.0 else np.eye(d)[None] + step * W
    while it < max_iters:
        it += 1
        B = X @ Pi @ X
        w, V, _ = jacobi_eigh(_herm(B.sum(axis=0)))
        if w[-1] <= 0.0 or np.any(w <= cutoff * w[-1]):
            status = SINGULAR
            break
        R = (V / np.sqrt(w)) @ np.conj(V.T)
        Pi = _herm(R @ B @ R)
        prev = p_lower
        p_lower, p_upper = _evaluate(W, Pi)
        if p_lower < prev - 1e-12:
            dips += 1
        if p_upper - p_lower <= gap:
            status = OK
            break
    return Pi, p_lower, p_upper, it, status, dips


def count_successes(prior_cdf, outcome_cdf, seed, start, stop):
    n = prior_cdf.shape[0]
    hits = 0
    chunk = 1 << 20
    for lo in range(start, stop, chunk):
        hi = min(stop, lo + chunk)
        u = rng.uniforms(seed, 2 * lo, 2 * (hi - lo))
        j = np.minimum(np.searchsorted(prior_cdf, u[0::2], side="right"), n - 1)
        rows = outcome_cdf[j]
        i = np.minimum((u[1::2, None] >= rows).sum(axis=1), n - 1)
        hits += int(np.count_nonzero(i == j))
    return hits
