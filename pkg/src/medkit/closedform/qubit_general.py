"""Any qubit ensemble, through the smallest ball enclosing a family of balls.

Every Hermitian 2x2 operator is ``K = (p I + x.sigma) / 2`` and
``K >= q rho`` iff ``p >= q + |x - q v|``.  The best dual bound is therefore
the radius of the smallest ball containing the balls ``B(q_j v_j, q_j)``.
That ball touches at most four of them; we enumerate support sets of size
one to four, solve the tangency conditions exactly and keep the smallest
ball that contains everything.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

from ..ensembles import TwoSetEnsemble
from ..errors import DimensionMismatch
from .bloch import bloch_data, bloch_povm
from .report import Candidate, SolveReport, evaluate, select

CONTAIN_TOL = 1e-12
MAX_STATES = 24


def _tangent_balls(c: np.ndarray, r: np.ndarray) -> list[tuple[np.ndarray, float]]:
    """Balls ``(x, R)`` internally tangent to every ``B(c_k, r_k)`` with x in their affine hull."""
    k = len(c)
    if k == 1:
        return [(c[0].copy(), float(r[0]))]
    D = (c[1:] - c[0]).T  # 3 x (k-1); x = c0 + D mu
    if np.linalg.matrix_rank(D, tol=1e-12) < k - 1:
        return []
    # |x - c_j|^2 - |x - c_0|^2 = (R - r_j)^2 - (R - r_0)^2 reads
    # -2 G mu + |c_j - c_0|^2 = -2 R (r_j - r_0) + r_j^2 - r_0^2, so mu = a + b R
    G = D.T @ D
    try:
        Ginv = np.linalg.inv(G)
    except np.linalg.LinAlgError:
        return []
    a = 0.5 * Ginv @ (np.diag(G) - r[1:] ** 2 + r[0] ** 2)
    b = Ginv @ (r[1:] - r[0])
    # |D mu|^2 = (R - r0)^2 with mu = a + b R
    Da, Db = D @ a, D @ b
    qa = Db @ Db - 1.0
    qb = 2 * (Da @ Db) + 2 * r[0]
    qc = Da @ Da - r[0] ** 2
    if abs(qa) < 1e-14:
        roots = [] if qb == 0 else [-qc / qb]
    else:
        disc = qb * qb - 4 * qa * qc
        if disc < -1e-14:
            return []
        sq = np.sqrt(max(disc, 0.0))
        roots = [(-qb + sq) / (2 * qa), (-qb - sq) / (2 * qa)]
    out = []
    for R in roots:
        if R < r.max() - CONTAIN_TOL:
            continue
        out.append((c[0] + D @ (a + b * R), float(R)))
    return out


def enclosing_ball(centers: np.ndarray, radii: np.ndarray) -> tuple[np.ndarray, float]:
    """Smallest ball containing all ``B(centers[j], radii[j])``; returns ``(x, R)``."""
    c = np.asarray(centers, dtype=float)
    r = np.asarray(radii, dtype=float)
    N = len(c)
    if N > MAX_STATES:
        raise ValueError(f"support enumeration is limited to {MAX_STATES} states")
    scale = max(1.0, float(np.abs(c).max()), float(r.max()))
    best = None
    for k in range(1, min(4, N) + 1):
        for S in combinations(range(N), k):
            idx = list(S)
            for x, R in _tangent_balls(c[idx], r[idx]):
                reach = np.linalg.norm(c - x, axis=1) + r
                if reach.max() <= R + CONTAIN_TOL * scale and (best is None or R < best[1]):
                    best = (x, R)
    return best


def solve_qubit_general(e: TwoSetEnsemble) -> SolveReport:
    if e.d != 2:
        raise DimensionMismatch(f"qubit solver needs d = 2, got {e.d}")
    data = bloch_data(e)
    x, p = enclosing_ball(data.priors[:, None] * data.vectors, data.priors)
    cand = Candidate("QubitGeneral", p, "enclosing-ball", extra={"x": x})
    evaluate(e, [cand], {id(cand): lambda: bloch_povm(data, p, x)})
    rep = select(e, [cand], "enclosing-ball solver")
    rep.extra["bloch_x"] = [float(v) for v in x]
    return rep
