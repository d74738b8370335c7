"""Nonnegative weights that make a family of shapes resolve the identity."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from ..errors import Infeasible

FEAS_TOL = 1e-9


@dataclass
class WeightConstraintSystem:
    """``A_eq @ x = b_eq, x >= 0``; the first ``n_first`` variables belong to
    the unprimed set."""

    A_eq: np.ndarray
    b_eq: np.ndarray
    n_first: int
    labels: list = field(default_factory=list)


def hermitian_coords(m: np.ndarray) -> np.ndarray:
    """Real coordinates of a Hermitian matrix: diagonal, then Re/Im of the upper triangle."""
    iu = np.triu_indices(m.shape[0], 1)
    return np.concatenate([np.real(np.diagonal(m)), np.real(m[iu]), np.imag(m[iu])])


def system_from_operators(ops, n_first: int, labels=None) -> WeightConstraintSystem:
    """Constraint system for ``sum_k x_k ops[k] = I``."""
    ops = list(ops)
    if not ops:
        raise Infeasible("no active measurement shapes")
    d = ops[0].shape[0]
    A = np.column_stack([hermitian_coords(o) for o in ops])
    b = hermitian_coords(np.eye(d))
    return WeightConstraintSystem(A, b, n_first, list(labels or range(len(ops))))


def recover_weights(system: WeightConstraintSystem) -> tuple[np.ndarray, np.ndarray]:
    """A nonnegative solution of the system, preferring the largest minimum weight.

    Raises :class:`Infeasible` when no nonnegative solution satisfies the
    equalities to ``1e-9``.
    """
    A_all = np.asarray(system.A_eq, dtype=float)
    b = np.asarray(system.b_eq, dtype=float)
    # a zero shape contributes nothing, so its weight is fixed at zero
    live = np.abs(A_all).max(axis=0) > 0
    if not live.any():
        raise Infeasible("every measurement shape is zero")
    A = A_all[:, live]
    k = A.shape[1]
    # maximise t subject to x_i >= t
    c = np.zeros(k + 1)
    c[-1] = -1.0
    A_ub = np.hstack([-np.eye(k), np.ones((k, 1))])
    res = linprog(
        c,
        A_ub=A_ub,
        b_ub=np.zeros(k),
        A_eq=np.hstack([A, np.zeros((A.shape[0], 1))]),
        b_eq=b,
        bounds=[(0, None)] * k + [(0, 1)],
        method="highs",
        options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10},
    )
    if res.status != 0:
        raise Infeasible(f"weight LP failed: {res.message}")
    x = np.clip(res.x[:k], 0.0, None)
    x = _polish(A, b, x)
    resid = float(np.abs(A @ x - b).max()) if A.size else 0.0
    if resid > FEAS_TOL or np.any(x < -FEAS_TOL):
        raise Infeasible(f"weights miss the completeness equations by {resid:.3e}")
    out = np.zeros(A_all.shape[1])
    out[live] = np.clip(x, 0.0, None)
    return out[: system.n_first], out[system.n_first:]


def _polish(A, b, x):
    """Least-squares correction on the support of ``x`` to remove LP tolerance noise."""
    support = x > 1e-13
    if not support.any():
        return x
    for _ in range(3):
        r = b - A @ x
        if np.abs(r).max() < 1e-15:
            break
        delta, *_ = np.linalg.lstsq(A[:, support], r, rcond=None)
        trial = x.copy()
        trial[support] += delta
        if np.any(trial < -1e-12):
            break
        x = trial
    return x
