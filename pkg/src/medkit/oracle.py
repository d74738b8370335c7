"""Numerical MED maximisers with a certified dual bound.

Both routines keep a feasible POVM (lower bound ``p_lower``) and, from its
operator ``M``, the dual-feasible ``K = herm(M) + eps I`` with
``eps = max_j lambda_max(p_j rho_j - herm(M))`` clamped at zero.  ``Tr K``
bounds the success probability of every strategy, so ``p_upper - p_lower``
is a rigorous optimality gap.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import kernels, qmat
from .ensembles import TwoSetEnsemble
from .errors import SingularL
from .povm import Povm

log = logging.getLogger(__name__)

MAX_RESTARTS = 5


@dataclass
class OracleResult:
    povm: Povm = field(repr=False)
    p_lower: float
    p_upper: float
    iterations: int
    converged: bool
    restarts: int = 0
    dips: int = 0

    @property
    def gap(self) -> float:
        return self.p_upper - self.p_lower

    def to_dict(self) -> dict:
        return {
            "p_lower": self.p_lower,
            "p_upper": self.p_upper,
            "gap": self.gap,
            "iterations": self.iterations,
            "converged": self.converged,
            "restarts": self.restarts,
        }


def _random_povm(N: int, d: int, rng: np.random.Generator) -> np.ndarray:
    A = rng.normal(size=(N, d, d)) + 1j * rng.normal(size=(N, d, d))
    Pi = qmat.dagger(A) @ A
    R = qmat.inv_sqrt_psd(qmat.herm_part(Pi.sum(axis=0)))
    return qmat.herm_part(R @ Pi @ R)


def _run(e, Pi0, step, max_iters, gap, cutoff, seed):
    W = np.ascontiguousarray(e.weighted_states)
    rng = np.random.default_rng(seed)
    Pi0 = np.ascontiguousarray(Pi0, dtype=np.complex128)
    for restart in range(MAX_RESTARTS + 1):
        Pi, lo, up, it, status, dips = kernels.med_iterate(W, Pi0, step, max_iters, gap, cutoff)
        if status != kernels.SINGULAR:
            break
        log.info("L lost rank after %d sweeps; restarting from a perturbed start", it)
        mix = _random_povm(e.N, e.d, rng)
        Pi0 = np.ascontiguousarray(0.9 * Pi0 + 0.1 * mix)
    else:
        raise SingularL(f"L stayed singular after {MAX_RESTARTS} restarts")
    if dips:
        log.warning("success probability dipped on %d sweeps (finite precision)", dips)
    res = OracleResult(Povm(np.asarray(Pi), e.n), float(lo), float(max(up, lo)), int(it),
                       status == kernels.OK, restart, int(dips))
    if not res.converged:
        log.warning("oracle stopped after %d sweeps with gap %.3e", it, res.gap)
    return res


def med_fixed_point(
    e: TwoSetEnsemble,
    max_iters: int = 200_000,
    gap: float = 1e-7,
    cutoff: float = 1e-12,
    seed: int = 0,
) -> OracleResult:
    """Iterate ``Pi_j <- L^{-1/2} W_j Pi_j W_j L^{-1/2}`` from the uniform POVM.

    ``W_j = p_j rho_j`` and ``L = sum_k W_k Pi_k W_k``.  ``seed`` only matters
    if ``L`` loses rank and the start has to be perturbed.
    """
    if max_iters < 1 or gap <= 0:
        raise ValueError("max_iters must be >= 1 and gap > 0")
    Pi0 = np.broadcast_to(np.eye(e.d) / e.N, (e.N, e.d, e.d))
    return _run(e, Pi0, 0.0, max_iters, gap, cutoff, seed)


def random_restart_ascent(
    e: TwoSetEnsemble,
    restarts: int = 4,
    seed: int = 0,
    step: float = 10.0,
    max_iters: int = 200_000,
    gap: float = 1e-8,
    cutoff: float = 1e-12,
) -> OracleResult:
    """Best of several ascents from random starts.

    A start is ``Pi_j = A_j^H A_j`` with Gaussian ``A_j``, renormalised to
    resolve the identity.  Each step moves ``A_j -> A_j (I + t W_j)`` (the
    gradient direction of ``Tr(W_j A_j^H A_j)``) with ``t = step / max_j |W_j|``
    and renormalises by ``S^{-1/2}``.  The returned upper bound is the
    smallest dual bound seen over all restarts.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    rng = np.random.default_rng(seed)
    t = step / max(float(np.linalg.norm(w, 2)) for w in e.weighted_states)
    best, upper = None, np.inf
    for k in range(restarts):
        Pi0 = _random_povm(e.N, e.d, rng)
        res = _run(e, Pi0, t, max_iters, gap, cutoff, seed + k + 1)
        upper = min(upper, res.p_upper)
        if best is None or res.p_lower > best.p_lower:
            best = res
    best.p_upper = max(upper, best.p_lower)
    best.converged = best.p_upper - best.p_lower <= gap
    return best


def helstrom(eta: float, rho: np.ndarray, eta_prime: float, rho_prime: np.ndarray) -> float:
    """Two-state optimum ``(1 + |eta rho - eta' rho'|_1) / 2`` for eta + eta' = 1."""
    w = qmat.eig_herm(eta * rho - eta_prime * rho_prime).values
    return 0.5 * (eta + eta_prime + float(np.abs(w).sum()))
