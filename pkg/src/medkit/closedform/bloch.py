"""POVM construction for ensembles whose states are generalized Bloch states.

A candidate optimum is a pair ``(p, x)`` standing for the dual operator
``K = (p I + x.gamma) / 2**m``.  For a state with prior ``q`` and Bloch vector
``v`` the difference ``K - q rho`` is PSD iff ``p - q >= |x - q v|``; when the
bound is tight its kernel is the ``-1`` eigenspace of ``u.gamma`` with
``u = (x - q v) / (p - q)``, so the element for that state must be a multiple
of ``I - u.gamma``.  Weights then come from the completeness LP.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..blochdirac import GammaSet, dirac_gammas, state_to_bloch
from ..ensembles import TwoSetEnsemble
from ..errors import DimensionMismatch, Infeasible
from ..povm import Povm
from .weights import recover_weights, system_from_operators

TIGHT_TOL = 1e-8


@dataclass(frozen=True)
class BlochData:
    G: GammaSet
    priors: np.ndarray  # (N,)
    vectors: np.ndarray  # (N, 2m+1), a * n for each state
    n: int

    @property
    def N(self) -> int:
        return len(self.priors)

    @property
    def seed(self) -> np.ndarray:
        return self.vectors[0]

    @property
    def seed_prime(self) -> np.ndarray:
        return self.vectors[self.n]


def bloch_data(e: TwoSetEnsemble, G: GammaSet | None = None) -> BlochData:
    """Bloch vectors of every state; raises OutsideFamily for non-Bloch states."""
    if G is None:
        m = int(round(np.log2(e.d)))
        if 2 ** m != e.d:
            raise DimensionMismatch(f"dimension {e.d} is not a power of two")
        G = dirac_gammas(m)
    if G.dim != e.d:
        raise DimensionMismatch(f"gamma set acts on {G.dim}, ensemble on {e.d}")
    vecs = np.array([state_to_bloch(r, G).vector for r in e.states])
    return BlochData(G, e.priors.copy(), vecs, e.n)


def dual_slacks(data: BlochData, p: float, x: np.ndarray) -> np.ndarray:
    """``(p - q_j) - |x - q_j v_j|`` per state; negative means K - q rho is not PSD."""
    w = x[None, :] - data.priors[:, None] * data.vectors
    return (p - data.priors) - np.linalg.norm(w, axis=1)


def shapes_for(data: BlochData, p: float, x: np.ndarray, tol: float = TIGHT_TOL):
    """Unit directions ``u_j`` for states where the dual bound is tight, else None.

    Raises :class:`Infeasible` if some ``K - q rho`` is not PSD.
    """
    slack = dual_slacks(data, p, x)
    if slack.min() < -tol:
        j = int(slack.argmin())
        raise Infeasible(f"dual operator misses state {j} by {-slack[j]:.3e}")
    out = []
    for j in range(data.N):
        gap = p - data.priors[j]
        w = x - data.priors[j] * data.vectors[j]
        r = np.linalg.norm(w)
        if abs(gap) <= tol and r <= tol:
            out.append(np.zeros_like(x))  # K = q rho: any element fits, take I
        elif abs(slack[j]) > tol or gap <= tol or r == 0.0:
            out.append(None)
        else:
            out.append(w / r)
    return out


def povm_from_shapes(G: GammaSet, directions, n: int) -> Povm:
    """Elements ``lambda_j (I - u_j.gamma)`` with LP weights; ``None`` means zero.

    The ``u_j`` need not be unit vectors (printed element formulas); a
    non-projective shape is passed through for certification to judge.
    """
    eye = np.eye(G.dim)
    active = [j for j, u in enumerate(directions) if u is not None]
    ops = [eye - G.dot(directions[j]) for j in active]
    n_first = sum(1 for j in active if j < n)
    lam, lam_p = recover_weights(system_from_operators(ops, n_first))
    w = np.concatenate([lam, lam_p])
    el = np.zeros((len(directions), G.dim, G.dim), dtype=complex)
    for k, j in enumerate(active):
        el[j] = w[k] * ops[k]
    return Povm(el, n)


def bloch_povm(data: BlochData, p: float, x: np.ndarray) -> Povm:
    return povm_from_shapes(data.G, shapes_for(data, p, x), data.n)


def identity_povm(N: int, n: int, d: int, first: bool) -> Povm:
    """``Pi_1 = I`` (or ``Pi'_1 = I``) and every other element zero."""
    el = np.zeros((N, d, d), dtype=complex)
    el[0 if first else n] = np.eye(d)
    return Povm(el, n)


def embed(values, indices, size: int) -> np.ndarray:
    x = np.zeros(size)
    x[list(indices)] = values
    return x
