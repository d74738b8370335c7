"""Both sets irreducible: the dual operator is a multiple of the identity."""

from __future__ import annotations

import numpy as np

from .. import qmat
from ..blochdirac import GammaSet
from ..ensembles import TwoSetEnsemble, irreducibility_test
from ..errors import Infeasible, NotIrreducible, WeightInfeasible
from ..povm import Povm
from .bloch import bloch_data, bloch_povm, identity_povm
from .report import Candidate, SolveReport, evaluate, select
from .weights import recover_weights, system_from_operators

TIE = 1e-12
EIG_DEGENERACY = 1e-10


def _require_irreducible(e: TwoSetEnsemble) -> None:
    for name, us in (("first", e.unitaries), ("second", e.unitaries_prime)):
        rep = irreducibility_test(us)
        if not rep.is_irreducible:
            raise NotIrreducible(
                f"{name} set is reducible (commutant dimension {rep.commutant_dim})"
            )


def _top_eigvecs(rho: np.ndarray) -> tuple[float, np.ndarray]:
    w, v = qmat.eig_herm(rho)
    top = w[-1]
    return float(top), v[:, w >= top - EIG_DEGENERACY]


def irreducible_povm(e: TwoSetEnsemble, active: tuple[bool, bool]) -> Povm:
    """Elements ``sum_i x_ji U_j |i><i| U_j^H`` over top eigenvectors of the active sets.

    Each (state, eigenvector) pair carries its own weight.  Raises
    :class:`WeightInfeasible` if no nonnegative weights resolve the identity.
    """
    ops, owner = [], []
    for k, (seed, us) in enumerate(((e.rho1, e.unitaries), (e.rho1_prime, e.unitaries_prime))):
        if not active[k]:
            continue
        _, vecs = _top_eigvecs(seed)
        offset = 0 if k == 0 else e.n
        for j, u in enumerate(us):
            for i in range(vecs.shape[1]):
                psi = u @ vecs[:, i]
                ops.append(np.outer(psi, psi.conj()))
                owner.append(offset + j)
    n_first = sum(1 for o in owner if o < e.n)
    try:
        lam, lam_p = recover_weights(system_from_operators(ops, n_first))
    except Infeasible as exc:
        raise WeightInfeasible(f"no nonnegative weights over the top eigenvectors: {exc}") from exc
    x = np.concatenate([lam, lam_p])
    el = np.zeros((e.N, e.d, e.d), dtype=complex)
    for w, op, j in zip(x, ops, owner):
        el[j] += w * op
    return Povm(el, e.n)


def solve_irreducible(e: TwoSetEnsemble) -> SolveReport:
    """``p = d * max(eta a_max, eta' a'_max)`` with ``a_max`` the top seed eigenvalue."""
    _require_irreducible(e)
    a, _ = _top_eigvecs(e.rho1)
    ap, _ = _top_eigvecs(e.rho1_prime)
    v1, v2 = e.d * e.eta * a, e.d * e.eta_prime * ap
    p = max(v1, v2)
    active = (v1 >= p - TIE, v2 >= p - TIE)
    povm = irreducible_povm(e, active)
    cand = Candidate("Irreducible", p)
    evaluate(e, [cand], {id(cand): lambda: povm})
    rep = select(e, [cand], "irreducible solver")
    rep.extra["active_sets"] = [bool(s) for s in active]
    return rep


def solve_mqubit_irreducible(e: TwoSetEnsemble, G: GammaSet) -> SolveReport:
    """Bloch-state version: ``p = max(eta (1 + a), eta' (1 + a'))``."""
    _require_irreducible(e)
    data = bloch_data(e, G)
    a, ap = (float(np.linalg.norm(v)) for v in (data.seed, data.seed_prime))
    p = max(e.eta * (1 + a), e.eta_prime * (1 + ap))
    spectral = e.d * max(e.eta * _top_eigvecs(e.rho1)[0], e.eta_prime * _top_eigvecs(e.rho1_prime)[0])
    x = np.zeros(G.count)
    cands = [
        Candidate("MQubitIrred", p),
        Candidate("Degenerate-Π=I", e.eta, "first"),
        Candidate("Degenerate-Π=I", e.eta_prime, "second"),
    ]
    builders = {
        id(cands[0]): lambda: bloch_povm(data, p, x),
        id(cands[1]): lambda: identity_povm(e.N, e.n, e.d, True),
        id(cands[2]): lambda: identity_povm(e.N, e.n, e.d, False),
    }
    evaluate(e, cands, builders, G=G)
    rep = select(e, cands, "m-qubit irreducible solver")
    rep.extra["spectral_check"] = abs(spectral - p)
    return rep
