"""Two sets of qubit states generated by rotations about a common axis (z).

The dual operator has the form ``K = (p I + x sigma_z) / 2``.  Writing
``u = eta a n_z`` and ``s = eta a sqrt(1 - n_z^2)`` for the first set (primed
likewise), ``K`` dominates every weighted state iff
``p >= eta + sqrt((x - u)^2 + s^2)`` and the same for the primed set, so the
optimum is ``min_x max(...)``.  It is attained either at a minimum of one
branch (``x = u``, the other set idle) or where both branches cross, which
leads to a quadratic in ``p``.
"""

from __future__ import annotations

import numpy as np

from .. import qmat
from ..ensembles import TwoSetEnsemble
from ..errors import DimensionMismatch, GeometryUnsupported
from .bloch import bloch_data, bloch_povm, identity_povm
from .report import Candidate, Quadratic, SolveReport, evaluate, quadratic_roots, select

AXIS_TOL = 1e-10
SAME_AXIS = 1e-12


def require_z_geometry(e: TwoSetEnsemble) -> None:
    if e.d != 2:
        raise DimensionMismatch(f"qubit solver needs d = 2, got {e.d}")
    for u in e.all_unitaries:
        if np.linalg.norm(qmat.conj_by(u, qmat.SIGMA_Z) - qmat.SIGMA_Z) > AXIS_TOL:
            raise GeometryUnsupported("a unitary does not preserve the z axis")


def case1_coefficients(eta, b, nz, eta_p, bp, nzp) -> tuple[float, float, float, float, float]:
    """``(A, B, C, D, E)`` of the crossing quadratic ``A p^2 + B p + C/4 = 0``.

    ``D = eta b n_z - eta' b' n'_z`` and ``E = eta^2 (b^2 - 1) - eta'^2 (b'^2 - 1)``;
    at a root the crossing point is ``x = (E + 2 (eta - eta') p) / (2 D)``.
    """
    u1 = eta * b * nz
    D = u1 - eta_p * bp * nzp
    E = eta**2 * (b**2 - 1) - eta_p**2 * (bp**2 - 1)
    de = eta - eta_p
    A = de**2 - D**2
    B = E * de - 2 * u1 * D * de + 2 * eta * D**2
    C = E**2 + 4 * eta**2 * (b**2 - 1) * D**2 - 4 * u1 * E * D
    return A, B, C, D, E


def _polar(v: np.ndarray) -> tuple[float, float]:
    b = float(np.linalg.norm(v))
    return b, (float(v[2]) / b if b > 0 else 0.0)


def solve_qubit_two_sets(e: TwoSetEnsemble) -> SolveReport:
    require_z_geometry(e)
    data = bloch_data(e)
    eta, eta_p = e.eta, e.eta_prime
    v1, v2 = data.seed, data.seed_prime
    b, nz = _polar(v1)
    bp, nzp = _polar(v2)
    u1, u2 = eta * v1[2], eta_p * v2[2]
    s1 = eta * float(np.hypot(v1[0], v1[1]))
    s2 = eta_p * float(np.hypot(v2[0], v2[1]))
    same_axis = abs(u1 - u2) <= SAME_AXIS

    cands, builders = [], {}

    def add(c: Candidate, build):
        cands.append(c)
        builders[id(c)] = build

    def at(p, x):
        return lambda: bloch_povm(data, p, np.array([0.0, 0.0, x]))

    A, B, C, D, E = case1_coefficients(eta, b, nz, eta_p, bp, nzp)
    if not same_axis:
        for k, root in enumerate(quadratic_roots(A, B, C)):
            x = (E + 2 * (eta - eta_p) * root) / (2 * D)
            c = Candidate("QubitCase1", root, f"root{k + 1}",
                          extra={"quadratic": Quadratic(A, B, C, root), "beta": x / 2})
            add(c, at(root, x))
    add(Candidate("QubitCase2" if same_axis else "QubitCase3", eta + s1), at(eta + s1, u1))
    add(Candidate("QubitCase2" if same_axis else "QubitCase4", eta_p + s2), at(eta_p + s2, u2))
    if e.n == 1:
        add(Candidate("QubitCase3", eta, "single"), lambda: identity_povm(e.N, e.n, 2, True))
    if e.n_prime == 1:
        add(Candidate("QubitCase4", eta_p, "single"), lambda: identity_povm(e.N, e.n, 2, False))
    add(Candidate("Degenerate-Π=I", eta, "first"), lambda: identity_povm(e.N, e.n, 2, True))
    add(Candidate("Degenerate-Π=I", eta_p, "second"), lambda: identity_povm(e.N, e.n, 2, False))

    evaluate(e, cands, builders)
    rep = select(e, cands, "qubit solver")
    win = next(c for c in cands if c.povm is rep.povm)
    if "quadratic" in win.extra:
        rep.quadratic = win.extra["quadratic"]
        z = rep.povm.bloch_components(data.G)[:, 2]
        w = rep.povm.weights
        j, k = int(w[: e.n].argmax()), e.n + int(w[e.n:].argmax())
        # elements of the two sets lean to opposite sides of the equator
        rep.extra["opposite_z"] = bool(z[j] * z[k] < 0)
    rep.extra["axial_bound"] = axial_bound(eta, u1, s1, eta_p, u2, s2)
    return rep


def axial_bound(eta, u1, s1, eta_p, u2, s2) -> float:
    """``min_x max(eta + |(x-u1, s1)|, eta' + |(x-u2, s2)|)`` by bounded scalar search.

    Every such x gives a feasible dual operator, so this bounds the optimum
    from above; it is tight whenever a crossing or single-set branch certifies.
    """
    from scipy.optimize import minimize_scalar

    f = lambda x: max(eta + np.hypot(x - u1, s1), eta_p + np.hypot(x - u2, s2))  # noqa: E731
    lo, hi = min(u1, u2) - 1.0, max(u1, u2) + 1.0
    res = minimize_scalar(f, bounds=(lo, hi), method="bounded", options={"xatol": 1e-14})
    return float(res.fun)
