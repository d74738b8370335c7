"""m-qubit Bloch ensembles whose generating sets share invariant gamma directions.

Let ``W`` be the gamma indices left fixed by every unitary of both sets.
The dual operator is ``K = (p I + x.gamma) / 2**m`` with ``x`` supported on
``W``.  With ``c = eta b n_W``, ``s^2 = eta^2 b^2 (1 - |n_W|^2)`` (primed
likewise) it is feasible iff ``p - eta >= |(x - c, s)|`` and the primed
analogue, i.e. iff balls of radius ``r = sqrt((p - eta)^2 - s^2)`` about
``c`` and ``c'`` meet.  At the optimum they either touch (a quadratic in
``p``) or one set is idle.

Three routes produce candidate values of ``p``: the printed coefficients,
an independently derived quadratic, and a bracketing root-finder on the
touching condition.  All are certified; certification decides.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .. import qmat
from ..blochdirac import GammaSet
from ..ensembles import TwoSetEnsemble, invariant_index_sets
from ..errors import CoefficientMismatch, Infeasible
from .bloch import bloch_data, bloch_povm, identity_povm
from .report import Candidate, Quadratic, SolveReport, evaluate, select

AUDIT_TOL = 1e-8


@dataclass(frozen=True)
class FrameParams:
    """Scalars of the two-axis frame inside the shared invariant subspace."""

    eta: float
    eta_p: float
    b: float
    b_p: float
    n0: float
    n0_p: float
    n1_p: float


@dataclass
class FrameDecomposition:
    n0: float
    n0_p: float
    n1_p: float
    mu: float = float("nan")
    m0: float = float("nan")
    m1: float = float("nan")
    m0_p: float = float("nan")
    m1_p: float = float("nan")
    beta0: float = float("nan")
    beta1: float = float("nan")

    def to_dict(self) -> dict:
        return {k: float(v) for k, v in self.__dict__.items()}


def printed_coefficients(q: FrameParams) -> Quadratic:
    """The coefficients exactly as printed; undefined (nan) when the axial gap vanishes."""
    eta, etp, b, bp, n0, n0p, n1p = q.eta, q.eta_p, q.b, q.b_p, q.n0, q.n0_p, q.n1_p
    D = np.float64(eta * b * n0 - etp * bp * n0p)
    F = etp**2 * bp**2 * n1p**2
    e = eta**2 * (1 - b**2) - etp**2 * (1 - bp**2)
    with np.errstate(divide="ignore", invalid="ignore"):
        g = np.float64(eta * etp**2 * b * bp**2 * n0 * n1p**2) / D
        A = (eta - etp) ** 2 - D**2 - F
        B = ((e - 2 * g) * (eta - etp)
             - 2 * eta * b * n0 * (eta - etp) * (D + F / D)
             + 2 * eta * (D**2 + F))
        C = ((e - g) ** 2
             + 4 * eta**2 * (b**2 * (1 + etp**2 * bp**2 * n0**2 * n1p**2 / D**2) - 1) * (D**2 + F)
             - 4 * eta * b * n0 * (e - 2 * g) * (D + F / D))
    return Quadratic(float(A), float(B), float(C))


def derived_coefficients(q: FrameParams) -> Quadratic:
    """Touching condition of the two feasibility balls, cleared of square roots."""
    eta, etp = q.eta, q.eta_p
    L2 = (eta * q.b * q.n0 - etp * q.b_p * q.n0_p) ** 2 + (etp * q.b_p * q.n1_p) ** 2
    s1 = eta**2 * q.b**2 * (1 - q.n0**2)
    s2 = etp**2 * q.b_p**2 * (1 - q.n0_p**2 - q.n1_p**2)
    h = 0.5 * (eta**2 - etp**2 + L2 - s1 + s2)
    A = (eta - etp) ** 2 - L2
    B = 2 * eta * L2 - 2 * (eta - etp) * h
    C = 4 * h * h + 4 * L2 * (s1 - eta**2)
    return Quadratic(A, B, C)


def coefficient_audit(q: FrameParams, strict: bool = False) -> dict:
    """Compare printed and derived coefficients and their larger roots.

    Returns the discrepancies; with ``strict`` a mismatch above ``1e-8``
    raises :class:`CoefficientMismatch` carrying both sets of values.
    """
    pr, de = printed_coefficients(q), derived_coefficients(q)
    rp, rd = pr.roots(), de.roots()
    out = {
        "printed": (pr.A, pr.B, pr.C),
        "derived": (de.A, de.B, de.C),
        "dA": abs(pr.A - de.A),
        "dB": abs(pr.B - de.B),
        "dC": abs(pr.C - de.C),
        "root_printed": rp[0] if rp else float("nan"),
        "root_derived": rd[0] if rd else float("nan"),
    }
    out["d_root"] = abs(out["root_printed"] - out["root_derived"])
    worst = np.nanmax([out["dA"], out["dB"], out["dC"], out["d_root"]])
    out["max_discrepancy"] = float(worst) if np.isfinite(worst) else float("inf")
    if strict and not out["max_discrepancy"] <= AUDIT_TOL:
        raise CoefficientMismatch(
            f"printed and derived coefficients differ by {out['max_discrepancy']:.3e}",
            out["printed"], out["derived"],
        )
    return out


@dataclass(frozen=True)
class _Geometry:
    W: tuple
    c1: np.ndarray
    c2: np.ndarray
    s1: float
    s2: float
    frame: FrameDecomposition
    params: FrameParams
    e0: np.ndarray
    e1: np.ndarray

    @property
    def L(self) -> float:
        return float(np.linalg.norm(self.c2 - self.c1))


def _geometry(e: TwoSetEnsemble, G: GammaSet, data) -> _Geometry:
    W = tuple(sorted(set(invariant_index_sets(e.unitaries, G).invariant_indices)
                     & set(invariant_index_sets(e.unitaries_prime, G).invariant_indices)))
    k = G.count
    v1, v2 = data.seed, data.seed_prime
    b, bp = float(np.linalg.norm(v1)), float(np.linalg.norm(v2))
    proj = np.zeros(k)
    proj[list(W)] = 1.0
    n_w = proj * v1 / b if b > 0 else np.zeros(k)
    np_w = proj * v2 / bp if bp > 0 else np.zeros(k)
    n0 = float(np.linalg.norm(n_w))
    if n0 > 0:
        e0 = n_w / n0
    elif np.linalg.norm(np_w) > 0:
        e0 = np_w / np.linalg.norm(np_w)
    else:
        e0 = np.zeros(k)
    n0p = float(np_w @ e0)
    perp = np_w - n0p * e0
    n1p = float(np.linalg.norm(perp))
    e1 = perp / n1p if n1p > 0 else np.zeros(k)
    c1, c2 = e.eta * b * n_w, e.eta_prime * bp * np_w
    s1 = e.eta * np.sqrt(max(0.0, b * b - (b * n0) ** 2))
    s2 = e.eta_prime * np.sqrt(max(0.0, bp * bp - (bp * np.linalg.norm(np_w)) ** 2))
    return _Geometry(
        W, c1, c2, float(s1), float(s2),
        FrameDecomposition(n0, n0p, n1p),
        FrameParams(e.eta, e.eta_prime, b, bp, n0, n0p, n1p),
        e0, e1,
    )


def _radius(p, q, s):
    r2 = (p - q) ** 2 - s * s
    return np.sqrt(r2) if r2 >= 0 and p >= q else None


def _touch_point(g: _Geometry, eta, eta_p, p):
    """``x`` on the segment from ``c`` to ``c'`` at distance ``r(p)`` from ``c``."""
    r1 = _radius(p, eta, g.s1)
    if r1 is None:
        return None
    L = g.L
    if L == 0.0:
        return g.c1.copy()
    return g.c1 + min(r1, L) * (g.c2 - g.c1) / L


def touching_value(g: _Geometry, eta: float, eta_p: float) -> float:
    """Smallest p at which both feasibility balls exist and meet, by bisection."""
    lo = max(eta + g.s1, eta_p + g.s2)
    L = g.L

    def gap(p):
        r1 = np.sqrt(max((p - eta) ** 2 - g.s1**2, 0.0))
        r2 = np.sqrt(max((p - eta_p) ** 2 - g.s2**2, 0.0))
        return r1 + r2 - L

    if gap(lo) >= 0:
        return lo
    return bisect(gap, lo, lo + L, xtol=1e-16, rtol=4 * np.finfo(float).eps, maxiter=400)


def solve_mqubit_reducible(e: TwoSetEnsemble, G: GammaSet, strict: bool = False) -> SolveReport:
    data = bloch_data(e, G)
    g = _geometry(e, G, data)
    eta, eta_p = e.eta, e.eta_prime
    audit = coefficient_audit(g.params, strict=strict)

    cands, builders = [], {}

    def add(c, build):
        cands.append(c)
        builders[id(c)] = build

    def at_touch(p):
        def build():
            x = _touch_point(g, eta, eta_p, p)
            if x is None:
                raise Infeasible(f"p = {p:.12g} is below the first set's feasibility threshold")
            return bloch_povm(data, p, x)
        return build

    for name, quad in (("printed-root", printed_coefficients(g.params)),
                       ("derived-root", derived_coefficients(g.params))):
        if not all(np.isfinite([quad.A, quad.B, quad.C])):
            c = Candidate("MQubitRed", float("nan"), name)
            c.reason = "coefficients undefined (axial gap is zero)"
            cands.append(c)
            builders[id(c)] = None
            continue
        for k, root in enumerate(quad.roots()):
            add(Candidate("MQubitRed", root, f"{name}{k + 1}",
                          extra={"quadratic": Quadratic(quad.A, quad.B, quad.C, root)}),
                at_touch(root))
    p_b = touching_value(g, eta, eta_p)
    add(Candidate("MQubitRed", p_b, "bisection"), at_touch(p_b))
    add(Candidate("MQubitRed", eta + g.s1, "first-set"),
        lambda: bloch_povm(data, eta + g.s1, g.c1))
    add(Candidate("MQubitRed", eta_p + g.s2, "second-set"),
        lambda: bloch_povm(data, eta_p + g.s2, g.c2))
    add(Candidate("Degenerate-Π=I", eta, "first"), lambda: identity_povm(e.N, e.n, e.d, True))
    add(Candidate("Degenerate-Π=I", eta_p, "second"), lambda: identity_povm(e.N, e.n, e.d, False))

    live = [c for c in cands if builders.get(id(c)) is not None]
    evaluate(e, live, builders, G=G)
    rep = select(e, cands, "m-qubit reducible solver")
    win = next(c for c in cands if c.povm is rep.povm)
    if "quadratic" in win.extra:
        rep.quadratic = win.extra["quadratic"]
    rep.extra["frame"] = _fill_frame(g, rep, data, e, G).to_dict()
    rep.extra["invariant_indices"] = list(g.W)
    rep.extra["audit"] = {k: v for k, v in audit.items() if not isinstance(v, tuple)}
    if audit["max_discrepancy"] > AUDIT_TOL:
        rep.findings.append(
            f"printed coefficients differ from the derived ones by {audit['max_discrepancy']:.3e}; "
            f"certified branch is {rep.label}"
        )
    return rep


def _fill_frame(g: _Geometry, rep: SolveReport, data, e, G) -> FrameDecomposition:
    f = FrameDecomposition(g.frame.n0, g.frame.n0_p, g.frame.n1_p)
    w = rep.povm.weights
    f.mu = float(w[: e.n].sum())
    x = 2 ** G.m * G.components(qmat.herm_part(rep.certificate.M))
    f.beta0 = float(x @ g.e0) / 2 ** G.m
    f.beta1 = float(x @ g.e1) / 2 ** G.m
    p = rep.p_opt
    if abs(p - e.eta) > 1e-12:
        m = (x - e.eta * data.seed) / (p - e.eta)
        f.m0, f.m1 = float(m @ g.e0), float(m @ g.e1)
    if abs(p - e.eta_prime) > 1e-12:
        mp = (x - e.eta_prime * data.seed_prime) / (p - e.eta_prime)
        f.m0_p, f.m1_p = float(mp @ g.e0), float(mp @ g.e1)
    return f
