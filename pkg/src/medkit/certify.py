"""Optimality certificates for a proposed (POVM, p) pair.

With ``M = sum_j p_j Pi_j rho_j`` the pair is optimal iff ``M`` is Hermitian,
``Tr M = p`` equals the success probability of the POVM, and every
``M - p_j rho_j`` is positive semidefinite; the conjugate states are those
differences normalised by ``p - p_j``.  Each condition becomes a residual
and the certificate passes when all gating residuals are under tolerance.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import qmat
from ._config import TOL
from .ensembles import TwoSetEnsemble
from .errors import DimensionMismatch
from .povm import Povm

RESIDUAL_KEYS = (
    "completeness",
    "povm_psd",
    "tau_psd",
    "tau_trace",
    "slackness",
    "M_invariance",
    "p_consistency",
    "M_hermiticity",
)
# M_invariance follows from the covariant ansatz and is not necessary for
# optimality (a single-state set with Pi_1 = I can have a non-invariant M).
GATING = tuple(k for k in RESIDUAL_KEYS if k != "M_invariance")

CERTIFIED = "Certified"
REJECTED = "Rejected"


def _check_dims(e: TwoSetEnsemble, P: Povm) -> None:
    if P.N != e.N or P.n != e.n or P.d != e.d:
        raise DimensionMismatch(
            f"POVM has {P.n}+{P.N - P.n} elements of dim {P.d}; "
            f"ensemble has {e.n}+{e.n_prime} states of dim {e.d}"
        )


def success_probability(e: TwoSetEnsemble, P: Povm) -> float:
    _check_dims(e, P)
    val = np.einsum("j,jab,jba->", e.priors, e.states, P.elements)
    return float(val.real)


def build_M(e: TwoSetEnsemble, P: Povm) -> np.ndarray:
    _check_dims(e, P)
    return np.einsum("j,jab,jbc->ac", e.priors, P.elements, e.states)


def conjugate_states(M: np.ndarray, e: TwoSetEnsemble, p: float, tol: float = 1e-12):
    """Conjugate states of both sets from the Hermitian part of ``M``.

    Returns ``(tau, tau_prime, degenerate)``; a set whose prior equals ``p``
    (within ``tol``) has no conjugate states and gets ``None`` plus a True
    flag in ``degenerate``.
    """
    Mh = qmat.herm_part(M)
    first, second = e.states[: e.n], e.states[e.n:]
    out, flags = [], []
    for prior, states in ((e.eta, first), (e.eta_prime, second)):
        gap = p - prior
        if abs(gap) <= tol:
            out.append(None)
            flags.append(True)
        else:
            out.append([(Mh - prior * rho) / gap for rho in states])
            flags.append(False)
    return out[0], out[1], tuple(flags)


@dataclass
class OptimalityCertificate:
    p: float
    M: np.ndarray = field(repr=False)
    tau: list | None = field(repr=False)
    tau_prime: list | None = field(repr=False)
    alpha: float
    beta: np.ndarray | None
    c: float | None
    c_prime: float | None
    residuals: dict
    tolerance: float
    degenerate: tuple = (False, False)

    @property
    def status(self) -> str:
        ok = all(self.residuals[k] <= self.tolerance for k in GATING)
        return CERTIFIED if ok else REJECTED

    @property
    def certified(self) -> bool:
        return self.status == CERTIFIED

    @property
    def label(self) -> str:
        if self.certified and any(self.degenerate):
            return "Certified-Degenerate"
        return self.status

    def failing(self) -> list[str]:
        return [k for k in GATING if self.residuals[k] > self.tolerance]

    def to_dict(self) -> dict:
        out = {"status": self.label, "p": self.p, "alpha": self.alpha}
        if self.beta is not None:
            out["beta"] = [float(b) for b in self.beta]
        out["c"] = self.c
        out["c_prime"] = self.c_prime
        out["residuals"] = {k: float(self.residuals[k]) for k in RESIDUAL_KEYS}
        out["tolerance"] = self.tolerance
        return out

    def report(self) -> str:
        lines = [f"status = {self.label}", f"p = {self.p:.12g}"]
        lines += [f"{k} = {self.residuals[k]:.3e}" for k in RESIDUAL_KEYS]
        return "\n".join(lines)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _bloch_radius(tau, G) -> float | None:
    if tau is None or G is None:
        return None
    return float(np.linalg.norm(G.components(tau[0]) * G.dim))


def certificate(
    e: TwoSetEnsemble,
    P: Povm,
    p: float,
    G=None,
    tol: float | None = None,
) -> OptimalityCertificate:
    """Evaluate every optimality residual for the claimed optimum ``p``.

    ``G`` (a :class:`~medkit.blochdirac.GammaSet`) enables extraction of the
    ``beta_i`` coefficients and conjugate radii; for qubits the Pauli set is
    used when ``G`` is omitted.
    """
    tol = TOL.certificate if tol is None else tol
    if G is None and e.d == 2:
        from .blochdirac import dirac_gammas

        G = dirac_gammas(1)
    M = build_M(e, P)
    Mh = qmat.herm_part(M)
    d = e.d
    tau, tau_p, degenerate = conjugate_states(M, e, p)
    res = dict.fromkeys(RESIDUAL_KEYS, 0.0)
    res["completeness"] = P.completeness_residual()
    res["povm_psd"] = P.psd_deficit()
    res["M_hermiticity"] = qmat.hermiticity_residual(M)

    trM = float(np.trace(Mh).real)
    tau_psd = tau_trace = slack = 0.0
    for k, (prior, taus) in enumerate(((e.eta, tau), (e.eta_prime, tau_p))):
        lo, hi = (0, e.n) if k == 0 else (e.n, e.N)
        if taus is None:
            diffs = [Mh - prior * rho for rho in e.states[lo:hi]]
            tau_psd = max([tau_psd] + [qmat.psd_deficit(x) for x in diffs])
            tau_trace = max(tau_trace, abs(trM - p))
        else:
            diffs = [(p - prior) * t for t in taus]
            # judged on M - p_j rho_j itself: for p < p_j a negated tau can look PSD
            tau_psd = max([tau_psd] + [qmat.psd_deficit(x) for x in diffs])
            tau_trace = max([tau_trace] + [abs(np.trace(t).real - 1.0) for t in taus])
        for x, Pi in zip(diffs, P.elements[lo:hi]):
            slack = max(slack, abs(np.trace(x @ Pi)))
    res["tau_psd"] = tau_psd
    res["tau_trace"] = tau_trace
    res["slackness"] = slack
    res["M_invariance"] = max(
        float(np.linalg.norm(Mh - qmat.conj_by(u, Mh))) for u in e.all_unitaries
    )
    res["p_consistency"] = max(abs(trM - p), abs(success_probability(e, P) - p))

    beta = G.components(Mh) if G is not None and G.dim == d else None
    return OptimalityCertificate(
        p=float(p), M=M, tau=tau, tau_prime=tau_p,
        alpha=trM / d, beta=beta,
        c=_bloch_radius(tau, G if beta is not None else None),
        c_prime=_bloch_radius(tau_p, G if beta is not None else None),
        residuals=res, tolerance=tol, degenerate=degenerate,
    )
