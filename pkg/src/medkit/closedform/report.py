from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..certify import OptimalityCertificate, certificate
from ..errors import Infeasible, NoBranchCertifies
from ..povm import Povm

BRANCHES = (
    "Irreducible",
    "QubitCase1",
    "QubitCase2",
    "QubitCase3",
    "QubitCase4",
    "Special1",
    "Special2",
    "Special3",
    "MQubitIrred",
    "MQubitRed",
    "Degenerate-Π=I",
    "Fallback",
)

TIE_TOL = 1e-9


@dataclass
class Quadratic:
    """Coefficients of ``A p^2 + B p + C/4 = 0``; roots ``(-B +- sqrt(B^2 - AC)) / 2A``."""

    A: float
    B: float
    C: float
    root: float | None = None

    def roots(self) -> list[float]:
        return quadratic_roots(self.A, self.B, self.C)


def quadratic_roots(A: float, B: float, C: float) -> list[float]:
    """Real roots, largest first; a slightly negative discriminant is clamped."""
    scale = max(abs(B), abs(C), 1e-300)
    if abs(A) < 1e-12 * scale:
        return [] if B == 0 else [-C / (4.0 * B)]
    disc = B * B - A * C
    if disc < 0:
        if disc > -1e-12:
            disc = 0.0
        else:
            return []
    r = np.sqrt(disc)
    return sorted({(-B + r) / (2 * A), (-B - r) / (2 * A)}, reverse=True)


@dataclass
class Candidate:
    branch: str
    p: float
    detail: str = ""
    povm: Povm | None = None
    certificate: OptimalityCertificate | None = None
    reason: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def certified(self) -> bool:
        return self.certificate is not None and self.certificate.certified

    def summary(self) -> str:
        if self.certificate is not None:
            status = self.certificate.status
            if not self.certified:
                status += " (" + ", ".join(
                    f"{k}={self.certificate.residuals[k]:.2e}" for k in self.certificate.failing()
                ) + ")"
        else:
            status = "not built: " + self.reason
        tag = f"{self.branch}/{self.detail}" if self.detail else self.branch
        return f"{tag}: p = {self.p:.12g} -> {status}"


@dataclass
class SolveReport:
    p_opt: float
    branch: str
    povm: Povm = field(repr=False)
    certificate: OptimalityCertificate = field(repr=False)
    detail: str = ""
    quadratic: Quadratic | None = None
    candidates: list = field(default_factory=list, repr=False)
    alternatives: list = field(default_factory=list, repr=False)
    findings: list = field(default_factory=list)
    extra: dict = field(default_factory=dict, repr=False)

    @property
    def status(self) -> str:
        return self.certificate.label

    @property
    def label(self) -> str:
        return f"{self.branch}/{self.detail}" if self.detail else self.branch

    def to_dict(self, G=None) -> dict:
        out = {
            "p_opt": self.p_opt,
            "branch": self.label,
            "status": self.status,
            "weights": [float(w) for w in self.povm.weights],
            "certificate": self.certificate.to_dict(),
        }
        if G is not None:
            out["bloch"] = self.povm.bloch_components(G).tolist()
        if self.quadratic is not None:
            q = self.quadratic
            out["quadratic"] = {"A": q.A, "B": q.B, "C": q.C, "root": q.root}
        if self.findings:
            out["findings"] = list(self.findings)
        if self.alternatives:
            out["alternatives"] = [c.summary() for c in self.alternatives]
        for k, v in self.extra.items():
            if isinstance(v, (int, float, str, bool, list, dict)) or v is None:
                out[k] = v
        return out

    def to_json(self, G=None) -> str:
        return json.dumps(self.to_dict(G), indent=2, default=float)


def evaluate(e, candidates: list[Candidate], builders: dict, G=None) -> None:
    """Build and certify each candidate in place.

    ``builders`` maps ``id(candidate)`` to a zero-argument callable returning a
    :class:`Povm`; an :class:`Infeasible` from the builder is recorded as the
    rejection reason.
    """
    for cand in candidates:
        build: Callable[[], Povm] = builders[id(cand)]
        try:
            cand.povm = build()
        except Infeasible as exc:
            cand.reason = str(exc)
            continue
        cand.certificate = certificate(e, cand.povm, cand.p, G=G)


def select(e, candidates: list[Candidate], what: str, **kw) -> SolveReport:
    """The certified candidate with the largest p; later ties become alternatives."""
    good = [c for c in candidates if c.certified]
    if not good:
        dump = "\n  ".join(c.summary() for c in candidates) or "(no candidates)"
        raise NoBranchCertifies(f"{what}: no candidate branch certifies\n  {dump}", candidates)
    best_p = max(c.p for c in good)
    tied = [c for c in good if c.p >= best_p - TIE_TOL]
    win = tied[0]
    return SolveReport(
        p_opt=float(win.p),
        branch=win.branch,
        detail=win.detail,
        povm=win.povm,
        certificate=win.certificate,
        candidates=candidates,
        alternatives=tied[1:],
        **kw,
    )
