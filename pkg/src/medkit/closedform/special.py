"""Closed forms for three pure-state qubit families.

1. ``n`` states with a common ``n_z`` against one state on the +z pole.
2. ``n`` states with a common ``n_z`` against one state on the +y axis.
3. Two states with a common ``n_z`` against two equatorial states.

Each family has a piecewise formula: a list of branches, each with a
condition on the parameters, a value of ``p`` and element shapes.  The
branch whose condition holds is built and certified; if it fails, or no
condition holds, the general qubit solver takes over and the report is
tagged ``Fallback`` with findings that explain why.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..ensembles import TwoSetEnsemble, build_qubit_zrotation_ensemble
from ..errors import ConditionAmbiguous, InvalidEnsemble, NoBranchCertifies
from .bloch import bloch_data, identity_povm, povm_from_shapes
from .qubit import solve_qubit_two_sets
from .qubit_general import solve_qubit_general
from .report import Candidate, SolveReport, evaluate

EQ_TOL = 1e-12
GEOM_TOL = 1e-10
VALUE_TOL = 1e-9


@dataclass(frozen=True)
class Params:
    eta: float
    eta_p: float
    n: int
    nz: float
    xy: np.ndarray  # (n, 2) in-plane Bloch components of the first set
    xy_p: np.ndarray  # (n', 2) for the second set

    @property
    def s(self) -> float:
        return float(np.sqrt(max(0.0, 1.0 - self.nz**2)))


@dataclass
class Branch:
    tag: str
    holds: bool
    p: float
    # p -> (first-set shapes, second-set shapes); a shape is the vector m in
    # I - m.sigma, None marks a zero element; "identity" means Pi'_1 = I
    shapes: Callable


def _zero(k):
    return [None] * k


def _tilted(xy, coef, mz):
    """``-coef * (n_x, n_y)`` in plane plus ``mz`` along z, per state."""
    return [np.array([-coef * a, -coef * b, mz]) for a, b in xy]


def _close(a, b):
    return abs(a - b) <= EQ_TOL


def _safe(f):
    with np.errstate(divide="ignore", invalid="ignore"):
        try:
            return float(f())
        except ZeroDivisionError:
            return float("nan")


def _crossing_shapes(q: Params, second_xy_coef: bool):
    """Shapes shared by the crossing branch of families 2 and 3."""
    eta, eta_p, nz = q.eta, q.eta_p, q.nz

    def shapes(p):
        mz = ((eta - eta_p) * p - eta**2 * nz**2) / (eta * nz * (p - eta))
        mz_p = (eta - eta_p) * p / (eta * nz * (p - eta_p))
        first = _tilted(q.xy, eta / (p - eta), mz)
        if second_xy_coef:
            second = _tilted(q.xy_p, eta_p / (p - eta_p), mz_p)
        else:  # single state on +y
            second = [np.array([0.0, -eta_p / (p - eta_p), mz_p])]
        return first, second

    return shapes


def _crossing_value(q: Params):
    eta, eta_p, nz = q.eta, q.eta_p, q.nz
    den = (eta * nz) ** 2 - (eta - eta_p) ** 2
    ratio = _safe(lambda: (eta - eta_p) * eta_p / den)
    p = _safe(lambda: 2 * eta**2 * eta_p * nz**2 / den)
    return (0 < ratio < 0.5), p


def branches(which: int, q: Params) -> list[Branch]:
    eta, eta_p, n, nz, s = q.eta, q.eta_p, q.n, q.nz, q.s
    zero_nz = abs(nz) <= EQ_TOL
    if which == 1:
        den = eta * (1 + nz) - 2 * eta_p
        mid = _safe(lambda: 2 * eta_p * (eta - eta_p) / den)
        p1 = _safe(lambda: 2 * eta_p * (eta * nz - eta_p) / den)
        hold1 = (eta * nz < mid < eta_p) or (eta * nz > mid > eta_p)
        thresh = _safe(lambda: (nz - 1 - s) / (nz**2 + eta * nz - 1 - n - (1 + n) * s))
        hold2 = _close(eta * nz, eta_p) or eta <= thresh + EQ_TOL

        def shapes1(p):
            g = eta * nz - eta_p
            mz = ((eta - eta_p) * p - eta * nz * g) / (g * (p - eta))
            mz_p = ((eta - eta_p) * p - eta_p * g) / (g * (p - eta_p))
            return _tilted(q.xy, eta / (p - eta), mz), [np.array([0.0, 0.0, mz_p])]

        return [
            Branch("crossing", hold1, p1, shapes1),
            Branch("1+s", hold2, eta * (1 + s), lambda p: (_tilted(q.xy, 1 / s, 0.0), _zero(1))),
        ]
    if which == 2:
        hold1, p1 = _crossing_value(q)
        return [
            Branch("crossing", hold1 and not zero_nz, p1, _crossing_shapes(q, False)),
            Branch("2eta", zero_nz and eta >= 1 / (1 + n) - EQ_TOL, 2 * eta,
                   lambda p: (_tilted(q.xy, 1.0, 0.0), [np.array([0.0, -1.0, 0.0])])),
            Branch("1+s", not zero_nz and eta >= 1 / (n + s) - EQ_TOL, eta * (1 + s),
                   lambda p: (_tilted(q.xy, 1 / s, 0.0), _zero(1))),
            Branch("eta", not zero_nz and _close(eta, 1 / (1 + n)), eta,
                   lambda p: (_zero(n), "identity")),
        ]
    if which == 3:
        hold1, p1 = _crossing_value(q)
        return [
            Branch("crossing", hold1 and not zero_nz, p1, _crossing_shapes(q, True)),
            Branch("2eta", zero_nz and eta >= 0.25 - EQ_TOL, 2 * eta,
                   lambda p: (_tilted(q.xy, 0.5, 0.0), _tilted(q.xy_p, 1.0, 0.0))),
            Branch("1+s", not zero_nz and eta >= 1 / (2 + s) - EQ_TOL, eta * (1 + s),
                   lambda p: (_tilted(q.xy, 1 / s, 0.0), _zero(2))),
            Branch("2eta'-equator", zero_nz and eta <= 0.25 + EQ_TOL, 2 * eta_p,
                   lambda p: (_tilted(q.xy, 1.0, 0.0), _tilted(q.xy_p, 1.0, 0.0))),
            Branch("2eta'", not zero_nz and eta <= 0.25 + EQ_TOL, 2 * eta_p,
                   lambda p: (_zero(2), _tilted(q.xy_p, 1.0, 0.0))),
        ]
    raise ValueError(f"special case must be 1, 2 or 3, got {which!r}")


def special_params(which: int, e: TwoSetEnsemble) -> Params:
    """Check the family's geometry and extract its parameters."""
    if which not in (1, 2, 3):
        raise ValueError(f"special case must be 1, 2 or 3, got {which!r}")
    if e.d != 2:
        raise InvalidEnsemble("special cases are qubit ensembles")
    data = bloch_data(e)
    v, vp = data.vectors[: e.n], data.vectors[e.n:]
    if np.any(np.abs(np.linalg.norm(data.vectors, axis=1) - 1) > GEOM_TOL):
        raise InvalidEnsemble("special cases need pure states")
    if np.ptp(v[:, 2]) > GEOM_TOL:
        raise InvalidEnsemble("first-set states must share n_z")
    if which in (1, 2):
        if e.n_prime != 1:
            raise InvalidEnsemble(f"case {which} has a single primed state")
        target = np.array([0.0, 0.0, 1.0]) if which == 1 else np.array([0.0, 1.0, 0.0])
        if np.linalg.norm(vp[0] - target) > GEOM_TOL:
            raise InvalidEnsemble(f"case {which} needs the primed state along {target.tolist()}")
    else:
        if e.n != 2 or e.n_prime != 2:
            raise InvalidEnsemble("case 3 has two states in each set")
        if np.abs(vp[:, 2]).max() > GEOM_TOL:
            raise InvalidEnsemble("case 3 needs equatorial primed states")
    return Params(e.eta, e.eta_prime, e.n, float(v[0, 2]), v[:, :2].copy(), vp[:, :2].copy())


def special_case_ensemble(which: int, eta: float, nz: float, n: int = 3,
                          phi: float = 0.0, phi_prime: float = 0.0) -> TwoSetEnsemble:
    """Canonical member of a family: a regular ``n``-gon (``n = 2`` for case 3).

    ``eta'`` follows from normalisation.  ``phi``/``phi_prime`` set the azimuth
    of the seeds.
    """
    if which == 3:
        n = 2
    s = np.sqrt(1 - nz**2)
    seed = [s * np.cos(phi), s * np.sin(phi), nz]
    angles = [2 * np.pi * k / n for k in range(n)]
    if which == 3:
        eta_p = (1 - 2 * eta) / 2
        seed_p, angles_p = [np.cos(phi_prime), np.sin(phi_prime), 0.0], [0.0, np.pi]
    else:
        eta_p = 1 - n * eta
        seed_p = [0.0, 0.0, 1.0] if which == 1 else [0.0, 1.0, 0.0]
        angles_p = [0.0]
    return build_qubit_zrotation_ensemble(eta, eta_p, seed, seed_p, angles, angles_p)


def _build(e, q, br: Branch):
    first, second = br.shapes(br.p)
    if isinstance(second, str):
        return lambda: identity_povm(e.N, e.n, 2, False)
    if not all(np.all(np.isfinite(m)) for m in list(first) + list(second) if m is not None):
        raise FloatingPointError("element coefficients are not finite")
    from ..blochdirac import dirac_gammas

    return lambda: povm_from_shapes(dirac_gammas(1), list(first) + list(second), e.n)


def solve_special_case(which: int, e: TwoSetEnsemble, on_ambiguous: str = "raise") -> SolveReport:
    """Evaluate the printed piecewise formula of family ``which`` for ``e``.

    When several branch conditions hold with different values the default is
    to raise :class:`ConditionAmbiguous`; ``on_ambiguous="certify"`` instead
    tries each holding branch and keeps the certified one.
    """
    if on_ambiguous not in ("raise", "certify"):
        raise ValueError("on_ambiguous must be 'raise' or 'certify'")
    q = special_params(which, e)
    table = branches(which, q)
    holding = [b for b in table if b.holds and np.isfinite(b.p)]
    findings = []
    if len(holding) > 1:
        vals = [b.p for b in holding]
        if max(vals) - min(vals) > VALUE_TOL:
            listing = ", ".join(f"{b.tag}: {b.p:.12g}" for b in holding)
            msg = f"case {which}: several branch conditions hold ({listing})"
            if on_ambiguous == "raise":
                raise ConditionAmbiguous(msg, [(b.tag, b.p) for b in holding])
            findings.append(msg)
    tried = []
    for br in holding:
        cand = Candidate(f"Special{which}", br.p, br.tag)
        try:
            build = _build(e, q, br)
        except (ZeroDivisionError, FloatingPointError) as exc:
            cand.reason = f"element formula undefined: {exc}"
        else:
            evaluate(e, [cand], {id(cand): build})
        if cand.certified:
            rep = SolveReport(p_opt=float(br.p), branch=cand.branch, detail=br.tag,
                              povm=cand.povm, certificate=cand.certificate,
                              candidates=[cand], findings=findings)
            rep.extra["printed_branch"] = br.tag
            return rep
        findings.append(f"printed branch {br.tag!r} does not certify: {cand.summary()}")
        tried.append(br)
        if on_ambiguous == "raise":
            break
    if not holding:
        findings.append(f"no printed branch condition of case {which} holds")
    rep = _fallback(e, findings)
    for br in tried:
        findings.append(_compare(br, rep))
        findings.extend(_probe(which, e, q, br))
    rep.findings = findings + rep.findings
    rep.extra["printed_branch"] = tried[0].tag if tried else None
    rep.extra["solved_by"] = rep.label
    rep.detail = rep.label
    rep.branch = "Fallback"
    return rep


def _fallback(e: TwoSetEnsemble, findings: list) -> SolveReport:
    """Axial qubit solver first; the enclosing-ball solver when no axial branch certifies."""
    try:
        return solve_qubit_two_sets(e)
    except NoBranchCertifies:
        findings.append("no axial branch certifies (the ensemble is not axially covariant)")
    return solve_qubit_general(e)


def _compare(br: Branch, rep: SolveReport) -> str:
    gap = rep.p_opt - br.p
    if abs(gap) <= VALUE_TOL:
        return f"printed value {br.p:.12g} is optimal but its element formulas are not"
    return f"printed value {br.p:.12g} differs from the certified optimum {rep.p_opt:.12g} by {gap:.3e}"


def _probe(which, e, q, br: Branch) -> list[str]:
    """Known suspect coefficients: report whether a corrected formula certifies."""
    if which == 3 and br.tag == "2eta":
        fixed = Branch(br.tag, True, br.p,
                       lambda p: (_tilted(q.xy, 1.0, 0.0), _tilted(q.xy_p, 1.0, 0.0)))
        cand = Candidate("Special3", br.p, "2eta")
        evaluate(e, [cand], {id(cand): _build(e, q, fixed)})
        if cand.certified:
            return ["with coefficient 1 instead of 1/2 on the first-set elements the printed POVM certifies"]
    return []
