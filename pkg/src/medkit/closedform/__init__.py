"""Closed-form solvers.  Each returns a certified :class:`SolveReport`."""

from __future__ import annotations

import numpy as np

from ..blochdirac import dirac_gammas
from ..ensembles import TwoSetEnsemble, irreducibility_test
from ..errors import (
    GeometryUnsupported,
    NoBranchCertifies,
    OutsideFamily,
    WeightInfeasible,
)
from .irreducible import solve_irreducible, solve_mqubit_irreducible
from .mqubit import (
    FrameDecomposition,
    FrameParams,
    coefficient_audit,
    derived_coefficients,
    printed_coefficients,
    solve_mqubit_reducible,
)
from .qubit import solve_qubit_two_sets
from .qubit_general import enclosing_ball, solve_qubit_general
from .report import BRANCHES, Candidate, Quadratic, SolveReport
from .special import solve_special_case, special_case_ensemble
from .weights import WeightConstraintSystem, recover_weights

SOLVERS = (
    "auto",
    "irreducible",
    "qubit",
    "qubit-general",
    "special1",
    "special2",
    "special3",
    "mqubit-irreducible",
    "mqubit-reducible",
)


def _both_irreducible(e: TwoSetEnsemble) -> bool:
    return (irreducibility_test(e.unitaries).is_irreducible
            and irreducibility_test(e.unitaries_prime).is_irreducible)


def _gammas_for(e: TwoSetEnsemble):
    m = int(round(np.log2(e.d)))
    return dirac_gammas(m) if 2 ** m == e.d and m >= 1 else None


def solve(e: TwoSetEnsemble, solver: str = "auto") -> SolveReport:
    """Pick a solver from the ensemble's structure, or use the one named.

    ``auto`` for qubits tries the irreducible formula, then the axial
    two-set closed forms, then the enclosing-ball solver; for ``d = 2**m``
    Bloch ensembles it uses the m-qubit solvers; otherwise the irreducible
    formula.
    """
    if solver not in SOLVERS:
        raise ValueError(f"unknown solver {solver!r}; expected one of {SOLVERS}")
    if solver == "irreducible":
        return solve_irreducible(e)
    if solver == "qubit":
        return solve_qubit_two_sets(e)
    if solver == "qubit-general":
        return solve_qubit_general(e)
    if solver.startswith("special"):
        return solve_special_case(int(solver[-1]), e)
    if solver == "mqubit-irreducible":
        return solve_mqubit_irreducible(e, _gammas_for(e))
    if solver == "mqubit-reducible":
        return solve_mqubit_reducible(e, _gammas_for(e))

    irreducible = _both_irreducible(e)
    if e.d == 2:
        if irreducible:
            try:
                return solve_irreducible(e)
            except (WeightInfeasible, NoBranchCertifies):
                pass
        try:
            return solve_qubit_two_sets(e)
        except (GeometryUnsupported, NoBranchCertifies):
            return solve_qubit_general(e)
    G = _gammas_for(e)
    if G is not None:
        try:
            if irreducible:
                return solve_mqubit_irreducible(e, G)
            return solve_mqubit_reducible(e, G)
        except OutsideFamily:
            pass
    if irreducible:
        return solve_irreducible(e)
    raise GeometryUnsupported(
        "no closed form applies: the sets are reducible and the states are not Bloch states"
    )


__all__ = [
    "BRANCHES",
    "Candidate",
    "FrameDecomposition",
    "FrameParams",
    "Quadratic",
    "SOLVERS",
    "SolveReport",
    "WeightConstraintSystem",
    "coefficient_audit",
    "derived_coefficients",
    "enclosing_ball",
    "printed_coefficients",
    "recover_weights",
    "solve",
    "solve_irreducible",
    "solve_mqubit_irreducible",
    "solve_mqubit_reducible",
    "solve_qubit_general",
    "solve_qubit_two_sets",
    "solve_special_case",
    "special_case_ensemble",
]
