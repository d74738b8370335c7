"""Minimum-error discrimination of two sets of similarity-transformed states."""

from .blochdirac import GammaSet, GeneralizedBlochState, bloch_to_state, dirac_gammas, state_to_bloch
from .certify import OptimalityCertificate, build_M, certificate, success_probability
from .closedform import SOLVERS, SolveReport, solve
from .ensembles import (
    TwoSetEnsemble,
    build_qubit_zrotation_ensemble,
    build_spinor_ensemble,
    irreducibility_test,
    invariant_index_sets,
)
from .errors import MedkitError
from .oracle import OracleResult, med_fixed_point, random_restart_ascent
from .povm import Povm
from .simulate import SimResult, monte_carlo_success

__version__ = "0.1.0"

__all__ = [
    "GammaSet",
    "GeneralizedBlochState",
    "MedkitError",
    "OptimalityCertificate",
    "OracleResult",
    "Povm",
    "SOLVERS",
    "SimResult",
    "SolveReport",
    "TwoSetEnsemble",
    "bloch_to_state",
    "build_M",
    "build_qubit_zrotation_ensemble",
    "build_spinor_ensemble",
    "certificate",
    "dirac_gammas",
    "invariant_index_sets",
    "irreducibility_test",
    "med_fixed_point",
    "monte_carlo_success",
    "random_restart_ascent",
    "solve",
    "state_to_bloch",
    "success_probability",
]
