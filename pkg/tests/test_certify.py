import numpy as np
import pytest

from medkit import qmat
from medkit.certify import build_M, certificate, conjugate_states, success_probability
from medkit.closedform import solve, solve_irreducible, solve_special_case, special_case_ensemble
from medkit.ensembles import TwoSetEnsemble, build_qubit_zrotation_ensemble
from medkit.errors import DimensionMismatch
from medkit.povm import Povm

from _factories import pauli_irreducible


def identity_first(e):
    el = np.zeros((e.N, e.d, e.d), dtype=complex)
    el[0] = np.eye(e.d)
    return Povm(el, e.n)


def equatorial_2x2():
    return build_qubit_zrotation_ensemble(0.25, 0.25, [1, 0, 0], [0, 1, 0], [0, np.pi], [0, np.pi])


def test_identity_strategy_gives_eta():
    e = build_qubit_zrotation_ensemble(0.7, 0.1, [1, 0, 0], [0, 1, 0], [0], [0, 2.0, 4.0])
    P = identity_first(e)
    assert success_probability(e, P) == pytest.approx(0.7)
    assert np.allclose(build_M(e, P), 0.7 * e.rho1)


def test_orthogonal_pair():
    e = TwoSetEnsemble(0.5, 0.5, np.diag([1.0, 0]), np.diag([0, 1.0]), [np.eye(2)], [np.eye(2)])
    P = Povm(np.array([np.diag([1.0, 0]), np.diag([0, 1.0])]), 1)
    assert success_probability(e, P) == pytest.approx(1.0)
    assert certificate(e, P, 1.0).certified


def test_dimension_mismatch():
    e = equatorial_2x2()
    with pytest.raises(DimensionMismatch):
        success_probability(e, Povm(np.array([np.eye(2)]), 1))


def test_trine_M_hermitian_and_perturbation_rejected():
    e = special_case_ensemble(2, 0.25, 0.0)
    rep = solve_special_case(2, e)
    assert rep.certificate.residuals["M_hermiticity"] <= 1e-10
    rng = np.random.default_rng(0)
    X = rng.normal(size=(e.N, 2, 2)) + 1j * rng.normal(size=(e.N, 2, 2))
    X = X + X.conj().transpose(0, 2, 1)
    X -= X.mean(axis=0)
    P = Povm(rep.povm.elements + 1e-2 * X, e.n)
    cert = certificate(e, P, success_probability(e, P))
    assert not cert.certified


def test_uniform_povm_rejected():
    e = build_qubit_zrotation_ensemble(0.2, 0.2, [0.6, 0, 0.8], [0, 0.5, -0.5], [0, 2.0, 4.0], [0, np.pi])
    P = Povm(np.broadcast_to(np.eye(2) / e.N, (e.N, 2, 2)), e.n)
    cert = certificate(e, P, success_probability(e, P))
    assert cert.residuals["completeness"] <= 1e-12
    assert not cert.certified


def test_case2_conjugate_states_pure():
    rep = solve(equatorial_2x2(), "qubit")
    assert rep.certified if hasattr(rep, "certified") else rep.certificate.certified
    assert rep.certificate.c == pytest.approx(1, abs=1e-9)
    assert rep.certificate.c_prime == pytest.approx(1, abs=1e-9)


def test_p_above_optimum_rejected():
    e = equatorial_2x2()
    rep = solve(e, "qubit")
    cert = certificate(e, rep.povm, rep.p_opt + 1e-3)
    assert not cert.certified


def test_degenerate_flag():
    # 0.7 rho_1 dominates every 0.1 rho'_j, so always guessing state 1 is optimal
    e = build_qubit_zrotation_ensemble(0.7, 0.1, [0.5, 0, 0], [0, 1, 0], [0], [0, 2.0, 4.0])
    P = identity_first(e)
    cert = certificate(e, P, 0.7)
    assert cert.label == "Certified-Degenerate"
    tau, tau_p, flags = conjugate_states(build_M(e, P), e, 0.7)
    assert tau is None and tau_p is not None and flags == (True, False)


def test_irreducible_M_is_scalar():
    rep = solve_irreducible(pauli_irreducible(np.random.default_rng(4)))
    M = qmat.herm_part(rep.certificate.M)
    assert np.linalg.norm(M - rep.p_opt / 2 * np.eye(2)) <= 1e-9
    assert rep.certificate.alpha == pytest.approx(rep.p_opt / 2)


def test_slackness_orthogonality():
    e = equatorial_2x2()
    rep = solve(e, "qubit")
    cert = rep.certificate
    for taus, els in ((cert.tau, rep.povm.first), (cert.tau_prime, rep.povm.second)):
        for t, Pi in zip(taus, els):
            assert abs(np.trace(t @ Pi)) <= 1e-9


def test_report_fields():
    rep = solve(equatorial_2x2(), "qubit")
    text = rep.certificate.report()
    for key in ("completeness", "povm_psd", "tau_psd", "tau_trace", "slackness",
                "M_invariance", "p_consistency"):
        assert key in text
    assert '"status": "Certified"' in rep.certificate.to_json()
