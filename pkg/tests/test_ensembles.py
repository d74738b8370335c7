import numpy as np
import pytest

from medkit import qmat
from medkit.blochdirac import dirac_gammas
from medkit.ensembles import (
    TwoSetEnsemble,
    build_qubit_zrotation_ensemble,
    build_spinor_ensemble,
    invariant_index_sets,
    irreducibility_test,
    make_states,
    spinor_unitary,
)
from medkit.errors import InvalidEnsemble, NonHermitianExponent, PriorMismatch

from _factories import random_ensemble


def test_identity_unitaries_copy_seed():
    rho = np.diag([0.7, 0.3]).astype(complex)
    e = TwoSetEnsemble(0.25, 0.25, rho, rho, [np.eye(2)] * 2, [np.eye(2)] * 2)
    first, second = make_states(e)
    assert all(np.allclose(r, rho) for r in first + second)


def test_half_turn_and_trine():
    e = build_qubit_zrotation_ensemble(0.25, 0.25, [1, 0, 0], [0, 1, 0], [0, np.pi], [0, np.pi])
    first, _ = make_states(e)
    assert np.allclose(qmat.qubit_bloch(first[1]), [-1, 0, 0], atol=1e-12)
    e = build_qubit_zrotation_ensemble(0.25, 0.25, [1, 0, 0], [0, 0, 1],
                                       [0, 2 * np.pi / 3, 4 * np.pi / 3], [0])
    vs = np.array([qmat.qubit_bloch(r) for r in make_states(e)[0]])
    assert np.allclose(vs.sum(axis=0), 0, atol=1e-12)
    assert np.allclose(np.linalg.norm(vs, axis=1), 1)


def test_zrotation_keeps_nz():
    seed = np.array([0.3, 0.4, 0.5])
    e = build_qubit_zrotation_ensemble(0.2, 0.2, seed, [0, 0, 1], [0, 1.0, 2.5], [0, 0.7])
    for r in make_states(e)[0]:
        assert abs(qmat.qubit_bloch(r)[2] - 0.5) <= 1e-12


def test_prior_mismatch():
    with pytest.raises(PriorMismatch):
        build_qubit_zrotation_ensemble(0.3, 0.3, [1, 0, 0], [0, 1, 0], [0, np.pi], [0, np.pi])


def test_first_angle_must_be_zero():
    with pytest.raises(InvalidEnsemble):
        build_qubit_zrotation_ensemble(0.25, 0.25, [1, 0, 0], [0, 1, 0], [0.1, np.pi], [0, np.pi])


def test_spectrum_preserved():
    rng = np.random.default_rng(2)
    for d in (2, 3, 4):
        e = random_ensemble(d, rng)
        ref = np.linalg.eigvalsh(e.rho1)
        for r in make_states(e)[0]:
            assert np.allclose(np.linalg.eigvalsh(r), ref, atol=1e-10)


def test_spinor_quarter_turn_is_z_rotation():
    G = dirac_gammas(1)
    u = spinor_unitary(G, {(0, 1): np.pi / 4})
    rho = qmat.qubit_state([1, 0, 0])
    assert np.allclose(qmat.qubit_bloch(u @ rho @ u.conj().T), [0, 1, 0], atol=1e-12)


def test_spinor_zero_and_unitary():
    G = dirac_gammas(2)
    assert np.allclose(spinor_unitary(G, {}), np.eye(4))
    rng = np.random.default_rng(0)
    th = rng.normal(size=(5, 5))
    u = spinor_unitary(G, th - th.T)
    assert qmat.is_unitary(u)
    with pytest.raises(NonHermitianExponent):
        spinor_unitary(G, {(0, 1): 0.3j})


def test_spinor_first_table_must_vanish():
    G = dirac_gammas(1)
    with pytest.raises(InvalidEnsemble):
        build_spinor_ensemble(G, 0.5, 0.5, [0, 0, 1], [1, 0, 0], [{(0, 1): 0.1}], [{}])


def test_irreducibility():
    assert irreducibility_test([np.eye(2), qmat.SIGMA_X, qmat.SIGMA_Z]).commutant_dim == 1
    assert irreducibility_test([np.eye(2), qmat.SIGMA_X, qmat.SIGMA_Y, qmat.SIGMA_Z]).is_irreducible
    rep = irreducibility_test([np.eye(2), qmat.SIGMA_Z])
    assert rep.commutant_dim == 2 and not rep.is_irreducible
    assert irreducibility_test([np.eye(3)]).commutant_dim == 9


def test_invariant_indices():
    G1 = dirac_gammas(1)
    rep = invariant_index_sets([np.eye(2), qmat.expi_herm(-0.4 * qmat.SIGMA_Z)], G1)
    assert set(rep.invariant_indices) == {2} and set(rep.variant_indices) == {0, 1}
    assert set(invariant_index_sets([np.eye(2)], G1).invariant_indices) == {0, 1, 2}
    G2 = dirac_gammas(2)
    u = spinor_unitary(G2, {(0, 1): 0.37})
    assert set(invariant_index_sets([np.eye(4), u], G2).invariant_indices) == {2, 3, 4}
