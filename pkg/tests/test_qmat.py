import numpy as np
import pytest

from medkit import qmat
from medkit.errors import NonHermitian


def test_eig_diagonal():
    w, v = qmat.eig_herm(np.diag([1.0, 2.0]))
    assert np.allclose(w, [1, 2])
    assert np.allclose(np.abs(v), np.eye(2))


def test_eig_pauli_x():
    w, _ = qmat.eig_herm(qmat.SIGMA_X)
    assert np.allclose(w, [-1, 1])


@pytest.mark.parametrize("d", [2, 3, 4, 8, 16])
def test_eig_reconstruction(d):
    rng = np.random.default_rng(d)
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    h = a + a.conj().T
    w, v = qmat.eig_herm(h)
    assert np.all(np.diff(w) >= 0)
    assert np.linalg.norm(h - (v * w) @ v.conj().T) <= 1e-10 * np.linalg.norm(h)
    assert np.linalg.norm(v.conj().T @ v - np.eye(d)) <= 1e-10


def test_eig_rejects_non_hermitian():
    with pytest.raises(NonHermitian):
        qmat.eig_herm(np.array([[0, 1], [0, 0]], dtype=complex))


def test_psd_check():
    assert qmat.psd_check(np.eye(2), 1e-9)
    assert not qmat.psd_check(np.diag([1.0, -0.5]), 1e-9)
    assert qmat.psd_check(np.diag([1.0, 0.0]), 1e-9)


def test_psd_monotone_in_identity_shift():
    m = np.diag([1.0, -1e-11])
    assert qmat.psd_check(m, 1e-10)
    assert qmat.psd_check(m + 0.3 * np.eye(2), 1e-10)


def test_expi_zero_and_pauli_y():
    assert np.allclose(qmat.expi_herm(np.zeros((2, 2))), np.eye(2))
    # exp(i t sigma_y) = cos t I + i sin t sigma_y
    u = qmat.expi_herm(np.pi / 2 * qmat.SIGMA_Y)
    assert np.allclose(u, 1j * qmat.SIGMA_Y, atol=1e-12)


def test_expi_inverse():
    rng = np.random.default_rng(3)
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    h = a + a.conj().T
    u = qmat.expi_herm(h)
    assert np.linalg.norm(u @ qmat.expi_herm(-h) - np.eye(4)) <= 1e-10
    assert qmat.is_unitary(u)


def test_inv_sqrt_on_support():
    m = np.diag([4.0, 0.0])
    assert np.allclose(qmat.inv_sqrt_psd(m), np.diag([0.5, 0.0]))
