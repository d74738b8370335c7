"""Small dense complex Hermitian matrix kernel.

Matrices are plain ``numpy.ndarray`` of ``complex128``; nothing here mutates
its inputs.  Eigendecompositions go through the cyclic Jacobi kernel in
:mod:`medkit.kernels` rather than LAPACK so both backends give the same
answers to rounding.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from . import kernels
from ._config import TOL
from .errors import ConvergenceFailure, NonHermitian

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)


class EigenPair(NamedTuple):
    values: np.ndarray
    vectors: np.ndarray


def as_cmat(m) -> np.ndarray:
    a = np.array(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def herm_part(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + dagger(m))


def hermiticity_residual(m: np.ndarray) -> float:
    return float(np.linalg.norm(m - dagger(m)))


def is_hermitian(m: np.ndarray, rtol: float | None = None) -> bool:
    rtol = TOL.hermitian if rtol is None else rtol
    return hermiticity_residual(m) <= rtol * float(np.linalg.norm(m))


def require_hermitian(m: np.ndarray, rtol: float | None = None) -> None:
    if not is_hermitian(m, rtol):
        raise NonHermitian(
            f"matrix is not Hermitian: |M - M^H| = {hermiticity_residual(m):.3e}, |M| = {np.linalg.norm(m):.3e}"
        )


def eig_herm(m, rtol: float | None = None) -> EigenPair:
    """Ascending eigenvalues and orthonormal eigenvectors of a Hermitian matrix."""
    a = as_cmat(m)
    require_hermitian(a, rtol)
    w, v, sweeps = kernels.jacobi_eigh(np.ascontiguousarray(a))
    if sweeps < 0:
        raise ConvergenceFailure("Jacobi iteration did not converge")
    return EigenPair(np.asarray(w), np.asarray(v))


def min_eig(m) -> float:
    return float(eig_herm(m).values[0])


def max_eig(m) -> float:
    return float(eig_herm(m).values[-1])


def psd_check(m, tol: float = 1e-10) -> bool:
    return min_eig(m) >= -tol


def psd_deficit(m) -> float:
    """``max(0, -lambda_min)``; zero for positive semidefinite input."""
    return max(0.0, -min_eig(m))


def expi_herm(h) -> np.ndarray:
    """``exp(iH)`` for Hermitian ``H`` via its eigendecomposition."""
    w, v = eig_herm(h)
    return (v * np.exp(1j * w)) @ dagger(v)


def inv_sqrt_psd(m, cutoff: float = 1e-12) -> np.ndarray:
    """Pseudo-inverse square root on the support of a PSD matrix."""
    w, v = eig_herm(m)
    top = w[-1] if w.size else 0.0
    inv = np.zeros_like(w)
    keep = w > cutoff * top
    inv[keep] = 1.0 / np.sqrt(w[keep])
    return (v * inv) @ dagger(v)


def sqrt_psd(m) -> np.ndarray:
    w, v = eig_herm(m)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ dagger(v)


def is_unitary(u: np.ndarray, tol: float = 1e-10) -> bool:
    d = u.shape[0]
    return float(np.linalg.norm(dagger(u) @ u - np.eye(d))) <= tol


def conj_by(u: np.ndarray, m: np.ndarray) -> np.ndarray:
    return u @ m @ dagger(u)


def qubit_state(bloch) -> np.ndarray:
    x, y, z = bloch
    return 0.5 * (np.eye(2) + x * SIGMA_X + y * SIGMA_Y + z * SIGMA_Z)


def qubit_bloch(rho: np.ndarray) -> np.ndarray:
    return np.array([np.trace(rho @ s).real for s in PAULIS])
