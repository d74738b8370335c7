"""Dirac gamma matrices in dimension 2**m and generalized Bloch states.

The gammas are built recursively.  For m = 1 they are the Pauli matrices;
going from m to m + 1 every existing gamma is tensored as ``sigma_x (x) g``
and ``sigma_y (x) I``, ``sigma_z (x) I`` are appended.  All entries are
0, +-1 or +-i, so the Clifford relations hold exactly in floating point.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import qmat
from ._config import TOL
from .errors import DimensionMismatch, DimensionTooLarge, OutsideFamily, ZeroRadius

MAX_M = 4


@dataclass(frozen=True)
class GammaSet:
    m: int
    gammas: np.ndarray = field(repr=False)  # (2m+1, 2**m, 2**m)

    @property
    def dim(self) -> int:
        return 2 ** self.m

    @property
    def count(self) -> int:
        return 2 * self.m + 1

    def __len__(self):
        return self.count

    def __getitem__(self, i):
        return self.gammas[i]

    def dot(self, vec) -> np.ndarray:
        """``sum_i vec[i] * gamma_i``."""
        return np.tensordot(np.asarray(vec, dtype=float), self.gammas, axes=1)

    def components(self, op: np.ndarray) -> np.ndarray:
        """Real coefficients ``Tr(op gamma_i) / 2**m``."""
        return np.real(np.einsum("iab,ba->i", self.gammas, op)) / self.dim


@dataclass(frozen=True)
class GeneralizedBlochState:
    m: int
    a: float
    n: np.ndarray

    def __post_init__(self):
        n = np.asarray(self.n, dtype=float).reshape(-1)
        object.__setattr__(self, "n", n)
        if n.size != 2 * self.m + 1:
            raise DimensionMismatch(f"direction has {n.size} entries, expected {2 * self.m + 1}")
        if abs(np.linalg.norm(n) - 1.0) > TOL.construction:
            raise ValueError(f"direction is not a unit vector (norm {np.linalg.norm(n)!r})")
        if not -TOL.construction <= self.a <= 1.0 + TOL.construction:
            raise ValueError(f"radius must lie in [0, 1], got {self.a}")

    @property
    def vector(self) -> np.ndarray:
        return self.a * self.n

    @classmethod
    def from_vector(cls, m: int, vec) -> "GeneralizedBlochState":
        vec = np.asarray(vec, dtype=float)
        a = float(np.linalg.norm(vec))
        if a == 0.0:
            n = np.zeros(2 * m + 1)
            n[-1] = 1.0
        else:
            n = vec / a
        if a > 1.0 + TOL.outside_family:
            raise OutsideFamily(f"Bloch radius {a:.6f} exceeds 1")
        return cls(m, min(a, 1.0), n)


_GAMMA_CACHE: dict[int, GammaSet] = {}


def dirac_gammas(m: int) -> GammaSet:
    if m < 1:
        raise ValueError("m must be >= 1")
    if m > MAX_M:
        raise DimensionTooLarge(f"m = {m} exceeds the supported maximum {MAX_M} (d <= 16)")
    if m in _GAMMA_CACHE:
        return _GAMMA_CACHE[m]
    gam = [g.copy() for g in qmat.PAULIS]
    for k in range(1, m):
        eye = np.eye(2 ** k, dtype=complex)
        gam = [np.kron(qmat.SIGMA_X, g) for g in gam]
        gam += [np.kron(qmat.SIGMA_Y, eye), np.kron(qmat.SIGMA_Z, eye)]
    arr = np.array(gam)
    arr.setflags(write=False)
    gs = GammaSet(m, arr)
    _GAMMA_CACHE[m] = gs
    return gs


def anticommutator_defect(G: GammaSet) -> float:
    """Largest entry of ``{g_i, g_j} - 2 delta_ij I`` over all pairs."""
    eye = np.eye(G.dim)
    worst = 0.0
    for i in range(G.count):
        for j in range(G.count):
            ac = G[i] @ G[j] + G[j] @ G[i] - (2.0 * eye if i == j else 0.0)
            worst = max(worst, float(np.abs(ac).max()))
    return worst


def bloch_to_state(s: GeneralizedBlochState, G: GammaSet) -> np.ndarray:
    if s.m != G.m:
        raise DimensionMismatch(f"state has m = {s.m}, gamma set has m = {G.m}")
    return (np.eye(G.dim) + s.a * G.dot(s.n)) / G.dim


def state_to_bloch(rho, G: GammaSet) -> GeneralizedBlochState:
    rho = qmat.as_cmat(rho)
    if rho.shape[0] != G.dim:
        raise DimensionMismatch(f"state has dimension {rho.shape[0]}, gamma set has {G.dim}")
    # Tr(rho g_i) = a n_i because Tr(g_i g_j) = 2**m delta_ij
    vec = np.real(np.einsum("iab,ba->i", G.gammas, rho))
    recon = (np.eye(G.dim) + G.dot(vec)) / G.dim
    resid = float(np.linalg.norm(rho - recon))
    if resid > TOL.outside_family:
        raise OutsideFamily(f"state is not of generalized Bloch form (residual {resid:.3e})")
    return GeneralizedBlochState.from_vector(G.m, vec)


def spectral_split(s: GeneralizedBlochState, G: GammaSet) -> tuple[np.ndarray, np.ndarray]:
    """Projectors onto the (1 + a)/2**m and (1 - a)/2**m eigenspaces."""
    if s.m != G.m:
        raise DimensionMismatch(f"state has m = {s.m}, gamma set has m = {G.m}")
    if s.a <= 0.0:
        raise ZeroRadius("direction undefined for a maximally mixed state")
    ng = G.dot(s.n)
    eye = np.eye(G.dim)
    return 0.5 * (eye + ng), 0.5 * (eye - ng)


def random_unit(k: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=k)
    return v / np.linalg.norm(v)
