from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import qmat


@dataclass(frozen=True, eq=False)
class Povm:
    """Measurement with one outcome per state, unprimed outcomes first.

    The weight/shape split ``Pi_j = lambda_j pi_j`` uses ``lambda_j = Tr(Pi_j)/d``
    so the weights sum to one whenever the elements resolve the identity.
    """

    elements: np.ndarray  # (N, d, d)
    n: int

    def __post_init__(self):
        el = np.array(self.elements, dtype=np.complex128)
        if el.ndim != 3 or el.shape[1] != el.shape[2]:
            raise ValueError(f"POVM elements must be a stack of square matrices, got {el.shape}")
        if not 0 <= self.n <= len(el):
            raise ValueError("split index out of range")
        el.setflags(write=False)
        object.__setattr__(self, "elements", el)

    @classmethod
    def from_sets(cls, first, second) -> "Povm":
        first, second = list(first), list(second)
        return cls(np.array(first + second), len(first))

    @property
    def N(self) -> int:
        return len(self.elements)

    @property
    def d(self) -> int:
        return self.elements.shape[1]

    @property
    def first(self) -> np.ndarray:
        return self.elements[: self.n]

    @property
    def second(self) -> np.ndarray:
        return self.elements[self.n:]

    @property
    def weights(self) -> np.ndarray:
        return np.real(np.trace(self.elements, axis1=1, axis2=2)) / self.d

    @property
    def shapes(self) -> np.ndarray:
        w = self.weights
        out = np.zeros_like(self.elements)
        nz = w > 0
        out[nz] = self.elements[nz] / w[nz, None, None]
        return out

    def completeness_residual(self) -> float:
        return float(np.linalg.norm(self.elements.sum(axis=0) - np.eye(self.d), 2))

    def psd_deficit(self) -> float:
        return max(qmat.psd_deficit(qmat.herm_part(p)) for p in self.elements)

    def conjugated(self, v: np.ndarray) -> "Povm":
        return Povm(v @ self.elements @ qmat.dagger(v), self.n)

    def bloch_components(self, G) -> np.ndarray:
        """(N, 2m+1) array of ``Tr(Pi_j g_i)`` for a gamma set ``G``."""
        return np.array([np.real(np.einsum("iab,ba->i", G.gammas, p)) for p in self.elements])
