"""Two sets of equiprobable similarity-transformed states.

An ensemble holds two seed density matrices and, for each, a list of
unitaries whose first element is the identity.  State ``j`` of the first
set is ``U_j rho_1 U_j^H`` with prior ``eta``; the primed set likewise with
``eta_prime``.  The priors satisfy ``n * eta + n' * eta' = 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

from . import qmat
from ._config import TOL
from .blochdirac import GammaSet, GeneralizedBlochState, bloch_to_state, dirac_gammas
from .errors import DimensionMismatch, InvalidEnsemble, NonHermitianExponent, PriorMismatch


@dataclass(frozen=True, eq=False)
class TwoSetEnsemble:
    eta: float
    eta_prime: float
    rho1: np.ndarray
    rho1_prime: np.ndarray
    unitaries: np.ndarray
    unitaries_prime: np.ndarray
    meta: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        rho1 = qmat.as_cmat(self.rho1)
        rho1p = qmat.as_cmat(self.rho1_prime)
        d = rho1.shape[0]
        if rho1p.shape != rho1.shape:
            raise DimensionMismatch(f"seed dimensions differ: {rho1.shape} vs {rho1p.shape}")
        us = _unitary_stack(self.unitaries, d, "unitaries")
        usp = _unitary_stack(self.unitaries_prime, d, "unitaries_prime")
        for name, rho in (("rho1", rho1), ("rho1_prime", rho1p)):
            _check_density(rho, name)
        if self.eta < 0 or self.eta_prime < 0:
            raise PriorMismatch("priors must be nonnegative")
        total = len(us) * self.eta + len(usp) * self.eta_prime
        if abs(total - 1.0) > TOL.construction:
            raise PriorMismatch(
                f"priors violate the normalisation n*eta + n'*eta' = 1 (got {total!r})"
            )
        for name, val in (("rho1", rho1), ("rho1_prime", rho1p), ("unitaries", us), ("unitaries_prime", usp)):
            val.setflags(write=False)
            object.__setattr__(self, name, val)
        object.__setattr__(self, "eta", float(self.eta))
        object.__setattr__(self, "eta_prime", float(self.eta_prime))

    @property
    def d(self) -> int:
        return self.rho1.shape[0]

    @property
    def n(self) -> int:
        return len(self.unitaries)

    @property
    def n_prime(self) -> int:
        return len(self.unitaries_prime)

    @property
    def N(self) -> int:
        return self.n + self.n_prime

    @property
    def priors(self) -> np.ndarray:
        return np.r_[np.full(self.n, self.eta), np.full(self.n_prime, self.eta_prime)]

    @cached_property
    def states(self) -> np.ndarray:
        """All N states stacked, unprimed first."""
        first, second = make_states(self)
        return np.array(first + second)

    @property
    def weighted_states(self) -> np.ndarray:
        return self.priors[:, None, None] * self.states

    @property
    def all_unitaries(self) -> np.ndarray:
        return np.concatenate([self.unitaries, self.unitaries_prime])

    def conjugated(self, v: np.ndarray) -> "TwoSetEnsemble":
        """The same problem in the basis rotated by a fixed unitary ``v``."""
        vh = qmat.dagger(v)
        return TwoSetEnsemble(
            self.eta, self.eta_prime,
            v @ self.rho1 @ vh, v @ self.rho1_prime @ vh,
            v @ self.unitaries @ vh, v @ self.unitaries_prime @ vh,
            meta=dict(self.meta),
        )


def _unitary_stack(us, d: int, name: str) -> np.ndarray:
    arr = np.array(us, dtype=np.complex128)
    if arr.ndim != 3 or arr.shape[1:] != (d, d) or len(arr) < 1:
        raise DimensionMismatch(f"{name} must be a non-empty stack of {d}x{d} matrices, got {arr.shape}")
    if np.linalg.norm(arr[0] - np.eye(d)) > TOL.construction:
        raise InvalidEnsemble(f"{name}[0] must be the identity")
    arr[0] = np.eye(d)
    for k, u in enumerate(arr):
        if not qmat.is_unitary(u, TOL.algebraic):
            raise InvalidEnsemble(f"{name}[{k}] is not unitary")
    return arr


def _check_density(rho: np.ndarray, name: str) -> None:
    if not qmat.is_hermitian(rho):
        raise InvalidEnsemble(f"{name} is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > TOL.algebraic:
        raise InvalidEnsemble(f"{name} does not have unit trace")
    if not qmat.psd_check(rho, TOL.algebraic):
        raise InvalidEnsemble(f"{name} is not positive semidefinite")


def make_states(e: TwoSetEnsemble) -> tuple[list[np.ndarray], list[np.ndarray]]:
    first = [qmat.conj_by(u, e.rho1) for u in e.unitaries]
    second = [qmat.conj_by(u, e.rho1_prime) for u in e.unitaries_prime]
    return first, second


def z_rotation(angle: float) -> np.ndarray:
    """``exp(-i angle sigma_z / 2)``: turns Bloch vectors by ``angle`` about z."""
    return qmat.expi_herm(-0.5 * angle * qmat.SIGMA_Z)


def _as_bloch(seed, m: int) -> GeneralizedBlochState:
    if isinstance(seed, GeneralizedBlochState):
        if seed.m != m:
            raise DimensionMismatch(f"seed has m = {seed.m}, expected {m}")
        return seed
    return GeneralizedBlochState.from_vector(m, seed)


def build_qubit_zrotation_ensemble(
    eta: float,
    eta_prime: float,
    seed,
    seed_prime,
    angles: Sequence[float],
    angles_prime: Sequence[float],
) -> TwoSetEnsemble:
    """Qubit ensemble whose sets are generated by rotations about the z axis.

    ``seed``/``seed_prime`` are :class:`GeneralizedBlochState` with m = 1 or
    plain Bloch vectors; each angle list starts with 0.
    """
    G = dirac_gammas(1)
    s, sp = _as_bloch(seed, 1), _as_bloch(seed_prime, 1)
    for name, ang in (("angles", angles), ("angles_prime", angles_prime)):
        if len(ang) < 1 or ang[0] != 0:
            raise InvalidEnsemble(f"{name} must start with 0 (U_1 = I)")
    total = len(angles) * eta + len(angles_prime) * eta_prime
    if abs(total - 1.0) > TOL.construction:
        raise PriorMismatch(f"priors violate n*eta + n'*eta' = 1 (got {total!r})")
    return TwoSetEnsemble(
        eta, eta_prime,
        bloch_to_state(s, G), bloch_to_state(sp, G),
        [z_rotation(a) for a in angles], [z_rotation(a) for a in angles_prime],
        meta={"kind": "zrot", "seed": s, "seed_prime": sp,
              "angles": list(map(float, angles)), "angles_prime": list(map(float, angles_prime))},
    )


ThetaTable = Mapping[tuple[int, int], float] | np.ndarray


def theta_matrix(table: ThetaTable, count: int) -> np.ndarray:
    """Normalise a theta table to an antisymmetric ``count x count`` array.

    Accepts a mapping ``{(i, k): theta}`` with 0-based indices or a full
    array, which must already be antisymmetric.
    """
    if isinstance(table, Mapping):
        # complex angles are kept so the exponent check can reject them
        th = np.zeros((count, count), dtype=np.result_type(float, *table.values()))
        for (i, k), val in table.items():
            if i == k or not (0 <= i < count and 0 <= k < count):
                raise InvalidEnsemble(f"bad theta index pair {(i, k)}")
            th[i, k] += val
            th[k, i] -= val
        return th
    th = np.asarray(table)
    if th.shape != (count, count):
        raise DimensionMismatch(f"theta table must be {count}x{count}, got {th.shape}")
    if np.abs(th + th.T).max() > TOL.construction:
        raise InvalidEnsemble("theta table is not antisymmetric")
    return th


def spinor_unitary(G: GammaSet, table: ThetaTable) -> np.ndarray:
    """``exp(i H)`` with ``H = i sum_{i<k} theta_ik g_i g_k``.

    For real theta, ``g_i g_k`` is anti-Hermitian so ``H`` is Hermitian and
    the result is the spinor rotation by angle ``2 theta_ik`` in the (i, k)
    plane.
    """
    th = theta_matrix(table, G.count)
    H = np.zeros((G.dim, G.dim), dtype=complex)
    for i in range(G.count):
        for k in range(i + 1, G.count):
            if th[i, k] != 0:
                H += 1j * th[i, k] * (G[i] @ G[k])
    if not qmat.is_hermitian(H, TOL.algebraic):
        raise NonHermitianExponent("spinor exponent is not Hermitian (complex angles?)")
    return qmat.expi_herm(H)


def build_spinor_ensemble(
    G: GammaSet,
    eta: float,
    eta_prime: float,
    seed,
    seed_prime,
    theta_tables: Sequence[ThetaTable],
    theta_tables_prime: Sequence[ThetaTable],
) -> TwoSetEnsemble:
    s, sp = _as_bloch(seed, G.m), _as_bloch(seed_prime, G.m)
    for name, tables in (("theta_tables", theta_tables), ("theta_tables_prime", theta_tables_prime)):
        if len(tables) < 1 or np.any(theta_matrix(tables[0], G.count) != 0):
            raise InvalidEnsemble(f"{name}[0] must be all zero (U_1 = I)")
    return TwoSetEnsemble(
        eta, eta_prime,
        bloch_to_state(s, G), bloch_to_state(sp, G),
        [spinor_unitary(G, t) for t in theta_tables],
        [spinor_unitary(G, t) for t in theta_tables_prime],
        meta={"kind": "spinor", "m": G.m, "seed": s, "seed_prime": sp},
    )


@dataclass(frozen=True)
class IrreducibilityReport:
    commutant_dim: int
    is_irreducible: bool
    invariant_indices: tuple[int, ...] | None = None
    variant_indices: tuple[int, ...] | None = None


def commutant_dimension(unitaries, rel_cutoff: float | None = None) -> int:
    """Dimension of ``{X : U X = X U for all U}``.

    Row-major vectorisation turns ``U X - X U`` into ``(U (x) I - I (x) U^T) vec X``;
    the commutant is the joint null space of the stacked maps.
    """
    rel_cutoff = TOL.nullspace if rel_cutoff is None else rel_cutoff
    us = np.asarray(unitaries, dtype=complex)
    d = us.shape[-1]
    eye = np.eye(d)
    K = np.concatenate([np.kron(u, eye) - np.kron(eye, u.T) for u in us])
    sv = np.linalg.svd(K, compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return d * d
    return int(d * d - np.count_nonzero(sv > rel_cutoff * sv[0]))


def irreducibility_test(unitaries) -> IrreducibilityReport:
    dim = commutant_dimension(unitaries)
    return IrreducibilityReport(dim, dim == 1)


def invariant_index_sets(unitaries, G: GammaSet) -> IrreducibilityReport:
    """Split gamma indices (0-based) into those fixed by every ``U`` and the rest."""
    us = np.asarray(unitaries, dtype=complex)
    if us.shape[-1] != G.dim:
        raise DimensionMismatch(f"unitaries act on dimension {us.shape[-1]}, gammas on {G.dim}")
    inv, var = [], []
    for i in range(G.count):
        fixed = all(np.linalg.norm(qmat.conj_by(u, G[i]) - G[i]) <= TOL.algebraic for u in us)
        (inv if fixed else var).append(i)
    dim = commutant_dimension(us)
    return IrreducibilityReport(dim, dim == 1, tuple(inv), tuple(var))
