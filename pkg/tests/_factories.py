"""Random ensemble generators shared by the test modules."""

from __future__ import annotations

import itertools

import numpy as np

from medkit import TwoSetEnsemble, build_qubit_zrotation_ensemble, build_spinor_ensemble, dirac_gammas
from medkit import qmat


def random_unitary(d, rng):
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_density(d, rng, rank=None):
    rank = d if rank is None else rank
    a = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def random_unit(k, rng):
    v = rng.normal(size=k)
    return v / np.linalg.norm(v)


def split_priors(n, n_p, rng, lo=0.05, hi=0.95):
    """``eta`` drawn so the first set carries a fraction in [lo, hi] of the mass."""
    eta = rng.uniform(lo, hi) / n
    return eta, (1 - n * eta) / n_p


def random_ensemble(d, rng, max_states=3):
    n, n_p = (int(k) for k in rng.integers(1, max_states + 1, size=2))
    eta, eta_p = split_priors(n, n_p, rng)
    us = [np.eye(d)] + [random_unitary(d, rng) for _ in range(n - 1)]
    us_p = [np.eye(d)] + [random_unitary(d, rng) for _ in range(n_p - 1)]
    return TwoSetEnsemble(eta, eta_p, random_density(d, rng), random_density(d, rng), us, us_p)


PAULI_GROUP = [np.eye(2), qmat.SIGMA_X, qmat.SIGMA_Y, qmat.SIGMA_Z]


def pauli_irreducible(rng):
    """Both sets are the Pauli group acting on random mixed seeds."""
    eta, eta_p = split_priors(4, 4, rng)
    seed = qmat.qubit_state(rng.uniform(0.05, 1.0) * random_unit(3, rng))
    seed_p = qmat.qubit_state(rng.uniform(0.05, 1.0) * random_unit(3, rng))
    return TwoSetEnsemble(eta, eta_p, seed, seed_p, PAULI_GROUP, PAULI_GROUP)


def polygon(n, offset=0.0):
    return [0.0] + [offset + 2 * np.pi * k / n for k in range(1, n)]


def zrotation_instance(rng, max_states=4):
    """Regular-polygon z-rotation sets with random seeds and priors."""
    n, n_p = (int(k) for k in rng.integers(2, max_states + 1, size=2))
    eta, eta_p = split_priors(n, n_p, rng)
    seed = rng.uniform(0.1, 1.0) * random_unit(3, rng)
    seed_p = rng.uniform(0.1, 1.0) * random_unit(3, rng)
    return build_qubit_zrotation_ensemble(eta, eta_p, seed, seed_p, polygon(n), polygon(n_p))


def even_subsets(k):
    for r in range(0, k + 1, 2):
        yield from itertools.combinations(range(k), r)


def sign_flip_tables(m):
    """Theta tables for the spinors that flip an even set of Bloch components.

    A subset is split into disjoint pairs ``(i, k)``; ``theta = pi/2`` on each
    turns the (i, k) plane by pi.  The resulting group acts irreducibly.
    """
    tables = []
    for S in even_subsets(2 * m + 1):
        tables.append({(S[j], S[j + 1]): np.pi / 2 for j in range(0, len(S), 2)})
    return tables


def mqubit_irreducible(rng, m=2):
    G = dirac_gammas(m)
    tables = sign_flip_tables(m)
    n = len(tables)
    eta, eta_p = split_priors(n, n, rng)
    seed = rng.uniform(0.0, 1.0) * random_unit(G.count, rng)
    seed_p = rng.uniform(0.0, 1.0) * random_unit(G.count, rng)
    return build_spinor_ensemble(G, eta, eta_p, seed, seed_p, tables, tables)


def plane_rotations(n, planes):
    """Regular n-gon of spinor rotations turning every listed plane together."""
    return [{p: np.pi * k / n for p in planes} for k in range(n)]


def mqubit_reducible(rng, m=2, offaxis=True):
    """Both sets turn the (1, 2) plane; the shared invariant span is {3, 4, 5}.

    With ``offaxis`` the primed seed has weight on two invariant directions
    relative to the first seed, so the frame has ``n'_1 != 0``.
    """
    G = dirac_gammas(m)
    n, n_p = (int(k) for k in rng.integers(2, 5, size=2))
    eta, eta_p = split_priors(n, n_p, rng)
    v = np.zeros(G.count)
    v[[0, 1, 2]] = random_unit(3, rng)
    vp = np.zeros(G.count)
    idx = [0, 1, 2, 3] if offaxis else [0, 1, 2]
    vp[idx] = random_unit(len(idx), rng)
    b, bp = rng.uniform(0.1, 1.0, size=2)
    return build_spinor_ensemble(G, eta, eta_p, b * v, bp * vp,
                                 plane_rotations(n, [(0, 1)]), plane_rotations(n_p, [(0, 1)]))
