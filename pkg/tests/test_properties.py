import numpy as np
from hypothesis import given, settings, strategies as st

from medkit import certificate, solve, success_probability
from medkit.certify import RESIDUAL_KEYS
from medkit.oracle import _random_povm

from _factories import pauli_irreducible, random_ensemble, random_unitary, zrotation_instance

seeds = st.integers(0, 2**32 - 1)
SLOW = settings(max_examples=25, deadline=None)


def instance(kind, rng):
    return pauli_irreducible(rng) if kind == "pauli" else zrotation_instance(rng)


kinds = st.sampled_from(["pauli", "zrot"])


@SLOW
@given(kinds, seeds)
def test_optimum_is_conjugation_invariant(kind, seed):
    rng = np.random.default_rng(seed)
    e = instance(kind, rng)
    V = random_unitary(2, rng)
    a = solve(e)
    b = solve(e.conjugated(V))
    assert abs(a.p_opt - b.p_opt) <= 1e-10


@SLOW
@given(kinds, seeds)
def test_optimum_beats_guessing(kind, seed):
    e = instance(kind, np.random.default_rng(seed))
    p = solve(e).p_opt
    assert p >= max(e.eta, e.eta_prime) - 1e-12
    assert p <= 1 + 1e-12


@SLOW
@given(kinds, seeds)
def test_certificate_is_covariant(kind, seed):
    rng = np.random.default_rng(seed)
    e = instance(kind, rng)
    r = solve(e)
    V = random_unitary(2, rng)
    c = certificate(e.conjugated(V), r.povm.conjugated(V), r.p_opt)
    assert c.certified
    for k in RESIDUAL_KEYS:
        assert abs(c.residuals[k] - r.certificate.residuals[k]) <= 1e-10, k


@SLOW
@given(kinds, seeds)
def test_no_measurement_beats_the_optimum(kind, seed):
    rng = np.random.default_rng(seed)
    e = instance(kind, rng)
    p = solve(e).p_opt
    from medkit import Povm
    for _ in range(5):
        P = Povm(_random_povm(e.N, e.d, rng), e.n)
        assert success_probability(e, P) <= p + 1e-9


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_success_probability_is_conjugation_invariant(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.choice([2, 3, 4]))
    e = random_ensemble(d, rng)
    from medkit import Povm
    P = Povm(_random_povm(e.N, d, rng), e.n)
    V = random_unitary(d, rng)
    assert abs(success_probability(e, P) - success_probability(e.conjugated(V), P.conjugated(V))) <= 1e-12
