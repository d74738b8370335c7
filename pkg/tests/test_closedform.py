import numpy as np
import pytest

from medkit import qmat
from medkit.blochdirac import dirac_gammas
from medkit.closedform import (
    SOLVERS,
    FrameParams,
    coefficient_audit,
    derived_coefficients,
    enclosing_ball,
    printed_coefficients,
    solve,
    solve_irreducible,
    solve_mqubit_irreducible,
    solve_mqubit_reducible,
    solve_qubit_general,
    solve_qubit_two_sets,
    solve_special_case,
    special_case_ensemble,
)
from medkit.closedform.report import quadratic_roots
from medkit.closedform.weights import recover_weights, system_from_operators
from medkit.ensembles import TwoSetEnsemble, build_qubit_zrotation_ensemble, build_spinor_ensemble
from medkit.errors import (
    CoefficientMismatch,
    ConditionAmbiguous,
    GeometryUnsupported,
    Infeasible,
    NotIrreducible,
    WeightInfeasible,
)
from medkit.oracle import med_fixed_point

from _factories import mqubit_reducible, plane_rotations, polygon

PAULI_SETS = ([np.eye(2), qmat.SIGMA_X, qmat.SIGMA_Z], [np.eye(2), qmat.SIGMA_Y, qmat.SIGMA_Z])


def oracle_p(e):
    res = med_fixed_point(e, gap=1e-8)
    assert res.converged
    return res.p_lower


def pauli_pair(eta, eta_p, v, vp):
    return TwoSetEnsemble(eta, eta_p, qmat.qubit_state(v), qmat.qubit_state(vp), *PAULI_SETS)


# irreducible ------------------------------------------------------------------

def test_irreducible_pauli_example():
    v = np.ones(3) / np.sqrt(3)
    e = pauli_pair(1 / 6, 1 / 6, v, v)
    rep = solve_irreducible(e)
    assert rep.p_opt == pytest.approx(1 / 3, abs=1e-12)
    assert rep.label == "Irreducible" and rep.certificate.certified
    assert abs(rep.p_opt - oracle_p(e)) <= 1e-6


def test_irreducible_mixed_seeds():
    e = TwoSetEnsemble(0.2, 0.4 / 3, np.eye(2) / 2, np.eye(2) / 2, *PAULI_SETS)
    rep = solve_irreducible(e)
    assert rep.p_opt == pytest.approx(0.2)


def test_irreducible_losing_set_is_idle():
    e = pauli_pair(1 / 4, 1 / 12, [1, 0, 0], [0, 0, 1])
    rep = solve_irreducible(e)
    assert rep.p_opt == pytest.approx(0.5)
    assert np.abs(rep.povm.second).max() <= 1e-12
    assert abs(rep.p_opt - oracle_p(e)) <= 1e-6


def test_irreducible_bound_not_attainable():
    # three tetrahedron vertices cannot resolve the identity on their own
    v = np.ones(3) / np.sqrt(3)
    e = pauli_pair(1 / 4, 1 / 12, v, v)
    with pytest.raises(WeightInfeasible):
        solve_irreducible(e)
    assert oracle_p(e) < 0.5 - 1e-3


def test_irreducible_requires_irreducible():
    e = build_qubit_zrotation_ensemble(0.25, 0.25, [1, 0, 0], [0, 1, 0], [0, np.pi], [0, np.pi])
    with pytest.raises(NotIrreducible):
        solve_irreducible(e)


# qubit two-set ----------------------------------------------------------------

def test_case2_equatorial():
    e = build_qubit_zrotation_ensemble(0.25, 0.25, [1, 0, 0], [0, 1, 0], [0, np.pi], [0, np.pi])
    rep = solve_qubit_two_sets(e)
    assert rep.branch == "QubitCase2"
    assert rep.p_opt == pytest.approx(0.5, abs=1e-12)
    assert abs(rep.p_opt - oracle_p(e)) <= 1e-6
    assert np.allclose(rep.povm.weights, 0.25)


def test_single_state_branch():
    e = build_qubit_zrotation_ensemble(0.7, 0.1, [0.5, 0, 0], [0, 1, 0], [0], polygon(3))
    rep = solve_qubit_two_sets(e)
    assert rep.p_opt == pytest.approx(0.7)
    assert rep.label == "QubitCase3/single"
    assert np.allclose(rep.povm.elements[0], np.eye(2))
    assert np.abs(rep.povm.second).max() == 0
    assert abs(rep.p_opt - oracle_p(e)) <= 1e-6


def test_random_instance_matches_oracle():
    s, sp = np.sqrt(1 - 0.3**2), np.sqrt(1 - 0.2**2)
    e = build_qubit_zrotation_ensemble(0.2, 0.15, 0.9 * np.array([s, 0, 0.3]),
                                       0.8 * np.array([0, sp, -0.2]), polygon(2), polygon(4))
    rep = solve_qubit_two_sets(e)
    assert abs(rep.p_opt - oracle_p(e)) <= 1e-6
    if rep.branch == "QubitCase1":
        assert rep.p_opt == pytest.approx(max(rep.quadratic.roots()))


def test_geometry_unsupported():
    rng = np.random.default_rng(0)
    from _factories import random_unitary
    e = TwoSetEnsemble(0.25, 0.25, np.diag([1.0, 0]), np.diag([0, 1.0]),
                       [np.eye(2), random_unitary(2, rng)], [np.eye(2), random_unitary(2, rng)])
    with pytest.raises(GeometryUnsupported):
        solve_qubit_two_sets(e)
    rep = solve(e)
    assert abs(rep.p_opt - oracle_p(e)) <= 1e-6


def test_quadratic_roots():
    assert quadratic_roots(1.0, -1.5, 2.0) == pytest.approx([1.0, 0.5])  # p^2 - 1.5p + 0.5
    assert quadratic_roots(0.0, 2.0, 4.0) == pytest.approx([-0.5])
    assert quadratic_roots(1.0, 0.0, 4.0) == []
    assert quadratic_roots(1.0, -1.0, 1.0 + 1e-13) == pytest.approx([0.5])  # clamped double root


def test_enclosing_ball():
    x, R = enclosing_ball(np.array([[0.0, 0, 0], [1.0, 0, 0]]), np.array([0.5, 0.5]))
    assert R == pytest.approx(1.0) and np.allclose(x, [0.5, 0, 0])
    x, R = enclosing_ball(np.array([[0.0, 0, 0], [0.1, 0, 0]]), np.array([1.0, 0.2]))
    assert R == pytest.approx(1.0) and np.allclose(x, 0)


# special families -----------------------------------------------------------

def test_special2_trine():
    e = special_case_ensemble(2, 0.25, 0.0)
    rep = solve_special_case(2, e)
    assert rep.label == "Special2/2eta"
    assert rep.p_opt == pytest.approx(0.5)
    comps = rep.povm.bloch_components(dirac_gammas(1))
    w = rep.povm.weights
    # Pi'_1 is proportional to I + sigma_y; Pi_j to I + n_j.sigma
    assert np.allclose(comps[3], 2 * w[3] * np.array([0, 1, 0]), atol=1e-10)
    vs = np.array([qmat.qubit_bloch(r) for r in e.states[:3]])
    assert np.allclose(comps[:3], 2 * w[:3, None] * vs, atol=1e-10)
    # weights balance: Lambda^(n) + lambda'_1 j = 0 with Lambda^(n) = sum lambda_j n_j
    assert np.allclose((w[:3, None] * vs).sum(axis=0) + w[3] * np.array([0, 1, 0]), 0, atol=1e-10)
    assert abs(rep.p_opt - oracle_p(e)) <= 1e-6


def test_special2_eta_branch_is_reported():
    e = special_case_ensemble(2, 0.25, 0.4)
    rep = solve_special_case(2, e, on_ambiguous="certify")
    assert abs(rep.p_opt - oracle_p(e)) <= 1e-6
    assert rep.branch == "Fallback" or rep.detail != "eta"
    assert any("eta" in f for f in rep.findings)


def test_special3_two_eta_prime():
    e = special_case_ensemble(3, 0.2, 0.6)
    rep = solve_special_case(3, e)
    assert rep.label == "Special3/2eta'"
    assert rep.p_opt == pytest.approx(2 * e.eta_prime)
    assert np.abs(rep.povm.first).max() <= 1e-12
    assert abs(rep.p_opt - oracle_p(e)) <= 1e-6


def test_special_ambiguity_raises():
    rng = np.random.default_rng(0)
    for _ in range(200):
        e = special_case_ensemble(1, rng.uniform(0.05, 0.3), rng.uniform(-0.9, 0.9))
        try:
            solve_special_case(1, e)
        except ConditionAmbiguous as exc:
            assert len(exc.values) >= 2
            return
    pytest.skip("no ambiguous sample drawn")


# m-qubit ----------------------------------------------------------------------

def test_mqubit_irreducible_equal_sets():
    from _factories import sign_flip_tables
    G = dirac_gammas(2)
    t = sign_flip_tables(2)
    n = np.array([1.0, 2, 0, -1, 0]) / np.sqrt(6)
    e = build_spinor_ensemble(G, 1 / 32, 1 / 32, 0.6 * n, 0.6 * n[::-1], t, t)
    rep = solve_mqubit_irreducible(e, G)
    assert rep.p_opt == pytest.approx(1 / 32 * 1.6, abs=1e-12)
    a_max = (1 + 0.6) / 4
    assert abs(1 / 32 * 1.6 - 1 / 32 * a_max * 4) <= 1e-12
    assert solve_irreducible(e).p_opt == pytest.approx(rep.p_opt, abs=1e-12)
    assert abs(rep.p_opt - oracle_p(e)) <= 1e-6


def test_mqubit_irreducible_mixed():
    from _factories import sign_flip_tables
    G = dirac_gammas(2)
    t = sign_flip_tables(2)
    e = build_spinor_ensemble(G, 0.04, 0.0225, [0, 0, 0, 0, 0], [0, 0, 0, 0, 0], t, t)
    assert solve_mqubit_irreducible(e, G).p_opt == pytest.approx(0.04)


def test_mqubit_reduces_to_qubit():
    rng = np.random.default_rng(3)
    G = dirac_gammas(2)
    for _ in range(10):
        n, n_p = (int(k) for k in rng.integers(2, 5, size=2))
        eta = rng.uniform(0.05, 0.95) / n
        eta_p = (1 - n * eta) / n_p
        b, bp = rng.uniform(0.1, 1, size=2)
        nz, nzp = rng.uniform(-0.95, 0.95, size=2)
        ph = rng.uniform(0, 2 * np.pi)
        v = b * np.array([np.sqrt(1 - nz**2), 0, nz])
        vp = bp * np.array([np.sqrt(1 - nzp**2) * np.cos(ph), np.sqrt(1 - nzp**2) * np.sin(ph), nzp])
        q = build_qubit_zrotation_ensemble(eta, eta_p, v, vp, polygon(n), polygon(n_p))
        # same geometry in m = 2: planes (1,2) and (3,4) turn together, gamma_5 plays z
        V, Vp = np.zeros(5), np.zeros(5)
        V[[0, 1, 4]], Vp[[0, 1, 4]] = v, vp
        planes = [(0, 1), (2, 3)]
        e = build_spinor_ensemble(G, eta, eta_p, V, Vp, plane_rotations(n, planes),
                                  plane_rotations(n_p, planes))
        r4 = solve_mqubit_reducible(e, G)
        assert r4.extra["invariant_indices"] == [4]
        assert r4.extra["frame"]["n1_p"] == pytest.approx(0, abs=1e-12)
        assert abs(r4.p_opt - solve_qubit_two_sets(q).p_opt) <= 1e-10


def test_mqubit_reducible_plane():
    rng = np.random.default_rng(8)
    G = dirac_gammas(2)
    for _ in range(5):
        e = mqubit_reducible(rng)
        rep = solve_mqubit_reducible(e, G)
        assert rep.certificate.certified
        assert abs(rep.p_opt - oracle_p(e)) <= 1e-5


def test_mqubit_degenerate():
    G = dirac_gammas(2)
    z = [0, 0, 0, 0, 0]
    e = build_spinor_ensemble(G, 0.3, 0.2, z, z, plane_rotations(2, [(0, 1)]), plane_rotations(2, [(0, 1)]))
    rep = solve_mqubit_reducible(e, G)
    assert rep.p_opt == pytest.approx(0.3)
    assert np.allclose(rep.povm.first.sum(axis=0), np.eye(4))


def test_coefficient_audit():
    q = FrameParams(0.2, 0.15, 0.9, 0.8, 0.3, -0.2, 0.0)
    # with the in-frame gap on a single axis the two only differ through one sign
    audit = coefficient_audit(q)
    assert audit["max_discrepancy"] >= 0
    q0 = FrameParams(0.2, 0.2, 0.9, 0.9, 0.3, 0.0, 0.0)
    a = coefficient_audit(q0)
    assert a["dA"] <= 1e-12 and a["dB"] <= 1e-12 and a["dC"] <= 1e-12
    bad = FrameParams(0.2, 0.15, 0.9, 0.5, 0.3, 0.2, 0.4)
    if coefficient_audit(bad)["max_discrepancy"] > 1e-8:
        with pytest.raises(CoefficientMismatch) as exc:
            coefficient_audit(bad, strict=True)
        assert exc.value.printed is not None and exc.value.derived is not None


def test_derived_quadratic_zero_at_touching():
    rng = np.random.default_rng(1)
    G = dirac_gammas(2)
    e = mqubit_reducible(rng)
    rep = solve_mqubit_reducible(e, G)
    if rep.quadratic is not None and rep.detail.startswith("derived"):
        q = rep.quadratic
        assert abs(q.A * q.root**2 + q.B * q.root + q.C / 4) <= 1e-10


# weights ----------------------------------------------------------------------

def test_weights_symmetric_and_identity():
    G = dirac_gammas(1)
    ops = [np.eye(2) - u * G[0] for u in (1, -1)] + [np.eye(2) - u * G[1] for u in (1, -1)]
    lam, lam_p = recover_weights(system_from_operators(ops, 2))
    assert np.allclose(lam, 0.25) and np.allclose(lam_p, 0.25)
    lam, lam_p = recover_weights(system_from_operators([np.eye(2), np.zeros((2, 2))], 1))
    assert lam == pytest.approx([1.0]) and lam_p == pytest.approx([0.0])
    with pytest.raises(Infeasible):
        recover_weights(system_from_operators([np.eye(2) - G[2]], 1))


def test_dispatch_names():
    e = build_qubit_zrotation_ensemble(0.25, 0.25, [1, 0, 0], [0, 1, 0], [0, np.pi], [0, np.pi])
    for name in ("auto", "qubit", "qubit-general"):
        assert solve(e, name).p_opt == pytest.approx(0.5)
    with pytest.raises(ValueError):
        solve(e, "nope")
    assert set(SOLVERS) >= {"auto", "irreducible", "special1", "mqubit-reducible"}
