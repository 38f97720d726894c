import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from parrondo.classical import ClassicalGame, classical_limit, make_T
from parrondo.hidden import make_hidden_embedding_3state
from parrondo.linalg import (ConvergenceError, ValidationError, quantum_pf_fixed_point,
                             random_density, vec2)
from parrondo.quantum import (ExtremalParams, QuantumPinceNez, apply_pince_nez,
                              build_wM, combine_quantum, embed_classical,
                              mixed_limit_via_wM, quantum_limit, quantum_limit_via_wM,
                              quantum_win_prob, random_extremal_params, random_pince_nez)

from oracles import channel_iterate, kraus_apply, quantum_paths


def test_trace_preservation_enforced():
    with pytest.raises(ValidationError):
        QuantumPinceNez((np.eye(2),), (0.5 * np.eye(2),))


def test_apply_matches_kraus_sums(rng):
    pn = random_pince_nez(rng, 3, 2, 2)
    rho = random_density(rng, 3)
    a, b = apply_pince_nez(pn, rho)
    assert np.allclose(a, kraus_apply(pn.kraus_A, rho), atol=1e-14)
    assert np.allclose(b, kraus_apply(pn.kraus_Atilde, rho), atol=1e-14)
    assert abs(np.trace(a + b) - 1) < 1e-12


def test_win_prob_matches_branch_tree(rng):
    for _ in range(5):
        pn = random_pince_nez(rng, 2, 2, 1)
        rho = random_density(rng, 2)
        for n in (1, 2, 3):
            ref = quantum_paths(pn.kraus_A, pn.kraus_Atilde, rho, n)
            assert abs(quantum_win_prob(pn, rho, n) - ref) < 1e-12


def test_limit_matches_long_iteration(rng):
    for _ in range(10):
        pn = random_pince_nez(rng, 2)
        ref = channel_iterate(pn.kraus_A, pn.kraus_Atilde, np.eye(2) / 2, 10_000)
        assert abs(quantum_limit(pn) - ref) < 1e-9
        assert abs(quantum_win_prob(pn, np.eye(2) / 2, 10_000) - ref) < 1e-9


def test_limit_raises_without_unique_state():
    pn = QuantumPinceNez((np.diag([1.0, 0.0]),), (np.diag([0.0, 1.0]),))
    with pytest.raises(ConvergenceError):
        quantum_limit(pn, max_iter=10_000)


def test_combined_branches_are_convex_mixture(rng):
    pn, pn2 = random_pince_nez(rng, 2, 1, 2), random_pince_nez(rng, 2, 2, 1)
    mix = combine_quantum(pn, pn2, 0.3)
    for _ in range(100):
        rho = random_density(rng, 2)
        got = apply_pince_nez(mix, rho)
        for g, x, y in zip(got, apply_pince_nez(pn, rho), apply_pince_nez(pn2, rho)):
            assert np.abs(g - (0.3 * x + 0.7 * y)).max() < 1e-13


def test_combine_endpoints_drop_absent_game(rng):
    pn, pn2 = random_pince_nez(rng, 2), random_pince_nez(rng, 2)
    assert len(combine_quantum(pn, pn2, 1.0).kraus_A) == 1
    assert len(combine_quantum(pn, pn2, 0.0).kraus_A) == 1


def test_wM_bottom_row_and_functional(rng):
    for _ in range(20):
        par = random_extremal_params(rng)
        wm = build_wM(par)
        assert np.array_equal(wm.M[3], [1, 0, 0, 1])
        u, v = par.u, par.v
        ref = [abs(u[0]) ** 2 + abs(u[1]) ** 2,
               np.conj(u[0]) * v[0] + np.conj(u[1]) * v[1],
               u[0] * np.conj(v[0]) + u[1] * np.conj(v[1]),
               abs(v[0]) ** 2 + abs(v[1]) ** 2]
        assert np.allclose(wm.w, ref, atol=1e-15)


def test_wM_near_basis_params():
    th = 1e-3
    u = np.array([np.cos(th), 0, np.sin(th), 0])
    v = np.array([0, 0, 0, 1.0])
    w = build_wM(ExtremalParams(u, v)).w
    assert np.allclose(w, [np.cos(th) ** 2, 0, 0, 0], atol=1e-15)


def test_wM_solution_is_fixed_state(rng):
    for _ in range(50):
        par = random_extremal_params(rng)
        pn = par.pince_nez()
        rep = quantum_pf_fixed_point(pn.channel, 2)
        if not rep.converged:
            continue
        x = np.linalg.solve(build_wM(par).M, [0, 0, 0, 1])
        assert np.abs(x - vec2(rep.result)).max() < 1e-8


def test_wM_value_matches_channel(rng):
    for _ in range(50):
        par = random_extremal_params(rng)
        J, K = par.kraus()
        ref = channel_iterate((J,), (K,), np.eye(2) / 2, 20_000)
        assert abs(quantum_limit_via_wM(par) - ref) < 1e-6


def test_mixed_wM_matches_combined_channel(rng):
    for _ in range(20):
        a, b = random_extremal_params(rng), random_extremal_params(rng)
        p = rng.random()
        ref = quantum_limit(combine_quantum(a.pince_nez(), b.pince_nez(), p))
        assert abs(mixed_limit_via_wM(a, b, p) - ref) < 1e-8


def test_wM_singular_raises():
    par = ExtremalParams([1, 0, 0, 0], [0, 1, 0, 0])  # identity channel
    with pytest.raises(ConvergenceError):
        quantum_limit_via_wM(par)


def test_block_embedding_reproduces_T():
    first, _ = make_hidden_embedding_3state(0.7, 0.6, 0.01, 0.3)
    q = embed_classical(first.branch_A, first.branch_Atilde)
    ref = classical_limit(ClassicalGame(make_T(0.7, 0.01, 0.3), (0,), np.ones(3) / 3))
    assert abs(quantum_limit(q) - ref) < 1e-9
    assert abs(ref - 0.7) < 1e-9


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_embedding_on_diagonal_states(seed):
    rng = np.random.default_rng(seed)
    N = rng.dirichlet([1, 1, 1], size=3).T
    split = rng.random((3, 3))
    q = embed_classical(split * N, (1 - split) * N)
    mu = rng.dirichlet([1, 1, 1])
    a, b = apply_pince_nez(q, np.diag(mu))
    assert np.allclose(a, np.diag((split * N) @ mu), atol=1e-14)
    assert np.allclose(b, np.diag(((1 - split) * N) @ mu), atol=1e-14)
