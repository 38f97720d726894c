import numpy as np
import pytest

from parrondo.dilation import (chain_joint_probs, dilate_pince_nez, dilated_joint_probs,
                               extract_pince_nez)
from parrondo.linalg import ValidationError, random_density, random_unitary
from parrondo.quantum import apply_pince_nez, random_pince_nez

from oracles import kraus_apply


def test_joint_law_agrees(rng):
    for _ in range(10):
        pn = random_pince_nez(rng, 2, int(rng.integers(1, 3)), int(rng.integers(1, 3)))
        rho = random_density(rng, 2)
        dil = dilate_pince_nez(pn)
        got = dilated_joint_probs(dil.U, dil.aux0, dil.projectors, rho, 3)
        ref = chain_joint_probs(pn, rho, 3)
        assert np.abs(got - ref).max() < 1e-10
        assert abs(ref.sum() - 1) < 1e-12


def test_chain_probs_by_hand(rng):
    pn = random_pince_nez(rng, 2)
    rho = random_density(rng, 2)
    r = kraus_apply(pn.kraus_Atilde, kraus_apply(pn.kraus_A, rho))
    assert abs(chain_joint_probs(pn, rho, 2)[0, 1] - np.trace(r).real) < 1e-14


def test_round_trip_recovers_branches(rng):
    pn = random_pince_nez(rng, 2, 2, 1)
    dil = dilate_pince_nez(pn)
    assert np.abs(dil.U.conj().T @ dil.U - np.eye(dil.U.shape[0])).max() < 1e-12
    back = extract_pince_nez(dil.U, dil.aux0, dil.projectors)
    for _ in range(100):
        rho = random_density(rng, 2)
        for x, y in zip(apply_pince_nez(pn, rho), apply_pince_nez(back, rho)):
            assert np.abs(x - y).max() < 1e-12


def test_extract_from_random_unitary_is_trace_preserving(rng):
    U = random_unitary(rng, 4)
    P0 = np.diag([1.0, 0.0]).astype(complex)
    pn = extract_pince_nez(U, np.array([1, 0]), (P0, np.eye(2) - P0))
    S = sum(K.conj().T @ K for K in pn.kraus_A + pn.kraus_Atilde)
    assert np.abs(S - np.eye(2)).max() < 1e-10


def test_extract_validates_inputs(rng):
    U = random_unitary(rng, 4)
    P0 = np.diag([1.0, 0.0])
    with pytest.raises(ValidationError):
        extract_pince_nez(2 * U, [1, 0], (P0, np.eye(2) - P0))
    with pytest.raises(ValidationError):
        extract_pince_nez(U, [1, 1], (P0, np.eye(2) - P0))
    with pytest.raises(ValidationError):
        extract_pince_nez(U, [1, 0], (P0, P0))
