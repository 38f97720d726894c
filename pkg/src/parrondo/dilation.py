"""Unitary dilations of quantum pince-nez games and their inverse.

A pince-nez with Kraus lists ``{J_i}`` (win) and ``{K_i}`` (lose) is
realized by the isometry

    V phi = sum_i |win> (x) J_i phi (x) |i>  +  |lose> (x) K_i phi (x) |i>

into register (x) system (x) environment.  Completing it to a unitary on
system (x) auxiliary, with a fresh auxiliary state each round, and
measuring only the register reproduces the joint law of the observed
branch labels.
"""

from dataclasses import dataclass
from itertools import product

import numpy as np
from scipy.linalg import null_space

from .linalg import ValidationError, as_density
from .quantum import QuantumPinceNez

__all__ = [
    "Dilation",
    "dilate_pince_nez",
    "extract_pince_nez",
    "chain_joint_probs",
    "dilated_joint_probs",
]


@dataclass(frozen=True)
class Dilation:
    """Isometry, its unitary completion and the register projectors.

    Attributes
    ----------
    V : (2*d*m, d) array
        Isometry into register (x) system (x) environment.
    U : (d*a, d*a) array
        Unitary on system (x) auxiliary, ``a = 2*m``, with
        ``U (phi (x) aux0) = `` V phi reordered.
    aux0 : (a,) array
        Fresh auxiliary state, the first basis vector.
    projectors : tuple of two (a, a) arrays
        Win and lose projectors on the auxiliary factor.
    """

    V: np.ndarray
    U: np.ndarray
    aux0: np.ndarray
    projectors: tuple

    @property
    def dim(self):
        return self.V.shape[1]


def dilate_pince_nez(pn):
    """Stinespring isometry of ``pn`` and a unitary completion."""
    if not isinstance(pn, QuantumPinceNez):
        raise ValidationError("expected a QuantumPinceNez")
    d = pn.dim
    m = max(len(pn.kraus_A), len(pn.kraus_Atilde))
    a = 2 * m
    V = np.zeros((2, d, m, d), dtype=complex)
    for r, ops in enumerate((pn.kraus_A, pn.kraus_Atilde)):
        for i, K in enumerate(ops):
            V[r, :, i, :] = K
    V = V.reshape(2 * d * m, d)
    if np.abs(V.conj().T @ V - np.eye(d)).max() > 1e-12:
        raise ValidationError("Kraus lists do not form an isometry")

    # the same isometry as a map into system (x) (register (x) environment)
    W = V.reshape(2, d, m, d).transpose(1, 0, 2, 3).reshape(d * a, d)
    comp = null_space(W.conj().T)
    U = np.empty((d * a, d * a), dtype=complex)
    first = np.arange(d) * a  # columns phi_j (x) aux0
    rest = np.setdiff1d(np.arange(d * a), first)
    U[:, first] = W
    U[:, rest] = comp
    aux0 = np.zeros(a, dtype=complex)
    aux0[0] = 1.0
    win = np.zeros(a)
    win[:m] = 1.0
    proj = (np.diag(win).astype(complex), np.diag(1.0 - win).astype(complex))
    return Dilation(V, U, aux0, proj)


def _check_unitary(U, atol=1e-10):
    U = np.asarray(U, dtype=complex)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise ValidationError("U must be square")
    if np.abs(U.conj().T @ U - np.eye(U.shape[0])).max() > atol:
        raise ValidationError("U is not unitary")
    return U


def _check_aux(U, psi1, projectors):
    psi1 = np.asarray(psi1, dtype=complex).reshape(-1)
    a = psi1.size
    if abs(np.linalg.norm(psi1) - 1) > 1e-10:
        raise ValidationError("auxiliary state must have unit length")
    if U.shape[0] % a:
        raise ValidationError("U does not act on system (x) auxiliary")
    Qs = [np.asarray(Q, dtype=complex) for Q in projectors]
    total = np.zeros((a, a), dtype=complex)
    for Q in Qs:
        if Q.shape != (a, a) or np.abs(Q @ Q - Q).max() > 1e-10 \
                or np.abs(Q - Q.conj().T).max() > 1e-10:
            raise ValidationError("projectors must be orthogonal projections")
        total += Q
    if np.abs(total - np.eye(a)).max() > 1e-10:
        raise ValidationError("projectors must sum to the identity")
    return psi1, Qs


def extract_pince_nez(U, psi1, projectors):
    """Pince-nez induced by one unitary round with a fresh auxiliary state.

    Branch ``C`` maps ``rho`` to the partial trace over the auxiliary of
    ``(I (x) Q_C) U (rho (x) psi1 psi1^*) U^* (I (x) Q_C)``.

    Parameters
    ----------
    U : (d*a, d*a) array
        Unitary on system (x) auxiliary.
    psi1 : (a,) array
        Auxiliary state prepared before each round.
    projectors : pair of (a, a) arrays
        Win and lose projectors on the auxiliary factor.
    """
    U = _check_unitary(U)
    psi1, Qs = _check_aux(U, psi1, projectors)
    if len(Qs) != 2:
        raise ValidationError("need exactly two projectors (win, lose)")
    a = psi1.size
    d = U.shape[0] // a
    # U (I (x) psi1) as a (d, a, d) array: system out, auxiliary out, system in
    Upsi = np.tensordot(U.reshape(d, a, d, a), psi1, axes=([3], [0]))
    branches = []
    for Q in Qs:
        w, F = np.linalg.eigh(Q)
        F = F[:, w > 0.5]
        ops = [np.tensordot(Upsi, f.conj(), axes=([1], [0])) for f in F.T]
        branches.append(tuple(ops) or (np.zeros((d, d), dtype=complex),))
    return QuantumPinceNez(*branches)


def chain_joint_probs(pn, rho0, n):
    """Probabilities of every win/lose sequence over ``n`` rounds.

    Returns
    -------
    ndarray of shape (2,) * n
        Index 0 is a win, 1 a loss, round 1 first.
    """
    rho0 = as_density(rho0)
    out = np.empty((2,) * n)
    ops = (pn.kraus_A, pn.kraus_Atilde)
    for labels in product((0, 1), repeat=n):
        rho = rho0
        for c in labels:
            rho = sum(K @ rho @ K.conj().T for K in ops[c])
        out[labels] = np.trace(rho).real
    return out


def dilated_joint_probs(U, psi1, projectors, rho0, n):
    """Same law from the dilated model: one fresh auxiliary per round,
    all registers kept coherent until a final joint measurement."""
    U = _check_unitary(U)
    psi1, Qs = _check_aux(U, psi1, projectors)
    a = psi1.size
    d = U.shape[0] // a
    rho0 = as_density(rho0)
    if rho0.shape != (d, d):
        raise ValidationError("initial state has the wrong dimension")
    U4 = U.reshape(d, a, d, a)
    lam, E = np.linalg.eigh(rho0)
    out = np.zeros((len(Qs),) * n)
    for weight, e in zip(lam, E.T):
        if weight <= 1e-15:
            continue
        state = e.copy()
        for k in range(n):
            # append auxiliary k, then apply U to (system, auxiliary k)
            state = np.multiply.outer(state, psi1)
            state = np.tensordot(U4, state, axes=([2, 3], [0, k + 1]))
            state = np.moveaxis(state, 1, k + 1)
        for labels in product(range(len(Qs)), repeat=n):
            s = state
            for k, c in enumerate(labels):
                s = np.moveaxis(np.tensordot(Qs[c], s, axes=([1], [k + 1])), 0, k + 1)
            out[labels] += weight * np.vdot(s, s).real
    return out
