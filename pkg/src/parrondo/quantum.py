"""Quantum pince-nez games: Kraus branches on density matrices.

Each round applies a trace-preserving channel split into a winning and a
losing completely positive branch, both in Kraus form.  For qubits with a
single Kraus operator per branch the long-run value reduces to a 4x4
linear system (:func:`build_wM`), which is what the region optimizer
explores.
"""

from dataclasses import dataclass

import numpy as np

from .linalg import (ConvergenceError, ValidationError, as_density,
                     quantum_pf_fixed_point, random_unitary, superoperator,
                     unvec, vec)

__all__ = [
    "QuantumPinceNez",
    "ExtremalParams",
    "WMPair",
    "apply_pince_nez",
    "quantum_win_prob",
    "quantum_limit",
    "combine_quantum",
    "build_wM",
    "quantum_limit_via_wM",
    "mixed_limit_via_wM",
    "embed_classical",
    "random_pince_nez",
    "random_extremal_params",
    "branch_superoperators",
]

KRAUS_ATOL = 1e-10


def _as_ops(ops, dim=None):
    out = []
    for K in ops:
        K = np.array(K, dtype=complex)
        if K.ndim != 2 or K.shape[0] != K.shape[1]:
            raise ValidationError(f"Kraus operator must be square, got {K.shape}")
        if dim is not None and K.shape[0] != dim:
            raise ValidationError("Kraus operators have different sizes")
        dim = K.shape[0]
        out.append(K)
    return tuple(out), dim


@dataclass(frozen=True)
class QuantumPinceNez:
    """Kraus lists of the winning and losing branches."""

    kraus_A: tuple
    kraus_Atilde: tuple

    def __post_init__(self):
        A, dim = _as_ops(self.kraus_A)
        B, dim = _as_ops(self.kraus_Atilde, dim)
        if dim is None:
            raise ValidationError("pince-nez needs at least one Kraus operator")
        total = sum((K.conj().T @ K for K in A + B), np.zeros((dim, dim)))
        err = np.abs(total - np.eye(dim)).max()
        if err > KRAUS_ATOL:
            raise ValidationError(
                f"sum of K^dagger K differs from the identity by {err:.2e}")
        object.__setattr__(self, "kraus_A", A)
        object.__setattr__(self, "kraus_Atilde", B)

    @property
    def dim(self):
        return (self.kraus_A + self.kraus_Atilde)[0].shape[0]

    def channel(self, rho):
        """The summed channel applied to ``rho``."""
        a, b = apply_pince_nez(self, rho)
        return a + b


def _branch(ops, rho):
    return sum((K @ rho @ K.conj().T for K in ops), np.zeros_like(rho))


def apply_pince_nez(pn, rho):
    """Return the (unnormalized) winning and losing outputs."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (pn.dim, pn.dim):
        raise ValidationError(
            f"state has shape {rho.shape}, pince-nez acts on dim {pn.dim}")
    return _branch(pn.kraus_A, rho), _branch(pn.kraus_Atilde, rho)


def branch_superoperators(pn):
    """Column-major superoperator matrices of the two branches."""
    d = pn.dim
    return (superoperator(lambda r: _branch(pn.kraus_A, r), d),
            superoperator(lambda r: _branch(pn.kraus_Atilde, r), d))


def quantum_win_prob(pn, rho0, n):
    """Probability that round ``n`` reports the winning branch."""
    if n < 1:
        raise ValidationError("round index starts at 1")
    rho0 = as_density(rho0)
    SA, SB = branch_superoperators(pn)
    x = np.linalg.matrix_power(SA + SB, n - 1) @ vec(rho0)
    return float(np.trace(unvec(SA @ x)).real)


def quantum_limit(pn, tol=1e-10, max_iter=2 ** 40):
    """Long-run winning probability from the channel's attracting state."""
    rep = quantum_pf_fixed_point(pn.channel, pn.dim, tol=tol, max_iter=max_iter)
    if not rep.converged:
        raise ConvergenceError("channel has no unique attracting state")
    a, _ = apply_pince_nez(pn, rep.result)
    return float(np.trace(a).real)


def combine_quantum(pn, pnprime, p):
    """Coin-flip mixture: Kraus operators scaled by sqrt(p), sqrt(1-p)."""
    if not 0 <= p <= 1:
        raise ValidationError("p must lie in [0, 1]")
    if pn.dim != pnprime.dim:
        raise ValidationError("pince-nez act on different dimensions")
    a, b = np.sqrt(p), np.sqrt(1 - p)
    A = [a * K for K in pn.kraus_A] if p > 0 else []
    B = [a * K for K in pn.kraus_Atilde] if p > 0 else []
    if p < 1:
        A += [b * K for K in pnprime.kraus_A]
        B += [b * K for K in pnprime.kraus_Atilde]
    return QuantumPinceNez(tuple(A), tuple(B))


@dataclass(frozen=True)
class ExtremalParams:
    """Two orthonormal complex 4-vectors.

    The winning Kraus operator is ``[[u1, v1], [u2, v2]]`` and the losing
    one ``[[u3, v3], [u4, v4]]``; orthonormality of (u, v) is exactly
    trace preservation.
    """

    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        u = np.array(self.u, dtype=complex).reshape(-1)
        v = np.array(self.v, dtype=complex).reshape(-1)
        if u.shape != (4,) or v.shape != (4,):
            raise ValidationError("u and v must have four entries")
        if (abs(np.vdot(u, u).real - 1) > KRAUS_ATOL
                or abs(np.vdot(v, v).real - 1) > KRAUS_ATOL
                or abs(np.vdot(u, v)) > KRAUS_ATOL):
            raise ValidationError("u, v must be orthonormal")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    @classmethod
    def from_game_array(cls, G):
        G = np.asarray(G)
        return cls(G[:, 0], G[:, 1])

    def game_array(self):
        return np.column_stack([self.u, self.v])

    def kraus(self):
        G = self.game_array()
        return G[0:2].copy(), G[2:4].copy()

    def pince_nez(self):
        J, K = self.kraus()
        return QuantumPinceNez((J,), (K,))


@dataclass(frozen=True)
class WMPair:
    """Row functional ``w`` and matrix ``M`` whose solve gives the limit."""

    w: np.ndarray
    M: np.ndarray

    def __post_init__(self):
        M = np.asarray(self.M, dtype=complex)
        if M.shape != (4, 4) or not np.array_equal(M[3], [1, 0, 0, 1]):
            raise ValidationError("last row of M must be (1, 0, 0, 1)")
        object.__setattr__(self, "w", np.asarray(self.w, dtype=complex))
        object.__setattr__(self, "M", M)

    def mix(self, other, p):
        return WMPair(p * self.w + (1 - p) * other.w,
                      p * self.M + (1 - p) * other.M)

    def value(self, cond_max=1e12):
        """``w M^{-1} e4``; raises ConvergenceError when M is singular."""
        if not np.isfinite(np.linalg.cond(self.M)) or np.linalg.cond(self.M) > cond_max:
            raise ConvergenceError("M is singular: no unique attracting state")
        x = np.linalg.solve(self.M, np.array([0, 0, 0, 1.0]))
        val = self.w @ x
        if abs(val.imag) > 1e-9:
            raise ValidationError(f"value has imaginary part {val.imag:.2e}")
        return float(val.real)


def build_wM(params):
    """Linear system for a single-Kraus qubit game.

    Rows 0-2 of ``M`` are the (1,1), (2,1) and (1,2) entries of
    ``N(rho) - rho`` for the channel ``N``, acting on ``vec2(rho)``; row 3
    imposes unit trace.  ``w`` is the win functional ``tr(J rho J^dagger)``.
    """
    u1, u2, u3, u4 = params.u
    v1, v2, v3, v4 = params.v
    c = np.conj
    w = np.array([abs(u1) ** 2 + abs(u2) ** 2,
                  c(u1) * v1 + c(u2) * v2,
                  u1 * c(v1) + u2 * c(v2),
                  abs(v1) ** 2 + abs(v2) ** 2])
    M = np.array([
        [abs(u1) ** 2 + abs(u3) ** 2 - 1, c(u1) * v1 + c(u3) * v3,
         c(v1) * u1 + c(v3) * u3, abs(v1) ** 2 + abs(v3) ** 2],
        [c(u1) * u2 + c(u3) * u4, c(u1) * v2 + c(u3) * v4 - 1,
         c(v1) * u2 + c(v3) * u4, c(v1) * v2 + c(v3) * v4],
        [c(u2) * u1 + c(u4) * u3, c(u2) * v1 + c(u4) * v3,
         c(v2) * u1 + c(v4) * u3 - 1, c(v2) * v1 + c(v4) * v3],
        [1, 0, 0, 1]])
    return WMPair(w, M)


def quantum_limit_via_wM(params):
    return build_wM(params).value()


def mixed_limit_via_wM(params, params_prime, p):
    return build_wM(params).mix(build_wM(params_prime), p).value()


def embed_classical(branch_A, branch_Atilde):
    """Quantum pince-nez acting on diagonal states like a hidden game.

    Every nonzero entry ``B[i, j]`` becomes the Kraus operator
    ``sqrt(B[i, j]) |i><j|``.
    """
    ops = []
    for B in (np.asarray(branch_A, float), np.asarray(branch_Atilde, float)):
        branch = []
        d = B.shape[0]
        for i, j in zip(*np.nonzero(B)):
            K = np.zeros((d, d), dtype=complex)
            K[i, j] = np.sqrt(B[i, j])
            branch.append(K)
        ops.append(tuple(branch))
    return QuantumPinceNez(*ops)


def random_pince_nez(rng, dim, n_A=1, n_Atilde=1):
    """Random pince-nez from the blocks of a Haar-random isometry."""
    k = n_A + n_Atilde
    V = random_unitary(rng, dim * k)[:, :dim]
    ops = [V[i * dim:(i + 1) * dim] for i in range(k)]
    return QuantumPinceNez(tuple(ops[:n_A]), tuple(ops[n_A:]))


def random_extremal_params(rng):
    V = random_unitary(rng, 4)
    return ExtremalParams(V[:, 0], V[:, 1])
