"""Shared linear algebra: validation, fixed points, norms, vectorization.

Stochastic matrices are column-stochastic and act on the left, so a
probability vector evolves as ``mu -> M @ mu``.  Density matrices are
vectorized column-major, ``vec(rho)[i + d*j] = rho[i, j]``; under this
ordering ``vec(A rho B) = kron(B.T, A) @ vec(rho)``.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "ValidationError",
    "ConvergenceError",
    "FixedPointReport",
    "as_stochastic",
    "as_prob_vector",
    "as_density",
    "pf_fixed_point",
    "quantum_pf_fixed_point",
    "superoperator",
    "trace_norm",
    "vec",
    "unvec",
    "vec2",
    "unvec2",
    "random_stochastic",
    "random_unitary",
    "random_density",
]

STOCHASTIC_ATOL = 1e-12


class ValidationError(ValueError):
    """Input violates a structural invariant."""


class ConvergenceError(RuntimeError):
    """A fixed point was requested but the iteration did not certify one."""


@dataclass(frozen=True)
class FixedPointReport:
    """Outcome of a multi-start fixed-point iteration.

    Attributes
    ----------
    result : ndarray
        Probability vector or density matrix.  Meaningful only when
        ``converged`` is true; otherwise the iterate from the first start.
    iterations : int
        Number of applications of the map that the result represents.
    residual : float
        ``||M x - x||_1`` (trace norm in the quantum case) of ``result``.
    converged : bool
    """

    result: np.ndarray
    iterations: int
    residual: float
    converged: bool


def as_stochastic(M, atol=STOCHASTIC_ATOL):
    """Return ``M`` as a float array after checking it is column-stochastic."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise ValidationError(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValidationError("matrix has non-finite entries")
    if M.min() < -atol:
        i, j = np.unravel_index(np.argmin(M), M.shape)
        raise ValidationError(f"negative entry {M[i, j]:.3g} at ({i}, {j})")
    sums = M.sum(axis=0)
    bad = np.flatnonzero(np.abs(sums - 1.0) > atol)
    if bad.size:
        raise ValidationError(
            f"column {bad[0]} sums to {sums[bad[0]]!r}, not 1")
    return M


def as_prob_vector(mu, atol=STOCHASTIC_ATOL):
    mu = np.asarray(mu, dtype=float)
    if mu.ndim != 1 or mu.size == 0:
        raise ValidationError("probability vector must be 1-d and nonempty")
    if mu.min() < -atol or abs(mu.sum() - 1.0) > atol:
        raise ValidationError("entries must be nonnegative and sum to 1")
    return mu


def as_density(rho, atol=1e-12, psd_atol=1e-10):
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValidationError(f"density matrix must be square, got {rho.shape}")
    if np.abs(rho - rho.conj().T).max() > atol:
        raise ValidationError("density matrix is not Hermitian")
    if np.linalg.eigvalsh(rho).min() < -psd_atol:
        raise ValidationError("density matrix has a negative eigenvalue")
    return rho


def _spread(X, dist):
    s = X.shape[-1]
    worst = 0.0
    for a in range(s):
        for b in range(a + 1, s):
            worst = max(worst, dist(X[..., a], X[..., b]))
    return worst


def _square_until(P, X0, correct, tol, max_iter, dist, residual):
    """Evaluate P^(2^k) X0 for k = 0, 1, ... until the starts agree.

    ``correct`` restores the conservation law (column sums, trace) that
    rounding slowly erodes across squarings.
    """
    iterations = 1
    X = P @ X0
    while True:
        res = max(residual(X[:, c]) for c in range(X.shape[1]))
        if res <= tol and _spread(X, dist) <= tol:
            return X, iterations, True
        if 2 * iterations > max_iter:
            return X, iterations, False
        P2 = correct(P @ P)
        if np.abs(P2 - P).max() <= 1e-15:
            # the powers have stopped moving without merging the starts:
            # a periodic or reducible map
            return X, iterations, False
        P = P2
        iterations *= 2
        X = P @ X0


POLISH_STEPS = 64


def pf_fixed_point(M, tol=1e-10, max_iter=100_000, starts=None, seed=0):
    """Perron-Frobenius vector of a column-stochastic matrix.

    The map is iterated from several starting distributions: the uniform
    vector, then the basis vectors, then seeded random ones.  Iterates are
    taken at powers of two by repeated squaring, so ``iterations`` in the
    report is always a power of two.

    Parameters
    ----------
    M : (d, d) array_like
        Column-stochastic matrix.
    tol : float
        Bound on both the residual ``||M nu - nu||_1`` and the largest
        pairwise distance between the iterates of different starts.
    max_iter : int
        Largest number of applications of ``M`` represented.
    starts : int, optional
        Number of starting vectors, at least 2.  Defaults to ``d + 1``.
    seed : int
        Seed for starts beyond the basis vectors.

    Returns
    -------
    FixedPointReport
    """
    M = as_stochastic(M)
    d = M.shape[0]
    if starts is None:
        starts = d + 1
    if starts < 2:
        raise ValidationError("need at least two starting vectors")
    if tol <= 0 or max_iter < 1:
        raise ValidationError("tol and max_iter must be positive")
    X0 = [np.full(d, 1.0 / d)] + [np.eye(d)[i] for i in range(d)]
    rng = np.random.default_rng(seed)
    while len(X0) < starts:
        X0.append(rng.dirichlet(np.ones(d)))
    X0 = np.column_stack(X0[:starts])

    def correct(P):
        P = np.clip(P, 0.0, None)
        return P / P.sum(axis=0)

    def residual(x):
        return float(np.abs(M @ x - x).sum())

    X, iterations, ok = _square_until(
        M, X0, correct, tol, max_iter,
        lambda a, b: float(np.abs(a - b).sum()), residual)
    nu = X[:, 0]
    if ok:
        # plain steps damp the rounding left over from squaring
        for _ in range(POLISH_STEPS):
            nu = np.clip(M @ nu, 0.0, None)
            nu = nu / nu.sum()
    return FixedPointReport(nu, iterations, residual(nu), ok)


def superoperator(channel: Callable, dim):
    """Matrix of a linear map on dim x dim matrices in column-major vec form."""
    S = np.empty((dim * dim, dim * dim), dtype=complex)
    for j in range(dim):
        for i in range(dim):
            E = np.zeros((dim, dim), dtype=complex)
            E[i, j] = 1.0
            S[:, i + dim * j] = vec(np.asarray(channel(E), dtype=complex))
    return S


def quantum_pf_fixed_point(channel, dim, tol=1e-10, max_iter=100_000,
                           starts=None, seed=0):
    """Unique attracting state of a trace-preserving channel.

    Same contract as :func:`pf_fixed_point`, iterating on density matrices
    from the maximally mixed state, the basis projectors and seeded random
    pure states, with distances in trace norm.

    Parameters
    ----------
    channel : callable
        Linear map taking and returning (dim, dim) arrays.
    dim : int

    Returns
    -------
    FixedPointReport
        ``result`` is a (dim, dim) density matrix.
    """
    S = superoperator(channel, dim)
    one = vec(np.eye(dim))
    # trace preservation: tr channel(E_ij) = delta_ij
    if np.abs(one @ S - one).max() > 1e-9:
        raise ValidationError("channel does not preserve the trace")
    if starts is None:
        starts = dim + 1
    if starts < 2:
        raise ValidationError("need at least two starting states")
    rng = np.random.default_rng(seed)
    X0 = [np.eye(dim) / dim]
    for i in range(dim):
        P = np.zeros((dim, dim))
        P[i, i] = 1.0
        X0.append(P)
    while len(X0) < starts:
        psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        psi /= np.linalg.norm(psi)
        X0.append(np.outer(psi, psi.conj()))
    X0 = np.column_stack([vec(x) for x in X0[:starts]])
    fix = np.outer(vec(np.eye(dim) / dim), one)

    def correct(P):
        return P + fix @ (np.eye(dim * dim) - P)

    def as_state(x):
        rho = unvec(x)
        rho = 0.5 * (rho + rho.conj().T)
        return rho / np.trace(rho).real

    def residual(x):
        rho = as_state(x)
        return trace_norm(unvec(S @ vec(rho)) - rho)

    X, iterations, ok = _square_until(
        S, X0, correct, tol, max_iter,
        lambda a, b: trace_norm(as_state(a) - as_state(b)), residual)
    sigma = as_state(X[:, 0])
    return FixedPointReport(sigma, iterations, residual(vec(sigma)), ok)


def trace_norm(A):
    """Sum of singular values of a square matrix."""
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValidationError(f"trace norm needs a square matrix, got {A.shape}")
    return float(np.linalg.svd(A, compute_uv=False).sum())


def vec(A):
    """Column-major vectorization."""
    return np.asarray(A).reshape(-1, order="F")


def unvec(x, dim=None):
    x = np.asarray(x)
    if dim is None:
        dim = int(round(np.sqrt(x.size)))
    if dim * dim != x.size:
        raise ValidationError(f"cannot reshape {x.size} entries into a square")
    return x.reshape(dim, dim, order="F")


def vec2(rho):
    """(rho11, rho21, rho12, rho22) for a 2x2 matrix."""
    rho = np.asarray(rho)
    if rho.shape != (2, 2):
        raise ValidationError(f"vec2 needs a 2x2 matrix, got {rho.shape}")
    return vec(rho)


def unvec2(x):
    x = np.asarray(x)
    if x.shape != (4,):
        raise ValidationError(f"unvec2 needs 4 entries, got shape {x.shape}")
    return unvec(x, 2)


def random_stochastic(rng, dim, sparsity=0.0):
    """Column-stochastic matrix with Dirichlet(1) columns.

    With ``sparsity > 0`` each entry is zeroed with that probability (at
    least one entry per column survives), which produces reducible and
    periodic examples as well.
    """
    M = rng.dirichlet(np.ones(dim), size=dim).T
    if sparsity > 0:
        mask = rng.random((dim, dim)) >= sparsity
        mask[rng.integers(dim, size=dim), np.arange(dim)] = True
        M = M * mask
        M /= M.sum(axis=0)
    return M


def random_unitary(rng, dim):
    """Haar unitary from the QR decomposition of a complex Gaussian matrix."""
    Z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    Q, R = np.linalg.qr(Z)
    d = np.diagonal(R)
    return Q * (d / np.abs(d))


def random_density(rng, dim, rank=None):
    rank = dim if rank is None else rank
    A = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = A @ A.conj().T
    return rho / np.trace(rho).real
