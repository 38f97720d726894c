"""Independent reference computations used by the tests.

Each oracle takes a different route from the library: dense eigensolvers
instead of power iteration, path enumeration instead of matrix powers,
explicit Kraus sums instead of superoperators.
"""

from itertools import product

import numpy as np


def stationary_eig(M):
    """Stationary vector of a column-stochastic matrix via ``numpy.linalg.eig``."""
    w, V = np.linalg.eig(np.asarray(M, dtype=float))
    k = np.argmin(abs(w - 1))
    x = np.real(V[:, k])
    return x / x.sum()


def trace_norm_eig(A):
    ev = np.linalg.eigvalsh(A.conj().T @ A)
    return float(np.sqrt(np.clip(ev, 0, None)).sum())


def hidden_paths(A, At, mu, n):
    """Probability of a win at round n, summing every branch sequence."""
    total = 0.0
    for labels in product((0, 1), repeat=n - 1):
        x = np.asarray(mu, dtype=float)
        for c in labels:
            x = (A if c == 0 else At) @ x
        total += (A @ x).sum()
    return float(total)


def kraus_apply(ops, rho):
    return sum(K @ rho @ K.conj().T for K in ops)


def quantum_paths(kA, kAt, rho, n):
    """Round-n win probability by expanding the branch tree."""
    total = 0.0
    for labels in product((0, 1), repeat=n - 1):
        r = rho
        for c in labels:
            r = kraus_apply(kA if c == 0 else kAt, r)
        total += np.trace(kraus_apply(kA, r)).real
    return float(total)


def channel_iterate(kA, kAt, rho, n):
    """Win probability after n plain channel steps from ``rho``."""
    ops = list(kA) + list(kAt)
    for _ in range(n):
        rho = kraus_apply(ops, rho)
    return float(np.trace(kraus_apply(kA, rho)).real)


def geo_direct(eta, psi, xi, theta):
    """``<eta g, g>`` on the great circle, built without the B matrix."""
    ov = np.vdot(xi, psi)
    xh = xi * (ov / abs(ov)) if abs(ov) > 1e-14 else xi
    delta = np.arccos(min(1.0, abs(np.vdot(psi, xh))))
    g = (np.sin(delta - theta) * psi + np.sin(theta) * xh) / np.sin(delta)
    return float(np.vdot(g, eta @ g).real)


def three_state_s0(p, P, Pp, eps):
    """Closed-form combined value at s = 0."""
    return eps / (p * (1 - p) / 2 + eps * (p / P + (1 - p) / Pp))


def three_state_s1(p, P, Pp, eps):
    """Closed-form combined value at s = 1."""
    num = 2 * eps * (1 / P - 1 - eps + eps * p) * (p / P + (1 - p) / Pp - 1 - eps * p)
    return 1 / (1 + num / (p * (1 - p) + 2 * eps * (1 / P - 1 - eps)))
