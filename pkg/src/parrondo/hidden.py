"""Hidden Markov games with back-reaction.

The hidden state is a probability vector; each round the pince-nez splits
the transition into a winning branch and a losing branch, two nonnegative
matrices whose sum ``N`` is column-stochastic.  Only the branch label is
observed.
"""

from dataclasses import dataclass

import numpy as np

from .classical import LIMIT_MAX_ITER, make_T, make_Tprime
from .linalg import (ConvergenceError, ValidationError, as_prob_vector,
                     as_stochastic, pf_fixed_point)

__all__ = [
    "HiddenPinceNez",
    "ReducedHiddenGame",
    "hidden_win_prob",
    "hidden_limit",
    "combine_hidden",
    "hidden_bounds",
    "reduce_pince_nez",
    "reduced_limit",
    "mixed_reduced_value",
    "hidden_region_sample",
    "make_hidden_eps_family",
    "make_hidden_embedding_3state",
]


@dataclass(frozen=True)
class HiddenPinceNez:
    """Winning and losing branch matrices of one round."""

    branch_A: np.ndarray
    branch_Atilde: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.branch_A, dtype=float)
        B = np.asarray(self.branch_Atilde, dtype=float)
        if A.shape != B.shape or A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValidationError("branches must be square and of equal shape")
        if min(A.min(), B.min()) < 0:
            raise ValidationError("branch entries must be nonnegative")
        as_stochastic(A + B)
        object.__setattr__(self, "branch_A", A)
        object.__setattr__(self, "branch_Atilde", B)

    @property
    def transition(self):
        return self.branch_A + self.branch_Atilde

    @property
    def dim(self):
        return self.branch_A.shape[0]


@dataclass(frozen=True)
class ReducedHiddenGame:
    """Two-state hidden game seen through its win functional.

    ``v = 1^T branch_A`` and ``N = [[1-c, d], [c, 1-d]]``; the long-run win
    probability is ``v . pf(N)``.
    """

    v: np.ndarray
    N: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.v, dtype=float)
        if v.shape != (2,) or v.min() < 0 or v.max() > 1:
            raise ValidationError("v must have two entries in [0, 1]")
        N = as_stochastic(self.N)
        if N.shape != (2, 2):
            raise ValidationError("N must be 2x2")
        c, d = N[1, 0], N[0, 1]
        if (c == 0 and d == 0) or (c == 1 and d == 1):
            raise ValidationError(
                f"N with c={c}, d={d} has no unique attracting state")
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "N", N)

    @classmethod
    def from_params(cls, a, b, c, d):
        return cls(np.array([a, b]), np.array([[1 - c, d], [c, 1 - d]]))


def hidden_win_prob(pn, initial, n):
    """Probability that round ``n`` reports the winning branch."""
    if n < 1:
        raise ValidationError("round index starts at 1")
    mu = as_prob_vector(initial)
    x = np.linalg.matrix_power(pn.transition, n - 1) @ mu
    return float((pn.branch_A @ x).sum())


def hidden_limit(pn, tol=1e-10, max_iter=LIMIT_MAX_ITER):
    rep = pf_fixed_point(pn.transition, tol=tol, max_iter=max_iter)
    if not rep.converged:
        raise ConvergenceError("hidden transition has no unique stationary state")
    return float((pn.branch_A @ rep.result).sum())


def combine_hidden(pn, pnprime, p):
    if not 0 <= p <= 1:
        raise ValidationError("p must lie in [0, 1]")
    if pn.dim != pnprime.dim:
        raise ValidationError("pince-nez act on different hidden spaces")
    return HiddenPinceNez(p * pn.branch_A + (1 - p) * pnprime.branch_A,
                          p * pn.branch_Atilde + (1 - p) * pnprime.branch_Atilde)


def hidden_bounds(p, P_A, P_Aprime):
    """Open interval of mixed values reachable by two-state hidden games."""
    lo = min(p * P_A, (1 - p) * P_Aprime)
    hi = max(1 - p + p * P_A, p + (1 - p) * P_Aprime)
    return lo, hi


def reduce_pince_nez(pn):
    """Reduced form of a two-state pince-nez."""
    if pn.dim != 2:
        raise ValidationError("only two-state games have a reduced form")
    return ReducedHiddenGame(pn.branch_A.sum(axis=0), pn.transition)


def reduced_limit(rg, tol=1e-10, max_iter=LIMIT_MAX_ITER):
    rep = pf_fixed_point(rg.N, tol=tol, max_iter=max_iter)
    if not rep.converged:
        raise ConvergenceError("N has no unique stationary state")
    return float(rg.v @ rep.result)


def mixed_reduced_value(p, a, b, c, d, a2, b2, c2, d2):
    """Long-run value of the p-mixture of two reduced games, vectorized.

    Uses the explicit stationary vector ``(d, c) / (c + d)`` of the mixed
    two-state chain.
    """
    q = 1 - p
    num = (p * a + q * a2) * (p * d + q * d2) + (p * b + q * b2) * (p * c + q * c2)
    return num / (p * (c + d) + q * (c2 + d2))


def _draw_constrained(rng, P, n, log_share):
    """Draw reduced parameters with (ad + bc) / (c + d) = P.

    (a, c, d) are drawn and b solved from the linear constraint; draws with
    b outside [0, 1] are rejected.  A ``log_share`` fraction draws c, d
    log-uniformly on [1e-6, 1] so that near-identity chains are visited.
    """
    a = rng.random(n)
    c = rng.random(n)
    d = rng.random(n)
    k = int(round(log_share * n))
    c[:k] = 10.0 ** rng.uniform(-6, 0, k)
    d[:k] = 10.0 ** rng.uniform(-6, 0, k)
    with np.errstate(divide="ignore", invalid="ignore"):
        b = (P * (c + d) - a * d) / c
    keep = (c > 0) & (b >= 0) & (b <= 1) & (c + d > 0)
    return a[keep], b[keep], c[keep], d[keep]


def hidden_region_sample(p, P_A, P_Aprime, samples, seed=0, log_share=0.5,
                         tol=1e-12, chunk=200_000):
    """Sample admissible pairs of reduced games and record mixed values.

    Returns
    -------
    observed_min, observed_max : float
    violations : int
        Samples outside ``hidden_bounds`` by more than ``tol``.
    """
    if samples < 1:
        raise ValidationError("need at least one sample")
    rng = np.random.default_rng(seed)
    lo, hi = hidden_bounds(p, P_A, P_Aprime)
    vmin, vmax, bad, done = np.inf, -np.inf, 0, 0
    while done < samples:
        want = min(chunk, samples - done)
        first = [np.empty(0)] * 4
        second = [np.empty(0)] * 4
        while min(first[0].size, second[0].size) < want:
            f = _draw_constrained(rng, P_A, 2 * want, log_share)
            s = _draw_constrained(rng, P_Aprime, 2 * want, log_share)
            first = [np.concatenate([x, y]) for x, y in zip(first, f)]
            second = [np.concatenate([x, y]) for x, y in zip(second, s)]
        vals = mixed_reduced_value(p, *(x[:want] for x in first),
                                   *(x[:want] for x in second))
        vmin = min(vmin, float(vals.min()))
        vmax = max(vmax, float(vals.max()))
        bad += int(np.count_nonzero((vals < lo - tol) | (vals > hi + tol)))
        done += want
    return vmin, vmax, bad


def make_hidden_eps_family(P_A, P_Aprime, eps, s):
    """Pair of two-state pince-nez sweeping the mixed value across
    ``((1-p) P_Aprime, p + (1-p) P_Aprime)`` as s goes from 0 to 1.

    The first game is nearly frozen (rates of order eps) with win
    functional (1, 0); the second has a constant win signal.  Swap the
    arguments and use ``1 - p`` to sweep the other interval.
    """
    if not 0 < P_A <= 1 or not 0 <= P_Aprime <= 1:
        raise ValidationError("need P_A in (0, 1] and P_Aprime in [0, 1]")
    k = (1 / P_A - 1) * eps
    if not (0 < eps <= 1 and k <= 1):
        raise ValidationError(f"eps={eps} leaves the stochastic range")
    if not 0 <= s <= 1:
        raise ValidationError("s must lie in [0, 1]")
    first = HiddenPinceNez([[1 - k, 0.0], [k, 0.0]], [[0.0, eps], [0.0, 1 - eps]])
    Np = np.array([[(1 + s) / 2, s / 2], [(1 - s) / 2, 1 - s / 2]])
    second = HiddenPinceNez(P_Aprime * Np, (1 - P_Aprime) * Np)
    return first, second


def make_hidden_embedding_3state(P_A, P_Aprime, eps, s):
    """Three-state hidden pair built from ``make_T`` / ``make_Tprime``.

    The winning branch keeps the transitions that land in state 0, the
    losing branch those landing in states 1 and 2.
    """
    keep = np.diag([1.0, 0.0, 0.0])
    rest = np.eye(3) - keep
    T = make_T(P_A, eps, s)
    Tp = make_Tprime(P_Aprime, eps)
    return (HiddenPinceNez(keep @ T, rest @ T),
            HiddenPinceNez(keep @ Tp, rest @ Tp))
