"""Observed Markov-chain games and their coin-flip mixtures.

A game is a column-stochastic transition matrix ``L``, a set ``A`` of
winning states and an initial distribution ``mu``.  The probability of
being in ``A`` after round ``n`` is ``sum_{i in A} (L^(n-1) mu)_i``.
"""

from dataclasses import dataclass

import numpy as np

from .linalg import (ConvergenceError, ValidationError, as_prob_vector,
                     as_stochastic, pf_fixed_point)

__all__ = [
    "ClassicalGame",
    "RegionPoint",
    "classical_win_prob",
    "classical_limit",
    "combine_classical",
    "make_T",
    "make_Tprime",
    "make_S",
    "make_Sprime",
    "zeta_upper",
    "two_state_stationary",
    "two_state_region_check",
]

# horizon for long-run limits; squaring makes 2**40 rounds cost 40 products
LIMIT_MAX_ITER = 2 ** 40


@dataclass(frozen=True)
class ClassicalGame:
    """Transition matrix, winning states and initial distribution."""

    transition: np.ndarray
    win_states: tuple
    initial: np.ndarray

    def __post_init__(self):
        L = as_stochastic(self.transition)
        d = L.shape[0]
        win = tuple(sorted(set(int(i) for i in self.win_states)))
        if not win or len(win) >= d or win[0] < 0 or win[-1] >= d:
            raise ValidationError(
                f"winning states {win} must be a nonempty strict subset of "
                f"0..{d - 1}")
        mu = as_prob_vector(self.initial)
        if mu.size != d:
            raise ValidationError("initial distribution has the wrong length")
        object.__setattr__(self, "transition", L)
        object.__setattr__(self, "win_states", win)
        object.__setattr__(self, "initial", mu)

    @property
    def dim(self):
        return self.transition.shape[0]


@dataclass(frozen=True)
class RegionPoint:
    """One sample of the allowed region: two single-game values, the mixed
    value and the coin bias."""

    P_A: float
    P_Aprime: float
    P_comb: float
    p: float

    def __post_init__(self):
        for name in ("P_A", "P_Aprime", "P_comb", "p"):
            v = getattr(self, name)
            if not -1e-12 <= v <= 1 + 1e-12:
                raise ValidationError(f"{name}={v} outside [0, 1]")


def classical_win_prob(g, n):
    """Probability of being in the winning set at round ``n`` (n >= 1)."""
    if n < 1:
        raise ValidationError("round index starts at 1")
    x = np.linalg.matrix_power(g.transition, n - 1) @ g.initial
    return float(x[list(g.win_states)].sum())


def classical_limit(g, tol=1e-10, max_iter=LIMIT_MAX_ITER):
    """Long-run winning probability; raises if the chain has no unique
    attracting distribution."""
    rep = pf_fixed_point(g.transition, tol=tol, max_iter=max_iter)
    if not rep.converged:
        raise ConvergenceError(
            f"no unique stationary distribution (residual {rep.residual:.3g} "
            f"after {rep.iterations} rounds)")
    return float(rep.result[list(g.win_states)].sum())


def combine_classical(g, gprime, p):
    """Game played by flipping a p-coin each round between ``g`` and ``gprime``."""
    if not 0 <= p <= 1:
        raise ValidationError("p must lie in [0, 1]")
    if g.dim != gprime.dim:
        raise ValidationError("games act on different state spaces")
    if g.win_states != gprime.win_states:
        raise ValidationError("games use different winning sets")
    L = p * g.transition + (1 - p) * gprime.transition
    return ClassicalGame(L, g.win_states, g.initial)


def _check_entries(M, label):
    M = np.asarray(M, dtype=float)
    for (i, j), v in np.ndenumerate(M):
        if not (np.isfinite(v) and -1e-15 <= v <= 1 + 1e-15):
            raise ValidationError(
                f"{label}: entry ({i}, {j}) = {v!r} is outside [0, 1]")
    return np.clip(M, 0.0, 1.0)


def make_T(P_A, eps, s):
    """Three-state matrix whose stationary first entry is ``P_A`` for every s.

    Raises ValidationError naming the first entry that leaves [0, 1]
    (eps too large for this ``P_A``).
    """
    if not 0 < P_A < 1:
        raise ValidationError("P_A must lie in (0, 1)")
    if not 0 <= s <= 1:
        raise ValidationError("s must lie in [0, 1]")
    if eps <= 0:
        raise ValidationError("eps must be positive")
    denom = 1 - (1 + eps) * P_A
    if denom <= 0:
        raise ValidationError(
            f"entry (2, 1): eps={eps} too large, 1-(1+eps)P_A = {denom:.3g}")
    a = (1 / P_A - 1 - eps) * eps ** 2
    b = P_A * s * eps / denom
    T = [[1 - (1 - s) * eps - a, eps ** 2, 1 - s],
         [a, 1 - b - eps ** 2, s],
         [(1 - s) * eps, b, 0.0]]
    return _check_entries(T, "make_T")


def make_Tprime(P_Aprime, eps):
    if not 0 < P_Aprime < 1:
        raise ValidationError("P_Aprime must lie in (0, 1)")
    if eps <= 0:
        raise ValidationError("eps must be positive")
    a = (1 - P_Aprime) / P_Aprime * eps ** 2
    T = [[1 - a, eps ** 2, 0.5],
         [a, 1 - eps ** 2, 0.5],
         [0.0, 0.0, 0.0]]
    return _check_entries(T, "make_Tprime")


def zeta_upper(P_A):
    """Right end of the admissible interval (0, zeta_max] for ``make_S``."""
    if P_A <= 0:
        return 1.0
    if P_A >= 1:
        return 1.0
    return min(P_A / (1 - P_A), 1.0)


def make_S(P_A, zeta):
    """Two-state matrix with stationary first entry ``P_A``.

    For ``P_A = 0`` the absorbing form ``[[1-zeta, 0], [zeta, 1]]`` is used.
    """
    if not 0 <= P_A <= 1:
        raise ValidationError("P_A must lie in [0, 1]")
    hi = zeta_upper(P_A)
    if not 0 < zeta <= hi * (1 + 1e-12):
        raise ValidationError(f"zeta={zeta} outside (0, {hi}]")
    zeta = min(zeta, hi)
    if P_A == 0:
        return np.array([[1 - zeta, 0.0], [zeta, 1.0]])
    k = (1 / P_A - 1) * zeta
    return np.array([[1 - k, zeta], [k, 1 - zeta]])


make_Sprime = make_S


def two_state_stationary(M):
    """First entry of the stationary vector of 2x2 column-stochastic matrices.

    Works on stacks of shape (..., 2, 2); for ``[[1-x, y], [x, 1-y]]`` the
    stationary vector is ``(y, x) / (x + y)``.
    """
    M = np.asarray(M, dtype=float)
    x = M[..., 1, 0]
    y = M[..., 0, 1]
    return y / (x + y)


def two_state_region_check(P_A, P_Aprime, p, grid, tol=1e-9):
    """Sweep both two-state families and test the naive bound.

    The open left ends of the parameter intervals are pulled in by 1e-6.

    Returns
    -------
    ok : bool
        Every sampled mixed value lies in
        ``[min(P_A, P_Aprime), max(P_A, P_Aprime)]`` up to ``tol``.
    lo, hi : float
        Smallest and largest sampled mixed value.
    """
    if grid < 2:
        raise ValidationError("grid needs at least two points")
    zs = np.linspace(1e-6, zeta_upper(P_A), grid)
    xs = np.linspace(1e-6, zeta_upper(P_Aprime), grid)
    S = np.array([make_S(P_A, z) for z in zs])
    Sp = np.array([make_S(P_Aprime, x) for x in xs])
    mixed = p * S[:, None] + (1 - p) * Sp[None, :]
    vals = two_state_stationary(mixed)
    lo, hi = float(vals.min()), float(vals.max())
    ok = (lo >= min(P_A, P_Aprime) - tol) and (hi <= max(P_A, P_Aprime) + tol)
    return bool(ok), lo, hi
