"""Extremes of the mixed long-run value over pairs of qubit games.

For targets ``P_A`` and ``P_Aprime`` the search runs over two single-Kraus
qubit games (:class:`~parrondo.quantum.ExtremalParams`) whose own limits
hit the targets, and extremizes the limit of their p-mixture.  Each restart
is an augmented-Lagrangian L-BFGS run in compiled code followed by a
Newton projection onto the constraints; the best feasible restart wins and
is re-evaluated through :func:`~parrondo.quantum.mixed_limit_via_wM`.
"""

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _qubit
from .linalg import (ConvergenceError, ValidationError, quantum_pf_fixed_point,
                     random_unitary)
from .quantum import (ExtremalParams, QuantumPinceNez, combine_quantum,
                      mixed_limit_via_wM, quantum_limit)

__all__ = [
    "InfeasibleError",
    "ExtremeResult",
    "ScanCell",
    "quantum_region_min",
    "quantum_region_max",
    "region_scan",
    "scan_workers",
    "multi_kraus_sample",
]

PENALTY_SCHEDULE = (10.0, 100.0, 1e3, 1e4)
MAXITER = 200


class InfeasibleError(ConvergenceError):
    """No restart reached both targets within tolerance."""


@dataclass(frozen=True)
class ExtremeResult:
    """Best restart of a region search.

    Unpacks as ``value, (params, params_prime)``.
    """

    value: float
    params: ExtremalParams
    params_prime: ExtremalParams
    feasible: int
    restarts: int

    def __iter__(self):
        yield self.value
        yield (self.params, self.params_prime)


def _check_targets(p, P_A, P_Aprime):
    for name, v in (("p", p), ("P_A", P_A), ("P_Aprime", P_Aprime)):
        if not 0 < v < 1:
            raise ValidationError(f"{name}={v} must lie in (0, 1)")


def _search(p, t1, t2, restarts, seed, tol, sign, maxiter):
    rng = np.random.default_rng(seed)
    starts = rng.normal(size=(restarts, 32))
    mus = np.array(PENALTY_SCHEDULE)
    games = np.empty((2, 4, 2), np.complex128)
    best, best_games, feasible = None, None, 0
    for x in starts:
        v1, v2, vc = _qubit.solve_restart(x.copy(), p, t1, t2, sign, mus,
                                          maxiter, games)
        if not (np.isfinite(vc) and abs(v1 - t1) <= tol and abs(v2 - t2) <= tol):
            continue
        feasible += 1
        if best is None or sign * vc < sign * best:
            best, best_games = vc, games.copy()
    return best, best_games, feasible


def _extreme(p, P_A, P_Aprime, restarts, seed, tol, sign, maxiter):
    _check_targets(p, P_A, P_Aprime)
    if restarts < 1:
        raise ValidationError("need at least one restart")
    # the problem is unchanged under (p, first, second) -> (1-p, second, first);
    # solving in a fixed orientation makes the p = 1/2 scan exactly symmetric
    swap = P_A > P_Aprime
    if swap:
        q, t1, t2 = 1 - p, P_Aprime, P_A
    else:
        q, t1, t2 = p, P_A, P_Aprime
    best, games, feasible = _search(q, t1, t2, restarts, seed, tol, sign, maxiter)
    if best is None:
        raise InfeasibleError(
            f"no restart out of {restarts} met the targets within {tol:g}")
    first = ExtremalParams.from_game_array(games[0])
    second = ExtremalParams.from_game_array(games[1])
    if swap:
        first, second = second, first
    check = mixed_limit_via_wM(first, second, p)
    if abs(check - best) > 1e-8:
        raise ConvergenceError(
            f"optimizer value {best!r} disagrees with the linear solve {check!r}")
    return ExtremeResult(float(best), first, second, feasible, restarts)


def quantum_region_min(p, P_A, P_Aprime, restarts=64, seed=0, tol=1e-6,
                       maximize=False, maxiter=MAXITER):
    """Smallest mixed long-run value found for the given single-game values.

    Parameters
    ----------
    p : float
        Probability of playing the first game each round, in (0, 1).
    P_A, P_Aprime : float
        Required long-run values of the two games, in (0, 1).
    restarts : int
        Number of seeded random starts.
    seed : int
    tol : float
        Largest accepted deviation of either game's value from its target.
    maximize : bool
        Search for the largest mixed value instead.

    Returns
    -------
    ExtremeResult

    Raises
    ------
    InfeasibleError
        When no restart is feasible.
    """
    sign = -1.0 if maximize else 1.0
    return _extreme(p, P_A, P_Aprime, restarts, seed, tol, sign, maxiter)


def quantum_region_max(p, P_A, P_Aprime, restarts=64, seed=0, tol=1e-6,
                       maxiter=MAXITER):
    return quantum_region_min(p, P_A, P_Aprime, restarts, seed, tol,
                              maximize=True, maxiter=maxiter)


@dataclass(frozen=True)
class ScanCell:
    P_A: float
    P_Aprime: float
    min_Pcomb: float
    max_Pcomb: float
    converged: bool


def scan_workers():
    """Worker count from ``PARRONDO_THREADS`` (default 1)."""
    raw = os.environ.get("PARRONDO_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValidationError(f"PARRONDO_THREADS={raw!r} is not an integer") from None
    if n < 1:
        raise ValidationError("PARRONDO_THREADS must be at least 1")
    return n


def _cell(args):
    p, a, b, restarts, seed, tol, with_max = args
    lo = hi = np.nan
    ok = True
    try:
        lo = quantum_region_min(p, a, b, restarts, seed, tol).value
    except ConvergenceError:
        ok = False
    if with_max:
        try:
            hi = quantum_region_max(p, a, b, restarts, seed, tol).value
        except ConvergenceError:
            ok = False
    return ScanCell(a, b, lo, hi, ok)


def region_scan(p, grid, restarts=64, seed=0, tol=1e-6, with_max=False,
                workers=None):
    """Run the region search on every pair of grid values.

    Cells come back in row-major order (``P_A`` outer) whatever the worker
    count, and every cell uses the same ``seed``.  A failed cell is
    recorded with ``converged=False`` and NaN values.

    Parameters
    ----------
    grid : sequence of float
        Values used for both ``P_A`` and ``P_Aprime``.
    with_max : bool
        Also search for the maximum in each cell.
    workers : int, optional
        Process count; defaults to :func:`scan_workers`.
    """
    grid = [float(g) for g in grid]
    if not grid:
        raise ValidationError("empty grid")
    tasks = [(p, a, b, restarts, seed, tol, with_max) for a in grid for b in grid]
    workers = scan_workers() if workers is None else workers
    if workers <= 1:
        return [_cell(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_cell, tasks))


def _complete_unitary(x, rng):
    """Unitary whose first column is the unit vector ``x``."""
    k = x.size
    Z = np.column_stack([x, rng.normal(size=(k, k - 1))
                         + 1j * rng.normal(size=(k, k - 1))])
    Q = np.linalg.qr(Z)[0]
    Q[:, 0] *= np.vdot(Q[:, 0], x)
    return Q


def _pince_nez_with_value(target, n_ops, rng):
    """Random qubit pince-nez with long-run value ``target``, or None.

    A random channel with ``n_ops`` Kraus operators is drawn.  Mixing them
    by a unitary leaves the channel unchanged, so the winning branch can be
    chosen as one mixed operator whose weight at the fixed state is the
    target, when the target lies within the weight matrix's spectrum.
    """
    V = random_unitary(rng, 2 * n_ops)[:, :2]
    ops = [V[2 * i:2 * i + 2] for i in range(n_ops)]
    pn = QuantumPinceNez((ops[0],), tuple(ops[1:]))
    rep = quantum_pf_fixed_point(pn.channel, 2)
    if not rep.converged:
        return None
    sigma = rep.result
    Q = np.array([[np.trace(A @ sigma @ B.conj().T) for B in ops] for A in ops])
    lam, E = np.linalg.eigh(Q)
    lo, hi = lam[0], lam[-1]
    if not lo <= target <= hi or hi - lo < 1e-12:
        return None
    s2 = (target - lo) / (hi - lo)
    phase = np.exp(2j * np.pi * rng.random())
    x = np.sqrt(1 - s2) * E[:, 0] + phase * np.sqrt(s2) * E[:, -1]
    W = _complete_unitary(x, rng)
    R = W.conj().T
    mixed = [sum(R[a, r] * ops[r] for r in range(n_ops)) for a in range(n_ops)]
    return QuantumPinceNez((mixed[0],), tuple(mixed[1:]))


def multi_kraus_sample(p, P_A, P_Aprime, samples, seed=0, n_ops=3):
    """Mixed long-run values of random multi-Kraus qubit pairs.

    Both games of each pair meet their targets up to solver precision;
    draws whose target falls outside the reachable range are redrawn.

    Returns
    -------
    ndarray of shape (samples,)
    """
    _check_targets(p, P_A, P_Aprime)
    if n_ops < 2:
        raise ValidationError("need at least two Kraus operators")
    rng = np.random.default_rng(seed)
    out = []
    attempts = 0
    while len(out) < samples:
        attempts += 1
        if attempts > 100 * samples + 100:
            raise ConvergenceError("too many rejected draws")
        first = _pince_nez_with_value(P_A, n_ops, rng)
        second = _pince_nez_with_value(P_Aprime, n_ops, rng)
        if first is None or second is None:
            continue
        try:
            out.append(quantum_limit(combine_quantum(first, second, p)))
        except ConvergenceError:
            continue
    return np.array(out)
