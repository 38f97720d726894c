"""Quantum walks on the line and the geodesic game played on them.

Basis states are (position, spin) pairs ordered ``..., -1 up, -1 down,
0 up, 0 down, 1 up, ...``; within a finite window ``[lo, hi]`` the index
of (x, s) is ``2 (x - lo) + s`` with s = 0 for up and 1 for down.  Walk
unitaries are returned as sparse matrices truncated to the window, so
columns at the window edge are not unitary; :func:`evolve` detects any
amplitude that reaches them.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.stats import norm

from .geodesic import BMatrix, dist_round, geodesic_point, phase_align
from .linalg import ValidationError

__all__ = [
    "LeakageError",
    "VerblunskyConfig",
    "WalkState",
    "Coin",
    "cmv_matrix",
    "coined_walk_matrix",
    "evolve",
    "walk_win_prob",
    "walk_restriction",
    "walk_geo_game",
    "site_state",
    "span_state",
    "detect_symmetry_case",
    "random_symmetric_config",
    "symmetry_trace",
    "konno_sum_check",
    "solve_packet_mean",
    "wavepacket_states",
    "wavepacket_game",
    "example_934_game",
    "SINGLE_DEFECT_CONFIG",
    "WAVEPACKET_COIN",
]

UP, DOWN = 0, 1
LEAK_ATOL = 1e-12
NORM_ATOL = 1e-10
KINDS = ("full-line", "half-line")


class LeakageError(ValidationError):
    """Amplitude reached the truncated edge of the window."""


@dataclass(frozen=True)
class VerblunskyConfig:
    """Verblunsky coefficients; unspecified indices are zero."""

    kind: str = "full-line"
    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"kind must be one of {KINDS}")
        c = {int(j): complex(a) for j, a in dict(self.coeffs).items()}
        for j, a in c.items():
            if abs(a) > 1 + 1e-15:
                raise ValidationError(f"|alpha_{j}| = {abs(a):.6g} exceeds 1")
            if self.kind == "half-line" and j < 0:
                raise ValidationError("half-line coefficients start at index 0")
        object.__setattr__(self, "coeffs", c)

    def alpha(self, j):
        return self.coeffs.get(j, 0j)

    def support(self):
        nz = [j for j, a in self.coeffs.items() if a != 0]
        return (min(nz), max(nz)) if nz else None


@dataclass(frozen=True)
class WalkState:
    """Amplitudes on the window ``[lo, hi]`` of positions."""

    lo: int
    hi: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.hi < self.lo:
            raise ValidationError("empty window")
        amp = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amp.size != 2 * (self.hi - self.lo + 1):
            raise ValidationError("amplitude vector does not match the window")
        if abs(np.linalg.norm(amp) - 1) > NORM_ATOL:
            raise ValidationError("walk state must have unit norm")
        object.__setattr__(self, "amplitudes", amp)

    @property
    def positions(self):
        return np.arange(self.lo, self.hi + 1)

    def amplitude(self, x, spin):
        if not self.lo <= x <= self.hi:
            return 0j
        return self.amplitudes[2 * (x - self.lo) + spin]

    def with_amplitudes(self, amp):
        return WalkState(self.lo, self.hi, amp)


@dataclass(frozen=True)
class Coin:
    """2x2 unitary coin and the order in which it meets the shift."""

    matrix: np.ndarray
    form: str = "second"

    def __post_init__(self):
        C = np.asarray(self.matrix, dtype=complex)
        if C.shape != (2, 2) or np.abs(C.conj().T @ C - np.eye(2)).max() > 1e-12:
            raise ValidationError("coin must be a 2x2 unitary")
        if self.form not in ("first", "second"):
            raise ValidationError("form must be 'first' or 'second'")
        object.__setattr__(self, "matrix", C)


def _window(window):
    lo, hi = (int(w) for w in window)
    if hi < lo:
        raise ValidationError("empty window")
    return lo, hi


def _blocks(entries, size):
    rows, cols, vals = zip(*entries) if entries else ((), (), ())
    return sp.csr_matrix((vals, (rows, cols)), shape=(size, size), dtype=complex)


def _pair_block(entries, i, j, blk, size):
    # place a 2x2 block on indices (i, j), dropping parts outside the window
    for r, a in enumerate((i, j)):
        for c, b in enumerate((i, j)):
            if 0 <= a < size and 0 <= b < size and blk[r][c] != 0:
                entries.append((a, b, blk[r][c]))


def _verblunsky_block(a):
    rho = np.sqrt(max(0.0, 1 - abs(a) ** 2))
    return ((np.conj(a), rho), (rho, -a))


def cmv_matrix(cfg, window):
    """CMV matrix ``L @ M`` restricted to ``window = (lo, hi)``.

    ``L`` holds the even-index blocks on (x up, x down) and ``M`` the
    odd-index blocks on (x down, x+1 up).  On the half-line the first up
    state is fixed by ``M``.
    """
    if not isinstance(cfg, VerblunskyConfig):
        raise ValidationError("expected a VerblunskyConfig")
    lo, hi = _window(window)
    if cfg.kind == "half-line" and lo != 0:
        raise ValidationError("half-line windows start at position 0")
    size = 2 * (hi - lo + 1)
    L, M = [], []
    for x in range(lo - 1, hi + 1):
        i = 2 * (x - lo)
        if x >= lo:
            _pair_block(L, i, i + 1, _verblunsky_block(cfg.alpha(2 * x)), size)
        if cfg.kind == "half-line" and x < 0:
            continue
        _pair_block(M, i + 1, i + 2, _verblunsky_block(cfg.alpha(2 * x + 1)), size)
    if cfg.kind == "half-line":
        M.append((0, 0, 1.0))
    return (_blocks(L, size) @ _blocks(M, size)).tocsr()


def coined_walk_matrix(coin, window, kind="full-line"):
    """Constant-coin walk: coin on (x up, x down), shift swapping
    (x down, x+1 up); first form ``C @ S``, second form ``S @ C``."""
    if not isinstance(coin, Coin):
        raise ValidationError("expected a Coin")
    if kind not in KINDS:
        raise ValidationError(f"kind must be one of {KINDS}")
    lo, hi = _window(window)
    if kind == "half-line" and lo != 0:
        raise ValidationError("half-line windows start at position 0")
    size = 2 * (hi - lo + 1)
    C, S = [], []
    swap = ((0, 1), (1, 0))
    for x in range(lo - 1, hi + 1):
        i = 2 * (x - lo)
        if x >= lo:
            _pair_block(C, i, i + 1, coin.matrix, size)
        if kind == "half-line" and x < 0:
            continue
        _pair_block(S, i + 1, i + 2, swap, size)
    if kind == "half-line":
        S.append((0, 0, 1.0))
    C, S = _blocks(C, size), _blocks(S, size)
    return ((C @ S) if coin.form == "first" else (S @ C)).tocsr()


def site_state(lo, hi, amps):
    """Walk state from a mapping ``{(x, spin): amplitude}``."""
    v = np.zeros(2 * (hi - lo + 1), dtype=complex)
    for (x, s), a in amps.items():
        if not lo <= x <= hi or s not in (UP, DOWN):
            raise ValidationError(f"site ({x}, {s}) outside the window")
        v[2 * (x - lo) + s] = a
    return WalkState(lo, hi, v)


def span_state(lo, hi, up, down):
    """Normalized ``up * eta_0up + down * eta_0down``."""
    nrm = np.hypot(abs(up), abs(down))
    if nrm == 0:
        raise ValidationError("zero state")
    return site_state(lo, hi, {(0, UP): up / nrm, (0, DOWN): down / nrm})


def evolve(U, state, n):
    """Apply ``U`` n times, checking that nothing reaches the window edge.

    Raises
    ------
    LeakageError
        When the norm drifts by more than 1e-10 or the two outermost sites
        on either side carry weight above 1e-12.
    """
    if n < 0:
        raise ValidationError("n must be nonnegative")
    x = state.amplitudes
    if U.shape != (x.size, x.size):
        raise ValidationError("walk matrix does not match the window")
    for _ in range(n):
        x = U @ x
    w = np.abs(x) ** 2
    edge = w[:4].sum() + w[-4:].sum()
    if abs(np.sqrt(w.sum()) - 1) > NORM_ATOL or (n > 0 and edge > LEAK_ATOL):
        raise LeakageError(
            f"amplitude reached the window edge (edge weight {edge:.3g}); "
            "widen the window")
    return WalkState(state.lo, state.hi, x / np.linalg.norm(x))


def _positive(state):
    return np.repeat(state.positions > 0, 2)


def walk_win_prob(state):
    """Weight on positions strictly to the right of the origin."""
    w = np.abs(state.amplitudes) ** 2
    return float(w[_positive(state)].sum())


def walk_restriction(U, psi, xi, n):
    """Matrix of the effect ``U^n* P+ U^n`` on (psi, aligned xi)."""
    xh = psi.with_amplitudes(phase_align(psi.amplitudes, xi.amplitudes))
    a = evolve(U, psi, n)
    b = evolve(U, xh, n)
    pos = _positive(a)
    X = np.column_stack([a.amplitudes[pos], b.amplitudes[pos]])
    B = X.T @ X.conj()
    return BMatrix(0.5 * (B + B.conj().T),
                   dist_round(psi.amplitudes, xi.amplitudes))


def walk_geo_game(U, psi, xi, n, theta):
    """Winning probabilities of ``psi``, ``xi`` and the geodesic point at
    arc length ``theta``, all after ``n`` steps."""
    if (psi.lo, psi.hi) != (xi.lo, xi.hi):
        raise ValidationError("states live on different windows")
    g = psi.with_amplitudes(geodesic_point(psi.amplitudes, xi.amplitudes, theta))
    return tuple(walk_win_prob(evolve(U, s, n)) for s in (psi, xi, g))


# exact paradox: a single nonzero coefficient at index -1
SINGLE_DEFECT_CONFIG = VerblunskyConfig("full-line", {-1: 1 / np.sqrt(3)})


_RELATIONS = {
    # case: (sign on even, sign on odd, conjugate?)
    "iii": (1, 1, True),
    "iv": (-1, -1, True),
    "v": (1, -1, True),
    "vi": (-1, 1, True),
}


def _matches(cfg, case, omega, atol):
    lo_hi = cfg.support()
    if lo_hi is None:
        return True
    m = max(abs(lo_hi[0]), abs(lo_hi[1]))
    for j in range(-m, m + 1):
        a, b = cfg.alpha(j), cfg.alpha(-j)
        if case == "i":
            want = omega ** j * b
        elif case == "ii":
            want = (-1 if j % 2 == 0 else 1) * omega ** j * b
        else:
            se, so, _ = _RELATIONS[case]
            want = (se if j % 2 == 0 else so) * np.conj(b)
        if abs(a - want) > atol:
            return False
    return True


def _omega_candidates(cfg, case):
    lo_hi = cfg.support()
    if lo_hi is not None:
        m = max(abs(lo_hi[0]), abs(lo_hi[1]))
        for j in range(1, m + 1):
            a, b = cfg.alpha(j), cfg.alpha(-j)
            if a != 0 and b != 0:
                r = a / b
                if case == "ii" and j % 2 == 0:
                    r = -r
                if abs(abs(r) - 1) > 1e-9:
                    return []
                base = np.angle(r)
                return [np.exp(1j * (base + 2 * np.pi * k) / j) for k in range(j)]
    return [1.0 + 0j]


def detect_symmetry_case(cfg, atol=1e-12):
    """First of the six reflection symmetries the coefficients satisfy.

    Returns
    -------
    (case, omega) or None
        ``case`` is one of "i", "ii", "iii", "iv", "v", "vi"; ``omega`` is
        the unit multiplier for cases i and ii and None otherwise.
    """
    if cfg.kind != "full-line":
        raise ValidationError("symmetry cases are defined on the full line")
    for case in ("i", "ii"):
        for om in _omega_candidates(cfg, case):
            if _matches(cfg, case, om, atol):
                return case, complex(om)
    for case in ("iii", "iv", "v", "vi"):
        if _matches(cfg, case, None, atol):
            return case, None
    return None


def random_symmetric_config(rng, case, reach=4, omega=None):
    """Random full-line coefficients on ``[-reach, reach]`` in a symmetry case."""
    if case in ("i", "ii") and omega is None:
        omega = np.exp(2j * np.pi * rng.random())
    coeffs = {}
    for j in range(0, reach + 1):
        a = np.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random())
        even = j % 2 == 0
        if case == "i":
            b = a / omega ** j if j else a
        elif case == "ii":
            if j == 0:
                a = b = 0j
            else:
                b = (-1 if even else 1) * a / omega ** j
        else:
            se, so, _ = _RELATIONS[case]
            s = se if even else so
            if j == 0:
                # alpha_0 = s * conj(alpha_0): real or imaginary
                a = abs(a) * (1 if s == 1 else 1j)
            b = s * np.conj(a)
        coeffs[j] = a
        coeffs[-j] = b
    return VerblunskyConfig("full-line", coeffs)


def symmetry_trace(U, window, n):
    """Trace of ``P+`` restricted to the origin's spin plane after n steps."""
    lo, hi = window
    up = evolve(U, site_state(lo, hi, {(0, UP): 1}), n)
    dn = evolve(U, site_state(lo, hi, {(0, DOWN): 1}), n)
    return walk_win_prob(up) + walk_win_prob(dn)


def konno_sum_check(coin, n):
    """``P+`` weight after n steps from the origin, summed over both spins.

    Only constant coins in the second form with an off-diagonal entry of
    modulus strictly between 0 and 1 qualify.
    """
    if coin.form != "second":
        raise ValidationError("the limit applies to the second form")
    a = abs(coin.matrix[0, 1])
    if a < 1e-12 or a > 1 - 1e-12:
        raise ValidationError("coin is diagonal or anti-diagonal")
    window = (-n - 2, n + 2)
    return symmetry_trace(coined_walk_matrix(coin, window), window, n)


WAVEPACKET_COIN = Coin(np.array([[1, 1], [-1, 1]]) / np.sqrt(2), "second")


def _drift(k):
    return -np.sin(k) / np.sqrt(1 + np.cos(k) ** 2)


def solve_packet_mean(sigma2, target=1 / 3):
    """Mean in (-pi/2, 0) of a normal law, restricted to that interval,
    against which the drift density integrates to ``target``."""
    lo_k, hi_k = -np.pi / 2, 0.0

    def f(a):
        val, _ = quad(lambda k: _drift(k) * norm.pdf(k, a, sigma2), lo_k, hi_k,
                      points=[a] if lo_k < a < hi_k else None, limit=200)
        return val - target

    try:
        return brentq(f, lo_k, hi_k, xtol=1e-14)
    except ValueError as exc:
        raise ValidationError(f"no mean solves the drift condition: {exc}") from None


def _packet(j, sigma, k0):
    return (2 * sigma ** 2 / np.pi) ** 0.25 * np.exp(-sigma ** 2 * j ** 2 + 1j * k0 * j)


def wavepacket_states(eps, sigma1, sigma2, n, cutoff=40.0):
    """Walk matrix and the two initial states of the wavepacket example.

    Packets are cut where ``sigma^2 j^2`` exceeds ``cutoff`` and the window
    adds ``n + 2`` sites on each side.
    """
    if not (eps > 0 and sigma1 > 0 and sigma2 > 0):
        raise ValidationError("eps and both widths must be positive")
    a = solve_packet_mean(sigma2)
    J = int(np.ceil(np.sqrt(cutoff) / min(sigma1, sigma2)))
    lo, hi = -J - n - 2, J + n + 2
    j = np.arange(lo, hi + 1)
    phi = np.where(abs(j) <= J, _packet(j, sigma1, np.pi / 2 - eps), 0)
    zeta = np.where(abs(j) <= J, _packet(j, sigma2, a), 0)
    spin = np.array([1j, 1.0])
    states = []
    for f in (0.5 * (zeta + phi), 0.5 * (zeta - phi)):
        v = np.kron(f, spin)
        states.append(WalkState(lo, hi, v / np.linalg.norm(v)))
    U = coined_walk_matrix(WAVEPACKET_COIN, (lo, hi))
    return U, states[0], states[1]


def wavepacket_game(eps, sigma1, sigma2, n):
    """(P_A, P_Aprime, P_geo) for the wavepacket example at the geodesic
    midpoint after n steps."""
    U, psi, xi = wavepacket_states(eps, sigma1, sigma2, n)
    delta = dist_round(psi.amplitudes, xi.amplitudes)
    return walk_geo_game(U, psi, xi, n, delta / 2)


# name used by the command-line interface
example_934_game = wavepacket_game
