"""Named property suites, each a batch of seeded numerical checks.

Every suite takes ``seed`` and an optional ``samples`` override and
returns a list of :class:`Check`; a failed check carries a JSON-ready
counterexample.
"""

from dataclasses import dataclass, field

import numpy as np

from . import classical as cl
from . import geodesic as geo
from . import hidden as hd
from . import quantum as qu
from . import walks as wk
from .dilation import chain_joint_probs, dilate_pince_nez, dilated_joint_probs
from .linalg import (ConvergenceError, pf_fixed_point, quantum_pf_fixed_point,
                     random_density, random_stochastic)

__all__ = ["Check", "SUITES", "run_suite", "jsonable"]


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""
    counterexample: object = field(default=None)


def jsonable(x):
    """Convert arrays and complex numbers to plain JSON values."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, np.generic):
        return x.item()
    return x


# ---------------------------------------------------------------- classical

def suite_two_state(seed, samples=None):
    """Two-state observed games never leave the naive interval."""
    rng = np.random.default_rng(seed)
    pairs = samples or 10
    bad = None
    for _ in range(pairs):
        a, b = rng.random(2)
        for p in np.linspace(1e-6, 1 - 1e-6, 20):
            ok, lo, hi = cl.two_state_region_check(a, b, p, 20)
            if not ok and bad is None:
                bad = {"P_A": a, "P_Aprime": b, "p": p, "min": lo, "max": hi}
    return [Check("naive bound on 20^3 grids", bad is None,
                  f"{pairs} random pairs", bad)]


def _three_state_triple(P, Pp, eps, s, p=0.5):
    T, Tp = cl.make_T(P, eps, s), cl.make_Tprime(Pp, eps)
    g = cl.ClassicalGame(T, (0,), np.ones(3) / 3)
    gp = cl.ClassicalGame(Tp, (0,), np.ones(3) / 3)
    return (cl.classical_limit(g), cl.classical_limit(gp),
            cl.classical_limit(cl.combine_classical(g, gp, p)))


def suite_three_state(seed, samples=None):
    checks = []
    vals = [_three_state_triple(0.7, 0.7, 1e-3, s)
            for s in np.linspace(0, 1, samples or 50)]
    comb = np.array([v[2] for v in vals])
    singles = np.array([v[:2] for v in vals])
    checks.append(Check("single games keep their value across s",
                        bool(np.abs(singles - 0.7).max() < 1e-9),
                        f"max deviation {np.abs(singles - 0.7).max():.2e}"))
    checks.append(Check("s sweep covers (0.02, 0.98)",
                        bool(comb.min() < 0.02 and comb.max() > 0.98),
                        f"min {comb.min():.6f}, max {comb.max():.6f}"))
    eps, p, P = 0.01, 0.5, 0.7
    closed = eps / (p * (1 - p) / 2 + eps * (p / P + (1 - p) / P))
    got = _three_state_triple(P, P, eps, 0.0)[2]
    checks.append(Check("s = 0 closed form", abs(got - closed) < 1e-6,
                        f"{got:.10f} vs {closed:.10f}"))
    return checks


# ------------------------------------------------------------------- hidden

def suite_embeddings(seed, samples=None):
    """Three-state hidden and quantum embeddings of the observed family."""
    worst_h = worst_q = 0.0
    for s in np.linspace(0, 1, samples or 11):
        ref = _three_state_triple(0.7, 0.6, 0.01, s)
        first, second = hd.make_hidden_embedding_3state(0.7, 0.6, 0.01, s)
        got = (hd.hidden_limit(first), hd.hidden_limit(second),
               hd.hidden_limit(hd.combine_hidden(first, second, 0.5)))
        worst_h = max(worst_h, np.abs(np.subtract(got, ref)).max())
        q1 = qu.embed_classical(first.branch_A, first.branch_Atilde)
        q2 = qu.embed_classical(second.branch_A, second.branch_Atilde)
        got = (qu.quantum_limit(q1), qu.quantum_limit(q2),
               qu.quantum_limit(qu.combine_quantum(q1, q2, 0.5)))
        worst_q = max(worst_q, np.abs(np.subtract(got, ref)).max())
    return [Check("hidden embedding matches observed triples", worst_h < 1e-9,
                  f"max deviation {worst_h:.2e}"),
            Check("quantum block embedding matches observed triples",
                  worst_q < 1e-9, f"max deviation {worst_q:.2e}")]


def suite_hidden_region(seed, samples=None):
    n = samples or 100_000
    checks = []
    for k, p in enumerate((0.1, 0.3, 0.5)):
        for a, b in ((0.6, 0.6), (0.2, 0.9)):
            lo, hi, bad = hd.hidden_region_sample(p, a, b, n, seed=seed + k)
            checks.append(Check(
                f"no violations p={p} ({a}, {b})", bad == 0,
                f"observed [{lo:.4f}, {hi:.4f}] in {hd.hidden_bounds(p, a, b)}",
                None if bad == 0 else {"p": p, "P_A": a, "P_Aprime": b,
                                       "violations": bad}))
    p, a, b = 0.5, 0.6, 0.7
    worst = 0.0
    for eps in (1e-2, 1e-3):
        for first_is_frozen in (True, False):
            P, Pp, q = (a, b, p) if first_is_frozen else (b, a, 1 - p)
            ends = ((1 - q) * Pp, q + (1 - q) * Pp)
            for s, target in ((0.0, ends[0]), (1.0, ends[1])):
                f, g = hd.make_hidden_eps_family(P, Pp, eps, s)
                v = hd.hidden_limit(hd.combine_hidden(f, g, q))
                worst = max(worst, abs(v - target) / eps)
    checks.append(Check("eps family reaches the endpoints within 5 eps",
                        worst < 5, f"worst gap {worst:.3f} eps"))
    rng = np.random.default_rng(seed)
    a, b, c, d = rng.random((4, 10_000))
    ref = (a * d + b * c) / (c + d)
    got = np.array([hd.reduced_limit(hd.ReducedHiddenGame.from_params(*t))
                    for t in zip(a, b, c, d)])
    checks.append(Check("reduced form identity", np.abs(got - ref).max() < 1e-10,
                        f"max deviation {np.abs(got - ref).max():.2e}"))
    return checks


# ----------------------------------------------------------------- geodesic

def suite_geodesic_region(seed, samples=None):
    rng = np.random.default_rng(seed)
    bad = None
    for _ in range(samples or 10_000):
        d = int(rng.integers(2, 7))
        eta = geo.random_effect(rng, d)
        psi, xi = geo.random_wavefunction(rng, d), geo.random_wavefunction(rng, d)
        B = geo.build_B(eta, psi, xi)
        theta = rng.random() * B.delta
        v = geo.geo_prob(B, theta)
        lo, hi = geo.geo_bounds(B.B[0, 0].real, B.B[1, 1].real)
        if not lo - 1e-9 <= v <= hi + 1e-9:
            bad = {"eta": eta, "psi": psi, "xi": xi, "theta": theta, "value": v}
            break
    checks = [Check("random instances inside the closed region", bad is None,
                    "", bad)]
    worst = 0.0
    grid = np.linspace(0.05, 0.95, 20)
    for a in grid:
        for b in grid:
            lo, hi = geo.geo_bounds(a, b)
            for which, target in (("min", lo), ("max", hi)):
                B, delta, theta = geo.achieve_extreme(a, b, which)
                worst = max(worst, abs(geo.geo_prob(B, theta) - target))
    checks.append(Check("constructions attain both bounds", worst < 1e-9,
                        f"max gap {worst:.2e}"))
    return checks


def _random_small_effect(rng):
    """2x2 effect with trace at most one."""
    while True:
        C = geo.random_effect(rng, 2)
        if np.trace(C).real <= 1:
            return C


def suite_trace_condition(seed, samples=None):
    rng = np.random.default_rng(seed)
    bad = None
    for _ in range(samples or 1000):
        C = _random_small_effect(rng)
        assert geo.no_paradox_check(C)
        for _ in range(10):
            psi, xi = geo.random_wavefunction(rng, 2), geo.random_wavefunction(rng, 2)
            B = geo.build_B(C, psi, xi)
            if B.delta < 1e-9:
                continue
            a, b = B.B[0, 0].real, B.B[1, 1].real
            for theta in np.linspace(0, B.delta, 21):
                v = geo.geo_prob(B, theta)
                if a > 0.5 and b > 0.5 and v < 0.5 - 1e-9:
                    bad = {"C": C, "psi": psi, "xi": xi, "theta": theta}
    return [Check("no paradox when the trace is at most one", bad is None,
                  "", bad)]


# -------------------------------------------------------------------- walks

def _plane_effect(up, dn):
    """Matrix of P+ on the evolved origin spin plane."""
    pos = np.repeat(up.positions > 0, 2)
    X = np.column_stack([up.amplitudes[pos], dn.amplitudes[pos]])
    C = X.T @ X.conj()
    return 0.5 * (C + C.conj().T)


def suite_walk_symmetry(seed, samples=None, n_max=30, pairs=5):
    rng = np.random.default_rng(seed)
    configs = samples or 100
    window = (-n_max - 2, n_max + 2)
    worst, bad = -np.inf, None
    thetas = np.linspace(0, 1, 21)
    for case in ("i", "ii", "iii", "iv", "v", "vi"):
        for _ in range(configs):
            cfg = wk.random_symmetric_config(rng, case)
            U = wk.cmv_matrix(cfg, window)
            up = wk.site_state(*window, {(0, wk.UP): 1})
            dn = wk.site_state(*window, {(0, wk.DOWN): 1})
            for n in range(1, n_max + 1):
                up, dn = wk.evolve(U, up, 1), wk.evolve(U, dn, 1)
                C = _plane_effect(up, dn)
                worst = max(worst, np.trace(C).real - 1)
                for _ in range(pairs):
                    psi = geo.random_wavefunction(rng, 2)
                    xi = geo.random_wavefunction(rng, 2)
                    B = geo.build_B(C, psi, xi)
                    if B.delta < 1e-9:
                        continue
                    a, b = B.B[0, 0].real, B.B[1, 1].real
                    for t in thetas * B.delta:
                        if a > 0.5 and b > 0.5 and geo.geo_prob(B, t) < 0.5 - 1e-9:
                            bad = {"case": case, "coeffs": cfg.coeffs, "n": n}
    return [Check("trace condition for all six cases", worst <= 1e-10,
                  f"max excess {worst:.2e}"),
            Check("no paradox triple for all six cases", bad is None, "", bad)]


def suite_walk_limit(seed, samples=None):
    coin = wk.WAVEPACKET_COIN
    s100 = wk.konno_sum_check(coin, 100)
    s1000 = wk.konno_sum_check(coin, samples or 1000)
    return [Check("sum stays in [0, 2]", 0 <= s100 <= 2 and 0 <= s1000 <= 2),
            Check("sum approaches one", abs(s1000 - 1) < min(0.05, abs(s100 - 1)),
                  f"n=100: {s100:.6f}, n={samples or 1000}: {s1000:.6f}")]


def suite_exact_walk(seed, samples=None):
    worst_t = worst_a = 0.0
    r2, r3, r6 = np.sqrt(2), np.sqrt(3), np.sqrt(6)
    for n in range(2, 11):
        w = (-n - 2, n + 2)
        U = wk.cmv_matrix(wk.SINGLE_DEFECT_CONFIG, w)
        psi = wk.span_state(*w, 1, 1)
        xi = wk.span_state(*w, 1, -1)
        triple = wk.walk_geo_game(U, psi, xi, n, np.pi / 4)
        worst_t = max(worst_t, np.abs(np.subtract(triple, (2 / 3, 2 / 3, 1 / 3))).max())
        chi = wk.site_state(*w, {(0, wk.UP): 1})
        want = {
            "psi": (psi, {(n, 1): 1 / r2, (n - 1, 1): -1 / r6, (-n, 0): 1 / r3}),
            "xi": (xi, {(n, 1): -1 / r2, (n - 1, 1): -1 / r6, (-n, 0): 1 / r3}),
            "chi": (chi, {(-n, 0): np.sqrt(2 / 3), (n - 1, 1): -1 / r3}),
        }
        for state, amps in want.values():
            ref = wk.site_state(*w, amps).amplitudes
            worst_a = max(worst_a, np.abs(wk.evolve(U, state, n).amplitudes - ref).max())
    return [Check("triple (2/3, 2/3, 1/3) for n = 2..10", worst_t < 1e-12,
                  f"last triple {tuple(round(t, 12) for t in triple)}, "
                  f"max deviation {worst_t:.2e}"),
            Check("listed amplitudes", worst_a < 1e-12, f"max deviation {worst_a:.2e}")]


def suite_wavepacket_walk(seed, samples=None):
    n = samples or 2000
    U, psi, xi = wk.wavepacket_states(0.05, 0.02, 0.02, n)
    ov = abs(np.vdot(psi.amplitudes, xi.amplitudes))
    triple = wk.wavepacket_game(0.05, 0.02, 0.02, n)
    gap = np.abs(np.subtract(triple, (2 / 3, 2 / 3, 1 / 3))).max()
    lo, hi = geo.geo_bounds(*triple[:2])
    return [Check("initial states nearly orthogonal", ov < 0.05, f"|<psi, xi>| = {ov:.2e}"),
            Check("triple within 0.08 of (2/3, 2/3, 1/3)", gap < 0.08,
                  f"triple {tuple(round(t, 6) for t in triple)}"),
            Check("triple inside the closed region",
                  lo - 1e-9 <= triple[2] <= hi + 1e-9)]


# ------------------------------------------------------------ quantum / core

def suite_dilation(seed, samples=None):
    rng = np.random.default_rng(seed)
    worst, bad = 0.0, None
    for k in range(samples or 50):
        pn = qu.random_pince_nez(rng, 2, 1 + k % 2, 1 + (k // 2) % 2)
        rho = random_density(rng, 2)
        D = dilate_pince_nez(pn)
        a = chain_joint_probs(pn, rho, 3)
        b = dilated_joint_probs(D.U, D.aux0, D.projectors, rho, 3)
        err = np.abs(a - b).max()
        if err > worst:
            worst = err
            if err > 1e-10:
                bad = {"kraus_A": pn.kraus_A, "kraus_Atilde": pn.kraus_Atilde, "rho": rho}
    return [Check("joint laws agree over three rounds", worst < 1e-10,
                  f"max deviation {worst:.2e}", bad)]


def eig_stationary(M):
    """Oracle: eigenvector of the eigenvalue nearest one, and the largest
    modulus among the remaining eigenvalues."""
    w, V = np.linalg.eig(M)
    k = int(np.argmin(np.abs(w - 1)))
    v = np.real(V[:, k])
    rest = np.delete(w, k)
    return v / v.sum(), (np.abs(rest).max() if rest.size else 0.0)


def suite_oracle(seed, samples=None):
    rng = np.random.default_rng(seed)
    n = samples or 1000
    worst, bad, unresolved = 0.0, None, 0
    for k in range(n):
        M = random_stochastic(rng, int(rng.integers(2, 7)),
                              sparsity=0.4 if k % 4 == 0 else 0.0)
        rep = pf_fixed_point(M)
        ref, second = eig_stationary(M)
        if rep.converged:
            err = np.abs(rep.result - ref).max()
            if err > worst:
                worst = err
                if err > 1e-9:
                    bad = {"M": M}
        elif second < 1 - 1e-6:
            unresolved += 1
            bad = bad or {"M": M, "note": "solver gave up on a mixing chain"}
    checks = [Check("pf solver vs eigen-decomposition", worst < 1e-9 and unresolved == 0,
                    f"max deviation {worst:.2e}", bad)]
    worst, bad = 0.0, None
    for _ in range(n):
        prm = qu.random_extremal_params(rng)
        rep = quantum_pf_fixed_point(prm.pince_nez().channel, 2)
        if not rep.converged:
            continue
        a, _ = qu.apply_pince_nez(prm.pince_nez(), rep.result)
        try:
            err = abs(qu.quantum_limit_via_wM(prm) - np.trace(a).real)
        except ConvergenceError:
            err = np.inf
        if err > worst:
            worst = err
            if err > 1e-6:
                bad = {"u": prm.u, "v": prm.v}
    checks.append(Check("linear solve vs channel iteration", worst < 1e-6,
                        f"max deviation {worst:.2e}", bad))
    return checks


SUITES = {
    "thm724": suite_two_state,
    "thm723": suite_three_state,
    "thm733": suite_embeddings,
    "thm734": suite_hidden_region,
    "thm832": suite_geodesic_region,
    "thm841": suite_trace_condition,
    "thm931": suite_walk_symmetry,
    "thm932": suite_walk_limit,
    "ex933": suite_exact_walk,
    "ex934": suite_wavepacket_walk,
    "dilation": suite_dilation,
    "oracle": suite_oracle,
}


def run_suite(name, seed=0, samples=None):
    if name not in SUITES:
        raise KeyError(name)
    return SUITES[name](seed, samples)
