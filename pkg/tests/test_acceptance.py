"""Acceptance criteria, one test per criterion at the stated tolerances.

Each test records its outcome; the PASS/FAIL lines are printed in the
"acceptance criteria" section of the pytest summary.
"""

import time

import numpy as np

from conftest import record
from oracles import stationary_eig, three_state_s0
from parrondo import classical as cl
from parrondo import geodesic as geo
from parrondo import hidden as hd
from parrondo import quantum as qu
from parrondo import walks as wk
from parrondo.dilation import chain_joint_probs, dilate_pince_nez, dilated_joint_probs
from parrondo.linalg import pf_fixed_point, random_density, random_stochastic
from parrondo.region import quantum_region_min, region_scan


def test_criterion_01_two_state_no_paradox():
    rng = np.random.default_rng(1)
    t0 = time.perf_counter()
    violations = 0
    for _ in range(10):
        a, b = rng.uniform(1e-6, 1 - 1e-6, 2)
        for p in np.linspace(1e-6, 1 - 1e-6, 20):
            ok, _, _ = cl.two_state_region_check(a, b, p, 20, tol=1e-9)
            violations += not ok
    dt = time.perf_counter() - t0
    passed = record(1, "two-state grid sweep stays in the naive interval",
                    violations == 0 and dt < 30, f"{violations} violations, {dt:.1f} s")
    assert passed


def _combined(P, Pp, eps, s, p=0.5):
    u = np.ones(3) / 3
    g = cl.ClassicalGame(cl.make_T(P, eps, s), (0,), u)
    gp = cl.ClassicalGame(cl.make_Tprime(Pp, eps), (0,), u)
    return cl.classical_limit(cl.combine_classical(g, gp, p))


def test_criterion_02_three_state_full_region():
    vals = np.array([_combined(0.7, 0.7, 1e-3, s) for s in np.linspace(0, 1, 50)])
    at0 = _combined(0.7, 0.7, 0.01, 0.0)
    ref = three_state_s0(0.5, 0.7, 0.7, 0.01)
    passed = record(2, "three-state sweep spans (0.02, 0.98); s=0 closed form",
                    vals.min() < 0.02 and vals.max() > 0.98 and abs(at0 - ref) < 1e-6,
                    f"min {vals.min():.5f}, max {vals.max():.5f}, s=0 {at0:.8f} vs {ref:.8f}")
    assert passed


def test_criterion_03_hidden_region():
    p, P, Pp = 0.5, 0.6, 0.7
    lo, hi, bad = hd.hidden_region_sample(p, P, Pp, 1_000_000, seed=0)
    worst = 0.0
    for eps in (1e-2, 1e-3):
        for first, second, q in ((P, Pp, p), (Pp, P, 1 - p)):
            for s, target in ((0.0, (1 - q) * second), (1.0, q + (1 - q) * second)):
                f, g = hd.make_hidden_eps_family(first, second, eps, s)
                v = hd.hidden_limit(hd.combine_hidden(f, g, q))
                worst = max(worst, abs(v - target) / eps)
    passed = record(3, "hidden region: no violations in 1e6 samples; eps family within 5 eps",
                    bad == 0 and worst < 5,
                    f"{bad} violations, observed [{lo:.4f}, {hi:.4f}], worst gap {worst:.2f} eps")
    assert passed


def test_criterion_04_reduced_identity():
    rng = np.random.default_rng(4)
    a, b, c, d = rng.random((4, 10_000))
    got = np.array([hd.reduced_limit(hd.ReducedHiddenGame.from_params(*t))
                    for t in zip(a, b, c, d)])
    err = np.abs(got - (a * d + b * c) / (c + d)).max()
    passed = record(4, "reduced limit equals (ad+bc)/(c+d)", err < 1e-10, f"max error {err:.1e}")
    assert passed


def test_criterion_05_dilation():
    rng = np.random.default_rng(5)
    t0 = time.perf_counter()
    err = 0.0
    for _ in range(50):
        pn = qu.random_pince_nez(rng, 2, int(rng.integers(1, 3)), int(rng.integers(1, 3)))
        rho = random_density(rng, 2)
        dil = dilate_pince_nez(pn)
        got = dilated_joint_probs(dil.U, dil.aux0, dil.projectors, rho, 3)
        err = max(err, np.abs(got - chain_joint_probs(pn, rho, 3)).max())
    dt = time.perf_counter() - t0
    passed = record(5, "dilated unitary reproduces the 3-round joint law",
                    err < 1e-10 and dt < 10, f"max error {err:.1e}, {dt:.1f} s")
    assert passed


def test_criterion_06_quantum_region():
    first = quantum_region_min(0.5, 0.6, 0.6, restarts=64, seed=0)
    again = quantum_region_min(0.5, 0.6, 0.6, restarts=64, seed=0)
    hidden_lo = hd.hidden_bounds(0.5, 0.6, 0.6)[0]
    t0 = time.perf_counter()
    cells = region_scan(0.5, np.linspace(0, 1, 12)[1:-1], restarts=64, seed=0, with_max=True)
    dt = time.perf_counter() - t0
    passed = record(6, "quantum min at (0.6, 0.6) below 0.3; deterministic; 10x10 grid time",
                    first.value < 0.3 and first.value < hidden_lo
                    and first.value == again.value and dt < 300
                    and all(c.converged for c in cells),
                    f"min {first.value:.6f}, grid {dt:.0f} s")
    assert passed


def test_criterion_07_geodesic_region():
    rng = np.random.default_rng(7)
    t0 = time.perf_counter()
    outside = 0
    for _ in range(10_000):
        d = int(rng.integers(2, 7))
        B = geo.build_B(geo.random_effect(rng, d), geo.random_wavefunction(rng, d),
                        geo.random_wavefunction(rng, d))
        v = geo.geo_prob(B, rng.random() * B.delta)
        lo, hi = geo.geo_bounds(B.B[0, 0].real, B.B[1, 1].real)
        outside += not lo - 1e-9 <= v <= hi + 1e-9
    gap = 0.0
    grid = np.linspace(0, 1, 22)[1:-1]
    for a in grid:
        for b in grid:
            lo, hi = geo.geo_bounds(a, b)
            for which, target in (("min", lo), ("max", hi)):
                B, _, theta = geo.achieve_extreme(a, b, which)
                gap = max(gap, abs(geo.geo_prob(B, theta) - target))
    dt = time.perf_counter() - t0
    passed = record(7, "geodesic containment and attained bounds",
                    outside == 0 and gap < 1e-9 and dt < 20,
                    f"{outside} outside, max gap {gap:.1e}, {dt:.1f} s")
    assert passed


def test_criterion_08_trace_condition():
    rng = np.random.default_rng(8)
    found, effects = 0, 0
    thetas = np.linspace(0, 1, 21)
    while effects < 1000:
        C = geo.random_effect(rng, 2)
        if np.trace(C).real > 1:
            continue
        effects += 1
        for _ in range(10):
            B = geo.build_B(C, geo.random_wavefunction(rng, 2), geo.random_wavefunction(rng, 2))
            if B.delta < 1e-9:
                continue
            a, b = B.B[0, 0].real, B.B[1, 1].real
            if a > 0.5 and b > 0.5:
                found += any(geo.geo_prob(B, t) < 0.5 - 1e-9 for t in thetas * B.delta)
    passed = record(8, "no paradox triple when tr C <= 1", found == 0, f"{found} triples")
    assert passed


def test_criterion_09_exact_walk():
    r2, r3, r6 = np.sqrt(2), np.sqrt(3), np.sqrt(6)
    gap = amp_gap = 0.0
    for n in range(2, 11):
        w = (-n - 2, n + 2)
        U = wk.cmv_matrix(wk.SINGLE_DEFECT_CONFIG, w)
        psi, xi = wk.span_state(*w, 1, 1), wk.span_state(*w, 1, -1)
        triple = wk.walk_geo_game(U, psi, xi, n, np.pi / 4)
        gap = max(gap, np.abs(np.subtract(triple, (2 / 3, 2 / 3, 1 / 3))).max())
        chi = wk.site_state(*w, {(0, wk.UP): 1})
        listed = (
            (psi, {(n, 1): 1 / r2, (n - 1, 1): -1 / r6, (-n, 0): 1 / r3}),
            (xi, {(n, 1): -1 / r2, (n - 1, 1): -1 / r6, (-n, 0): 1 / r3}),
            (chi, {(-n, 0): np.sqrt(2 / 3), (n - 1, 1): -1 / r3}),
        )
        for state, amps in listed:
            ref = wk.site_state(*w, amps).amplitudes
            amp_gap = max(amp_gap, np.abs(wk.evolve(U, state, n).amplitudes - ref).max())
    passed = record(9, "single-defect walk gives (2/3, 2/3, 1/3) and the listed amplitudes",
                    gap < 1e-12 and amp_gap < 1e-12,
                    f"triple gap {gap:.1e}, amplitude gap {amp_gap:.1e}")
    assert passed


def test_criterion_10_symmetry_cases():
    rng = np.random.default_rng(10)
    n_max = 30
    w = (-n_max - 2, n_max + 2)
    thetas = np.linspace(0, 1, 21)
    excess, triples = -np.inf, 0
    for case in ("i", "ii", "iii", "iv", "v", "vi"):
        for _ in range(100):
            U = wk.cmv_matrix(wk.random_symmetric_config(rng, case), w)
            up = wk.site_state(*w, {(0, wk.UP): 1})
            dn = wk.site_state(*w, {(0, wk.DOWN): 1})
            for n in range(1, n_max + 1):
                up, dn = wk.evolve(U, up, 1), wk.evolve(U, dn, 1)
                pos = np.repeat(up.positions > 0, 2)
                X = np.column_stack([up.amplitudes[pos], dn.amplitudes[pos]])
                C = X.T @ X.conj()
                C = 0.5 * (C + C.conj().T)
                excess = max(excess, np.trace(C).real - 1)
                psi, xi = geo.random_wavefunction(rng, 2), geo.random_wavefunction(rng, 2)
                B = geo.build_B(C, psi, xi)
                if B.delta < 1e-9:
                    continue
                a, b = B.B[0, 0].real, B.B[1, 1].real
                if a > 0.5 and b > 0.5:
                    triples += any(geo.geo_prob(B, t) < 0.5 - 1e-9 for t in thetas * B.delta)
    passed = record(10, "symmetric configurations: trace <= 1 and no paradox",
                    excess <= 1e-10 and triples == 0,
                    f"max trace excess {excess:.1e}, {triples} triples")
    assert passed


def test_criterion_11_limit_trends():
    t0 = time.perf_counter()
    s100 = wk.konno_sum_check(wk.WAVEPACKET_COIN, 100)
    s1000 = wk.konno_sum_check(wk.WAVEPACKET_COIN, 1000)
    triple = wk.wavepacket_game(0.05, 0.02, 0.02, 2000)
    dt = time.perf_counter() - t0
    gap = np.abs(np.subtract(triple, (2 / 3, 2 / 3, 1 / 3))).max()
    lo, hi = geo.geo_bounds(*triple[:2])
    passed = record(11, "Konno sum trend and wave-packet triple",
                    abs(s1000 - 1) < 0.05 and abs(s1000 - 1) < abs(s100 - 1)
                    and gap < 0.08 and lo <= triple[2] <= hi and dt < 120,
                    f"sum(100) {s100:.6f}, sum(1000) {s1000:.6f}, "
                    f"triple ({triple[0]:.6f}, {triple[1]:.6f}, {triple[2]:.6f}), {dt:.1f} s")
    assert passed


def test_criterion_12_oracles():
    rng = np.random.default_rng(12)
    pf_err = 0.0
    for _ in range(1000):
        M = random_stochastic(rng, int(rng.integers(2, 7)))
        pf_err = max(pf_err, np.abs(pf_fixed_point(M).result - stationary_eig(M)).max())
    wm_err = 0.0
    rho0 = np.eye(2) / 2
    for _ in range(1000):
        par = qu.random_extremal_params(rng)
        wm_err = max(wm_err, abs(qu.quantum_limit_via_wM(par)
                                 - qu.quantum_win_prob(par.pince_nez(), rho0, 2 ** 20)))
    passed = record(12, "PF vs eigensolver; w/M solve vs channel iteration",
                    pf_err < 1e-9 and wm_err < 1e-6,
                    f"PF error {pf_err:.1e}, w/M error {wm_err:.1e}")
    assert passed
