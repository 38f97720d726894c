import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from parrondo.geodesic import (BMatrix, achieve_extreme, build_B, dist_round, dist_trace,
                               geo_bounds, geo_prob, geodesic_point, no_paradox_check,
                               phase_align, random_effect, random_wavefunction)
from parrondo.linalg import ValidationError, trace_norm

from oracles import geo_direct

R2 = np.sqrt(2)


def test_trace_distance_identity(rng):
    for _ in range(1000):
        d = int(rng.integers(2, 6))
        psi, xi = random_wavefunction(rng, d), random_wavefunction(rng, d)
        assert abs(dist_trace(psi, xi) - 2 * np.sin(dist_round(psi, xi))) < 1e-12


def test_trace_distance_is_trace_norm(rng):
    psi, xi = random_wavefunction(rng, 3), random_wavefunction(rng, 3)
    P = np.outer(psi, psi.conj()) - np.outer(xi, xi.conj())
    assert abs(dist_trace(psi, xi) - trace_norm(P)) < 1e-12


def test_phase_align_gives_nonnegative_overlap(rng):
    for _ in range(50):
        psi, xi = random_wavefunction(rng, 4), random_wavefunction(rng, 4)
        ov = np.vdot(psi, phase_align(psi, xi))
        assert abs(ov.imag) < 1e-14 and ov.real >= 0


def test_midpoint_of_spin_pair():
    psi = np.array([1, 1]) / R2
    xi = np.array([1, -1]) / R2
    assert np.allclose(geodesic_point(psi, xi, np.pi / 4), [1, 0], atol=1e-15)


def test_unit_speed(rng):
    psi, xi = random_wavefunction(rng, 3), random_wavefunction(rng, 3)
    d = dist_round(psi, xi)
    h = 1e-5
    for t in np.linspace(0.1, 0.9, 5) * d:
        ratio = dist_round(geodesic_point(psi, xi, t + h), geodesic_point(psi, xi, t)) / h
        assert abs(ratio - 1) < 1e-4


def test_geodesic_endpoints(rng):
    psi, xi = random_wavefunction(rng, 3), random_wavefunction(rng, 3)
    end = geodesic_point(psi, xi, dist_round(psi, xi))
    assert dist_round(end, xi) < 1e-7


def test_B_of_projector(rng):
    psi, xi = random_wavefunction(rng, 3), random_wavefunction(rng, 3)
    B = build_B(np.outer(psi, psi.conj()), psi, xi)
    c = np.cos(B.delta)
    assert np.allclose(B.B, [[1, c], [c, c * c]], atol=1e-12)


def test_geo_prob_example():
    B = BMatrix(np.array([[2 / 3, -1 / 3], [-1 / 3, 2 / 3]]), np.pi / 2)
    assert abs(geo_prob(B, np.pi / 4) - 1 / 3) < 1e-15


def test_geo_prob_matches_direct(rng):
    for _ in range(200):
        d = int(rng.integers(2, 6))
        eta = random_effect(rng, d)
        psi, xi = random_wavefunction(rng, d), random_wavefunction(rng, d)
        B = build_B(eta, psi, xi)
        t = rng.random() * B.delta
        assert abs(geo_prob(B, t) - geo_direct(eta, psi, xi, t)) < 1e-10


def test_bounds_example():
    assert np.allclose(geo_bounds(2 / 3, 2 / 3), (1 / 3, 1), atol=1e-15)


def test_extreme_cases():
    B, delta, theta = achieve_extreme(2 / 3, 2 / 3, "min")
    assert abs(delta - np.pi / 2) < 1e-15 and abs(np.sin(theta) - np.sqrt(0.5)) < 1e-15
    assert np.allclose(B.B, [[2 / 3, -1 / 3], [-1 / 3, 2 / 3]], atol=1e-15)
    assert abs(geo_prob(B, theta) - 1 / 3) < 1e-12
    B, delta, theta = achieve_extreme(0.3, 0.3, "max")
    assert abs(delta - np.pi / 2) < 1e-15 and abs(np.sin(theta) - np.sqrt(0.5)) < 1e-15
    assert abs(geo_prob(B, theta) - 0.6) < 1e-12
    B, _, theta = achieve_extreme(0.7, 0.7, "max")
    assert abs(geo_prob(B, theta) - 1) < 1e-12


def test_extreme_rejects_boundary():
    with pytest.raises(ValidationError):
        achieve_extreme(0.0, 0.5, "min")
    with pytest.raises(ValidationError):
        achieve_extreme(0.5, 0.5, "middle")


def test_B_order_interval_enforced():
    with pytest.raises(ValidationError):
        BMatrix(np.array([[1.0, 0.9], [0.9, 1.0]]), np.pi / 2)


def test_no_paradox_check():
    assert no_paradox_check(np.diag([0.5, 0.5]))
    # spin-plane restriction of the single-defect walk example
    C = np.array([[2 / 3, 0], [0, 2 / 3]])
    assert not no_paradox_check(C)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.001, 0.999), st.floats(0.001, 0.999), st.sampled_from(["min", "max"]))
def test_extremes_hit_bounds(a, b, which):
    B, delta, theta = achieve_extreme(a, b, which)
    lo, hi = geo_bounds(a, b)
    assert abs(geo_prob(B, theta) - (lo if which == "min" else hi)) < 1e-9
    assert 0 <= theta <= delta + 1e-12


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**31 - 1), st.floats(0, 1))
def test_containment(dim, seed, frac):
    rng = np.random.default_rng(seed)
    eta = random_effect(rng, dim)
    B = build_B(eta, random_wavefunction(rng, dim), random_wavefunction(rng, dim))
    lo, hi = geo_bounds(B.B[0, 0].real, B.B[1, 1].real)
    assert lo - 1e-9 <= geo_prob(B, frac * B.delta) <= hi + 1e-9


@pytest.mark.parametrize("a,b", [(2 / 3, 2 / 3), (0.2, 0.5), (0.9, 0.35), (0.55, 0.95)])
def test_extremal_arcs_sweep_whole_region(a, b):
    # along each extremal construction the value moves continuously from
    # P_A to the bound, so the two arcs together cover [lo, hi]
    lo, hi = geo_bounds(a, b)
    seen = []
    for which in ("min", "max"):
        B, delta, theta = achieve_extreme(a, b, which)
        seen += [geo_prob(B, t) for t in np.linspace(0, theta, 2001)]
    seen = np.sort(seen)
    assert abs(seen[0] - lo) < 1e-9 and abs(seen[-1] - hi) < 1e-9
    assert np.diff(seen).max() < 2e-3
