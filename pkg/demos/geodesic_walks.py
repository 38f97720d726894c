"""One-round games on great circles, and quantum walks that play them.

An effect ``eta`` scores a wavefunction by ``<eta g, g>``.  Along the
shortest arc from ``psi`` to ``xi`` the midpoint can score far below both
endpoints.  A single defect in an otherwise free walk produces exactly
2/3, 2/3 and 1/3.
"""

import numpy as np

from parrondo.geodesic import achieve_extreme, geo_bounds, geo_prob
from parrondo.walks import (SINGLE_DEFECT_CONFIG, WAVEPACKET_COIN, cmv_matrix,
                            konno_sum_check, span_state, walk_geo_game, wavepacket_game)

for a, b in [(2 / 3, 2 / 3), (0.3, 0.3), (0.9, 0.8)]:
    lo, hi = geo_bounds(a, b)
    B, delta, theta = achieve_extreme(a, b, "min")
    print(f"P_A={a:.3f} P'_A={b:.3f}: region [{lo:.3f}, {hi:.3f}],"
          f" min attained {geo_prob(B, theta):.6f} at theta/delta={theta / delta:.3f}")

print("\nsingle-defect walk, psi = up+down, xi = up-down, midpoint of the arc")
for n in (2, 5, 10):
    w = (-n - 2, n + 2)
    U = cmv_matrix(SINGLE_DEFECT_CONFIG, w)
    triple = walk_geo_game(U, span_state(*w, 1, 1), span_state(*w, 1, -1), n, np.pi / 4)
    print(f"  n={n:2d}: " + "  ".join(f"{t:.12f}" for t in triple))

print("\nconstant coin: right-moving weight of up plus down starts")
for n in (10, 100, 1000):
    print(f"  n={n:4d}: {konno_sum_check(WAVEPACKET_COIN, n):.6f}")

print("\nGaussian wave packets, eps = 0.05, sigma = 0.02")
for n in (500, 2000):
    print(f"  n={n}: " + "  ".join(f"{t:.6f}" for t in wavepacket_game(0.05, 0.02, 0.02, n)))
