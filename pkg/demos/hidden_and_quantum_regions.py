"""Hidden two-state games against single-qubit quantum games.

Both models are scored by the long-run probability of observing a win.
For hidden two-state games the mixture is confined to an explicit
interval; qubit games with the same individual values escape it.
"""

import time

import numpy as np

from parrondo.hidden import hidden_bounds, hidden_region_sample
from parrondo.quantum import combine_quantum, quantum_limit
from parrondo.region import multi_kraus_sample, quantum_region_max, quantum_region_min

p, P, Pp = 0.5, 0.6, 0.6
lo, hi = hidden_bounds(p, P, Pp)
print(f"hidden interval for p={p}, P_A=P'_A={P}: ({lo:.3f}, {hi:.3f})")

obs_lo, obs_hi, bad = hidden_region_sample(p, P, Pp, 200_000, seed=0)
print(f"200k sampled hidden pairs reach [{obs_lo:.4f}, {obs_hi:.4f}], violations {bad}")

t0 = time.perf_counter()
low = quantum_region_min(p, P, Pp, restarts=64, seed=0)
high = quantum_region_max(p, P, Pp, restarts=64, seed=0)
print(f"\nqubit optimum: min {low.value:.6f}, max {high.value:.6f}"
      f"  ({time.perf_counter() - t0:.1f} s, first call includes compilation)")

# the minimizing pair, checked by plain channel iteration
a, b = low.params.pince_nez(), low.params_prime.pince_nez()
print("check: P_A", round(quantum_limit(a), 10), " P'_A", round(quantum_limit(b), 10),
      " P_comb", round(quantum_limit(combine_quantum(a, b, p)), 10))
print("winning Kraus operator of the first game:\n", np.round(low.params.kraus()[0], 4))

vals = multi_kraus_sample(p, P, Pp, 50, seed=1)
print(f"\n50 random three-operator pairs: P_comb in [{vals.min():.4f}, {vals.max():.4f}]")
