"""Observed Markov games: two states are safe, three states are not.

With two states the long-run value of any coin-flip mixture stays between
the values of the two games.  A third state lets the mixture land almost
anywhere in (0, 1) while each game on its own keeps its value.
"""

import numpy as np

from parrondo.classical import (ClassicalGame, classical_limit, combine_classical,
                                make_S, make_T, make_Tprime, two_state_region_check,
                                zeta_upper)


def limit(M):
    d = len(M)
    return classical_limit(ClassicalGame(M, (0,), np.ones(d) / d))


# two states: sweep the free rate of both games and the coin bias
for P, Pp in [(0.6, 0.6), (0.9, 0.3), (0.7, 0.55)]:
    ok, lo, hi = two_state_region_check(P, Pp, 0.5, 40)
    print(f"two states  P={P:.2f} P'={Pp:.2f}: mixture in [{lo:.4f}, {hi:.4f}]  ok={ok}")

S = make_S(0.6, 0.5 * zeta_upper(0.6))
print("make_S(0.6, .):\n", S, "\nlimit", limit(S))

# three states: both games win 70% of the time, the mixture does not
eps, p = 1e-3, 0.5
print("\nthree states, eps = 1e-3, P = P' = 0.7")
print("   s    P_A     P_A'    P_comb")
for s in np.linspace(0, 1, 6):
    T, Tp = make_T(0.7, eps, s), make_Tprime(0.7, eps)
    g = ClassicalGame(T, (0,), np.ones(3) / 3)
    gp = ClassicalGame(Tp, (0,), np.ones(3) / 3)
    comb = classical_limit(combine_classical(g, gp, p))
    print(f"  {s:.1f}  {limit(T):.4f}  {limit(Tp):.4f}  {comb:.4f}")
