"""
Solving a small bivariate system and tracking a divergent root
==============================================================

Two equations in two unknowns, five terms each. For the parameter
value eps = 1 the system has three clean roots. As eps shrinks toward
zero one root runs off to infinity, and the solver keeps full accuracy
on it because the compactification holds that root at finite
coordinates.
"""

import numpy as np

from toricsolve import solve


def equations(eps):
    f1 = [
        ((0, 0), -1.0),
        ((1, 0), 1.0),
        ((2, 0), 1.0),
        ((0, 1), 1.0),
        ((1, 1), 1.0),
    ]
    f2 = [
        ((0, 0), -2.0),
        ((1, 0), 2.0),
        ((2, 0), 5.0 - 2.0 * eps),
        ((0, 1), 4.0),
        ((1, 1), 5.0),
    ]
    return [f1, f2]


# the normal fan of the Minkowski sum is derived from the supports
result = solve(equations(1.0), seed=0)
print("pair:", result.pair)
print("delta_plus:", result.delta_plus)
print()
print("roots at eps = 1 (exact values: (-2, 1) and (+-1/sqrt2, -+3/sqrt2 + 2)):")
for s in result.solutions:
    t1, t2 = s.t
    print(f"  t = ({t1.real:+.12f}, {t2.real:+.12f})   "
          f"residual {max(s.residuals):.1e}")

# now stiffen the system: eps = 10^-e for growing e
print()
print("divergent root under eps = 10^-e:")
for e in (0, 2, 4, 6, 8):
    result = solve(equations(10.0 ** (-e)), seed=0)
    big = max(result.solutions, key=lambda s: s.norm)
    print(f"  e = {e}:  |t| = {big.norm:.6e}   "
          f"max residual {result.max_residual():.1e}")

# the large root behaves like t1 ~ -10^e / sqrt(2), so the norm grows
# by 100x per step while the residuals stay at machine scale
print()
print("reference: 1e8 * sqrt(2) =", f"{1e8 * np.sqrt(2.0):.6e}")
