"""
Counting the 27 lines on a random cubic surface
===============================================

A classical count: every smooth cubic surface in projective 3-space
contains exactly 27 lines. Writing a line as the span of the rows of

    [ 1  0  s  u ]
    [ 0  1  t  v ]

and restricting the cubic form to it gives a binary cubic in the line
parameter whose four coefficients must all vanish. That is a square
system in (s, t, u, v) whose Newton polytopes are products of
triangles, so it compactifies over a product of two projective planes.
The chart misses some lines; those come back as boundary solutions.
"""

import numpy as np

from toricsolve import solve

# a random cubic surface: 20 coefficients, one per cubic monomial
rng = np.random.default_rng(0)
coeffs = rng.standard_normal(20) + 1j * rng.standard_normal(20)
cubic_monomials = [
    (i, j, k, 3 - i - j - k)
    for i in range(4) for j in range(4 - i) for k in range(4 - i - j)
]
surface = dict(zip(cubic_monomials, coeffs))


def poly_mul(p, q):
    """Multiply dicts keyed by ((s,t,u,v) exponent, (lambda,mu) exponent)."""
    out = {}
    for (e1, l1), c1 in p.items():
        for (e2, l2), c2 in q.items():
            key = (tuple(a + b for a, b in zip(e1, e2)),
                   tuple(a + b for a, b in zip(l1, l2)))
            out[key] = out.get(key, 0.0) + c1 * c2
    return out


# the four projective coordinates along the line, as polynomials in
# (s, t, u, v) and the line parameter (lambda, mu)
x = [
    {((0, 0, 0, 0), (1, 0)): 1.0},
    {((0, 0, 0, 0), (0, 1)): 1.0},
    {((1, 0, 0, 0), (1, 0)): 1.0, ((0, 1, 0, 0), (0, 1)): 1.0},
    {((0, 0, 1, 0), (1, 0)): 1.0, ((0, 0, 0, 1), (0, 1)): 1.0},
]

restricted = {}
for mono, c in surface.items():
    term = {((0, 0, 0, 0), (0, 0)): c}
    for var, power in zip(x, mono):
        for _ in range(power):
            term = poly_mul(term, var)
    for key, val in term.items():
        restricted[key] = restricted.get(key, 0.0) + val

# group by the power of the line parameter: four equations in (s,t,u,v)
equations = {}
for (expo, line_pow), c in restricted.items():
    equations.setdefault(line_pow, []).append((expo, c))
system = [equations[k] for k in sorted(equations)]
print("equations:", len(system),
      " terms per equation:", [len(eq) for eq in system])

rays = [
    (0, 0, 1, 0), (0, 0, 0, 1), (-1, 0, -1, 0),
    (0, -1, 0, -1), (1, 0, 0, 0), (0, 1, 0, 0),
]
result = solve(system, rays=rays, seed=0)

torus = [s for s in result.solutions if s.on_torus]
boundary = [s for s in result.solutions if not s.on_torus]
print("total multiplicity:", result.delta_plus)
print("lines visible in the chart:", len(torus))
print("boundary points:", len(boundary),
      " multiplicities:", [s.multiplicity for s in boundary])
print("max residual over the 27 lines:",
      f"{max(max(s.residuals) for s in torus):.1e}")

# spot check: plug a recovered line back into the surface equation
s_, t_, u_, v_ = torus[0].t
worst = 0.0
for lam, mu in [(1.0, 0.3), (0.2, 1.0), (1.0, -1.0)]:
    pt = (lam, mu, lam * s_ + mu * t_, lam * u_ + mu * v_)
    val = sum(c * np.prod([p ** e for p, e in zip(pt, mono)])
              for mono, c in surface.items())
    worst = max(worst, abs(val))
print("cubic form along one recovered line:", f"{worst:.1e}")
