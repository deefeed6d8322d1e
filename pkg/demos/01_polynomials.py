"""
Alternative q-Charlier polynomials and their duals
==================================================

K_n(lambda) is a terminating 2-phi-1.  On the lattice lambda = q**k it is
tied to the dual polynomial d_k, a terminating 3-phi-0 in the variable
mu(n) = q**-n - a q**n.
"""
import numpy as np

from qcharlier import QParams, alt_q_charlier_series, dual_poly_series, mu
from qcharlier.polynomials import alt_q_charlier_lattice

p = QParams(q=0.5, a=1.0)

# low degrees from the series
for n in range(4):
    print(n, [round(alt_q_charlier_series(n, lam, p), 6) for lam in (0.0, 0.25, 1.0)])

# K_n(1) collapses to a single power
for n in range(6):
    print(n, alt_q_charlier_lattice(n, 0, p), (-p.a) ** n * p.q ** (n * n))

# the duality: K_m(q**n) = (-a)**m q**(m*m) d_n(mu(m))
m, n = 5, 3
lhs = alt_q_charlier_lattice(m, n, p)
rhs = (-p.a) ** m * p.q ** (m * m) * dual_poly_series(n, m, p)
print("K_5(q^3) =", lhs, " dual side =", rhs)

# the dual family lives on a q-quadratic lattice
print("mu(m):", np.array([mu(k, p) for k in range(6)]))
