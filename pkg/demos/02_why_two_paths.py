"""
Conditioning on the lattice
===========================

For k < n the 2-phi-1 for K_n(q**k) adds O(1) terms to produce a value of
size q**(n*n), and the upward recurrence amplifies its rounding error the
same way.  The lattice evaluators switch to the dual 3-phi-0 (series path)
or to a forward/backward recurrence matched at n = k (recurrence path).
"""
import mpmath as mp

from qcharlier import QParams, alt_q_charlier_recur, alt_q_charlier_series
from qcharlier.polynomials import alt_q_charlier_lattice

mp.mp.dps = 400
p = QParams(q=0.3, a=1.0)


def exact(n, k):
    q = mp.mpf(p.q)
    return mp.fsum(
        mp.qp(q**-n, q, j) * mp.qp(-p.a * q**n, q, j) / mp.qp(q, q, j) * q ** ((k + 1) * j)
        for j in range(n + 1)
    )


print(f"{'n':>3} {'raw series':>12} {'raw recur':>12} {'series path':>12} {'recur path':>12}")
for n in (4, 8, 12):
    ref = exact(n, 1)
    errs = [
        abs((v - ref) / ref)
        for v in (
            alt_q_charlier_series(n, p.q, p),
            alt_q_charlier_recur(n, p.q, p),
            alt_q_charlier_lattice(n, 1, p, "series"),
            alt_q_charlier_lattice(n, 1, p, "recurrence"),
        )
    ]
    print(f"{n:>3} " + " ".join(f"{float(e):12.1e}" for e in errs))
