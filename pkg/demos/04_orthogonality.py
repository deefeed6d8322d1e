"""
Orthogonality on the two lattices
=================================

K_m is orthogonal on {q**n}; d_n is orthogonal on {mu(m)} with the weight
(1 + a q**2m) a**m q**(m(3m-1)/2) / ((-a q**m; q)_inf (q;q)_m).
"""
import numpy as np

from qcharlier import QParams, orthogonality_dual, orthogonality_primal

p = QParams(q=0.5, a=0.8)

G = np.array([[orthogonality_primal(i, j, p).lhs for j in range(5)] for i in range(5)])
H = np.array([orthogonality_primal(i, i, p).rhs for i in range(5)])
print("primal Gram / norms:")
print(np.round(G / np.sqrt(np.outer(H, H)), 12))

G = np.array([[orthogonality_dual(i, j, p).lhs for j in range(5)] for i in range(5)])
H = np.array([orthogonality_dual(i, i, p).rhs for i in range(5)])
print("dual Gram / norms:")
print(np.round(G / np.sqrt(np.outer(H, H)), 12))
