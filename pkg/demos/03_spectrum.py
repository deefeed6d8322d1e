"""
The spectrum of I_1
===================

Truncations of the Jacobi operator reproduce the eigenvalues 1, q, q**2, ...
and the normalised eigenvectors are the columns of the duality matrix.
"""
import numpy as np

from qcharlier import QParams, build_truncated_I1, eigen_sym_tridiag, spectrum_report
from qcharlier.jacobi import duality_matrix

p = QParams(q=0.7, a=2.5)
T = build_truncated_I1(80, p)
vals, vecs = eigen_sym_tridiag(T, want_vectors=True)

r = spectrum_report(80, p, k_top=8)
for m in r.matched:
    print(f"k={m.k}  eigenvalue={m.eigenvalue:.16f}  q^k={m.target:.16f}  dev={m.deviation:+.1e}")
print("unmatched mass:", r.unmatched_mass)

# eigenvector for q**2 against column 2 of the duality matrix
A = duality_matrix(80, 3, p, method="series").entries
v = vecs[:, 2] * np.sign(vecs[0, 2])
col = A[:, 2] * np.sign(A[0, 2])
print("max |v - column|:", np.max(np.abs(v - col)))

# rows and columns of the 80 x 80 block are orthonormal
B = duality_matrix(80, 80, p).entries
print("Gram defect:", np.max(np.abs(B[:10] @ B[:10].T - np.eye(10))))
