"""A three-state pair with exactly one hidden mode.

We look at the pair from four angles: the Kalman rank, the PBH test, the
full uncontrollable basis, and the Kalman decomposition that isolates the
hidden mode in its own block.
"""
import numpy as np

from hetnet import (is_xi_uncontrollable, kalman_decomposition, kalman_test, pbh_test,
                    uncontrollable_basis)

A = np.array([[1.0, 2, 0], [1, 1, 1], [2, 1, 0]])
b = np.array([0.0, -1, 3])

rank, ok = kalman_test(A, b)
print(f"Kalman rank {rank} of {A.shape[0]}, controllable: {ok}")

ok, (lam, xi) = pbh_test(A, b)
print(f"PBH fails at eigenvalue {lam:.6f}")
print("witness, rescaled so the last entry is 2:", np.round(2 * xi / xi[-1], 10))

# the basis is the whole story: every left eigenvector orthogonal to b
basis = uncontrollable_basis(A, b)
for lam, V in basis.groups:
    print(f"group at {lam:.6f} with {V.shape[1]} vector(s)")

# any nonzero multiple describes the same hidden direction
print("(5, 6, 2) describes it:", is_xi_uncontrollable(A, b, [[5, 6, 2]]))
print("(10, 12, 4) too:", is_xi_uncontrollable(A, b, [[10, 12, 4]]))
print("but (1, 0, 0) does not:", is_xi_uncontrollable(A, b, [[1, 0, 0]]))

kd = kalman_decomposition(A, b)
np.set_printoptions(precision=4, suppress=True)
print(f"\ncontrollable part has dimension {kd.dim_c}")
print("companion block:\n", kd.Ac)
print("hidden block:", kd.Au.ravel())
print("T A T^-1:\n", kd.T @ A @ kd.T_inv)
