"""Maximal correlation of Gaussian subspaces and the covariance bound.

theta is the top singular value of the whitened cross-Gram; for
functionals F1, F2 of the two subspace restrictions with F1 of Hermite
rank p, the covariance is bounded by theta^p times the standard
deviations.  On Hermite polynomials of rigidly correlated scalars the
bound is an equality, which is what makes it powerful.
"""

import numpy as np

from breuer_major import cli, gebelein, hermite

print("theta workout:")
pair = gebelein.SubspacePair([[1.0]], [[1.0]], [[0.7]])
print(f"  one-dimensional, <e1, e2> = 0.7: theta = {pair.theta}")
rng = np.random.default_rng(3)
p2 = gebelein.random_pair(rng, 2, 3)
print(f"  random 2x3 pair: theta = {p2.theta:.6f}")

print("\nEquality family, F = G = H_p under rigid correlation 0.5:")
for p in (1, 2, 4, 8):
    chk = gebelein.check_rigid(
        lambda x, _p=p: hermite.hermite_eval(_p, x),
        lambda x, _p=p: hermite.hermite_eval(_p, x), 0.5, p)
    print(f"  p = {p}: lhs = {chk.lhs:12.6f}, rhs = {chk.rhs:12.6f}, "
          f"tight = {chk.tight}")

print("\nStrict cases on a random pair (rank verified by projections):")
pair = gebelein.random_pair(rng, 2, 2, theta_range=(0.3, 0.8))
# directions of unit length in each Gram geometry, so that W(xi) is
# standard normal and H_p(W(xi)) is exactly a rank-p functional
u1 = np.linalg.solve(np.linalg.cholesky(pair.G1).T, np.array([1.0, 0.0]))
u2 = np.linalg.solve(np.linalg.cholesky(pair.G2).T, np.array([0.0, 1.0]))
for p in (1, 2, 3):
    F1 = lambda x, _p=p: hermite.hermite_eval(_p, x @ u1)
    F2 = lambda x, _p=p: hermite.hermite_eval(_p, x @ u2)
    chk = gebelein.check_gebelein(F1, p, F2, pair)
    print(f"  rank {p}: lhs = {chk.lhs:.6f} <= rhs = {chk.rhs:.6f}"
          f" (theta = {chk.theta:.4f})")

print("\nRandomized verification suite (60 instances):")
result = cli.run_gebelein_suite(count=60, seed=8, dims=3)
for key, val in sorted(result.summary().items()):
    print(f"  {key}: {val}")
