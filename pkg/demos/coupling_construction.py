"""The coupling maps that reduce any subspace pair to the rigid case.

Given two subspaces with maximal correlation theta strictly inside
(0, 1), two maps tau_1 = theta^{-1} pi_{H1} and tau_2 = sqrt(Id -
U/theta^2), with U the composition of the two orthogonal projections
restricted to H2, satisfy a pairing identity and an isometry.  Pushing
H2 through them realizes the pair as a restriction of two rigidly
correlated processes, which is the whole reduction.
"""

import numpy as np

from breuer_major import gebelein

print("Scalar warm-up, <e1, e2> = 0.6:")
pair = gebelein.SubspacePair([[1.0]], [[1.0]], [[0.6]])
cpl = gebelein.rigid_coupling(pair)
print(f"  tau_1 = {cpl.tau1.ravel()}, tau_2 = {cpl.tau2.ravel()} "
      "(the second leg vanishes: one dimension is already rigid)")

print("\nRandom pairs, residuals of the two defining properties:")
rng = np.random.default_rng(5)
for i in range(5):
    d1, d2 = int(rng.integers(1, 4)), int(rng.integers(1, 4))
    pair = gebelein.random_pair(rng, d1, d2, theta_range=(0.05, 0.95))
    cpl = gebelein.rigid_coupling(pair)
    print(f"  {d1}x{d2} pair, theta = {pair.theta:.4f}: "
          f"|U| = {cpl.u_norm:.6f} <= theta^2 = {pair.theta ** 2:.6f}, "
          f"pairing residual {cpl.pairing_residual:.1e}, "
          f"isometry residual {cpl.isometry_residual:.1e}")

print("\nBoundary cases are rejected (theta = 0 and theta = 1):")
for g12 in (0.0, 1.0):
    try:
        gebelein.rigid_coupling(gebelein.SubspacePair([[1.0]], [[1.0]], [[g12]]))
    except ValueError as exc:
        print(f"  <e1, e2> = {g12}: {exc}")
