"""Exact-in-law stationary Gaussian sampling and its fidelity checks.

The sampler embeds the lag window into a circulant matrix whose FFT
eigenvalues must be nonnegative; when they are not it falls back to a
dense Cholesky factor.  Replications draw from per-path generators with
a fixed seed stride, so every batch is bit-reproducible.
"""

import numpy as np

from breuer_major import covariance, simulate

for spec in ("white", "exp:0.5", "exp:-0.6", "pow:0.8", "fgn:0.7", "fgn:0.3"):
    m = covariance.from_spec(spec)
    sampler = simulate.PathSampler(m, 1024)
    print(f"{spec:8s} -> method {sampler.method}")

print("\nSample autocovariance against the model, exp:0.5 at n = 2048:")
m = covariance.exponential(0.5)
lags, mean, se = simulate.estimate_autocovariance(m, 2048, 2000, seed=1, max_lag=6)
for k in lags:
    print(f"  lag {k}: estimate {mean[k]:+.5f} +- {se[k]:.5f}, "
          f"model {m.rho(int(k)):+.5f}")

print("\nDeterminism: same (model, n, seed) gives identical bytes:")
a = simulate.sample_path(m, 512, seed=7)
b = simulate.sample_path(m, 512, seed=7)
print(f"  identical: {a.values.tobytes() == b.values.tobytes()}")

print("\nFast Toeplitz product against the dense matrix (n = 512):")
from scipy.linalg import toeplitz
col = m.rho_lags(512)
x = np.random.default_rng(0).standard_normal(512)
err = np.max(np.abs(simulate.toeplitz_matvec(col, x) - toeplitz(col) @ x))
print(f"  max abs deviation: {err:.2e}")
