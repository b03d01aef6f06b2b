"""Sampling of stationary Gaussian paths and the Monte Carlo statistics.

Paths are exact in law: the lag window rho(0..n-1) is embedded into a
circulant of size 2(n - 1) and diagonalized by the FFT; when the
embedding has genuinely negative eigenvalues the sampler falls back to a
dense Cholesky factor of the Toeplitz matrix (up to a size limit).

On top of path generation sit the two Monte Carlo statistics of the
normal approximation argument: the normalized sums
V_n = (1/(sigma_n sqrt(n))) sum phi(X_k) and the inner product
(1/(sigma_n^2 n)) sum_{k,l} phi'(X_k) phi_1(X_l) rho(k - l), whose mean
is exactly one and whose variance controls the total variation distance.

Reproducibility contract: replication r draws from its own generator
seeded with seed + r * REPLICATION_SEED_STRIDE, so batches are
bit-identical for identical (model, n, seed) regardless of chunking.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.fft import irfft, next_fast_len, rfft
from scipy.linalg import cholesky, toeplitz

from .covariance import CovarianceModel, finite_n_variance, validate_psd
from .hermite import SubordinatedFunction, _finite_difference, evaluate_expansion, shift

REPLICATION_SEED_STRIDE = 2 ** 32
DEFAULT_EPS_CLIP = 1e-8
DEFAULT_CHOLESKY_LIMIT = 4096
_PSD_CHECK_SIZE = 128
_CHUNK = 256


@dataclass(eq=False)
class SamplePath:
    """One realization of the stationary Gaussian sequence."""

    values: np.ndarray
    model: CovarianceModel
    seed: int
    method: str


@dataclass(eq=False)
class MonteCarloBatch:
    """Replicated samples of a scalar statistic with summary moments."""

    statistic: str
    samples: np.ndarray
    n: int
    reps: int
    seed: int
    mean: float = field(init=False)
    variance: float = field(init=False)
    std_error: float = field(init=False)

    def __post_init__(self):
        self.mean = float(np.mean(self.samples))
        self.variance = float(np.var(self.samples, ddof=1))
        self.std_error = math.sqrt(self.variance / len(self.samples))


class ToeplitzOperator:
    """Fast multiplication by the symmetric Toeplitz matrix (rho(i-j)).

    The first column is embedded into a circulant of doubled, padded
    length, so one forward and one inverse real FFT per application give
    the exact product without wraparound.
    """

    def __init__(self, first_col: np.ndarray):
        col = np.asarray(first_col, dtype=float)
        self.n = len(col)
        self._col0 = float(col[0])
        self.m = next_fast_len(2 * self.n)
        kernel = np.zeros(self.m)
        kernel[: self.n] = col
        if self.n > 1:
            kernel[self.m - (self.n - 1):] = col[1:][::-1]
        self._fk = rfft(kernel)

    def apply(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.n == 1:
            return x * self._col0
        y = irfft(rfft(x, n=self.m, axis=-1) * self._fk, n=self.m, axis=-1)
        return y[..., : self.n]


def toeplitz_matvec(first_col: np.ndarray, x: np.ndarray) -> np.ndarray:
    """One-shot FFT product by the symmetric Toeplitz matrix of first_col."""
    return ToeplitzOperator(first_col).apply(x)


class PathSampler:
    """Reusable sampler for paths of fixed (model, n).

    Prepares the circulant eigenvalues (or the Cholesky factor on
    fallback) once; individual replications then cost one FFT each.
    """

    def __init__(self, model: CovarianceModel, n: int, method: str = "auto",
                 eps_clip: float = DEFAULT_EPS_CLIP,
                 cholesky_limit: int = DEFAULT_CHOLESKY_LIMIT):
        if n < 1:
            raise ValueError("path length must be positive")
        if method not in ("auto", "circulant_embedding", "cholesky"):
            raise ValueError(f"unknown sampling method {method!r}")
        if not validate_psd(model, min(n, _PSD_CHECK_SIZE)):
            raise ValueError(
                f"model {model.label} fails the positive semidefiniteness "
                f"spot check at size {min(n, _PSD_CHECK_SIZE)}"
            )
        self.model = model
        self.n = n
        self._sqrt_lam = None
        self._chol = None
        if n == 1:
            self.method = "circulant_embedding"
            return
        use_cholesky = method == "cholesky"
        if not use_cholesky:
            r = model.rho_lags(n)
            c = np.concatenate([r, r[-2:0:-1]])
            lam = np.fft.fft(c).real
            if lam.min() < -eps_clip * lam.max():
                if method == "circulant_embedding":
                    raise ValueError(
                        f"circulant embedding of {model.label} at n = {n} has "
                        f"negative eigenvalue mass (min {lam.min():.3e}); "
                        "use the Cholesky fallback"
                    )
                use_cholesky = True
            else:
                self._sqrt_lam = np.sqrt(np.clip(lam, 0.0, None))
                self.method = "circulant_embedding"
        if use_cholesky:
            if n > cholesky_limit:
                raise ValueError(
                    f"embedding failed for {model.label} and n = {n} exceeds "
                    f"the Cholesky limit {cholesky_limit}; exact sampling is "
                    "not available at this size"
                )
            try:
                self._chol = cholesky(toeplitz(model.rho_lags(n)), lower=True)
            except np.linalg.LinAlgError as exc:
                raise ValueError(
                    f"dense Cholesky failed for {model.label} at n = {n}: {exc}"
                ) from None
            self.method = "cholesky"

    def draw(self, seed: int, start: int, stop: int) -> np.ndarray:
        """Paths for replication indices start..stop-1, shape (stop-start, n)."""
        count = stop - start
        n = self.n
        if n == 1:
            out = np.empty((count, 1))
            for i in range(count):
                rng = np.random.default_rng(seed + (start + i) * REPLICATION_SEED_STRIDE)
                out[i, 0] = rng.standard_normal()
            return out
        if self.method == "cholesky":
            z = np.empty((count, n))
            for i in range(count):
                rng = np.random.default_rng(seed + (start + i) * REPLICATION_SEED_STRIDE)
                z[i] = rng.standard_normal(n)
            return z @ self._chol.T
        m = 2 * n - 2
        zhat = np.empty((count, m), dtype=complex)
        inv_sqrt2 = 1.0 / math.sqrt(2.0)
        for i in range(count):
            rng = np.random.default_rng(seed + (start + i) * REPLICATION_SEED_STRIDE)
            z = rng.standard_normal(m)
            zhat[i, 0] = z[0]
            zhat[i, n - 1] = z[n - 1]
            zhat[i, 1: n - 1] = (z[1: n - 1] + 1j * z[n:]) * inv_sqrt2
            zhat[i, n:] = np.conj(zhat[i, 1: n - 1][::-1])
        paths = math.sqrt(m) * np.fft.ifft(self._sqrt_lam * zhat, axis=1).real
        return np.ascontiguousarray(paths[:, :n])


def sample_path(model: CovarianceModel, n: int, seed: int,
                method: str = "auto") -> SamplePath:
    """One exact-in-law path; bit-reproducible for identical inputs."""
    sampler = PathSampler(model, n, method)
    values = sampler.draw(seed, 0, 1)[0]
    return SamplePath(values=values, model=model, seed=seed, method=sampler.method)


def sample_normalized_sum(f: SubordinatedFunction, model: CovarianceModel,
                          n: int, reps: int, seed: int,
                          method: str = "auto", chunk: int = _CHUNK) -> MonteCarloBatch:
    """Monte Carlo batch of V_n = (1/(sigma_n sqrt(n))) sum_k phi(X_k).

    The normalization uses the model variance sigma_n^2 of the attached
    expansion, not the empirical batch variance.
    """
    sampler = PathSampler(model, n, method)
    norm = math.sqrt(finite_n_variance(f.expansion, model, n) * n)
    out = np.empty(reps)
    for lo in range(0, reps, chunk):
        hi = min(lo + chunk, reps)
        paths = sampler.draw(seed, lo, hi)
        out[lo:hi] = np.sum(f.eval(paths), axis=1) / norm
    return MonteCarloBatch("normalized_sum", out, n, reps, seed)


def sample_inner_product(f: SubordinatedFunction, model: CovarianceModel,
                         n: int, reps: int, seed: int,
                         method: str = "auto", chunk: int = _CHUNK) -> MonteCarloBatch:
    """Monte Carlo batch of (1/(sigma_n^2 n)) <phi'(X), T phi_1(X)>.

    T is the Toeplitz matrix of rho, applied through the padded circular
    FFT in O(n log n) per path; phi_1 is synthesized pointwise from the
    shifted expansion.  The batch mean estimates a quantity that equals
    one exactly, and twice the square root of the batch variance is the
    upper bound on the total variation distance.
    """
    dphi = f.weak_derivative
    if dphi is None:
        warnings.warn(
            f"{f.label}: no weak derivative supplied; using a central finite "
            "difference (invalid at isolated kinks)",
            stacklevel=2,
        )
        dphi = _finite_difference(f.eval)
    sampler = PathSampler(model, n, method)
    sigma_sq = finite_n_variance(f.expansion, model, n)
    shifted = shift(f.expansion)
    op = ToeplitzOperator(model.rho_lags(n))
    out = np.empty(reps)
    for lo in range(0, reps, chunk):
        hi = min(lo + chunk, reps)
        paths = sampler.draw(seed, lo, hi)
        lhs = np.asarray(dphi(paths), dtype=float)
        rhs = op.apply(evaluate_expansion(shifted, paths))
        out[lo:hi] = np.sum(lhs * rhs, axis=1) / (sigma_sq * n)
    return MonteCarloBatch("inner_product", out, n, reps, seed)


def estimate_autocovariance(model: CovarianceModel, n: int, reps: int, seed: int,
                            max_lag: int = 10, method: str = "auto",
                            chunk: int = _CHUNK):
    """Sample autocovariances over replicated paths.

    Returns (lags, mean, std_error) where mean[k] averages the per-path
    estimate (1/(n - k)) sum_t X_t X_{t+k}; the process mean is known to
    be zero, so no centering is applied.
    """
    if max_lag >= n:
        raise ValueError("max_lag must be smaller than the path length")
    sampler = PathSampler(model, n, method)
    per_path = np.empty((reps, max_lag + 1))
    for lo in range(0, reps, chunk):
        hi = min(lo + chunk, reps)
        paths = sampler.draw(seed, lo, hi)
        for k in range(max_lag + 1):
            prod = paths[:, : n - k] * paths[:, k:]
            per_path[lo:hi, k] = prod.mean(axis=1)
    mean = per_path.mean(axis=0)
    se = per_path.std(axis=0, ddof=1) / math.sqrt(reps)
    return np.arange(max_lag + 1), mean, se
