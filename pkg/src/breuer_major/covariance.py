"""Covariance models and the variance sums of the subordinated CLT.

A model is an evaluator k -> rho(k) with rho(0) = 1, rho symmetric and
bounded by one.  On top of it sit the lag-window power sums
sum_{|k| < n} |rho(k)|^b, the exact finite-n variance of the normalized
sums, and the limiting variance sigma^2 = sum_l a_l^2 l! sum_k rho(k)^l
with an explicit lag truncation bound.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.linalg import toeplitz

from .hermite import HermiteExpansion, hermite_rank

DEGENERATE_TOL = 1e-12
DEFAULT_LAG_HORIZON = 10 ** 6
DEFAULT_DENSE_LIMIT = 2048
_PSD_TOL = 1e-8
_TAIL_WARN_FRACTION = 0.01

_FAMILIES = ("white", "exponential", "power_law", "fgn", "table")


@dataclass(frozen=True)
class CovarianceModel:
    """Stationary covariance sequence rho with unit variance.

    Families: white noise, exponential rho(k) = theta^|k| with
    theta in (-1, 1), power law rho(k) = (1 + |k|)^(-alpha) with
    alpha > 0, fractional Gaussian noise increments with Hurst index
    H in (0, 1), and explicit finite tables (zero beyond the last lag).
    """

    family: str
    params: tuple = ()
    table_values: tuple = ()
    label: str = field(default="", compare=False)

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown covariance family {self.family!r}")
        if self.family == "exponential":
            (theta,) = self.params
            if not -1.0 < theta < 1.0:
                raise ValueError(f"exponential parameter theta = {theta} not in (-1, 1)")
        elif self.family == "power_law":
            (alpha,) = self.params
            if alpha <= 0.0:
                raise ValueError(f"power law exponent alpha = {alpha} must be positive")
        elif self.family == "fgn":
            (hurst,) = self.params
            if not 0.0 < hurst < 1.0:
                raise ValueError(f"Hurst index {hurst} not in (0, 1)")
        elif self.family == "table":
            vals = self.table_values
            if len(vals) == 0 or abs(vals[0] - 1.0) > 1e-12:
                raise ValueError("table models must start with rho(0) = 1")
            if any(abs(v) > 1.0 + 1e-12 for v in vals):
                raise ValueError("table values must satisfy |rho(k)| <= 1")
        if not self.label:
            object.__setattr__(self, "label", _default_label(self))

    def rho(self, k):
        """rho(k), vectorized over integer lags of either sign."""
        arr = np.asarray(k)
        ak = np.abs(arr).astype(float)
        if self.family == "white":
            out = (ak == 0).astype(float)
        elif self.family == "exponential":
            (theta,) = self.params
            out = abs(theta) ** ak
            if theta < 0:
                out = np.where(ak % 2 == 1, -out, out)
        elif self.family == "power_law":
            (alpha,) = self.params
            out = (1.0 + ak) ** (-alpha)
        elif self.family == "fgn":
            (hurst,) = self.params
            h2 = 2.0 * hurst
            out = 0.5 * ((ak + 1.0) ** h2 - 2.0 * ak ** h2 + np.abs(ak - 1.0) ** h2)
        else:
            vals = np.asarray(self.table_values, dtype=float)
            idx = np.minimum(ak.astype(int), len(vals) - 1)
            out = np.where(ak < len(vals), vals[idx], 0.0)
        if arr.ndim == 0:
            return float(out)
        return out

    def rho_lags(self, n: int) -> np.ndarray:
        """rho(0), ..., rho(n - 1)."""
        return self.rho(np.arange(n))


def _default_label(m: CovarianceModel) -> str:
    if m.family == "white":
        return "white"
    if m.family == "exponential":
        return f"exp:{m.params[0]:g}"
    if m.family == "power_law":
        return f"pow:{m.params[0]:g}"
    if m.family == "fgn":
        return f"fgn:{m.params[0]:g}"
    return f"table[{len(m.table_values)}]"


def white() -> CovarianceModel:
    return CovarianceModel("white")


def exponential(theta: float) -> CovarianceModel:
    return CovarianceModel("exponential", (float(theta),))


def power_law(alpha: float) -> CovarianceModel:
    return CovarianceModel("power_law", (float(alpha),))


def fgn_increments(hurst: float) -> CovarianceModel:
    return CovarianceModel("fgn", (float(hurst),))


def table(values) -> CovarianceModel:
    return CovarianceModel("table", (), tuple(float(v) for v in values))


def from_spec(spec: str) -> CovarianceModel:
    """Parse a model literal: white, exp:t, pow:a, fgn:H or table:file.csv.

    Table files hold rows ``k,rho(k)`` for k = 0, 1, 2, ... in order.
    """
    name, _, arg = spec.partition(":")
    name = name.strip()
    if name == "white":
        return white()
    try:
        if name == "exp":
            return exponential(float(arg))
        if name == "pow":
            return power_law(float(arg))
        if name == "fgn":
            return fgn_increments(float(arg))
    except ValueError as exc:
        raise ValueError(f"bad model spec {spec!r}: {exc}") from None
    if name == "table":
        values = []
        with open(arg, newline="") as fh:
            for row_num, row in enumerate(csv.reader(fh)):
                if not row or row[0].strip().startswith("#"):
                    continue
                k, v = int(row[0]), float(row[1])
                if k != len(values):
                    raise ValueError(
                        f"table file {arg}: expected lag {len(values)} at row "
                        f"{row_num}, got {k}"
                    )
                values.append(v)
        return table(values)
    raise ValueError(f"unknown model spec {spec!r}")


def abs_power_sum(model: CovarianceModel, n: int, b: float) -> float:
    """sum_{|k| < n} |rho(k)|^b for b >= 1."""
    if n < 1:
        raise ValueError("horizon n must be at least 1")
    if b < 1.0:
        raise ValueError("exponent b must be at least 1")
    r = np.abs(model.rho_lags(n))
    return 1.0 + 2.0 * float(np.sum(r[1:] ** b))


class SigmaLimit(NamedTuple):
    value: float
    lag_tail_bound: float


def _lag_tail_bounds(model: CovarianceModel, orders: np.ndarray,
                     horizon: int, rank: int) -> np.ndarray:
    """Upper estimates of sum_{|k| > horizon} |rho(k)|^l per order l."""
    if model.family in ("white", "table"):
        return np.zeros_like(orders, dtype=float)
    if model.family == "exponential":
        t = abs(model.params[0])
        if t == 0.0:
            return np.zeros_like(orders, dtype=float)
        logt = math.log(t)
        out = np.array([
            2.0 * math.exp(l * (horizon + 1) * logt) / (1.0 - t ** l)
            if l * (horizon + 1) * logt > -700 else 0.0
            for l in orders
        ])
        return out
    if model.family == "power_law":
        alpha = model.params[0]
        if alpha * rank <= 1.0:
            raise ValueError(
                f"covariance powers not summable at Hermite rank {rank}: "
                f"alpha * d = {alpha * rank:g} <= 1, the limiting variance diverges"
            )
        return np.array([
            2.0 * (1.0 + horizon) ** (1.0 - alpha * l) / (alpha * l - 1.0)
            for l in orders
        ])
    # fgn: |rho(k)| decays like k^(2H - 2); compare to a scaled power law.
    hurst = model.params[0]
    if hurst == 0.5:
        return np.zeros_like(orders, dtype=float)
    g = 2.0 - 2.0 * hurst
    if g * rank <= 1.0:
        raise ValueError(
            f"covariance powers not summable at Hermite rank {rank}: "
            f"(2 - 2H) * d = {g * rank:g} <= 1, the limiting variance diverges"
        )
    edge = abs(float(model.rho(horizon)))
    return np.array([
        2.0 * edge ** l * horizon / (g * l - 1.0) for l in orders
    ])


def limiting_variance(e: HermiteExpansion, model: CovarianceModel,
                      lag_horizon: int | None = None) -> SigmaLimit:
    """Double-truncated sigma^2 = sum_{l >= d} a_l^2 l! sum_k rho(k)^l.

    Sums lags |k| <= horizon for every active order of the expansion and
    reports an analytic bound on the discarded lag tail (an estimate for
    fGn, where only the asymptotic decay is available).  Warns when the
    tail bound exceeds one percent of the value.  Raises when the power
    sum at the Hermite rank diverges.
    """
    d = hermite_rank(e)
    cw = e.variance_weights()
    if lag_horizon is None:
        if model.family == "white":
            lag_horizon = 1
        elif model.family == "table":
            lag_horizon = len(model.table_values)
        else:
            lag_horizon = DEFAULT_LAG_HORIZON
    r = model.rho_lags(lag_horizon + 1)
    inner = np.polynomial.polynomial.polyval(r, cw)
    value = float(inner[0] + 2.0 * np.sum(inner[1:]))

    orders = np.nonzero(cw)[0]
    tails = _lag_tail_bounds(model, orders, lag_horizon, d)
    tail = float(np.sum(cw[orders] * tails))
    if value > 0 and tail > _TAIL_WARN_FRACTION * value:
        warnings.warn(
            f"lag-tail estimate {tail:.3e} exceeds 1% of the limiting "
            f"variance {value:.6g}; increase the lag horizon",
            stacklevel=2,
        )
    return SigmaLimit(value, tail)


def finite_n_variance(e: HermiteExpansion, model: CovarianceModel, n: int) -> float:
    """Exact Var(F_n) for the truncated expansion.

    sigma_n^2 = sum_{|k| < n} (1 - |k|/n) sum_{l >= 1} a_l^2 l! rho(k)^l.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    cw = e.variance_weights()
    r = model.rho_lags(n)
    inner = np.polynomial.polynomial.polyval(r, cw)
    k = np.arange(1, n)
    value = float(inner[0] + 2.0 * np.sum((1.0 - k / n) * inner[1:]))
    if value <= DEGENERATE_TOL:
        raise ValueError(
            f"degenerate normalization: sigma_n^2 = {value:.3e} at n = {n}"
        )
    return value


def validate_psd(model: CovarianceModel, n: int,
                 dense_limit: int = DEFAULT_DENSE_LIMIT) -> bool:
    """Check that the n x n Toeplitz matrix of rho is positive semidefinite."""
    if n > dense_limit:
        raise ValueError(f"n = {n} exceeds the dense eigenvalue limit {dense_limit}")
    mat = toeplitz(model.rho_lags(n))
    return bool(np.linalg.eigvalsh(mat).min() >= -_PSD_TOL)
