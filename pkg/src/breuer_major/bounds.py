"""Explicit total variation bounds and their quadruple correlation sums.

Two closed-form bounds on d_TV(V_n, N(0,1)) are provided.  With
c = E[phi'^4]^{1/4} E[phi_1^4]^{1/4} and s = sigma_n^2:

* general rank:      (4c/s) n^{-1/2} (sum_{|k|<n} |rho(k)|)^{3/2}
* 2-sparse phi:      (4c/s) n^{-(1/b - 1/2)} (sum |rho|^2)^{1/2}
                     (sum |rho|^b)^{1/b}   for any b in [1, 2]

Both descend from the sharper quadruple sums

    S1 = (1/n^2) sum_{i,j,k,l < n} |rho(j-k) rho(i-j) rho(k-l)|
    S2 = (1/n^2) sum_{i,j,k,l < n} |rho(j-k)^2 rho(i-j) rho(k-l)|

through Hoelder and Young inequalities, and (4c/s) sqrt(S) sits between
the Monte Carlo variance route and the closed forms.  The fast
evaluation uses the exact factorization S = g^T T g with the window
sums g(j) = sum_{i<n} |rho(i-j)| and T the Toeplitz matrix of |rho| (or
rho^2), applied by padded FFT; the brute mode materializes all n^4
terms and is the independent oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .covariance import DEGENERATE_TOL, CovarianceModel, abs_power_sum
from .hermite import HermiteExpansion, sparsity
from .simulate import ToeplitzOperator

BRUTE_LIMIT = 64
DEFAULT_B_STEP = 0.01
_LOWER_TOL = 1e-10


def _check_normalization(sigma_n_sq: float):
    if sigma_n_sq <= DEGENERATE_TOL:
        raise ValueError(f"degenerate normalization: sigma_n^2 = {sigma_n_sq:.3e}")


def tv_bound_l1(c_const: float, sigma_n_sq: float,
                model: CovarianceModel, n: int) -> float:
    """General-rank bound (4c/s) n^{-1/2} (sum_{|k|<n} |rho(k)|)^{3/2}."""
    _check_normalization(sigma_n_sq)
    s1 = abs_power_sum(model, n, 1.0)
    return 4.0 * c_const / sigma_n_sq * n ** -0.5 * s1 ** 1.5


def tv_bound_lb(c_const: float, sigma_n_sq: float, model: CovarianceModel,
                n: int, b: float) -> float:
    """2-sparse bound interpolating the lb summability classes, b in [1, 2].

    (4c/s) n^{-(1/b - 1/2)} (sum |rho|^2)^{1/2} (sum |rho|^b)^{1/b}.
    Valid only under the 2-sparse hypothesis on phi; callers enforce it
    via :func:`require_two_sparse`.
    """
    _check_normalization(sigma_n_sq)
    if not 1.0 <= b <= 2.0:
        raise ValueError(f"exponent b = {b} outside [1, 2]")
    s2 = abs_power_sum(model, n, 2.0)
    sb = abs_power_sum(model, n, b)
    return (4.0 * c_const / sigma_n_sq * n ** -(1.0 / b - 0.5)
            * math.sqrt(s2) * sb ** (1.0 / b))


def require_two_sparse(e: HermiteExpansion):
    """Reject expansions violating the 2-sparse hypothesis of the lb bound."""
    gap = sparsity(e)
    if gap < 2:
        raise ValueError(
            f"the interpolating bound requires a 2-sparse function "
            f"(coefficient gap >= 2); this expansion has gap {gap:g}"
        )


def b_grid(step: float = DEFAULT_B_STEP) -> np.ndarray:
    """The exponent grid 1, 1+step, ..., 2 (2 always included)."""
    count = int(round(1.0 / step))
    grid = 1.0 + step * np.arange(count + 1)
    grid[-1] = 2.0
    return grid


def best_b(c_const: float, sigma_n_sq: float, model: CovarianceModel, n: int,
           step: float = DEFAULT_B_STEP) -> tuple[float, float]:
    """Argmin of the lb bound over the grid; ties resolve to smaller b."""
    grid = b_grid(step)
    vals = np.array([tv_bound_lb(c_const, sigma_n_sq, model, n, b) for b in grid])
    i = int(np.argmin(vals))
    return float(grid[i]), float(vals[i])


def _window_sums(r: np.ndarray) -> np.ndarray:
    # g(j) = sum_{i=0}^{n-1} r(|i-j|) via one cumulative sum
    n = len(r)
    c = np.cumsum(r)
    j = np.arange(n)
    return c[n - 1 - j] + c[j] - r[0]


def _quad_sum_fast(model: CovarianceModel, n: int, middle_power: int) -> float:
    r = np.abs(model.rho_lags(n))
    g = _window_sums(r)
    mid = r ** middle_power
    y = ToeplitzOperator(mid).apply(g)
    total = float(np.sum(np.asarray(g, dtype=np.longdouble)
                         * np.asarray(y, dtype=np.longdouble)))
    return total / float(n) ** 2


def _quad_sum_brute(model: CovarianceModel, n: int, middle_power: int) -> float:
    if n > BRUTE_LIMIT:
        raise ValueError(f"brute mode is restricted to n <= {BRUTE_LIMIT}")
    lags = np.arange(n)
    r = np.abs(model.rho(lags[:, None] - lags[None, :]))
    mid = r ** middle_power
    total = 0.0
    # materialize every quadruple |rho(i-j) rho(j-k)^m rho(k-l)|, one i-slab
    # at a time to keep memory at O(n^3)
    for i in range(n):
        total += float(np.sum(r[i][:, None, None] * mid[:, :, None] * r[None, :, :]))
    return total / float(n) ** 2


def quad_sum_linear(model: CovarianceModel, n: int, mode: str = "fast") -> float:
    """(1/n^2) sum_{i,j,k,l<n} |rho(j-k) rho(i-j) rho(k-l)|."""
    return _quad_sum(model, n, 1, mode)


def quad_sum_squared(model: CovarianceModel, n: int, mode: str = "fast") -> float:
    """(1/n^2) sum_{i,j,k,l<n} |rho(j-k)^2 rho(i-j) rho(k-l)|."""
    return _quad_sum(model, n, 2, mode)


def _quad_sum(model: CovarianceModel, n: int, middle_power: int, mode: str) -> float:
    if n < 1:
        raise ValueError("n must be at least 1")
    if mode == "fast":
        return _quad_sum_fast(model, n, middle_power)
    if mode == "brute":
        return _quad_sum_brute(model, n, middle_power)
    raise ValueError(f"unknown mode {mode!r}")


def quad_sum_bound(c_const: float, sigma_n_sq: float, quad_sum: float) -> float:
    """(4c/s) sqrt(S), the variance-route bound built on a quadruple sum."""
    _check_normalization(sigma_n_sq)
    if quad_sum < 0:
        raise ValueError("quadruple sum must be nonnegative")
    return 4.0 * c_const / sigma_n_sq * math.sqrt(quad_sum)


class LowerBoundCheck(NamedTuple):
    lhs: float
    rhs: float
    holds: bool


def lower_bound_check(model: CovarianceModel, n: int) -> LowerBoundCheck:
    """Why the squared-middle sum cannot beat n^{-1/2} for non-summable rho.

    lhs = (1/n) sum_{i,j,k,l<n} |rho(j-k)^2 rho(i-j) rho(k-l)| dominates
    rhs = 1 + sum_{l<=n/2} |rho(l)| (restrict the sum to i = j = k), so
    lhs diverges whenever rho is not absolutely summable.
    """
    lhs = n * quad_sum_squared(model, n, mode="fast")
    r = np.abs(model.rho_lags(n // 2 + 1))
    rhs = 1.0 + float(np.sum(r[1:]))
    return LowerBoundCheck(lhs, rhs, lhs >= rhs - _LOWER_TOL)


def fit_loglog(ns, values) -> tuple[float, float]:
    """Least squares slope of log(values) against log(ns), with its stderr."""
    x = np.log(np.asarray(ns, dtype=float))
    y = np.log(np.asarray(values, dtype=float))
    if len(x) < 3:
        raise ValueError("need at least three grid points for a slope fit")
    xc = x - x.mean()
    slope = float(np.sum(xc * (y - y.mean())) / np.sum(xc ** 2))
    resid = y - y.mean() - slope * xc
    dof = len(x) - 2
    stderr = math.sqrt(float(np.sum(resid ** 2)) / dof / float(np.sum(xc ** 2)))
    return slope, stderr


@dataclass
class BoundReport:
    """Everything computed for one (function, model, n) configuration.

    The closed-form fields are exact (up to quadrature of the constant);
    the mc_* fields are filled only by the full Monte Carlo pipeline.
    """

    function: str
    model: str
    n: int
    rank: int
    sparsity: float
    c_const: float
    sigma_n_sq: float
    sigma_limit_sq: float
    sigma_limit_tail: float
    sum_abs: float
    sum_sq: float
    bound_l1: float
    bound_lb: dict = field(default_factory=dict)
    best_b: Optional[float] = None
    best_lb_value: Optional[float] = None
    quad_sum_linear: float = math.nan
    quad_sum_squared: float = math.nan
    quad_bound_linear: float = math.nan
    quad_bound_squared: Optional[float] = None
    lower_check: Optional[LowerBoundCheck] = None
    mc_tv: Optional[dict] = None
    mc_kolmogorov: Optional[dict] = None
    mc_inner_mean: Optional[float] = None
    mc_two_sqrt_var: Optional[float] = None
    mc_two_sqrt_var_se: Optional[float] = None
    notes: list = field(default_factory=list)

    def min_applicable_bound(self) -> float:
        """min over the closed forms that apply to this function."""
        vals = [self.bound_l1]
        if self.bound_lb:
            vals.append(min(self.bound_lb.values()))
        return min(vals)

    def to_dict(self) -> dict:
        finite_or_none = lambda v: None if (v is None or math.isinf(v)) else v
        out = {
            "function": self.function,
            "model": self.model,
            "n": self.n,
            "rank": self.rank,
            "sparsity": finite_or_none(self.sparsity),
            "c_const": self.c_const,
            "sigma_n_sq": self.sigma_n_sq,
            "sigma_limit_sq": finite_or_none(self.sigma_limit_sq),
            "sigma_limit_tail": finite_or_none(self.sigma_limit_tail),
            "sum_abs": self.sum_abs,
            "sum_sq": self.sum_sq,
            "bound_l1": self.bound_l1,
            "bound_lb": {f"{b:.2f}": v for b, v in self.bound_lb.items()},
            "best_b": self.best_b,
            "best_lb_value": self.best_lb_value,
            "quad_sum_linear": self.quad_sum_linear,
            "quad_sum_squared": self.quad_sum_squared,
            "quad_bound_linear": self.quad_bound_linear,
            "quad_bound_squared": self.quad_bound_squared,
            "lower_check": None if self.lower_check is None else {
                "lhs": self.lower_check.lhs,
                "rhs": self.lower_check.rhs,
                "holds": self.lower_check.holds,
            },
            "mc_tv": self.mc_tv,
            "mc_kolmogorov": self.mc_kolmogorov,
            "mc_inner_mean": self.mc_inner_mean,
            "mc_two_sqrt_var": self.mc_two_sqrt_var,
            "mc_two_sqrt_var_se": self.mc_two_sqrt_var_se,
            "notes": list(self.notes),
        }
        return out
