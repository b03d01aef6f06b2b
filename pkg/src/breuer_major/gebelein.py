"""Maximal correlation of Gaussian subspaces and its covariance inequality.

For two finite-dimensional subspaces H1, H2 of a Gaussian Hilbert space,
theta = sup |<h, g>| over unit vectors is the largest singular value of
the whitened cross-Gram matrix G1^{-1/2} G12 G2^{-1/2}.  The covariance
inequality states that for centered square-integrable functionals,

    |E[F1(W1) F2(W2)]| <= theta^p sqrt(Var F1) sqrt(Var F2)

whenever F1 has Hermite rank p.  This module verifies the inequality by
tensorized Gaussian quadrature (with the rank hypothesis itself checked
by chaos projections, never trusted), handles the rigidly correlated
scalar case E[X(h) Y(g)] = theta <h, g>, and builds the coupling maps
tau_1 = theta^{-1} pi_{H1} and tau_2 = sqrt(Id - U/theta^2) with
U = pi_{H2} pi_{H1} that reduce the general case to the rigid one.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from .hermite import gauss_hermite, hermite_eval

MAX_DIM = 4
COND_LIMIT = 1e12
GEBELEIN_SLACK = 1e-6
RANK_PROJECTION_TOL = 1e-7
CENTERING_TOL = 1e-8
TIGHT_TOL = 1e-8
_PSD_TOL = 1e-10
_BOUNDARY_TOL = 1e-10

#: default per-axis quadrature order by total dimension; exact for the
#: polynomial functionals used in the verification suites
_DEFAULT_ORDERS = {1: 64, 2: 40, 3: 24, 4: 16, 5: 12, 6: 10}


def _default_order(total_dim: int) -> int:
    try:
        return _DEFAULT_ORDERS[total_dim]
    except KeyError:
        raise ValueError(f"tensor quadrature supports at most 6 dimensions, got {total_dim}")


@lru_cache(maxsize=8)
def _tensor_rule(dim: int, order: int):
    x, w = gauss_hermite(order)
    grids = np.meshgrid(*([x] * dim), indexing="ij")
    nodes = np.stack([g.ravel() for g in grids], axis=1)
    weights = np.ones(order ** dim)
    for g in np.meshgrid(*([w] * dim), indexing="ij"):
        weights = weights * g.ravel()
    return nodes, weights


def _sym_inv_sqrt(G: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(G)
    return vecs @ np.diag(vals ** -0.5) @ vecs.T


def _sym_sqrt(G: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(G)
    return vecs @ np.diag(np.sqrt(vals)) @ vecs.T


def _psd_factor(G: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(G)
    vals = np.clip(vals, 0.0, None)
    return vecs @ np.diag(np.sqrt(vals))


@dataclass(eq=False)
class SubspacePair:
    """Two finite bases of a Gaussian Hilbert space via their Gram blocks.

    G1 (d1 x d1) and G2 (d2 x d2) are the within-subspace Grams, G12 the
    cross block; the stacked Gram [[G1, G12], [G12^T, G2]] must be
    positive semidefinite.  theta is derived at construction.
    """

    G1: np.ndarray
    G2: np.ndarray
    G12: np.ndarray
    theta: float = field(init=False)

    def __post_init__(self):
        self.G1 = np.atleast_2d(np.asarray(self.G1, dtype=float))
        self.G2 = np.atleast_2d(np.asarray(self.G2, dtype=float))
        self.G12 = np.atleast_2d(np.asarray(self.G12, dtype=float))
        d1, d2 = self.G1.shape[0], self.G2.shape[0]
        if d1 > MAX_DIM or d2 > MAX_DIM:
            raise ValueError(f"subspace dimensions capped at {MAX_DIM} per side")
        if self.G1.shape != (d1, d1) or self.G2.shape != (d2, d2):
            raise ValueError("Gram blocks must be square")
        if self.G12.shape != (d1, d2):
            raise ValueError(f"cross-Gram must have shape ({d1}, {d2})")
        for name, G in (("G1", self.G1), ("G2", self.G2)):
            if not np.allclose(G, G.T, atol=1e-10):
                raise ValueError(f"{name} is not symmetric")
            ev = np.linalg.eigvalsh(G)
            if ev.min() <= 0:
                raise ValueError(f"{name} is not positive definite")
            if ev.max() / ev.min() > COND_LIMIT:
                raise ValueError(f"{name} is ill-conditioned (condition > {COND_LIMIT:g})")
        full = self.full_gram()
        fe = np.linalg.eigvalsh(full)
        if fe.min() < -_PSD_TOL * max(fe.max(), 1.0):
            raise ValueError("stacked Gram matrix is not positive semidefinite")
        theta = float(np.linalg.svd(self.whitened_cross(), compute_uv=False)[0])
        if theta > 1.0 + 1e-8:
            raise ValueError(f"maximal correlation {theta} exceeds 1; Gram data inconsistent")
        self.theta = min(theta, 1.0)

    @property
    def d1(self) -> int:
        return self.G1.shape[0]

    @property
    def d2(self) -> int:
        return self.G2.shape[0]

    def full_gram(self) -> np.ndarray:
        return np.block([[self.G1, self.G12], [self.G12.T, self.G2]])

    def whitened_cross(self) -> np.ndarray:
        return _sym_inv_sqrt(self.G1) @ self.G12 @ _sym_inv_sqrt(self.G2)


def max_correlation(pair: SubspacePair) -> float:
    """theta = sup over unit vectors of |<h, g>|, h in H1 and g in H2."""
    return pair.theta


def joint_expectation(F1: Callable, F2: Callable, pair: SubspacePair,
                      quad_order: Optional[int] = None) -> float:
    """E[F1(W1) F2(W2)] under the joint Gaussian law of the pair.

    Tensorized Gauss-Hermite nodes are pushed through a factor of the
    stacked Gram.  F1 and F2 take arrays of shape (N, d1) and (N, d2).
    The rule with per-axis order q is exact for polynomial integrands of
    per-axis degree up to 2q - 1; the defaults keep the node count
    tractable for d1 + d2 up to 6.
    """
    dim = pair.d1 + pair.d2
    order = _default_order(dim) if quad_order is None else quad_order
    nodes, weights = _tensor_rule(dim, order)
    x = nodes @ _psd_factor(pair.full_gram()).T
    vals = np.asarray(F1(x[:, : pair.d1]), dtype=float) * \
        np.asarray(F2(x[:, pair.d1:]), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise ValueError("integrand is not finite on the quadrature nodes")
    return float(weights @ vals)


def _gram_expectation(F: Callable, gram: np.ndarray,
                      quad_order: Optional[int] = None) -> float:
    dim = gram.shape[0]
    order = _default_order(dim) if quad_order is None else quad_order
    nodes, weights = _tensor_rule(dim, order)
    x = nodes @ _psd_factor(gram).T
    vals = np.asarray(F(x), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise ValueError("integrand is not finite on the quadrature nodes")
    return float(weights @ vals)


def _verify_rank(F: Callable, gram: np.ndarray, declared_rank: int,
                 quad_order: Optional[int], var: float, label: str):
    """Chaos projections of degree < declared rank must vanish.

    Monomials in the coordinates span the same chaoses as multivariate
    Hermite polynomials, so testing E[F * monomial] = 0 for every total
    degree 1 .. p-1 verifies rank >= p.
    """
    dim = gram.shape[0]
    order = _default_order(dim) if quad_order is None else quad_order
    nodes, weights = _tensor_rule(dim, order)
    x = nodes @ _psd_factor(gram).T
    fv = np.asarray(F(x), dtype=float) / math.sqrt(var)
    for degree in range(1, declared_rank):
        for alpha in itertools.combinations_with_replacement(range(dim), degree):
            mono = np.prod(x[:, alpha], axis=1)
            norm = math.sqrt(max(float(weights @ (mono * mono)), 1e-300))
            proj = float(weights @ (fv * mono))
            if abs(proj) > RANK_PROJECTION_TOL * norm:
                raise ValueError(
                    f"{label}: declared Hermite rank {declared_rank} is "
                    f"contradicted: degree-{degree} projection = {proj:.3e}"
                )


@dataclass
class CorrelationCheck:
    """Outcome of one covariance-inequality verification."""

    lhs: float
    rhs: float
    theta: float
    rank: int
    var1: float
    var2: float
    holds: bool
    tight: bool


def check_gebelein(F1: Callable, rank_p: int, F2: Callable, pair: SubspacePair,
                   quad_order: Optional[int] = None,
                   slack: float = GEBELEIN_SLACK,
                   centering_tol: float = CENTERING_TOL) -> CorrelationCheck:
    """Verify |E[F1 F2]| <= theta^p sqrt(Var F1 Var F2) by quadrature.

    Both functionals must be centered up to centering_tol (the residual
    quadrature mean is subtracted before the verdict, so loosening the
    tolerance is safe for functions whose exact mean the quadrature
    cannot resolve, such as kinked ones); the declared rank of F1 is
    verified through vanishing chaos projections before any verdict.
    """
    if rank_p < 1:
        raise ValueError("declared rank must be at least 1")
    m1 = _gram_expectation(F1, pair.G1, quad_order)
    m2 = _gram_expectation(F2, pair.G2, quad_order)
    if abs(m1) > centering_tol or abs(m2) > centering_tol:
        raise ValueError(
            f"functionals must be centered: E[F1] = {m1:.3e}, E[F2] = {m2:.3e}"
        )
    G1c = lambda x: np.asarray(F1(x), dtype=float) - m1
    G2c = lambda x: np.asarray(F2(x), dtype=float) - m2
    var1 = _gram_expectation(lambda x: G1c(x) ** 2, pair.G1, quad_order)
    var2 = _gram_expectation(lambda x: G2c(x) ** 2, pair.G2, quad_order)
    _verify_rank(G1c, pair.G1, rank_p, quad_order, var1, "F1")
    lhs = abs(joint_expectation(G1c, G2c, pair, quad_order))
    rhs = pair.theta ** rank_p * math.sqrt(var1) * math.sqrt(var2)
    return CorrelationCheck(
        lhs=lhs, rhs=rhs, theta=pair.theta, rank=rank_p, var1=var1, var2=var2,
        holds=lhs <= rhs + slack, tight=(rhs - lhs) <= TIGHT_TOL,
    )


def check_rigid(F: Callable, G: Callable, theta: float, rank_p: int,
                quad_order: int = 40,
                slack: float = GEBELEIN_SLACK,
                centering_tol: float = CENTERING_TOL) -> CorrelationCheck:
    """The scalar rigidly correlated case: (X, Y) bivariate with corr theta.

    Verifies |E[F(X) G(Y)]| <= |theta|^p sqrt(Var F Var G) for functions
    of one real variable, with the rank of F checked by one-dimensional
    projections.  Takes any theta in [-1, 1].  The residual quadrature
    mean is subtracted before the verdict; see check_gebelein for the
    role of centering_tol.
    """
    if not -1.0 <= theta <= 1.0:
        raise ValueError("theta must lie in [-1, 1]")
    if rank_p < 1:
        raise ValueError("declared rank must be at least 1")
    x, w = gauss_hermite(quad_order)
    fv = np.asarray(F(x), dtype=float)
    gv = np.asarray(G(x), dtype=float)
    mean_f = float(w @ fv)
    mean_g = float(w @ gv)
    if abs(mean_f) > centering_tol or abs(mean_g) > centering_tol:
        raise ValueError(
            f"functions must be centered: E[F] = {mean_f:.3e}, E[G] = {mean_g:.3e}"
        )
    fv = fv - mean_f
    var_f = float(w @ (fv * fv))
    var_g = float(w @ (gv * gv)) - mean_g ** 2
    scale = math.sqrt(var_f)
    for degree in range(1, rank_p):
        h = hermite_eval(degree, x) / math.sqrt(float(math.factorial(degree)))
        proj = float(w @ (fv * h)) / scale
        if abs(proj) > RANK_PROJECTION_TOL:
            raise ValueError(
                f"declared Hermite rank {rank_p} is contradicted: "
                f"degree-{degree} projection = {proj:.3e}"
            )
    # E[F(X) G(Y)] with Y = theta X + sqrt(1 - theta^2) Z
    y = theta * x[:, None] + math.sqrt(max(0.0, 1.0 - theta * theta)) * x[None, :]
    gy = np.asarray(G(y), dtype=float) - mean_g
    lhs = abs(float(w @ (fv[:, None] * gy) @ w))
    rhs = abs(theta) ** rank_p * math.sqrt(var_f) * math.sqrt(var_g)
    return CorrelationCheck(
        lhs=lhs, rhs=rhs, theta=theta, rank=rank_p, var1=var_f, var2=var_g,
        holds=lhs <= rhs + slack, tight=(rhs - lhs) <= TIGHT_TOL,
    )


@dataclass
class RigidCoupling:
    """Coupling maps reducing a subspace pair to the rigid scalar case.

    tau1 (d1 x d2) realizes theta^{-1} pi_{H1} on coefficient vectors,
    tau2 (d2 x d2) the square root sqrt(Id - U/theta^2); u_norm is the
    operator norm of U = pi_{H2} pi_{H1} restricted to H2, bounded by
    theta^2.  pairing_residual measures property (i),
    <h, tau1 g> = theta^{-1} <h, g>, and isometry_residual property
    (ii), <tau g, tau k> = <g, k> on H1 + H2.
    """

    tau1: np.ndarray
    tau2: np.ndarray
    theta: float
    u_norm: float
    pairing_residual: float
    isometry_residual: float


def rigid_coupling(pair: SubspacePair) -> RigidCoupling:
    """Construct the coupling maps; requires theta strictly inside (0, 1)."""
    theta = pair.theta
    if theta <= _BOUNDARY_TOL or theta >= 1.0 - _BOUNDARY_TOL:
        raise ValueError(
            f"rigid coupling undefined at boundary: theta = {theta:.6g}"
        )
    B = pair.whitened_cross()
    btb = B.T @ B
    u_norm = float(np.linalg.eigvalsh(btb).max())

    tau1 = np.linalg.solve(pair.G1, pair.G12) / theta
    s2 = _sym_sqrt(pair.G2)
    s2_inv = _sym_inv_sqrt(pair.G2)
    core = np.eye(pair.d2) - btb / theta ** 2
    vals, vecs = np.linalg.eigh(core)
    if vals.min() < -1e-12:
        raise ValueError(
            f"coupling core has negative eigenvalue {vals.min():.3e}; "
            "the operator norm bound is violated beyond rounding"
        )
    sqrt_core = vecs @ np.diag(np.sqrt(np.clip(vals, 0.0, None))) @ vecs.T
    tau2 = s2_inv @ sqrt_core @ s2

    pairing = pair.G1 @ tau1 - pair.G12 / theta
    isometry = tau1.T @ pair.G1 @ tau1 + tau2.T @ pair.G2 @ tau2 - pair.G2
    return RigidCoupling(
        tau1=tau1,
        tau2=tau2,
        theta=theta,
        u_norm=u_norm,
        pairing_residual=float(np.max(np.abs(pairing))),
        isometry_residual=float(np.max(np.abs(isometry))),
    )


def random_pair(rng: np.random.Generator, d1: int, d2: int,
                theta_range: Optional[tuple[float, float]] = None,
                max_tries: int = 500) -> SubspacePair:
    """Random admissible pair from Gaussian bases in a doubled ambient space.

    With theta_range set, rejection-samples until theta lands inside.
    """
    ambient = 2 * (d1 + d2)
    for _ in range(max_tries):
        v = rng.standard_normal((ambient, d1))
        w = rng.standard_normal((ambient, d2))
        try:
            pair = SubspacePair(v.T @ v, w.T @ w, v.T @ w)
        except ValueError:
            continue
        if theta_range is None:
            return pair
        lo, hi = theta_range
        if lo <= pair.theta <= hi:
            return pair
    raise ValueError(
        f"could not draw an admissible pair with theta in {theta_range} "
        f"after {max_tries} tries"
    )
