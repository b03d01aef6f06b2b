import math

import numpy as np
import pytest

from breuer_major import gebelein, hermite


def theta_grid_oracle(pair, steps=2000):
    # supremum of |<h, g>| over unit vectors parametrized on circles;
    # only valid for 2x2 blocks
    angles = np.linspace(0.0, math.pi, steps, endpoint=False)
    u = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    hn = u / np.sqrt(np.einsum("ij,jk,ik->i", u, pair.G1, u))[:, None]
    gn = u / np.sqrt(np.einsum("ij,jk,ik->i", u, pair.G2, u))[:, None]
    return np.max(np.abs(hn @ pair.G12 @ gn.T))


def make_pair(rng, d1, d2, **kw):
    return gebelein.random_pair(rng, d1, d2, **kw)


def test_theta_orthogonal_and_scalar():
    p0 = gebelein.SubspacePair(np.eye(2), np.eye(2), np.zeros((2, 2)))
    assert p0.theta == 0.0
    p1 = gebelein.SubspacePair([[1.0]], [[1.0]], [[0.7]])
    assert abs(gebelein.max_correlation(p1) - 0.7) < 1e-15
    p2 = gebelein.SubspacePair([[1.0]], [[1.0]], [[-0.7]])
    assert abs(p2.theta - 0.7) < 1e-15


def test_theta_matches_grid_search():
    rng = np.random.default_rng(11)
    for _ in range(5):
        pair = make_pair(rng, 2, 2)
        assert abs(pair.theta - theta_grid_oracle(pair)) < 1e-4


def test_theta_basis_invariance():
    rng = np.random.default_rng(4)
    pair = make_pair(rng, 3, 2)
    for _ in range(5):
        a = rng.standard_normal((3, 3)) + 3 * np.eye(3)
        b = rng.standard_normal((2, 2)) + 3 * np.eye(2)
        other = gebelein.SubspacePair(
            a.T @ pair.G1 @ a, b.T @ pair.G2 @ b, a.T @ pair.G12 @ b)
        assert abs(other.theta - pair.theta) < 1e-10


def test_pair_validation():
    with pytest.raises(ValueError, match="capped"):
        gebelein.SubspacePair(np.eye(5), np.eye(2), np.zeros((5, 2)))
    with pytest.raises(ValueError, match="positive definite"):
        gebelein.SubspacePair([[0.0]], [[1.0]], [[0.0]])
    with pytest.raises(ValueError, match="not positive semidefinite"):
        gebelein.SubspacePair([[1.0]], [[1.0]], [[1.2]])
    with pytest.raises(ValueError, match="ill-conditioned"):
        gebelein.SubspacePair([[1.0, 0.0], [0.0, 1e-14]], [[1.0]], [[0.0], [0.0]])


def test_joint_expectation_examples():
    pair = gebelein.SubspacePair([[1.0]], [[1.0]], [[0.35]])
    ident = lambda x: x[:, 0]
    assert abs(gebelein.joint_expectation(ident, ident, pair) - 0.35) < 1e-12
    for p in (1, 2, 3, 4):
        hp = lambda x, _p=p: hermite.hermite_eval(_p, x[:, 0])
        got = gebelein.joint_expectation(hp, hp, pair)
        assert abs(got - hermite.product_constant_term(p, p, 0.35)) < 1e-10
    centered = lambda x: x[:, 0] ** 3 - 3 * x[:, 0]
    one = lambda x: np.ones(x.shape[0])
    assert abs(gebelein.joint_expectation(centered, one, pair)) < 1e-12


def test_check_gebelein_equality_case():
    pair = gebelein.SubspacePair([[1.0]], [[1.0]], [[0.5]])
    h3 = lambda x: hermite.hermite_eval(3, x[:, 0])
    chk = gebelein.check_gebelein(h3, 3, h3, pair)
    assert chk.holds and chk.tight
    assert abs(chk.lhs - 0.75) < 1e-10
    assert abs(chk.rhs - 0.75) < 1e-10


def test_check_gebelein_orthogonal():
    pair = gebelein.SubspacePair(np.eye(2), np.eye(2), np.zeros((2, 2)))
    f = lambda x: x[:, 0] * x[:, 1]
    chk = gebelein.check_gebelein(f, 2, f, pair)
    assert chk.holds
    assert abs(chk.lhs) < 1e-12


def test_check_gebelein_rejects_misdeclared_rank():
    pair = gebelein.SubspacePair([[1.0]], [[1.0]], [[0.5]])
    h1 = lambda x: x[:, 0]
    with pytest.raises(ValueError, match="contradicted"):
        gebelein.check_gebelein(h1, 2, h1, pair)


def test_check_gebelein_rejects_uncentered():
    pair = gebelein.SubspacePair([[1.0]], [[1.0]], [[0.5]])
    shifted = lambda x: x[:, 0] + 0.3
    with pytest.raises(ValueError, match="centered"):
        gebelein.check_gebelein(shifted, 1, shifted, pair)


def test_check_gebelein_sparse_product_functional():
    # the exact usage inside the variance estimate: F = phi'(W(h)) phi_1(W(g))
    # minus its mean has rank at least 2 for the 2-sparse abs function
    fabs = hermite.catalog("abs_centered")
    phi1 = fabs.shifted_eval
    rng = np.random.default_rng(17)
    for _ in range(3):
        pair = make_pair(rng, 2, 2, theta_range=(0.1, 0.9))

        def make(gram):
            mean_holder = {}

            def raw(x):
                return np.sign(x[:, 0]) * np.asarray(phi1(x[:, 1]))

            mean_holder["m"] = gebelein._gram_expectation(raw, gram, None)
            return lambda x: raw(x) - mean_holder["m"]

        f1 = make(pair.G1)
        f2 = make(pair.G2)
        chk = gebelein.check_gebelein(f1, 2, f2, pair)
        assert chk.holds


def test_check_rigid_equality_and_parity():
    h2 = lambda x: hermite.hermite_eval(2, x)
    chk = gebelein.check_rigid(h2, h2, 0.5, 2)
    assert chk.holds and chk.tight
    assert abs(chk.lhs - 0.5) < 1e-12
    odd = lambda x: np.asarray(x)
    even = lambda x: hermite.hermite_eval(2, x)
    for theta in (0.3, -0.8):
        chk = gebelein.check_rigid(odd, even, theta, 1)
        assert chk.holds and abs(chk.lhs) < 1e-12


def test_check_rigid_abs_rank_two():
    fabs = hermite.catalog("abs_centered")
    bounded = lambda x: np.tanh(np.asarray(x))  # odd, centered, bounded
    # plain Gauss-Hermite resolves the mean of the kinked |x| only to
    # about 1e-2 at this order, hence the loosened centering gate
    chk = gebelein.check_rigid(fabs.eval, bounded, 0.8, 2, centering_tol=0.02)
    assert chk.holds


def test_check_rigid_equality_family():
    for p in range(1, 9):
        hp = lambda x, _p=p: hermite.hermite_eval(_p, x)
        for rho in (-0.9, -0.5, 0.5, 0.9):
            chk = gebelein.check_rigid(hp, hp, rho, p)
            assert abs(chk.lhs - chk.rhs) <= 1e-8, (p, rho)
            assert chk.holds


def test_rhs_monotone_in_rank():
    rng = np.random.default_rng(2)
    pair = make_pair(rng, 2, 2, theta_range=(0.2, 0.9))
    v1 = v2 = 1.0
    for p in range(1, 6):
        assert pair.theta ** (p + 1) * v1 * v2 <= pair.theta ** p * v1 * v2 + 1e-15


def test_rigid_coupling_scalar():
    pair = gebelein.SubspacePair([[1.0]], [[1.0]], [[0.6]])
    cpl = gebelein.rigid_coupling(pair)
    np.testing.assert_allclose(cpl.tau1, [[1.0]], atol=1e-12)
    np.testing.assert_allclose(cpl.tau2, [[0.0]], atol=1e-8)
    assert cpl.pairing_residual <= 1e-12
    assert cpl.isometry_residual <= 1e-12
    assert cpl.u_norm <= 0.6 ** 2 + 1e-12


def test_rigid_coupling_boundary_rejected():
    zero = gebelein.SubspacePair([[1.0]], [[1.0]], [[0.0]])
    with pytest.raises(ValueError, match="boundary"):
        gebelein.rigid_coupling(zero)
    one = gebelein.SubspacePair([[1.0]], [[1.0]], [[1.0]])
    with pytest.raises(ValueError, match="boundary"):
        gebelein.rigid_coupling(one)


def test_rigid_coupling_randomized_residuals():
    rng = np.random.default_rng(23)
    for _ in range(25):
        d1 = int(rng.integers(1, 4))
        d2 = int(rng.integers(1, 4))
        pair = make_pair(rng, d1, d2, theta_range=(0.05, 0.95))
        cpl = gebelein.rigid_coupling(pair)
        assert cpl.pairing_residual <= 1e-10
        assert cpl.isometry_residual <= 1e-10
        assert cpl.u_norm <= pair.theta ** 2 + 1e-10
