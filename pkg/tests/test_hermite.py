import math

import numpy as np
import pytest
from scipy import integrate
from scipy.special import eval_hermitenorm, roots_hermite

from breuer_major import hermite


# ---------------------------------------------------------------------------
# independent oracles
# ---------------------------------------------------------------------------

def gauss_oracle_nodes(order=200):
    # built directly from scipy, independent of the library helper
    x, w = roots_hermite(order)
    return x * math.sqrt(2.0), w / math.sqrt(math.pi)


def joint_gauss_expectation(f, rho, order=48):
    # E[f(X, Y)] for standard bivariate normals with correlation rho
    x, w = gauss_oracle_nodes(order)
    xx = x[:, None]
    yy = rho * x[:, None] + math.sqrt(1.0 - rho * rho) * x[None, :]
    return float(w @ f(xx * np.ones_like(yy), yy) @ w)


def abs_coeff_oracle(k):
    # a_{2k} = E[|X| H_{2k}] / (2k)! via adaptive quadrature
    integrand = lambda x: abs(x) * eval_hermitenorm(2 * k, x) * math.exp(-x * x / 2.0)
    val, _ = integrate.quad(integrand, -12, 12, limit=200)
    return val / math.sqrt(2.0 * math.pi) / math.factorial(2 * k)


# ---------------------------------------------------------------------------
# hermite_eval
# ---------------------------------------------------------------------------

def test_eval_examples():
    assert hermite.hermite_eval(0, 3.7) == 1.0
    assert hermite.hermite_eval(2, 0.0) == -1.0
    assert hermite.hermite_eval(3, 2.0) == 2.0  # x^3 - 3x at x = 2


def test_eval_matches_scipy():
    x = np.linspace(-4, 4, 41)
    for l in range(13):
        np.testing.assert_allclose(
            hermite.hermite_eval(l, x), eval_hermitenorm(l, x), rtol=1e-12, atol=1e-9)


def test_eval_order_overflow():
    with pytest.raises(ValueError, match="exceeds"):
        hermite.hermite_eval(65, 0.0)
    assert hermite.hermite_eval(65, 0.5, max_order=70) is not None


def test_orthogonality():
    # normalized Gram within 1e-8: quadrature of H_p H_q / sqrt(p! q!)
    x, w = hermite.gauss_hermite(200)
    H = np.array([hermite.hermite_eval(l, x) for l in range(13)])
    norm = np.array([math.sqrt(math.factorial(l)) for l in range(13)])
    gram = (H * w) @ H.T / np.outer(norm, norm)
    np.testing.assert_allclose(gram, np.eye(13), atol=1e-8)


# ---------------------------------------------------------------------------
# expand
# ---------------------------------------------------------------------------

def test_expand_h2_is_pure():
    e = hermite.expand(lambda x: x * x - 1.0, trunc_order=12, quad_order=64)
    expect = np.zeros(13)
    expect[2] = 1.0
    np.testing.assert_allclose(e.coeffs, expect, atol=1e-10)


def test_expand_abs_quadrature_limit():
    # the kink slows plain Gauss-Hermite to O(1/order); document the level
    c = math.sqrt(2.0 / math.pi)
    with pytest.warns(UserWarning, match="tail mass"):
        e = hermite.expand(lambda x: np.abs(x) - c, trunc_order=12, quad_order=200)
    assert abs(e.coeffs[0]) < 2e-3        # even moments carry the kink error
    assert abs(e.coeffs[1]) < 1e-12       # odd coefficients vanish by symmetry
    assert abs(e.coeffs[2] - c / 2.0) < 2e-3
    assert abs(e.coeffs[2] - c / 2.0) > 1e-7  # genuinely quadrature limited


def test_expand_sign():
    with pytest.warns(UserWarning, match="tail mass"):
        e = hermite.expand(np.sign, trunc_order=10, quad_order=100)
    assert abs(e.coeffs[1] - math.sqrt(2.0 / math.pi)) < 5e-3
    np.testing.assert_allclose(e.coeffs[2::2], 0.0, atol=1e-12)


def test_expand_rejects_bad_inputs():
    with pytest.raises(ValueError, match="at least twice"):
        hermite.expand(np.sign, trunc_order=40, quad_order=50)
    # exp(x^2) overflows to inf at the outer nodes of an order-200 rule
    with pytest.raises(ValueError, match="square-integrable"):
        hermite.expand(lambda x: np.exp(x * x), trunc_order=4, quad_order=200)


def test_expand_tail_warning():
    with pytest.warns(UserWarning, match="tail mass"):
        hermite.expand(lambda x: np.abs(x) - math.sqrt(2 / math.pi),
                       trunc_order=10, quad_order=200)


# ---------------------------------------------------------------------------
# catalog coefficients against oracles
# ---------------------------------------------------------------------------

def test_catalog_abs_exact_coeffs():
    f = hermite.catalog("abs_centered")
    assert abs(f.expansion.coeffs[2] - 0.3989422804014327) < 1e-14
    for k in (1, 2, 3):
        assert abs(f.expansion.coeffs[2 * k] - abs_coeff_oracle(k)) < 1e-9
    np.testing.assert_allclose(f.expansion.coeffs[1::2], 0.0, atol=0)


def test_catalog_sign_exact_coeffs():
    f = hermite.catalog("sign")
    assert abs(f.expansion.coeffs[1] - 0.7978845608028654) < 1e-14
    # oracle: a_3 = E[sign H_3]/3! with E[sign H_3] = 2 H_2(0) / sqrt(2 pi)
    a3 = 2.0 * (-1.0) / math.sqrt(2 * math.pi) / 6.0
    assert abs(f.expansion.coeffs[3] - a3) < 1e-15


def test_catalog_cos_coeffs():
    f = hermite.catalog("cos_centered")
    assert abs(f.expansion.coeffs[2] + math.exp(-0.5) / 2.0) < 1e-15
    assert f.expansion.tail_mass < 1e-12


def test_catalog_poly_exact_conversion():
    # 1 + 2x + 0.5 x^2 -> centered: 2 H_1 + 0.5 H_2, variance 4.5
    f = hermite.catalog("poly:1,2,0.5")
    np.testing.assert_allclose(f.expansion.coeffs[:3], [0.0, 2.0, 0.5], atol=1e-14)
    assert abs(f.expansion.l2_norm_sq - 4.5) < 1e-12
    x = np.linspace(-3, 3, 7)
    np.testing.assert_allclose(f.eval(x), 2 * x + 0.5 * (x * x - 1), atol=1e-12)
    np.testing.assert_allclose(f.weak_derivative(x), 2 + x, atol=1e-12)


def test_catalog_unknown():
    with pytest.raises(ValueError, match="unknown catalog"):
        hermite.catalog("nope")
    with pytest.raises(ValueError, match="hermite:q"):
        hermite.catalog("hermite:x")


def test_parseval_catalog_functions():
    # sum_l a_l^2 l! plus the tail equals the exact squared norm
    exact = {
        "hermite:3": 6.0,
        "poly:1,2,0.5": 4.5,
        "abs_centered": 1.0 - 2.0 / math.pi,
        "sign": 1.0,
        "cos_centered": 0.5 * (1 + math.exp(-2.0)) - math.exp(-1.0),
    }
    for spec, norm_sq in exact.items():
        f = hermite.catalog(spec)
        e = f.expansion
        total = e.l2_norm_sq + e.coeffs[0] ** 2 + e.tail_mass
        assert abs(total - norm_sq) <= 1e-6 * norm_sq, spec


# ---------------------------------------------------------------------------
# rank / sparsity / shift
# ---------------------------------------------------------------------------

def test_rank_examples():
    assert hermite.hermite_rank(hermite.catalog("hermite:2").expansion) == 2
    assert hermite.hermite_rank(hermite.catalog("abs_centered").expansion) == 2
    assert hermite.hermite_rank(hermite.catalog("sign").expansion) == 1


def test_rank_degenerate():
    e = hermite.expansion_from_coeffs(np.zeros(5))
    with pytest.raises(ValueError, match="degenerate"):
        hermite.hermite_rank(e)


def test_sparsity_examples():
    assert hermite.sparsity(hermite.catalog("abs_centered").expansion) == 2
    assert hermite.sparsity(hermite.catalog("hermite:2").expansion) == math.inf
    assert hermite.sparsity(hermite.catalog("poly:0,1,1").expansion) == 1
    assert hermite.sparsity(hermite.catalog("sign").expansion) == 2


def test_shift_examples():
    h3 = hermite.catalog("hermite:3").expansion
    shifted = hermite.shift(h3)
    np.testing.assert_allclose(shifted.coeffs, [0, 0, 1.0], atol=0)

    zero = hermite.expansion_from_coeffs(np.zeros(4))
    np.testing.assert_allclose(hermite.shift(zero).coeffs, 0.0, atol=0)

    fabs = hermite.catalog("abs_centered").expansion
    shifted = hermite.shift(fabs)
    assert abs(shifted.coeffs[1] - 0.3989422804014327) < 1e-14
    assert abs(shifted.coeffs[3] - abs_coeff_oracle(2)) < 1e-9


def test_shift_lowers_rank_by_one():
    for spec in ("hermite:4", "abs_centered", "cos_centered", "poly:0,0,1,0.25"):
        e = hermite.catalog(spec).expansion
        if e.rank >= 2:
            assert hermite.shift(e).rank == e.rank - 1
    # rank-1 expansions gain a constant term
    s = hermite.shift(hermite.catalog("sign").expansion)
    assert abs(s.coeffs[0]) > 0.5


def test_shift_tail_shrinks():
    e = hermite.catalog("abs_centered").expansion
    assert hermite.shift(e).tail_mass <= e.tail_mass / e.truncation_order


# ---------------------------------------------------------------------------
# fourth moment constant
# ---------------------------------------------------------------------------

def test_constant_h1():
    assert abs(hermite.fourth_moment_constant(hermite.catalog("hermite:1")) - 1.0) < 1e-12


def test_constant_h2():
    # phi' = 2x, phi_1 = x: (E 16 x^4)^{1/4} (E x^4)^{1/4} = sqrt(12)
    c = hermite.fourth_moment_constant(hermite.catalog("hermite:2"))
    assert abs(c - math.sqrt(12.0)) < 1e-10


def test_constant_abs():
    # first factor is E[sign^4]^{1/4} = 1, so the constant is the fourth
    # norm of the true shifted function; frozen from the stability study
    # of the resolvent evaluator (two rules and adaptive quadrature agree)
    c = hermite.fourth_moment_constant(hermite.catalog("abs_centered"))
    assert abs(c - 0.4677332447) < 1e-6


def test_constant_rejects_sign():
    f = hermite.catalog("sign")
    with pytest.warns(UserWarning, match="finite difference"):
        with pytest.raises(ValueError, match="vanishes almost everywhere"):
            hermite.fourth_moment_constant(f)


def test_truncated_synthesis_warns_on_heavy_tail():
    f = hermite.catalog("abs_centered")
    bare = hermite.SubordinatedFunction(
        f.eval, f.weak_derivative, f.expansion, "abs_no_shift")
    with pytest.warns(UserWarning, match="tail mass"):
        hermite.fourth_moment_constant(bare)


def test_abs_shifted_eval_recovers_coeffs():
    # strong oracle: projecting the resolvent evaluator onto H_{2k-1}
    # must recover the exact expansion coefficients
    phi1 = hermite.abs_shifted_eval(800)
    x, w = gauss_oracle_nodes(400)
    vals = phi1(x)
    for k in (1, 2, 3):
        proj = float(w @ (vals * eval_hermitenorm(2 * k - 1, x)))
        a = proj / math.factorial(2 * k - 1)
        expect = hermite.catalog("abs_centered").expansion.coeffs[2 * k]
        assert abs(a - expect) < 2e-6


# ---------------------------------------------------------------------------
# product formula
# ---------------------------------------------------------------------------

def test_product_terms_examples():
    assert hermite.hermite_product_terms(1, 1, 0.3) == [(2, 1.0), (0, 0.3)]
    terms = dict(hermite.hermite_product_terms(1, 2, 0.4))
    assert 0 not in terms  # no constant term across orders
    const = dict(hermite.hermite_product_terms(2, 2, 0.5))[0]
    assert abs(const - 0.5) < 1e-15


def test_product_constant_matches_joint_quadrature():
    for p in range(7):
        for q in range(7):
            for rho in (-0.9, -0.5, 0.0, 0.5, 0.9):
                quad = joint_gauss_expectation(
                    lambda x, y, _p=p, _q=q: eval_hermitenorm(_p, x) * eval_hermitenorm(_q, y),
                    rho)
                assert abs(quad - hermite.product_constant_term(p, q, rho)) < 1e-8


def test_product_order_overflow():
    with pytest.raises(ValueError, match="outside"):
        hermite.hermite_product_terms(70, 2, 0.5)
    with pytest.raises(ValueError, match="correlation"):
        hermite.hermite_product_terms(2, 2, 1.5)


# ---------------------------------------------------------------------------
# vanishing first-chaos projection for 2-sparse functions
# ---------------------------------------------------------------------------

def test_two_sparse_product_has_rank_two():
    # F = phi'(X) phi_1(Y) - E[F] projects to zero on the first chaos
    fabs = hermite.catalog("abs_centered")
    fcos = hermite.catalog("cos_centered")
    cases = [
        (fabs.weak_derivative, fabs.shifted_eval),
        (fcos.weak_derivative,
         lambda x, _e=hermite.shift(fcos.expansion): hermite.evaluate_expansion(_e, x)),
    ]
    for dphi, phi1 in cases:
        for rho in (-0.9, -0.4, 0.0, 0.6, 0.9):
            fxy = lambda x, y: np.asarray(dphi(x)) * np.asarray(phi1(y))
            mean = joint_gauss_expectation(fxy, rho)
            for pick in ("x", "y"):
                proj = joint_gauss_expectation(
                    lambda x, y, _p=pick: (fxy(x, y) - mean) * (x if _p == "x" else y),
                    rho)
                assert abs(proj) <= 1e-6
