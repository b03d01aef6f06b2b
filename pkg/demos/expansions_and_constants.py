"""Tour of the Hermite expansion machinery on the built-in catalog.

Every quantity the bound formulas need starts here: the coefficients
a_l of phi = sum a_l H_l, the rank (first active index), the gap
between active indices, the shifted function phi_1, and the
fourth-moment constant c = E[phi'^4]^{1/4} E[phi_1^4]^{1/4}.
"""

import numpy as np

from breuer_major import hermite

for spec in ("hermite:2", "abs_centered", "sign", "cos_centered", "poly:0,1,1"):
    f = hermite.catalog(spec)
    e = f.expansion
    active = [l for l, a in enumerate(e.coeffs) if abs(a) > 1e-12][:6]
    print(f"\n{spec}")
    print(f"  rank d = {e.rank}, coefficient gap = {e.sparsity:g}, "
          f"variance = {e.l2_norm_sq:.6f}, tail mass = {e.tail_mass:.2e}")
    print(f"  first active indices: {active}")
    print(f"  leading coefficients: "
          + ", ".join(f"a_{l} = {e.coeffs[l]:+.6f}" for l in active[:3]))
    if f.weak_derivative is not None:
        c = hermite.fourth_moment_constant(f)
        print(f"  fourth-moment constant c(phi) = {c:.6f}")
    else:
        print("  no weak derivative: the bound pipeline rejects this entry")

print("\nShift map on the abs expansion (index l moves to l - 1):")
fabs = hermite.catalog("abs_centered")
shifted = hermite.shift(fabs.expansion)
print(f"  rank {fabs.expansion.rank} -> {shifted.rank}")
print(f"  a_2 = {fabs.expansion.coeffs[2]:+.6f} becomes index-1 "
      f"coefficient {shifted.coeffs[1]:+.6f}")

print("\nProduct of Hermite polynomials of correlated Gaussians, "
      "H_2(W(h)) H_2(W(g)) with <h,g> = 0.5:")
for order, coeff in hermite.hermite_product_terms(2, 2, 0.5):
    print(f"  chaos order {order}: coefficient {coeff:g}")
print("  the order-0 coefficient is the covariance E[H_2 H_2] = 2 rho^2")

print("\nQuadrature expansion of a user function, phi(x) = x^3 - 3x:")
e = hermite.expand(lambda x: x ** 3 - 3 * x, trunc_order=8, quad_order=64)
print("  coefficients:", np.round(e.coeffs, 10))
