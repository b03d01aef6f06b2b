"""The full bound chain, checked statistically on simulated data.

For each configuration the chain reads

    d_TV estimate  <=  2 sqrt(Var of the inner product)  <=
    (4c/s) sqrt(quadruple sum)  <=  closed-form bounds,

where the first link is Stein's method (the inner product has mean
exactly one and its variance controls the distance), the second is the
maximal correlation inequality, and the third is the Hoelder and Young
relaxation.  Takes about a minute.
"""

import math

from breuer_major import cli

cfg = cli.ExperimentConfig(
    function="hermite:2",
    model="exp:0.5",
    n_grid=(256, 1024),
    reps=4000,
    seed=42,
)
for rep in cli.run_full(cfg):
    est = rep.mc_tv
    safe = max(0.0, est["value"] - (est["ci_high"] - est["ci_low"]) - est["bias_bound"])
    print(f"\nn = {rep.n}")
    print(f"  TV estimate {est['value']:.4f} "
          f"(CI [{est['ci_low']:.4f}, {est['ci_high']:.4f}], "
          f"bias bound {est['bias_bound']:.4f}) -> safe value {safe:.4f}")
    print(f"  Kolmogorov estimate {rep.mc_kolmogorov['value']:.4f}")
    print(f"  inner product: mean {rep.mc_inner_mean:.5f} (exact value 1), "
          f"2 sqrt(var) = {rep.mc_two_sqrt_var:.4f}")
    print(f"  variance-route bound {rep.quad_bound_squared:.4f}")
    print(f"  closed forms: plain {rep.bound_l1:.4f}, "
          f"best interpolating {rep.best_lb_value:.4f} at b* = {rep.best_b:.2f}")
    checks = cli.chain_checks(rep)
    print("  chain checks: " + ("all hold" if all(checks.values())
                                else str(checks)))
    print(f"  scaled distance sqrt(n) * TV = "
          f"{est['value'] * math.sqrt(rep.n):.3f} (bounded along the grid)")
