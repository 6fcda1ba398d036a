"""The two optimization programs behind the credal dominance tests.

A ratio of linear forms over a lower-bounded simplex is minimized exactly:
the Charnes-Cooper substitution turns it into a linear program (one extra
variable, one extra constraint) solved by a dense two-phase simplex, and
the optimum provably sits on one of the k vertices.  The compression
variant instead needs a ratio of weighted log sums, minimized by
multistart projected gradient and checked here against a brute-force grid.
"""

import numpy as np

from credal_aode import (
    FractionalLP,
    RatioProgram,
    charnes_cooper,
    fractional_min,
    minimize_ratio,
    vertex_oracle,
)

rng = np.random.default_rng(0)

print("=== linear-fractional program ===")
fp = FractionalLP(num_coeffs=rng.uniform(0, 1, 4), den_coeffs=rng.uniform(0.1, 1, 4),
                  lower=0.01, total=1.0)
lp = charnes_cooper(fp)
print(f"{fp.size} ratio variables -> {lp.c.shape[0]} LP variables, "
      f"{lp.A_eq.shape[0] + lp.A_ub.shape[0]} constraints")
value, x = fractional_min(fp)
print(f"simplex optimum   : {value:.12f} at x = {x.round(4).tolist()}")
print(f"vertex enumeration: {vertex_oracle(fp):.12f}")
print("the optimizer concentrates mass on the best vertex:", x.round(3).tolist())

print("\n=== ratio-of-log-sums program ===")
alpha = np.array([0.62, 0.31, 0.55])
beta = 1.0 - alpha
ll0 = -40.0
d = np.log(0.01) + ll0 - (ll0 + np.array([12.0, 7.0, 16.0]))
rp = RatioProgram(alpha=alpha, beta=beta, a=float(alpha @ d), b=float(beta @ d),
                  epsilon=0.01, n_models=3)
value, y = minimize_ratio(rp, seed=0)
print(f"multistart solver : {value:.8f} at y = {y.round(4).tolist()}")

# brute-force check on a lattice of the feasible simplex
step = 2e-3
axis = np.arange(rp.epsilon, rp.total(), step)
g1, g2 = np.meshgrid(axis, axis, indexing="ij")
g3 = rp.total() - g1 - g2
ok = g3 >= rp.epsilon
pts = np.column_stack([g1[ok], g2[ok], g3[ok]])
grid_val = float(np.min(rp.value_at(pts)))
print(f"grid search       : {grid_val:.8f} ({pts.shape[0]} lattice points)")
print(f"dominance decision (min > 1): solver={value > 1}, grid={grid_val > 1}")
