"""The catalog of threshold constructions and their fixed points.

Mixing a distribution over small trees gives a mixture activation f whose
interior fixed point is the threshold: iterating f drives inputs firing
below the threshold to 0 and above it to 1.  One tree pins the threshold
at 2-phi; two trees reach any threshold; growing blocks restore quadratic
convergence near the boundary.
"""
from amptree import (fixed_points, linear_threshold, one_step, quad4, quad5,
                     quad_k, soft_threshold, valiant)

for dist in (valiant(), linear_threshold(0.3), quad4(0.5), quad5(0.6),
             quad_k(0.9), quad_k(0.05), one_step(0.5)):
    rep = fixed_points(dist.mixture)
    desc = ", ".join(f"{fp.location:.6f} ({fp.kind.lower()}, f'={fp.derivative:.3f})"
                     for fp in rep.points)
    print(f"{dist.label:26s} weights={[round(w, 4) for _, w in dist.entries]}")
    print(f"{'':26s} fixed points: {desc}")

# An equal mixture of A_k and B_k is deliberately NOT a threshold: for
# k >= 4 the midpoint 1/2 turns attractive and a middle plateau appears.
soft = soft_threshold(6)
rep = fixed_points(soft.mixture)
print("\nsoft_threshold(6) fixed points:",
      [round(fp.location, 4) for fp in rep.points])
print("h'(1/2) =", soft.mixture.derivative()(0.5), "< 1: midpoint attracts")
