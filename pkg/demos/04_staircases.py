"""Staircase functions: beyond thresholds.

Allowing arbitrary building-block trees, the reachable limit shapes are
exactly the monotone staircases whose every step crosses y = x.  The
constructive pipeline: a single tree with a fixed point near each
breakpoint (a dense family exists), self-composed until razor sharp, then
mixed with weights equal to the plateau increments.
"""
import numpy as np

from amptree import (StaircaseSpec, activation, amplifier, dense_fixed_point,
                     scan_fixed_points, staircase)

# A single tree with a fixed point within 0.02 of 0.57, built from the
# B_2 anchor by composing through (OR_j ^ x) gadgets
tree = dense_fixed_point(0.57, 0.02)
fp = scan_fixed_points(lambda p: activation(tree, p))[0]
print(f"dense tree: {tree.leaf_count} leaves, fixed point {fp:.6f}")

# Sharpen it: T^k with the smallest k giving a (0.05, 0.05) cliff.  The
# semantic leaf count explodes exponentially in k, but structure sharing
# keeps the in-memory node count tiny, so the guard can be generous.
amp = amplifier(tree, 0.05, 0.05, max_leaves=10 ** 12)
print(f"amplified with k={amp.k}: {amp.tree.leaf_count} (semantic) leaves")
for p in (fp - 0.05, fp + 0.05):
    print(f"  activation({p:.3f}) = {activation(amp.tree, p):.5f}")

# A two-step staircase: 0 below 0.3, 1/2 between, 1 above 0.7
spec = StaircaseSpec(breakpoints=(0.3, 0.7), heights=(0.5,),
                     epsilon=0.1, delta=0.1)
dist = staircase(spec)
print(f"\n{dist.label}")
print(f"{'p':>6s} {'f(p)':>9s}")
for p in np.linspace(0.05, 0.95, 10):
    print(f"{p:6.2f} {dist.evaluate(float(p)):9.5f}")
