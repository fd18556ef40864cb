"""Convergence speed: linear vs quadratic, and the certified conditions.

The linear construction halves the distance to the limit once per level
(error 2^-k needs ~k levels); the quadratic constructions square it
(2^-k needs ~log k levels).  The convergence conditions are certified
numerically on grids; the measured constants come out at c3 <= 4 for the
4-leaf family (u = 1/5) and c3 <= 6 for the 5-leaf family (u = 1/7).
"""
from amptree import (linear_threshold, profile, quad4, quad5, quad_k,
                     verify_conditions)

for dist in (linear_threshold(0.5), quad4(0.5), quad5(0.5), quad_k(0.9)):
    prof = profile(dist, dist.threshold - 0.01)
    targets = [2.0 ** -k for k in (10, 20, 40)]
    levels = [prof.levels_to(t) for t in targets]
    print(f"{dist.label:24s} order={prof.order:10s} "
          f"levels to 2^-10/-20/-40: {levels}")

print()
for dist, u, v in ((quad4(0.5), 1 / 5, 4 / 5), (quad5(0.5), 1 / 7, 6 / 7)):
    rep = verify_conditions(dist, 0.5, u, v)
    print(f"{dist.label}: certified={rep.passed}  c1={rep.c1:.3f} "
          f"c2={rep.c2:.3f} c3={rep.c3:.3f} (c3*u={rep.c3 * u:.3f} < 1) "
          f"c4={rep.c4:.3f}")

rep = verify_conditions(linear_threshold(0.5), 0.5, 1 / 5, 4 / 5)
print(f"{'linear_threshold(0.5)'}: certified={rep.passed}  "
      f"failing: {[f.condition for f in rep.failures]}")
print("(the linear term makes f(p)/p^2 blow up near 0, as expected)")
