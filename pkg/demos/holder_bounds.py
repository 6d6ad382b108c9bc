"""
Holder exponents between spirals
================================

Compare the two upper bounds on the exponent of a Holder map sending one
spiral onto another, and sweep a parameter grid.
"""

from ellspiral.holder import DeformationPair, best_bound, grid, hyperbolic_bound, is_nontrivial, sweep

pair = DeformationPair.of(0.4, 0.7, 0.2, 0.3)
rep = best_bound(pair)
print(f"box bound {rep.box_bound:.5f}, profile bound {rep.profile_bound:.5f}; "
      f"best {rep.best:.5f} from {rep.binding}")

# between hyperbolic spirals the profile bound reduces to (p+q)/(2p)
print("hyperbolic 0.5 -> 0.25:", hyperbolic_bound(0.5, 0.25))

# a target that is no thinner than the source gives no information
print(best_bound(DeformationPair.of(0.1, 0.1, 0.9, 0.9)).binding)

# on the full grid the profile bound wins wherever the box bound says anything
values = grid(0.05, 0.95, 0.05)
rows = sweep(values, values, values, values)
useful = [(box, prof) for *_, box, prof in rows if is_nontrivial(box)]
print(f"{len(rows)} grid points, {len(useful)} with a nontrivial box bound, "
      f"profile better at {sum(p < b for b, p in useful)}")
