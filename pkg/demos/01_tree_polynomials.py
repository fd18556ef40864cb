"""Trees, activation polynomials, and the achievable-polynomial table.

An AND/OR tree on n anonymous leaves computes a monotone Boolean function;
feeding it i.i.d. Bernoulli(p) inputs makes its output fire with a
polynomial probability f(p).  This walk-through builds a few trees by
hand, reads off their polynomials, and enumerates every polynomial
realizable with up to six leaves.
"""
import itertools

from amptree import (achievable_by_degree, and_, build_ak, build_bk,
                     complement_tree, eval_tree, format_tree, leaf, or_,
                     tree_polynomial)

x = leaf()

# Valiant's 4-leaf block: (A v B) ^ (C v D)
valiant = and_(or_(x, x), or_(x, x))
print("tree:", format_tree(valiant))
print("polynomial:", tree_polynomial(valiant).coeffs, " (4p^2 - 4p^3 + p^4)")

# Its Boolean function, exhaustively
fires = [bits for bits in itertools.product((0, 1), repeat=4)
         if eval_tree(valiant, bits)]
print(f"fires on {len(fires)}/16 assignments")

# Complementing swaps every gate and mirrors the polynomial: f_B(1-p) = 1 - f_A(p)
comp = complement_tree(valiant)
print("complement:", format_tree(comp), "->", tree_polynomial(comp).coeffs)
fa, fb = tree_polynomial(valiant), tree_polynomial(comp)
p = 0.3
print(f"f_B(1-p) = {fb(1 - p):.6f}   1 - f_A(p) = {1 - fa(p):.6f}")

# The wide-gate family: A_k = OR_k ^ OR_k and B_k = AND_k v AND_k
print("\nA_3:", tree_polynomial(build_ak(3)).coeffs)
print("B_3:", tree_polynomial(build_bk(3)).coeffs, " (2p^3 - p^6)")

# Everything achievable with at most 6 leaves, deduplicated by polynomial
print("\nachievable polynomials by degree:")
for degree, polys in achievable_by_degree(6).items():
    print(f"  degree {degree}: {len(polys)} polynomials")
    if degree <= 3:
        for q in sorted(polys, key=lambda q: q.coeffs):
            print("     ", q.coeffs)
