"""Cross-check the fast solvers against brute force.

The enumeration oracle scans every link subset by size and solves the
restricted least-squares system, so it finds the true minimal sparsity
(and every solution attaining it) without using any tree insight.  The
sampling check compares the solver's l1 norm against random feasible
solutions, and the adversarial construction produces instances whose
sparsest solution provably cannot be unique.
"""

import numpy as np

from losstree import (
    build_tree,
    forward,
    gen_regular_tree,
    l1_sampling_check,
    lemma1_construct,
    sparsest_enumerate,
    upsparse,
)

tree = build_tree([(4, 0), (5, 4), (3, 4), (1, 5), (2, 5)], root=0)
y = np.array([2.0, 3.0, 4.0])

report = upsparse(tree, y)
enum = sparsest_enumerate(tree, y)
print(f"solver l0={report.l0}, oracle minimal sparsity={enum.k_star}")
print(f"all sparsest solutions ({len(enum.solutions)}, unique={enum.unique}):")
for sup, sol in zip(enum.supports, enum.solutions):
    print("  support", sup, "->", sol)

print("solver l1 beats 1000 random feasible solutions:",
      l1_sampling_check(tree, y, report.x, samples=1000, seed=0))

# Concentrating enough lossy links at one branch point always defeats
# uniqueness: two different vectors produce identical observations.
ternary = gen_regular_tree(3, 2)
u, v = lemma1_construct(ternary, i=4, K=3, w=0.2)
print("\nadversarial pair at a ternary branch point:")
print("  u =", u, " (3 lossy links)")
print("  v =", v, f" ({int((v > 0).sum())} lossy links)")
print("  identical observations:",
      bool(np.array_equal(forward(ternary, u), forward(ternary, v))))
