"""Localize lossy links from exact path measurements.

Path observations underdetermine the link losses: a whole family of link
assignments is consistent with any observation vector.  Preferring the
fewest lossy links resolves the ambiguity, and on a tree the minimum-l1
solution (which provably also has minimal sparsity) comes from one
bottom-up pass that pulls shared child loss into each father link.
"""

import numpy as np

from losstree import (
    addloss,
    build_tree,
    forward,
    inverse_addloss,
    receiver_solution,
    unique_sparsest,
    upsparse,
)

tree = build_tree([(4, 0), (5, 4), (3, 4), (1, 5), (2, 5)], root=0)

# Plant a ground truth: the top link and leaf 3 are lossy.
b_true = np.array([0.0, 0.0, 0.05, 0.10, 0.0])
x_true = addloss(b_true)
y = forward(tree, x_true)
print("observations (addloss):", np.round(y, 4))

# The fallback explanation blames every receiver link.
receiver = receiver_solution(tree, y)
print("receiver solution:", np.round(receiver, 4), "-> lossy links:",
      int((receiver > 1e-9).sum()))

# The sparse solver pulls the shared loss up and names two links.
report = upsparse(tree, y)
print("sparse solution:  ", np.round(report.x, 4), "-> lossy links:", report.l0)
print("recovered loss probabilities:", np.round(inverse_addloss(report.x), 4))
print("matches planted truth:", bool(np.abs(report.x - x_true).max() < 1e-12))
print("complex states:", [(s.node, s.state) for s in report.states])

# Uniqueness depends on where the loss sits.  Two lossy links meeting at
# one branch node with a single lossless sibling admit an equally sparse
# alternative; the diagnostic spots that from the solution alone.
y_ambiguous = np.array([2.0, 3.0, 4.0])
amb = upsparse(tree, y_ambiguous)
print("\nobservations", y_ambiguous, "-> solution", amb.x, f"(l0={amb.l0})")
print("unique sparsest?", unique_sparsest(tree, amb.x))
