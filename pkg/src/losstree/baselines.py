"""Binary good/bad path inference baseline (smallest consistent failure set).

Classifying each path as good or bad and returning the minimal set of
links whose downstream paths are exactly the bad ones is the classic
two-step approach to hotspot localization.  It discards loss magnitudes,
so a lossy link whose ancestor is also lossy gets absorbed into the
ancestor: every path through the child is bad, but so is every path
through the parent, and the parent alone explains them all.
"""

import numpy as np

from .errors import InconsistentObservation
from .lossmodel import DEFAULT_TOL, addloss, forward
from .noiseless import closed_form
from .topology import ROOT, LogicalTree


def binarize(y, threshold: float = DEFAULT_TOL) -> np.ndarray:
    """Per-path bad flags: bad_j iff y_j exceeds the threshold."""
    if threshold < 0:
        raise ValueError("threshold must be non-negative")
    return np.asarray(y, dtype=float) > threshold


def scfs(tree: LogicalTree, bad: np.ndarray) -> set[int]:
    """Smallest link set whose downstream paths are exactly the bad paths.

    A link qualifies when every path through it is bad; the returned set
    keeps only the topmost such links.  The result covers the bad paths
    exactly and no smaller consistent set exists.
    """
    bad = np.asarray(bad, dtype=bool)
    all_bad = np.zeros(tree.n + 1, dtype=bool)
    for v in range(1, tree.n + 1):
        lo, hi = tree.leaf_span[v]
        all_bad[v] = bool(bad[lo - 1 : hi - 1].all())
    picked = {
        v
        for v in range(1, tree.n + 1)
        if all_bad[v] and (tree.parent[v] == ROOT or not all_bad[tree.parent[v]])
    }
    covered = np.zeros(tree.m, dtype=bool)
    for v in picked:
        lo, hi = tree.leaf_span[v]
        covered[lo - 1 : hi - 1] = True
    if not np.array_equal(covered, bad):
        raise InconsistentObservation("picked links do not cover the bad paths")
    return picked


def compare_with_sparse_recovery(
    tree: LogicalTree,
    K: int,
    loss_range: tuple[float, float] = (0.01, 0.10),
    trials: int = 300,
    seed: int = 0,
    threshold: float = DEFAULT_TOL,
    tol: float = DEFAULT_TOL,
) -> tuple[float, float]:
    """Exact-location success rates of the binary baseline vs the l1 solver.

    Shares one instance stream between both methods: per trial, K planted
    lossy links, binary inference run on thresholded observations, the
    minimum-l1 solver on the raw observations.  Success means recovering
    the true support exactly (for the solver, the true solution itself).

    Returns (binary baseline rate, sparse recovery rate).
    """
    n_scfs = 0
    n_sparse = 0
    for t in range(trials):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(K, t)))
        sup = rng.choice(tree.n, size=K, replace=False)
        x_true = np.zeros(tree.n)
        x_true[sup] = addloss(rng.uniform(*loss_range, size=K))
        y = forward(tree, x_true)
        truth = {int(s) + 1 for s in sup}
        n_scfs += scfs(tree, binarize(y, threshold)) == truth
        n_sparse += bool(np.abs(closed_form(tree, y) - x_true).max() <= tol)
    return n_scfs / trials, n_sparse / trials
