"""Minimal-norm solutions for exact path observations.

The solution family for a fixed observation y can be searched by local
moves on "complexes" (an internal node together with its incident links):
pulling the common part of the child losses up into the father link never
increases either norm.  Applying that move bottom up once per internal
node (``upsparse``) yields, for any feasible starting solution, the same
output: the unique minimum-l1 solution, which also attains the minimum l0.

That output has the closed form x*_i = gamma_i - gamma_f(i), where
gamma_i is the smallest observation in the subtree under i (and the top
link takes gamma itself).  ``closed_form`` computes it in one pass and is
the production path; the iterative ``upsparse`` is kept for
cross-validation and exposes the per-complex machinery.
"""

from dataclasses import asdict, dataclass

import numpy as np

from .errors import InfeasibleStart, NotInternal
from .lossmodel import DEFAULT_TOL, forward, is_feasible, receiver_solution
from .topology import ROOT, LogicalTree

UP = "up"
DOWN = "down"
MIXED = "mixed"


@dataclass
class ComplexState:
    """State of one internal node's complex under a solution x.

    ``delta`` is the smallest child loss (the amount an up-move would
    transfer); ``lossless_children`` counts child links at or below the
    lossy threshold.  A complex is "up" when no loss can be pulled up
    (some child is lossless), "down" when the father link is lossless but
    some child is lossy, and "mixed" otherwise.  A complex with father
    and children all lossless counts as "up".
    """

    node: int
    state: str
    delta: float
    lossless_children: int


@dataclass
class SolutionReport:
    x: np.ndarray
    l0: int
    l1: float
    states: list[ComplexState]
    unique_sparsest: bool
    recovery_condition: bool

    def to_json(self) -> dict:
        d = asdict(self)
        d["x"] = [float(v) for v in self.x]
        d["l1"] = float(self.l1)
        return d


def put_in_upstate(tree: LogicalTree, i: int, x) -> np.ndarray:
    """Pull the common child loss of node i up into its father link.

    Subtracts delta = min child loss from every child of i and adds it to
    link i, preserving all path sums; l1 drops by (#children - 1) * delta.
    """
    if not tree.is_internal(i):
        raise NotInternal(f"node {i} is not an internal node")
    x = np.array(x, dtype=float)
    kids = [c - 1 for c in tree.children[i]]
    delta = x[kids].min()
    x[kids] -= delta
    x[i - 1] += delta
    return x


def upsparse(tree: LogicalTree, y, x0=None, tol: float = DEFAULT_TOL) -> SolutionReport:
    """Iteratively move every complex to its up state, bottom level first.

    Starts from ``x0`` (default: the receiver solution) and visits internal
    nodes level by level from the deepest, in canonical label order within
    a level.  The output is independent of the starting solution.
    """
    y = np.asarray(y, dtype=float)
    if x0 is None:
        x = receiver_solution(tree, y)
    else:
        if not is_feasible(tree, x0, y, tol):
            raise InfeasibleStart("x0 does not satisfy the observations")
        x = np.array(x0, dtype=float)
    for level in range(tree.height - 1, 0, -1):
        for v in tree.levels[level]:
            if tree.is_internal(v):
                x = put_in_upstate(tree, v, x)
    return solution_report(tree, x, tol)


def closed_form(tree: LogicalTree, y) -> np.ndarray:
    """Minimum-l1 solution directly from per-subtree observation minima."""
    y = np.asarray(y, dtype=float)
    gamma = np.empty(tree.n + 1)
    gamma[ROOT] = 0.0
    x = np.empty(tree.n)
    for v in range(1, tree.n + 1):
        lo, hi = tree.leaf_span[v]
        gamma[v] = y[lo - 1 : hi - 1].min()
    for v in range(1, tree.n + 1):
        x[v - 1] = gamma[v] if tree.parent[v] == ROOT else gamma[v] - gamma[tree.parent[v]]
    return x


def closed_form_batch(tree: LogicalTree, ys: np.ndarray) -> np.ndarray:
    """``closed_form`` applied to every row of a (batch, m) observation array."""
    ys = np.asarray(ys, dtype=float)
    gamma = np.empty((ys.shape[0], tree.n + 1))
    gamma[:, ROOT] = 0.0
    for v in range(1, tree.n + 1):
        lo, hi = tree.leaf_span[v]
        gamma[:, v] = ys[:, lo - 1 : hi - 1].min(axis=1)
    x = np.empty((ys.shape[0], tree.n))
    for v in range(1, tree.n + 1):
        p = int(tree.parent[v])
        x[:, v - 1] = gamma[:, v] if p == ROOT else gamma[:, v] - gamma[:, p]
    return x


def classify_complexes(tree: LogicalTree, x, tol: float = DEFAULT_TOL) -> list[ComplexState]:
    """Per-internal-node complex states under solution x."""
    x = np.asarray(x, dtype=float)
    out = []
    for i in tree.internal:
        kid_vals = x[[c - 1 for c in tree.children[i]]]
        delta = float(kid_vals.min())
        lossless = int((kid_vals <= tol).sum())
        if delta <= tol:
            state = UP
        elif x[i - 1] <= tol:
            state = DOWN
        else:
            state = MIXED
        out.append(ComplexState(node=i, state=state, delta=delta, lossless_children=lossless))
    return out


def unique_sparsest(tree: LogicalTree, x_star, tol: float = DEFAULT_TOL) -> bool:
    """Whether the minimum-sparsity solution x_star is the only one.

    ``x_star`` must be an ``upsparse``/``closed_form`` output.  A complex
    whose father link is lossy but with only a single lossless child
    admits a down move of equal sparsity, so uniqueness requires every
    complex to have either a lossless father link or at least two
    lossless children.
    """
    x_star = np.asarray(x_star, dtype=float)
    for i in tree.internal:
        if x_star[i - 1] <= tol:
            continue
        kid_vals = x_star[[c - 1 for c in tree.children[i]]]
        if (kid_vals <= tol).sum() < 2:
            return False
    return True


def recovery_condition(tree: LogicalTree, x_true, tol: float = DEFAULT_TOL) -> bool:
    """Whether every internal node has at least one lossless child link.

    When true for the underlying solution, it is already in up state
    everywhere, so solving its observations recovers it exactly.
    """
    x_true = np.asarray(x_true, dtype=float)
    for i in tree.internal:
        kid_vals = x_true[[c - 1 for c in tree.children[i]]]
        if kid_vals.min() > tol:
            return False
    return True


def solution_report(tree: LogicalTree, x, tol: float = DEFAULT_TOL) -> SolutionReport:
    """Norms, complex states, and diagnostics for a feasible solution x."""
    x = np.asarray(x, dtype=float)
    return SolutionReport(
        x=x,
        l0=int((x > tol).sum()),
        l1=float(x.sum()),
        states=classify_complexes(tree, x, tol),
        unique_sparsest=unique_sparsest(tree, x, tol),
        recovery_condition=recovery_condition(tree, x, tol),
    )


def local_l1(y, x) -> float:
    """l1 norm of the one-complex family member with father-link loss x.

    For child observations y the family is [y_1 - x, ..., y_m - x, x],
    so the norm is sum(y) - x * (len(y) - 1), decreasing in x.
    """
    y = np.asarray(y, dtype=float)
    return float(y.sum() - x * (len(y) - 1))


__all__ = [
    "ComplexState",
    "SolutionReport",
    "put_in_upstate",
    "upsparse",
    "closed_form",
    "closed_form_batch",
    "classify_complexes",
    "unique_sparsest",
    "recovery_condition",
    "solution_report",
    "local_l1",
    "UP",
    "DOWN",
    "MIXED",
]
