"""Additive loss transform and the linear observation model on a tree.

Link loss probabilities b_k in [0, 1) map through the addloss transform
x_k = -log(1 - b_k) to non-negative additive quantities, so that the path
observation vector satisfies y = A x for the tree's measurement matrix A.
Zero addloss means zero loss.  All solvers in this package work on the
addloss scale.

The system is underdetermined: fixing the internal-link values x_I leaves
the leaf values forced to x_R = y - A_I x_I, which is feasible exactly
when every component stays non-negative.  Setting x_I = 0 gives the
receiver solution, feasible for any observation.
"""

import json

import numpy as np

from .errors import Infeasible, OutOfDomain
from .topology import LogicalTree

# A value is classified lossy iff it exceeds DEFAULT_TOL; shared by the
# l0 counting and feasibility checks across the package.
DEFAULT_TOL = 1e-9


def addloss(b) -> np.ndarray:
    """Map loss probabilities in [0, 1) to addloss units, elementwise."""
    b = np.asarray(b, dtype=float)
    if np.any(b < 0) or np.any(b >= 1):
        raise OutOfDomain("loss probabilities must lie in [0, 1)")
    return -np.log1p(-b)


def inverse_addloss(x) -> np.ndarray:
    """Map addloss values in [0, inf] back to loss probabilities."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise OutOfDomain("addloss values must be non-negative")
    return -np.expm1(-x)


def forward(tree: LogicalTree, x) -> np.ndarray:
    """Path observations y_j = sum of x over the links on path j."""
    x = np.asarray(x, dtype=float)
    return np.array([x[[k - 1 for k in path]].sum() for path in tree.paths])


def receiver_solution(tree: LogicalTree, y) -> np.ndarray:
    """The solution that puts all loss on the leaf links: x_R = y, x_I = 0."""
    y = np.asarray(y, dtype=float)
    x = np.zeros(tree.n)
    x[: tree.m] = y
    return x


def general_solution(tree: LogicalTree, x_internal, y, tol: float = DEFAULT_TOL):
    """Solution with the given internal-link values; leaf values are forced.

    Raises Infeasible if some leaf value would drop below -tol, i.e. the
    internal assignment lies outside the feasible polytope for this y.
    """
    y = np.asarray(y, dtype=float)
    x_internal = np.asarray(x_internal, dtype=float)
    x = np.zeros(tree.n)
    x[tree.m :] = x_internal
    for j in tree.leaves:
        above = sum(x[k - 1] for k in tree.paths[j - 1][:-1])
        leaf_val = y[j - 1] - above
        if leaf_val < -tol:
            raise Infeasible(
                f"internal values overshoot path {j}: leaf value {leaf_val:.3g}"
            )
        x[j - 1] = leaf_val
    return x


def is_feasible(tree: LogicalTree, x, y, tol: float = DEFAULT_TOL) -> bool:
    """True iff x >= -tol componentwise and the path sums match y within tol."""
    x = np.asarray(x, dtype=float)
    if x.min() < -tol:
        return False
    return np.abs(forward(tree, x) - y).max() <= tol


def sample_feasible(tree: LogicalTree, y, rng: np.random.Generator) -> np.ndarray:
    """Draw one solution from the feasible polytope of y = A x, x >= 0.

    Internal links are sampled top down, each uniformly within the slack
    its ancestors leave on the tightest path below it; leaves take the
    remainder.  Covers the polytope interior (not uniformly).
    """
    y = np.asarray(y, dtype=float)
    x = np.zeros(tree.n)
    used = np.zeros(tree.n + 1)  # loss already assigned above each node
    for level in tree.levels[1:]:
        for v in level:
            if not tree.is_internal(v):
                continue
            lo, hi = tree.leaf_span[v]
            cap = (y[lo - 1 : hi - 1] - used[v]).min()
            x[v - 1] = rng.uniform(0.0, max(cap, 0.0))
            for c in tree.children[v]:
                used[c] = used[v] + x[v - 1]
    for j in tree.leaves:
        x[j - 1] = max(y[j - 1] - used[j], 0.0)
    return x


def save_observations(y, path, scale: str = "addloss") -> None:
    """Write a JSON observation file: {"scale": ..., "y": [...]}."""
    if scale not in ("addloss", "probability"):
        raise OutOfDomain(f"unknown scale {scale!r}")
    y = np.asarray(y, dtype=float)
    values = y if scale == "addloss" else inverse_addloss(y)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"scale": scale, "y": [float(v) for v in values]}, fh)
        fh.write("\n")


def load_observations(path) -> np.ndarray:
    """Read observations in addloss units from a JSON or text file.

    JSON files hold either a bare array (addloss scale) or an object
    {"scale": "addloss"|"probability", "y": [...]}.  Text files hold one
    ``y <path> <value>`` line per path, after an optional ``scale <name>``
    header; '#' starts a comment.
    """
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    stripped = text.lstrip()
    if stripped.startswith("[") or stripped.startswith("{"):
        data = json.loads(text)
        if isinstance(data, list):
            scale, values = "addloss", np.asarray(data, dtype=float)
        else:
            scale = data.get("scale", "addloss")
            values = np.asarray(data["y"], dtype=float)
    else:
        scale = "addloss"
        entries = {}
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if parts[0] == "scale":
                scale = parts[1]
            elif parts[0] == "y":
                entries[int(parts[1])] = float(parts[2])
            else:
                raise OutOfDomain(f"unrecognized observation line: {line!r}")
        values = np.array([entries[j] for j in sorted(entries)])
    if scale == "probability":
        return addloss(values)
    if scale != "addloss":
        raise OutOfDomain(f"unknown scale {scale!r}")
    if np.any(values < 0):
        raise OutOfDomain("observations must be non-negative")
    return values
