"""Rooted logical trees, canonical labeling, generators, and measurement matrices.

A logical tree has a root with exactly one child, internal nodes with at
least two children, and leaves with none.  Each non-root node is identified
with the link from its father, so a tree with n non-root nodes has n links,
of which the m leaves carry the m measured root-to-leaf paths.

Canonical labels number the leaves 1..m left to right and the internal
nodes m+1..n in preorder starting from the root's child.  Under this
labeling the first m columns of the measurement matrix form an identity
block.  "Left to right" means first-appearance order of each node's
children in the input edge list (generators emit children in creation
order), which makes construction deterministic.

Trees and matrices are immutable after construction and safe to share
across concurrent tasks.
"""

import os
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import (
    CycleDetected,
    DegreeViolation,
    DisconnectedInput,
    ParameterOutOfRange,
)

ROOT = 0  # canonical label of the root node


@dataclass(eq=False)
class LogicalTree:
    """Canonically labeled rooted tree.

    Attributes:
        n: number of links (equivalently, non-root nodes).
        m: number of leaves, which is also the number of measured paths.
        parent: parent[k] is the father of node k for k in 1..n; parent[0] = -1.
        children: children[v] lists v's children in left-to-right order.
        depth: depth[k] counts links on the path from the root to node k.
        alias: canonical label -> original node id from the input edge list.
    """

    n: int
    m: int
    parent: np.ndarray
    children: tuple[tuple[int, ...], ...]
    depth: np.ndarray
    alias: dict[int, object]

    @property
    def leaves(self) -> range:
        return range(1, self.m + 1)

    @property
    def internal(self) -> range:
        """Internal node (link) labels, m+1..n."""
        return range(self.m + 1, self.n + 1)

    @cached_property
    def height(self) -> int:
        return int(self.depth.max())

    @cached_property
    def label(self) -> dict:
        """Original node id -> canonical label (inverse of ``alias``)."""
        return {orig: lab for lab, orig in self.alias.items()}

    @cached_property
    def paths(self) -> tuple[tuple[int, ...], ...]:
        """paths[j-1] lists the links on the root-to-leaf-j path, top down."""
        out = []
        for j in self.leaves:
            chain = []
            v = j
            while v != ROOT:
                chain.append(v)
                v = int(self.parent[v])
            out.append(tuple(reversed(chain)))
        return tuple(out)

    @cached_property
    def leaf_span(self) -> np.ndarray:
        """leaf_span[v] = (lo, hi): leaves of v's subtree are lo..hi-1."""
        span = np.zeros((self.n + 1, 2), dtype=np.int64)
        for j in self.leaves:
            span[j] = (j, j + 1)
        # Internal labels follow preorder, so descendants have larger labels:
        # a reverse sweep sees every child before its father.
        for v in range(self.n, self.m, -1):
            kids = self.children[v]
            span[v] = (span[kids[0]][0], span[kids[-1]][1])
        span[ROOT] = (1, self.m + 1)
        return span

    @cached_property
    def levels(self) -> tuple[tuple[int, ...], ...]:
        """levels[d] lists the nodes at depth d in canonical label order."""
        out = [[] for _ in range(self.height + 1)]
        for v in range(1, self.n + 1):
            out[self.depth[v]].append(v)
        return tuple(tuple(level) for level in out)

    def subtree_leaves(self, v: int) -> range:
        lo, hi = self.leaf_span[v]
        return range(int(lo), int(hi))

    def is_internal(self, v: int) -> bool:
        return self.m < v <= self.n


@dataclass(eq=False)
class MeasurementMatrix:
    """Binary path-by-link incidence, stored as per-path link lists.

    Row j holds the links on the root-to-leaf-j path; under canonical
    labeling the first m columns form the m-by-m identity.
    """

    m: int
    n: int
    rows: tuple[tuple[int, ...], ...]

    def dense(self) -> np.ndarray:
        """Dense m-by-n 0/1 array; column k-1 corresponds to link k."""
        a = np.zeros((self.m, self.n), dtype=np.int64)
        for j, links in enumerate(self.rows):
            a[j, [k - 1 for k in links]] = 1
        return a


def build_tree(edges, root) -> LogicalTree:
    """Build a canonically labeled tree from (child, parent) pairs.

    Child order under each node is first-appearance order in ``edges``.

    Raises:
        CycleDetected: the edge list contains a cycle.
        DisconnectedInput: a node is unreachable from the root.
        DegreeViolation: the root does not have exactly one child, an
            internal node has exactly one child, or the root's child is a
            leaf (which would leave no internal link).
    """
    children: dict = {root: []}
    parent: dict = {}
    for child, par in edges:
        if child == root:
            raise CycleDetected(f"root {root!r} appears as a child")
        if child in parent:
            raise DisconnectedInput(f"node {child!r} has two parents")
        parent[child] = par
        children.setdefault(par, [])
        children.setdefault(child, [])
        children[par].append(child)
    if not parent:
        raise DegreeViolation("empty edge list")

    # Every node must reach the root through the father map.
    resolved = {root}
    for start in parent:
        trail = []
        v = start
        while v not in resolved:
            if v in trail:
                raise CycleDetected(f"cycle through node {v!r}")
            trail.append(v)
            if v != root and v not in parent:
                raise DisconnectedInput(f"node {v!r} has no path to the root")
            v = parent.get(v)
        resolved.update(trail)

    if len(children[root]) != 1:
        raise DegreeViolation(
            f"root must have exactly one child, found {len(children[root])}"
        )
    for v, kids in children.items():
        if v != root and len(kids) == 1:
            raise DegreeViolation(f"internal node {v!r} has exactly one child")
    top = children[root][0]
    if not children[top]:
        raise DegreeViolation("root's child must be internal (n >= m+1)")

    # One DFS from the root's child yields leaf order and internal preorder.
    leaf_order: list = []
    internal_order: list = []
    stack = [top]
    while stack:
        v = stack.pop()
        if children[v]:
            internal_order.append(v)
            stack.extend(reversed(children[v]))
        else:
            leaf_order.append(v)

    m = len(leaf_order)
    n = m + len(internal_order)
    label = {orig: j + 1 for j, orig in enumerate(leaf_order)}
    label.update({orig: m + 1 + i for i, orig in enumerate(internal_order)})

    parent_arr = np.full(n + 1, -1, dtype=np.int64)
    depth_arr = np.zeros(n + 1, dtype=np.int64)
    kids_canon: list[tuple[int, ...]] = [()] * (n + 1)
    kids_canon[ROOT] = (label[top],)
    parent_arr[label[top]] = ROOT
    for orig, lab in label.items():
        kids_canon[lab] = tuple(label[c] for c in children[orig])
        if orig != top:
            parent_arr[lab] = label[parent[orig]]
    depth_arr[label[top]] = 1
    queue = [label[top]]
    while queue:
        v = queue.pop()
        for c in kids_canon[v]:
            depth_arr[c] = depth_arr[v] + 1
            queue.append(c)

    alias = {lab: orig for orig, lab in label.items()}
    return LogicalTree(
        n=n,
        m=m,
        parent=parent_arr,
        children=tuple(kids_canon),
        depth=depth_arr,
        alias=alias,
    )


def measurement_matrix(tree: LogicalTree) -> MeasurementMatrix:
    """Path-by-link incidence of ``tree`` under canonical labeling."""
    return MeasurementMatrix(m=tree.m, n=tree.n, rows=tree.paths)


def gen_regular_tree(branching: int, height: int) -> LogicalTree:
    """Complete ``branching``-ary tree of the given height under the top link.

    The result has (branching**height - 1) / (branching - 1) links and
    branching**(height-1) leaves.
    """
    if branching < 2 or height < 2:
        raise ParameterOutOfRange(
            f"need branching >= 2 and height >= 2, got ({branching}, {height})"
        )
    edges = [(1, 0)]
    next_id = 2
    frontier = [(1, 1)]  # (node id, depth)
    while frontier:
        v, d = frontier.pop(0)
        if d == height:
            continue
        for _ in range(branching):
            edges.append((next_id, v))
            frontier.append((next_id, d + 1))
            next_id += 1
    return build_tree(edges, root=0)


def gen_ternary_tree(links: int) -> LogicalTree:
    """Deterministic full ternary tree with the requested link count.

    Starts from the largest complete ternary tree not exceeding ``links``
    and grows it by giving three leaf children to the lowest-labeled
    leaves, three links at a time.  Valid link counts are 4, 7, 10, ...
    (any count congruent to 1 mod 3, at least 4).
    """
    if links < 4 or (links - 1) % 3 != 0:
        raise ParameterOutOfRange(
            f"a full ternary tree has 3k+1 links for k >= 1, got {links}"
        )
    height = 2
    while (3 ** (height + 1) - 1) // 2 <= links:
        height += 1
    base = gen_regular_tree(3, height)
    grow = (links - (3**height - 1) // 2) // 3
    edges = [(v, int(base.parent[v])) for v in range(1, base.n + 1)]
    next_id = base.n + 1
    for leaf in range(1, grow + 1):
        for _ in range(3):
            edges.append((next_id, leaf))
            next_id += 1
    return build_tree(edges, root=0)


def gen_random_tree(m: int, max_branching: int, seed: int) -> LogicalTree:
    """Random tree with exactly ``m`` leaves and bounded branching.

    Every internal node receives between 2 and ``max_branching`` children.
    The same seed always produces the same tree.
    """
    if m < 2:
        raise ParameterOutOfRange(f"need at least 2 leaves, got {m}")
    if max_branching < 2:
        raise ParameterOutOfRange(f"need max_branching >= 2, got {max_branching}")
    rng = np.random.default_rng(seed)
    edges = [(1, 0)]
    next_id = 2
    work = [(1, m)]  # (node id, leaves to place under it)
    while work:
        v, quota = work.pop(0)
        k = int(rng.integers(2, min(max_branching, quota) + 1))
        cuts = np.sort(rng.choice(np.arange(1, quota), size=k - 1, replace=False))
        parts = np.diff(np.concatenate(([0], cuts, [quota])))
        for part in parts:
            edges.append((next_id, v))
            if part > 1:
                work.append((next_id, int(part)))
            next_id += 1
    return build_tree(edges, root=0)


def save_topology(tree: LogicalTree, path) -> None:
    """Write a topology file using canonical labels.

    Format: ``root <id>`` then one ``<child> <parent>`` line per link in
    top-down order; the original-id alias map follows as comments.
    """
    lines = [f"root {ROOT}"]
    stack = [ROOT]
    while stack:
        v = stack.pop()
        for c in tree.children[v]:
            lines.append(f"{c} {v}")
        stack.extend(reversed(tree.children[v]))
    for v in range(1, tree.n + 1):
        lines.append(f"# alias {v} {tree.alias[v]}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_topology(path) -> LogicalTree:
    """Read a topology file (``root <id>`` header, ``<child> <parent>`` lines)."""
    root = None
    edges = []
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("root"):
                root = _node_id(line.split()[1])
                continue
            child, par = line.split()
            edges.append((_node_id(child), _node_id(par)))
    if root is None:
        raise DisconnectedInput("topology file has no 'root <id>' line")
    return build_tree(edges, root=root)


def _node_id(token: str):
    return int(token) if token.lstrip("-").isdigit() else token


def tree_from_spec(spec: str) -> LogicalTree:
    """Resolve a tree argument: a topology file path or a generator shorthand.

    Shorthands: ``ternary:<links>``, ``regular:<branching>:<height>``,
    ``random:<leaves>:<max_branching>:<seed>``.  Anything else is treated
    as a topology file path (explicit files always win over shorthands).
    """
    if os.path.exists(spec):
        return load_topology(spec)
    parts = spec.split(":")
    try:
        if parts[0] == "ternary" and len(parts) == 2:
            return gen_ternary_tree(int(parts[1]))
        if parts[0] == "regular" and len(parts) == 3:
            return gen_regular_tree(int(parts[1]), int(parts[2]))
        if parts[0] == "random" and len(parts) == 4:
            return gen_random_tree(int(parts[1]), int(parts[2]), int(parts[3]))
    except ValueError as exc:
        raise ParameterOutOfRange(f"bad tree spec {spec!r}: {exc}") from exc
    raise ParameterOutOfRange(
        f"tree spec {spec!r} is neither a file nor a known shorthand"
    )
