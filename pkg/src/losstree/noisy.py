"""Minimal-norm solutions when each path observation is only an interval.

Each path j carries an interval [lo_j, hi_j] deemed to contain the true
observation; hi_j may be infinite (math.inf is the explicit unbounded
marker, with the usual total comparisons).  The solution space is the
union of the families for every realizable observation vector, which
makes both norms minimizable by pushing loss up while realizing each
observation at the smallest value consistent with the choices above it.

For a single complex the family reduces to one parameter x (the father
link loss): the children take [lo_j - x]^+ and realize max(x, lo_j).
``local_min_l0`` and ``local_min_l1`` characterize the optimal x sets.
On a full tree the same thresholds generalize to per-subtree statistics
(``z_stats``), and ``upsparse_plus`` applies them top down.

A note on ties: when a whole set of x values is optimal, results report
the set and single-value fields use the canonical minimizer; tie-breaks
that pick one solution prefer the largest x (most loss pulled up).
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import OutOfDomain, XOutOfRange
from .lossmodel import DEFAULT_TOL
from .topology import ROOT, LogicalTree

MIN_L0 = "min-l0"
MIN_L1 = "min-l1"
MIN_L1_AMONG_L0 = "min-l1-among-l0"
MODES = (MIN_L0, MIN_L1, MIN_L1_AMONG_L0)


@dataclass(eq=False)
class IntervalObservation:
    """Per-path observation intervals [lo_j, hi_j] in addloss units."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        self.lo = np.asarray(self.lo, dtype=float)
        self.hi = np.asarray(self.hi, dtype=float)
        if self.lo.shape != self.hi.shape:
            raise OutOfDomain("interval bounds must have equal length")
        if np.any(self.lo < 0) or not np.all(np.isfinite(self.lo)):
            raise OutOfDomain("lower bounds must be finite and non-negative")
        if np.any(self.hi < self.lo):
            raise OutOfDomain("upper bounds must not fall below lower bounds")

    @classmethod
    def exact(cls, y) -> "IntervalObservation":
        """Degenerate intervals pinning every observation to y."""
        y = np.asarray(y, dtype=float)
        return cls(lo=y.copy(), hi=y.copy())

    @property
    def m(self) -> int:
        return len(self.lo)

    def contains(self, y, tol: float = 0.0) -> bool:
        y = np.asarray(y, dtype=float)
        return bool(np.all(y >= self.lo - tol) and np.all(y <= self.hi + tol))


@dataclass
class ZStats:
    """Per-link subtree statistics driving the interval solver.

    For the subtree under node i (indexed by link label - 1):
      min_upper: smallest upper bound among its paths;
      max_lower: largest lower bound among its paths;
      max_lower_within: largest lower bound not exceeding min_upper
        (always defined: the path attaining min_upper qualifies).
    """

    min_upper: np.ndarray
    max_lower: np.ndarray
    max_lower_within: np.ndarray


@dataclass
class NoisySolution:
    """Interval-solver output: link losses x and the realized observation.

    ``z`` holds the root-to-node path loss for every link label, so the
    realized observation y equals z over the leaf labels and satisfies
    lo <= y <= hi componentwise.
    """

    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    mode: str

    def l0(self, tol: float = DEFAULT_TOL) -> int:
        return int((self.x > tol).sum())

    def l1(self) -> float:
        return float(self.x.sum())

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "x": [float(v) for v in self.x],
            "y": [float(v) for v in self.y],
            "z": [float(v) for v in self.z],
            "l0": self.l0(),
            "l1": self.l1(),
        }


@dataclass
class LocalMinL0:
    """Optimal father-link losses for minimum sparsity in one complex.

    The optimal set is the closed interval [x_lo, x_hi], plus the isolated
    point 0 when ``alternate_at_zero`` is set.  ``x_star`` is the canonical
    minimizer (the largest lower bound not exceeding the smallest upper
    bound); ``solution`` is the local family member at ``x_star``.
    """

    case: int
    l0: int
    x_lo: float
    x_hi: float
    alternate_at_zero: bool
    unique: bool
    x_star: float
    solution: np.ndarray


@dataclass
class LocalMinL1:
    """Optimal father-link losses for minimum l1 in one complex."""

    l1: float
    x_lo: float
    x_hi: float
    unique: bool
    x_star: float
    solution: np.ndarray


def glocal_family(y_lo, y_hi, x: float) -> np.ndarray:
    """Local solution [ [lo_1 - x]^+, ..., [lo_m - x]^+, x ] for one complex.

    ``x`` must lie between the smallest lower and smallest upper bound;
    child j then realizes the observation max(x, lo_j).
    """
    y_lo, y_hi = _as_intervals(y_lo, y_hi)
    if x < y_lo.min() or x > y_hi.min():
        raise XOutOfRange(
            f"x={x} outside [{y_lo.min()}, {y_hi.min()}] for this complex"
        )
    return np.append(np.maximum(y_lo - x, 0.0), x)


def local_min_l0(y_lo, y_hi) -> LocalMinL0:
    """Minimum-sparsity analysis of one complex over its interval box.

    Writing k(x) for the number of lower bounds strictly above x, the
    sparsity of the family member at x is k(x) + (1 if x > 0).  The four
    cases: (1) all lower bounds positive: optimum shared on [x_star,
    min upper]; (2) zero is the only lower bound under min upper: unique
    optimum at 0; (3) sparsity at 0 ties the interval optimum: both kept,
    flagged ``alternate_at_zero``; (4) the interval beats 0.
    """
    y_lo, y_hi = _as_intervals(y_lo, y_hi)
    u_min = float(y_hi.min())
    x_star = float(y_lo[y_lo <= u_min].max())

    def k(x):
        return int((y_lo > x).sum())

    if y_lo.min() > 0:
        case, l0 = 1, k(x_star) + 1
        x_lo, x_hi, alt = x_star, u_min, False
        unique = x_star == u_min
    elif x_star == 0:
        case, l0 = 2, k(0.0)
        x_lo = x_hi = 0.0
        alt, unique = False, True
    elif k(0.0) == k(x_star) + 1:
        case, l0 = 3, k(0.0)
        x_lo, x_hi, alt, unique = x_star, u_min, True, False
    else:
        case, l0 = 4, k(x_star) + 1
        x_lo, x_hi, alt = x_star, u_min, False
        unique = x_star == u_min
    return LocalMinL0(
        case=case,
        l0=l0,
        x_lo=float(x_lo),
        x_hi=float(x_hi),
        alternate_at_zero=alt,
        unique=unique,
        x_star=x_star if case != 2 else 0.0,
        solution=glocal_family(y_lo, y_hi, x_star if case != 2 else 0.0),
    )


def local_min_l1(y_lo, y_hi) -> LocalMinL1:
    """Minimum-l1 analysis of one complex over its interval box.

    The norm x + sum_j [lo_j - x]^+ is piecewise linear with slope
    1 - k(x), so it bottoms out at the smaller of the largest lower bound
    and the smallest upper bound; it is flat back to the second-largest
    lower bound when that lies below the optimum.
    """
    y_lo, y_hi = _as_intervals(y_lo, y_hi)
    x_star = float(min(y_lo.max(), y_hi.min()))
    second = float(np.partition(y_lo, -2)[-2])
    unique = x_star < second
    x_lo = x_star if unique else second
    l1 = x_star + float(np.maximum(y_lo - x_star, 0.0).sum())
    return LocalMinL1(
        l1=l1,
        x_lo=float(x_lo),
        x_hi=x_star,
        unique=unique,
        x_star=x_star,
        solution=glocal_family(y_lo, y_hi, x_star),
    )


def z_stats(tree: LogicalTree, intervals: IntervalObservation) -> ZStats:
    """Subtree interval statistics for every link, merged bottom up.

    min_upper and max_lower are plain min/max merges; max_lower_within
    needs every subtree's multiset of lower bounds (only those at or
    below the local min_upper can count), giving quadratic worst-case
    work on the sorted merges.
    """
    _check_paths(tree, intervals)
    lo, hi = intervals.lo, intervals.hi
    min_upper = np.empty(tree.n + 1)
    max_lower = np.empty(tree.n + 1)
    within = np.empty(tree.n + 1)
    lowers: list = [None] * (tree.n + 1)
    for j in tree.leaves:
        min_upper[j] = hi[j - 1]
        max_lower[j] = lo[j - 1]
        within[j] = lo[j - 1]
        lowers[j] = lo[j - 1 : j]
    for v in range(tree.n, tree.m, -1):
        kids = tree.children[v]
        min_upper[v] = min(min_upper[c] for c in kids)
        max_lower[v] = max(max_lower[c] for c in kids)
        merged = np.sort(np.concatenate([lowers[c] for c in kids]))
        lowers[v] = merged
        idx = np.searchsorted(merged, min_upper[v], side="right") - 1
        within[v] = merged[idx]  # non-empty: the path attaining min_upper qualifies
    return ZStats(
        min_upper=min_upper[1:],
        max_lower=max_lower[1:],
        max_lower_within=within[1:],
    )


def upsparse_plus(
    tree: LogicalTree, intervals: IntervalObservation, mode: str = MIN_L0
) -> NoisySolution:
    """Interval solver: assign path losses top down against z thresholds.

    Every node i receives path loss z_i = max(z_father, threshold_i) and
    link loss x_i = z_i - z_father, where the threshold is the subtree's
    max_lower_within (sparsest), min(max_lower, min_upper) (smallest l1),
    or max_lower_within with a bump to min_upper on lossy links whose
    subtree cannot realize max_lower (smallest l1 among the sparsest).
    Realized observations are the leaf z values and always respect the
    intervals.
    """
    if mode not in MODES:
        raise OutOfDomain(f"mode must be one of {MODES}, got {mode!r}")
    _check_paths(tree, intervals)
    stats = z_stats(tree, intervals)
    z = np.zeros(tree.n + 1)
    x = np.zeros(tree.n)
    for level in tree.levels[1:]:
        for v in level:
            zf = z[tree.parent[v]]
            if mode == MIN_L1:
                thr = min(stats.max_lower[v - 1], stats.min_upper[v - 1])
            else:
                thr = stats.max_lower_within[v - 1]
            if (
                mode == MIN_L1_AMONG_L0
                and thr > zf
                and stats.min_upper[v - 1] < stats.max_lower[v - 1]
            ):
                thr = stats.min_upper[v - 1]
            if thr > zf:
                x[v - 1] = thr - zf
                z[v] = thr
            else:
                x[v - 1] = 0.0
                z[v] = zf
    return NoisySolution(x=x, y=z[1 : tree.m + 1].copy(), z=z[1:], mode=mode)


def save_intervals(intervals: IntervalObservation, path) -> None:
    """Write intervals as JSON: [{"path": j, "lo": v, "hi": v|"inf"}]."""
    rows = []
    for j in range(intervals.m):
        hi = intervals.hi[j]
        rows.append(
            {
                "path": j + 1,
                "lo": float(intervals.lo[j]),
                "hi": "inf" if math.isinf(hi) else float(hi),
            }
        )
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(rows, fh)
        fh.write("\n")


def load_intervals(path) -> IntervalObservation:
    """Read a JSON interval file; "inf" or null upper ends mean unbounded."""
    with open(path, encoding="utf-8") as fh:
        rows = json.load(fh)
    by_path = {}
    for row in rows:
        hi = row["hi"]
        if hi is None or (isinstance(hi, str) and hi.lower() in ("inf", "infinity")):
            hi = math.inf
        by_path[int(row["path"])] = (float(row["lo"]), float(hi))
    if sorted(by_path) != list(range(1, len(by_path) + 1)):
        raise OutOfDomain("interval file must cover paths 1..m exactly once")
    lo = np.array([by_path[j][0] for j in sorted(by_path)])
    hi = np.array([by_path[j][1] for j in sorted(by_path)])
    return IntervalObservation(lo=lo, hi=hi)


def _as_intervals(y_lo, y_hi):
    y_lo = np.asarray(y_lo, dtype=float)
    y_hi = np.asarray(y_hi, dtype=float)
    if len(y_lo) < 2:
        raise OutOfDomain("a complex has at least two child paths")
    IntervalObservation(lo=y_lo, hi=y_hi)  # runs the shared validation
    return y_lo, y_hi


def _check_paths(tree: LogicalTree, intervals: IntervalObservation) -> None:
    if intervals.m != tree.m:
        raise OutOfDomain(
            f"tree has {tree.m} paths but intervals cover {intervals.m}"
        )
