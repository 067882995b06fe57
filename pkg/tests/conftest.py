import numpy as np
import pytest

from losstree import build_tree, gen_random_tree


@pytest.fixture
def fig_tree():
    """3-leaf tree with two internal links and the identity-left matrix."""
    return build_tree([(4, 0), (5, 4), (3, 4), (1, 5), (2, 5)], root=0)


@pytest.fixture
def one_complex():
    """Single internal node with three leaf children."""
    return build_tree([(4, 0), (1, 4), (2, 4), (3, 4)], root=0)


def random_small_trees(count, seed, m_range=(2, 8), max_branching=4):
    """Deterministic stream of random trees for property tests."""
    rng = np.random.default_rng(seed)
    trees = []
    for _ in range(count):
        m = int(rng.integers(m_range[0], m_range[1] + 1))
        trees.append(gen_random_tree(m, max_branching, int(rng.integers(0, 2**31))))
    return trees


def random_sparse_x(tree, rng, k=None, lo=0.01, hi=0.2):
    """Random non-negative link vector with k lossy links."""
    if k is None:
        k = int(rng.integers(1, tree.n + 1))
    x = np.zeros(tree.n)
    sup = rng.choice(tree.n, size=min(k, tree.n), replace=False)
    x[sup] = rng.uniform(lo, hi, size=len(sup))
    return x
