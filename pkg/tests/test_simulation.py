"""Probe simulation, interval construction, metrics, and the experiment driver."""

import math

import numpy as np
import pytest
from scipy import stats

from losstree import (
    ExperimentConfig,
    addloss,
    confidence_intervals,
    cover_intervals,
    forward,
    gen_regular_tree,
    inverse_addloss,
    metrics,
    run_experiment,
    simulate_probes,
    write_experiment_csv,
)
from losstree.errors import ConfigInvalid, ParameterOutOfRange
from losstree.simulation import path_loss_probabilities
from losstree.topology import build_tree


@pytest.fixture
def chain_free_tree():
    """Two-leaf tree; the closest legal shape to a single measured path."""
    return build_tree([(3, 0), (1, 3), (2, 3)], root=0)


class TestSimulateProbes:
    def test_lossless_network_sees_no_losses(self, fig_tree):
        run = simulate_probes(fig_tree, np.zeros(5), probes=1000, seed=0)
        assert run.losses.sum() == 0
        assert np.array_equal(run.y_hat, np.zeros(3))

    def test_estimates_concentrate(self, chain_free_tree):
        # One lossy link at 10%: a million probes pin the estimate tightly.
        b = np.array([0.0, 0.0, 0.1])
        run = simulate_probes(chain_free_tree, b, probes=10**6, seed=1)
        assert 0.099 <= run.p_hat[0] <= 0.101
        assert 0.099 <= run.p_hat[1] <= 0.101

    def test_estimates_approach_truth_with_more_probes(self, fig_tree):
        b = np.zeros(5)
        b[[0, 3]] = [0.05, 0.08]
        p = path_loss_probabilities(fig_tree, b)
        errors = []
        for probes in (10**3, 10**4, 10**5):
            run = simulate_probes(fig_tree, b, probes=probes, seed=2)
            errors.append(np.abs(run.p_hat - p).max())
        assert errors[2] < errors[0]

    def test_deterministic_given_seed(self, fig_tree):
        b = np.full(5, 0.03)
        a = simulate_probes(fig_tree, b, probes=500, seed=7)
        c = simulate_probes(fig_tree, b, probes=500, seed=7)
        assert np.array_equal(a.losses, c.losses)

    def test_path_probability_is_product_complement(self, fig_tree):
        b = np.array([0.1, 0.0, 0.2, 0.05, 0.0])
        p = path_loss_probabilities(fig_tree, b)
        assert p[0] == pytest.approx(1 - 0.9 * 0.95)
        assert p[2] == pytest.approx(1 - 0.8 * 0.95)
        # Consistent with the additive model.
        assert np.allclose(addloss(p), forward(fig_tree, addloss(b)))

    def test_counts_fit_binomial_distribution(self, chain_free_tree):
        # Chi-square goodness of fit at 1% on pooled counts.
        b = np.array([0.0, 0.0, 0.3])
        n, runs = 40, 400
        rng_seeds = range(runs)
        counts = np.array(
            [simulate_probes(chain_free_tree, b, n, seed=s).losses[0] for s in rng_seeds]
        )
        edges = [-0.5, 8.5, 10.5, 12.5, 14.5, 40.5]
        observed, _ = np.histogram(counts, bins=edges)
        cdf = stats.binom.cdf(np.array(edges), n, 0.3)
        expected = np.diff(cdf) * runs
        chi2 = ((observed - expected) ** 2 / expected).sum()
        assert chi2 < stats.chi2.ppf(0.99, len(observed) - 1)

    def test_needs_at_least_one_probe(self, fig_tree):
        with pytest.raises(ParameterOutOfRange):
            simulate_probes(fig_tree, np.zeros(5), probes=0, seed=0)


class TestConfidenceIntervals:
    def test_half_width_formula(self, chain_free_tree):
        # 5% estimated loss over 1000 probes at 90% confidence.
        run = simulate_probes(chain_free_tree, [0.0, 0.0, 0.05], probes=1000, seed=3)
        run.p_hat = np.array([0.05, 0.05])
        run.losses = np.array([50, 50])
        iv = confidence_intervals(run, level=0.90)
        lo_p = inverse_addloss(iv.lo)
        hi_p = inverse_addloss(iv.hi)
        half = (hi_p[0] - lo_p[0]) / 2
        assert half == pytest.approx(0.011346893472928141, abs=1e-9)

    def test_zero_count_pins_lower_end(self, chain_free_tree):
        run = simulate_probes(chain_free_tree, np.zeros(3), probes=100, seed=4)
        iv = confidence_intervals(run, level=0.9)
        assert np.array_equal(iv.lo, np.zeros(2))
        assert np.array_equal(iv.hi, np.zeros(2))  # degenerate at p_hat = 0

    def test_full_loss_unbounded_upper(self, chain_free_tree):
        run = simulate_probes(chain_free_tree, [0.0, 0.0, 0.5], probes=20, seed=5)
        run.losses = np.array([20, 20])
        run.p_hat = np.array([1.0, 1.0])
        iv = confidence_intervals(run, level=0.9)
        assert math.isinf(iv.hi[0])
        assert np.all(np.isfinite(iv.lo))

    def test_wider_levels_widen_intervals(self, chain_free_tree):
        run = simulate_probes(chain_free_tree, [0.0, 0.0, 0.2], probes=500, seed=6)
        widths = []
        for level in (0.8, 0.9, 0.99):
            iv = confidence_intervals(run, level)
            widths.append((iv.hi - iv.lo).max())
        assert widths[0] < widths[1] < widths[2]

    def test_level_domain(self, chain_free_tree):
        run = simulate_probes(chain_free_tree, np.zeros(3), probes=10, seed=7)
        with pytest.raises(ParameterOutOfRange):
            confidence_intervals(run, level=1.0)


class TestCoverIntervals:
    def test_true_observation_always_inside(self, fig_tree):
        rng = np.random.default_rng(8)
        for _ in range(50):
            b = np.where(rng.random(5) < 0.5, rng.uniform(0.01, 0.1, 5), 0.0)
            y_true = forward(fig_tree, addloss(b))
            for w in (0.0, 0.005, 0.05):
                assert cover_intervals(fig_tree, b, w).contains(y_true, tol=1e-12)

    def test_wider_cover_is_a_superset(self, fig_tree):
        b = np.array([0.05, 0.0, 0.0, 0.02, 0.0])
        narrow = cover_intervals(fig_tree, b, 0.005)
        wide = cover_intervals(fig_tree, b, 0.05)
        assert np.all(wide.lo <= narrow.lo)
        assert np.all(wide.hi >= narrow.hi)


class TestMetrics:
    def test_perfect_recovery(self):
        b = np.array([0.1, 0.0, 0.05])
        m = metrics(b, b)
        assert m.e0 == 1.0
        assert m.e2 == 0.0

    def test_empty_estimate(self):
        m = metrics(np.array([0.1, 0.0]), np.zeros(2))
        assert m.e0 == 0.0
        assert m.e2 == 1.0

    def test_disjoint_supports_equal_norms(self):
        m = metrics(np.array([0.1, 0.0]), np.array([0.0, 0.1]))
        assert m.e0 == 0.0
        assert m.e2 == pytest.approx(math.sqrt(2))

    def test_partial_credit(self):
        m = metrics(np.array([0.1, 0.2, 0.0]), np.array([0.1, 0.0, 0.0]))
        assert m.e0 == pytest.approx(0.5)

    def test_zero_truth_flagged(self):
        m = metrics(np.zeros(3), np.array([0.1, 0.0, 0.0]))
        assert m.true_norm_zero
        assert m.e2 == pytest.approx(0.1)
        assert m.e0 == 0.0


class TestExperimentConfig:
    def test_validation(self):
        with pytest.raises(ConfigInvalid):
            ExperimentConfig(tree="ternary:13", k_values=[], seed=0)
        with pytest.raises(ConfigInvalid):
            ExperimentConfig(tree="ternary:13", k_values=[1], mode="bogus")
        with pytest.raises(ConfigInvalid):
            ExperimentConfig(tree="ternary:13", k_values=[1], loss_range=(0.5, 0.1))

    def test_json_round_trip(self, tmp_path):
        cfg = ExperimentConfig(tree="ternary:13", k_values=[1, 2], seed=3)
        path = tmp_path / "cfg.json"
        cfg.to_json(path)
        assert ExperimentConfig.from_json(path) == cfg


class TestRunExperiment:
    def test_exact_mode_recovers_single_hotspot(self):
        cfg = ExperimentConfig(
            tree="ternary:13", k_values=[1], probe_counts=[None], reps=20, seed=0
        )
        rows = run_experiment(cfg)
        assert len(rows) == 1
        assert rows[0].e0_mean == 1.0
        assert rows[0].e2_mean == 0.0

    def test_rows_and_determinism(self, tmp_path):
        cfg = ExperimentConfig(
            tree="ternary:13",
            k_values=[1, 2],
            probe_counts=[200, 1000],
            reps=5,
            seed=1,
        )
        rows_a = run_experiment(cfg)
        rows_b = run_experiment(cfg)
        assert rows_a == rows_b
        assert [(r.K, r.probes) for r in rows_a] == [
            (1, 200), (1, 1000), (2, 200), (2, 1000)
        ]
        out = tmp_path / "rows.csv"
        write_experiment_csv(out, rows_a)
        header = out.read_text().splitlines()[0]
        assert header == "K,N,mode,reps,e0_mean,e0_se,e2_mean,e2_se,seed"

    def test_interval_solver_cover_mode(self):
        cfg = ExperimentConfig(
            tree="ternary:13",
            k_values=[2],
            probe_counts=[500],
            reps=10,
            mode="min-l1-among-l0",
            interval_mode="cover",
            cover_halfwidth=0.005,
            seed=2,
        )
        rows = run_experiment(cfg)
        assert rows[0].e0_mean > 0.5

    def test_paired_instances_across_probe_counts(self):
        # The planted hotspots per repetition must not depend on N.
        from losstree.simulation import _plant_instance

        tree = gen_regular_tree(3, 3)
        a = _plant_instance(tree, 3, (0.01, 0.1), seed=5, rep=2)
        b = _plant_instance(tree, 3, (0.01, 0.1), seed=5, rep=2)
        assert np.array_equal(a, b)
