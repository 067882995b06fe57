"""Probe-noise experiment: estimation error vs sparsity and probe count.

Finite probing gives only estimated path losses.  The point-estimate
solver consumes the noisy observations directly; the interval solver
consumes confidence intervals.  Success rate e0 asks whether the truly
lossy links were located; e2 is the relative error of the recovered loss
probabilities.  More probes shrink e2; wider intervals admit sparser
solutions and push the error up.
"""

from losstree import (
    ExperimentConfig,
    confidence_intervals,
    gen_ternary_tree,
    run_experiment,
    simulate_probes,
)

tree = gen_ternary_tree(13)

# One probe round, to see the raw ingredients.
b = [0.0] * tree.n
b[3] = 0.08
run = simulate_probes(tree, b, probes=1000, seed=1)
print("per-path loss counts:", run.losses.tolist())
iv = confidence_intervals(run, level=0.90)
print("first path interval (addloss): "
      f"[{iv.lo[0]:.4f}, {iv.hi[0]:.4f}]")

# Point-estimate solver across sparsity and probe count.
cfg = ExperimentConfig(
    tree="ternary:13",
    k_values=[1, 3, 5, 7, 9],
    probe_counts=[1000, 10000],
    reps=50,
    mode="upsparse",
    seed=2,
)
print("\npoint-estimate solver:")
print("K  N      e0      e2")
for row in run_experiment(cfg, tree):
    print(f"{row.K}  {row.probes:<6} {row.e0_mean:.3f}  {row.e2_mean:.3f}")

# Interval solver with guaranteed-cover intervals of two widths.
print("\ninterval solver, guaranteed-cover intervals:")
print("K  width  e0      e2")
for width in (0.005, 0.05):
    cfg = ExperimentConfig(
        tree="ternary:13",
        k_values=[1, 3, 5],
        probe_counts=[1000],
        reps=50,
        mode="min-l1-among-l0",
        interval_mode="cover",
        cover_halfwidth=width,
        seed=2,
    )
    for row in run_experiment(cfg, tree):
        print(f"{row.K}  {width:<5}  {row.e0_mean:.3f}  {row.e2_mean:.3f}")
