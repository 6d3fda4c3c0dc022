"""A complete experiment from one JSON config.

A run config declares the environment, the priority graph, shared
learner settings, and the variants to compare.  Training, evaluation,
comparison, and statistics are separate steps that re-derive everything
from the config, so each can run in its own process; this script chains
them in one go and prints the artifacts they leave behind.
"""

import json
import tempfile
from pathlib import Path

from preorder_rl.config import parse_config
from preorder_rl.runner import run_compare, run_evaluate, run_stats, run_train

raw = {
    "schema_version": 1,
    "env": {"name": "conflict-bandit", "episode_cap": 1},
    "preorder": {"n_objectives": 2, "edges": [[0, 1]]},
    "learner": {"gammas": 0.9, "epsilon_start": 1.0, "epsilon_end": 0.1,
                "epsilon_decay_episodes": 600},
    "episodes": 1000,
    "seeds": [0, 1, 2],
    "eval_runs": 2,
    "eval_episodes": 200,
    "variants": [
        {"label": "priority", "comparator": {"kind": "qd", "epsilon": 0.2}},
        {"label": "weighted", "mode": "weighted-sum", "weights": [1, 1],
         "training_preorder": False},
    ],
}
config = parse_config(raw)

out = Path(tempfile.mkdtemp(prefix="preorder-rl-demo-"))
base = run_train(config, out)
print("run directory:", base.name)
run_evaluate(config, out)
run_compare(config, out)

print("\nper-variant summary (ablation.txt)")
print((base / "ablation.txt").read_text())

# scores.csv holds one success-rate row per variant, seed, and eval
# run; the stats step turns it into robust cross-seed summaries.
stats_dir = out / "stats"
run_stats(base / "scores.csv", stats_dir, seed=0, n_resamples=500)
print("interquartile means with bootstrap intervals")
for line in (stats_dir / "stats_summary.csv").read_text().splitlines():
    name, n, point, lo, hi = line.split(",")[:5]
    if name == "algorithm":
        continue
    print(f"  {name:9s} n={n}  iqm {float(point):.2f} "
          f"[{float(lo):.2f}, {float(hi):.2f}]")

pairs = (stats_dir / "prob_improvement.csv").read_text().splitlines()[1:]
print("\nprobability of improvement")
for line in pairs:
    x, y, prob = line.split(",")
    print(f"  {x} over {y}: {float(prob):.2f}")

print("\nartifacts:")
for path in sorted(out.rglob("*")):
    if path.is_file():
        print(" ", path.relative_to(out))
