"""End-to-end run orchestration on top of the learner.

Artifacts live under ``<out>/<config-hash>/<variant-label>/<seed>/``:
``tensor.csv`` holds the trained quantile tensor and ``episodes.csv``
the training log.  Evaluation and comparison write CSV summaries at the
run-directory root.  Everything re-derives its inputs from the config,
so the steps can run in separate processes or sessions.
"""

from __future__ import annotations

import csv
import json
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import stats as stats_mod
from .comparators import ComparatorConfig, QuantileMatrix
from .config import RunConfig, Variant, config_hash, parse_config
from .envs import make_env
from .errors import MissingArtifact
from .learner import evaluate, load_tensor, save_episode_log, save_tensor, train
from .plots import interval_plot_svg
from .preorder import PreorderGraph
from .selection import global_leaf_survivors, select

_EVAL_SEED_STRIDE = 1_000_003


def run_dir(config: RunConfig, out_dir) -> Path:
    return Path(out_dir) / config_hash(config.raw)


def artifact_dir(config: RunConfig, out_dir, label: str, seed: int) -> Path:
    return run_dir(config, out_dir) / label / str(seed)


def _train_one(config: RunConfig, variant: Variant, seed: int, out_dir) -> Path:
    env = make_env(config.env)
    learner_config = variant.learner_config(config)
    tensor, records = train(env, learner_config, variant.graph, seed, config.episodes)
    target = artifact_dir(config, out_dir, variant.label, seed)
    save_tensor(tensor, target / "tensor.csv")
    save_episode_log(records, target / "episodes.csv")
    return target


def _train_job(raw: dict, label: str, seed: int, out_dir: str) -> str:
    config = parse_config(raw)
    variant = next(v for v in config.variants if v.label == label)
    return str(_train_one(config, variant, seed, out_dir))


def run_train(config: RunConfig, out_dir, seeds=None, jobs: int = 1) -> Path:
    """Train every variant for every seed; returns the run directory."""
    seeds = tuple(seeds) if seeds is not None else config.seeds
    base = run_dir(config, out_dir)
    base.mkdir(parents=True, exist_ok=True)
    (base / "config.json").write_text(json.dumps(config.raw, indent=2, sort_keys=True) + "\n")
    pairs = [(variant, seed) for variant in config.variants for seed in seeds]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_train_job, config.raw, variant.label, seed, str(out_dir))
                       for variant, seed in pairs]
            for future in futures:
                future.result()
    else:
        for variant, seed in pairs:
            _train_one(config, variant, seed, out_dir)
    return base


def _write_rows(path: Path, header: list[str], rows: list[list]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        writer.writerows(rows)


def _float(value) -> str:
    return repr(float(value))


def run_evaluate(config: RunConfig, out_dir, seeds=None) -> Path:
    """Greedy evaluation of every trained artifact.

    Writes ``evaluate.csv`` (per variant, seed and evaluation run:
    rates, mean progress, mean per-objective returns) and ``scores.csv``
    in the ``algorithm,seed,run,score`` layout consumed by the stats
    step, scoring each run by its success rate.  Raises
    :class:`MissingArtifact` when a tensor is missing.
    """
    seeds = tuple(seeds) if seeds is not None else config.seeds
    base = run_dir(config, out_dir)
    n = config.graph.n_objectives
    eval_rows: list[list] = []
    score_rows: list[list] = []
    for variant in config.variants:
        learner_config = variant.learner_config(config)
        for seed in seeds:
            tensor = load_tensor(artifact_dir(config, out_dir, variant.label, seed) / "tensor.csv")
            env = make_env(config.env)
            for run in range(config.eval_runs):
                records = evaluate(env, tensor, learner_config, variant.graph,
                                   seed * _EVAL_SEED_STRIDE + run, config.eval_episodes)
                count = len(records)
                success = sum(r.success for r in records) / count
                collision = sum(r.collision for r in records) / count
                offroad = sum(r.offroad for r in records) / count
                progress = sum(r.progress for r in records) / count
                returns = np.array([r.returns for r in records]).mean(axis=0)
                eval_rows.append([variant.label, seed, run, _float(success), _float(collision),
                                  _float(offroad), _float(progress)]
                                 + [_float(v) for v in returns])
                score_rows.append([variant.label, seed, run, _float(success)])
    header = ["variant", "seed", "run", "success_rate", "collision_rate", "offroad_rate",
              "progress"] + [f"return_{i}" for i in range(n)]
    _write_rows(base / "evaluate.csv", header, eval_rows)
    _write_rows(base / "scores.csv", ["algorithm", "seed", "run", "score"], score_rows)
    return base / "evaluate.csv"


def _load_evaluate(config: RunConfig, out_dir) -> tuple[list[str], list[list[str]]]:
    path = run_dir(config, out_dir) / "evaluate.csv"
    if not path.exists():
        raise MissingArtifact(f"no evaluation summary at {path}; run evaluate first")
    with path.open(newline="") as handle:
        rows = list(csv.reader(handle))
    return rows[0], rows[1:]


def run_compare(config: RunConfig, out_dir) -> Path:
    """Aggregate the evaluation into per-variant comparison tables.

    ``ablation.csv`` carries one row per variant (rates and progress
    averaged over seeds and runs); ``rewards.csv`` the mean per-objective
    returns, with percent deltas against the first weighted-sum variant
    when one exists.  A fixed-width rendering goes to ``ablation.txt``.
    """
    header, rows = _load_evaluate(config, out_dir)
    base = run_dir(config, out_dir)
    n = config.graph.n_objectives
    by_label: dict[str, list[np.ndarray]] = {}
    for row in rows:
        by_label.setdefault(row[0], []).append(np.array([float(v) for v in row[3:]]))
    labels = [v.label for v in config.variants if v.label in by_label]

    means = {label: np.mean(by_label[label], axis=0) for label in labels}
    variant_by_label = {v.label: v for v in config.variants}
    ablation_rows = []
    for label in labels:
        variant = variant_by_label[label]
        m = means[label]
        ablation_rows.append([
            label, variant.mode, variant.comparator.kind,
            _float(variant.comparator.epsilon), int(variant.training_preorder),
            _float(m[0]), _float(m[1]), _float(m[2]), _float(m[3]),
        ])
    _write_rows(base / "ablation.csv",
                ["variant", "mode", "comparator", "epsilon", "training_preorder",
                 "success_rate", "collision_rate", "offroad_rate", "progress"],
                ablation_rows)

    baseline = next((v.label for v in config.variants
                     if v.mode == "weighted-sum" and v.label in means), None)
    reward_header = ["variant"] + [f"return_{i}" for i in range(n)]
    if baseline is not None:
        reward_header += [f"delta_pct_{i}" for i in range(n)]
    reward_rows = []
    for label in labels:
        returns = means[label][4:4 + n]
        row = [label] + [_float(v) for v in returns]
        if baseline is not None:
            ref = means[baseline][4:4 + n]
            deltas = [100.0 * (v - b) / abs(b) if abs(b) > 1e-12 else 0.0
                      for v, b in zip(returns, ref)]
            row += [_float(d) for d in deltas]
        reward_rows.append(row)
    _write_rows(base / "rewards.csv", reward_header, reward_rows)

    text = _render_table(
        ["variant", "mode", "cmp", "eps", "pre", "SR", "CR", "OR", "progress"],
        [[r[0], r[1], r[2], f"{float(r[3]):.2f}", str(r[4]),
          f"{float(r[5]):.3f}", f"{float(r[6]):.3f}", f"{float(r[7]):.3f}",
          f"{float(r[8]):.3f}"] for r in ablation_rows])
    (base / "ablation.txt").write_text(text)
    return base / "ablation.csv"


def _render_table(header: list[str], rows: list[list[str]]) -> str:
    widths = [max(len(str(cell)) for cell in column)
              for column in zip(header, *rows)] if rows else [len(h) for h in header]
    lines = [
        "  ".join(str(cell).ljust(w) for cell, w in zip(header, widths)).rstrip(),
        "  ".join("-" * w for w in widths),
    ]
    for row in rows:
        lines.append("  ".join(str(cell).ljust(w) for cell, w in zip(row, widths)).rstrip())
    return "\n".join(lines) + "\n"


def run_select(graph: PreorderGraph, matrices: list[QuantileMatrix],
               comparator: ComparatorConfig, out_dir) -> Path:
    """One-shot filter over externally supplied quantile matrices.

    Writes ``survivors.csv`` with one row per objective plus a final
    ``global`` row; surviving action indices are space-separated.
    """
    state = select(graph, matrices, comparator)
    out = Path(out_dir)
    rows = [[str(obj), " ".join(str(a) for a in sorted(state.survivors[obj]))]
            for obj in range(graph.n_objectives)]
    rows.append(["global", " ".join(str(a) for a in sorted(global_leaf_survivors(state, graph)))])
    _write_rows(out / "survivors.csv", ["objective", "actions"], rows)
    return out / "survivors.csv"


def load_scores(path) -> dict[str, np.ndarray]:
    """Read an ``algorithm,seed,run,score`` CSV, grouped by algorithm."""
    path = Path(path)
    if not path.exists():
        raise MissingArtifact(f"no score file at {path}")
    with path.open(newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != ["algorithm", "seed", "run", "score"]:
            raise MissingArtifact(f"{path}: expected header algorithm,seed,run,score")
        grouped: dict[str, list[float]] = {}
        for row in reader:
            grouped.setdefault(row[0], []).append(float(row[3]))
    return {name: np.array(scores) for name, scores in grouped.items()}


def run_stats(scores_path, out_dir, seed: int = 0, n_resamples: int = 2000,
              gap_target: float = 1.0) -> Path:
    """Robust summaries of a score file.

    Writes ``stats_summary.csv`` (IQM and optimality gap with bootstrap
    intervals per algorithm), ``prob_improvement.csv`` (all ordered
    pairs), and ``stats.svg`` (IQM intervals).  Deterministic for a
    fixed ``seed``.
    """
    grouped = load_scores(scores_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    names = sorted(grouped)
    summary_rows = []
    plot_entries = []
    for i, name in enumerate(names):
        scores = grouped[name]
        rng = np.random.default_rng([seed, i])
        point = stats_mod.iqm(scores)
        lo, hi = stats_mod.bootstrap_ci(stats_mod.iqm, scores, n_resamples, rng=rng)
        gap = stats_mod.optimality_gap(scores, gap_target)
        gap_lo, gap_hi = stats_mod.bootstrap_ci(
            lambda s: stats_mod.optimality_gap(s, gap_target), scores, n_resamples, rng=rng)
        summary_rows.append([name, len(scores), _float(point), _float(lo), _float(hi),
                             _float(gap), _float(gap_lo), _float(gap_hi)])
        plot_entries.append((name, point, min(lo, point), max(hi, point)))
    _write_rows(out / "stats_summary.csv",
                ["algorithm", "n", "iqm", "iqm_lo", "iqm_hi",
                 "opt_gap", "opt_gap_lo", "opt_gap_hi"],
                summary_rows)
    pairs = [[a, b, _float(stats_mod.prob_improvement(grouped[a], grouped[b]))]
             for a in names for b in names if a != b]
    _write_rows(out / "prob_improvement.csv", ["algorithm_x", "algorithm_y", "prob"], pairs)
    (out / "stats.svg").write_text(interval_plot_svg(plot_entries, title="score IQM, 95% CI"))
    return out / "stats_summary.csv"
