"""Artifact layout and CSV contracts of the run orchestration."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np
import pytest

from preorder_rl.comparators import ComparatorConfig, QuantileMatrix
from preorder_rl.config import config_hash, parse_config
from preorder_rl.errors import MissingArtifact
from preorder_rl.preorder import build_graph
from preorder_rl.runner import (
    artifact_dir,
    load_scores,
    run_compare,
    run_dir,
    run_evaluate,
    run_select,
    run_stats,
    run_train,
)
from preorder_rl.selection import global_leaf_survivors, select


def bandit_raw() -> dict:
    return {
        "schema_version": 1,
        "env": {"name": "conflict-bandit", "episode_cap": 1},
        "preorder": {"n_objectives": 2, "edges": [[0, 1]]},
        "learner": {"gammas": 0.9, "epsilon_start": 1.0, "epsilon_end": 0.2,
                    "epsilon_decay_episodes": 40},
        "episodes": 60,
        "seeds": [0, 1],
        "eval_runs": 2,
        "eval_episodes": 30,
        "variants": [
            {"label": "pr", "comparator": {"kind": "qd", "epsilon": 0.1}},
            {"label": "ws", "mode": "weighted-sum", "weights": [1, 1],
             "training_preorder": False},
        ],
    }


def read_csv(path: Path) -> tuple[list[str], list[list[str]]]:
    with path.open(newline="") as handle:
        rows = list(csv.reader(handle))
    return rows[0], rows[1:]


@pytest.fixture(scope="module")
def run_space(tmp_path_factory) -> tuple:
    out = tmp_path_factory.mktemp("runs")
    config = parse_config(bandit_raw())
    base = run_train(config, out)
    run_evaluate(config, out)
    run_compare(config, out)
    return config, out, base


def test_artifact_layout(run_space) -> None:
    config, out, base = run_space
    assert base == run_dir(config, out)
    assert base.name == config_hash(config.raw)
    for label in ("pr", "ws"):
        for seed in (0, 1):
            target = artifact_dir(config, out, label, seed)
            assert target == base / label / str(seed)
            assert (target / "tensor.csv").is_file()
            assert (target / "episodes.csv").is_file()


def test_config_snapshot_is_canonical(run_space) -> None:
    config, _, base = run_space
    text = (base / "config.json").read_text()
    assert text == json.dumps(config.raw, indent=2, sort_keys=True) + "\n"


def test_evaluate_summary_layout(run_space) -> None:
    config, _, base = run_space
    header, rows = read_csv(base / "evaluate.csv")
    assert header == ["variant", "seed", "run", "success_rate", "collision_rate",
                      "offroad_rate", "progress", "return_0", "return_1"]
    assert len(rows) == 2 * 2 * 2
    for row in rows:
        assert row[0] in ("pr", "ws")
        assert int(row[1]) in (0, 1) and int(row[2]) in (0, 1)
        for value in row[3:7]:
            assert 0.0 <= float(value) <= 1.0

    score_header, score_rows = read_csv(base / "scores.csv")
    assert score_header == ["algorithm", "seed", "run", "score"]
    assert [r[:3] for r in score_rows] == [r[:3] for r in rows]
    assert [r[3] for r in score_rows] == [r[3] for r in rows]


def test_evaluate_is_deterministic(run_space) -> None:
    config, out, base = run_space
    before = (base / "evaluate.csv").read_bytes()
    run_evaluate(config, out)
    assert (base / "evaluate.csv").read_bytes() == before


def test_compare_aggregates_evaluation(run_space) -> None:
    config, _, base = run_space
    _, eval_rows = read_csv(base / "evaluate.csv")
    header, rows = read_csv(base / "ablation.csv")
    assert header == ["variant", "mode", "comparator", "epsilon", "training_preorder",
                      "success_rate", "collision_rate", "offroad_rate", "progress"]
    assert [r[0] for r in rows] == ["pr", "ws"]
    assert rows[0][1:5] == ["preorder", "qd", "0.1", "1"]
    assert rows[1][1:5] == ["weighted-sum", "qd", "0.0", "0"]
    for row in rows:
        sample = [r for r in eval_rows if r[0] == row[0]]
        expected = np.mean([[float(v) for v in r[3:7]] for r in sample], axis=0)
        assert np.allclose([float(v) for v in row[5:]], expected)


def test_compare_reports_reward_deltas(run_space) -> None:
    config, _, base = run_space
    header, rows = read_csv(base / "rewards.csv")
    assert header == ["variant", "return_0", "return_1", "delta_pct_0", "delta_pct_1"]
    by_label = {r[0]: r for r in rows}
    ws = [float(v) for v in by_label["ws"][1:3]]
    pr = [float(v) for v in by_label["pr"][1:3]]
    assert [float(v) for v in by_label["ws"][3:]] == [0.0, 0.0]
    for delta, value, ref in zip(by_label["pr"][3:], pr, ws):
        expected = 100.0 * (value - ref) / abs(ref) if abs(ref) > 1e-12 else 0.0
        assert float(delta) == pytest.approx(expected)


def test_compare_renders_text_table(run_space) -> None:
    _, _, base = run_space
    lines = (base / "ablation.txt").read_text().splitlines()
    assert lines[0].startswith("variant")
    assert set(lines[1]) <= {"-", " "}
    assert len(lines) == 2 + 2
    assert lines[2].startswith("pr") and lines[3].startswith("ws")


def test_train_accepts_seed_subset(tmp_path) -> None:
    config = parse_config(bandit_raw())
    base = run_train(config, tmp_path, seeds=[7])
    assert (base / "pr" / "7" / "tensor.csv").is_file()
    assert not (base / "pr" / "0").exists()


def test_parallel_training_matches_serial(tmp_path) -> None:
    config = parse_config(bandit_raw())
    serial = run_train(config, tmp_path / "serial")
    parallel = run_train(config, tmp_path / "parallel", jobs=2)
    for label in ("pr", "ws"):
        for seed in (0, 1):
            rel = Path(label) / str(seed) / "tensor.csv"
            assert (parallel / rel).read_bytes() == (serial / rel).read_bytes()


def test_evaluate_requires_trained_tensor(tmp_path) -> None:
    config = parse_config(bandit_raw())
    with pytest.raises(MissingArtifact):
        run_evaluate(config, tmp_path)


def test_compare_requires_evaluation(tmp_path) -> None:
    config = parse_config(bandit_raw())
    with pytest.raises(MissingArtifact, match="run evaluate first"):
        run_compare(config, tmp_path)


def test_select_writes_survivor_table(tmp_path) -> None:
    graph = build_graph(2, [(0, 1)])
    matrices = [
        QuantileMatrix.from_values(np.array([[1.0, 1.0, 0.0], [1.0, 1.0, 0.0]])),
        QuantileMatrix.from_values(np.array([[0.5, 1.0, 0.0], [0.5, 1.0, 0.0]])),
    ]
    comparator = ComparatorConfig("qd", epsilon=0.2)
    path = run_select(graph, matrices, comparator, tmp_path)
    header, rows = read_csv(path)
    assert header == ["objective", "actions"]
    assert [r[0] for r in rows] == ["0", "1", "global"]

    state = select(graph, matrices, comparator)
    for obj in range(2):
        expected = sorted(state.survivors[obj])
        assert [int(v) for v in rows[obj][1].split()] == expected
    leaf = sorted(global_leaf_survivors(state, graph))
    assert [int(v) for v in rows[2][1].split()] == leaf


def test_load_scores_groups_by_algorithm(tmp_path) -> None:
    path = tmp_path / "scores.csv"
    path.write_text("algorithm,seed,run,score\n"
                    "a,0,0,1.0\na,0,1,3.0\nb,0,0,2.0\n")
    grouped = load_scores(path)
    assert sorted(grouped) == ["a", "b"]
    assert np.array_equal(grouped["a"], [1.0, 3.0])
    assert np.array_equal(grouped["b"], [2.0])

    with pytest.raises(MissingArtifact, match="no score file"):
        load_scores(tmp_path / "absent.csv")
    bad = tmp_path / "bad.csv"
    bad.write_text("name,value\nx,1\n")
    with pytest.raises(MissingArtifact, match="expected header"):
        load_scores(bad)


def scores_fixture(tmp_path: Path) -> Path:
    path = tmp_path / "scores.csv"
    rows = [("a", i, 0, s) for i, s in enumerate((0.0, 0.25, 0.5, 0.75))]
    rows += [("b", i, 0, 0.5) for i in range(4)]
    path.write_text("algorithm,seed,run,score\n"
                    + "".join(f"{n},{s},{r},{v}\n" for n, s, r, v in rows))
    return path


def test_stats_summary_values(tmp_path) -> None:
    summary = run_stats(scores_fixture(tmp_path), tmp_path, seed=3, n_resamples=200)
    header, rows = read_csv(summary)
    assert header == ["algorithm", "n", "iqm", "iqm_lo", "iqm_hi",
                      "opt_gap", "opt_gap_lo", "opt_gap_hi"]
    assert [r[0] for r in rows] == ["a", "b"]
    a, b = rows
    assert int(a[1]) == 4 and int(b[1]) == 4
    assert float(a[2]) == pytest.approx(0.375)
    assert float(a[5]) == pytest.approx(0.625)
    assert float(b[2]) == pytest.approx(0.5)
    assert float(b[3]) == 0.5 and float(b[4]) == 0.5
    for row in rows:
        assert float(row[3]) <= float(row[2]) <= float(row[4])
        assert float(row[6]) <= float(row[5]) <= float(row[7])


def test_stats_probability_pairs(tmp_path) -> None:
    run_stats(scores_fixture(tmp_path), tmp_path, n_resamples=100)
    header, rows = read_csv(tmp_path / "prob_improvement.csv")
    assert header == ["algorithm_x", "algorithm_y", "prob"]
    probs = {(r[0], r[1]): float(r[2]) for r in rows}
    assert probs[("a", "b")] == pytest.approx(0.375)
    assert probs[("b", "a")] == pytest.approx(0.625)


def test_stats_gap_target(tmp_path) -> None:
    run_stats(scores_fixture(tmp_path), tmp_path, n_resamples=100, gap_target=0.5)
    _, rows = read_csv(tmp_path / "stats_summary.csv")
    assert float(rows[0][5]) == pytest.approx(0.1875)
    assert float(rows[1][5]) == pytest.approx(0.0)


def test_stats_outputs_are_deterministic(tmp_path) -> None:
    scores = scores_fixture(tmp_path)
    first = tmp_path / "first"
    second = tmp_path / "second"
    run_stats(scores, first, seed=9, n_resamples=150)
    run_stats(scores, second, seed=9, n_resamples=150)
    for name in ("stats_summary.csv", "prob_improvement.csv", "stats.svg"):
        assert (first / name).read_bytes() == (second / name).read_bytes()
    svg = (first / "stats.svg").read_text()
    assert svg.startswith("<svg") and "score IQM, 95% CI" in svg
