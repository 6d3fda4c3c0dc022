"""Tabular quantile temporal-difference learning with vector rewards.

One table of quantile estimates is kept per objective (a single table
for the scalarizing baseline).  Updates follow the pinball subgradient:
each cell moves toward the bootstrapped target distribution at a rate
set by its quantile fraction.  Three policy modes share the machinery:

* ``preorder``: filter actions through the priority preorder and play a
  uniform draw from the surviving set; bootstrap targets may be
  restricted to the same survivor sets.
* ``weighted-sum``: scalarize rewards with fixed weights, learn one
  table, play greedily on its mean.
* ``mean-aggregation``: learn all tables, play greedily on the mean
  across objectives, ignoring the priority structure.
"""

from __future__ import annotations

import csv
from collections.abc import Sequence
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .comparators import ComparatorConfig, QuantileMatrix, midpoint_fractions
from .errors import ConfigError, EmptySetError, MissingArtifact, ShapeMismatch
from .preorder import PreorderGraph
from .selection import global_leaf_survivors, sample_action, select

PREORDER = "preorder"
WEIGHTED_SUM = "weighted-sum"
MEAN_AGGREGATION = "mean-aggregation"
MODES = (PREORDER, WEIGHTED_SUM, MEAN_AGGREGATION)


@dataclass(frozen=True)
class EpsilonSchedule:
    """Linear exploration decay from ``start`` to ``end`` over
    ``decay_episodes`` episodes, constant afterwards."""

    start: float = 1.0
    end: float = 0.05
    decay_episodes: int = 1

    def __post_init__(self) -> None:
        if not (0.0 <= self.end <= self.start <= 1.0):
            raise ConfigError(f"need 0 <= end <= start <= 1, got start={self.start} end={self.end}")
        if self.decay_episodes < 1:
            raise ConfigError(f"decay_episodes must be >= 1, got {self.decay_episodes}")

    def value(self, episode: int) -> float:
        frac = min(max(episode, 0) / self.decay_episodes, 1.0)
        return self.start + (self.end - self.start) * frac


@dataclass
class LearnerConfig:
    """Everything a training run needs besides the environment.

    ``comparator`` may be a single config shared by all objectives or a
    sequence with one entry per objective.  ``weights`` is required by
    the weighted-sum mode and ignored otherwise.  ``huber_kappa`` of 0
    selects the plain pinball update.  When ``learning_rate_end`` is
    set, the step size anneals linearly from ``learning_rate`` to it
    over the training episodes, which damps the late-stage jitter of
    the quantile estimates.  ``initial_value`` fills fresh quantile
    tables, either one number for every head or one per head; filling
    a head at its worst attainable return keeps rarely visited actions
    from looking better than well-explored ones.
    """

    n_objectives: int
    gammas: tuple[float, ...]
    learning_rate: float = 0.1
    learning_rate_end: float | None = None
    epsilon: EpsilonSchedule = field(default_factory=EpsilonSchedule)
    quantile_count: int = 8
    comparator: ComparatorConfig | tuple[ComparatorConfig, ...] = field(
        default_factory=ComparatorConfig)
    training_preorder: bool = True
    mode: str = PREORDER
    weights: tuple[float, ...] | None = None
    huber_kappa: float = 0.0
    initial_value: float | tuple[float, ...] = 0.0

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}, expected one of {MODES}")
        if self.n_objectives < 1:
            raise ConfigError(f"need at least one objective, got {self.n_objectives}")
        self.gammas = tuple(float(g) for g in self.gammas)
        if len(self.gammas) != self.n_objectives:
            raise ConfigError(f"expected {self.n_objectives} gammas, got {len(self.gammas)}")
        if any(not (0.0 <= g < 1.0) for g in self.gammas):
            raise ConfigError(f"gammas must lie in [0, 1), got {self.gammas}")
        if not (np.isfinite(self.learning_rate) and self.learning_rate > 0.0):
            raise ConfigError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.learning_rate_end is not None and not (
                0.0 < self.learning_rate_end <= self.learning_rate):
            raise ConfigError(f"learning_rate_end must lie in (0, learning_rate], "
                              f"got {self.learning_rate_end}")
        if self.quantile_count < 1:
            raise ConfigError(f"quantile_count must be >= 1, got {self.quantile_count}")
        if self.huber_kappa < 0.0:
            raise ConfigError(f"huber_kappa must be >= 0, got {self.huber_kappa}")
        if isinstance(self.initial_value, Sequence):
            self.initial_value = tuple(float(v) for v in self.initial_value)
            if len(self.initial_value) != self.n_heads:
                raise ConfigError(f"expected {self.n_heads} initial values, "
                                  f"got {len(self.initial_value)}")
            if any(not np.isfinite(v) for v in self.initial_value):
                raise ConfigError(f"initial values must be finite, got {self.initial_value}")
        elif not np.isfinite(self.initial_value):
            raise ConfigError(f"initial_value must be finite, got {self.initial_value}")
        if self.mode == WEIGHTED_SUM:
            if self.weights is None:
                raise ConfigError("weighted-sum mode needs weights")
            self.weights = tuple(float(w) for w in self.weights)
            if len(self.weights) != self.n_objectives:
                raise ConfigError(f"expected {self.n_objectives} weights, got {len(self.weights)}")
            if any(not np.isfinite(w) for w in self.weights):
                raise ConfigError(f"weights must be finite, got {self.weights}")
        if isinstance(self.comparator, Sequence):
            self.comparator = tuple(self.comparator)
            if len(self.comparator) != self.n_objectives:
                raise ConfigError(f"expected {self.n_objectives} comparator configs, "
                                  f"got {len(self.comparator)}")

    @property
    def n_heads(self) -> int:
        return 1 if self.mode == WEIGHTED_SUM else self.n_objectives


@dataclass
class QuantileTensor:
    """Quantile estimates indexed (head, state, action, quantile)."""

    values: np.ndarray
    fractions: np.ndarray

    @classmethod
    def zeros(cls, n_heads: int, n_states: int, n_actions: int,
              quantile_count: int) -> "QuantileTensor":
        return cls.filled(n_heads, n_states, n_actions, quantile_count, 0.0)

    @classmethod
    def filled(cls, n_heads: int, n_states: int, n_actions: int,
               quantile_count: int, value: float) -> "QuantileTensor":
        return cls(np.full((n_heads, n_states, n_actions, quantile_count), float(value)),
                   midpoint_fractions(quantile_count))

    @property
    def n_heads(self) -> int:
        return self.values.shape[0]

    @property
    def n_states(self) -> int:
        return self.values.shape[1]

    @property
    def n_actions(self) -> int:
        return self.values.shape[2]

    @property
    def n_quantiles(self) -> int:
        return self.values.shape[3]

    def matrix(self, head: int, state: int) -> QuantileMatrix:
        """The (quantiles, actions) view of one head at one state."""
        return QuantileMatrix(self.values[head, state].T, self.fractions)

    def matrices(self, state: int) -> list[QuantileMatrix]:
        return [self.matrix(h, state) for h in range(self.n_heads)]

    def copy(self) -> "QuantileTensor":
        return QuantileTensor(self.values.copy(), self.fractions.copy())


@dataclass(frozen=True)
class VectorTransition:
    state: int
    action: int
    rewards: tuple[float, ...]
    next_state: int
    terminal: bool


@dataclass(frozen=True)
class EpisodeRecord:
    """Per-episode summary written to the episode log."""

    episode: int
    returns: tuple[float, ...]
    success: bool
    collision: bool
    offroad: bool
    progress: float


def greedy_target_action(tensor: QuantileTensor, head: int, state: int,
                         allowed: frozenset[int] | None = None) -> int:
    """Lowest-index action maximizing the mean quantile value, searched
    over ``allowed`` (all actions when None)."""
    means = tensor.values[head, state].mean(axis=1)
    if allowed is None:
        return int(np.argmax(means))
    candidates = sorted(allowed)
    if not candidates:
        raise EmptySetError(f"no allowed actions at state {state}, head {head}")
    return candidates[int(np.argmax(means[candidates]))]


def _pinball_step(theta: np.ndarray, targets: np.ndarray, fractions: np.ndarray,
                  learning_rate: float, kappa: float) -> None:
    delta = targets[None, :] - theta[:, None]
    indicator = (delta < 0.0).astype(float)
    if kappa == 0.0:
        grad = (fractions[:, None] - indicator).mean(axis=1)
    else:
        grad = (np.abs(fractions[:, None] - indicator)
                * np.clip(delta, -kappa, kappa) / kappa).mean(axis=1)
    theta += learning_rate * grad


def td_update(tensor: QuantileTensor, transition: VectorTransition,
              config: LearnerConfig, graph: PreorderGraph) -> QuantileTensor:
    """One in-place distributional TD step on every head.

    Greedy bootstrap actions are chosen per head.  In preorder mode with
    ``training_preorder`` set, the choice at the successor state is
    restricted to that objective's survivor set; terminal transitions
    collapse the target to the immediate reward.
    """
    s, a, s2 = transition.state, transition.action, transition.next_state
    if config.mode == WEIGHTED_SUM:
        reward = float(np.dot(config.weights, transition.rewards))
        if transition.terminal:
            targets = np.array([reward])
        else:
            best = greedy_target_action(tensor, 0, s2)
            targets = reward + config.gammas[0] * tensor.values[0, s2, best]
        _pinball_step(tensor.values[0, s, a], targets, tensor.fractions,
                      config.learning_rate, config.huber_kappa)
        return tensor

    allowed: dict[int, frozenset[int] | None] = {i: None for i in range(config.n_objectives)}
    if config.mode == PREORDER and config.training_preorder and not transition.terminal:
        state = select(graph, tensor.matrices(s2), config.comparator)
        allowed = dict(state.survivors)
    for i in range(config.n_objectives):
        reward = float(transition.rewards[i])
        if transition.terminal:
            targets = np.array([reward])
        else:
            best = greedy_target_action(tensor, i, s2, allowed[i])
            targets = reward + config.gammas[i] * tensor.values[i, s2, best]
        _pinball_step(tensor.values[i, s, a], targets, tensor.fractions,
                      config.learning_rate, config.huber_kappa)
    return tensor


def act(tensor: QuantileTensor, state: int, config: LearnerConfig,
        graph: PreorderGraph, rng: np.random.Generator, epsilon: float = 0.0) -> int:
    """Pick an action at ``state`` under the configured mode, with
    epsilon-greedy exploration layered on top."""
    if epsilon > 0.0 and rng.random() < epsilon:
        return int(rng.integers(tensor.n_actions))
    if config.mode == PREORDER:
        chosen = select(graph, tensor.matrices(state), config.comparator)
        return sample_action(global_leaf_survivors(chosen, graph), rng)
    if config.mode == WEIGHTED_SUM:
        return int(np.argmax(tensor.values[0, state].mean(axis=1)))
    means = tensor.values[:, state].mean(axis=2)
    return int(np.argmax(means.mean(axis=0)))


def _check_env(env, config: LearnerConfig, graph: PreorderGraph) -> None:
    if env.n_objectives != config.n_objectives or graph.n_objectives != config.n_objectives:
        raise ConfigError(
            f"objective counts disagree: env {env.n_objectives}, "
            f"config {config.n_objectives}, preorder {graph.n_objectives}")


def _run_episode(env, tensor, config, graph, rng, epsilon, learn):
    state = env.reset(rng)
    returns = np.zeros(config.n_objectives)
    success = collision = offroad = False
    progress = 0.0
    for _ in range(env.spec.episode_cap):
        action = act(tensor, state, config, graph, rng, epsilon=epsilon)
        result = env.step(action, rng)
        if learn:
            td_update(tensor, VectorTransition(state, action, result.rewards,
                                               result.next_state, result.terminal),
                      config, graph)
        returns += result.rewards
        success |= result.success
        collision |= result.collision
        offroad |= result.offroad
        progress = max(progress, result.progress)
        state = result.next_state
        if result.terminal:
            break
    return returns, success, collision, offroad, progress


def train(env, config: LearnerConfig, graph: PreorderGraph, seed: int,
          episodes: int) -> tuple[QuantileTensor, list[EpisodeRecord]]:
    """Train a fresh tensor on ``env`` for ``episodes`` episodes.

    All randomness (exploration, tie-breaking draws, environment noise)
    comes from a generator seeded with ``seed``, so identical calls
    produce identical tensors and episode logs.
    """
    _check_env(env, config, graph)
    rng = np.random.default_rng(seed)
    tensor = QuantileTensor.zeros(config.n_heads, env.n_states, env.n_actions,
                                  config.quantile_count)
    init = np.broadcast_to(np.asarray(config.initial_value, dtype=float),
                           (config.n_heads,))
    tensor.values += init.reshape(-1, 1, 1, 1)
    records = []
    for episode in range(episodes):
        eps = config.epsilon.value(episode)
        step_config = config
        if config.learning_rate_end is not None:
            frac = episode / max(episodes - 1, 1)
            rate = config.learning_rate + (config.learning_rate_end - config.learning_rate) * frac
            step_config = replace(config, learning_rate=max(rate, config.learning_rate_end))
        stats = _run_episode(env, tensor, step_config, graph, rng, eps, learn=True)
        records.append(EpisodeRecord(episode, tuple(float(r) for r in stats[0]), *stats[1:]))
    return tensor, records


def evaluate(env, tensor: QuantileTensor, config: LearnerConfig, graph: PreorderGraph,
             seed: int, episodes: int) -> list[EpisodeRecord]:
    """Run the greedy policy without learning and log every episode."""
    _check_env(env, config, graph)
    rng = np.random.default_rng(seed)
    records = []
    for episode in range(episodes):
        stats = _run_episode(env, tensor, config, graph, rng, 0.0, learn=False)
        records.append(EpisodeRecord(episode, tuple(float(r) for r in stats[0]), *stats[1:]))
    return records


def save_tensor(tensor: QuantileTensor, path) -> None:
    """Write the tensor as ``objective,state,action,k,value`` rows."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["objective", "state", "action", "k", "value"])
        for head in range(tensor.n_heads):
            for state in range(tensor.n_states):
                for action in range(tensor.n_actions):
                    for k in range(tensor.n_quantiles):
                        writer.writerow([head, state, action, k,
                                         repr(float(tensor.values[head, state, action, k]))])


def load_tensor(path) -> QuantileTensor:
    """Read a tensor written by :func:`save_tensor`."""
    path = Path(path)
    if not path.exists():
        raise MissingArtifact(f"no tensor at {path}")
    with path.open(newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != ["objective", "state", "action", "k", "value"]:
            raise ShapeMismatch(f"{path}: unexpected header {header}")
        rows = [(int(r[0]), int(r[1]), int(r[2]), int(r[3]), float(r[4])) for r in reader]
    if not rows:
        raise ShapeMismatch(f"{path}: no rows")
    heads = max(r[0] for r in rows) + 1
    states = max(r[1] for r in rows) + 1
    actions = max(r[2] for r in rows) + 1
    quantiles = max(r[3] for r in rows) + 1
    if len(rows) != heads * states * actions * quantiles:
        raise ShapeMismatch(f"{path}: expected {heads * states * actions * quantiles} rows, "
                            f"got {len(rows)}")
    values = np.zeros((heads, states, actions, quantiles))
    for head, state, action, k, value in rows:
        values[head, state, action, k] = value
    return QuantileTensor(values, midpoint_fractions(quantiles))


def save_episode_log(records: Sequence[EpisodeRecord], path) -> None:
    """Write per-episode rows: index, per-objective returns, flags."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    n = len(records[0].returns) if records else 0
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["episode"] + [f"return_{i}" for i in range(n)]
                        + ["success", "collision", "offroad", "progress"])
        for rec in records:
            writer.writerow([rec.episode] + [repr(float(r)) for r in rec.returns]
                            + [int(rec.success), int(rec.collision), int(rec.offroad),
                               repr(float(rec.progress))])


def load_episode_log(path) -> list[EpisodeRecord]:
    path = Path(path)
    if not path.exists():
        raise MissingArtifact(f"no episode log at {path}")
    with path.open(newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if not header or header[0] != "episode" or header[-4:] != ["success", "collision",
                                                                   "offroad", "progress"]:
            raise ShapeMismatch(f"{path}: unexpected header {header}")
        n = len(header) - 5
        records = []
        for row in reader:
            records.append(EpisodeRecord(
                int(row[0]), tuple(float(v) for v in row[1:1 + n]),
                bool(int(row[1 + n])), bool(int(row[2 + n])), bool(int(row[3 + n])),
                float(row[4 + n])))
    return records
