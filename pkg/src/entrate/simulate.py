"""Monte Carlo validation of synthesized policies.

Samples trajectories from the policy-induced kernel with a portable
seeded RNG, estimates the entropy rate empirically, and monitors a
finite-horizon proxy of the surveillance condition.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .chains import local_entropy
from .model import MarkovChain, Mdp, StationaryPolicy
from .rng import path_rng


@dataclass(frozen=True)
class TrajectoryBatch:
    """Sampled paths: ``states[i, t]`` and ``action_ids[i, t]``.

    ``action_ids[i, t]`` is the index of the action taken at step ``t``
    (the final column is -1: no action is taken at the last state).
    """

    seed: int
    num_paths: int
    horizon: int
    states: np.ndarray
    action_ids: np.ndarray

    def visit_counts(self, n: int) -> np.ndarray:
        return np.bincount(self.states.ravel(), minlength=n)


def sample_paths(
    mdp: Mdp,
    policy: StationaryPolicy,
    horizon: int,
    num_paths: int,
    seed: int,
) -> TrajectoryBatch:
    """Sample i.i.d. paths of ``horizon`` transitions from pi0 and the kernel.

    Reproducible given ``seed``; each path uses an independently derived
    stream, so the batch does not depend on sampling order.
    """
    policy.validate(mdp)
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    states = np.zeros((num_paths, horizon + 1), dtype=np.int64)
    action_ids = np.full((num_paths, horizon + 1), -1, dtype=np.int64)
    pi0 = list(mdp.initial_dist)
    for i in range(num_paths):
        rng = path_rng(seed, i)
        s = rng.choice(pi0)
        states[i, 0] = s
        for t in range(horizon):
            a = rng.choice(policy.rows[s])
            action_ids[i, t] = a
            row = mdp.transitions[s][a]
            j = rng.choice([p for _, p in row])
            s = row[j][0]
            states[i, t + 1] = s
    return TrajectoryBatch(
        seed=seed,
        num_paths=num_paths,
        horizon=horizon,
        states=states,
        action_ids=action_ids,
    )


def empirical_entropy_rate(batch: TrajectoryBatch, chain: MarkovChain) -> float:
    """Semi-empirical estimate: second-half occupancy times exact local entropy."""
    half = batch.states[:, (batch.horizon + 1) // 2 :]
    freq = np.bincount(half.ravel(), minlength=chain.n) / half.size
    rate = 0.0
    for s in np.nonzero(freq > 0.0)[0]:
        rate += freq[s] * local_entropy(chain, int(s))
    return float(rate)


def plugin_entropy_rate(batch: TrajectoryBatch) -> float:
    """Pure plug-in estimate from empirical transition counts.

    Uses second-half transitions only; rows with a single observed
    successor contribute zero.
    """
    start = (batch.horizon + 1) // 2
    src = batch.states[:, start:-1].ravel()
    dst = batch.states[:, start + 1 :].ravel()
    n = int(batch.states.max()) + 1
    counts = np.zeros((n, n))
    np.add.at(counts, (src, dst), 1.0)
    totals = counts.sum(axis=1)
    rate = 0.0
    grand = totals.sum()
    for s in np.nonzero(totals > 0)[0]:
        p = counts[s] / totals[s]
        p = p[p > 0.0]
        rate += (totals[s] / grand) * float(-(p * np.log2(p)).sum())
    return float(rate)


def surveillance_monitor(batch: TrajectoryBatch, target, window: int) -> float:
    """Fraction of paths visiting the target in every length-``window`` block.

    The path is cut into consecutive blocks of ``window`` steps (a final
    shorter block is ignored); a path passes when each full block contains
    at least one target state.
    """
    if window > batch.horizon + 1:
        raise ValueError("window exceeds path length")
    in_target = np.isin(batch.states, sorted(target))
    length = batch.horizon + 1
    num_blocks = length // window
    passed = 0
    for i in range(batch.num_paths):
        ok = all(
            in_target[i, b * window : (b + 1) * window].any()
            for b in range(num_blocks)
        )
        passed += ok
    return passed / batch.num_paths


def export_csv(batch: TrajectoryBatch, mdp: Mdp, path) -> None:
    """Write the batch as (path_id, step, state, action) rows."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["path_id", "step", "state", "action"])
        for i in range(batch.num_paths):
            for t in range(batch.horizon + 1):
                s = int(batch.states[i, t])
                a = int(batch.action_ids[i, t])
                name = mdp.actions[s][a] if a >= 0 else ""
                writer.writerow([i, t, mdp.state_names[s], name])
