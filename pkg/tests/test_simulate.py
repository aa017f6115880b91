"""Trajectory sampling, empirical estimates, surveillance monitor."""

import numpy as np
import pytest

from entrate.model import MarkovChain, StationaryPolicy, induce_chain, validate_mdp
from entrate.rng import Xoshiro256, path_rng
from entrate.simulate import (
    empirical_entropy_rate,
    export_csv,
    plugin_entropy_rate,
    sample_paths,
    surveillance_monitor,
)

from oracles import complete_mdp


def _coin_mdp():
    return validate_mdp(
        ["h", "t"],
        [["flip"], ["flip"]],
        [[[("h", 0.5), ("t", 0.5)]], [[("h", 0.5), ("t", 0.5)]]],
        [1.0, 0.0],
    )


def _det_cycle_mdp():
    return validate_mdp(
        ["a", "b"],
        [["go"], ["go"]],
        [[[("b", 1.0)]], [[("a", 1.0)]]],
        [1.0, 0.0],
    )


def test_rng_determinism_and_range():
    a = Xoshiro256(42)
    b = Xoshiro256(42)
    seq_a = [a.next_u64() for _ in range(100)]
    seq_b = [b.next_u64() for _ in range(100)]
    assert seq_a == seq_b
    g = Xoshiro256(7)
    us = [g.uniform() for _ in range(1000)]
    assert all(0.0 <= u < 1.0 for u in us)
    assert 0.4 < np.mean(us) < 0.6


def test_path_rng_streams_differ():
    assert path_rng(1, 0).next_u64() != path_rng(1, 1).next_u64()


def test_choice_respects_distribution():
    g = Xoshiro256(123)
    counts = np.zeros(3)
    for _ in range(30_000):
        counts[g.choice([0.2, 0.5, 0.3])] += 1
    assert np.allclose(counts / counts.sum(), [0.2, 0.5, 0.3], atol=0.01)


def test_sample_paths_deterministic_by_seed():
    mdp = _coin_mdp()
    policy = StationaryPolicy.uniform(mdp)
    b1 = sample_paths(mdp, policy, 50, 10, seed=9)
    b2 = sample_paths(mdp, policy, 50, 10, seed=9)
    assert np.array_equal(b1.states, b2.states)
    assert np.array_equal(b1.action_ids, b2.action_ids)
    b3 = sample_paths(mdp, policy, 50, 10, seed=10)
    assert not np.array_equal(b1.states, b3.states)


def test_deterministic_chain_all_paths_identical():
    mdp = _det_cycle_mdp()
    policy = StationaryPolicy.uniform(mdp)
    batch = sample_paths(mdp, policy, 20, 5, seed=0)
    assert (batch.states == batch.states[0]).all()
    chain = induce_chain(mdp, policy)
    assert empirical_entropy_rate(batch, chain) == pytest.approx(0.0)
    assert plugin_entropy_rate(batch) == pytest.approx(0.0)


def test_coin_chain_frequencies_and_rate():
    mdp = _coin_mdp()
    policy = StationaryPolicy.uniform(mdp)
    batch = sample_paths(mdp, policy, 20_000, 5, seed=3)
    freq = batch.visit_counts(2) / batch.states.size
    assert np.allclose(freq, [0.5, 0.5], atol=0.01)
    chain = induce_chain(mdp, policy)
    assert empirical_entropy_rate(batch, chain) == pytest.approx(1.0, abs=0.02)
    assert plugin_entropy_rate(batch) == pytest.approx(1.0, abs=0.02)


def test_two_class_mixture_estimate():
    # start 40/60 between a deterministic cycle and a coin-flip pair
    p = np.array(
        [
            [0.0, 1.0, 0.0, 0.0],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.5, 0.5],
            [0.0, 0.0, 0.5, 0.5],
        ]
    )
    mdp = validate_mdp(
        ["a", "b", "c", "d"],
        [["go"]] * 4,
        [
            [[("b", 1.0)]],
            [[("a", 1.0)]],
            [[("c", 0.5), ("d", 0.5)]],
            [[("c", 0.5), ("d", 0.5)]],
        ],
        [0.4, 0.0, 0.6, 0.0],
    )
    policy = StationaryPolicy.uniform(mdp)
    chain = induce_chain(mdp, policy)
    assert np.allclose(chain.matrix, p)
    batch = sample_paths(mdp, policy, 500, 200, seed=11)
    assert empirical_entropy_rate(batch, chain) == pytest.approx(0.6, abs=0.03)


def test_monitor_all_states_passes():
    mdp = _coin_mdp()
    batch = sample_paths(mdp, StationaryPolicy.uniform(mdp), 100, 10, seed=1)
    assert surveillance_monitor(batch, {0, 1}, window=10) == 1.0


def test_monitor_fails_on_sink():
    mdp = validate_mdp(
        ["good", "sink"],
        [["go"], ["stay"]],
        [[[("sink", 1.0)]], [[("sink", 1.0)]]],
        [1.0, 0.0],
    )
    batch = sample_paths(mdp, StationaryPolicy.uniform(mdp), 100, 10, seed=2)
    assert surveillance_monitor(batch, {0}, window=10) == 0.0


def test_monitor_window_validation():
    mdp = _coin_mdp()
    batch = sample_paths(mdp, StationaryPolicy.uniform(mdp), 10, 2, seed=0)
    with pytest.raises(ValueError):
        surveillance_monitor(batch, {0}, window=50)


def test_export_csv(tmp_path):
    mdp = _det_cycle_mdp()
    batch = sample_paths(mdp, StationaryPolicy.uniform(mdp), 3, 2, seed=0)
    out = tmp_path / "batch.csv"
    export_csv(batch, mdp, out)
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "path_id,step,state,action"
    assert len(lines) == 1 + 2 * 4
    assert lines[1].startswith("0,0,a,go")


def test_complete_mdp_uniform_rate():
    mdp = complete_mdp(4)
    policy = StationaryPolicy.uniform(mdp)
    chain = induce_chain(mdp, policy)
    batch = sample_paths(mdp, policy, 5_000, 4, seed=5)
    assert empirical_entropy_rate(batch, chain) == pytest.approx(2.0, abs=0.02)
