"""Core model validation and chain induction."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from entrate.errors import EmptyActionSet, NotClosed, ValidationError
from entrate.model import (
    StationaryPolicy,
    induce_chain,
    restrict,
    validate_mdp,
)

from oracles import complete_mdp, fig1_mdp, random_mdp


def test_validate_collects_all_violations():
    with pytest.raises(ValidationError) as err:
        validate_mdp(
            ["a", "b"],
            [["x"], ["x"]],
            [[[("a", 0.5), ("b", 0.6)]], [[("c", 1.0)]]],
            [0.5, 0.6],
        )
    messages = err.value.violations
    assert any("row sums" in m for m in messages)
    assert any("dangling" in m for m in messages)
    assert any("initial distribution sums" in m for m in messages)
    assert len(messages) >= 3


def test_zero_rows_dropped_as_unavailable():
    mdp = validate_mdp(
        ["a", "b"],
        [["stay", "dead"], ["stay"]],
        [[[("a", 1.0)], []], [[("b", 1.0)]]],
        [1.0, 0.0],
    )
    assert mdp.actions[0] == ("stay",)


def test_duplicate_successors_merge():
    mdp = validate_mdp(
        ["a", "b"],
        [["x"], ["x"]],
        [[[("b", 0.5), ("b", 0.5)]], [[("a", 1.0)]]],
        [1.0, 0.0],
    )
    assert mdp.transitions[0][0] == ((1, 1.0),)


def test_state_and_action_lookup():
    mdp = fig1_mdp()
    assert mdp.state_index("3") == 2
    assert mdp.action_index(2, "a2") == 1
    with pytest.raises(KeyError):
        mdp.state_index("nope")
    with pytest.raises(KeyError):
        mdp.action_index(0, "a9")


def test_induce_chain_matches_hand_computation():
    mdp = fig1_mdp()
    rows = [(1.0,), (1.0,), (0.2, 0.3, 0.5), (0.0, 0.0, 1.0), (0.5, 0.5)]
    chain = induce_chain(mdp, StationaryPolicy(tuple(rows)))
    assert chain.matrix[2, 0] == pytest.approx(0.2)
    assert chain.matrix[2, 2] == pytest.approx(0.5)
    assert chain.matrix[4, 3] == pytest.approx(0.5)
    assert np.allclose(chain.matrix.sum(axis=1), 1.0)


def test_policy_validation_errors():
    mdp = fig1_mdp()
    with pytest.raises(ValidationError):
        StationaryPolicy(((1.0,), (1.0,), (0.5, 0.5, 0.5), (1, 0, 0), (1, 0))).validate(mdp)


def test_restrict_not_closed_and_empty():
    mdp = fig1_mdp()
    with pytest.raises(NotClosed):
        # state 3's third action escapes to state 4
        restrict(mdp, {1, 2, 3}, {1: [0], 2: [1, 2], 3: [0, 1, 2]})
    with pytest.raises(EmptyActionSet):
        restrict(mdp, {1, 2}, {1: [0], 2: []})


def test_restrict_roundtrip():
    mdp = fig1_mdp()
    sub = restrict(mdp, {3, 4}, {3: [2], 4: [0, 1]})
    small, remap = sub.to_mdp()
    assert small.n == 2
    assert small.state_names == ("4", "5")
    assert small.transitions[remap[3] if 3 in remap else 0][0] == ((1, 1.0),)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_induced_chain_row_stochastic(seed):
    rng = np.random.default_rng(seed)
    mdp = random_mdp(rng, int(rng.integers(2, 7)))
    weights = [rng.random(len(mdp.actions[s])) + 0.01 for s in range(mdp.n)]
    policy = StationaryPolicy(
        tuple(tuple((w / w.sum()).tolist()) for w in weights)
    )
    chain = induce_chain(mdp, policy)
    assert np.allclose(chain.matrix.sum(axis=1), 1.0, atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=10_000), st.floats(0.0, 1.0))
def test_policy_mixture_linearity(seed, t):
    """Inducing a mixed policy mixes the kernels linearly."""
    rng = np.random.default_rng(seed)
    mdp = random_mdp(rng, 4)

    def rand_policy():
        rows = []
        for s in range(mdp.n):
            w = rng.random(len(mdp.actions[s])) + 0.01
            rows.append(tuple((w / w.sum()).tolist()))
        return StationaryPolicy(tuple(rows))

    p1, p2 = rand_policy(), rand_policy()
    mixed = StationaryPolicy(
        tuple(
            tuple(t * a + (1 - t) * b for a, b in zip(r1, r2))
            for r1, r2 in zip(p1.rows, p2.rows)
        )
    )
    lhs = induce_chain(mdp, mixed).matrix
    rhs = t * induce_chain(mdp, p1).matrix + (1 - t) * induce_chain(mdp, p2).matrix
    assert np.allclose(lhs, rhs, atol=1e-12)


def test_complete_mdp_shape():
    mdp = complete_mdp(4)
    assert mdp.n == 4
    assert all(len(mdp.actions[s]) == 4 for s in range(4))
    assert mdp.initial_support() == (0,)
