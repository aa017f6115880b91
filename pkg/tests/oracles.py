"""Independent oracles and random instance generators for the test suite.

The oracles never call the solver code under test.  Entropy rates are
evaluated through batched Cesaro averaging of matrix powers, and policy
spaces are swept on a fixed grid, so solver results can be checked
against an implementation-independent second route.
"""

from __future__ import annotations

import itertools

import numpy as np

from entrate.model import Mdp, validate_mdp


def cesaro_average(p: np.ndarray, doublings: int = 22) -> np.ndarray:
    """Batched Cesaro average (1/N) sum_{k<N} P^k with N = 2**doublings.

    ``p`` has shape (..., n, n); the recurrence A_{2N} = (A_N + P^N A_N)/2
    needs two matmuls per doubling.
    """
    n = p.shape[-1]
    a = np.broadcast_to(np.eye(n), p.shape).copy()
    pk = p.copy()
    for _ in range(doublings):
        a = 0.5 * (a + pk @ a)
        pk = pk @ pk
    return a


def cesaro_prefix(p: np.ndarray, steps: int) -> np.ndarray:
    """Exact (1/N) sum_{k<N} P^k for an arbitrary step count N.

    Uses the split S_{m+n} = S_m + P^m S_n over the binary digits of N.
    """
    n = p.shape[-1]
    total = None  # running S_m
    power = None  # running P^m
    s_bit = np.eye(n)  # S for the current bit's block size
    p_bit = p.copy()
    remaining = steps
    while remaining:
        if remaining & 1:
            if total is None:
                total, power = s_bit.copy(), p_bit.copy()
            else:
                total = total + power @ s_bit
                power = power @ p_bit
        s_bit = s_bit + p_bit @ s_bit
        p_bit = p_bit @ p_bit
        remaining >>= 1
    return total / steps


def row_entropies(p: np.ndarray) -> np.ndarray:
    """Base-2 row entropies of a (batched) stochastic matrix."""
    with np.errstate(divide="ignore", invalid="ignore"):
        logs = np.where(p > 0.0, np.log2(np.where(p > 0.0, p, 1.0)), 0.0)
    return -(p * logs).sum(axis=-1)


def bool_closure(p: np.ndarray) -> np.ndarray:
    """Reflexive-transitive reachability of a (batched) kernel, exact."""
    n = p.shape[-1]
    reach = (p > 0.0) | np.eye(n, dtype=bool)
    for _ in range(int(np.ceil(np.log2(max(n, 2))))):
        reach = np.matmul(
            reach.astype(np.uint8), reach.astype(np.uint8)
        ).astype(bool)
    return reach


def _policy_grid(mdp: Mdp, step: float):
    """Per-state lists of candidate policy rows on a fixed grid."""
    per_state = []
    for s in range(mdp.n):
        k = len(mdp.actions[s])
        if k == 1:
            per_state.append(np.array([[1.0]]))
        elif k == 2:
            w = np.round(np.arange(0.0, 1.0 + step / 2, step), 10)
            per_state.append(np.stack([w, 1.0 - w], axis=1))
        else:
            raise ValueError("grid oracle supports at most 2 actions")
    return per_state


def _action_rows(mdp: Mdp, s: int) -> np.ndarray:
    rows = np.zeros((len(mdp.actions[s]), mdp.n))
    for a in range(len(mdp.actions[s])):
        for t, p in mdp.transitions[s][a]:
            rows[a, t] = p
    return rows


def grid_chain_batches(mdp: Mdp, step: float, chunk: int = 200_000):
    """Yield induced-chain batches (B, n, n) for all grid policies."""
    per_state = _policy_grid(mdp, step)
    counts = [len(g) for g in per_state]
    index_iter = itertools.product(*(range(c) for c in counts))
    action_rows = [_action_rows(mdp, s) for s in range(mdp.n)]
    while True:
        block = list(itertools.islice(index_iter, chunk))
        if not block:
            return
        idx = np.array(block)
        b = len(block)
        p = np.zeros((b, mdp.n, mdp.n))
        for s in range(mdp.n):
            weights = per_state[s][idx[:, s]]
            p[:, s, :] = weights @ action_rows[s]
        yield p


def oracle_unconstrained(mdp: Mdp, step: float = 0.01) -> float:
    """Best entropy rate over all grid policies (no constraint)."""
    pi0 = np.asarray(mdp.initial_dist)
    best = -np.inf
    for p in grid_chain_batches(mdp, step):
        occ = np.einsum("s,bst->bt", pi0, cesaro_average(p))
        rates = (occ * row_entropies(p)).sum(axis=-1)
        best = max(best, float(rates.max()))
    return best


def oracle_constrained(mdp: Mdp, target, step: float = 0.02):
    """Best entropy rate over grid policies satisfying the surveillance task.

    Returns ``(found_feasible, best_rate)``.  A policy qualifies when,
    from every initial state, each reachable recurrent class contains a
    target state (recurrence and reachability decided exactly on the
    digraph; the rate comes from Cesaro occupancy).
    """
    pi0 = np.asarray(mdp.initial_dist)
    support = np.nonzero(pi0 > 0.0)[0]
    tgt = sorted(target)
    best = -np.inf
    found = False
    for p in grid_chain_batches(mdp, step):
        reach = bool_closure(p)
        mutual = reach & reach.transpose(0, 2, 1)
        recurrent = (~(reach & ~mutual)).all(axis=-1)
        class_hits_b = (mutual[:, :, tgt]).any(axis=-1)
        bad_target = recurrent & ~class_hits_b
        violates = np.zeros(p.shape[0], dtype=bool)
        for s in support:
            violates |= (reach[:, s, :] & bad_target).any(axis=-1)
        feasible = ~violates
        if not feasible.any():
            continue
        found = True
        occ = np.einsum("s,bst->bt", pi0, cesaro_average(p))
        rates = (occ * row_entropies(p)).sum(axis=-1)
        best = max(best, float(rates[feasible].max()))
    return found, best


def random_mdp(rng: np.random.Generator, n: int, max_actions: int = 2,
               max_two_action_states: int | None = None) -> Mdp:
    """A random MDP with dense-ish rows and a random initial distribution."""
    names = [f"s{i}" for i in range(n)]
    if max_two_action_states is None:
        max_two_action_states = n
    max_two_action_states = min(max_two_action_states, n)
    two = set(
        rng.choice(n, size=rng.integers(0, max_two_action_states + 1),
                   replace=False).tolist()
    ) if max_actions > 1 else set()
    actions, transitions = [], []
    for s in range(n):
        k = 2 if s in two else 1
        actions.append([f"a{j}" for j in range(k)])
        rows = []
        for _ in range(k):
            support = rng.choice(
                n, size=rng.integers(1, n + 1), replace=False
            )
            probs = rng.random(len(support)) + 0.05
            probs /= probs.sum()
            rows.append([(int(t), float(p)) for t, p in zip(support, probs)])
        transitions.append(rows)
    init = rng.random(n) + 0.05
    init /= init.sum()
    return validate_mdp(names, actions, transitions, init.tolist())


def random_communicating_mdp(
    rng: np.random.Generator, n: int, max_actions: int = 2,
    max_two_action_states: int | None = None
) -> Mdp:
    """Rejection-sample a communicating MDP."""
    from entrate.graph import is_communicating

    while True:
        mdp = random_mdp(rng, n, max_actions, max_two_action_states)
        if is_communicating(mdp):
            return mdp


def random_chain(rng: np.random.Generator, n: int) -> np.ndarray:
    """A random row-stochastic matrix with some structural zeros."""
    p = np.zeros((n, n))
    for s in range(n):
        support = rng.choice(n, size=rng.integers(1, n + 1), replace=False)
        probs = rng.random(len(support)) + 0.05
        probs /= probs.sum()
        p[s, support] = probs
    return p


def fig1_mdp() -> Mdp:
    """The five-state running example used across the structural tests.

    State 2 is a self-loop sink; 1 feeds it; 3 can loop or back off to 1
    or 2; 4 and 5 form a cycle that can drop into 2 or 3.
    """
    names = ["1", "2", "3", "4", "5"]
    actions = [["a1"], ["a1"], ["a1", "a2", "a3"], ["a1", "a2", "a3"], ["a1", "a2"]]
    transitions = [
        [[(1, 1.0)]],
        [[(1, 1.0)]],
        [[(0, 1.0)], [(1, 1.0)], [(2, 1.0)]],
        [[(1, 1.0)], [(2, 1.0)], [(4, 1.0)]],
        [[(3, 1.0)], [(4, 1.0)]],
    ]
    return validate_mdp(names, actions, transitions, [0.2] * 5)


def complete_mdp(n: int) -> Mdp:
    """n deterministic actions per state, one to every state."""
    names = [f"s{i}" for i in range(n)]
    actions = [[f"a{j}" for j in range(n)] for _ in range(n)]
    transitions = [[[(j, 1.0)] for j in range(n)] for _ in range(n)]
    init = [1.0] + [0.0] * (n - 1)
    return validate_mdp(names, actions, transitions, init)
