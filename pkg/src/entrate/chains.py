"""Markov-chain mathematics.

Recurrent-class decomposition, stationary and limit distributions, local
entropy and entropy rate (base-2), transient linear solves, and the
Huffman-weight observation metric.

The limit matrix is never formed.  The limit distribution is assembled
structurally: for a state in recurrent class R_k it equals beta(k) (the
probability of absorption into R_k) times the class stationary
distribution; transient states get 0.  This also covers periodic classes,
whose stationary distribution equals the Cesaro limit row.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .errors import SingularSolve
from .graph import _sccs
from .model import MarkovChain, Mdp, StationaryPolicy, induce_chain


@dataclass(frozen=True, eq=False)
class ChainStructure:
    """Recurrent classes, transient states, class stationaries, reach weights."""

    recurrent_classes: tuple[tuple[int, ...], ...]
    transient_states: tuple[int, ...]
    stationaries: tuple[np.ndarray, ...]
    reach_weights: np.ndarray

    @property
    def num_classes(self) -> int:
        return len(self.recurrent_classes)


def _bottom_sccs(mc: MarkovChain):
    """Bottom SCCs of the chain digraph: the recurrent classes."""
    n = mc.n
    succ = [set(np.nonzero(mc.matrix[s] > 0.0)[0].tolist()) for s in range(n)]
    comps = _sccs(range(n), lambda u: succ[u])
    recurrent = []
    for comp in comps:
        cset = set(comp)
        if all(succ[s] <= cset for s in comp):
            recurrent.append(tuple(comp))
    recurrent.sort(key=lambda c: c[0])
    return recurrent, succ


def _class_stationary(p_sub: np.ndarray) -> np.ndarray:
    """Unique solution of sigma = sigma P on an irreducible submatrix."""
    k = p_sub.shape[0]
    a = p_sub.T - np.eye(k)
    a[-1, :] = 1.0
    b = np.zeros(k)
    b[-1] = 1.0
    try:
        sigma = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise SingularSolve(f"stationary solve failed: {exc}") from exc
    sigma = np.where(np.abs(sigma) < 1e-15, 0.0, sigma)
    return sigma / sigma.sum()


def chain_structure(mc: MarkovChain) -> ChainStructure:
    """Decompose a chain and compute per-class stationaries and reach weights."""
    recurrent, _ = _bottom_sccs(mc)
    in_rec = {s for comp in recurrent for s in comp}
    transient = tuple(s for s in range(mc.n) if s not in in_rec)
    stationaries = tuple(
        _class_stationary(mc.matrix[np.ix_(comp, comp)]) for comp in recurrent
    )
    k_classes = len(recurrent)
    beta = np.zeros(k_classes)
    pi0 = mc.initial_dist
    for k, comp in enumerate(recurrent):
        beta[k] = pi0[list(comp)].sum()
    if transient:
        t_idx = list(transient)
        q0 = mc.matrix[np.ix_(t_idx, t_idx)]
        lhs = np.eye(len(t_idx)) - q0
        # absorption probabilities into each class from each transient state
        rhs = np.stack(
            [mc.matrix[np.ix_(t_idx, list(comp))].sum(axis=1) for comp in recurrent],
            axis=1,
        )
        try:
            absorb = np.linalg.solve(lhs, rhs)
        except np.linalg.LinAlgError as exc:
            raise SingularSolve(str(exc)) from exc
        if not np.allclose(lhs @ absorb, rhs, atol=1e-8):
            raise SingularSolve("I - Q_0 is numerically singular")
        beta += pi0[t_idx] @ absorb
    return ChainStructure(
        recurrent_classes=tuple(recurrent),
        transient_states=transient,
        stationaries=stationaries,
        reach_weights=beta,
    )


def limit_distribution(mc: MarkovChain, structure: ChainStructure | None = None) -> np.ndarray:
    """Limit (Cesaro) distribution: beta(k) * sigma_k on class k, 0 on transients."""
    st = structure if structure is not None else chain_structure(mc)
    pi = np.zeros(mc.n)
    for k, comp in enumerate(st.recurrent_classes):
        pi[list(comp)] = st.reach_weights[k] * st.stationaries[k]
    return pi


def entropy_of(dist) -> float:
    """Shannon entropy in bits with the 0 log 0 = 0 convention."""
    p = np.asarray(dist, dtype=float)
    p = p[p > 0.0]
    return float(-(p * np.log2(p)).sum())


def local_entropy(mc: MarkovChain, s: int) -> float:
    """Entropy of the transition row at state ``s`` (bits)."""
    return entropy_of(mc.matrix[s])


def entropy_rate(mc: MarkovChain, structure: ChainStructure | None = None) -> float:
    """Limit-distribution-weighted average of local entropies (bits/step)."""
    pi = limit_distribution(mc, structure)
    rate = 0.0
    for s in np.nonzero(pi > 0.0)[0]:
        rate += pi[s] * local_entropy(mc, int(s))
    return float(rate)


def transient_value_solve(mc: MarkovChain, transient, boundary_values) -> dict[int, float]:
    """Expected absorbed value from each transient state.

    Solves ``v = P_T v + P_boundary vals`` where ``boundary_values`` maps
    every state directly reachable from ``transient`` outside the set to a
    value.  Raises :class:`SingularSolve` if the set is not transient.
    """
    t_idx = sorted(transient)
    if not t_idx:
        return {}
    t_set = set(t_idx)
    pt = mc.matrix[np.ix_(t_idx, t_idx)]
    rhs = np.zeros(len(t_idx))
    for i, s in enumerate(t_idx):
        for t in np.nonzero(mc.matrix[s] > 0.0)[0]:
            t = int(t)
            if t in t_set:
                continue
            rhs[i] += mc.matrix[s, t] * boundary_values[t]
    lhs = np.eye(len(t_idx)) - pt
    try:
        v = np.linalg.solve(lhs, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularSolve(str(exc)) from exc
    if not np.allclose(lhs @ v, rhs, atol=1e-8):
        raise SingularSolve("I - P_T is singular; set contains recurrent states")
    return {s: float(v[i]) for i, s in enumerate(t_idx)}


def huffman_weight(dist) -> float:
    """Expected codeword length of an optimal binary Huffman code.

    A point mass encodes with a single leaf at depth 0 and costs nothing.
    Zero-probability symbols are ignored.
    """
    p = [float(x) for x in np.asarray(dist, dtype=float) if x > 0.0]
    if not p:
        raise ValueError("distribution has no support")
    total = sum(p)
    if abs(total - 1.0) > 1e-6:
        raise ValueError(f"distribution sums to {total}")
    if len(p) == 1:
        return 0.0
    heapq.heapify(p)
    weight = 0.0
    while len(p) > 1:
        a = heapq.heappop(p)
        b = heapq.heappop(p)
        weight += a + b
        heapq.heappush(p, a + b)
    return weight


def probe_weight(dist) -> float:
    """Expected number of one-candidate yes/no probes to identify a symbol.

    The probes test candidates one at a time in descending-probability
    order; when only one candidate remains it is confirmed without a
    further probe, except that a point mass still costs one probe (the
    observer always probes at least once).
    """
    p = sorted((float(x) for x in np.asarray(dist, dtype=float) if x > 0.0), reverse=True)
    if not p:
        raise ValueError("distribution has no support")
    if len(p) == 1:
        return 1.0
    k = len(p)
    return float(sum(min(i + 1, k - 1) * x for i, x in enumerate(p)))


def probe_cost(
    mdp: Mdp,
    policy: StationaryPolicy,
    *,
    chain: MarkovChain | None = None,
) -> float:
    """Average sequential probes per step to track the agent's action choice.

    Limit-distribution-weighted :func:`probe_weight` of the policy's
    action distribution at each state.  A state with a deterministic
    choice costs exactly one probe.
    """
    mc = chain if chain is not None else induce_chain(mdp, policy)
    pi = limit_distribution(mc)
    cost = 0.0
    for s in np.nonzero(pi > 0.0)[0]:
        row = [p for p in policy.rows[int(s)] if p > 0.0]
        cost += pi[s] * probe_weight(row)
    return float(cost)


def observation_cost(
    mdp: Mdp,
    policy: StationaryPolicy,
    *,
    min_probes_one: bool = False,
    chain: MarkovChain | None = None,
) -> float:
    """Average probes per step needed to track the agent in steady state.

    Limit-distribution-weighted Huffman weight of each state's successor
    distribution in the induced chain.  ``min_probes_one`` clamps the
    per-state weight to at least one probe, the accounting under which a
    deterministic transition still costs one observation.
    """
    mc = chain if chain is not None else induce_chain(mdp, policy)
    pi = limit_distribution(mc)
    cost = 0.0
    for s in np.nonzero(pi > 0.0)[0]:
        row = mc.matrix[int(s)]
        w = huffman_weight(row[row > 0.0])
        if min_probes_one:
            w = max(w, 1.0)
        cost += pi[s] * w
    return float(cost)
