"""Core data model: MDPs, stationary policies, Markov chains, sub-MDPs.

States are referred to externally by string names and internally by dense
integer indices assigned at construction.  Transition rows are stored
sparsely (per-action lists of ``(successor, probability)`` pairs); dense
matrices are only materialized where linear algebra needs them.

All types are immutable after construction and safe to share between
threads.  Operations here are pure functions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptyActionSet,
    NotClosed,
    ValidationError,
)

#: absolute tolerance for all stochasticity checks
PROB_TOL = 1e-9


@dataclass(frozen=True)
class Mdp:
    """A finite MDP with per-state available actions and an initial distribution.

    ``transitions[s][i]`` is the sparse probability row of the ``i``-th
    available action at state ``s``, as a tuple of ``(succ_index, prob)``
    pairs with strictly positive probabilities.
    """

    state_names: tuple[str, ...]
    actions: tuple[tuple[str, ...], ...]
    transitions: tuple[tuple[tuple[tuple[int, float], ...], ...], ...]
    initial_dist: tuple[float, ...]

    @property
    def n(self) -> int:
        return len(self.state_names)

    def state_index(self, name: str) -> int:
        try:
            return self.state_names.index(name)
        except ValueError:
            raise KeyError(f"unknown state {name!r}") from None

    def action_index(self, s: int, action: str) -> int:
        try:
            return self.actions[s].index(action)
        except ValueError:
            raise KeyError(f"action {action!r} not available at state {s}") from None

    def succ(self, s: int, a: int) -> tuple[int, ...]:
        return tuple(t for t, _ in self.transitions[s][a])

    def digraph_successors(self, s: int) -> set[int]:
        """Successors of ``s`` in the union digraph (any action)."""
        out: set[int] = set()
        for row in self.transitions[s]:
            out.update(t for t, _ in row)
        return out

    def initial_support(self) -> tuple[int, ...]:
        return tuple(s for s, p in enumerate(self.initial_dist) if p > 0.0)


def validate_mdp(
    state_names,
    actions,
    transitions,
    initial_dist,
    *,
    drop_zero_rows: bool = True,
) -> Mdp:
    """Validate a raw MDP description and return an :class:`Mdp`.

    ``actions`` maps each state to its action names; ``transitions`` maps
    each state to per-action lists of ``(successor, probability)`` pairs
    (successors may be names or indices).  Action rows summing to zero are
    dropped as unavailable when ``drop_zero_rows`` is set; every other
    violation is collected and reported together in a single
    :class:`ValidationError`.
    """
    violations: list[str] = []
    names = tuple(str(s) for s in state_names)
    if len(set(names)) != len(names):
        violations.append("duplicate state names")
    n = len(names)
    if n == 0:
        raise ValidationError(["no states"])
    index = {name: i for i, name in enumerate(names)}

    def to_index(x, where):
        if isinstance(x, str):
            if x not in index:
                violations.append(f"{where}: dangling state {x!r}")
                return None
            return index[x]
        xi = int(x)
        if not 0 <= xi < n:
            violations.append(f"{where}: dangling state index {xi}")
            return None
        return xi

    out_actions: list[tuple[str, ...]] = []
    out_trans: list[tuple[tuple[tuple[int, float], ...], ...]] = []
    for s, name in enumerate(names):
        a_names = [str(a) for a in actions[s]]
        if len(set(a_names)) != len(a_names):
            violations.append(f"state {name}: duplicate action names")
        kept_names: list[str] = []
        kept_rows: list[tuple[tuple[int, float], ...]] = []
        for a_name, row in zip(a_names, transitions[s]):
            where = f"state {name}, action {a_name}"
            pairs: dict[int, float] = {}
            ok = True
            for succ, p in row:
                t = to_index(succ, where)
                if t is None:
                    ok = False
                    continue
                p = float(p)
                if not 0.0 <= p <= 1.0 + PROB_TOL:
                    violations.append(f"{where}: probability {p} outside [0, 1]")
                    ok = False
                if p > 0.0:
                    pairs[t] = pairs.get(t, 0.0) + p
            total = sum(pairs.values())
            if not pairs:
                if not drop_zero_rows:
                    violations.append(f"{where}: empty transition row")
                continue
            if abs(total - 1.0) > PROB_TOL:
                if drop_zero_rows and total <= PROB_TOL:
                    continue
                violations.append(f"{where}: row sums to {total}, expected 1")
                ok = False
            if ok:
                kept_names.append(a_name)
                kept_rows.append(tuple(sorted(pairs.items())))
        if not kept_names:
            violations.append(f"state {name}: no available actions")
        out_actions.append(tuple(kept_names))
        out_trans.append(tuple(kept_rows))

    pi0 = np.asarray(initial_dist, dtype=float)
    if pi0.shape != (n,):
        violations.append(
            f"initial distribution has length {pi0.size}, expected {n}"
        )
    else:
        if np.any(pi0 < -PROB_TOL):
            violations.append("initial distribution has negative entries")
        if abs(float(pi0.sum()) - 1.0) > PROB_TOL:
            violations.append(f"initial distribution sums to {float(pi0.sum())}")

    if violations:
        raise ValidationError(violations)
    return Mdp(
        state_names=names,
        actions=tuple(out_actions),
        transitions=tuple(out_trans),
        initial_dist=tuple(float(p) for p in pi0),
    )


@dataclass(frozen=True)
class StationaryPolicy:
    """Per-state distribution over available actions, aligned with an Mdp."""

    rows: tuple[tuple[float, ...], ...]

    def validate(self, mdp: Mdp) -> None:
        if len(self.rows) != mdp.n:
            raise DimensionMismatch(
                f"policy has {len(self.rows)} rows, MDP has {mdp.n} states"
            )
        for s, row in enumerate(self.rows):
            if len(row) != len(mdp.actions[s]):
                raise DimensionMismatch(
                    f"policy row at state {s} has {len(row)} entries, "
                    f"state has {len(mdp.actions[s])} actions"
                )
            if any(p < -PROB_TOL for p in row):
                raise ValidationError([f"policy row at state {s} has negative mass"])
            if abs(sum(row) - 1.0) > PROB_TOL:
                raise ValidationError(
                    [f"policy row at state {s} sums to {sum(row)}"]
                )

    @staticmethod
    def uniform(mdp: Mdp) -> "StationaryPolicy":
        return StationaryPolicy(
            tuple(
                tuple(1.0 / len(mdp.actions[s]) for _ in mdp.actions[s])
                for s in range(mdp.n)
            )
        )

    @staticmethod
    def deterministic(mdp: Mdp, choice) -> "StationaryPolicy":
        """Point-mass policy; ``choice[s]`` is the chosen action index."""
        rows = []
        for s in range(mdp.n):
            row = [0.0] * len(mdp.actions[s])
            row[choice[s]] = 1.0
            rows.append(tuple(row))
        return StationaryPolicy(tuple(rows))


@dataclass(frozen=True, eq=False)
class MarkovChain:
    """Row-stochastic matrix plus an initial distribution."""

    matrix: np.ndarray
    initial_dist: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", np.asarray(self.matrix, dtype=float))
        object.__setattr__(
            self, "initial_dist", np.asarray(self.initial_dist, dtype=float)
        )
        m = self.matrix
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValidationError([f"chain matrix has shape {m.shape}"])
        if self.initial_dist.shape != (m.shape[0],):
            raise DimensionMismatch("initial distribution length mismatch")
        if np.any(m < -PROB_TOL) or np.any(m > 1.0 + PROB_TOL):
            raise ValidationError(["chain matrix entries outside [0, 1]"])
        bad = np.nonzero(np.abs(m.sum(axis=1) - 1.0) > PROB_TOL)[0]
        if bad.size:
            raise ValidationError(
                [f"chain row {int(s)} sums to {float(m[s].sum())}" for s in bad]
            )
        self.matrix.setflags(write=False)
        self.initial_dist.setflags(write=False)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def successors(self, s: int) -> np.ndarray:
        return np.nonzero(self.matrix[s] > 0.0)[0]


def induce_chain(mdp: Mdp, policy: StationaryPolicy) -> MarkovChain:
    """Markov chain induced by a stationary policy: P[i, j] = sum_a mu(i, a) P(j | i, a)."""
    policy.validate(mdp)
    n = mdp.n
    matrix = np.zeros((n, n))
    for s in range(n):
        for a, weight in enumerate(policy.rows[s]):
            if weight == 0.0:
                continue
            for t, p in mdp.transitions[s][a]:
                matrix[s, t] += weight * p
    return MarkovChain(matrix, np.asarray(mdp.initial_dist))


@dataclass(frozen=True)
class SubMdp:
    """A closed restriction of an Mdp to a state subset and smaller action sets.

    ``action_map[s]`` holds indices into ``parent.actions[s]``.
    """

    parent: Mdp
    states: tuple[int, ...]
    action_map: dict[int, tuple[int, ...]]

    def to_mdp(self) -> tuple[Mdp, dict[int, int]]:
        """Reindex into a standalone Mdp (uniform initial distribution).

        Returns the new Mdp and the parent-index -> new-index map.
        """
        remap = {s: i for i, s in enumerate(self.states)}
        names = tuple(self.parent.state_names[s] for s in self.states)
        actions = tuple(
            tuple(self.parent.actions[s][a] for a in self.action_map[s])
            for s in self.states
        )
        trans = tuple(
            tuple(
                tuple((remap[t], p) for t, p in self.parent.transitions[s][a])
                for a in self.action_map[s]
            )
            for s in self.states
        )
        k = len(self.states)
        sub = Mdp(names, actions, trans, tuple([1.0 / k] * k))
        return sub, remap


def restrict(mdp: Mdp, subset, action_map) -> SubMdp:
    """Restrict ``mdp`` to ``subset`` with per-state action sets.

    ``action_map[s]`` may hold action names or indices.  Raises
    :class:`NotClosed` on an escaping transition and :class:`EmptyActionSet`
    on a state left without actions.
    """
    states = tuple(sorted(set(subset)))
    if not states:
        raise ValidationError(["empty state subset"])
    inside = set(states)
    resolved: dict[int, tuple[int, ...]] = {}
    for s in states:
        acts = action_map[s]
        idxs = []
        for a in acts:
            ai = mdp.action_index(s, a) if isinstance(a, str) else int(a)
            if not 0 <= ai < len(mdp.actions[s]):
                raise ValidationError([f"state {s}: bad action index {ai}"])
            idxs.append(ai)
        if not idxs:
            raise EmptyActionSet(s)
        for ai in idxs:
            for t, _ in mdp.transitions[s][ai]:
                if t not in inside:
                    raise NotClosed(s, mdp.actions[s][ai], t)
        resolved[s] = tuple(sorted(set(idxs)))
    return SubMdp(parent=mdp, states=states, action_map=resolved)
