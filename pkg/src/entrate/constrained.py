"""Entropy-rate maximization under a surveillance constraint.

Synthesizes a stationary policy that maximizes the entropy rate of the
induced chain among all policies visiting a target set B infinitely often
with probability one.  The procedure:

1. prune the MDP to the almost-sure winning region of the accepting MECs
   (those intersecting B), removing leaking actions;
2. decompose the pruned MDP into MECs and classify them (and the remaining
   transient states) into levels by reachability among MECs;
3. compute each MEC's stay value: its maximal entropy rate if accepting,
   minus infinity otherwise;
4. walk the levels bottom-up; at each step solve an expected-total-reward
   LP over occupation variables on the unprocessed slice, decode a partial
   policy from the basic solution, evaluate it by a transient linear
   solve, and fuse it with the stay policies, keeping whichever is worth
   more at each MEC state.

Values are shifted by +1 during the iteration so that every retained
value is strictly positive (this makes leaving a slice strictly better
than lingering, which is what lets a basic LP solution be decoded into a
policy making the slice transient); the shift is removed on report.
Minus infinity is represented by ``None`` in value maps, never by a
float.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from .chains import chain_structure, entropy_rate
from .errors import NoFeasiblePolicy, SingularSolve
from .graph import Mec, _winning_region, classify_levels, mec_decomposition
from .model import MarkovChain, Mdp, StationaryPolicy, SubMdp, induce_chain
from .solvers import LinearProgram, solve_lp
from .unconstrained import max_entropy_rate_policy

#: value shift applied before the level iteration and removed on report
VALUE_SHIFT = 1.0
#: occupation mass above this keeps a state in the decoded set
DECODE_THRESHOLD = 1e-9


@dataclass(frozen=True)
class SurveillanceProblem:
    """An MDP plus the nonempty set of states to visit infinitely often."""

    mdp: Mdp
    target: frozenset[int]

    def __post_init__(self):
        if not self.target:
            raise ValueError("target set is empty")
        bad = [s for s in self.target if not 0 <= s < self.mdp.n]
        if bad:
            raise ValueError(f"target states out of range: {bad}")


@dataclass
class LevelState:
    """Working state of the level iteration (shifted values)."""

    k: int
    processed: set[int]
    values: dict[int, float | None]
    policy_rows: dict[int, tuple[float, ...]]


@dataclass(frozen=True)
class SynthesisResult:
    """Synthesized policy plus achieved values and run diagnostics."""

    policy: StationaryPolicy
    chain: MarkovChain
    value_map: dict[int, float | None]
    global_rate: float
    diagnostics: dict = field(default_factory=dict)


def prune_to_winning(problem: SurveillanceProblem):
    """Restrict to the almost-sure winning region of the accepting MECs.

    Returns ``(SubMdp, excluded_states)``.  Raises
    :class:`NoFeasiblePolicy` when some initial state lies outside the
    winning region (then no policy can satisfy the task).
    """
    mdp = problem.mdp
    mecs = [m.with_accepting(set(problem.target)) for m in mec_decomposition(mdp)]
    amecs = [m for m in mecs if m.accepting]
    winning, action_map = _winning_region(mdp, amecs)
    bad = [s for s in mdp.initial_support() if s not in winning]
    if bad or not winning:
        raise NoFeasiblePolicy(bad or list(mdp.initial_support()))
    excluded = sorted(set(range(mdp.n)) - winning)
    sub = SubMdp(parent=mdp, states=tuple(sorted(winning)), action_map=action_map)
    return sub, excluded


def stay_values(mdp: Mdp, mecs: list[Mec], tol: float = 1e-6):
    """Per-MEC stay value and stay-policy fragment.

    Accepting MECs get their maximal entropy rate (every MEC is
    communicating as a sub-MDP) and the maxentropic policy restricted to
    the MEC's actions.  Non-accepting MECs get ``None`` (minus infinity)
    and an arbitrary deterministic fragment.

    Returns ``(values, fragments)``: ``values[i]`` is the stay value of
    ``mecs[i]``; ``fragments[i]`` maps each MEC state to a distribution
    over the full action set of ``mdp`` at that state.
    """
    values: list[float | None] = []
    fragments: list[dict[int, tuple[float, ...]]] = []
    for mec in mecs:
        fragment: dict[int, tuple[float, ...]] = {}
        if not mec.accepting:
            for s in mec.states:
                row = [0.0] * len(mdp.actions[s])
                row[mec.action_map[s][0]] = 1.0
                fragment[s] = tuple(row)
            values.append(None)
            fragments.append(fragment)
            continue
        sub_mdp, remap = mec.as_submdp(mdp).to_mdp()
        sol = max_entropy_rate_policy(sub_mdp, tol)
        for s in mec.states:
            row = [0.0] * len(mdp.actions[s])
            for j, a in enumerate(mec.action_map[s]):
                row[a] = sol.policy.rows[remap[s]][j]
            fragment[s] = tuple(row)
        values.append(sol.entropy_rate)
        fragments.append(fragment)
    return values, fragments


def level_lp(mdp: Mdp, q_states, boundary_values, alpha=None):
    """Expected-total-reward LP over occupation variables on a slice.

    ``q_states`` is the unprocessed slice Q; ``boundary_values`` maps every
    state directly reachable from Q outside of it to a shifted value or
    ``None``.  ``alpha`` defaults to the uniform positive vector 1/|Q|.
    Sentinel boundary states enter the objective with a surrogate
    coefficient low enough that any avoiding policy strictly dominates.

    Returns ``(gamma, objective, var_index)`` with ``var_index`` mapping
    ``(state, action)`` to a position in ``gamma``.
    """
    q = sorted(q_states)
    q_pos = {s: i for i, s in enumerate(q)}
    if not q:
        return np.zeros(0), 0.0, {}
    if alpha is None:
        alpha = {s: 1.0 / len(q) for s in q}
    finite = [v for v in boundary_values.values() if v is not None]
    max_finite = max(finite, default=0.0)
    surrogate = -(mdp.n * max_finite + 1.0)

    var_index: dict[tuple[int, int], int] = {}
    for s in q:
        for a in range(len(mdp.actions[s])):
            var_index[(s, a)] = len(var_index)
    nv = len(var_index)
    c = np.zeros(nv)
    a_ub = np.zeros((len(q), nv))
    b_ub = np.array([alpha[s] for s in q])
    for (s, a), idx in var_index.items():
        a_ub[q_pos[s], idx] += 1.0
        for t, p in mdp.transitions[s][a]:
            if t in q_pos:
                a_ub[q_pos[t], idx] -= p
            else:
                v = boundary_values[t]
                c[idx] += p * (surrogate if v is None else v)
    gamma, objective = solve_lp(LinearProgram(c=c, a_ub=a_ub, b_ub=b_ub))

    # flow into a sentinel boundary state means the pruning invariant broke
    for (s, a), idx in var_index.items():
        if gamma[idx] <= DECODE_THRESHOLD:
            continue
        for t, p in mdp.transitions[s][a]:
            if t not in q_pos and boundary_values[t] is None:
                if gamma[idx] * p > DECODE_THRESHOLD:
                    raise AssertionError(
                        f"optimal occupation routes mass into dead state {t}"
                    )
    return gamma, objective, var_index


def decode_policy(mdp: Mdp, q_states, gamma, var_index):
    """Normalize occupation rows into a partial policy on the slice.

    States whose total occupation falls below the decode threshold get the
    lowest-index available action.  Returns ``(rows, q_star)``.
    """
    rows: dict[int, tuple[float, ...]] = {}
    q_star: set[int] = set()
    for s in sorted(q_states):
        g = np.array(
            [gamma[var_index[(s, a)]] for a in range(len(mdp.actions[s]))]
        )
        total = g.sum()
        if total > DECODE_THRESHOLD:
            q_star.add(s)
            rows[s] = tuple((g / total).tolist())
        else:
            row = [0.0] * len(mdp.actions[s])
            row[0] = 1.0
            rows[s] = tuple(row)
    return rows, q_star


def transient_values(mdp: Mdp, q_states, rows, boundary_values):
    """Expected boundary value absorbed from each slice state.

    Under the decoded partial policy, states certain to leave the slice
    get the linear-solve value; states that can get stuck inside it (they
    reach a closed class within the slice) get ``None``.
    """
    q = sorted(q_states)
    q_set = set(q)
    # one-step distribution of each slice state under its decoded row
    step: dict[int, dict[int, float]] = {}
    for s in q:
        dist: dict[int, float] = {}
        for a, w in enumerate(rows[s]):
            if w == 0.0:
                continue
            for t, p in mdp.transitions[s][a]:
                dist[t] = dist.get(t, 0.0) + w * p
        step[s] = dist

    # states that can get trapped: reach a set closed within the slice
    can_exit = {s for s in q if any(t not in q_set for t in step[s])}
    frontier = list(can_exit)
    while frontier:
        u = frontier.pop()
        for s in q:
            if s not in can_exit and u in step[s]:
                can_exit.add(s)
                frontier.append(s)
    trapped = q_set - can_exit
    # a state reaching the trapped set with positive probability is not
    # certain to be absorbed at the boundary either
    unsafe = set(trapped)
    changed = True
    while changed:
        changed = False
        for s in q:
            if s not in unsafe and any(t in unsafe for t in step[s]):
                unsafe.add(s)
                changed = True
    safe = [s for s in q if s not in unsafe]

    out: dict[int, float | None] = {s: None for s in unsafe}
    if safe:
        pos = {s: i for i, s in enumerate(safe)}
        pt = np.zeros((len(safe), len(safe)))
        rhs = np.zeros(len(safe))
        for s in safe:
            for t, p in step[s].items():
                if t in pos:
                    pt[pos[s], pos[t]] += p
                else:
                    rhs[pos[s]] += p * boundary_values[t]
        lhs = np.eye(len(safe)) - pt
        try:
            v = np.linalg.solve(lhs, rhs)
        except np.linalg.LinAlgError as exc:
            raise SingularSolve(str(exc)) from exc
        if not np.allclose(lhs @ v, rhs, atol=1e-8):
            raise SingularSolve("slice transient solve is singular")
        for s in safe:
            out[s] = float(v[pos[s]])
    return out


def fuse_level(
    state: LevelState,
    decoded_rows,
    v_prime,
    stay_of_state,
    stay_rows,
    t_k,
    l_next,
) -> LevelState:
    """Merge the decoded slice policy with the stay policies.

    Transient slice states always take the decoded policy.  MEC states of
    the next level compare the stay value against the decoded value and
    keep the larger, ties going to stay.  Already-processed states are
    untouched.
    """
    values = dict(state.values)
    rows = dict(state.policy_rows)
    for s in t_k:
        rows[s] = decoded_rows[s]
        values[s] = v_prime[s]
    for s in l_next:
        stay = stay_of_state[s]
        leave = v_prime[s]
        if leave is None and stay is None:
            raise AssertionError(
                f"state {s} has no viable continuation; pruning invariant broke"
            )
        if stay is not None and (leave is None or stay >= leave):
            rows[s] = stay_rows[s]
            values[s] = stay
        else:
            rows[s] = decoded_rows[s]
            values[s] = leave
    processed = state.processed | set(t_k) | set(l_next)
    return LevelState(
        k=state.k + 1, processed=processed, values=values, policy_rows=rows
    )


def synthesize(problem: SurveillanceProblem, tol: float = 1e-6) -> SynthesisResult:
    """Synthesize an entropy-rate-maximal policy for a surveillance task."""
    mdp = problem.mdp
    sub, excluded = prune_to_winning(problem)
    pmdp, remap = sub.to_mdp()
    back = {i: s for s, i in remap.items()}
    init = np.array([mdp.initial_dist[back[i]] for i in range(pmdp.n)])
    pmdp = dataclasses.replace(pmdp, initial_dist=tuple(init.tolist()))
    target = {remap[s] for s in problem.target if s in remap}

    mecs = [m.with_accepting(target) for m in mec_decomposition(pmdp)]
    levels = classify_levels(pmdp, mecs)
    stay_vals, stay_frags = stay_values(pmdp, mecs, tol)

    stay_of_state: dict[int, float | None] = {}
    stay_rows: dict[int, tuple[float, ...]] = {}
    for i, mec in enumerate(mecs):
        v = stay_vals[i]
        shifted = None if v is None else v + VALUE_SHIFT
        for s in mec.states:
            stay_of_state[s] = shifted
            stay_rows[s] = stay_frags[i][s]

    # level 0 MECs are all accepting after pruning; seed the iteration
    state = LevelState(k=0, processed=set(), values={}, policy_rows={})
    for s in levels.mec_levels[0]:
        state.processed.add(s)
        state.values[s] = stay_of_state[s]
        state.policy_rows[s] = stay_rows[s]

    lp_stats = []
    for k in range(levels.max_level + 1):
        t_k = levels.transient_levels[k]
        l_next = (
            levels.mec_levels[k + 1] if k + 1 <= levels.max_level else ()
        )
        q = set(t_k) | set(l_next)
        if not q:
            state = LevelState(
                k=k + 1,
                processed=state.processed,
                values=state.values,
                policy_rows=state.policy_rows,
            )
            continue
        boundary = {s: state.values[s] for s in state.processed}
        gamma, objective, var_index = level_lp(pmdp, q, boundary)
        decoded_rows, q_star = decode_policy(pmdp, q, gamma, var_index)
        v_prime = transient_values(pmdp, q, decoded_rows, boundary)
        lp_stats.append(
            {
                "level": k,
                "slice_size": len(q),
                "variables": len(var_index),
                "objective": objective,
                "decoded": len(q_star),
            }
        )
        state = fuse_level(
            state, decoded_rows, v_prime, stay_of_state, stay_rows, t_k, l_next
        )

    # lift the policy back to the original state and action indexing
    full_rows = []
    for s in range(mdp.n):
        row = [0.0] * len(mdp.actions[s])
        if s in remap:
            prow = state.policy_rows[remap[s]]
            for j, a in enumerate(sub.action_map[s]):
                row[a] = prow[j]
        else:
            row[0] = 1.0
        full_rows.append(tuple(row))
    policy = StationaryPolicy(tuple(full_rows))
    chain = induce_chain(mdp, policy)

    value_map: dict[int, float | None] = {}
    for s in range(mdp.n):
        if s in remap:
            v = state.values[remap[s]]
            value_map[s] = None if v is None else v - VALUE_SHIFT
        else:
            value_map[s] = None
    global_rate = sum(
        mdp.initial_dist[s] * value_map[s]
        for s in mdp.initial_support()
    )
    diagnostics = {
        "excluded_states": excluded,
        "num_mecs": len(mecs),
        "num_accepting": sum(1 for m in mecs if m.accepting),
        "max_level": levels.max_level,
        "level_lps": lp_stats,
        "stay_values": [v for v in stay_vals],
        "exact_rate": entropy_rate(chain, chain_structure(chain)),
    }
    return SynthesisResult(
        policy=policy,
        chain=chain,
        value_map=value_map,
        global_rate=float(global_rate),
        diagnostics=diagnostics,
    )
