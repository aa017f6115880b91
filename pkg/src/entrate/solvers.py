"""Optimization kernels: a generic LP interface and the entropy-rate program.

The LP side delegates to HiGHS (via scipy), which returns vertex (basic)
solutions as the policy-decoding step requires.  The entropy-rate program
for a communicating MDP is the concave maximization over state-action
occupation variables gamma(s, a):

    max  sum_{s,t} -q(s,t) log2(q(s,t) / lambda(s))
    s.t. q(s,t)    = sum_a gamma(s,a) P(t|s,a)
         lambda(s) = sum_a gamma(s,a)
         lambda(t) = sum_s q(s,t)
         sum_s lambda(s) = 1,  gamma >= 0

It is formulated here explicitly and handed to an exponential-cone solver
through cvxpy.  The returned point is then projected onto the exact
feasible set by a policy round-trip (decode the policy, recompute its exact
stationary distribution, rebuild gamma), so the reported occupation
measure satisfies the stationarity constraints to linear-solve precision
and the reported objective is the exact entropy rate of the induced chain.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import cvxpy as cp
from scipy import optimize, sparse

from .chains import chain_structure, entropy_rate
from .errors import (
    Infeasible,
    NoConvergence,
    NotCommunicating,
    Unbounded,
)
from .graph import is_communicating
from .model import Mdp, StationaryPolicy, induce_chain

LP_FEAS_TOL = 1e-8
LP_OPT_TOL = 1e-7
ENTROPY_TOL = 1e-6
LOG2 = np.log(2.0)


@dataclass
class LinearProgram:
    """Maximization LP with nonnegative variables.

    ``a_ub x <= b_ub`` and ``a_eq x = b_eq``; objective is ``max c . x``.
    """

    c: np.ndarray
    a_ub: sparse.spmatrix | np.ndarray | None = None
    b_ub: np.ndarray | None = None
    a_eq: sparse.spmatrix | np.ndarray | None = None
    b_eq: np.ndarray | None = None


def solve_lp(lp: LinearProgram, feas_tol: float = LP_FEAS_TOL, opt_tol: float = LP_OPT_TOL):
    """Solve an LP to a basic optimal solution.

    Returns ``(x, objective)``.  Raises :class:`Infeasible` or
    :class:`Unbounded`, both of which indicate a caller bug here since all
    in-package LPs are feasible and bounded by construction.
    """
    res = optimize.linprog(
        -np.asarray(lp.c, dtype=float),
        A_ub=lp.a_ub,
        b_ub=lp.b_ub,
        A_eq=lp.a_eq,
        b_eq=lp.b_eq,
        bounds=(0, None),
        method="highs",
        options={
            "primal_feasibility_tolerance": feas_tol * 1e-1,
            "dual_feasibility_tolerance": opt_tol * 1e-1,
        },
    )
    if res.status == 2:
        raise Infeasible(res.message)
    if res.status == 3:
        raise Unbounded(res.message)
    if res.status != 0:
        raise NoConvergence(f"LP solver failure: {res.message}")
    return np.asarray(res.x, dtype=float), float(-res.fun)


@dataclass
class EntropyProgram:
    """Index structure of the entropy-rate program for one MDP."""

    mdp: Mdp
    pairs: list[tuple[int, int]] = field(default_factory=list)
    var_index: dict[tuple[int, int], int] = field(default_factory=dict)
    qpairs: list[tuple[int, int]] = field(default_factory=list)

    def __post_init__(self):
        m = self.mdp
        for s in range(m.n):
            for a in range(len(m.actions[s])):
                self.var_index[(s, a)] = len(self.pairs)
                self.pairs.append((s, a))
        seen = set()
        for s in range(m.n):
            for a in range(len(m.actions[s])):
                for t, _ in m.transitions[s][a]:
                    if (s, t) not in seen:
                        seen.add((s, t))
                        self.qpairs.append((s, t))
        self.qpairs.sort()

    def objective_value(self, gamma: np.ndarray) -> float:
        """Exact objective (bits/step) at an occupation vector."""
        m = self.mdp
        lam = np.zeros(m.n)
        q: dict[tuple[int, int], float] = {}
        for (s, a), idx in self.var_index.items():
            g = gamma[idx]
            if g <= 0.0:
                continue
            lam[s] += g
            for t, p in m.transitions[s][a]:
                q[(s, t)] = q.get((s, t), 0.0) + g * p
        total = 0.0
        for (s, _t), val in q.items():
            if val > 0.0 and lam[s] > 0.0:
                total -= val * np.log2(val / lam[s])
        return total

    def constraint_residuals(self, gamma: np.ndarray):
        """Max violations of (flow balance, normalization, nonnegativity)."""
        m = self.mdp
        lam = np.zeros(m.n)
        inflow = np.zeros(m.n)
        for (s, a), idx in self.var_index.items():
            g = gamma[idx]
            lam[s] += g
            for t, p in m.transitions[s][a]:
                inflow[t] += g * p
        return (
            float(np.max(np.abs(lam - inflow))),
            abs(float(lam.sum()) - 1.0),
            float(max(0.0, -gamma.min())) if gamma.size else 0.0,
        )


def _conic_solve(prog: EntropyProgram, tol: float):
    m = prog.mdp
    nv = len(prog.pairs)
    nq = len(prog.qpairs)
    qpair_index = {pt: i for i, pt in enumerate(prog.qpairs)}

    # sparse maps gamma -> q and gamma -> lambda
    rows_q, cols_q, vals_q = [], [], []
    rows_l, cols_l = [], []
    for (s, a), idx in prog.var_index.items():
        rows_l.append(s)
        cols_l.append(idx)
        for t, p in m.transitions[s][a]:
            rows_q.append(qpair_index[(s, t)])
            cols_q.append(idx)
            vals_q.append(p)
    q_map = sparse.csr_matrix((vals_q, (rows_q, cols_q)), shape=(nq, nv))
    l_map = sparse.csr_matrix(
        (np.ones(len(rows_l)), (rows_l, cols_l)), shape=(m.n, nv)
    )
    # q -> inflow per target state
    rows_f = [t for (_s, t) in prog.qpairs]
    f_map = sparse.csr_matrix(
        (np.ones(nq), (rows_f, range(nq))), shape=(m.n, nq)
    )
    src_of_pair = [s for (s, _t) in prog.qpairs]

    gamma = cp.Variable(nv, nonneg=True)
    q = q_map @ gamma
    lam = l_map @ gamma
    objective = cp.Maximize(-cp.sum(cp.rel_entr(q, lam[src_of_pair])) / LOG2)
    constraints = [f_map @ q == lam, cp.sum(lam) == 1]
    problem = cp.Problem(objective, constraints)
    try:
        problem.solve(solver=cp.CLARABEL)
    except cp.SolverError as exc:
        raise NoConvergence(f"conic solve failed: {exc}") from exc
    if problem.status not in ("optimal", "optimal_inaccurate"):
        raise NoConvergence(f"conic solve ended with status {problem.status}")
    g = np.asarray(gamma.value, dtype=float)
    g = np.clip(g, 0.0, None)
    total = g.sum()
    if total <= 0:
        raise NoConvergence("conic solve returned a zero occupation vector")
    return g / total, float(problem.value)


def solve_entropy_program(mdp: Mdp, tol: float = ENTROPY_TOL):
    """Maximize the entropy rate of a communicating MDP over occupations.

    Returns ``(gamma, objective)`` where ``gamma`` is indexed as in
    :class:`EntropyProgram` and satisfies the stationarity constraints to
    high precision; the objective equals the entropy rate of the MDP in
    bits per step.
    """
    if not is_communicating(mdp):
        raise NotCommunicating("entropy program requires a communicating MDP")
    prog = EntropyProgram(mdp)
    gamma, conic_obj = _conic_solve(prog, tol)

    projected = _project_by_roundtrip(prog, gamma)
    if projected is not None:
        gamma_rt, obj_rt = projected
        # keep the round-tripped point unless it lost more than the
        # certification tolerance relative to the solver's own value
        if obj_rt >= conic_obj - tol:
            return gamma_rt, obj_rt
    flow, norm, neg = prog.constraint_residuals(gamma)
    if max(flow, norm, neg) > 1e-8:
        raise NoConvergence(
            "entropy program solution violates constraints",
            residuals=(flow, norm, neg),
        )
    return gamma, prog.objective_value(gamma)


def _project_by_roundtrip(prog: EntropyProgram, gamma: np.ndarray):
    """Decode a policy from gamma and rebuild gamma from its exact stationary.

    Returns ``None`` when the decoded chain is not irreducible (possible
    only for near-degenerate solver output); callers then fall back to the
    raw conic point.
    """
    m = prog.mdp
    rows = []
    for s in range(m.n):
        g = np.array(
            [gamma[prog.var_index[(s, a)]] for a in range(len(m.actions[s]))]
        )
        total = g.sum()
        if total <= 0.0:
            return None
        rows.append(tuple((g / total).tolist()))
    policy = StationaryPolicy(tuple(rows))
    mc = induce_chain(m, policy)
    st = chain_structure(mc)
    if st.num_classes != 1 or len(st.recurrent_classes[0]) != m.n:
        return None
    pi = st.stationaries[0]
    out = np.zeros_like(gamma)
    for (s, a), idx in prog.var_index.items():
        out[idx] = pi[s] * policy.rows[s][a]
    return out, entropy_rate(mc, st)
