"""Entropy-rate maximization for communicating MDPs.

Solves the occupation-measure program and decodes a stationary policy
whose induced chain attains the optimum.  The optimal induced chain is
irreducible, so every state carries occupation mass and the decode
mu(s, a) = gamma(s, a) / sum_a gamma(s, a) is well defined.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chains import ChainStructure, chain_structure, entropy_rate
from .errors import DegenerateOccupation
from .model import MarkovChain, Mdp, StationaryPolicy, induce_chain
from .solvers import ENTROPY_TOL, EntropyProgram, solve_entropy_program

#: occupation mass below this at some state means the solve degenerated
OCCUPATION_FLOOR = 1e-12


@dataclass(frozen=True)
class CommunicatingSolution:
    """Optimal policy for a communicating MDP plus its induced chain data."""

    policy: StationaryPolicy
    chain: MarkovChain
    structure: ChainStructure
    entropy_rate: float
    occupation: np.ndarray


def decode_policy_from_occupation(
    mdp: Mdp, prog: EntropyProgram, gamma: np.ndarray
) -> StationaryPolicy:
    """Normalize per-state occupation rows into a stationary policy."""
    rows = []
    for s in range(mdp.n):
        g = np.array(
            [gamma[prog.var_index[(s, a)]] for a in range(len(mdp.actions[s]))]
        )
        total = g.sum()
        if total <= OCCUPATION_FLOOR:
            raise DegenerateOccupation(s)
        rows.append(tuple((g / total).tolist()))
    return StationaryPolicy(tuple(rows))


def max_entropy_rate_policy(
    mdp: Mdp, tol: float = ENTROPY_TOL
) -> CommunicatingSolution:
    """Synthesize a stationary policy maximizing the entropy rate.

    The MDP must be communicating.  A degenerate occupation vector (zero
    mass at some state, which the theory rules out at the optimum) triggers
    one retry at a tighter solve tolerance before raising
    :class:`DegenerateOccupation`.
    """
    gamma, _value = solve_entropy_program(mdp, tol)
    prog = EntropyProgram(mdp)
    try:
        policy = decode_policy_from_occupation(mdp, prog, gamma)
    except DegenerateOccupation:
        gamma, _value = solve_entropy_program(mdp, tol * 1e-3)
        policy = decode_policy_from_occupation(mdp, prog, gamma)
    chain = induce_chain(mdp, policy)
    structure = chain_structure(chain)
    return CommunicatingSolution(
        policy=policy,
        chain=chain,
        structure=structure,
        entropy_rate=entropy_rate(chain, structure),
        occupation=gamma,
    )
