"""Entropy-rate maximizing policy synthesis for finite MDPs.

Synthesizes stationary policies that make an agent's long-run behavior as
unpredictable as possible (maximal entropy rate of the induced Markov
chain), optionally subject to visiting a target set infinitely often with
probability one.
"""

from .chains import (
    ChainStructure,
    chain_structure,
    entropy_of,
    entropy_rate,
    huffman_weight,
    limit_distribution,
    local_entropy,
    observation_cost,
    probe_cost,
    probe_weight,
)
from .constrained import SurveillanceProblem, SynthesisResult, synthesize
from .errors import (
    DegenerateOccupation,
    DimensionMismatch,
    EmptyActionSet,
    EntrateError,
    Infeasible,
    NoConvergence,
    NoFeasiblePolicy,
    NotClosed,
    NotCommunicating,
    SingularSolve,
    Unbounded,
    ValidationError,
)
from .graph import (
    LevelDecomposition,
    Mec,
    almost_sure_winning,
    classify_levels,
    is_communicating,
    mec_decomposition,
)
from .model import (
    MarkovChain,
    Mdp,
    StationaryPolicy,
    SubMdp,
    induce_chain,
    restrict,
    validate_mdp,
)
from .simulate import (
    TrajectoryBatch,
    empirical_entropy_rate,
    sample_paths,
    surveillance_monitor,
)
from .solvers import solve_entropy_program
from .unconstrained import CommunicatingSolution, max_entropy_rate_policy
from .workspace import Workspace, build_workspace

__all__ = [
    "ChainStructure",
    "chain_structure",
    "entropy_of",
    "entropy_rate",
    "huffman_weight",
    "limit_distribution",
    "local_entropy",
    "observation_cost",
    "probe_cost",
    "probe_weight",
    "SurveillanceProblem",
    "SynthesisResult",
    "synthesize",
    "DegenerateOccupation",
    "DimensionMismatch",
    "EmptyActionSet",
    "EntrateError",
    "Infeasible",
    "NoConvergence",
    "NoFeasiblePolicy",
    "NotClosed",
    "NotCommunicating",
    "SingularSolve",
    "Unbounded",
    "ValidationError",
    "LevelDecomposition",
    "Mec",
    "almost_sure_winning",
    "classify_levels",
    "is_communicating",
    "mec_decomposition",
    "MarkovChain",
    "Mdp",
    "StationaryPolicy",
    "SubMdp",
    "induce_chain",
    "restrict",
    "validate_mdp",
    "TrajectoryBatch",
    "empirical_entropy_rate",
    "sample_paths",
    "surveillance_monitor",
    "solve_entropy_program",
    "CommunicatingSolution",
    "max_entropy_rate_policy",
    "Workspace",
    "build_workspace",
]

__version__ = "0.1.0"
