"""LP wrapper and the entropy-rate program."""

import numpy as np
import pytest

from entrate.errors import Infeasible, NotCommunicating, Unbounded
from entrate.solvers import (
    EntropyProgram,
    LinearProgram,
    solve_entropy_program,
    solve_lp,
)

from oracles import complete_mdp, fig1_mdp, oracle_unconstrained, random_communicating_mdp


def test_solve_lp_basic():
    # max x + 2y st x + y <= 1
    lp = LinearProgram(
        c=np.array([1.0, 2.0]),
        a_ub=np.array([[1.0, 1.0]]),
        b_ub=np.array([1.0]),
    )
    x, obj = solve_lp(lp)
    assert obj == pytest.approx(2.0)
    assert np.allclose(x, [0.0, 1.0])


def test_solve_lp_infeasible_and_unbounded():
    with pytest.raises(Infeasible):
        solve_lp(
            LinearProgram(
                c=np.array([1.0]),
                a_ub=np.array([[-1.0]]),
                b_ub=np.array([-2.0]),
                a_eq=np.array([[1.0]]),
                b_eq=np.array([1.0]),
            )
        )
    with pytest.raises(Unbounded):
        solve_lp(LinearProgram(c=np.array([1.0])))


def test_entropy_program_complete():
    gamma, value = solve_entropy_program(complete_mdp(4))
    assert value == pytest.approx(2.0, abs=1e-5)
    prog = EntropyProgram(complete_mdp(4))
    flow, norm, neg = prog.constraint_residuals(gamma)
    assert flow < 1e-9 and norm < 1e-9 and neg == 0.0


def test_entropy_program_requires_communicating():
    with pytest.raises(NotCommunicating):
        solve_entropy_program(fig1_mdp())


def test_entropy_program_single_state():
    mdp = complete_mdp(1)
    gamma, value = solve_entropy_program(mdp)
    assert value == pytest.approx(0.0, abs=1e-9)
    assert gamma.sum() == pytest.approx(1.0)


def test_entropy_program_matches_grid_oracle():
    rng = np.random.default_rng(21)
    for _ in range(5):
        mdp = random_communicating_mdp(rng, int(rng.integers(2, 4)))
        _, value = solve_entropy_program(mdp)
        oracle = oracle_unconstrained(mdp, step=0.02)
        assert value == pytest.approx(oracle, abs=5e-3)


def test_objective_value_consistency():
    mdp = complete_mdp(3)
    prog = EntropyProgram(mdp)
    gamma, value = solve_entropy_program(mdp)
    assert prog.objective_value(gamma) == pytest.approx(value, abs=1e-9)
