"""Exception types shared across the package."""

from __future__ import annotations


class EntrateError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(EntrateError):
    """Raised when an MDP description violates a structural invariant.

    Carries *every* violation found, not just the first.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class DimensionMismatch(EntrateError):
    """Policy or vector indexed against a different state set."""


class NotClosed(EntrateError):
    """A sub-MDP restriction has an action escaping the state subset."""

    def __init__(self, state, action, escape):
        self.state = state
        self.action = action
        self.escape = escape
        super().__init__(
            f"action {action!r} at state {state} leaves the subset via {escape}"
        )


class EmptyActionSet(EntrateError):
    """A state in a sub-MDP restriction was left with no actions."""

    def __init__(self, state):
        self.state = state
        super().__init__(f"state {state} has an empty action set")


class SingularSolve(EntrateError):
    """A linear solve that theory guarantees nonsingular failed numerically."""


class Infeasible(EntrateError):
    """LP reported infeasible; signals a caller bug in this codebase."""


class Unbounded(EntrateError):
    """LP reported unbounded; signals a caller bug in this codebase."""


class NotCommunicating(EntrateError):
    """Operation requires a communicating MDP."""


class NoConvergence(EntrateError):
    """Convex solve failed to reach the requested tolerance."""

    def __init__(self, message, iterations=None, residuals=None):
        self.iterations = iterations
        self.residuals = residuals
        super().__init__(message)


class DegenerateOccupation(EntrateError):
    """Occupation mass vanished at a state where theory forbids it."""

    def __init__(self, state):
        self.state = state
        super().__init__(f"occupation measure vanished at state {state}")


class NoFeasiblePolicy(EntrateError):
    """No policy satisfies the surveillance task from the initial states."""

    def __init__(self, bad_initial_states):
        self.bad_initial_states = list(bad_initial_states)
        super().__init__(
            "surveillance task unachievable from initial states "
            f"{self.bad_initial_states}"
        )
