"""Plain-text formats for MDPs, target sets, and policies.

The MDP format is line-based and strict; the parser reports every
problem with its line number and never coerces silently.

    # comment (blank lines ignored)
    states: s0 s1 s2
    init: s0=0.5 s2=0.5
    target: s1 s2            # optional
    action: s0 a s1=0.25 s2=0.75
    action: s1 b s1=1

Each ``action:`` line declares one action of one state with its successor
distribution.  Probabilities are decimal literals; rows must sum to 1
within 1e-9.  State and action names may not contain whitespace, '=',
'#' or ':'.

The policy format mirrors it:

    policy: s0 a=0.5 b=0.5
    policy: s1 b=1
"""

from __future__ import annotations

from .errors import EntrateError, ValidationError
from .model import Mdp, StationaryPolicy, validate_mdp

_FORBIDDEN = set("=#:")


class ParseError(EntrateError):
    """Input file rejected; message carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


def _check_name(name: str, line_no: int, kind: str) -> str:
    if not name or any(ch in _FORBIDDEN or ch.isspace() for ch in name):
        raise ParseError(line_no, f"invalid {kind} name {name!r}")
    return name


def _parse_prob(text: str, line_no: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ParseError(line_no, f"malformed probability {text!r}") from None
    if not 0.0 <= value <= 1.0:
        raise ParseError(line_no, f"probability {text} outside [0, 1]")
    return value


def _split_pairs(tokens, line_no):
    pairs = []
    for tok in tokens:
        if "=" not in tok:
            raise ParseError(line_no, f"expected name=prob, got {tok!r}")
        name, _, prob = tok.partition("=")
        pairs.append((name, _parse_prob(prob, line_no)))
    return pairs


def _logical_lines(text: str):
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield line_no, line


def parse_mdp(text: str):
    """Parse the MDP format.  Returns ``(Mdp, target or None)``."""
    state_names: list[str] | None = None
    init_pairs = None
    target_names = None
    action_lines: list[tuple[int, str, str, list]] = []
    states_line = init_line = 0
    for line_no, line in _logical_lines(text):
        key, _, rest = line.partition(":")
        key = key.strip()
        tokens = rest.split()
        if key == "states":
            if state_names is not None:
                raise ParseError(line_no, "duplicate states: line")
            if not tokens:
                raise ParseError(line_no, "states: line lists no states")
            state_names = [_check_name(t, line_no, "state") for t in tokens]
            states_line = line_no
        elif key == "init":
            if init_pairs is not None:
                raise ParseError(line_no, "duplicate init: line")
            init_pairs = _split_pairs(tokens, line_no)
            init_line = line_no
        elif key == "target":
            if target_names is not None:
                raise ParseError(line_no, "duplicate target: line")
            target_names = [(line_no, t) for t in tokens]
        elif key == "action":
            if len(tokens) < 3:
                raise ParseError(
                    line_no, "action: needs a state, a name and successors"
                )
            state, action = tokens[0], _check_name(tokens[1], line_no, "action")
            action_lines.append(
                (line_no, state, action, _split_pairs(tokens[2:], line_no))
            )
        else:
            raise ParseError(line_no, f"unknown directive {key!r}")

    if state_names is None:
        raise ParseError(1, "missing states: line")
    if init_pairs is None:
        raise ParseError(1, "missing init: line")
    index = {name: i for i, name in enumerate(state_names)}
    if len(index) != len(state_names):
        raise ParseError(states_line, "duplicate state names")

    actions: list[list[str]] = [[] for _ in state_names]
    transitions: list[list[list[tuple[int, float]]]] = [[] for _ in state_names]
    for line_no, state, action, pairs in action_lines:
        if state not in index:
            raise ParseError(line_no, f"unknown state {state!r}")
        s = index[state]
        if action in actions[s]:
            raise ParseError(
                line_no, f"duplicate action {action!r} at state {state}"
            )
        row = []
        for succ, p in pairs:
            if succ not in index:
                raise ParseError(line_no, f"unknown successor {succ!r}")
            row.append((index[succ], p))
        if abs(sum(p for _, p in row) - 1.0) > 1e-9:
            raise ParseError(
                line_no,
                f"distribution for {state}/{action} sums to "
                f"{sum(p for _, p in row)!r}",
            )
        actions[s].append(action)
        transitions[s].append(row)

    init = [0.0] * len(state_names)
    for name, p in init_pairs:
        if name not in index:
            raise ParseError(init_line, f"unknown initial state {name!r}")
        init[index[name]] += p

    target = None
    if target_names is not None:
        target = set()
        for line_no, name in target_names:
            if name not in index:
                raise ParseError(line_no, f"unknown target state {name!r}")
            target.add(index[name])
        if not target:
            raise ParseError(1, "target: line lists no states")

    try:
        mdp = validate_mdp(state_names, actions, transitions, init)
    except ValidationError as exc:
        raise ParseError(0, str(exc)) from exc
    return mdp, target


def format_mdp(mdp: Mdp, target=None) -> str:
    """Render an Mdp (and optional target set) in the MDP format."""
    lines = ["states: " + " ".join(mdp.state_names)]
    init = " ".join(
        f"{mdp.state_names[s]}={mdp.initial_dist[s]:.12g}"
        for s in mdp.initial_support()
    )
    lines.append("init: " + init)
    if target:
        lines.append(
            "target: " + " ".join(mdp.state_names[s] for s in sorted(target))
        )
    for s in range(mdp.n):
        for a, name in enumerate(mdp.actions[s]):
            succ = " ".join(
                f"{mdp.state_names[t]}={p:.12g}"
                for t, p in mdp.transitions[s][a]
            )
            lines.append(f"action: {mdp.state_names[s]} {name} {succ}")
    return "\n".join(lines) + "\n"


def parse_target(text: str, mdp: Mdp) -> set[int]:
    """Parse a standalone target file: one or more ``target:`` lines."""
    target: set[int] = set()
    seen = False
    for line_no, line in _logical_lines(text):
        key, _, rest = line.partition(":")
        if key.strip() != "target":
            raise ParseError(line_no, f"expected target:, got {key.strip()!r}")
        seen = True
        for name in rest.split():
            try:
                target.add(mdp.state_index(name))
            except KeyError:
                raise ParseError(
                    line_no, f"unknown target state {name!r}"
                ) from None
    if not seen or not target:
        raise ParseError(1, "no target states given")
    return target


def parse_policy(text: str, mdp: Mdp) -> StationaryPolicy:
    """Parse the policy format against a given MDP."""
    rows: dict[int, list[float]] = {}
    for line_no, line in _logical_lines(text):
        key, _, rest = line.partition(":")
        if key.strip() != "policy":
            raise ParseError(line_no, f"expected policy:, got {key.strip()!r}")
        tokens = rest.split()
        if len(tokens) < 2:
            raise ParseError(line_no, "policy: needs a state and actions")
        try:
            s = mdp.state_index(tokens[0])
        except KeyError:
            raise ParseError(
                line_no, f"unknown state {tokens[0]!r}"
            ) from None
        if s in rows:
            raise ParseError(line_no, f"duplicate policy row for {tokens[0]}")
        row = [0.0] * len(mdp.actions[s])
        for name, p in _split_pairs(tokens[1:], line_no):
            try:
                row[mdp.action_index(s, name)] += p
            except KeyError:
                raise ParseError(
                    line_no,
                    f"action {name!r} not available at {tokens[0]}",
                ) from None
        if abs(sum(row) - 1.0) > 1e-9:
            raise ParseError(
                line_no, f"policy row for {tokens[0]} sums to {sum(row)!r}"
            )
        rows[s] = row
    missing = [mdp.state_names[s] for s in range(mdp.n) if s not in rows]
    if missing:
        raise ParseError(1, f"missing policy rows for: {' '.join(missing)}")
    policy = StationaryPolicy(tuple(tuple(rows[s]) for s in range(mdp.n)))
    policy.validate(mdp)
    return policy


def format_policy(mdp: Mdp, policy: StationaryPolicy) -> str:
    """Render a policy in the policy format."""
    lines = []
    for s in range(mdp.n):
        entries = " ".join(
            f"{mdp.actions[s][a]}={p:.12g}"
            for a, p in enumerate(policy.rows[s])
            if p > 0.0
        )
        lines.append(f"policy: {mdp.state_names[s]} {entries}")
    return "\n".join(lines) + "\n"
