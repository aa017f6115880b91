"""Graph-structural analysis of MDPs.

Reachability, strongly connected components, maximal end component (MEC)
decomposition, the communicating check, level classification of MEC and
transient states, and the almost-sure winning region for reaching a set of
accepting MECs.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import Mdp, SubMdp


@dataclass(frozen=True)
class Mec:
    """A maximal end component: closed, strongly connected sub-MDP."""

    states: tuple[int, ...]
    action_map: dict[int, tuple[int, ...]]
    accepting: bool = False

    def with_accepting(self, target: set[int]) -> "Mec":
        return Mec(self.states, self.action_map, bool(set(self.states) & target))

    def as_submdp(self, mdp: Mdp) -> SubMdp:
        return SubMdp(parent=mdp, states=self.states, action_map=self.action_map)


@dataclass(frozen=True)
class LevelDecomposition:
    """Partition of states into MEC levels L_k and transient levels T_k."""

    mecs: tuple[Mec, ...]
    mec_levels: tuple[tuple[int, ...], ...]
    transient_levels: tuple[tuple[int, ...], ...]

    @property
    def max_level(self) -> int:
        return len(self.mec_levels) - 1

    def level_of_mec(self, mec_index: int) -> int:
        s0 = self.mecs[mec_index].states[0]
        for k, level in enumerate(self.mec_levels):
            if s0 in level:
                return k
        raise KeyError(mec_index)


def reach_set(mdp: Mdp, s: int) -> set[int]:
    """Forward-reachable states of ``s`` in the union digraph, including ``s``."""
    seen = {s}
    stack = [s]
    while stack:
        u = stack.pop()
        for v in mdp.digraph_successors(u):
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return seen


def _sccs(nodes, successors):
    """Strongly connected components, iterative Tarjan.

    ``successors`` maps a node to an iterable of nodes.  Components are
    returned as lists, each sorted ascending.
    """
    index = {}
    lowlink = {}
    on_stack = set()
    stack = []
    result = []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(successors(root)))]
        index[root] = lowlink[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            node, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = lowlink[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(successors(w))))
                    advanced = True
                    break
                if w in on_stack:
                    lowlink[node] = min(lowlink[node], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[node])
            if lowlink[node] == index[node]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == node:
                        break
                result.append(sorted(comp))
    return result


def mec_decomposition(mdp: Mdp) -> list[Mec]:
    """Maximal end components by iterative SCC refinement.

    Repeatedly split candidate sets into SCCs of the restricted digraph,
    delete actions leaving their SCC and states with emptied action sets,
    until a fixpoint.  MECs are returned in ascending order of their minimal
    state index.
    """
    allowed = {
        s: set(range(len(mdp.actions[s]))) for s in range(mdp.n)
    }
    candidates = [set(range(mdp.n))]
    mecs: list[Mec] = []
    while candidates:
        group = candidates.pop()
        changed = True
        while changed:
            changed = False
            for s in sorted(group):
                keep = set()
                for a in allowed[s]:
                    if all(t in group for t, _ in mdp.transitions[s][a]):
                        keep.add(a)
                if keep != allowed[s]:
                    allowed[s] = keep
                    changed = True
                if not keep:
                    group.discard(s)
                    changed = True
        if not group:
            continue

        def succ(u):
            out = set()
            for a in allowed[u]:
                out.update(t for t, _ in mdp.transitions[u][a])
            return out & group

        comps = _sccs(sorted(group), succ)
        if len(comps) == 1 and set(comps[0]) == group:
            # stable: an end component iff some action remains (and a
            # singleton has a self-loop action)
            states = tuple(sorted(group))
            amap = {s: tuple(sorted(allowed[s])) for s in states}
            if all(amap[s] for s in states):
                mecs.append(Mec(states, amap))
            continue
        for comp in comps:
            comp_set = set(comp)
            if len(comp) == 1:
                s = comp[0]
                self_actions = tuple(
                    sorted(
                        a
                        for a in allowed[s]
                        if all(t == s for t, _ in mdp.transitions[s][a])
                    )
                )
                if self_actions:
                    mecs.append(Mec((s,), {s: self_actions}))
                continue
            candidates.append(comp_set)
    mecs.sort(key=lambda m: m.states[0])
    return mecs


def is_communicating(mdp: Mdp) -> bool:
    """True iff a single MEC covers all states with full action sets."""
    mecs = mec_decomposition(mdp)
    if len(mecs) != 1:
        return False
    mec = mecs[0]
    if len(mec.states) != mdp.n:
        return False
    return all(
        len(mec.action_map[s]) == len(mdp.actions[s]) for s in range(mdp.n)
    )


def classify_levels(mdp: Mdp, mecs: list[Mec]) -> LevelDecomposition:
    """Assign levels to MEC states and transient states.

    Works on the contracted digraph (each MEC a single vertex, transient
    states kept).  A MEC gets level 0 if it reaches no other MEC, otherwise
    one more than the highest level among the other MECs it reaches; a
    transient state gets the highest level among the MECs it reaches.

    The contracted digraph is not acyclic in general: transient states can
    be mutually reachable (every action on the cycle leaks elsewhere), and a
    transient state can share a cycle with a MEC it leaks back into.  Levels
    are therefore computed on the condensation.  Vertices in one component
    are mutually reachable and must be processed together, so a transient
    state sharing a component with a level-k MEC is placed in T_{k-1}, the
    slice processed together with L_k.
    """
    mec_of = {}
    for i, mec in enumerate(mecs):
        for s in mec.states:
            mec_of[s] = i
    n_mecs = len(mecs)
    # contracted vertices: 0..n_mecs-1 for MECs, then transient states
    transient = [s for s in range(mdp.n) if s not in mec_of]
    vert_of = dict(mec_of)
    for i, s in enumerate(transient):
        vert_of[s] = n_mecs + i
    n_vert = n_mecs + len(transient)
    adj = [set() for _ in range(n_vert)]
    for s in range(mdp.n):
        u = vert_of[s]
        for t in mdp.digraph_successors(s):
            v = vert_of[t]
            if u != v:
                adj[u].add(v)

    comps = _sccs(range(n_vert), lambda u: adj[u])
    comp_of = {}
    for ci, comp in enumerate(comps):
        for u in comp:
            comp_of[u] = ci
    comp_adj = [set() for _ in comps]
    for u in range(n_vert):
        for v in adj[u]:
            if comp_of[u] != comp_of[v]:
                comp_adj[comp_of[u]].add(comp_of[v])

    # children-first order of the condensation DAG
    order = []
    seen = [False] * len(comps)
    for start in range(len(comps)):
        if seen[start]:
            continue
        stack = [(start, iter(comp_adj[start]))]
        seen[start] = True
        while stack:
            u, it = stack[-1]
            advanced = False
            for v in it:
                if not seen[v]:
                    seen[v] = True
                    stack.append((v, iter(comp_adj[v])))
                    advanced = True
                    break
            if not advanced:
                order.append(stack.pop()[0])

    # best_below[c]: highest MEC level strictly reachable from component c
    best_below = [-1] * len(comps)
    comp_level = [-1] * len(comps)  # MEC level of components holding MECs
    for c in order:
        below = -1
        for d in comp_adj[c]:
            below = max(below, best_below[d], comp_level[d])
        best_below[c] = below
        if any(u < n_mecs for u in comps[c]):
            comp_level[c] = below + 1

    mec_level = [comp_level[comp_of[i]] for i in range(n_mecs)]
    max_level = max(mec_level, default=0)

    mec_levels = [[] for _ in range(max_level + 1)]
    for i, mec in enumerate(mecs):
        mec_levels[mec_level[i]].extend(mec.states)
    transient_levels = [[] for _ in range(max_level + 1)]
    for s in transient:
        c = comp_of[vert_of[s]]
        if comp_level[c] >= 0:
            # cycles with a MEC of level k: evaluate in the same slice
            transient_levels[comp_level[c] - 1].append(s)
        else:
            transient_levels[best_below[c]].append(s)
    return LevelDecomposition(
        mecs=tuple(mecs),
        mec_levels=tuple(tuple(sorted(v)) for v in mec_levels),
        transient_levels=tuple(tuple(sorted(v)) for v in transient_levels),
    )


def almost_sure_winning(mdp: Mdp, amecs: list[Mec]) -> set[int]:
    """States from which some policy reaches the accepting MECs w.p. 1."""
    return _winning_region(mdp, amecs)[0]


def _winning_region(mdp: Mdp, amecs: list[Mec]):
    """Winning state set plus the action restriction that realizes it.

    Iteratively deletes states that cannot reach the accepting union and
    actions that leak into deleted states, until a fixpoint.
    """
    target = set()
    for mec in amecs:
        target.update(mec.states)
    alive = set(range(mdp.n))
    allowed = {s: set(range(len(mdp.actions[s]))) for s in range(mdp.n)}
    while alive:
        # drop actions that leak out of the current set, then emptied states
        changed = True
        while changed:
            changed = False
            for s in list(alive):
                keep = {
                    a
                    for a in allowed[s]
                    if all(t in alive for t, _ in mdp.transitions[s][a])
                }
                if keep != allowed[s]:
                    allowed[s] = keep
                    changed = True
                if not keep:
                    alive.discard(s)
                    changed = True
        # backward reachability of the target within the restriction
        pred = {s: set() for s in alive}
        for s in alive:
            for a in allowed[s]:
                for t, _ in mdp.transitions[s][a]:
                    pred[t].add(s)
        can_reach = target & alive
        frontier = list(can_reach)
        while frontier:
            t = frontier.pop()
            for s in pred[t]:
                if s not in can_reach:
                    can_reach.add(s)
                    frontier.append(s)
        if can_reach == alive:
            break
        alive = can_reach
    action_map = {s: tuple(sorted(allowed[s])) for s in alive}
    return alive, action_map


def contracted_dot(mdp: Mdp, decomposition: LevelDecomposition) -> str:
    """DOT rendering of the contracted level graph."""
    mecs = decomposition.mecs
    mec_of = {}
    for i, mec in enumerate(mecs):
        for s in mec.states:
            mec_of[s] = i
    lines = ["digraph levels {"]
    for i, mec in enumerate(mecs):
        names = ",".join(mdp.state_names[s] for s in mec.states)
        level = decomposition.level_of_mec(i)
        lines.append(
            f'  mec{i} [shape=box, label="MEC{i} L{level}\\n{{{names}}}"];'
        )
    transient = [
        s for level in decomposition.transient_levels for s in level
    ]
    for s in transient:
        lines.append(f'  s{s} [label="{mdp.state_names[s]}"];')
    edges = set()
    for s in range(mdp.n):
        u = f"mec{mec_of[s]}" if s in mec_of else f"s{s}"
        for t in mdp.digraph_successors(s):
            v = f"mec{mec_of[t]}" if t in mec_of else f"s{t}"
            if u != v:
                edges.add((u, v))
    for u, v in sorted(edges):
        lines.append(f"  {u} -> {v};")
    lines.append("}")
    return "\n".join(lines) + "\n"
