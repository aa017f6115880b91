"""Five-region grid workspace generator.

A robot moves through five rooms of cells (Region 1 is 7x7, Regions 2-5
are 8x8) connected by one-way corridor cells.  Inside a room the robot
has five deterministic actions (left/right/up/down/stay); a move into a
wall leaves it where it is.  A corridor cell has a single action that
moves the robot forward into the destination room.

Corridor layout (source cell, direction, destination cell):

    Region 1 (6,6) right -> Region 2 (0,2)
    Region 1 (6,0) right -> Region 3 (0,5)
    Region 3 (7,2) right -> Region 5 (0,2)
    Region 5 (0,5) left  -> Region 3 (7,5)
    Region 5 (3,7) up    -> Region 4 (3,0)

This layout yields exactly 310 states, 1379 digraph edges, and 4 maximal
end components (Regions 3 and 5 merge through their corridor pair); the
builder asserts all three counts.  The blue task marks one cell in each
of Regions 3, 4 and 5; the green task marks a single cell in Region 4.

Cells are addressed as (col, row) with (0, 0) in the lower-left corner;
"up" increases the row.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

from .model import Mdp, validate_mdp

REGION_SIZES = {1: 7, 2: 8, 3: 8, 4: 8, 5: 8}
MOVES = {
    "left": (-1, 0),
    "right": (1, 0),
    "up": (0, 1),
    "down": (0, -1),
    "stay": (0, 0),
}
ACTION_ORDER = ("left", "right", "up", "down", "stay")

#: (source region, source cell, redirected action, destination region, cell)
CORRIDORS = (
    (1, (6, 6), "right", 2, (0, 2)),
    (1, (6, 0), "right", 3, (0, 5)),
    (3, (7, 2), "right", 5, (0, 2)),
    (5, (0, 5), "left", 3, (7, 5)),
    (5, (3, 7), "up", 4, (3, 0)),
)

BLUE_CELLS = ((3, (0, 5)), (4, (1, 1)), (5, (0, 2)))
GREEN_CELLS = ((4, (6, 2)),)
INITIAL_CELL = (1, (0, 3))

#: most central cells of an 8x8 room, for policy-uniformity probes
CENTER_CELLS = ((3, 3), (3, 4), (4, 3), (4, 4))
CORNER_CELLS = ((0, 0), (0, 7), (7, 0), (7, 7))


@dataclass(frozen=True)
class Workspace:
    """The workspace MDP plus cell-to-state bookkeeping and target sets."""

    mdp: Mdp
    cell_state: dict[tuple[int, int, int], int]
    corridor_states: dict[tuple[int, int], int]
    blue: frozenset[int]
    green: frozenset[int]

    def region_states(self, region: int) -> list[int]:
        size = REGION_SIZES[region]
        return [
            self.cell_state[(region, c, r)]
            for c in range(size)
            for r in range(size)
        ]

    def target(self, variant: str) -> frozenset[int]:
        if variant == "blue":
            return self.blue
        if variant == "green":
            return self.green
        raise ValueError(f"unknown variant {variant!r}")


def edge_count(mdp: Mdp) -> int:
    """Distinct (source, successor) pairs over all actions."""
    return sum(len(mdp.digraph_successors(s)) for s in range(mdp.n))


def build_workspace() -> Workspace:
    """Construct the workspace MDP and both target sets."""
    names: list[str] = []
    cell_state: dict[tuple[int, int, int], int] = {}
    for region, size in REGION_SIZES.items():
        for col in range(size):
            for row in range(size):
                cell_state[(region, col, row)] = len(names)
                names.append(f"r{region}_{col}_{row}")
    corridor_states: dict[tuple[int, int], int] = {}
    for src, _cell, _direction, dst, _entry in CORRIDORS:
        corridor_states[(src, dst)] = len(names)
        names.append(f"c{src}to{dst}")

    redirect = {
        (src, cell, direction): (src, dst)
        for src, cell, direction, dst, _entry in CORRIDORS
    }
    actions: list[list[str]] = [[] for _ in names]
    transitions: list[list[list[tuple[int, float]]]] = [[] for _ in names]
    for (region, col, row), s in cell_state.items():
        size = REGION_SIZES[region]
        for name in ACTION_ORDER:
            key = (region, (col, row), name)
            if key in redirect:
                t = corridor_states[redirect[key]]
            else:
                dc, dr = MOVES[name]
                nc, nr = col + dc, row + dr
                if 0 <= nc < size and 0 <= nr < size:
                    t = cell_state[(region, nc, nr)]
                else:
                    t = s
            actions[s].append(name)
            transitions[s].append([(t, 1.0)])
    for src, _cell, _direction, dst, entry in CORRIDORS:
        s = corridor_states[(src, dst)]
        actions[s].append("go")
        transitions[s].append([(cell_state[(dst, *entry)], 1.0)])

    init = [0.0] * len(names)
    init[cell_state[(INITIAL_CELL[0], *INITIAL_CELL[1])]] = 1.0
    mdp = validate_mdp(names, actions, transitions, init)

    if mdp.n != 310:
        raise AssertionError(f"workspace has {mdp.n} states, expected 310")
    edges = edge_count(mdp)
    if edges != 1379:
        raise AssertionError(f"workspace has {edges} edges, expected 1379")
    from .graph import mec_decomposition

    mecs = mec_decomposition(mdp)
    if len(mecs) != 4:
        raise AssertionError(f"workspace has {len(mecs)} MECs, expected 4")
    merged = {s for m in mecs for s in m.states if len(m.states) > 100}
    r3 = cell_state[(3, 0, 0)]
    r5 = cell_state[(5, 0, 0)]
    if not (r3 in merged and r5 in merged):
        raise AssertionError("Regions 3 and 5 did not merge into one MEC")

    blue = frozenset(cell_state[(reg, *cell)] for reg, cell in BLUE_CELLS)
    green = frozenset(cell_state[(reg, *cell)] for reg, cell in GREEN_CELLS)
    return Workspace(
        mdp=mdp,
        cell_state=cell_state,
        corridor_states=corridor_states,
        blue=blue,
        green=green,
    )


def heatmap_grids(workspace: Workspace, limit_dist):
    """Per-region grids of 100 * pi(s); ``None`` marks zero-mass cells.

    Returns ``{region: grid}`` with ``grid[row][col]`` ordered so that
    row 0 prints at the top.
    """
    grids = {}
    for region, size in REGION_SIZES.items():
        grid = []
        for row in reversed(range(size)):
            line = []
            for col in range(size):
                p = limit_dist[workspace.cell_state[(region, col, row)]]
                line.append(100.0 * p if p > 0.0 else None)
            grid.append(line)
        grids[region] = grid
    return grids


def export_heatmap(workspace: Workspace, limit_dist, out_path) -> None:
    """Write all region heatmaps into one CSV, blank cells for zero mass."""
    grids = heatmap_grids(workspace, limit_dist)
    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for region in sorted(grids):
            writer.writerow([f"region {region}"])
            for line in grids[region]:
                writer.writerow(
                    ["" if v is None else f"{v:.12g}" for v in line]
                )
            writer.writerow([])
