"""Static figure rendering for workspace reports.

Renders the same per-region grids that the CSV exports contain, so a
report directory carries both a machine-readable and a glanceable view.
Uses the Agg backend only; nothing here opens a window.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .workspace import REGION_SIZES, Workspace, heatmap_grids


def _grid_array(grid):
    size = len(grid)
    arr = np.full((size, size), np.nan)
    for i, line in enumerate(grid):
        for j, v in enumerate(line):
            if v is not None:
                arr[i, j] = v
    return arr


def render_heatmap_png(workspace: Workspace, limit_dist, out_path) -> None:
    """One panel per region showing 100 * pi(s); empty cells are blank."""
    grids = heatmap_grids(workspace, limit_dist)
    fig, axes = plt.subplots(1, len(grids), figsize=(3 * len(grids), 3.2))
    vals = [v for g in grids.values() for line in g for v in line if v]
    vmax = max(vals) if vals else 1.0
    for ax, region in zip(np.atleast_1d(axes), sorted(grids)):
        arr = _grid_array(grids[region])
        ax.imshow(arr, cmap="viridis", vmin=0.0, vmax=vmax)
        ax.set_title(f"Region {region}")
        ax.set_xticks([])
        ax.set_yticks([])
    fig.suptitle("Limit distribution (x100)")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def render_spread_png(workspace: Workspace, policy, region, out_path) -> None:
    """Per-cell max-minus-min action probability for one region."""
    size = REGION_SIZES[region]
    arr = np.zeros((size, size))
    for col in range(size):
        for row in range(size):
            s = workspace.cell_state[(region, col, row)]
            probs = policy.rows[s]
            arr[size - 1 - row, col] = max(probs) - min(probs)
    fig, ax = plt.subplots(figsize=(4, 4))
    im = ax.imshow(arr, cmap="magma")
    fig.colorbar(im, ax=ax, shrink=0.8)
    ax.set_title(f"Action-probability spread, Region {region}")
    ax.set_xticks([])
    ax.set_yticks([])
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
