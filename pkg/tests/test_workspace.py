"""Workspace generator structure and exports."""

import numpy as np
import pytest

from entrate.chains import limit_distribution
from entrate.constrained import SurveillanceProblem, synthesize
from entrate.graph import mec_decomposition
from entrate.workspace import (
    REGION_SIZES,
    build_workspace,
    edge_count,
    export_heatmap,
    heatmap_grids,
)


@pytest.fixture(scope="module")
def ws():
    return build_workspace()


def test_counts(ws):
    assert ws.mdp.n == 310
    assert edge_count(ws.mdp) == 1379


def test_mec_structure(ws):
    mecs = mec_decomposition(ws.mdp)
    assert len(mecs) == 4
    sizes = sorted(len(m.states) for m in mecs)
    assert sizes == [49, 64, 64, 130]
    merged = next(m for m in mecs if len(m.states) == 130)
    r3 = {ws.cell_state[(3, c, r)] for c in range(8) for r in range(8)}
    r5 = {ws.cell_state[(5, c, r)] for c in range(8) for r in range(8)}
    assert r3 <= set(merged.states) and r5 <= set(merged.states)


def test_region_actions_and_walls(ws):
    mdp = ws.mdp
    s = ws.cell_state[(2, 0, 0)]  # a corner of region 2
    assert mdp.actions[s] == ("left", "right", "up", "down", "stay")
    by_name = dict(zip(mdp.actions[s], mdp.transitions[s]))
    assert by_name["left"] == ((s, 1.0),)  # wall
    assert by_name["down"] == ((s, 1.0),)  # wall
    assert by_name["right"] == ((ws.cell_state[(2, 1, 0)], 1.0),)
    assert by_name["up"] == ((ws.cell_state[(2, 0, 1)], 1.0),)


def test_corridors_one_way(ws):
    mdp = ws.mdp
    c = ws.corridor_states[(1, 2)]
    assert mdp.actions[c] == ("go",)
    dest = mdp.transitions[c][0][0][0]
    assert dest == ws.cell_state[(2, 0, 2)]
    # nothing in region 2 leads back out
    r2 = set(ws.region_states(2))
    for s in r2:
        assert mdp.digraph_successors(s) <= r2


def test_targets(ws):
    assert len(ws.blue) == 3
    assert len(ws.green) == 1
    regions = set()
    inv = {v: k for k, v in ws.cell_state.items()}
    for s in ws.blue:
        regions.add(inv[s][0])
    assert regions == {3, 4, 5}
    assert inv[next(iter(ws.green))][0] == 4


def test_heatmap_sums_and_blanks(ws):
    result = synthesize(SurveillanceProblem(ws.mdp, ws.green))
    pi = limit_distribution(result.chain)
    grids = heatmap_grids(ws, pi)
    total = sum(
        v for g in grids.values() for line in g for v in line if v is not None
    )
    # corridor states carry no mass here, so region cells hold everything
    assert total == pytest.approx(100.0, abs=1e-6)
    for region in (1, 2, 3, 5):
        assert all(v is None for line in grids[region] for v in line)
    assert any(v is not None for line in grids[4] for v in line)


def test_export_heatmap_file(tmp_path, ws):
    result = synthesize(SurveillanceProblem(ws.mdp, ws.green))
    pi = limit_distribution(result.chain)
    out = tmp_path / "heat.csv"
    export_heatmap(ws, pi, out)
    text = out.read_text()
    assert "region 4" in text
    rows = [l for l in text.splitlines() if l and not l.startswith("region")]
    sizes = sorted(REGION_SIZES.values())
    assert len(rows) == sum(REGION_SIZES.values())


def test_initial_state_in_region_one(ws):
    support = ws.mdp.initial_support()
    assert len(support) == 1
    assert support[0] == ws.cell_state[(1, 0, 3)]
