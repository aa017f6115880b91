"""Command-line interface.

Exit codes: 0 success, 2 input error, 3 infeasible task, 4 solver
failure.  All numeric output is printed with 12 significant digits.  Set
ENTRATE_LOG=debug (or info/warning) to adjust log verbosity.
"""

from __future__ import annotations

import functools
import logging
import os
import sys
from pathlib import Path

import click
import numpy as np

from .chains import (
    chain_structure,
    entropy_rate,
    limit_distribution,
    observation_cost,
    probe_cost,
)
from .constrained import SurveillanceProblem, synthesize
from .errors import (
    Infeasible,
    NoConvergence,
    NoFeasiblePolicy,
    SingularSolve,
    Unbounded,
    ValidationError,
)
from .graph import (
    _winning_region,
    classify_levels,
    contracted_dot,
    is_communicating,
    mec_decomposition,
)
from .mdpfile import (
    ParseError,
    format_mdp,
    format_policy,
    parse_mdp,
    parse_policy,
    parse_target,
)
from .model import induce_chain
from .simulate import (
    empirical_entropy_rate,
    export_csv,
    sample_paths,
    surveillance_monitor,
)
from .unconstrained import max_entropy_rate_policy
from .workspace import build_workspace, export_heatmap

log = logging.getLogger("entrate")


def fmt(x: float) -> str:
    return f"{float(x):.12g}"


def _setup_logging():
    level = os.environ.get("ENTRATE_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING))


def handle_errors(func):
    """Map package errors onto the documented exit codes."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (ParseError, ValidationError) as exc:
            click.echo(f"input error: {exc}", err=True)
            sys.exit(2)
        except NoFeasiblePolicy as exc:
            click.echo(f"infeasible: {exc}", err=True)
            sys.exit(3)
        except (NoConvergence, SingularSolve, Infeasible, Unbounded) as exc:
            click.echo(f"solver failure: {exc}", err=True)
            sys.exit(4)

    return wrapper


def _load_mdp(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(0, f"cannot read {path}: {exc}") from exc
    return parse_mdp(text)


@click.group()
def main():
    """Entropy-rate policy synthesis for Markov decision processes."""
    _setup_logging()


@main.command()
@click.argument("input_file", type=click.Path())
@click.option("--dot", type=click.Path(), default=None, help="write the contracted level graph as DOT")
@handle_errors
def analyze(input_file, dot):
    """Structural report: MECs, levels, winning region."""
    mdp, target = _load_mdp(input_file)
    mecs = mec_decomposition(mdp)
    if target:
        mecs = [m.with_accepting(target) for m in mecs]
    levels = classify_levels(mdp, mecs)
    click.echo(f"states: {mdp.n}")
    click.echo(f"communicating: {str(is_communicating(mdp)).lower()}")
    click.echo(f"mecs: {len(mecs)}")
    for i, mec in enumerate(mecs):
        names = " ".join(mdp.state_names[s] for s in mec.states)
        tag = " accepting" if mec.accepting else ""
        click.echo(
            f"mec {i} level {levels.level_of_mec(i)}{tag}: {names}"
        )
    for k in range(levels.max_level + 1):
        l_names = " ".join(mdp.state_names[s] for s in levels.mec_levels[k])
        t_names = " ".join(
            mdp.state_names[s] for s in levels.transient_levels[k]
        )
        click.echo(f"L{k}: {l_names}")
        click.echo(f"T{k}: {t_names}")
    click.echo(f"level: {levels.max_level}")
    if target:
        amecs = [m for m in mecs if m.accepting]
        winning, _ = _winning_region(mdp, amecs)
        names = " ".join(mdp.state_names[s] for s in sorted(winning))
        click.echo(f"winning: {names}")
    if dot:
        Path(dot).write_text(contracted_dot(mdp, levels))
        click.echo(f"dot written to {dot}")


@main.command(name="synthesize")
@click.argument("input_file", type=click.Path())
@click.option("--unconstrained", is_flag=True, help="ignore the target set and maximize over all policies")
@click.option("--target", "target_file", type=click.Path(), default=None, help="read the target set from a separate file")
@click.option("--min-probes-one", is_flag=True, help="count at least one probe per step in the observation cost")
@click.option("-o", "--out", type=click.Path(), default=None, help="write the policy file here instead of stdout")
@handle_errors
def synthesize_cmd(input_file, unconstrained, target_file, min_probes_one, out):
    """Synthesize an entropy-rate-maximal policy."""
    mdp, target = _load_mdp(input_file)
    if target_file is not None:
        target = parse_target(Path(target_file).read_text(), mdp)
    if unconstrained:
        sol = max_entropy_rate_policy(mdp)
        policy = sol.policy
        click.echo(f"entropy_rate: {fmt(sol.entropy_rate)}")
    else:
        if not target:
            raise ParseError(0, "no target set; give target: or --unconstrained")
        result = synthesize(SurveillanceProblem(mdp, frozenset(target)))
        policy = result.policy
        click.echo(f"entropy_rate: {fmt(result.global_rate)}")
        for s in range(mdp.n):
            v = result.value_map[s]
            click.echo(
                f"value {mdp.state_names[s]}: "
                + (fmt(v) if v is not None else "-inf")
            )
        for stat in result.diagnostics["level_lps"]:
            click.echo(
                f"level {stat['level']}: slice {stat['slice_size']}, "
                f"lp_vars {stat['variables']}, decoded {stat['decoded']}"
            )
    cost = observation_cost(mdp, policy, min_probes_one=min_probes_one)
    click.echo(f"observation_cost: {fmt(cost)}")
    click.echo(f"probe_cost: {fmt(probe_cost(mdp, policy))}")
    text = format_policy(mdp, policy)
    if out:
        Path(out).write_text(text)
        click.echo(f"policy written to {out}")
    else:
        click.echo(text, nl=False)


@main.command()
@click.argument("input_file", type=click.Path())
@click.argument("policy_file", type=click.Path())
@click.option("--horizon", type=int, default=10000, show_default=True)
@click.option("--paths", "num_paths", type=int, default=100, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--window", type=int, default=None, help="surveillance monitor window (default horizon/10)")
@click.option("--csv", "csv_path", type=click.Path(), default=None, help="export the batch as CSV")
@handle_errors
def simulate(input_file, policy_file, horizon, num_paths, seed, window, csv_path):
    """Sample trajectories under a policy and report empirical metrics."""
    mdp, target = _load_mdp(input_file)
    policy = parse_policy(Path(policy_file).read_text(), mdp)
    chain = induce_chain(mdp, policy)
    batch = sample_paths(mdp, policy, horizon, num_paths, seed)
    click.echo(f"paths: {num_paths}")
    click.echo(f"horizon: {horizon}")
    click.echo(f"seed: {seed}")
    click.echo(f"exact_entropy_rate: {fmt(entropy_rate(chain))}")
    click.echo(
        f"empirical_entropy_rate: {fmt(empirical_entropy_rate(batch, chain))}"
    )
    if target:
        win = window if window is not None else max(1, horizon // 10)
        frac = surveillance_monitor(batch, target, win)
        click.echo(f"surveillance_window: {win}")
        click.echo(f"surveillance_pass_fraction: {fmt(frac)}")
    if csv_path:
        export_csv(batch, mdp, csv_path)
        click.echo(f"csv written to {csv_path}")


@main.command()
@click.option("--variant", type=click.Choice(["blue", "green"]), default="blue", show_default=True)
@click.option("--out", "out_dir", type=click.Path(), default=".", show_default=True, help="output directory")
@click.option("--min-probes-one", is_flag=True)
@handle_errors
def gridworld(variant, out_dir, min_probes_one):
    """Generate the five-region workspace, synthesize, export reports."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ws = build_workspace()
    target = ws.target(variant)
    (out / f"workspace_{variant}.mdp").write_text(
        format_mdp(ws.mdp, target)
    )
    click.echo(f"states: {ws.mdp.n}")
    result = synthesize(SurveillanceProblem(ws.mdp, frozenset(target)))
    mecs = [
        m.with_accepting(set(target)) for m in mec_decomposition(ws.mdp)
    ]
    click.echo(f"amecs: {sum(1 for m in mecs if m.accepting)}")
    click.echo(f"entropy_rate: {fmt(result.global_rate)}")
    cost = observation_cost(
        ws.mdp, result.policy, min_probes_one=min_probes_one, chain=result.chain
    )
    click.echo(f"observation_cost: {fmt(cost)}")
    click.echo(
        f"probe_cost: {fmt(probe_cost(ws.mdp, result.policy, chain=result.chain))}"
    )
    pi = limit_distribution(result.chain, chain_structure(result.chain))
    click.echo(f"limit_mass: {fmt(float(np.sum(pi)))}")
    (out / f"policy_{variant}.txt").write_text(
        format_policy(ws.mdp, result.policy)
    )
    export_heatmap(ws, pi, out / f"heatmap_{variant}.csv")
    from .plots import render_heatmap_png, render_spread_png

    render_heatmap_png(ws, pi, out / f"heatmap_{variant}.png")
    render_spread_png(ws, result.policy, 4, out / f"spread_{variant}_r4.png")
    click.echo(f"reports written to {out}")


if __name__ == "__main__":
    main()
