"""Command-line interface: single teleportation runs, figure-dataset sweeps,
correction solving, and the verification suites.

Exit codes: 0 success, 1 verification/assertion failure, 2 usage/input error.
CSV output uses comma separators, '.' decimals, LF newlines, a mandatory
header, and 12 significant digits, so repeated runs are byte-identical.
"""
from __future__ import annotations

import json
import math
import os
import sys

import click
import numpy as np

from . import analytics, solver
from .protocol import ChannelSpec
from .session import run_session
from .states_gates import BellLabel, InputState, gate


def _fmt(value: float) -> str:
    return format(float(value), ".12g")


def _parse_levels(text: str, name: str) -> list[float]:
    try:
        levels = [float(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise click.BadParameter(f"could not parse {name} list {text!r}")
    if not levels or any(not 0.0 <= v <= 1.0 for v in levels):
        raise click.BadParameter(f"{name} values must lie in [0, 1], got {text!r}")
    return levels


def _parse_channel(text: str) -> ChannelSpec:
    kind, _, arg = text.partition(":")
    kind = kind.strip().lower()
    if kind == "bell":
        try:
            return ChannelSpec.pure_bell(BellLabel.parse(arg))
        except ValueError as exc:
            raise click.BadParameter(str(exc))
    if kind == "werner":
        try:
            p = float(arg)
        except ValueError:
            raise click.BadParameter(f"bad Werner parameter {arg!r}")
        if not 0.0 <= p <= 1.0:
            raise click.BadParameter(f"Werner parameter must be in [0, 1], got {p}")
        return ChannelSpec.werner(p)
    raise click.BadParameter(f"channel must be bell:LABEL or werner:P, got {text!r}")


def _write_csv(path: str, header: list[str], rows) -> None:
    try:
        with open(path, "w", newline="\n") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(_fmt(v) for v in row) + "\n")
    except OSError as exc:
        raise click.UsageError(f"cannot write {path}: {exc}")


def _worker_hint() -> int:
    """QTELEPORT_THREADS is accepted as a worker-count hint; results are
    emitted in deterministic order regardless of its value."""
    raw = os.environ.get("QTELEPORT_THREADS")
    if raw is None:
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise click.UsageError(f"QTELEPORT_THREADS must be an integer, got {raw!r}")
    if value < 1:
        raise click.UsageError(f"QTELEPORT_THREADS must be positive, got {value}")
    return value


@click.group()
def main():
    """Single-EPR-pair teleportation of bipartite states: simulation,
    correction solving, and Werner-channel figure datasets."""


@main.command()
@click.option("--alpha-sq", type=float, required=True, help="|alpha|^2 of the input state.")
@click.option("--beta-phase", type=float, default=0.0, show_default=True,
              help="Phase of beta in radians.")
@click.option("--channel", "channel_text", default="bell:phi+", show_default=True,
              help="bell:LABEL or werner:P.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text",
              show_default=True)
def teleport(alpha_sq, beta_phase, channel_text, seed, fmt):
    """Run one teleportation session and print its log."""
    if not 0.0 <= alpha_sq <= 1.0:
        raise click.BadParameter("--alpha-sq must be in [0, 1]")
    channel = _parse_channel(channel_text)
    try:
        state = InputState.from_alpha_sq(alpha_sq, beta_phase)
        log = run_session(state, channel, seed=seed)
    except Exception as exc:  # internal failure, not a usage error
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    click.echo(log.to_json_text() if fmt == "json" else log.to_text(), nl=False)


@main.command("sweep-fidelity")
@click.option("--eps-c", "eps_c_text", default="0.9,0.7,0.3,0", show_default=True,
              help="Comma-separated channel-negativity levels.")
@click.option("--grid", type=int, default=200, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def sweep_fidelity(eps_c_text, grid, out_path):
    """Fidelity branches F_+- versus input negativity, one curve pair per
    eps_c level."""
    levels = _parse_levels(eps_c_text, "--eps-c")
    if grid < 1:
        raise click.BadParameter("--grid must be positive")
    _worker_hint()
    eps_phi = np.linspace(0.0, 1.0, grid)
    rows = []
    for level in levels:
        for e in eps_phi:
            f_plus, f_minus = analytics.fidelity_branches(level, float(e))
            rows.append((level, float(e), f_plus, f_minus))
    _write_csv(out_path, ["eps_c", "eps_phi", "F_plus", "F_minus"], rows)
    click.echo(f"wrote {len(rows)} rows to {out_path}")


@main.command("sweep-entanglement")
@click.option("--axis", type=click.Choice(["input", "channel"]), default="input",
              show_default=True)
@click.option("--levels", "levels_text", default="0,0.2,0.4,0.6,0.8,1", show_default=True)
@click.option("--grid", type=int, default=200, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def sweep_entanglement(axis, levels_text, grid, out_path):
    """Replica negativity versus input negativity (axis=input, eps_c levels)
    or versus channel negativity (axis=channel, eps_phi levels)."""
    levels = _parse_levels(levels_text, "--levels")
    if grid < 1:
        raise click.BadParameter("--grid must be positive")
    _worker_hint()
    sweep = np.linspace(0.0, 1.0, grid)
    rows = []
    for level in levels:
        for x in sweep:
            if axis == "input":
                eps_c, eps_phi = level, float(x)
            else:
                eps_c, eps_phi = float(x), level
            rows.append((eps_c, eps_phi, analytics.replica_negativity(eps_c, eps_phi)))
    _write_csv(out_path, ["eps_c", "eps_phi", "eps_t"], rows)
    click.echo(f"wrote {len(rows)} rows to {out_path}")


def _load_gate(text: str) -> tuple[str, np.ndarray]:
    kind, _, arg = text.partition(":")
    kind = kind.strip().lower()
    if kind == "cnot":
        return "cnot", gate("cnot")
    if kind == "cphase":
        try:
            theta = float(arg) if arg else math.pi
        except ValueError:
            raise click.BadParameter(f"bad cphase angle {arg!r}")
        return f"cphase:{_fmt(theta)}", gate("cphase", theta)
    if kind == "file":
        try:
            return f"file:{arg}", solver.gate_from_json(arg)
        except (OSError, ValueError) as exc:
            raise click.UsageError(f"cannot load gate from {arg!r}: {exc}")
    raise click.BadParameter(f"--gate must be cnot, cphase:THETA or file:PATH, got {text!r}")


@main.command()
@click.option("--gate", "gate_text", default="cnot", show_default=True,
              help="cnot, cphase:THETA, or file:PATH (JSON re/im document).")
@click.option("--tol", type=float, default=1e-8, show_default=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None)
def solve(gate_text, tol, out_path):
    """Solve the eight conditional corrections for a two-qubit gate and
    search for factorized realizations."""
    name, f = _load_gate(gate_text)
    branches = []
    for j in range(1, 9):
        result = solver.find_factorized(f, j, tol=tol)
        entry = {
            "j": j,
            "class": "".join(str(v) for v in solver.BranchClass.of(j).value),
            "params": {"gamma": result.params.gamma, "theta": result.params.theta,
                       "phi": result.params.phi},
            "found": result.found,
            "sigma2": result.sigma2,
        }
        if result.found:
            entry["residual"] = result.residual
            entry["factor_a"] = solver.gate_to_json(result.factor_a)
            entry["factor_b"] = solver.gate_to_json(result.factor_b)
        branches.append(entry)
    cset = solver.CorrectionSet(tuple(solver.find_factorized(f, j, tol=tol).correction
                                      for j in range(1, 9)), provenance=f"solved({name})")
    report = solver.verify_correction_set(f, cset)
    document = {
        "gate": name,
        "tolerance": tol,
        "branches": branches,
        "min_fidelity": report.min_fidelity,
        "fidelities": [[float(v) for v in row] for row in report.fidelities],
    }
    text = json.dumps(document, indent=2) + "\n"
    if out_path:
        try:
            with open(out_path, "w", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            raise click.UsageError(f"cannot write {out_path}: {exc}")
        click.echo(f"wrote report to {out_path}")
    else:
        click.echo(text, nl=False)


@main.command()
@click.option("--suite", type=click.Choice(["all", "protocol", "analytics", "solver"]),
              default="all", show_default=True)
def verify(suite):
    """Run the self-check suites and print a pass/fail table."""
    from .verify import run_suites

    results = run_suites(suite)
    failed = False
    for check in results:
        if check.passed is None:
            status = "INFO"
        elif check.passed:
            status = "PASS"
        else:
            status = "FAIL"
            failed = True
        detail = f"  [{check.detail}]" if check.detail else ""
        click.echo(f"{status:4s}  {check.name}{detail}")
    if failed:
        sys.exit(1)


if __name__ == "__main__":
    main()
