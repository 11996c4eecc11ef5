"""Closed-form Werner-channel results and their numerical cross-checks.

Two kinds of check live here. ``crosscheck_analytics`` verifies that the
closed forms agree with direct linear algebra on the published output state
rho_t = p |phi><phi| + (1-p) (I/2 x |0><0|). ``crosscheck_simulation``
compares that published state against the full 5-qubit simulation and only
*reports* the trace distance: the simulation suggests the noise term is
(|00><00| + |11><11|)/2 instead, and no side is asserted correct here.

Note the published two-branch fidelity F_+- is kept verbatim even though it
is not algebraically consistent with F = p + (1-p)|alpha|^2/2; the derived
consistent form is exposed separately as ``fidelity_branches_consistent``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import tensor_core as tc
from .protocol import ChannelSpec, run_mixed
from .states_gates import InputState, make_input_state
from .tensor_core import DensityMatrix


def _check_range(name: str, value: float, lo: float = 0.0, hi: float = 1.0) -> float:
    value = float(value)
    if not lo <= value <= hi:
        raise ValueError(f"{name} must be in [{lo}, {hi}], got {value}")
    return value


def published_output_state(p: float, s: InputState) -> DensityMatrix:
    """p |phi><phi| + (1-p) (I/2) x |0><0| on qubits (2, 5)."""
    p = _check_range("p", p)
    phi = make_input_state(s).amplitudes
    noise = np.diag([0.5, 0.0, 0.5, 0.0]).astype(complex)
    return DensityMatrix(2, p * np.outer(phi, phi.conj()) + (1.0 - p) * noise)


def simulated_noise_state(p: float, s: InputState) -> DensityMatrix:
    """The competing output form p |phi><phi| + (1-p)(|00><00| + |11><11|)/2
    suggested by the full simulation."""
    p = _check_range("p", p)
    phi = make_input_state(s).amplitudes
    noise = np.diag([0.5, 0.0, 0.0, 0.5]).astype(complex)
    return DensityMatrix(2, p * np.outer(phi, phi.conj()) + (1.0 - p) * noise)


def fidelity_formula(p: float, alpha_sq: float) -> float:
    """F = p + (1-p) |alpha|^2 / 2."""
    p = _check_range("p", p)
    alpha_sq = _check_range("alpha_sq", alpha_sq)
    return p + (1.0 - p) * alpha_sq / 2.0


def fidelity_branches(eps_c: float, eps_phi: float) -> tuple[float, float]:
    """The published two-branch fidelity, ordered so F_plus >= F_minus:
    (3 eps_c + 1)/4 +- ((1 - eps_c)/12) sqrt(1 - eps_phi^2)."""
    eps_c = _check_range("eps_c", eps_c)
    eps_phi = _check_range("eps_phi", eps_phi)
    base = (3.0 * eps_c + 1.0) / 4.0
    split = (1.0 - eps_c) / 12.0 * math.sqrt(max(0.0, 1.0 - eps_phi ** 2))
    return base + split, base - split


def fidelity_branches_consistent(eps_c: float, eps_phi: float) -> tuple[float, float]:
    """Branch fidelities derived from F = p + (1-p)|alpha|^2/2 with
    p = (2 eps_c + 1)/3 and |alpha|^2 = (1 +- sqrt(1 - eps_phi^2))/2:
    (eps_c + 1)/2 +- ((1 - eps_c)/6) sqrt(1 - eps_phi^2)."""
    eps_c = _check_range("eps_c", eps_c)
    eps_phi = _check_range("eps_phi", eps_phi)
    base = (eps_c + 1.0) / 2.0
    split = (1.0 - eps_c) / 6.0 * math.sqrt(max(0.0, 1.0 - eps_phi ** 2))
    return base + split, base - split


def average_fidelity_published(p: float) -> float:
    """The published input-averaged fidelity (1 + 2p)/3."""
    p = _check_range("p", p)
    return (1.0 + 2.0 * p) / 3.0


def average_fidelity_numeric(p: float, measure: str = "uniform_alpha_sq",
                             nodes: int = 10_000) -> float:
    """Midpoint quadrature of the fidelity over the input distribution.

    ``uniform_alpha_sq`` integrates over |alpha|^2 in [0, 1];
    ``uniform_bloch`` integrates over the Bloch sphere of (alpha, beta),
    which induces the same uniform |alpha|^2 law.
    """
    p = _check_range("p", p)
    if measure == "uniform_alpha_sq":
        a = (np.arange(nodes) + 0.5) / nodes
        return float(np.mean(p + (1.0 - p) * a / 2.0))
    if measure == "uniform_bloch":
        theta = (np.arange(nodes) + 0.5) * math.pi / nodes
        a = np.cos(theta / 2.0) ** 2
        weights = 0.5 * np.sin(theta) * (math.pi / nodes)
        return float(np.sum((p + (1.0 - p) * a / 2.0) * weights))
    raise ValueError(f"unknown measure {measure!r}")


def lambda_neg(p: float, alpha_sq: float) -> float:
    """The single negative eigenvalue of the partial transpose of rho_t:
    (1/4)[(1-p) - sqrt(1 + p(16 a (1-a) p + p - 2))]."""
    p = _check_range("p", p)
    a = _check_range("alpha_sq", alpha_sq)
    radicand = 1.0 + p * (16.0 * a * (1.0 - a) * p + p - 2.0)
    if radicand < 0.0:
        if radicand > -1e-12:
            radicand = 0.0
        else:
            raise ValueError(f"negative radicand {radicand!r} at p={p}, alpha_sq={a}")
    return 0.25 * ((1.0 - p) - math.sqrt(radicand))


def replica_negativity(eps_c: float, eps_phi: float) -> float:
    """Entanglement of the teleported replica:
    (1/3)[eps_c - 1 + sqrt((1 - eps_c)^2 + eps_phi^2 (1 + 2 eps_c)^2)].

    Consumes the *unclamped* channel negativity, which is negative for
    p < 1/3, so eps_c may go down to -1/2.
    """
    eps_c = _check_range("eps_c", eps_c, lo=-0.5)
    eps_phi = _check_range("eps_phi", eps_phi)
    root = math.sqrt((1.0 - eps_c) ** 2 + eps_phi ** 2 * (1.0 + 2.0 * eps_c) ** 2)
    return (eps_c - 1.0 + root) / 3.0


def channel_negativity(p: float) -> float:
    """(3p - 1)/2, unclamped (the plotting form; the physical negativity is
    the clamped value computed in tensor_core)."""
    p = _check_range("p", p)
    return (3.0 * p - 1.0) / 2.0


def input_negativity(alpha_sq: float) -> float:
    """2 |alpha| sqrt(1 - |alpha|^2)."""
    a = _check_range("alpha_sq", alpha_sq)
    return 2.0 * math.sqrt(a * (1.0 - a))


def alpha_from_negativity(eps_phi: float, branch: str = "+") -> float:
    """Invert the input negativity: |alpha|^2 = (1 +- sqrt(1 - eps_phi^2))/2."""
    e = _check_range("eps_phi", eps_phi)
    if branch not in ("+", "-"):
        raise ValueError(f"branch must be '+' or '-', got {branch!r}")
    root = math.sqrt(max(0.0, 1.0 - e ** 2))
    return 0.5 * (1.0 + root) if branch == "+" else 0.5 * (1.0 - root)


@dataclass(frozen=True)
class AnalyticsPoint:
    """Every closed-form quantity evaluated at one (p, |alpha|^2) point."""

    p: float
    alpha_sq: float
    eps_c: float
    eps_phi: float
    fidelity: float
    f_plus: float
    f_minus: float
    f_bar_published: float
    f_bar_numeric: float
    lam_neg: float
    eps_t: float


def analytics_point(p: float, alpha_sq: float) -> AnalyticsPoint:
    eps_c = channel_negativity(p)
    eps_phi = input_negativity(alpha_sq)
    f_plus, f_minus = fidelity_branches(max(0.0, eps_c), eps_phi)
    return AnalyticsPoint(
        p=p,
        alpha_sq=alpha_sq,
        eps_c=eps_c,
        eps_phi=eps_phi,
        fidelity=fidelity_formula(p, alpha_sq),
        f_plus=f_plus,
        f_minus=f_minus,
        f_bar_published=average_fidelity_published(p),
        f_bar_numeric=average_fidelity_numeric(p),
        lam_neg=lambda_neg(p, alpha_sq),
        eps_t=replica_negativity(eps_c, eps_phi),
    )


@dataclass(frozen=True)
class ConsistencyReport:
    """Worst deviations between closed forms and direct numerics on rho_t."""

    max_fidelity_dev: float
    max_lambda_dev: float
    max_replica_dev: float

    @property
    def max_mismatch(self) -> float:
        return max(self.max_fidelity_dev, self.max_lambda_dev, self.max_replica_dev)


def crosscheck_analytics(p_values=None, alpha_sq_values=None) -> ConsistencyReport:
    """On a (p, |alpha|^2) grid, check fidelity_formula against <phi|rho_t|phi>
    and both negativity forms against the numeric negativity of rho_t."""
    p_values = np.linspace(0.0, 1.0, 11) if p_values is None else np.asarray(p_values, dtype=float)
    alpha_sq_values = (np.linspace(0.0, 1.0, 11) if alpha_sq_values is None
                       else np.asarray(alpha_sq_values, dtype=float))
    max_f = max_l = max_r = 0.0
    for p in p_values:
        for a in alpha_sq_values:
            s = InputState.from_alpha_sq(a)
            rho_t = published_output_state(p, s)
            numeric_eps = tc.negativity(rho_t, cut=1)
            max_f = max(max_f, abs(tc.fidelity_pure(rho_t, make_input_state(s))
                                   - fidelity_formula(p, a)))
            lam = lambda_neg(p, a)
            max_l = max(max_l, abs(max(0.0, -2.0 * lam) - numeric_eps))
            eps_t = replica_negativity(channel_negativity(p), input_negativity(a))
            max_r = max(max_r, abs(eps_t - numeric_eps))
    return ConsistencyReport(max_fidelity_dev=max_f, max_lambda_dev=max_l,
                             max_replica_dev=max_r)


@dataclass(frozen=True)
class AdjudicationReport:
    """Trace distances between the full simulation and the two candidate
    output forms on a (p, |alpha|^2) grid. Reports only; asserts nothing
    about which published form is correct."""

    max_distance_published: float
    mean_distance_published: float
    max_distance_simulated_form: float
    mean_distance_simulated_form: float
    max_affine_dev: float
    grid_shape: tuple


def crosscheck_simulation(p_values=None, alpha_sq_values=None) -> AdjudicationReport:
    """Run the 5-qubit Werner simulation over the grid and measure its trace
    distance to rho_t and to the alternative noise form; also verify the
    affine-in-p structure of the simulated output."""
    p_values = np.linspace(0.0, 1.0, 11) if p_values is None else np.asarray(p_values, dtype=float)
    alpha_sq_values = (np.linspace(0.0, 1.0, 11) if alpha_sq_values is None
                       else np.asarray(alpha_sq_values, dtype=float))
    d_published = []
    d_alt = []
    max_affine = 0.0
    for a in alpha_sq_values:
        s = InputState.from_alpha_sq(a)
        avg_pure = run_mixed(s, ChannelSpec.werner(1.0)).averaged.matrix
        avg_mixed = run_mixed(s, ChannelSpec.werner(0.0)).averaged.matrix
        for p in p_values:
            sim = run_mixed(s, ChannelSpec.werner(p)).averaged.matrix
            affine = p * avg_pure + (1.0 - p) * avg_mixed
            max_affine = max(max_affine, float(np.max(np.abs(sim - affine))))
            d_published.append(tc.trace_distance(sim, published_output_state(p, s).matrix))
            d_alt.append(tc.trace_distance(sim, simulated_noise_state(p, s).matrix))
    d_published = np.array(d_published)
    d_alt = np.array(d_alt)
    return AdjudicationReport(
        max_distance_published=float(d_published.max()),
        mean_distance_published=float(d_published.mean()),
        max_distance_simulated_form=float(d_alt.max()),
        mean_distance_simulated_form=float(d_alt.mean()),
        max_affine_dev=max_affine,
        grid_shape=(p_values.size, alpha_sq_values.size),
    )
