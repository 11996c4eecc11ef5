"""Protocol-engine tests: branch enumeration, conditional states, mixed
channels, alternate Bell channels and ancilla compensation."""

import math

import numpy as np
import pytest

import qteleport.solver as solver
import qteleport.tensor_core as tc
from qteleport.protocol import (
    ALL_OUTCOMES,
    BranchOutcome,
    ChannelSpec,
    ProtocolConfig,
    bell_conditional,
    branch_index,
    compensated_gate,
    outcome_from_index,
    run_mixed,
    run_pure,
    run_with_alternate_channel,
)
from qteleport.states_gates import AncillaPrep, BellLabel, InputState, gate, make_input_state


def random_input(seed):
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    raw /= np.linalg.norm(raw)
    return InputState(raw[0], raw[1])


class TestBranchIndexing:
    def test_j_formula(self):
        assert branch_index(BranchOutcome(BellLabel.PHI_PLUS, 0)) == 1
        assert branch_index(BranchOutcome(BellLabel.PSI_PLUS, 1)) == 6
        assert branch_index(BranchOutcome(BellLabel.PSI_MINUS, 1)) == 8

    def test_round_trip(self):
        for j in range(1, 9):
            assert branch_index(outcome_from_index(j)) == j

    def test_invalid(self):
        with pytest.raises(ValueError):
            outcome_from_index(9)
        with pytest.raises(ValueError):
            BranchOutcome(BellLabel.PHI_PLUS, 2)


class TestBellConditional:
    def test_phi_branches(self):
        s = InputState(0.6, 0.8)
        state, p = bell_conditional(s, 1)
        assert np.allclose(state.amplitudes, [0.6, 0, 0, 0.8], atol=1e-12)
        assert abs(p - 0.25) < 1e-12
        state, _ = bell_conditional(s, 2)
        assert np.allclose(state.amplitudes, [0.6, 0, 0, -0.8], atol=1e-12)

    def test_psi_branches(self):
        s = InputState(0.6, 0.8)
        state, _ = bell_conditional(s, 3)
        assert np.allclose(state.amplitudes, [0, 0.8, 0.6, 0], atol=1e-12)
        state, _ = bell_conditional(s, 4)
        assert np.allclose(state.amplitudes, [0, 0.8, -0.6, 0], atol=1e-12)

    def test_product_input(self):
        state, _ = bell_conditional(InputState(1.0, 0.0), 1)
        assert np.allclose(state.amplitudes, [1, 0, 0, 0], atol=1e-12)

    def test_invalid_index(self):
        with pytest.raises(ValueError):
            bell_conditional(InputState(1.0, 0.0), 5)


class TestRunPure:
    def test_perfect_teleportation_forced(self):
        s = InputState(0.6, 0.8)
        target = make_input_state(s)
        result = run_pure(s, forced=BranchOutcome(BellLabel.PHI_PLUS, 0))
        assert abs(result.probability - 0.125) < 1e-12
        assert tc.fidelity_pure(result.output, target) > 1 - 1e-12

    def test_all_branches_uniform(self):
        s = random_input(3)
        target = make_input_state(s)
        results = run_pure(s)
        assert abs(sum(r.probability for r in results) - 1.0) < 1e-12
        for r in results:
            assert abs(r.probability - 0.125) < 1e-12
            assert tc.fidelity_pure(r.output, target) > 1 - 1e-12

    def test_branch_j6_output_up_to_phase(self):
        s = InputState(0.6, 0.8)
        result = run_pure(s, forced=BranchOutcome(BellLabel.PSI_PLUS, 1))
        target = make_input_state(s)
        assert tc.fidelity_pure(result.output, target) > 1 - 1e-12

    def test_pre_correction_theta_states(self):
        """Before the correction the (2,5) states carry the conditional
        amplitude patterns (after Bob's CNOT), up to global phase."""
        s = random_input(11)
        a, b = s.alpha, s.beta
        expected = {
            1: [a, 0, 0, b], 2: [a, 0, 0, -b], 3: [a, 0, 0, -b], 4: [a, 0, 0, b],
            5: [b, 0, 0, a], 6: [b, 0, 0, -a], 7: [b, 0, 0, -a], 8: [b, 0, 0, a],
        }
        for r in run_pure(s, keep_trace=True):
            got = r.trace.pre_correction_25
            want = np.array(expected[r.j], dtype=complex)
            overlap = np.vdot(want, got)
            assert abs(abs(overlap) - 1.0) < 1e-12

    def test_generic_gate_pre_correction(self):
        """With an entangling F the pre-correction states are F applied to
        the conditional patterns."""
        f = gate("cphase", math.pi / 3)
        s = random_input(12)
        a, b = s.alpha, s.beta
        base = {
            1: [a, 0, b, 0], 2: [a, 0, -b, 0], 3: [a, 0, -b, 0], 4: [a, 0, b, 0],
            5: [b, 0, a, 0], 6: [b, 0, -a, 0], 7: [b, 0, -a, 0], 8: [b, 0, a, 0],
        }
        config = ProtocolConfig(bob_gate=f, corrections=solver.solved_set(f))
        for r in run_pure(s, config, keep_trace=True):
            want = f @ np.array(base[r.j], dtype=complex)
            overlap = np.vdot(want, r.trace.pre_correction_25)
            assert abs(abs(overlap) - 1.0) < 1e-12

    def test_impossible_branch_raises(self):
        # alpha = 1 makes the input product |00>; psi outcomes on (1,3)
        # keep finite probability, but a degenerate config can zero one out.
        s = InputState(1.0, 0.0)
        results = run_pure(s)
        assert abs(sum(r.probability for r in results) - 1.0) < 1e-12


class TestRunMixed:
    def test_pure_limit(self):
        s = InputState(0.6, 0.8)
        out = run_mixed(s, ChannelSpec.werner(1.0))
        target = make_input_state(s)
        assert tc.fidelity_pure(out.averaged, target) > 1 - 1e-12

    def test_probabilities_sum(self):
        s = random_input(5)
        out = run_mixed(s, ChannelSpec.werner(0.37))
        assert abs(sum(r.probability for r in out.branches) - 1.0) < 1e-12
        assert abs(out.averaged.matrix.trace() - 1.0) < 1e-12

    def test_affine_in_p(self):
        s = InputState.from_alpha_sq(0.3)
        avg1 = run_mixed(s, ChannelSpec.werner(1.0)).averaged.matrix
        avg0 = run_mixed(s, ChannelSpec.werner(0.0)).averaged.matrix
        for p in (0.2, 0.65):
            got = run_mixed(s, ChannelSpec.werner(p)).averaged.matrix
            assert np.max(np.abs(got - (p * avg1 + (1 - p) * avg0))) < 1e-12

    def test_fidelity_at_half(self):
        s = InputState.from_alpha_sq(0.5)
        out = run_mixed(s, ChannelSpec.werner(0.5))
        fid = tc.fidelity_pure(out.averaged, make_input_state(s))
        # The simulation delivers p + (1-p)/2 here; the published closed form
        # predicts 0.625 instead, and that discrepancy is recorded (not
        # asserted either way) by analytics.crosscheck_simulation.
        assert abs(fid - 0.75) < 1e-12

    def test_input_linearity(self):
        """Averaged output is linear in the input density matrix."""
        s1 = InputState(1.0, 0.0)
        s2 = InputState(0.0, 1.0)
        channel = ChannelSpec.werner(0.4)
        rho1 = run_mixed(s1, channel).averaged.matrix
        rho2 = run_mixed(s2, channel).averaged.matrix
        mix = InputState(math.sqrt(0.5), math.sqrt(0.5))
        cross = run_mixed(mix, channel).averaged.matrix
        anti = InputState(math.sqrt(0.5), -math.sqrt(0.5))
        cross2 = run_mixed(anti, channel).averaged.matrix
        assert np.max(np.abs(0.5 * (cross + cross2) - 0.5 * (rho1 + rho2))) < 1e-12

    def test_explicit_channel(self):
        from qteleport.states_gates import make_werner

        s = InputState(0.6, 0.8)
        direct = run_mixed(s, ChannelSpec.werner(0.7)).averaged.matrix
        explicit = run_mixed(s, ChannelSpec.from_matrix(make_werner(0.7))).averaged.matrix
        assert np.max(np.abs(direct - explicit)) < 1e-12


class TestAlternateChannels:
    @pytest.mark.parametrize("label", list(BellLabel))
    def test_solver_corrections_restore(self, label):
        from qteleport.states_gates import CNOT

        s = random_input(17)
        target = make_input_state(s)
        cset = solver.corrections_for_channel(CNOT, label)
        config = ProtocolConfig(corrections=cset)
        for r in run_with_alternate_channel(s, label, config):
            assert tc.fidelity_pure(r.output, target) > 1 - 1e-12

    def test_wrong_corrections_fail(self):
        s = InputState(0.6, 0.8)
        target = make_input_state(s)
        config = ProtocolConfig()  # phi+ table corrections
        fids = [tc.fidelity_pure(r.output, target)
                for r in run_with_alternate_channel(s, BellLabel.PSI_PLUS, config)]
        assert min(fids) < 1 - 1e-6


class TestCompensatedGate:
    def test_default_ancilla_is_plain_cnot(self):
        from qteleport.states_gates import CNOT

        assert tc.allclose(compensated_gate(AncillaPrep(1.0, 0.0)), CNOT)

    def test_flipped_ancilla(self):
        anc = AncillaPrep(0.0, 1.0)
        s = InputState(0.6, 0.8)
        target = make_input_state(s)
        config = ProtocolConfig(bob_gate=compensated_gate(anc), ancilla=anc)
        for r in run_pure(s, config):
            assert tc.fidelity_pure(r.output, target) > 1 - 1e-12

    @pytest.mark.parametrize("seed", range(20))
    def test_random_ancillas(self, seed):
        rng = np.random.default_rng(1000 + seed)
        raw = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        raw /= np.linalg.norm(raw)
        anc = AncillaPrep(raw[0], raw[1])
        s = random_input(seed)
        target = make_input_state(s)
        config = ProtocolConfig(bob_gate=compensated_gate(anc), ancilla=anc)
        for r in run_pure(s, config):
            assert tc.fidelity_pure(r.output, target) > 1 - 1e-12
