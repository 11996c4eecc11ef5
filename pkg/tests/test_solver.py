"""Correction-solver tests: templates, the tabulated CNOT set, the
factorization search, and the line-equality checks.

Gates admitting factorized corrections are sampled as locally dressed
CNOT-type unitaries (A x B) CNOT W, with W acting only on span{|01>, |11>}:
these are exactly the gates whose first and third columns are product states
with locally orthogonal factors, which is what a product correction needs.
"""

import math

import numpy as np
import pytest

import qteleport.solver as solver
import qteleport.tensor_core as tc
from qteleport.solver import BranchClass, SU2Params
from qteleport.states_gates import CNOT, IDENTITY_2, SIGMA_X, SIGMA_Y, SIGMA_Z, gate


def haar_unitary(rng, n=2):
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def dressed_cnot(rng):
    """(A x B) CNOT W with W unitary on span{|01>, |11>} and identity on
    span{|00>, |10>}; admits factorized corrections on every branch."""
    w = np.eye(4, dtype=complex)
    w[np.ix_([1, 3], [1, 3])] = haar_unitary(rng)
    return tc.kron(haar_unitary(rng), haar_unitary(rng)) @ CNOT @ w


def phase_aligned_dev(got, want):
    overlap = np.trace(want.conj().T @ got)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return float(np.linalg.norm(got / phase - want))


class TestTemplates:
    def test_cnot_at_origin(self):
        m = solver.template_matrix(BranchClass.J14, SU2Params(0, 0, 0))
        assert tc.allclose(m, CNOT)

    def test_j58_documented_point(self):
        m = solver.template_matrix(BranchClass.J58, SU2Params(math.pi / 2, 0, math.pi))
        assert phase_aligned_dev(m, tc.kron(SIGMA_X, SIGMA_X) @ CNOT) < 1e-12

    def test_unitarity_over_angle_grid(self):
        axis = np.linspace(0, 2 * math.pi, 10, endpoint=False)
        for cls in BranchClass:
            for g in axis[::3]:
                for t in axis:
                    for p in axis:
                        m = solver.template_matrix(cls, SU2Params(g, t, p))
                        dev = np.max(np.abs(m.conj().T @ m - np.eye(4)))
                        assert dev < 1e-12

    def test_fixed_rows(self):
        m = solver.template_matrix(BranchClass.J23, SU2Params(0.3, 1.1, 2.0))
        assert np.allclose(m[0], [1, 0, 0, 0])
        assert np.allclose(m[3], [0, 0, -1, 0])
        m = solver.template_matrix(BranchClass.J67, SU2Params(0.3, 1.1, 2.0))
        assert np.allclose(m[0], [0, 0, -1, 0])
        assert np.allclose(m[3], [1, 0, 0, 0])


class TestSolveCorrection:
    def test_cnot_j1_is_identity(self):
        v = solver.solve_correction(CNOT, 1, SU2Params(0, 0, 0))
        assert tc.allclose(v, np.eye(4))

    def test_cnot_j5_is_xx(self):
        v = solver.solve_correction(CNOT, 5, SU2Params(math.pi / 2, 0, math.pi))
        assert phase_aligned_dev(v, tc.kron(SIGMA_X, SIGMA_X)) < 1e-12

    def test_identity_gate_moves_burden_into_v(self):
        v = solver.solve_correction(np.eye(4), 1, SU2Params(0, 0, 0))
        assert tc.allclose(v, CNOT)
        # CNOT is not a tensor product: two nonzero realignment values.
        s = tc.realignment_singular_values(v)
        assert s[1] > 1.0

    def test_defining_column_actions(self):
        rng = np.random.default_rng(21)
        f = haar_unitary(rng, 4)
        ket00 = np.array([1, 0, 0, 0], dtype=complex)
        ket10 = np.array([0, 0, 1, 0], dtype=complex)
        ket11 = np.array([0, 0, 0, 1], dtype=complex)
        for j, sign, target in ((1, 1, ket11), (2, -1, ket11), (3, -1, ket11),
                                (4, 1, ket11), (5, 1, ket00), (6, -1, ket00),
                                (7, -1, ket00), (8, 1, ket00)):
            v = solver.solve_correction(f, j, SU2Params(0.4, 1.2, 0.9))
            first = ket00 if j <= 4 else ket11
            assert np.max(np.abs(v @ f @ ket00 - first)) < 1e-12
            assert np.max(np.abs(v @ f @ ket10 - sign * target)) < 1e-12

    def test_non_unitary_rejected(self):
        with pytest.raises(ValueError):
            solver.solve_correction(np.ones((4, 4)), 1, SU2Params(0, 0, 0))


class TestCnotTable:
    def test_entries(self):
        table = solver.corrections_for_cnot()
        i_sy = 1j * SIGMA_Y
        assert tc.allclose(table[2], tc.kron(SIGMA_Z, IDENTITY_2))
        assert tc.allclose(table[7], tc.kron(SIGMA_X, i_sy))
        assert tc.allclose(table[1], np.eye(4))

    def test_full_fidelity(self):
        report = solver.verify_correction_set(CNOT, solver.corrections_for_cnot())
        assert report.min_fidelity > 1 - 1e-12

    def test_solved_set_matches_table_up_to_phase(self):
        table = solver.corrections_for_cnot()
        solved = solver.solved_set(CNOT)
        for j in range(1, 9):
            assert phase_aligned_dev(solved[j], table[j]) < 1e-10

    def test_su2_freedom_never_breaks_correctness(self):
        rng = np.random.default_rng(31)
        for _ in range(3):
            params = {cls: SU2Params(*rng.uniform(0, 2 * math.pi, 3)) for cls in BranchClass}
            cset = solver.solved_set(CNOT, params_by_class=params)
            report = solver.verify_correction_set(CNOT, cset, num_inputs=2)
            assert report.min_fidelity > 1 - 1e-12


class TestLineEqualities:
    def test_table_passes(self):
        report = solver.verify_relevant_line_equalities(CNOT, solver.corrections_for_cnot())
        assert report.passed
        assert all(d < 1e-12 for d in report.deviations.values())

    def test_solved_random_gate_passes(self):
        rng = np.random.default_rng(41)
        f = haar_unitary(rng, 4)
        report = solver.verify_relevant_line_equalities(f, solver.solved_set(f))
        assert report.passed

    def test_corrupted_set_fails(self):
        rng = np.random.default_rng(42)
        gates = list(solver.corrections_for_cnot().gates)
        gates[3] = haar_unitary(rng, 4)  # replace V_4
        corrupted = solver.CorrectionSet(tuple(gates), provenance="corrupted")
        report = solver.verify_relevant_line_equalities(CNOT, corrupted)
        assert not report.passed
        assert report.deviations[(1, 4)] > 1e-6


class TestFindFactorized:
    def test_cnot_j1(self):
        r = solver.find_factorized(CNOT, 1)
        assert r.found
        assert phase_aligned_dev(r.correction, np.eye(4)) < 1e-8

    def test_dressed_cnot_all_branches(self):
        rng = np.random.default_rng(51)
        f = dressed_cnot(rng)
        results = [solver.find_factorized(f, j) for j in range(1, 9)]
        assert all(r.found for r in results)
        for r in results:
            assert r.residual < 1e-8
            assert np.max(np.abs(r.correction - tc.kron(r.factor_a, r.factor_b))) < 1e-7
        cset = solver.CorrectionSet(tuple(r.correction for r in results),
                                    provenance="factorized")
        assert solver.verify_correction_set(f, cset).min_fidelity > 1 - 1e-10

    def test_cz_has_no_factorized_correction(self):
        """A controlled phase leaves |10> -> |10>, sharing its second local
        factor with |00> -> |00>, so no product correction can send one to
        |00> and the other to |11>; the search reports the attained minimum."""
        cz = gate("cphase", math.pi / 2)
        r = solver.find_factorized(cz, 1)
        assert not r.found
        assert r.sigma2 > 1.0

    def test_product_gate_not_found(self):
        f = tc.kron(gate("h"), IDENTITY_2)
        r = solver.find_factorized(f, 1)
        assert not r.found
        assert r.sigma2 > 0.1

    def test_phase_fix_on_factor_a(self):
        rng = np.random.default_rng(52)
        f = dressed_cnot(rng)
        r = solver.find_factorized(f, 1)
        pivot = r.factor_a.reshape(-1)[np.argmax(np.abs(r.factor_a))]
        assert abs(pivot.imag) < 1e-8
        assert pivot.real > 0


class TestGateJson:
    def test_round_trip(self):
        doc = solver.gate_to_json(CNOT)
        assert tc.allclose(solver.gate_from_json(doc), CNOT)

    def test_non_unitary_rejected(self):
        doc = {"re": np.ones((4, 4)).tolist(), "im": np.zeros((4, 4)).tolist()}
        with pytest.raises(ValueError):
            solver.gate_from_json(doc)

    def test_malformed_rejected(self):
        with pytest.raises(ValueError):
            solver.gate_from_json({"re": [[1, 0], [0, 1]], "im": [[0, 0], [0, 0]]})
