"""Dense complex linear algebra for few-qubit registers (dimension <= 256).

Conventions used everywhere in this package:
  * qubit 1 is the most significant bit, so basis index b encodes |q1 q2 ... qn>;
  * all matrices are dense row-major complex ndarrays;
  * states are immutable after construction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .tolerances import (
    ATOL_ENTRY,
    ATOL_HERMITIAN,
    ATOL_SPECTRAL,
    JACOBI_MAX_SWEEPS,
    JACOBI_OFF_TOL,
    MIN_EIGENVALUE,
)


def _as_complex(m) -> np.ndarray:
    return np.asarray(m, dtype=complex)


def kron(a, b) -> np.ndarray:
    """Tensor product; the first factor occupies the most significant qubits."""
    return np.kron(_as_complex(a), _as_complex(b))


def dagger(m) -> np.ndarray:
    return _as_complex(m).conj().T


def allclose(a, b, atol: float = ATOL_ENTRY) -> bool:
    """Entrywise comparison with an explicit absolute tolerance."""
    a = _as_complex(a)
    b = _as_complex(b)
    return a.shape == b.shape and bool(np.max(np.abs(a - b), initial=0.0) <= atol)


def is_hermitian(m, atol: float = ATOL_HERMITIAN) -> bool:
    m = _as_complex(m)
    return m.shape[0] == m.shape[1] and bool(np.max(np.abs(m - m.conj().T)) <= atol)


def is_unitary(m, atol: float = ATOL_ENTRY) -> bool:
    m = _as_complex(m)
    if m.shape[0] != m.shape[1]:
        return False
    return allclose(m.conj().T @ m, np.eye(m.shape[0]), atol=atol)


def _frozen_array(obj, name: str, value: np.ndarray) -> None:
    value.flags.writeable = False
    object.__setattr__(obj, name, value)


@dataclass(frozen=True)
class StateVector:
    """Normalized pure state of an n-qubit register."""

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _as_complex(self.amplitudes).reshape(-1).copy()
        dim = 2 ** self.num_qubits
        if self.num_qubits < 1 or amps.size != dim:
            raise ValueError(
                f"expected {dim} amplitudes for {self.num_qubits} qubits, got {amps.size}"
            )
        norm_sq = float(np.sum(np.abs(amps) ** 2))
        if abs(norm_sq - 1.0) > ATOL_ENTRY:
            raise ValueError(f"state not normalized: |psi|^2 = {norm_sq!r}")
        _frozen_array(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def density_matrix(self) -> "DensityMatrix":
        a = self.amplitudes
        return DensityMatrix(self.num_qubits, np.outer(a, a.conj()))


@dataclass(frozen=True)
class DensityMatrix:
    """Unit-trace positive Hermitian operator on an n-qubit register."""

    num_qubits: int
    matrix: np.ndarray

    def __post_init__(self):
        m = _as_complex(self.matrix).copy()
        dim = 2 ** self.num_qubits
        if self.num_qubits < 1 or m.shape != (dim, dim):
            raise ValueError(f"expected a {dim}x{dim} matrix, got shape {m.shape}")
        if not is_hermitian(m, atol=ATOL_ENTRY):
            raise ValueError("density matrix is not Hermitian within 1e-12")
        trace = m.trace()
        if abs(trace - 1.0) > ATOL_ENTRY:
            raise ValueError(f"density matrix trace is {trace!r}, expected 1")
        min_eig = float(np.linalg.eigvalsh(m)[0])
        if min_eig < MIN_EIGENVALUE:
            raise ValueError(f"density matrix has eigenvalue {min_eig!r} < {MIN_EIGENVALUE}")
        _frozen_array(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def embed(op, targets, num_qubits: int) -> np.ndarray:
    """Embed a k-qubit operator into the full register.

    ``targets`` are 1-based qubit labels; the first label is the operator's
    most significant qubit factor.
    """
    op = _as_complex(op)
    targets = list(targets)
    k = len(targets)
    n = num_qubits
    if len(set(targets)) != k or any(q < 1 or q > n for q in targets):
        raise ValueError(f"invalid target qubits {targets} for a {n}-qubit register")
    if op.shape != (2 ** k, 2 ** k):
        raise ValueError(f"operator shape {op.shape} does not match {k} target qubits")
    rest = [q for q in range(1, n + 1) if q not in targets]
    order = targets + rest
    full = np.kron(op, np.eye(2 ** (n - k), dtype=complex))
    t = full.reshape([2] * (2 * n))
    perm = [order.index(q) for q in range(1, n + 1)]
    t = t.transpose(perm + [n + p for p in perm])
    return np.ascontiguousarray(t.reshape(2 ** n, 2 ** n))


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Trace out every qubit not in ``keep`` (1-based labels)."""
    keep = sorted(set(keep))
    n = rho.num_qubits
    if not keep:
        raise ValueError("keep set must be nonempty")
    if any(q < 1 or q > n for q in keep):
        raise ValueError(f"keep set {keep} outside register 1..{n}")
    drop = [q for q in range(1, n + 1) if q not in keep]
    if not drop:
        return rho
    t = rho.matrix.reshape([2] * (2 * n))
    perm = [q - 1 for q in keep] + [q - 1 for q in drop]
    t = t.transpose(perm + [n + p for p in perm])
    dk = 2 ** len(keep)
    dd = 2 ** len(drop)
    t = t.reshape(dk, dd, dk, dd)
    reduced = np.einsum("abcb->ac", t)
    return DensityMatrix(len(keep), reduced)


def partial_transpose(rho: DensityMatrix, cut: int) -> np.ndarray:
    """Transpose the indices of the second group of the bipartition
    (qubits 1..cut | cut+1..n)."""
    n = rho.num_qubits
    if not 1 <= cut < n:
        raise ValueError(f"cut must satisfy 1 <= cut < {n}, got {cut}")
    da = 2 ** cut
    db = 2 ** (n - cut)
    t = rho.matrix.reshape(da, db, da, db)
    return np.ascontiguousarray(t.transpose(0, 3, 2, 1).reshape(da * db, da * db))


def _jacobi_rotate(a: np.ndarray, p: int, q: int) -> None:
    """One cyclic-Jacobi rotation zeroing the (p, q) entry of Hermitian a, in place."""
    g = a[p, q]
    absg = abs(g)
    phase = g / absg
    theta = 0.5 * math.atan2(2.0 * absg, (a[p, p] - a[q, q]).real)
    c = math.cos(theta)
    s = math.sin(theta)
    # A <- U^dagger A U with the (p, q) block of U equal to
    # [[c, -s e^{i phi}], [s e^{-i phi}, c]], phi = arg(a[p, q]).
    col_p = c * a[:, p] + (s * np.conj(phase)) * a[:, q]
    col_q = (-s * phase) * a[:, p] + c * a[:, q]
    a[:, p] = col_p
    a[:, q] = col_q
    row_p = c * a[p, :] + (s * phase) * a[q, :]
    row_q = (-s * np.conj(phase)) * a[p, :] + c * a[q, :]
    a[p, :] = row_p
    a[q, :] = row_q
    a[p, q] = 0.0
    a[q, p] = 0.0
    a[p, p] = a[p, p].real
    a[q, q] = a[q, q].real


def hermitian_eigenvalues(h, max_sweeps: int = JACOBI_MAX_SWEEPS) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix by cyclic Jacobi rotations, ascending.

    Convergence: off-diagonal Frobenius norm below 1e-12 (relative to the
    input's Frobenius norm); raises if not reached within ``max_sweeps``.
    """
    a = _as_complex(h).copy()
    n = a.shape[0]
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not is_hermitian(a, atol=ATOL_HERMITIAN):
        dev = float(np.max(np.abs(a - a.conj().T)))
        raise ValueError(f"matrix is not Hermitian: max |a - a^dagger| = {dev!r}")
    a = 0.5 * (a + a.conj().T)
    threshold = JACOBI_OFF_TOL * max(1.0, float(np.linalg.norm(a)))
    rotate_floor = threshold / (4.0 * n * n)
    for _ in range(max_sweeps):
        off = float(np.linalg.norm(a - np.diag(np.diag(a))))
        if off < threshold:
            return np.sort(np.diag(a).real)
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p, q]) > rotate_floor:
                    _jacobi_rotate(a, p, q)
    raise RuntimeError(f"Jacobi eigensolver did not converge within {max_sweeps} sweeps")


def negativity(rho: DensityMatrix, cut: int) -> float:
    """Entanglement negativity: -2 times the sum of the negative eigenvalues
    of the partial transpose across the given cut. Nonnegative by construction."""
    eigs = hermitian_eigenvalues(partial_transpose(rho, cut))
    return float(-2.0 * eigs[eigs < 0].sum())


def realignment(m) -> np.ndarray:
    """Realigned matrix R with R[(i,j),(k,l)] = M[(i,k),(j,l)] for 4x4 M."""
    m = _as_complex(m)
    if m.shape != (4, 4):
        raise ValueError(f"realignment requires a 4x4 matrix, got shape {m.shape}")
    return np.ascontiguousarray(m.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4))


def realignment_singular_values(m) -> np.ndarray:
    """Singular values of the realigned matrix, descending.

    Computed from the Hermitian eigenvalues of R^dagger R; a two-qubit
    operator is a tensor product iff exactly one value is nonzero.
    """
    r = realignment(m)
    eigs = hermitian_eigenvalues(r.conj().T @ r)
    s = np.sqrt(np.clip(eigs, 0.0, None))[::-1]
    fro_sq = float(np.sum(np.abs(m) ** 2))
    if abs(float(np.sum(s ** 2)) - fro_sq) > ATOL_SPECTRAL * max(1.0, fro_sq):
        raise RuntimeError("realignment singular values violate the Frobenius identity")
    return s


def fidelity_pure(rho: DensityMatrix, psi: StateVector) -> float:
    """Overlap <psi| rho |psi>."""
    if rho.dim != psi.dim:
        raise ValueError(f"dimension mismatch: rho is {rho.dim}, psi is {psi.dim}")
    val = complex(psi.amplitudes.conj() @ rho.matrix @ psi.amplitudes)
    if abs(val.imag) > ATOL_ENTRY:
        raise RuntimeError(f"fidelity has spurious imaginary part {val.imag!r}")
    return float(val.real)


def trace_distance(a, b) -> float:
    """(1/2) ||a - b||_1 for Hermitian a, b."""
    diff = _as_complex(a) - _as_complex(b)
    eigs = hermitian_eigenvalues(diff)
    return float(0.5 * np.sum(np.abs(eigs)))
