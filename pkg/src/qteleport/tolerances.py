"""Numerical tolerances shared across the package.

Kept in one place so tests can cite the exact values.
"""

# Entrywise matrix/vector comparisons, norms, traces.
ATOL_ENTRY = 1e-12

# Eigenvalue and singular-value comparisons.
ATOL_SPECTRAL = 1e-10

# Hermiticity check before eigensolving.
ATOL_HERMITIAN = 1e-10

# Jacobi eigensolver: off-diagonal Frobenius norm at convergence
# (scaled by the Frobenius norm of the input) and sweep cap.
JACOBI_OFF_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100

# Allowed negative slack on density-matrix eigenvalues.
MIN_EIGENVALUE = -1e-10

# Below this, a forced branch is reported as structurally impossible
# rather than a rounding artifact.
ZERO_PROBABILITY = 1e-14

# Product test: threshold on the second realignment singular value and
# on the Frobenius residual against the extracted tensor factors.
PRODUCT_TOL = 1e-8
