"""Dense complex linear algebra for small multipartite Hilbert spaces.

States and operators are plain ``numpy`` complex128 square matrices; the
subsystem structure travels separately as a tuple of dimensions. Subsystem 0
is the leftmost tensor factor, i.e. the most significant digit of the basis
index (the standard Kronecker-product convention).
"""

from __future__ import annotations

import math

import numpy as np

HERMITICITY_TOL = 1e-10
EIGENVALUE_CLAMP = 1e-10
TRACE_TOL = 1e-9


def as_matrix(m) -> np.ndarray:
    """Coerce input to a square complex128 matrix."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a


def check_dims(dim: int, dims) -> tuple[int, ...]:
    """Validate subsystem dimensions against the total Hilbert-space dimension."""
    out = tuple(int(d) for d in dims)
    if not out or any(d < 2 for d in out):
        raise ValueError(f"subsystem dimensions must all be >= 2, got {out}")
    if math.prod(out) != dim:
        raise ValueError(f"subsystem dimensions {out} do not multiply to {dim}")
    return out


def hermiticity_defect(m) -> float:
    m = np.asarray(m)
    return float(np.abs(m - m.conj().T).max())


def require_hermitian(m, tol: float = HERMITICITY_TOL, what: str = "matrix") -> np.ndarray:
    """Check Hermiticity within ``tol`` and return the symmetrized matrix."""
    m = as_matrix(m)
    defect = hermiticity_defect(m)
    if defect > tol:
        raise ValueError(f"{what} is not Hermitian: max|M - M^dag| = {defect:.3e}")
    return 0.5 * (m + m.conj().T)


def kron(a, b) -> np.ndarray:
    """Kronecker product; the left factor becomes the more significant subsystem."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def partial_trace(rho, dims, keep) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep``.

    Kept subsystems stay in their original relative order, and the trace of
    the input is preserved.
    """
    rho = as_matrix(rho)
    dims = check_dims(rho.shape[0], dims)
    n = len(dims)
    keep_idx = sorted({int(k) for k in keep})
    if not keep_idx:
        raise ValueError("keep set must be nonempty")
    if keep_idx[0] < 0 or keep_idx[-1] >= n:
        raise ValueError(f"keep indices {keep_idx} out of range for {n} subsystems")
    t = rho.reshape(dims + dims)
    for i in sorted(set(range(n)) - set(keep_idx), reverse=True):
        t = np.trace(t, axis1=i, axis2=i + t.ndim // 2)
    d = math.prod(dims[i] for i in keep_idx)
    return np.ascontiguousarray(t.reshape(d, d))


def partial_transpose(rho, dims, transposed) -> np.ndarray:
    """Transpose the listed subsystems only. Applying it twice is the identity."""
    rho = as_matrix(rho)
    dims = check_dims(rho.shape[0], dims)
    n = len(dims)
    tset = sorted({int(i) for i in transposed})
    if tset and (tset[0] < 0 or tset[-1] >= n):
        raise ValueError(f"transpose indices {tset} out of range for {n} subsystems")
    t = rho.reshape(dims + dims)
    for i in tset:
        t = np.swapaxes(t, i, i + n)
    return np.ascontiguousarray(t.reshape(rho.shape))


def eig_hermitian(h, tol: float = HERMITICITY_TOL):
    """Eigendecomposition of a Hermitian matrix.

    The input is symmetrized as (H + H^dag)/2 after the Hermiticity check.
    Returns (eigenvalues ascending, matrix of eigenvector columns).
    """
    h = require_hermitian(h, tol)
    return np.linalg.eigh(h)


def eigvals_hermitian(h, tol: float = HERMITICITY_TOL) -> np.ndarray:
    """Ascending eigenvalues of a Hermitian matrix."""
    return np.linalg.eigvalsh(require_hermitian(h, tol))


def trace_norm_hermitian(h) -> float:
    """Trace norm (sum of absolute eigenvalues) of a Hermitian matrix."""
    return float(np.abs(eigvals_hermitian(h)).sum())


def purity(rho) -> float:
    rho = as_matrix(rho)
    return float(np.real(np.trace(rho @ rho)))


def von_neumann_entropy(rho) -> float:
    """Spectral entropy -sum(lam log2 lam) in bits, with 0 log 0 := 0.

    Requires unit trace within 1e-9 and positive semidefiniteness within
    -1e-10. Eigenvalues in [-1e-10, 0) are clamped to zero; anything more
    negative is an error, not a clamp.
    """
    rho = as_matrix(rho)
    tr = np.trace(rho)
    if abs(tr - 1.0) > TRACE_TOL:
        raise ValueError(f"not unit trace: tr = {tr:.12g}")
    lam = eigvals_hermitian(rho)
    if lam[0] < -EIGENVALUE_CLAMP:
        raise ValueError(f"not positive semidefinite: min eigenvalue {lam[0]:.3e}")
    lam = lam[lam > 0.0]
    if lam.size == 0:
        return 0.0
    return float(-(lam * np.log2(lam)).sum())


def binary_entropy(x: float) -> float:
    """Shannon entropy of a bit, h(x) = -x log2 x - (1-x) log2(1-x)."""
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return float(-x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x))
