"""Small dense linear algebra kernel for 2x2, 3x3 and 4x4 matrices.

Matrices are plain ``numpy`` arrays. The eigensolvers are cyclic Jacobi
iterations that also accept stacks of matrices with shape ``(..., n, n)``,
which is what the Monte Carlo sampler feeds them.

Basis convention: ``|i>_A |j>_B`` maps to index ``2*i + j``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TOL_HERM = 1e-10
TOL_UNITARY = 1e-10
TOL_EIG = 1e-12
MAX_SWEEPS = 64

_DIMS = (2, 3, 4)

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)

for _m in (I2, SIGMA_X, SIGMA_Y, SIGMA_Z):
    _m.setflags(write=False)


class DimensionError(ValueError):
    pass


class NonHermitianError(ValueError):
    pass


class EigenConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class HermEig:
    """Eigenvalues (descending) and eigenvectors (columns) of a Hermitian matrix."""

    values: np.ndarray
    vectors: np.ndarray


def as_cmatrix(a, dims=_DIMS) -> np.ndarray:
    """Coerce ``a`` to a finite square complex matrix of an allowed size."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] not in dims:
        raise DimensionError(f"expected a square matrix of size {dims}, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def matmul(a, b) -> np.ndarray:
    a = as_cmatrix(a)
    b = as_cmatrix(b)
    if a.shape != b.shape:
        raise DimensionError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a @ b


def adjoint(a) -> np.ndarray:
    return np.conj(np.swapaxes(np.asarray(a), -1, -2))


def kron2(a, b) -> np.ndarray:
    """Kronecker product of two 2x2 matrices; ``a`` acts on subsystem A (slow index)."""
    a = as_cmatrix(a, dims=(2,))
    b = as_cmatrix(b, dims=(2,))
    return np.kron(a, b)


def hermiticity_defect(h) -> float:
    h = np.asarray(h)
    return float(np.max(np.abs(h - adjoint(h)), initial=0.0))


def is_unitary(u, tol: float = TOL_UNITARY) -> bool:
    u = np.asarray(u)
    n = u.shape[-1]
    return bool(np.max(np.abs(adjoint(u) @ u - np.eye(n))) <= tol)


def partial_trace(rho, keep: str) -> np.ndarray:
    """Reduced 2x2 state of subsystem ``keep`` ('A' or 'B').

    Accepts a single 4x4 matrix or a stack ``(..., 4, 4)``.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape[-2:] != (4, 4):
        raise DimensionError(f"partial trace needs 4x4 input, got {rho.shape}")
    if hermiticity_defect(rho) > TOL_HERM:
        raise NonHermitianError("partial trace of a non-Hermitian matrix")
    r = rho.reshape(rho.shape[:-2] + (2, 2, 2, 2))
    if keep == "A":
        return np.einsum("...ijkj->...ik", r)
    if keep == "B":
        return np.einsum("...ijil->...jl", r)
    raise ValueError(f"keep must be 'A' or 'B', not {keep!r}")


def _jacobi(a: np.ndarray, tol: float, max_sweeps: int):
    """Cyclic Jacobi diagonalisation of a stack of Hermitian matrices.

    Each rotation first removes the phase of a[p, q] and then applies a real
    Givens rotation, so the combined plane rotation is
    ``G = [[c, s], [-s e^{-i phi}, c e^{-i phi}]]`` in the (p, q) plane.
    Returns (diagonal, accumulated unitary) without sorting.
    """
    a = np.array(a, copy=True)
    n = a.shape[-1]
    batch = a.shape[:-2]
    v = np.broadcast_to(np.eye(n, dtype=a.dtype), a.shape).copy()
    complex_input = np.iscomplexobj(a)
    offmask = ~np.eye(n, dtype=bool)

    def off_norm(x):
        return np.sqrt(np.sum(np.abs(x[..., offmask]) ** 2, axis=-1))

    sweeps = 0
    while np.any(off_norm(a) > tol):
        if sweeps >= max_sweeps:
            raise EigenConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                g = a[..., p, q]
                mag = np.abs(g)
                active = mag > 1e-300
                safe = np.where(active, mag, 1.0)
                app = a[..., p, p].real
                aqq = a[..., q, q].real
                tau = (aqq - app) / (2.0 * safe)
                sign = np.where(tau >= 0, 1.0, -1.0)
                t = sign / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                c = np.where(active, c, 1.0)
                s = np.where(active, s, 0.0)
                rot = np.broadcast_to(np.eye(n, dtype=a.dtype), batch + (n, n)).copy()
                if complex_input:
                    ph = np.where(active, np.conj(g) / safe, 1.0)
                else:
                    ph = np.where(active, np.sign(g), 1.0)
                rot[..., p, p] = c
                rot[..., p, q] = s
                rot[..., q, p] = -s * ph
                rot[..., q, q] = c * ph
                a = adjoint(rot) @ a @ rot
                v = v @ rot
    return np.diagonal(a, axis1=-2, axis2=-1).real.copy(), v


def _sorted_desc(values: np.ndarray, vectors: np.ndarray | None = None):
    order = np.argsort(-values, axis=-1, kind="stable")
    vals = np.take_along_axis(values, order, axis=-1)
    if vectors is None:
        return vals
    vecs = np.take_along_axis(vectors, order[..., None, :], axis=-1)
    return vals, vecs


def hermitian_eig(h, tol: float = TOL_EIG, max_sweeps: int = MAX_SWEEPS) -> HermEig:
    """Eigen-decomposition of a Hermitian 2x2/3x3/4x4 matrix (or a stack of them).

    Values are returned in descending order; column ``k`` of ``vectors`` is the
    eigenvector for ``values[..., k]``. Within a degenerate eigenspace the basis
    is whatever the rotations produce.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim < 2 or h.shape[-1] != h.shape[-2] or h.shape[-1] not in _DIMS:
        raise DimensionError(f"expected square matrices of size {_DIMS}, got shape {h.shape}")
    if not np.all(np.isfinite(h)):
        raise ValueError("matrix has non-finite entries")
    if hermiticity_defect(h) > TOL_HERM:
        raise NonHermitianError("hermitian_eig requires a Hermitian matrix")
    vals, vecs = _jacobi(0.5 * (h + adjoint(h)), tol, max_sweeps)
    vals, vecs = _sorted_desc(vals, vecs)
    return HermEig(values=vals, vectors=vecs)


def sym_eig3(s, tol: float = TOL_EIG, max_sweeps: int = MAX_SWEEPS) -> np.ndarray:
    """Descending eigenvalues of a real symmetric 3x3 matrix (or a stack)."""
    s = np.asarray(s)
    if np.iscomplexobj(s):
        if np.max(np.abs(s.imag), initial=0.0) > TOL_HERM:
            raise ValueError("sym_eig3 requires a real matrix")
        s = s.real
    s = s.astype(float)
    if s.ndim < 2 or s.shape[-2:] != (3, 3):
        raise DimensionError(f"expected 3x3 input, got shape {s.shape}")
    if np.max(np.abs(s - np.swapaxes(s, -1, -2)), initial=0.0) > TOL_HERM:
        raise NonHermitianError("sym_eig3 requires a symmetric matrix")
    vals, _ = _jacobi(0.5 * (s + np.swapaxes(s, -1, -2)), tol, max_sweeps)
    return _sorted_desc(vals)


def singular_values(a, tol: float = TOL_EIG, max_sweeps: int = MAX_SWEEPS) -> np.ndarray:
    """Descending singular values of a 2x2/3x3/4x4 complex matrix.

    Diagonalises the Hermitian embedding ``[[0, a], [a^dag, 0]]`` (eigenvalues
    ``+-s_i``) instead of ``a a^dag``, so small singular values keep absolute
    accuracy near machine epsilon rather than its square root.
    """
    a = as_cmatrix(a)
    n = a.shape[0]
    emb = np.zeros((2 * n, 2 * n), dtype=complex)
    emb[:n, n:] = a
    emb[n:, :n] = adjoint(a)
    vals, _ = _jacobi(emb, tol, max_sweeps)
    return np.clip(_sorted_desc(vals)[:n], 0.0, None)
