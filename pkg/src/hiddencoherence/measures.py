"""Scalar measures of two-qubit states.

Every public function takes a :class:`DensityMatrix`. The ``*_batch``
variants work on raw stacks of shape ``(n, 4, 4)`` and are what the sampler
uses; the single-state functions are thin wrappers around them so both paths
give identical numbers.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .matcore import PAULIS, SIGMA_Y, hermitian_eig, singular_values, sym_eig3
from .state import DensityMatrix

SQRT2 = math.sqrt(2.0)

# 9 x 4 x 4 stack of sigma_i (x) sigma_j, row-major in (i, j)
_PAULI_PAIRS = np.array([np.kron(a, b) for a in PAULIS for b in PAULIS])
_YY = np.kron(SIGMA_Y, SIGMA_Y)


@dataclass(frozen=True)
class CoherenceReport:
    d_a: float
    d_b: float
    d_sq: float
    purity: float
    bmax: float
    concurrence: float
    tcal: float
    s_a: float
    s_b: float
    s_comb: float
    t: np.ndarray

    def to_dict(self) -> dict:
        d = asdict(self)
        d["t"] = [[float(x) for x in row] for row in self.t]
        return d


def _stack(mats) -> np.ndarray:
    m = np.asarray(mats, dtype=complex)
    return m[None] if m.ndim == 2 else m


# --- batch kernels -------------------------------------------------------------

def _bloch_sq(r2: np.ndarray) -> np.ndarray:
    # 2 Tr r^2 - 1 for a unit-trace 2x2 r, in a form without cancellation
    return (r2[:, 0, 0].real - r2[:, 1, 1].real) ** 2 + 4.0 * np.abs(r2[:, 0, 1]) ** 2


def coherence_batch(mats):
    """(d_a, d_b, d_sq) arrays for a stack of states.

    ``D^2 = 2 Tr rho_X^2 - 1`` is evaluated as the squared Bloch vector
    length of the reduced state, so coherence-free states give exactly tiny
    values instead of ~1e-15 rounding residue.
    """
    r = _stack(mats).reshape(-1, 2, 2, 2, 2)
    da2 = _bloch_sq(np.einsum("nijkj->nik", r))
    db2 = _bloch_sq(np.einsum("nijil->njl", r))
    return np.sqrt(da2), np.sqrt(db2), 0.5 * (da2 + db2)


def correlation_tensor_batch(mats) -> np.ndarray:
    m = _stack(mats)
    t = np.einsum("kij,nji->nk", _PAULI_PAIRS, m).real
    return t.reshape(-1, 3, 3)


def bmax_from_tensor(t: np.ndarray) -> np.ndarray:
    """Horodecki value ``2 sqrt(mu_1 + mu_2)``, mu the two largest eigenvalues of T^T T."""
    ttt = np.swapaxes(t, -1, -2) @ t
    mu = sym_eig3(ttt)
    return 2.0 * np.sqrt(np.maximum(0.0, mu[..., 0] + mu[..., 1]))


def bmax_batch(mats) -> np.ndarray:
    return bmax_from_tensor(correlation_tensor_batch(mats))


def tcal_from_tensor(t: np.ndarray) -> np.ndarray:
    return 0.25 * (1.0 + np.sum(t * t, axis=(-2, -1)))


def s_comb_from(d_a, d_b, bmax):
    return (d_a**2 + d_b**2) / 4.0 + (bmax / (2.0 * SQRT2)) ** 2


def sample_measures_batch(mats):
    """(d_sq, bmax, s_comb) for a stack of states."""
    d_a, d_b, d_sq = coherence_batch(mats)
    bm = bmax_batch(mats)
    return d_sq, bm, s_comb_from(d_a, d_b, bm)


# --- single-state API -------------------------------------------------------------

def coherence(rho: DensityMatrix) -> tuple[float, float, float]:
    """First-order coherences ``D_A``, ``D_B`` and ``D^2 = (D_A^2 + D_B^2)/2``."""
    d_a, d_b, d_sq = coherence_batch(rho.mat)
    return float(d_a[0]), float(d_b[0]), float(d_sq[0])


def purity(rho: DensityMatrix) -> float:
    return float(np.einsum("ij,ji->", rho.mat, rho.mat).real)


def correlation_tensor(rho: DensityMatrix) -> np.ndarray:
    """``t[i, j] = Tr[rho sigma_i (x) sigma_j]`` with sigma_1..3 = X, Y, Z."""
    return correlation_tensor_batch(rho.mat)[0]


def bmax(rho: DensityMatrix) -> float:
    return float(bmax_batch(rho.mat)[0])


def tcal(rho: DensityMatrix) -> float:
    return float(tcal_from_tensor(correlation_tensor(rho)))


def concurrence(rho: DensityMatrix) -> float:
    """Wootters concurrence ``max(0, s1 - s2 - s3 - s4)``.

    The ``s_i`` are the square roots of the eigenvalues of the non-Hermitian
    ``rho (Y x Y) rho* (Y x Y)``. They are computed as the singular values of
    ``tau = W^T (Y x Y) W`` with ``rho = W W^dag``, ``W = V sqrt(diag(lambda))``;
    ``tau tau^dag`` is similar to ``sqrt(rho) rho~ sqrt(rho)``, and taking the
    singular values directly avoids squaring them.
    """
    eig = hermitian_eig(rho.mat)
    w = eig.vectors * np.sqrt(np.clip(eig.values, 0.0, None))
    tau = w.T @ _YY @ w
    s = singular_values(tau)
    return float(max(0.0, s[0] - s[1] - s[2] - s[3]))


def s_params(rho: DensityMatrix) -> tuple[float, float, float]:
    """Per-subsystem ``S_A``, ``S_B`` and the averaged ``S``.

    ``S_X = D_X^2/2 + (Bmax/2sqrt2)^2``; the combined value averages the two
    coherence terms: ``(D_A^2 + D_B^2)/4 + (Bmax/2sqrt2)^2``.
    """
    d_a, d_b, _ = coherence(rho)
    return _s_values(d_a, d_b, bmax(rho))


def _s_values(d_a, d_b, bm):
    corr = (bm / (2.0 * SQRT2)) ** 2
    return d_a**2 / 2.0 + corr, d_b**2 / 2.0 + corr, float(s_comb_from(d_a, d_b, bm))


def report(rho: DensityMatrix) -> CoherenceReport:
    d_a, d_b, d_sq = coherence(rho)
    t = correlation_tensor(rho)
    bm = bmax(rho)
    s_a, s_b, s_c = _s_values(d_a, d_b, bm)
    return CoherenceReport(
        d_a=d_a,
        d_b=d_b,
        d_sq=d_sq,
        purity=purity(rho),
        bmax=bm,
        concurrence=concurrence(rho),
        tcal=float(tcal_from_tensor(t)),
        s_a=s_a,
        s_b=s_b,
        s_comb=s_c,
        t=t,
    )
