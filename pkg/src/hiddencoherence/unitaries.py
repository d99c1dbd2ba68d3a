"""Random 4x4 unitaries: Haar (Ginibre + QR) and Jarlskog's recursive form."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

N = 4
#: number of phases in the leading diagonal factor
N_PHASES = N
#: real parameters per complex vector z_k, k = 2..N (vector length k-1)
N_PARAMS = N * N

PHASE_RANGE = (-math.pi, math.pi)
Z_RANGE = (-math.pi / 2, math.pi / 2)


def haar_unitaries(rng: np.random.Generator, n: int) -> np.ndarray:
    """``n`` Haar-distributed 4x4 unitaries, shape ``(n, 4, 4)``.

    QR of a complex Ginibre matrix, with the columns rephased so that R has a
    positive diagonal (otherwise the distribution is not Haar).
    """
    g = rng.standard_normal((n, N, N, 2))
    z = (g[..., 0] + 1j * g[..., 1]) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (d / np.abs(d))[..., None, :]


def haar_unitary(rng: np.random.Generator) -> np.ndarray:
    return haar_unitaries(rng, 1)[0]


@dataclass(frozen=True)
class JarlskogParams:
    """Sixteen real parameters of a 4x4 unitary.

    ``values[0:4]`` are the phases of the left diagonal factor, each in
    ``[-pi, pi]``. The remaining twelve are the real and imaginary parts of the
    complex vectors ``z_2`` (1 entry), ``z_3`` (2) and ``z_4`` (3), stored as
    ``re, im`` pairs, each part in ``[-pi/2, pi/2]``.

    The unitary is ``diag(e^{i phi}) A_2 A_3 A_4`` where ``A_k`` is the
    ``k x k`` block ``exp([[0, z_k], [-z_k^dag, 0]])`` embedded in the upper-left
    corner. The box covers every unitary (|z_k| reaches pi/2 in every
    direction) but is not a one-to-one chart. All zeros give the identity.
    """

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float, copy=True).reshape(-1)
        if v.shape != (N_PARAMS,):
            raise ValueError(f"expected {N_PARAMS} parameters, got {v.size}")
        check_jarlskog_range(v)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def zero(cls) -> "JarlskogParams":
        return cls(np.zeros(N_PARAMS))


def check_jarlskog_range(v: np.ndarray) -> None:
    v = np.asarray(v)
    if not np.all(np.isfinite(v)):
        raise ValueError("Jarlskog parameters must be finite")
    ph = v[..., :N_PHASES]
    z = v[..., N_PHASES:]
    if np.any(ph < PHASE_RANGE[0]) or np.any(ph > PHASE_RANGE[1]):
        raise ValueError("phase parameter outside [-pi, pi]")
    if np.any(z < Z_RANGE[0]) or np.any(z > Z_RANGE[1]):
        raise ValueError("z parameter outside [-pi/2, pi/2]")


def _interleave_block(z: np.ndarray) -> np.ndarray:
    """``exp([[0, z], [-z^dag, 0]])`` for a stack of complex vectors ``z``.

    Closed form with theta = |z|:
    ``[[I - (1 - cos theta) zhat zhat^dag, sin theta zhat], [-sin theta zhat^dag, cos theta]]``,
    written with sinc so that theta = 0 needs no special case.
    """
    m = z.shape[-1]
    theta = np.sqrt(np.sum(np.abs(z) ** 2, axis=-1))
    sin_over = np.sinc(theta / math.pi)  # sin(theta)/theta
    one_minus_cos_over = 0.5 * np.sinc(theta / (2 * math.pi)) ** 2  # (1-cos)/theta^2
    out = np.zeros(z.shape[:-1] + (m + 1, m + 1), dtype=complex)
    out[..., :m, :m] = np.eye(m) - one_minus_cos_over[..., None, None] * (
        z[..., :, None] * np.conj(z[..., None, :])
    )
    out[..., :m, m] = sin_over[..., None] * z
    out[..., m, :m] = -sin_over[..., None] * np.conj(z)
    out[..., m, m] = np.cos(theta)
    return out


def jarlskog_unitaries(values: np.ndarray) -> np.ndarray:
    """Unitaries for a stack of parameter vectors, shape ``(..., 16)``."""
    v = np.asarray(values, dtype=float)
    check_jarlskog_range(v)
    batch = v.shape[:-1]
    u = np.broadcast_to(np.eye(N, dtype=complex), batch + (N, N)).copy()
    pos = N_PHASES
    for k in range(2, N + 1):
        pairs = v[..., pos:pos + 2 * (k - 1)]
        pos += 2 * (k - 1)
        z = pairs[..., 0::2] + 1j * pairs[..., 1::2]
        block = np.broadcast_to(np.eye(N, dtype=complex), batch + (N, N)).copy()
        block[..., :k, :k] = _interleave_block(z)
        u = u @ block
    phases = np.exp(1j * v[..., :N_PHASES])
    return phases[..., :, None] * u


def jarlskog_unitary(p: JarlskogParams) -> np.ndarray:
    return jarlskog_unitaries(p.values)


def sample_jarlskog_values(rng: np.random.Generator, n: int, delta: float | None = None) -> np.ndarray:
    """Draw ``n`` parameter vectors uniformly over their ranges.

    With ``delta`` given, every parameter is instead uniform in ``[-delta, delta]``
    (a neighbourhood of the identity).
    """
    if delta is not None:
        if delta < 0:
            raise ValueError("delta must be non-negative")
        if delta > Z_RANGE[1]:
            raise ValueError("delta exceeds the parameter range")
        return rng.uniform(-delta, delta, size=(n, N_PARAMS))
    lo = np.r_[np.full(N_PHASES, PHASE_RANGE[0]), np.full(N_PARAMS - N_PHASES, Z_RANGE[0])]
    hi = np.r_[np.full(N_PHASES, PHASE_RANGE[1]), np.full(N_PARAMS - N_PHASES, Z_RANGE[1])]
    return rng.uniform(lo, hi, size=(n, N_PARAMS))
