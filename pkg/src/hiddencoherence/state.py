"""Two-qubit density matrices: validation, example families and JSON I/O."""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .matcore import (
    TOL_EIG,
    TOL_HERM,
    TOL_UNITARY,
    DimensionError,
    adjoint,
    hermiticity_defect,
    hermitian_eig,
    is_unitary,
)

TOL_PSD = 1e-9
TOL_TRACE_INPUT = 1e-6


class StateError(ValueError):
    """Base class for rejected state input."""


class NonHermitianStateError(StateError):
    pass


class TraceNotOneError(StateError):
    pass


class NotPSDError(StateError):
    pass


class DomainError(StateError):
    pass


class NotUnitaryError(ValueError):
    pass


class StateFileError(StateError):
    pass


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated 4x4 density matrix of subsystems A (x) B.

    Build instances through :func:`validate` or one of the family
    constructors; the wrapped array is read-only.
    """

    mat: np.ndarray

    def __post_init__(self):
        m = np.array(self.mat, dtype=complex, copy=True)
        m.setflags(write=False)
        object.__setattr__(self, "mat", m)

    def __repr__(self):
        return f"DensityMatrix({np.array2string(self.mat, precision=4)})"


@dataclass(frozen=True)
class SpectralDecomposition:
    lambdas: np.ndarray
    V: np.ndarray


class FamilyId(enum.Enum):
    MNMS = "mnms"
    MEMS = "mems"
    EXC = "exc"
    WERNER = "werner"
    GENWERNER = "gen-werner"
    PURE_SCHMIDT = "pure-schmidt"


def _hermitize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + adjoint(m))


def validate(m) -> DensityMatrix:
    """Check a 4x4 matrix is a density matrix and return it as one.

    Eigenvalues in ``[-TOL_PSD, 0)`` are clamped to zero and the trace is
    renormalised; anything further from a valid state raises.
    """
    m = np.asarray(m, dtype=complex)
    if m.shape != (4, 4):
        raise DimensionError(f"state must be 4x4, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise StateError("state has non-finite entries")
    if hermiticity_defect(m) > TOL_HERM:
        raise NonHermitianStateError(
            f"state is not Hermitian (max |rho - rho^dag| = {hermiticity_defect(m):.3g})"
        )
    tr = np.trace(m).real
    if abs(tr - 1.0) > TOL_TRACE_INPUT:
        raise TraceNotOneError(f"trace is {tr!r}, expected 1")
    m = _hermitize(m)
    eig = hermitian_eig(m)
    lam_min = eig.values[-1]
    if lam_min < -TOL_PSD:
        raise NotPSDError(f"state has negative eigenvalue {lam_min:.3g}")
    if lam_min < 0:
        lam = np.clip(eig.values, 0.0, None)
        m = (eig.vectors * lam) @ adjoint(eig.vectors)
        m = _hermitize(m)
    m = m / np.trace(m).real
    return DensityMatrix(m)


def spectral(rho: DensityMatrix) -> SpectralDecomposition:
    """Descending eigenvalues and eigenvectors, ``rho = V diag(lambdas) V^dag``."""
    eig = hermitian_eig(rho.mat)
    lam = np.clip(eig.values, 0.0, None)
    lam = lam / lam.sum()
    return SpectralDecomposition(lambdas=lam, V=eig.vectors)


def apply_unitary(rho: DensityMatrix, u) -> DensityMatrix:
    u = np.asarray(u, dtype=complex)
    if u.shape != (4, 4):
        raise DimensionError(f"unitary must be 4x4, got shape {u.shape}")
    if not is_unitary(u, TOL_UNITARY):
        raise NotUnitaryError("matrix is not unitary")
    return DensityMatrix(_hermitize(u @ rho.mat @ adjoint(u)))


def purity_of(rho: DensityMatrix) -> float:
    return float(np.einsum("ij,ji->", rho.mat, rho.mat).real)


# --- example families -------------------------------------------------------

def _check_unit(name: str, x: float) -> float:
    x = float(x)
    if not (0.0 <= x <= 1.0) or math.isnan(x):
        raise DomainError(f"{name}={x!r} outside [0, 1]")
    return x


PHI_PLUS = np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2)
PHI_MINUS = np.array([1, 0, 0, -1], dtype=complex) / math.sqrt(2)
PSI_PLUS = np.array([0, 1, 1, 0], dtype=complex) / math.sqrt(2)
PSI_MINUS = np.array([0, 1, -1, 0], dtype=complex) / math.sqrt(2)


def projector(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def mnms(eps: float) -> DensityMatrix:
    """Maximally nonlocal mixed state."""
    eps = _check_unit("eps", eps)
    m = np.zeros((4, 4), dtype=complex)
    m[0, 0] = m[3, 3] = 0.5
    m[0, 3] = m[3, 0] = eps / 2
    return DensityMatrix(m)


def mems(gamma: float) -> DensityMatrix:
    """Maximally entangled mixed state, with the branch split at gamma = 2/3."""
    g = _check_unit("gamma", gamma)
    m = np.zeros((4, 4), dtype=complex)
    if g <= 2 / 3:
        m[0, 0] = m[1, 1] = m[3, 3] = 1 / 3
    else:
        m[0, 0] = m[3, 3] = g / 2
        m[1, 1] = 1 - g
    m[0, 3] = m[3, 0] = g / 2
    return DensityMatrix(m)


def exc(p: float) -> DensityMatrix:
    p = _check_unit("p", p)
    m = 0.5 * np.array(
        [
            [1 - p, 0, 1 - p, 0],
            [0, p, 1j * p, 0],
            [1 - p, -1j * p, 1, 0],
            [0, 0, 0, 0],
        ],
        dtype=complex,
    )
    return DensityMatrix(m)


def werner(p: float) -> DensityMatrix:
    p = _check_unit("p", p)
    m = 0.25 * np.array(
        [
            [1 + p, 0, 0, 2 * p],
            [0, 1 - p, 0, 0],
            [0, 0, 1 - p, 0],
            [2 * p, 0, 0, 1 + p],
        ],
        dtype=complex,
    )
    return DensityMatrix(m)


def schmidt_vector(k1: float) -> np.ndarray:
    k1 = _check_unit("k1", k1)
    k2 = math.sqrt(max(0.0, 1.0 - k1 * k1))
    return np.array([k1, 0, 0, k2], dtype=complex)


def gen_werner(p: float, k1: float) -> DensityMatrix:
    """``(1-p)/4 I + p |Psi><Psi|`` with ``|Psi> = k1|00> + k2|11>``."""
    p = _check_unit("p", p)
    m = (1 - p) / 4 * np.eye(4, dtype=complex) + p * projector(schmidt_vector(k1))
    return DensityMatrix(m)


def pure_schmidt(k1: float) -> DensityMatrix:
    return DensityMatrix(projector(schmidt_vector(k1)))


def family_state(family: FamilyId | str, param: float, k1: float | None = None) -> DensityMatrix:
    """Construct a member of one of the named families.

    ``GENWERNER`` takes ``p`` as ``param`` and needs ``k1``; the other
    families ignore ``k1``.
    """
    family = FamilyId(family)
    if family is FamilyId.MNMS:
        return mnms(param)
    if family is FamilyId.MEMS:
        return mems(param)
    if family is FamilyId.EXC:
        return exc(param)
    if family is FamilyId.WERNER:
        return werner(param)
    if family is FamilyId.PURE_SCHMIDT:
        return pure_schmidt(param)
    if k1 is None:
        raise DomainError("gen-werner needs k1")
    return gen_werner(param, k1)


def random_density(seed: int, rank: int = 4) -> DensityMatrix:
    """Random state of the given rank.

    Eigenvalues are uniform on the (rank-1)-simplex, eigenvectors are the
    columns of a Haar unitary. Uses a PCG64 generator seeded with ``seed``.
    """
    from .unitaries import haar_unitary

    if rank not in (1, 2, 3, 4):
        raise ValueError(f"rank must be 1..4, got {rank}")
    rng = np.random.Generator(np.random.PCG64(seed))
    lam = np.zeros(4)
    lam[:rank] = rng.dirichlet(np.ones(rank))
    u = haar_unitary(rng)
    return DensityMatrix(_hermitize((u * lam) @ adjoint(u)))


# --- JSON state files ---------------------------------------------------------

def state_to_json(rho: DensityMatrix | np.ndarray) -> list:
    m = rho.mat if isinstance(rho, DensityMatrix) else np.asarray(rho)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def matrix_from_json(data) -> np.ndarray:
    """Decode a 4x4 array of ``[re, im]`` pairs."""
    if not isinstance(data, list) or len(data) != 4:
        raise StateFileError("bad shape: 'rho' must be a 4x4 array of [re, im] pairs")
    out = np.empty((4, 4), dtype=complex)
    for i, row in enumerate(data):
        if not isinstance(row, list) or len(row) != 4:
            raise StateFileError("bad shape: 'rho' must be a 4x4 array of [re, im] pairs")
        for j, pair in enumerate(row):
            if not isinstance(pair, list) or len(pair) != 2:
                raise StateFileError(f"bad shape: entry ({i}, {j}) is not an [re, im] pair")
            try:
                re, im = float(pair[0]), float(pair[1])
            except (TypeError, ValueError):
                raise StateFileError(f"entry ({i}, {j}) is not numeric") from None
            if not (math.isfinite(re) and math.isfinite(im)):
                raise StateFileError(f"non-finite entry at ({i}, {j})")
            out[i, j] = complex(re, im)
    return out


def state_from_json(doc) -> DensityMatrix:
    if not isinstance(doc, dict) or "rho" not in doc:
        raise StateFileError("state document needs a 'rho' key")
    return validate(matrix_from_json(doc["rho"]))


def load_state(path: str | Path) -> DensityMatrix:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc_:
        raise StateFileError(f"{path}: invalid JSON ({exc_})") from None
    return state_from_json(doc)


def save_state(rho: DensityMatrix, path: str | Path) -> None:
    Path(path).write_text(json.dumps({"rho": state_to_json(rho)}, indent=1) + "\n")


__all__ = [
    "DensityMatrix",
    "DomainError",
    "FamilyId",
    "NonHermitianStateError",
    "NotPSDError",
    "NotUnitaryError",
    "SpectralDecomposition",
    "StateError",
    "StateFileError",
    "TOL_EIG",
    "TOL_PSD",
    "TraceNotOneError",
    "apply_unitary",
    "exc",
    "family_state",
    "gen_werner",
    "load_state",
    "mems",
    "mnms",
    "pure_schmidt",
    "random_density",
    "save_state",
    "spectral",
    "state_from_json",
    "state_to_json",
    "validate",
    "werner",
]
