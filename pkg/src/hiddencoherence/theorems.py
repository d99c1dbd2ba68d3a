"""Optimal global unitaries and the closed-form extremes they attain.

Everything here depends on the state only through its descending eigenvalues
``l1 >= l2 >= l3 >= l4``:

* ``U = M V^dag`` sends the state to the Bell-diagonal state with the same
  spectrum: both reduced states become maximally mixed and the CHSH value
  peaks at ``2 sqrt2 sqrt((l1-l4)^2 + (l2-l3)^2)``.
* ``U = V^dag`` sends it to ``diag(l1, l2, l3, l4)``: subsystem coherence peaks at
  ``D^2 = (l1-l4)^2 + (l2-l3)^2`` and the CHSH value drops to
  ``2 |l1 - l2 - l3 + l4|``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .matcore import adjoint
from .state import DensityMatrix, DomainError, FamilyId, apply_unitary, spectral

SQRT2 = math.sqrt(2.0)
TOL_SPECTRUM = 1e-9


class SpectrumError(ValueError):
    pass


@dataclass(frozen=True)
class BoundSet:
    d2_max: float
    bmax_upper: float
    bmax_lower: float
    c_bd: float
    c_max: float
    s_min: float
    s_max: float
    tcal_lower: float
    tcal_upper: float

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class TransformResult:
    u: np.ndarray
    state: DensityMatrix


def _check_lambdas(lambdas) -> np.ndarray:
    lam = np.asarray(lambdas, dtype=float)
    if lam.shape != (4,) or not np.all(np.isfinite(lam)):
        raise SpectrumError(f"expected four finite eigenvalues, got {lambdas!r}")
    if np.any(lam < -TOL_SPECTRUM):
        raise SpectrumError("eigenvalues must be non-negative")
    if np.any(np.diff(lam) > TOL_SPECTRUM):
        raise SpectrumError("eigenvalues must be in descending order")
    if abs(lam.sum() - 1.0) > TOL_SPECTRUM:
        raise SpectrumError(f"eigenvalues sum to {lam.sum()!r}, expected 1")
    return np.clip(lam, 0.0, None)


def bounds(lambdas) -> BoundSet:
    """All closed-form extremes over the unitary orbit of a spectrum."""
    l1, l2, l3, l4 = (float(x) for x in _check_lambdas(lambdas))
    p = l1 * l1 + l2 * l2 + l3 * l3 + l4 * l4
    d2_max = (l1 - l4) ** 2 + (l2 - l3) ** 2
    return BoundSet(
        d2_max=d2_max,
        bmax_upper=2.0 * SQRT2 * math.sqrt(d2_max),
        bmax_lower=2.0 * abs(l1 - l2 - l3 + l4),
        c_bd=max(0.0, 2.0 * l1 - 1.0),
        c_max=max(0.0, l1 - l3 - 2.0 * math.sqrt(l2 * l4)),
        s_min=p - (l1 + l4) * (l2 + l3),
        s_max=p - 2.0 * (l1 * l4 + l2 * l3),
        tcal_lower=((l1 + l4) ** 2 + (l2 + l3) ** 2) / 2.0,
        tcal_upper=p,
    )


_M = np.array(
    [
        [1, 1, 0, 0],
        [0, 0, 1, 1],
        [0, 0, 1, -1],
        [1, -1, 0, 0],
    ],
    dtype=complex,
) / SQRT2
_M.setflags(write=False)


def bell_basis_matrix() -> np.ndarray:
    """Unitary whose columns are Phi+, Phi-, Psi+, Psi- in the computational basis."""
    return _M.copy()


def bell_diagonal(lambdas) -> DensityMatrix:
    """``l1 Phi+ + l2 Phi- + l3 Psi+ + l4 Psi-`` written out in the computational basis."""
    l1, l2, l3, l4 = _check_lambdas(lambdas)
    m = np.zeros((4, 4), dtype=complex)
    m[0, 0] = m[3, 3] = (l1 + l2) / 2
    m[0, 3] = m[3, 0] = (l1 - l2) / 2
    m[1, 1] = m[2, 2] = (l3 + l4) / 2
    m[1, 2] = m[2, 1] = (l3 - l4) / 2
    return DensityMatrix(m / np.trace(m).real)


def min_coherence_transform(rho: DensityMatrix) -> TransformResult:
    """Apply ``U = M V^dag``: zero subsystem coherence, maximal CHSH value."""
    v = spectral(rho).V
    u = _M @ adjoint(v)
    return TransformResult(u=u, state=apply_unitary(rho, u))


def max_coherence_transform(rho: DensityMatrix) -> TransformResult:
    """Apply ``U = V^dag``: diagonal separable state, maximal coherence, minimal CHSH value."""
    u = adjoint(spectral(rho).V)
    return TransformResult(u=u, state=apply_unitary(rho, u))


def family_spectrum(family: FamilyId | str, param: float, k1: float | None = None) -> np.ndarray:
    """Analytic descending eigenvalues of a family member."""
    family = FamilyId(family)
    x = float(param)
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"parameter {x!r} outside [0, 1]")
    if family is FamilyId.MNMS:
        lam = [(1 + x) / 2, (1 - x) / 2, 0.0, 0.0]
    elif family is FamilyId.MEMS:
        if x <= 2 / 3:
            lam = [1 / 3 + x / 2, 1 / 3, 1 / 3 - x / 2, 0.0]
        else:
            lam = [x, 1 - x, 0.0, 0.0]
    elif family is FamilyId.EXC:
        # rank two, so the purity fixes both eigenvalues
        gap = math.sqrt(1 - 3 * x + 3 * x * x)
        lam = [(1 + gap) / 2, (1 - gap) / 2, 0.0, 0.0]
    elif family in (FamilyId.WERNER, FamilyId.GENWERNER):
        if family is FamilyId.GENWERNER and (k1 is None or not 0.0 <= k1 <= 1.0):
            raise DomainError("gen-werner needs k1 in [0, 1]")
        q = (1 - x) / 4
        lam = [(1 + 3 * x) / 4, q, q, q]
    else:
        lam = [1.0, 0.0, 0.0, 0.0]
    return np.array(lam)


def family_bounds(family: FamilyId | str, param: float, k1: float | None = None) -> BoundSet:
    return bounds(family_spectrum(family, param, k1))
