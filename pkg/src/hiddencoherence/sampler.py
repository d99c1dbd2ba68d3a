"""Monte Carlo exploration of the unitary orbit of a state.

Random streams
--------------
Sample ``i`` belongs to block ``i // BLOCK_SIZE``. Block ``b`` draws from
``Generator(PCG64(SeedSequence(seed, spawn_key=(b,))))``, consuming its
samples in order. Blocks are independent, so they can be spread over any
number of workers without changing a single output bit.
"""
from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .matcore import adjoint
from .measures import coherence_batch, sample_measures_batch
from .state import DensityMatrix
from .unitaries import (
    JarlskogParams,
    haar_unitaries,
    haar_unitary,
    jarlskog_unitaries,
    jarlskog_unitary,
    sample_jarlskog_values,
)

BLOCK_SIZE = 4096
TOL_DIAGONAL = 1e-10

__all__ = [
    "BLOCK_SIZE",
    "ExplorationResult",
    "JarlskogParams",
    "Measure",
    "SamplePoint",
    "block_generator",
    "explore",
    "haar_unitary",
    "jarlskog_unitary",
    "stationarity_check",
    "unitary_for_index",
]


class Measure(enum.Enum):
    HAAR = "haar"
    JARLSKOG = "jarlskog"


class SamplePoint(NamedTuple):
    d_sq: float
    bmax: float
    s_comb: float
    index: int


@dataclass(frozen=True, eq=False)
class ExplorationResult:
    """Sampled ``(d_sq, bmax, s_comb)`` values; ``values`` has shape ``(n, 3)``.

    The unitary behind row ``i`` is ``unitary_for_index(seed, i, measure)``.
    """

    values: np.ndarray
    n_samples: int
    seed: int
    measure: Measure

    @property
    def d_sq(self) -> np.ndarray:
        return self.values[:, 0]

    @property
    def bmax(self) -> np.ndarray:
        return self.values[:, 1]

    @property
    def s_comb(self) -> np.ndarray:
        return self.values[:, 2]

    @property
    def observed_d2_max(self) -> float:
        return float(self.d_sq.max())

    @property
    def observed_d2_min(self) -> float:
        return float(self.d_sq.min())

    @property
    def observed_bmax_max(self) -> float:
        return float(self.bmax.max())

    @property
    def observed_bmax_min(self) -> float:
        return float(self.bmax.min())

    def point(self, i: int) -> SamplePoint:
        d, b, s = self.values[i]
        return SamplePoint(float(d), float(b), float(s), int(i))

    @property
    def points(self) -> list[SamplePoint]:
        return [self.point(i) for i in range(self.n_samples)]

    def same_as(self, other: "ExplorationResult") -> bool:
        return (
            self.n_samples == other.n_samples
            and self.seed == other.seed
            and self.measure == other.measure
            and np.array_equal(self.values, other.values)
        )


def block_generator(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(block,))))


def _draw_unitaries(rng: np.random.Generator, n: int, measure: Measure) -> np.ndarray:
    if measure is Measure.HAAR:
        return haar_unitaries(rng, n)
    return jarlskog_unitaries(sample_jarlskog_values(rng, n))


def unitary_for_index(seed: int, index: int, measure: Measure | str = Measure.HAAR) -> np.ndarray:
    """Regenerate the unitary used for sample ``index`` of :func:`explore`."""
    measure = Measure(measure)
    block, offset = divmod(index, BLOCK_SIZE)
    return _draw_unitaries(block_generator(seed, block), offset + 1, measure)[offset]


def _run_block(mat, seed, block, count, measure):
    u = _draw_unitaries(block_generator(seed, block), count, measure)
    rotated = u @ mat @ adjoint(u)
    rotated = 0.5 * (rotated + adjoint(rotated))
    return np.column_stack(sample_measures_batch(rotated))


def explore(
    rho: DensityMatrix,
    n: int,
    seed: int,
    measure: Measure | str = Measure.HAAR,
    workers: int = 1,
) -> ExplorationResult:
    """Measure ``n`` random unitary conjugates ``U rho U^dag``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    measure = Measure(measure)
    blocks = [(b, min(BLOCK_SIZE, n - b * BLOCK_SIZE)) for b in range(-(-n // BLOCK_SIZE))]

    def job(item):
        b, count = item
        return _run_block(rho.mat, seed, b, count, measure)

    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(job, blocks))
    else:
        parts = [job(item) for item in blocks]
    return ExplorationResult(values=np.concatenate(parts), n_samples=n, seed=seed, measure=measure)


def stationarity_check(
    rho_diag: DensityMatrix, delta: float = 1e-3, n: int = 10_000, seed: int = 0
) -> float:
    """Largest ``D^2`` over ``n`` Jarlskog unitaries near the identity.

    Every parameter is uniform in ``[-delta, delta]``. If ``rho_diag`` is a
    stationary maximum of ``D^2`` the result stays within ``O(delta^2)``
    of ``D^2(rho_diag)``; the contract checked by callers is ``10 delta^2``.
    """
    m = rho_diag.mat
    if np.max(np.abs(m - np.diag(np.diag(m)))) > TOL_DIAGONAL:
        raise ValueError("stationarity_check needs a state diagonal in the computational basis")
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = block_generator(seed, 0)
    u = jarlskog_unitaries(sample_jarlskog_values(rng, n, delta=delta))
    rotated = u @ m @ adjoint(u)
    rotated = 0.5 * (rotated + adjoint(rotated))
    return float(coherence_batch(rotated)[2].max())
