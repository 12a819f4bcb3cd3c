'''Ground-state susceptibility chi = -ln |<G(h+delta)|G(h)>| and its maps.'''

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from tqdm import tqdm

from .ground_state import ground_state
from ..config.numerics import NumericsConfig
from ..errors import EigenSolverError
from ..models import ModelSpec, build_env, polarized_reference
from ..operators import OperatorSum, eig_general
from ..utils import get_logger, write_csv

logger = get_logger(__name__)


@dataclass(frozen=True)
class SusceptibilityResult:
    chi: float
    overlap: float
    degenerate: bool
    near_defective: bool = False


def susceptibility(
    spec: ModelSpec,
    h: tuple[float, float] | None = None,
    delta: tuple[float, float] | None = None,
    numerics: NumericsConfig | None = None,
) -> SusceptibilityResult:
    '''chi between the ground states of H_env(h) and H_env(h + delta).

    Both vectors are unit-normalized right eigenvectors; the overlap is the
    plain conjugated inner product. ``h`` and ``delta`` default to the
    spec's own values.
    '''
    base = spec.with_field(*(h if h is not None else spec.h))
    dx, dy = delta if delta is not None else spec.delta
    perturbed = base.with_field(base.h[0] + dx, base.h[1] + dy)
    reference = polarized_reference(base)

    g0 = ground_state(build_env(base), reference, numerics)
    if dx == 0.0 and dy == 0.0:
        g1 = g0
    else:
        g1 = ground_state(build_env(perturbed), reference, numerics)

    overlap = abs(g1.vector.inner(g0.vector))
    chi = math.inf if overlap == 0.0 else -math.log(min(overlap, 1.0))
    degenerate = g0.degenerate or g1.degenerate
    if degenerate:
        logger.debug(f'Degenerate ground state in susceptibility at h={base.h}, delta={(dx, dy)}')
    return SusceptibilityResult(
        chi=chi,
        overlap=overlap,
        degenerate=degenerate,
        near_defective=g0.near_defective or g1.near_defective,
    )


@dataclass(frozen=True, eq=False)
class SusceptibilityMap:
    '''chi[i, j] is evaluated at (hx_axis[i], hy_axis[j]).'''

    hx_axis: np.ndarray
    hy_axis: np.ndarray
    chi: np.ndarray
    delta: tuple[float, float]
    degenerate: np.ndarray = field(default_factory=lambda: np.zeros((0, 0), dtype=bool))

    def to_rows(self) -> list[tuple[float, float, float, bool]]:
        rows = []
        for i, hx in enumerate(self.hx_axis):
            for j, hy in enumerate(self.hy_axis):
                rows.append((float(hx), float(hy), float(self.chi[i, j]), bool(self.degenerate[i, j])))
        return rows

    def to_csv(self, path: str | Path) -> Path:
        '''Long format: hx, hy, chi, degenerate.'''
        return write_csv(path, ('hx', 'hy', 'chi', 'degenerate'), self.to_rows())

    def argmin_hy(self, hx: float) -> float:
        '''h_y of the smallest chi in the column nearest ``hx``.'''
        i = int(np.argmin(np.abs(self.hx_axis - hx)))
        return float(self.hy_axis[int(np.nanargmin(self.chi[i]))])


def susceptibility_map(
    spec: ModelSpec,
    hx_grid: Sequence[float],
    hy_grid: Sequence[float],
    delta: tuple[float, float] | None = None,
    workers: int = 1,
    numerics: NumericsConfig | None = None,
    progress: bool = False,
) -> SusceptibilityMap:
    '''chi over an (h_x, h_y) grid; points are independent and run on a thread pool.

    A point whose eigensolve fails is logged and stored as NaN.
    '''
    hx_axis = np.asarray(hx_grid, dtype=float)
    hy_axis = np.asarray(hy_grid, dtype=float)
    if hx_axis.size == 0 or hy_axis.size == 0:
        raise ValueError('Susceptibility grids must be non-empty')
    delta = tuple(delta) if delta is not None else spec.delta
    points = [(i, j) for i in range(hx_axis.size) for j in range(hy_axis.size)]

    def evaluate(point: tuple[int, int]) -> SusceptibilityResult:
        i, j = point
        h = (float(hx_axis[i]), float(hy_axis[j]))
        try:
            return susceptibility(spec, h, delta, numerics)
        except EigenSolverError as e:
            logger.warning(f'chi undefined at h={h}: {e}')
            return SusceptibilityResult(chi=math.nan, overlap=math.nan, degenerate=False)

    chi = np.empty((hx_axis.size, hy_axis.size))
    degenerate = np.zeros((hx_axis.size, hy_axis.size), dtype=bool)
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        results = pool.map(evaluate, points)
        for (i, j), result in tqdm(zip(points, results), total=len(points), desc='chi map', disable=not progress):
            chi[i, j] = result.chi
            degenerate[i, j] = result.degenerate

    logger.info(f'Susceptibility map {hx_axis.size}x{hy_axis.size} for {spec.kind.value} N={spec.n_sites} done')
    return SusceptibilityMap(hx_axis=hx_axis, hy_axis=hy_axis, chi=chi, delta=delta, degenerate=degenerate)


def spectrum_reality(H: OperatorSum, numerics: NumericsConfig | None = None) -> float:
    '''max |Im lambda| over the full spectrum.'''
    numerics = numerics or NumericsConfig.load()
    spectrum = eig_general(H.to_dense(numerics.dense_cap), numerics)
    return float(np.max(np.abs(spectrum.eigenvalues.imag)))
