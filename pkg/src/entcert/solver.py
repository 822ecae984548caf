"""Interior-point solver for the normalized-estimation optimum.

Given measured correlators v_k at grid cells (i_k, j_k), the task is

    maximize  | sum_k c_k v_k |
    over      coefficient matrices C supported on the measured cells
    with      sqrt((dA - 1)(dB - 1)) * ||C||_inf  <=  1,

whose optimum exceeds 1 only on entangled states.  The spectral-norm cap
is the semidefinite constraint

    B(c) = [[t*I, C], [C^T, t*I]]  >=  0,    t = 1 / sqrt((dA-1)(dB-1)),

on the symmetric block matrix of side (dA^2 - 1) + (dB^2 - 1), so the
whole problem is a small SDP in the few variables c_k.  We follow the
primal central path of the log-det barrier

    phi(c) = -log det B(c)

with damped Newton steps: for barrier weight mu, minimize
-<v, c>/mu + phi(c), then shrink mu geometrically.  The barrier parameter
of the block is nu = (dA^2 - 1) + (dB^2 - 1) and the duality gap of the
centered iterate is at most nu * mu, so the path is followed until
nu * mu <= tol / 2 and the iterate is finally rescaled ("polished") onto
the exact constraint boundary, where the optimum always lies.

Both signs of the objective are optimized; by central symmetry of the
feasible set they agree to solver precision, and ties are reported as the
'+' branch.  The returned coefficients induce a mirrored witness pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .grids import CorrelatorGrid, MeasurementSet
from .witness import CoefficientMatrix, NEResult, make_witness_pair, ne_verdict

_ARMIJO_SLOPE = 0.01
_BACKTRACK = 0.5
_CENTERED_DECREMENT = 1e-4  # squared Newton decrement: lambda <= 0.01
_QUADRATIC_PHASE = 0.25  # below this lambda the undamped step is safe
_MONOTONE_SLACK = 1e-9


@dataclass(frozen=True)
class SolverOptions:
    """Interior-point tuning knobs.

    tol        target accuracy of the optimum (duality-gap driven).
    max_iter   cap on Newton steps per sign branch.
    mu_factor  geometric shrink of the barrier weight per outer stage.
    """

    tol: float = 1e-8
    max_iter: int = 200
    mu_factor: float = 0.2

    def __post_init__(self) -> None:
        if not (0.0 < self.tol < 1.0):
            raise ValueError("tol must lie in (0, 1)")
        if self.max_iter < 1:
            raise ValueError("max_iter must be positive")
        if not (0.0 < self.mu_factor < 1.0):
            raise ValueError("mu_factor must lie in (0, 1)")


def _block(c: np.ndarray, support, m: int, n: int, t: float) -> np.ndarray:
    big = np.zeros((m + n, m + n))
    big[np.arange(m + n), np.arange(m + n)] = t
    for k, (i, j) in enumerate(support):
        big[i, m + j] = c[k]
        big[m + j, i] = c[k]
    return big


def _logdet_pd(mat: np.ndarray) -> float:
    """log det of a PD matrix, +inf signalling infeasibility."""
    try:
        chol = np.linalg.cholesky(mat)
    except np.linalg.LinAlgError:
        return math.inf
    return 2.0 * float(np.log(np.diagonal(chol)).sum())


def _maximize_branch(
    v: np.ndarray,
    support: Sequence[tuple[int, int]],
    m: int,
    n: int,
    t: float,
    opts: SolverOptions,
) -> tuple[np.ndarray, int, float]:
    """Barrier path for  max <v, c>  s.t.  ||C(c)||_inf <= t.

    Returns the centered coefficient vector, the Newton-step count and the
    final duality-gap bound nu * mu.
    """
    nu = m + n
    rows = np.array([i for i, _ in support])
    cols = np.array([m + j for _, j in support])
    c = np.zeros(len(support))
    mu = 1.0
    steps = 0

    def objective(x: np.ndarray, mu_: float) -> float:
        # mu-scaled stage objective, kept O(1) for a well-posed line search
        big = _block(x, support, m, n, t)
        ld = _logdet_pd(big)
        if math.isinf(ld):
            return math.inf
        return -float(v @ x) - mu_ * ld

    while True:
        # center at the current mu
        while True:
            big = _block(c, support, m, n, t)
            inv = np.linalg.inv(big)
            grad = -v - 2.0 * mu * inv[rows, cols]
            hess = 2.0 * mu * (
                inv[np.ix_(rows, rows)] * inv[np.ix_(cols, cols)]
                + inv[np.ix_(rows, cols)] * inv[np.ix_(cols, rows)]
            )
            step = np.linalg.solve(hess, -grad)
            lambda_sq = float(-grad @ step) / mu
            if lambda_sq <= _CENTERED_DECREMENT:
                break
            steps += 1
            if steps > opts.max_iter:
                raise RuntimeError("interior-point iteration limit exceeded")
            if lambda_sq <= _QUADRATIC_PHASE**2:
                c = c + step  # undamped step inside the quadratic basin
                continue
            base = objective(c, mu)
            alpha = 1.0
            while (
                objective(c + alpha * step, mu)
                > base + _ARMIJO_SLOPE * alpha * float(grad @ step)
            ):
                alpha *= _BACKTRACK
                if alpha < 1e-14:
                    raise RuntimeError("line search stalled")
            c = c + alpha * step
        if nu * mu <= 0.5 * opts.tol:
            return c, steps, nu * mu
        mu *= opts.mu_factor


def _support_norm(c: np.ndarray, support, m: int, n: int) -> float:
    dense = np.zeros((m, n))
    for k, (i, j) in enumerate(support):
        dense[i, j] = c[k]
    return float(np.linalg.norm(dense, 2))


def ne_solve(
    g: CorrelatorGrid,
    measurements: MeasurementSet | Sequence[tuple[int, int]] | None = None,
    options: SolverOptions | None = None,
) -> NEResult:
    """Optimal normalized estimation over the measured (or given) cells.

    ``measurements`` restricts the optimization to a subset of the grid; by
    default every measured correlator is used.  Values > 1 certify
    entanglement.  The result carries the optimizing coefficients (rescaled
    onto the exact constraint boundary), the Newton-step count, the final
    duality-gap bound, and the induced mirrored witness pair.
    """
    opts = options or SolverOptions()
    if isinstance(measurements, MeasurementSet):
        support = tuple(sorted(measurements.indices()))
    elif measurements is None:
        support = g.measured
    else:
        support = tuple(sorted(tuple(p) for p in measurements))
    v = np.array([g.value_at(cell) for cell in support])
    da, db = g.dims
    m, n = da * da - 1, db * db - 1
    t = 1.0 / math.sqrt((da - 1) * (db - 1))

    if not np.any(v):
        coeffs = tuple(t if k == 0 else 0.0 for k in range(len(support)))
        matrix = CoefficientMatrix(g.dims, support, coeffs)
        return NEResult(
            value=0.0,
            coefficients=matrix,
            sign_branch="+",
            verdict=ne_verdict(0.0),
            witness=make_witness_pair(matrix),
        )

    best = None
    for branch, sign in (("+", 1.0), ("-", -1.0)):
        c, steps, gap = _maximize_branch(sign * v, support, m, n, t, opts)
        # polish onto the boundary, where the optimum is attained
        nrm = _support_norm(c, support, m, n)
        c = c * (t / nrm)
        value = abs(float(v @ c))
        if best is None or value > best[0]:
            best = (value, c, branch, steps, gap)
    value, c, branch, steps, gap = best
    matrix = CoefficientMatrix(g.dims, support, tuple(c))
    return NEResult(
        value=value,
        coefficients=matrix,
        sign_branch=branch,
        verdict=ne_verdict(value),
        iterations=steps,
        gap=gap,
        witness=make_witness_pair(matrix),
    )


@dataclass(frozen=True)
class MonotoneReport:
    """Normalized estimation along a nested chain of measurement sets."""

    measurement_sets: tuple[MeasurementSet, ...]
    results: tuple[NEResult, ...]
    monotone: bool

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(r.value for r in self.results)


def ne_monotone_report(
    chain: Sequence[MeasurementSet],
    g: CorrelatorGrid,
    options: SolverOptions | None = None,
) -> MonotoneReport:
    """Solve along a chain S1 c S2 c ... and check the values never drop.

    Adding correlators can only widen the feasible coefficient supports, so
    the optimum is nondecreasing; a violation beyond solver slack would
    expose an inconsistent grid or a solver failure.  The chain must be
    nested, else ValueError.
    """
    if not chain:
        raise ValueError("empty measurement chain")
    sets = tuple(chain)
    for prev, nxt in zip(sets, sets[1:]):
        if not set(prev.indices()) <= set(nxt.indices()):
            raise ValueError("measurement sets must be nested")
    results = tuple(ne_solve(g, s, options) for s in sets)
    monotone = all(
        later.value >= earlier.value - _MONOTONE_SLACK
        for earlier, later in zip(results, results[1:])
    )
    return MonotoneReport(sets, results, monotone)
