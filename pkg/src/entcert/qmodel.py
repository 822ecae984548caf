"""Operator algebra, state families, and correlator simulation.

Conventions (pinned here once, used by every ideal-value test):
    * Pauli matrices with Y = [[0, -i], [i, 0]].
    * The maximally entangled reference state is |Phi+> = (|00> + |11>)/sqrt(2).
    * R_Y(theta) = exp(-i theta Y / 2) acts on the second qubit for the
      'chi1' family; the 'chi3' family applies
      V(theta) = (1 + i (cos(theta) X + sin(theta) Z)) / sqrt(2).
    * 'psi_theta' is cos(theta)|00> + sin(theta)|11>.
    * The generalized operator basis is normalized to Tr(G_k G_l) = d*delta_kl
      with G_0 the identity; for d = 2 it is exactly (1, X, Y, Z).

Finite-shot simulation draws from the joint eigenbasis distribution of the
two local observables (four outcomes for qubits), preserving correlations
rather than sampling the marginals independently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grids import AXES, CorrelatorGrid

Array = np.ndarray

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
PAULI = {"X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z, "I": PAULI_I}

FAMILIES = ("bell", "psi_theta", "chi1", "chi3")

_HERM_TOL = 1e-10
_TRACE_TOL = 1e-10


@dataclass(frozen=True)
class StateFamilyParams:
    """Which state family to build and at which angle (radians)."""

    family: str
    theta: float = 0.0

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(
                f"unknown family {self.family!r}; expected one of {FAMILIES}"
            )
        if not math.isfinite(self.theta):
            raise ValueError("theta must be finite")


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A bipartite density matrix with local dimensions ``dims``."""

    matrix: Array
    dims: tuple[int, int]

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=complex)
        da, db = self.dims
        if m.shape != (da * db, da * db):
            raise ValueError(
                f"matrix shape {m.shape} does not match dims {self.dims}"
            )
        if np.abs(m - m.conj().T).max() > _HERM_TOL:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(m).real - 1.0) > _TRACE_TOL:
            raise ValueError("density matrix trace is not 1")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.dims[0] * self.dims[1]

    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)

    @classmethod
    def from_vector(cls, psi: Array, dims: tuple[int, int]) -> "DensityMatrix":
        v = np.asarray(psi, dtype=complex).reshape(-1)
        nrm = np.linalg.norm(v)
        if nrm == 0.0:
            raise ValueError("zero state vector")
        v = v / nrm
        return cls(np.outer(v, v.conj()), dims)


def family_vector(params: StateFamilyParams) -> Array:
    """State vector of the requested family (two qubits)."""
    th = params.theta
    phi_plus = np.array([1.0, 0.0, 0.0, 1.0], dtype=complex) / math.sqrt(2)
    if params.family == "bell":
        return phi_plus
    if params.family == "psi_theta":
        return np.array([math.cos(th), 0.0, 0.0, math.sin(th)], dtype=complex)
    if params.family == "chi1":
        half = th / 2.0
        r_y = np.array(
            [[math.cos(half), -math.sin(half)], [math.sin(half), math.cos(half)]],
            dtype=complex,
        )
        return np.kron(PAULI_I, r_y) @ phi_plus
    # chi3: unitary (1 + i(cos X + sin Z))/sqrt(2) on the second qubit.
    h = math.cos(th) * PAULI_X + math.sin(th) * PAULI_Z
    v = (PAULI_I + 1.0j * h) / math.sqrt(2)
    return np.kron(PAULI_I, v) @ phi_plus


def make_state(params: StateFamilyParams) -> DensityMatrix:
    """Pure two-qubit state of the requested family."""
    return DensityMatrix.from_vector(family_vector(params), (2, 2))


def _local_operator(label_or_op: object, dim: int) -> Array:
    if isinstance(label_or_op, str):
        if label_or_op not in PAULI or dim != 2:
            raise ValueError(f"unknown local observable {label_or_op!r}")
        return PAULI[label_or_op]
    op = np.asarray(label_or_op, dtype=complex)
    if op.shape != (dim, dim):
        raise ValueError("dimension mismatch for local observable")
    return op


def ideal_correlator(rho: DensityMatrix, a: object, b: object) -> float:
    """Exact expectation value of A (x) B in ``rho``.

    ``a`` and ``b`` are Pauli labels for qubits or explicit Hermitian
    matrices of the matching local dimensions.
    """
    op_a = _local_operator(a, rho.dims[0])
    op_b = _local_operator(b, rho.dims[1])
    value = np.trace(np.kron(op_a, op_b) @ rho.matrix)
    return float(value.real)


def sample_correlator(
    rho: DensityMatrix, a: str, b: str, shots: int, seed: int
) -> float:
    """Empirical +-1-product mean over ``shots`` joint measurements."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    rng = np.random.default_rng(seed)
    return _sample_with_rng(rho, a, b, shots, rng)


def _sample_with_rng(
    rho: DensityMatrix, a: str, b: str, shots: int, rng: np.random.Generator
) -> float:
    if rho.dims != (2, 2):
        raise ValueError("shot sampling supports qubit pairs only")
    op_a = _local_operator(a, 2)
    op_b = _local_operator(b, 2)
    probs = []
    outcomes = []
    for sa in (1.0, -1.0):
        proj_a = 0.5 * (PAULI_I + sa * op_a)
        for sb in (1.0, -1.0):
            proj_b = 0.5 * (PAULI_I + sb * op_b)
            p = np.trace(np.kron(proj_a, proj_b) @ rho.matrix).real
            probs.append(max(p, 0.0))
            outcomes.append(sa * sb)
    probs = np.array(probs)
    probs /= probs.sum()
    counts = rng.multinomial(shots, probs)
    return float(np.dot(counts, outcomes) / shots)


@dataclass(frozen=True)
class OperatorBasis:
    """Orthogonal Hermitian operator basis with Tr(G_k G_l) = d delta_kl.

    Index 0 is the identity; indices >= 1 are traceless.
    """

    dim: int
    operators: tuple[Array, ...]

    def __post_init__(self) -> None:
        d = self.dim
        if len(self.operators) != d * d:
            raise ValueError("operator count must be dim^2")
        for k, op in enumerate(self.operators):
            if np.abs(op - op.conj().T).max() > 1e-9:
                raise ValueError(f"basis operator {k} is not Hermitian")
            if k >= 1 and abs(np.trace(op)) > 1e-9:
                raise ValueError(f"basis operator {k} is not traceless")
        for k, op_k in enumerate(self.operators):
            for l in range(k, len(self.operators)):
                want = d if k == l else 0.0
                got = np.trace(op_k.conj().T @ self.operators[l]).real
                if abs(got - want) > 1e-9:
                    raise ValueError("basis is not trace-orthogonal")


def gell_mann_basis(d: int) -> OperatorBasis:
    """Generalized Gell-Mann basis for local dimension ``d``.

    Ordering: identity, then symmetric pair operators (lexicographic),
    antisymmetric pair operators, diagonal operators.  For d = 2 this is
    exactly (1, X, Y, Z).
    """
    if d < 2:
        raise ValueError("dimension must be >= 2")
    scale = math.sqrt(d / 2.0)
    ops: list[Array] = [np.eye(d, dtype=complex)]
    sym = []
    antisym = []
    for j in range(d):
        for k in range(j + 1, d):
            s = np.zeros((d, d), dtype=complex)
            s[j, k] = s[k, j] = 1.0
            sym.append(scale * s)
            a = np.zeros((d, d), dtype=complex)
            a[j, k] = -1.0j
            a[k, j] = 1.0j
            antisym.append(scale * a)
    diag = []
    for l in range(1, d):
        v = np.zeros(d)
        v[:l] = 1.0
        v[l] = -l
        v *= math.sqrt(2.0 / (l * (l + 1)))
        diag.append(scale * np.diag(v).astype(complex))
    ops.extend(sym)
    ops.extend(antisym)
    ops.extend(diag)
    return OperatorBasis(d, tuple(ops))


def correlator_grid(
    rho: DensityMatrix,
    shots: int | None = None,
    seed: int | None = None,
) -> CorrelatorGrid:
    """Full-support grid of ``rho``'s correlators.

    With ``shots`` set (qubits only), every entry is an empirical mean over
    that many joint measurements; per-entry streams are derived
    deterministically from ``seed``.
    """
    da, db = rho.dims
    values: dict[tuple[int, int], float] = {}
    if shots is None:
        basis_a = gell_mann_basis(da).operators
        basis_b = gell_mann_basis(db).operators
        for i in range(da * da - 1):
            for j in range(db * db - 1):
                values[(i, j)] = ideal_correlator(
                    rho, basis_a[i + 1], basis_b[j + 1]
                )
    else:
        if rho.dims != (2, 2):
            raise ValueError("shot sampling supports qubit pairs only")
        if seed is None:
            raise ValueError("seed is required when sampling")
        streams = np.random.SeedSequence(seed).spawn(9)
        k = 0
        for i, a in enumerate(AXES):
            for j, b in enumerate(AXES):
                rng = np.random.default_rng(streams[k])
                values[(i, j)] = _sample_with_rng(rho, a, b, shots, rng)
                k += 1
    return CorrelatorGrid(rho.dims, values)


def _haar_vector(dim: int, rng: np.random.Generator) -> Array:
    v = rng.normal(size=dim) + 1.0j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def sample_separable(
    d: int, terms: int, seed: int, d_b: int | None = None
) -> DensityMatrix:
    """Convex mixture of Haar-random pure product states.

    ``d`` is the first local dimension; ``d_b`` defaults to ``d``.
    Mixture weights are uniform Dirichlet.  Deterministic given ``seed``.
    """
    if terms < 1:
        raise ValueError("terms must be >= 1")
    db = d if d_b is None else d_b
    rng = np.random.default_rng(seed)
    weights = rng.dirichlet(np.ones(terms))
    total = np.zeros((d * db, d * db), dtype=complex)
    for w in weights:
        va = _haar_vector(d, rng)
        vb = _haar_vector(db, rng)
        v = np.kron(va, vb)
        total += w * np.outer(v, v.conj())
    return DensityMatrix(total, (d, db))


def depolarize(rho: DensityMatrix, p: float) -> DensityMatrix:
    """Mix ``rho`` with white noise: (1 - p) rho + p * 1 / dim."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("noise probability must lie in [0, 1]")
    dim = rho.dim
    mixed = (1.0 - p) * rho.matrix + p * np.eye(dim) / dim
    return DensityMatrix(mixed, rho.dims)
