"""Multipartite product-state optimization and normalized estimation.

The single quantity everything here revolves around is

    lambda_max(O) = max over product states |psi_1> x ... x |psi_n>
                    of  <psi|O|psi>,

for observables O given as sums of local-operator products.  On product
states the expectation factorizes, so fixing every site but one turns O
into a small effective local operator whose top eigenvector is the exact
single-site optimum.  Sweeping that update cyclically over the sites -
separability power iteration - ascends monotonically and converges to a
(local) maximum; a multistart over local basis eigenvectors plus random
product states is used to escape poor basins.  No global-optimality claim
is attached to the outcome; results carry restart counts and convergence
flags instead.

k-separable relaxations reuse the same iteration with sites grouped into
blocks: a block behaves as a single site of the product dimension and its
update takes the top eigenvector of the block-reduced operator.

``ne_multipartite`` turns lambda_max into a certification statement: over
coefficient vectors c it maximizes |sum_k c_k e_k| / lambda_max(sum_k c_k
O_k) for measured estimates e_k.  The outer problem is non-convex; the
implementation alternates a closed-form coefficient step against the
current optimizer state with full re-evaluations, multistarted from
several coefficient initializations, and reports the best local optimum
found.  Values above 1 are incompatible with fully separable states.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import smallmat
from .qmodel import PAULI, gell_mann_basis
from .witness import ne_verdict

_UNIT_TOL = 1e-12
_DEGENERACY_TOL = 1e-10


class ObservableSum:
    """Sum of local-operator products c * o_1 x o_2 x ... x o_n.

    Factors must be Hermitian and consistently shaped per site; at least
    two parties and one term.
    """

    def __init__(
        self, terms: Sequence[tuple[float, Sequence[np.ndarray]]]
    ) -> None:
        if not terms:
            raise ValueError("observable needs at least one term")
        parsed = []
        dims: tuple[int, ...] | None = None
        for coeff, factors in terms:
            coeff = float(coeff)
            if not math.isfinite(coeff):
                raise ValueError("coefficients must be finite")
            ops = tuple(np.asarray(f, dtype=complex) for f in factors)
            shape = tuple(op.shape[0] for op in ops)
            for op in ops:
                if op.ndim != 2 or op.shape[0] != op.shape[1]:
                    raise ValueError("factors must be square matrices")
                if np.abs(op - op.conj().T).max() > 1e-10:
                    raise ValueError("factors must be Hermitian")
            if dims is None:
                dims = shape
            elif shape != dims:
                raise ValueError("terms disagree on local dimensions")
            parsed.append((coeff, ops))
        assert dims is not None
        if len(dims) < 2:
            raise ValueError("observable needs at least two parties")
        self.terms: tuple[tuple[float, tuple[np.ndarray, ...]], ...] = tuple(parsed)
        self.dims: tuple[int, ...] = dims

    @property
    def parties(self) -> int:
        return len(self.dims)

    @classmethod
    def from_pauli_strings(
        cls, terms: Sequence[tuple[float, str]]
    ) -> "ObservableSum":
        """Build from (coefficient, label) pairs like (0.5, 'XZI')."""
        parsed = []
        for coeff, label in terms:
            try:
                factors = [PAULI[ch] for ch in label]
            except KeyError as err:
                raise ValueError(f"unknown Pauli letter in {label!r}") from err
            parsed.append((coeff, factors))
        return cls(parsed)

    def expectation(self, state: "ProductState") -> float:
        total = 0.0
        for coeff, factors in self.terms:
            prod = coeff
            for op, vec in zip(factors, state.vectors):
                prod *= float((vec.conj() @ op @ vec).real)
            total += prod
        return total

    def dense(self) -> np.ndarray:
        """Full matrix; for cross-checks on a handful of parties only."""
        total = np.zeros((int(np.prod(self.dims)),) * 2, dtype=complex)
        for coeff, factors in self.terms:
            term = np.array([[coeff]], dtype=complex)
            for op in factors:
                term = np.kron(term, op)
            total += term
        return total

    def blocked(self, partition: Sequence[Sequence[int]]) -> "ObservableSum":
        """Group parties into blocks, each becoming one site via Kronecker."""
        blocks = [tuple(b) for b in partition]
        flat = [p for b in blocks for p in b]
        if sorted(flat) != list(range(self.parties)) or not all(blocks):
            raise ValueError("invalid partition: blocks must cover all parties disjointly")
        terms = []
        for coeff, factors in self.terms:
            grouped = []
            for block in blocks:
                op = np.array([[1.0]], dtype=complex)
                for p in block:
                    op = np.kron(op, factors[p])
                grouped.append(op)
            terms.append((coeff, grouped))
        return ObservableSum(terms)


class ProductState:
    """One unit vector per party."""

    def __init__(self, vectors: Sequence[np.ndarray]) -> None:
        vecs = tuple(np.asarray(v, dtype=complex).ravel() for v in vectors)
        for v in vecs:
            if abs(np.linalg.norm(v) - 1.0) > _UNIT_TOL:
                raise ValueError("product-state factors must be unit vectors")
        self.vectors: tuple[np.ndarray, ...] = vecs

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(v.size for v in self.vectors)

    def as_vector(self) -> np.ndarray:
        out = np.array([1.0], dtype=complex)
        for v in self.vectors:
            out = np.kron(out, v)
        return out


@dataclass(frozen=True)
class SPIOptions:
    """Sweep tolerances and the multistart policy.

    With ``restarts=None`` the starts are every combination of eigenvectors
    of the non-identity local basis operators (truncated to
    ``max_eigen_starts`` in enumeration order) plus ``random_starts`` Haar
    product states; an integer caps the total, filled in the same order.
    """

    tol: float = 1e-10
    max_sweeps: int = 500
    restarts: int | None = None
    random_starts: int = 8
    max_eigen_starts: int = 216
    seed: int = 11


@dataclass(frozen=True)
class SPIResult:
    lambda_max: float
    optimizer: ProductState
    restarts_used: int
    converged: bool


def _site_eigenvectors(d: int) -> list[np.ndarray]:
    vecs = []
    for op in gell_mann_basis(d).operators[1:]:
        _, v = smallmat.hermitian_eig(op)
        vecs.extend(v[:, k] for k in range(d))
    return vecs


def _eigen_starts(dims: tuple[int, ...], cap: int) -> list[list[np.ndarray]]:
    per_site = [_site_eigenvectors(d) for d in dims]
    starts = []
    for combo in itertools.product(*per_site):
        starts.append(list(combo))
        if len(starts) >= cap:
            break
    return starts


def _random_start(dims: tuple[int, ...], rng: np.random.Generator) -> list[np.ndarray]:
    vecs = []
    for d in dims:
        v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        vecs.append(v / np.linalg.norm(v))
    return vecs


def _effective_operator(
    obs: ObservableSum, vectors: list[np.ndarray], site: int
) -> np.ndarray:
    d = obs.dims[site]
    eff = np.zeros((d, d), dtype=complex)
    for coeff, factors in obs.terms:
        weight = coeff
        for s, (op, vec) in enumerate(zip(factors, vectors)):
            if s != site:
                weight *= float((vec.conj() @ op @ vec).real)
        eff += weight * factors[site]
    return eff


def _top_eigenvector(eff: np.ndarray, current: np.ndarray) -> np.ndarray:
    vals, vecs = smallmat.hermitian_eig(eff)
    scale = max(1.0, abs(vals[0]))
    best, best_overlap = 0, -1.0
    for k in range(len(vals)):
        if vals[0] - vals[k] > _DEGENERACY_TOL * scale:
            break
        overlap = abs(complex(current.conj() @ vecs[:, k]))
        if overlap > best_overlap:
            best, best_overlap = k, overlap
    return vecs[:, best]


def _sweep_to_convergence(
    obs: ObservableSum, vectors: list[np.ndarray], opts: SPIOptions
) -> tuple[float, list[np.ndarray], bool]:
    value = obs.expectation(ProductState(vectors))
    for _ in range(opts.max_sweeps):
        for site in range(obs.parties):
            eff = _effective_operator(obs, vectors, site)
            vectors[site] = _top_eigenvector(eff, vectors[site])
        new_value = obs.expectation(ProductState(vectors))
        if new_value - value < opts.tol:
            return new_value, vectors, True
        value = new_value
    return value, vectors, False


def spi_lambda_max(
    obs: ObservableSum,
    opts: SPIOptions | None = None,
    initial: ProductState | None = None,
) -> SPIResult:
    """Best product-state expectation found by multistarted cyclic sweeps.

    Each sweep updates one site at a time to the top eigenvector of its
    effective operator (ties resolved toward the current vector), which
    never decreases the objective.  ``initial`` adds one extra start, e.g.
    to warm-start from a previous optimizer.
    """
    opts = opts or SPIOptions()
    rng = np.random.default_rng(opts.seed)
    starts = _eigen_starts(obs.dims, opts.max_eigen_starts)
    if opts.restarts is None:
        starts.extend(
            _random_start(obs.dims, rng) for _ in range(opts.random_starts)
        )
    else:
        total = max(1, opts.restarts)
        starts = starts[:total]
        while len(starts) < total:
            starts.append(_random_start(obs.dims, rng))
    if initial is not None:
        starts.append([v.copy() for v in initial.vectors])

    best_value = -math.inf
    best_vectors: list[np.ndarray] | None = None
    best_converged = False
    for start in starts:
        value, vectors, converged = _sweep_to_convergence(obs, list(start), opts)
        if value > best_value:
            best_value = value
            best_vectors = vectors
            best_converged = converged
    assert best_vectors is not None
    return SPIResult(
        lambda_max=best_value,
        optimizer=ProductState(best_vectors),
        restarts_used=len(starts),
        converged=best_converged,
    )


def k_separable_lambda_max(
    obs: ObservableSum,
    partition: Sequence[Sequence[int]],
    opts: SPIOptions | None = None,
) -> SPIResult:
    """lambda_max over states product across the given party blocks.

    Entanglement within a block is allowed (the block update is exact over
    its full local space), so coarser partitions can only raise the value.
    """
    return spi_lambda_max(obs.blocked(partition), opts)


# -- multipartite normalized estimation ----------------------------------------


@dataclass(frozen=True)
class MultipartiteNEResult:
    """Outcome of the coefficient search; a certified local optimum only.

    ``value`` > 1 is incompatible with fully separable states, assuming
    lambda_max was not underestimated; ``spi`` holds the final honest
    re-evaluation at the reported coefficients.
    """

    value: float
    labels: tuple[str, ...]
    coefficients: tuple[float, ...]
    lambda_max: float
    verdict: str
    spi: SPIResult
    note: str = field(
        default="heuristic multistart search; no global-optimality claim"
    )


@dataclass(frozen=True)
class NEMultipartiteOptions:
    starts: int = 16
    max_rounds: int = 40
    seed: int = 5
    spi: SPIOptions = field(
        default_factory=lambda: SPIOptions(restarts=12, random_starts=4)
    )


def _string_observable(labels: Sequence[str], coeffs: np.ndarray) -> ObservableSum:
    return ObservableSum.from_pauli_strings(
        [(c, label) for c, label in zip(coeffs, labels)]
    )


def ne_multipartite(
    obs_support: Sequence[str],
    estimates: Sequence[float],
    options: NEMultipartiteOptions | None = None,
) -> MultipartiteNEResult:
    """Maximize |sum c_k e_k| / lambda_max(sum c_k O_k) over coefficients.

    ``obs_support`` are Pauli strings, ``estimates`` their measured values.
    Alternation: at the current coefficients, SPI yields a product state
    psi; against psi the objective is a linear/linear ratio whose ascent
    direction has the closed form e - F * o(psi), which proposes the next
    coefficients; proposals are kept only when the true objective improves.
    Multistarted; the best local optimum is reported together with a final
    full-multistart SPI evaluation.
    """
    opts = options or NEMultipartiteOptions()
    labels = tuple(obs_support)
    est = np.array([float(e) for e in estimates])
    if len(labels) != len(est):
        raise ValueError("supports and estimates must have equal length")
    if not labels:
        raise ValueError("empty observable support")

    rng = np.random.default_rng(opts.seed)
    k = len(labels)
    starts: list[np.ndarray] = []
    nrm = float(np.linalg.norm(est))
    if nrm > 0:
        starts.append(est / nrm)
    starts.extend(np.eye(k)[i] for i in range(min(k, 7)))
    while len(starts) < opts.starts:
        v = rng.standard_normal(k)
        starts.append(v / np.linalg.norm(v))
    starts = starts[: opts.starts]

    def objective(c: np.ndarray, warm: ProductState | None):
        res = spi_lambda_max(_string_observable(labels, c), opts.spi, initial=warm)
        lam = res.lambda_max
        if lam <= 1e-12:
            return -math.inf, res
        return abs(float(c @ est)) / lam, res

    best_f = -math.inf
    best_c: np.ndarray | None = None
    for c0 in starts:
        c = c0.copy()
        f, res = objective(c, None)
        for _ in range(opts.max_rounds):
            state = res.optimizer
            site_values = np.array(
                [
                    _string_observable([lab], np.ones(1)).expectation(state)
                    for lab in labels
                ]
            )
            orient = math.copysign(1.0, float(c @ est)) if float(c @ est) != 0 else 1.0
            direction = orient * est - f * site_values
            dn = float(np.linalg.norm(direction))
            if dn == 0.0:
                break
            proposal = direction / dn
            f_new, res_new = objective(proposal, state)
            if f_new <= f + 1e-12:
                break
            c, f, res = proposal, f_new, res_new
        if f > best_f:
            best_f, best_c = f, c
    assert best_c is not None

    final = spi_lambda_max(_string_observable(labels, best_c))
    lam = final.lambda_max
    if lam <= 1e-12:
        raise RuntimeError("normalization collapsed: lambda_max ~ 0 at the optimum")
    value = abs(float(best_c @ est)) / lam
    return MultipartiteNEResult(
        value=value,
        labels=labels,
        coefficients=tuple(float(x) for x in best_c),
        lambda_max=lam,
        verdict=ne_verdict(value),
        spi=final,
    )
