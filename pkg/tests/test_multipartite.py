"""Product-state optimization: sweeps, blocks, and the coefficient search."""

import math

import numpy as np
import pytest
import scipy.optimize

from entcert import multipartite as mp
from entcert import smallmat, solver
from entcert.grids import CorrelatorGrid, MeasurementSet
from entcert.qmodel import PAULI

AXIS = {"X": 0, "Y": 1, "Z": 2}


def _bloch_sample_max(terms, samples=200_000, seed=3, polish=True):
    """Independent oracle for Pauli-string observables on qubits.

    Product-state expectations factor through Bloch vectors r_s, so the
    maximum is over unit 3-vectors per site; random search plus a smooth
    local polish of the best candidate.
    """
    n = len(terms[0][1])
    rng = np.random.default_rng(seed)

    def value(blochs):
        total = 0.0
        for coeff, label in terms:
            prod = coeff
            for s, ch in enumerate(label):
                if ch != "I":
                    prod = prod * blochs[s][AXIS[ch]]
            total += prod
        return total

    vecs = rng.standard_normal((samples, n, 3))
    vecs /= np.linalg.norm(vecs, axis=2, keepdims=True)
    best_val, best = -np.inf, None
    # evaluate vectorized: accumulate per-term products
    totals = np.zeros(samples)
    for coeff, label in terms:
        prod = np.full(samples, coeff)
        for s, ch in enumerate(label):
            if ch != "I":
                prod = prod * vecs[:, s, AXIS[ch]]
        totals += prod
    i = int(np.argmax(totals))
    best_val, best = float(totals[i]), vecs[i]
    if not polish:
        return best_val

    def negative(flat):
        blochs = flat.reshape(n, 3)
        blochs = blochs / np.linalg.norm(blochs, axis=1, keepdims=True)
        return -value(blochs)

    out = scipy.optimize.minimize(negative, best.ravel(), method="BFGS")
    return max(best_val, -float(out.fun))


def test_zzz_product_eigenvector():
    obs = mp.ObservableSum.from_pauli_strings([(1.0, "ZZZ")])
    res = mp.spi_lambda_max(obs)
    assert abs(res.lambda_max - 1.0) <= 1e-10
    assert res.converged
    assert res.restarts_used == 216 + 8


def test_xx_two_party():
    obs = mp.ObservableSum.from_pauli_strings([(1.0, "XX")])
    res = mp.spi_lambda_max(obs)
    assert abs(res.lambda_max - 1.0) <= 1e-10


def test_result_consistency_invariant():
    obs = mp.ObservableSum.from_pauli_strings([(1.0, "XXX"), (1.0, "ZZI")])
    res = mp.spi_lambda_max(obs)
    assert obs.expectation(res.optimizer) == pytest.approx(res.lambda_max, abs=1e-8)


def test_two_term_matches_bloch_search():
    terms = [(1.0, "XXX"), (1.0, "ZZI")]
    obs = mp.ObservableSum.from_pauli_strings(terms)
    res = mp.spi_lambda_max(obs)
    oracle = _bloch_sample_max(terms)
    assert res.lambda_max == pytest.approx(oracle, abs=1e-3)
    assert res.lambda_max >= oracle - 1e-9


def test_random_terms_match_bloch_search():
    rng = np.random.default_rng(41)
    labels = ["XZY", "YIX", "ZZZ", "XXI"]
    coeffs = rng.uniform(-1, 1, size=4)
    terms = list(zip(coeffs, labels))
    obs = mp.ObservableSum.from_pauli_strings(terms)
    res = mp.spi_lambda_max(obs)
    oracle = _bloch_sample_max(terms, samples=150_000)
    assert res.lambda_max == pytest.approx(oracle, abs=1e-3)


def test_single_site_updates_never_decrease():
    rng = np.random.default_rng(43)
    obs = mp.ObservableSum.from_pauli_strings(
        [(0.7, "XYZ"), (-0.4, "ZZX"), (0.2, "YIY")]
    )
    vectors = []
    for d in obs.dims:
        v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        vectors.append(v / np.linalg.norm(v))
    value = obs.expectation(mp.ProductState(vectors))
    for _ in range(6):
        for site in range(obs.parties):
            eff = mp._effective_operator(obs, vectors, site)
            vectors[site] = mp._top_eigenvector(eff, vectors[site])
            new_value = obs.expectation(mp.ProductState(vectors))
            assert new_value >= value - 1e-12
            value = new_value


def test_scaling_and_identity_shift():
    obs = mp.ObservableSum.from_pauli_strings([(0.9, "XXZ"), (0.3, "ZYI")])
    lam = mp.spi_lambda_max(obs).lambda_max
    doubled = mp.ObservableSum.from_pauli_strings([(1.8, "XXZ"), (0.6, "ZYI")])
    assert mp.spi_lambda_max(doubled).lambda_max == pytest.approx(2 * lam, abs=1e-8)
    shifted = mp.ObservableSum.from_pauli_strings(
        [(0.9, "XXZ"), (0.3, "ZYI"), (0.25, "III")]
    )
    assert mp.spi_lambda_max(shifted).lambda_max == pytest.approx(
        lam + 0.25, abs=1e-8
    )


def test_bipartite_pauli_lambda_is_operator_norm():
    rng = np.random.default_rng(47)
    for _ in range(10):
        dense = np.zeros((3, 3))
        cells = [(0, 0), (0, 1), (1, 2), (2, 2), (1, 1)]
        vals = rng.uniform(-1, 1, size=len(cells))
        terms = []
        for (i, j), v in zip(cells, vals):
            dense[i, j] = v
            terms.append((v, "XYZ"[i] + "XYZ"[j]))
        obs = mp.ObservableSum.from_pauli_strings(terms)
        res = mp.spi_lambda_max(obs)
        assert res.lambda_max == pytest.approx(
            smallmat.operator_norm(dense), abs=1e-8
        )


def test_block_partition_nesting_and_identity():
    obs = mp.ObservableSum.from_pauli_strings([(1.0, "XXX"), (1.0, "ZZI")])
    fine = mp.spi_lambda_max(obs)
    same = mp.k_separable_lambda_max(obs, [[0], [1], [2]])
    assert same.lambda_max == pytest.approx(fine.lambda_max, abs=1e-8)
    coarse = mp.k_separable_lambda_max(obs, [[0, 1], [2]])
    assert coarse.lambda_max >= fine.lambda_max - 1e-9
    # a maximally entangled block can satisfy XX.X and ZZ.I at once
    assert coarse.lambda_max == pytest.approx(2.0, abs=1e-8)


def test_block_value_against_sampled_search():
    obs = mp.ObservableSum.from_pauli_strings([(1.0, "XXX"), (1.0, "ZZI")])
    res = mp.k_separable_lambda_max(obs, [[0, 1], [2]])
    dense = obs.dense()
    rng = np.random.default_rng(53)

    def expectation(flat):
        a = flat[:4].astype(complex) + 1j * flat[4:8]
        b = flat[8:10].astype(complex) + 1j * flat[10:12]
        a /= np.linalg.norm(a)
        b /= np.linalg.norm(b)
        full = np.kron(a, b)
        return float((full.conj() @ dense @ full).real)

    best = -np.inf
    best_flat = None
    for _ in range(4000):
        flat = rng.standard_normal(12)
        v = expectation(flat)
        if v > best:
            best, best_flat = v, flat
    out = scipy.optimize.minimize(
        lambda f: -expectation(f), best_flat, method="BFGS"
    )
    oracle = max(best, -float(out.fun))
    assert res.lambda_max == pytest.approx(oracle, abs=1e-3)


def test_invalid_partitions():
    obs = mp.ObservableSum.from_pauli_strings([(1.0, "XXX")])
    for bad in ([[0, 1]], [[0, 1], [1, 2]], [[0], [1], [2], []]):
        with pytest.raises(ValueError, match="partition"):
            mp.k_separable_lambda_max(obs, bad)


def test_observable_validation():
    with pytest.raises(ValueError, match="at least one term"):
        mp.ObservableSum([])
    with pytest.raises(ValueError, match="two parties"):
        mp.ObservableSum.from_pauli_strings([(1.0, "X")])
    with pytest.raises(ValueError, match="Pauli letter"):
        mp.ObservableSum.from_pauli_strings([(1.0, "XQ")])
    with pytest.raises(ValueError, match="Hermitian"):
        mp.ObservableSum([(1.0, [np.array([[0, 1], [0, 0]]), PAULI["X"]])])
    with pytest.raises(ValueError, match="local dimensions"):
        mp.ObservableSum(
            [
                (1.0, [PAULI["X"], PAULI["X"]]),
                (1.0, [np.eye(3), PAULI["X"]]),
            ]
        )


def test_product_state_validation():
    with pytest.raises(ValueError, match="unit"):
        mp.ProductState([np.array([1.0, 1.0]), np.array([1.0, 0.0])])


def test_product_expectations_respect_separable_bound():
    rng = np.random.default_rng(59)
    cells = [(0, 0), (1, 1), (2, 2), (0, 2)]
    vals = rng.uniform(-1, 1, size=4)
    dense = np.zeros((3, 3))
    terms = []
    for (i, j), v in zip(cells, vals):
        dense[i, j] = v
        terms.append((v, "XYZ"[i] + "XYZ"[j]))
    obs = mp.ObservableSum.from_pauli_strings(terms)
    bound = smallmat.operator_norm(dense)  # = separable bound for qubit pairs
    for k in range(300):
        vecs = []
        for d in obs.dims:
            v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
            vecs.append(v / np.linalg.norm(v))
        got = obs.expectation(mp.ProductState(vecs))
        assert abs(got) <= bound + 1e-9


def test_ne_single_term_is_unity():
    res = mp.ne_multipartite(["ZZZ"], [1.0])
    assert res.value == pytest.approx(1.0, abs=1e-8)
    assert res.verdict == "undetected"
    assert res.lambda_max == pytest.approx(1.0, abs=1e-9)
    assert "heuristic" in res.note


def test_ne_ghz_support_detects():
    res = mp.ne_multipartite(["XXX", "ZZI", "ZIZ", "IZZ"], [1.0, 1.0, 1.0, 1.0])
    assert res.value > 1.0 + 1e-6
    assert res.verdict == "entangled"
    assert res.spi.lambda_max == pytest.approx(res.lambda_max)


def test_ne_bipartite_agrees_with_sdp():
    grid = CorrelatorGrid.from_labels({"XX": -0.95, "XY": 0.03, "ZX": -0.96})
    ref = solver.ne_solve(grid, MeasurementSet.parse("XX,XY,ZX"))
    res = mp.ne_multipartite(["XX", "XY", "ZX"], [-0.95, 0.03, -0.96])
    assert res.value == pytest.approx(ref.value, abs=2e-3)


def test_ne_input_validation():
    with pytest.raises(ValueError, match="equal length"):
        mp.ne_multipartite(["XX", "ZZ"], [1.0])
    with pytest.raises(ValueError, match="empty"):
        mp.ne_multipartite([], [])
