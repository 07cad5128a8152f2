import itertools
import math

import numpy as np
import pytest

from lowertail.graphs import Graph
from lowertail.metrics import (
    closed_walk_census,
    closed_walk_trace,
    counting_discrepancy,
    cut_norm_best,
    cut_norm_bracket,
    cut_norm_exact,
    cut_norm_heuristic,
    deviation_matrix,
    graph_to_matrix,
    spectral_cut_bound,
    weights_to_matrix,
)


def _random_symmetric(n, rng, scale=1.0):
    A = rng.normal(size=(n, n)) * scale
    A = (A + A.T) / 2
    np.fill_diagonal(A, 0.0)
    return A


def _cut_norm_double_enumeration(A):
    """Independent oracle: both x and y enumerated over {0,1}^n."""
    n = A.shape[0]
    best = 0.0
    for xm in range(1 << n):
        x = np.array([(xm >> i) & 1 for i in range(n)], dtype=float)
        v = x @ A
        for ym in range(1 << n):
            y = np.array([(ym >> i) & 1 for i in range(n)], dtype=float)
            best = max(best, abs(float(v @ y)))
    return best / (n * n)


def test_cut_norm_zero_and_allones():
    assert cut_norm_exact(np.zeros((5, 5))) == 0.0
    J = np.ones((4, 4)) - np.eye(4)
    assert cut_norm_exact(J) == pytest.approx(12 / 16, rel=1e-14)


def test_cut_norm_exact_matches_double_enumeration():
    rng = np.random.Generator(np.random.Philox(0))
    for _ in range(5):
        A = np.sign(_random_symmetric(8, rng))
        np.fill_diagonal(A, 0.0)
        assert cut_norm_exact(A) == pytest.approx(_cut_norm_double_enumeration(A), rel=1e-12)


def test_norm_sandwich():
    rng = np.random.Generator(np.random.Philox(1))
    for _ in range(20):
        A = _random_symmetric(10, rng)
        exact = cut_norm_exact(A)
        lower = cut_norm_heuristic(A, restarts=16, seed=0)
        upper = spectral_cut_bound(A)
        assert lower <= exact + 1e-12
        assert exact <= upper + 1e-12


def test_homogeneity_and_triangle_inequality():
    rng = np.random.Generator(np.random.Philox(2))
    for _ in range(20):
        A = _random_symmetric(8, rng)
        B = _random_symmetric(8, rng)
        na = cut_norm_exact(A)
        for c in (0.5, 2.0):
            assert cut_norm_exact(c * A) == pytest.approx(c * na, abs=1e-12)
        assert cut_norm_exact(A + B) <= na + cut_norm_exact(B) + 1e-12


def test_transpose_and_negation_invariance():
    rng = np.random.Generator(np.random.Philox(3))
    for _ in range(10):
        A = _random_symmetric(9, rng)
        v = cut_norm_exact(A)
        assert cut_norm_exact(A.T) == pytest.approx(v, abs=1e-13)
        assert cut_norm_exact(-A) == pytest.approx(v, abs=1e-13)


def test_exact_size_guard_and_bracket():
    with pytest.raises(ValueError):
        cut_norm_exact(np.zeros((21, 21)))
    rng = np.random.Generator(np.random.Philox(4))
    A = _random_symmetric(24, rng)
    br = cut_norm_bracket(A, restarts=8)
    assert not br.exact
    assert br.lower <= br.upper


def test_spectral_bound_rank_one():
    rng = np.random.Generator(np.random.Philox(5))
    u = rng.normal(size=8)
    A = np.outer(u, u)
    # with the diagonal kept, the only nonzero eigenvalue is ||u||^2
    assert spectral_cut_bound(A) == pytest.approx(float(u @ u) / 8, rel=1e-10)
    with pytest.raises(ValueError):
        spectral_cut_bound(rng.normal(size=(5, 5)))


def test_weights_matrix_and_deviation_conventions():
    q = np.arange(6, dtype=float) / 10
    A = weights_to_matrix(q, 4)
    assert np.allclose(A, A.T)
    assert np.all(np.diag(A) == 0.0)
    D = deviation_matrix(A, 0.3)
    assert np.all(np.diag(D) == 0.0)
    assert D[0, 1] == pytest.approx(A[0, 1] - 0.3)


def test_closed_walk_trace_complete_graph():
    for n in (4, 6):
        G = Graph.complete(n)
        # subtracting q=1 on and off the diagonal leaves -I
        assert closed_walk_trace(G, 1.0, 2, include_diagonal=True) == pytest.approx(n)
    G0 = Graph(4, [])
    assert closed_walk_trace(G0, 0.0, 2) == 0.0


def test_closed_walk_trace_matches_eigenvalues():
    rng = np.random.Generator(np.random.Philox(6))
    import random

    pyr = random.Random(8)
    edges = [e for e in itertools.combinations(range(8), 2) if pyr.random() < 0.5]
    G = Graph(8, edges)
    q = 0.4
    D = deviation_matrix(graph_to_matrix(G), q)
    lam = np.linalg.eigvalsh(D)
    assert closed_walk_trace(G, q, 2) == pytest.approx(float(np.sum(lam**4)), rel=1e-8)


def test_closed_walk_census_sums_to_trace():
    G = Graph(5, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4)])
    census = closed_walk_census(G, 2)
    A = graph_to_matrix(G)
    assert sum(census.values()) == pytest.approx(float(np.trace(np.linalg.matrix_power(A, 4))))
    # a closed 4-walk uses at most 3 distinct vertices unless it is a C4
    assert all(vs <= 4 for vs, _ in census)


def test_counting_discrepancy_bound_random_pairs():
    rng = np.random.Generator(np.random.Philox(7))
    H = Graph.complete(3)
    for _ in range(20):
        q = rng.uniform(0, 1, size=15)
        qp = rng.uniform(0, 1, size=15)
        lhs, rhs = counting_discrepancy(H, q, qp, 6)
        assert lhs <= rhs + 1e-12
