import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lowertail.entropy import (
    EdgeWeights,
    h,
    h_prime,
    h_total,
    i_p_grad,
    i_p_scalar,
    i_p_total,
    i_p_vec,
)


def test_edge_weights_validation():
    EdgeWeights(4, np.full(6, 0.5))
    with pytest.raises(ValueError):
        EdgeWeights(4, np.full(5, 0.5))
    with pytest.raises(ValueError):
        EdgeWeights(3, np.array([0.1, -0.2, 0.3]))
    w = EdgeWeights.constant(5, 0.3)
    assert w.values.shape == (10,)


def test_i_p_plug_in_values():
    assert i_p_scalar(0.5, 0.5) == 0.0
    assert i_p_scalar(1.0, 0.5) == pytest.approx(math.log(2), rel=1e-15)
    assert i_p_scalar(0.0, 0.5) == pytest.approx(math.log(2), rel=1e-15)
    with pytest.raises(ValueError):
        i_p_scalar(0.5, 0.0)
    with pytest.raises(ValueError):
        i_p_scalar(1.5, 0.5)


@given(st.floats(0.0, 1.0), st.floats(0.01, 0.99))
def test_i_p_nonnegative_zero_iff_equal(q, p):
    v = i_p_scalar(q, p)
    assert v >= 0.0
    if abs(q - p) > 1e-7:
        assert v > 0.0
    assert i_p_vec([q], p)[0] == pytest.approx(v, abs=1e-15)


def test_i_p_total_matches_high_precision_sum():
    import mpmath

    mpmath.mp.dps = 40
    rng = np.random.Generator(np.random.Philox(5))
    q = rng.uniform(0.01, 0.99, size=15)
    p = 0.37
    total = i_p_total(q, p)
    ref = mpmath.fsum(
        mpmath.mpf(x) * mpmath.log(mpmath.mpf(x) / p)
        + (1 - mpmath.mpf(x)) * mpmath.log((1 - mpmath.mpf(x)) / (1 - p))
        for x in q.tolist()
    )
    assert abs(total - float(ref)) <= 1e-12 * abs(float(ref))


def test_h_values_and_shape():
    assert h(1.0) == 0.0
    assert h(0.0) == 1.0
    assert h(0.5) == pytest.approx(0.5 * math.log(0.5) + 0.5, rel=1e-15)
    arr = h(np.array([0.0, 0.5, 1.0]))
    assert arr.shape == (3,)
    with pytest.raises(ValueError):
        h(1.5)


@given(st.tuples(st.floats(1e-6, 1.0), st.floats(1e-6, 1.0), st.floats(1e-6, 1.0)))
def test_h_convexity_chord(xyz):
    x, y, z = sorted(xyz)
    if x == z:
        return
    t = (y - x) / (z - x)
    assert h(y) <= (1 - t) * h(x) + t * h(z) + 1e-12


def test_gradients_match_finite_differences():
    eps = 1e-6
    for q in np.linspace(0.1, 0.9, 9):
        fd = (i_p_scalar(q + eps, 0.4) - i_p_scalar(q - eps, 0.4)) / (2 * eps)
        assert i_p_grad(np.array([q]), 0.4)[0] == pytest.approx(fd, abs=1e-6)
        fd_h = (h(q + eps) - h(q - eps)) / (2 * eps)
        assert h_prime(q) == pytest.approx(fd_h, abs=1e-6)


def test_grad_endpoint_sentinels():
    g = i_p_grad(np.array([0.0, 1.0]), 0.5)
    assert g[0] == -np.inf
    assert g[1] == np.inf
    assert h_prime(0.0) == -np.inf


def test_sparse_limit_uniform_convergence():
    # sup_x |p^{-1} i_p(px) - h(x)| shrinks monotonically as p drops
    xs = np.linspace(0.01, 1.0, 400)
    sups = []
    for p in (0.1, 0.01, 0.001):
        vals = i_p_vec(p * xs, p) / p
        sups.append(float(np.max(np.abs(vals - h(xs)))))
    assert sups[0] > sups[1] > sups[2]
    assert sups[2] < 1e-2


def test_h_total_is_compensated_sum():
    x = np.full(1000, 0.999999)
    assert h_total(x) == pytest.approx(1000 * h(0.999999), rel=1e-13)
