import itertools
import math

import numpy as np
import pytest

from lowertail.copies import ResourceBudgetError, enumerate_copies
from lowertail.graphs import Graph, slot_count
from lowertail.sampler import (
    ChainConfig,
    ExactConditional,
    LowerTailEvent,
    ZeroProbabilityError,
    conditional_marginals,
    conditioned_marginal_vector_qW,
    mcmc_marginals,
    run_chain,
    run_chains,
)

K3 = Graph.complete(3)


def _event(H=K3, n=5, p=0.4, eta=0.5):
    return LowerTailEvent(enumerate_copies(H, n), p, eta)


def test_event_threshold_and_validation():
    ev = _event()
    assert ev.threshold == pytest.approx(0.5 * 10 * 0.4**3)
    assert ev.max_count == 0
    with pytest.raises(ValueError):
        LowerTailEvent(enumerate_copies(K3, 4), 1.0, 0.5)
    with pytest.raises(ValueError):
        LowerTailEvent(enumerate_copies(K3, 4), 0.5, -0.1)


def test_whole_space_event():
    # eta large enough that every graph satisfies the bound
    ev = LowerTailEvent(enumerate_copies(K3, 4), 0.5, eta=10.0)
    assert ev.is_whole_space
    ex = ExactConditional(ev)
    marg = ex.marginals().values
    assert np.max(np.abs(marg - 0.5)) < 1e-12
    # conditional mean equals the unconditioned expectation N_H(1) p^r
    assert ex.conditional_mean_count() == pytest.approx(4 * 0.5**3, rel=1e-12)


def test_probabilities_normalized_and_supported():
    ex = ExactConditional(_event())
    assert math.fsum(ex.probs.tolist()) == pytest.approx(1.0, abs=1e-12)
    assert np.all(ex.probs[~ex.in_event] == 0.0)


def test_triangle_free_partition_function():
    # threshold below 1 makes the event exactly the triangle-free graphs;
    # 41 of the 64 graphs on 4 vertices are triangle-free
    ev = LowerTailEvent(enumerate_copies(K3, 4), 0.5, 0.5)
    ex = ExactConditional(ev)
    assert ex.event_probability == pytest.approx(41 / 64, rel=1e-12)
    assert ex.neg_log_probability == pytest.approx(math.log(64 / 41), rel=1e-12)


def test_exact_marginals_golden():
    ex = ExactConditional(_event())
    marg = ex.marginals().values
    # symmetry: all ten slots identical
    assert np.ptp(marg) == 0.0
    assert marg[0] == pytest.approx(0.3131447076394802, abs=1e-14)
    assert ex.event_probability == pytest.approx(0.5942191104, rel=1e-12)


def test_size_bound():
    with pytest.raises(ResourceBudgetError):
        ExactConditional(LowerTailEvent(enumerate_copies(K3, 8), 0.4, 0.5))


def test_downward_closure_of_event():
    ev = _event(n=4, p=0.5, eta=0.5)
    ex = ExactConditional(ev)
    m = ev.hg.num_slots
    for mask in range(1 << m):
        if not ex.in_event[mask]:
            continue
        for s in range(m):
            if mask >> s & 1:
                assert ex.in_event[mask & ~(1 << s)]


def test_detailed_balance_unnormalized():
    ev = _event(n=4, p=0.3, eta=0.5)
    ex = ExactConditional(ev)
    m = ev.hg.num_slots
    p = ev.p
    add_acc = min(1.0, p / (1 - p))
    del_acc = min(1.0, (1 - p) / p)
    rng = np.random.Generator(np.random.Philox(4))
    checked = 0
    while checked < 1000:
        x = int(rng.integers(0, 1 << m))
        s = int(rng.integers(0, m))
        y = x ^ (1 << s)
        if not (ex.in_event[x] and ex.in_event[y]):
            continue
        pi_x = p ** int(ex.edge_counts[x]) * (1 - p) ** (m - int(ex.edge_counts[x]))
        pi_y = p ** int(ex.edge_counts[y]) * (1 - p) ** (m - int(ex.edge_counts[y]))
        if y > x:   # y adds the edge
            lhs = pi_x * add_acc / m
            rhs = pi_y * del_acc / m
        else:
            lhs = pi_x * del_acc / m
            rhs = pi_y * add_acc / m
        assert abs(lhs - rhs) < 1e-12
        checked += 1


def test_chain_reproducibility():
    ev = _event(n=4, p=0.5, eta=0.5)
    cfg = ChainConfig(steps=20000, burn_in=1000, chains=1, seed=42)
    a = run_chain(ev, cfg, 0)
    b = run_chain(ev, cfg, 0)
    assert a.sample_masks == b.sample_masks
    assert a.sample_counts == b.sample_counts
    assert a.accepted == b.accepted
    c = run_chain(ev, cfg, 1)
    assert c.sample_masks != a.sample_masks


def test_chain_stays_in_event_and_audits():
    ev = _event(n=4, p=0.5, eta=0.5)
    cfg = ChainConfig(steps=1 << 17, burn_in=100, chains=1, seed=3,
                      audit_interval=1 << 12)
    res = run_chain(ev, cfg, 0)
    assert res.audits_passed == (1 << 17) >> 12
    assert all(c <= ev.max_count for c in res.sample_counts)


def test_unconditioned_chain_matches_density():
    ev = LowerTailEvent(enumerate_copies(K3, 4), 0.3, eta=10.0)
    cfg = ChainConfig(steps=200000, burn_in=20000, chains=2, seed=0)
    results = run_chains(ev, cfg)
    est, se = mcmc_marginals(results, ev.hg.num_slots)
    assert np.max(np.abs(est - 0.3)) < 0.02


def test_mcmc_agrees_with_exact_roughly():
    ev = _event(n=4, p=0.4, eta=0.5)
    exact = ExactConditional(ev).marginals().values
    w, se = conditional_marginals(ev, method="mcmc",
                                  cfg=ChainConfig(steps=200000, burn_in=20000,
                                                  chains=4, seed=1))
    assert np.max(np.abs(w.values - exact)) < 0.02


def test_qW_conventions():
    ev = _event(n=4, p=0.5, eta=0.5)
    ex = ExactConditional(ev)
    base = ex.marginals().values
    qw = conditioned_marginal_vector_qW(ex, [], [])
    assert np.allclose(qw.values, base, atol=1e-14)
    all_slots = list(range(ev.hg.num_slots))
    # the all-present assignment contains triangles, hence zero probability;
    # use the all-absent one instead
    qw_full = conditioned_marginal_vector_qW(ex, all_slots, [0] * len(all_slots))
    assert np.allclose(qw_full.values, 0.5, atol=1e-14)
    # golden from enumeration: conditioning on slot 0 present
    qw0 = ex.conditional_marginals_given([0], [1])
    assert qw0[1] == pytest.approx(0.3125, abs=1e-14)


def test_zero_probability_assignment_raises():
    ev = _event(n=4, p=0.5, eta=0.5)
    ex = ExactConditional(ev)
    tri = ev.hg.hyperedges[0]
    with pytest.raises(ZeroProbabilityError):
        ex.conditional_marginals_given(tri, [1, 1, 1])


def test_assignment_distribution_sums_to_one():
    ev = _event(n=4, p=0.5, eta=0.5)
    ex = ExactConditional(ev)
    total = sum(pr for _, pr in ex.assignment_distribution([0, 1, 2]))
    assert total == pytest.approx(1.0, abs=1e-12)


def test_joint_count_distribution_masses():
    ev = _event(n=4, p=0.5, eta=0.5)
    ex = ExactConditional(ev)
    dist = ex.joint_count_distribution()
    assert math.fsum(dist.values()) == pytest.approx(1.0, abs=1e-12)
    assert all(c <= ev.max_count for (_, c) in dist)
