import itertools

import numpy as np
import pytest

from lowertail.copies import enumerate_copies
from lowertail.graphs import Graph
from lowertail.increment import correlation_D, cs_bound_check, energy, greedy_increment
from lowertail.sampler import ExactConditional, LowerTailEvent

K3 = Graph.complete(3)


def _setup(n=4, p=0.5, eta=0.5, H=K3):
    ev = LowerTailEvent(enumerate_copies(H, n), p, eta)
    return ev, ExactConditional(ev)


def test_unconditioned_correlations_vanish():
    ev, ex = _setup(eta=10.0)
    for B in ev.hg.hyperedges:
        for b in B:
            assert correlation_D(ex, (), (), B, b) == pytest.approx(0.0, abs=1e-12)
    rep = energy(ev, (), exact=ex)
    assert rep.energy == pytest.approx(0.0, abs=1e-12)
    assert rep.lhs_cs == pytest.approx(0.0, abs=1e-12)


def test_singleton_B_gives_zero():
    ev, ex = _setup()
    # Y of the empty set is 1, so D reduces to E[Y_b] - 1 * E[Y_b]
    assert correlation_D(ex, (), (), (3,), 3) == pytest.approx(0.0, abs=1e-15)


def test_correlation_validation():
    ev, ex = _setup()
    with pytest.raises(ValueError):
        correlation_D(ex, (), (), (0, 1, 2), 5)
    with pytest.raises(ValueError):
        correlation_D(ex, (0,), (1,), (0, 1, 2), 0)


def test_correlation_golden():
    ev, ex = _setup()
    # frozen from the first exact enumeration at n=4, K3, p=1/2, eta=1/2
    val = correlation_D(ex, (), (), (0, 1, 2), 0)
    assert val == pytest.approx(-0.047590719809637125, abs=1e-14)


def test_energy_golden_and_cs_inequality():
    ev, ex = _setup()
    rep = energy(ev, (), exact=ex)
    assert rep.energy == pytest.approx(0.6387178533499472, rel=1e-12)
    assert rep.lhs_cs <= rep.rhs_cs
    assert rep.energy >= 0.0


def test_energy_with_full_W_is_zero():
    ev, ex = _setup()
    rep = energy(ev, tuple(range(ev.hg.num_slots)), exact=ex)
    assert rep.num_surviving == 0
    assert rep.energy == 0.0
    assert rep.rhs_cs == 0.0


def test_cs_bound_on_several_W():
    ev, ex = _setup(n=5, p=0.4, eta=0.5)
    for W in [(), (0,), (0, 7), (2, 3, 9)]:
        lhs, rhs = cs_bound_check(ev, W, exact=ex)
        assert lhs <= rhs + 1e-12


def test_containment_monotonicity():
    # holds for the triangle event at n=5 on these pairs; it is NOT a general
    # law, see test_containment_monotonicity_counterexample
    ev, ex = _setup()
    rng = np.random.Generator(np.random.Philox(9))
    m = ev.hg.num_slots
    for _ in range(15):
        size = int(rng.integers(0, 3))
        w = sorted(rng.choice(m, size=size, replace=False).tolist())
        extra = int(rng.choice([s for s in range(m) if s not in w]))
        small = energy(ev, w, exact=ex).energy
        big = energy(ev, w + [extra], exact=ex).energy
        assert big <= small + 1e-12


def test_containment_monotonicity_counterexample():
    # adding a slot to W can raise the energy at small n: conditioning on one
    # more edge sharpens the conditional correlations among the survivors.
    # Verified independently with exact rational arithmetic.
    hg = enumerate_copies(Graph.cycle(4), 4)
    ev = LowerTailEvent(hg, 0.5, 0.5)
    ex = ExactConditional(ev)
    small = energy(ev, (5,), exact=ex).energy
    big = energy(ev, (0, 5), exact=ex).energy
    assert small == pytest.approx(0.2215345221764976, rel=1e-12)
    assert big == pytest.approx(0.269354061880811, rel=1e-12)
    assert big > small


def test_energy_contribution_table():
    ev, ex = _setup()
    rep = energy(ev, (), include_table=True, exact=ex)
    total = sum(v for _, _, v in rep.contributions)
    assert total == pytest.approx(rep.energy, rel=1e-10)
    assert all(v >= 0 for _, _, v in rep.contributions)


def test_greedy_trivial_cases():
    ev, ex = _setup(eta=10.0)
    res = greedy_increment(ev, 0.5, 0.1, exact=ex)
    assert res.w_slots == ()
    assert res.succeeded
    ev2, ex2 = _setup()
    res2 = greedy_increment(ev2, 0.5, 1e9, exact=ex2)
    assert res2.w_slots == ()
    assert res2.succeeded


def test_greedy_halving_run():
    ev, ex = _setup()
    base = energy(ev, (), exact=ex).energy
    res = greedy_increment(ev, 0.5, base / 2 / ev.hg.num_hyperedges, exact=ex)
    traj = res.trajectory
    assert all(a >= b - 1e-12 for a, b in zip(traj, traj[1:]))
    assert res.succeeded or len(res.w_slots) == ev.hg.num_slots // 2
    if res.succeeded:
        assert traj[-1] <= res.target + 1e-12
