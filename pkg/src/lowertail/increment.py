"""Conditional-correlation energy of the copy hypergraph and a greedy
conditioning-set finder.

For a conditioning slot set W and an assignment on it, the correlation of a
slot b inside a slot set B is
    D_W(B, b) = E[Y_B | (Y_w)_W] - E[Y_{B \\ {b}} | (Y_w)_W] E[Y_b | (Y_w)_W],
and the energy aggregates the squares over hyperedges A disjoint from W,
B subset of A with |B| >= 2, and b in B, weighted by 1/(C(r,|B|) |B| p^{2|B|}),
with an outer expectation over the law of the W-assignment.  Small energy
certifies that hyperedge appearances are nearly independent given W.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .copies import CopyHypergraph
from .sampler import ExactConditional, LowerTailEvent


class _AssignmentView:
    """Monomial expectations under (event, Y_W = bits), memoized per monomial."""

    def __init__(self, exact: ExactConditional, w_slots: tuple[int, ...], bits: tuple[int, ...]):
        self.exact = exact
        self.sel = exact._assignment_selector(w_slots, bits)
        self.total = math.fsum(exact.probs[self.sel].tolist())
        self._cache: dict[frozenset[int], float] = {}

    def monomial(self, slots) -> float:
        key = frozenset(int(s) for s in slots)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        mask = np.uint32(sum(1 << s for s in key))
        val = math.fsum(self.exact.probs[self.sel & ((self.exact.masks & mask) == mask)].tolist()) / self.total
        self._cache[key] = val
        return val


def _assignment_views(exact: ExactConditional, w_slots):
    w = tuple(int(s) for s in w_slots)
    for bits in itertools.product((0, 1), repeat=len(w)):
        view = _AssignmentView(exact, w, bits)
        if view.total > 0.0:
            yield view


def _surviving_hyperedges(hg: CopyHypergraph, w_slots) -> list[tuple[int, ...]]:
    """Hyperedges of the induced sub-hypergraph on slots outside W."""
    w = set(int(s) for s in w_slots)
    return [he for he in hg.hyperedges if not w.intersection(he)]


def correlation_D(exact: ExactConditional, w_slots, bits, B, b: int) -> float:
    """D_W(B, b) under the given W-assignment; Y of the empty set is 1."""
    B = tuple(int(s) for s in B)
    if b not in B:
        raise ValueError(f"b={b} must belong to B={B}")
    if set(B) & set(int(s) for s in w_slots):
        raise ValueError("B must be disjoint from W")
    view = _AssignmentView(exact, tuple(int(s) for s in w_slots), tuple(bits))
    if view.total <= 0.0:
        from .sampler import ZeroProbabilityError

        raise ZeroProbabilityError("zero-probability assignment")
    rest = tuple(s for s in B if s != b)
    return view.monomial(B) - view.monomial(rest) * view.monomial((b,))


@dataclass(frozen=True)
class EnergyReport:
    w_slots: tuple[int, ...]
    energy: float
    lhs_cs: float
    rhs_cs: float
    num_surviving: int
    contributions: tuple | None = None   # ((B, b, assignment-averaged D^2 weight), ...)


def energy(event: LowerTailEvent, w_slots, include_table: bool = False,
           exact: ExactConditional | None = None) -> EnergyReport:
    """Exact energy of W plus both sides of the Cauchy-Schwarz comparison.

    lhs_cs = E[sum_A |E[Y_A|.] - prod_a E[Y_a|.]|] over surviving hyperedges A;
    rhs_cs = p^r ((r-1) e_surviving)^{1/2} energy^{1/2}.
    """
    exact = exact or ExactConditional(event)
    hg = event.hg
    r = hg.r
    p = event.p
    w = tuple(sorted(int(s) for s in w_slots))
    surviving = _surviving_hyperedges(hg, w)
    total_energy = 0.0
    total_lhs = 0.0
    table: dict[tuple, float] = {}
    for view in _assignment_views(exact, w):
        wprob = view.total
        inner = 0.0
        inner_lhs = 0.0
        for A in surviving:
            ea = view.monomial(A)
            prod = 1.0
            for a in A:
                prod *= view.monomial((a,))
            inner_lhs += abs(ea - prod)
            for size in range(2, r + 1):
                weight = 1.0 / (math.comb(r, size) * size * p ** (2 * size))
                for B in itertools.combinations(A, size):
                    for b in B:
                        d = view.monomial(B) - view.monomial(tuple(s for s in B if s != b)) * view.monomial((b,))
                        contrib = d * d * weight
                        inner += contrib
                        if include_table:
                            key = (B, b)
                            table[key] = table.get(key, 0.0) + wprob * contrib
        total_energy += wprob * inner
        total_lhs += wprob * inner_lhs
    rhs = p ** r * math.sqrt((r - 1) * len(surviving)) * math.sqrt(max(total_energy, 0.0))
    return EnergyReport(
        w_slots=w,
        energy=total_energy,
        lhs_cs=total_lhs,
        rhs_cs=rhs,
        num_surviving=len(surviving),
        contributions=tuple(sorted((B, b, v) for (B, b), v in table.items())) if include_table else None,
    )


def cs_bound_check(event: LowerTailEvent, w_slots,
                   exact: ExactConditional | None = None) -> tuple[float, float]:
    rep = energy(event, w_slots, exact=exact)
    return rep.lhs_cs, rep.rhs_cs


@dataclass(frozen=True)
class GreedyResult:
    w_slots: tuple[int, ...]
    trajectory: tuple[float, ...]
    target: float
    succeeded: bool


def greedy_increment(event: LowerTailEvent, alpha: float, beta: float,
                     exact: ExactConditional | None = None) -> GreedyResult:
    """Greedily grow W, at each step adding the slot that decreases the energy
    the most (ties broken toward the lowest slot index), until the energy
    drops to beta * e(H-copy-hypergraph) or |W| reaches alpha * num_slots.

    A budget exhaustion with the energy still above target is returned as a
    structured failure carrying the trajectory, not raised.
    """
    exact = exact or ExactConditional(event)
    hg = event.hg
    target = beta * hg.num_hyperedges
    max_size = math.floor(alpha * hg.num_slots)
    w: list[int] = []
    current = energy(event, w, exact=exact).energy
    trajectory = [current]
    while current > target and len(w) < max_size:
        best_slot = None
        best_energy = None
        for s in range(hg.num_slots):
            if s in w:
                continue
            cand = energy(event, w + [s], exact=exact).energy
            if best_energy is None or cand < best_energy - 1e-15:
                best_slot, best_energy = s, cand
        # growing W usually lowers the energy, but not always: conditioning on
        # one more slot can raise conditional correlations at small n.  Stop
        # rather than take an uphill step so the trajectory stays monotone.
        if best_slot is None or best_energy > current + 1e-15:
            break
        w.append(best_slot)
        current = best_energy
        trajectory.append(current)
    return GreedyResult(
        w_slots=tuple(w),
        trajectory=tuple(trajectory),
        target=target,
        succeeded=current <= target,
    )
