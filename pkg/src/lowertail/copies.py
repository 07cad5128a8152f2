"""The hypergraph of copies of H in K_n and its weighted count statistics."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .graphs import Graph, automorphism_count, slot_count, slot_index, _local_copies


class ResourceBudgetError(RuntimeError):
    """Raised when an enumeration would exceed the configured budget."""


DEFAULT_COPY_BUDGET = 10**8


def copy_count_in_complete(H: Graph, n: int) -> int:
    """N_H(1): copies of H in K_n, via the automorphism count."""
    if H.n > n:
        return 0
    return math.comb(n, H.n) * math.factorial(H.n) // automorphism_count(H)


@dataclass(frozen=True)
class CopyHypergraph:
    """Hypergraph whose vertices are edge slots of K_n and whose hyperedges
    are the slot sets of copies of H."""

    n: int
    r: int
    hyperedges: tuple[tuple[int, ...], ...]
    slot_incidence: tuple[tuple[int, ...], ...] = field(repr=False)

    @property
    def num_slots(self) -> int:
        return slot_count(self.n)

    @property
    def num_hyperedges(self) -> int:
        return len(self.hyperedges)

    def hyperedge_array(self) -> np.ndarray:
        return np.array(self.hyperedges, dtype=np.int64).reshape(self.num_hyperedges, self.r)

    def count_in_slots(self, present) -> int:
        """Number of hyperedges fully contained in the boolean slot vector."""
        x = np.asarray(present, dtype=bool)
        if self.num_hyperedges == 0:
            return 0
        return int(np.all(x[self.hyperedge_array()], axis=1).sum())


def enumerate_copies(H: Graph, n: int, budget: int = DEFAULT_COPY_BUDGET) -> CopyHypergraph:
    """All copies of H as subgraphs of K_n, as sorted slot tuples."""
    if H.n > n:
        raise ValueError(f"v(H)={H.n} exceeds ambient n={n}")
    total = copy_count_in_complete(H, n)
    if total > budget:
        raise ResourceBudgetError(
            f"enumerating copies of H would produce {total} hyperedges, over the budget {budget}"
        )
    local = _local_copies(H)
    hyperedges = []
    for combo in itertools.combinations(range(n), H.n):
        for edgeset in local:
            hyperedges.append(tuple(sorted(slot_index(combo[u], combo[v]) for u, v in edgeset)))
    hyperedges.sort()
    assert len(hyperedges) == total
    incidence: list[list[int]] = [[] for _ in range(slot_count(n))]
    for idx, he in enumerate(hyperedges):
        for s in he:
            incidence[s].append(idx)
    return CopyHypergraph(
        n=n,
        r=H.edge_count,
        hyperedges=tuple(hyperedges),
        slot_incidence=tuple(tuple(v) for v in incidence),
    )


def expected_count(hg: CopyHypergraph, q) -> float:
    """E[N_H(q)] = sum over hyperedges of the product of slot weights."""
    q = np.asarray(q, dtype=float)
    if q.shape != (hg.num_slots,):
        raise ValueError(f"weight vector has shape {q.shape}, expected ({hg.num_slots},)")
    if hg.num_hyperedges == 0:
        return 0.0
    products = np.prod(q[hg.hyperedge_array()], axis=1)
    return math.fsum(products.tolist())


def injective_density(hg: CopyHypergraph, q) -> float:
    """t_inj(H, q) = E[N_H(q)] / N_H(1), in [0, 1]."""
    if hg.num_hyperedges == 0:
        raise ValueError("injective density of an empty copy hypergraph is undefined")
    return expected_count(hg, q) / hg.num_hyperedges


@dataclass(frozen=True)
class DegreeProfile:
    delta: dict[int, int]
    v_count: int
    e_count: int


def degree_profile(hg: CopyHypergraph) -> DegreeProfile:
    """Delta_s = max degree over slot sets of size s, for s = 1..r."""
    delta = {}
    for s in range(1, hg.r + 1):
        counts: dict[frozenset[int], int] = {}
        for he in hg.hyperedges:
            for sub in itertools.combinations(he, s):
                key = frozenset(sub)
                counts[key] = counts.get(key, 0) + 1
        delta[s] = max(counts.values()) if counts else 0
    return DegreeProfile(delta=delta, v_count=hg.num_slots, e_count=hg.num_hyperedges)


def uniformity_constant(hg: CopyHypergraph, lam: float, p: float) -> float:
    """Minimal K with Delta_s <= K (lam p)^{s-1} e(H)/v(H) for all s in [r]."""
    if lam <= 0:
        raise ValueError("lambda must be positive")
    if not 0 < p <= 1:
        raise ValueError("p must lie in (0, 1]")
    prof = degree_profile(hg)
    if prof.e_count == 0:
        return 0.0
    ratio = prof.e_count / prof.v_count
    return max(prof.delta[s] / ((lam * p) ** (s - 1) * ratio) for s in range(1, hg.r + 1))
