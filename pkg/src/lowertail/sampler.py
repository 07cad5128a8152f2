"""Exact and MCMC access to G(n,p) conditioned on a lower-tail copy-count event.

The event is {N_H(G) <= eta * N_H(1) * p^{e(H)}}.  It is downward closed
(deleting an edge never creates a copy), which makes the single-edge-flip
Metropolis chain irreducible through the empty graph and keeps the hard
constraint honest: proposals leaving the event are rejected outright.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .copies import CopyHypergraph, ResourceBudgetError
from .entropy import EdgeWeights
from .graphs import slot_count

EXACT_SLOT_LIMIT = 24


class ZeroProbabilityError(ValueError):
    """Raised when conditioning on an assignment the event gives measure zero."""


class AuditError(RuntimeError):
    """Incremental copy count diverged from a from-scratch recount."""


@dataclass(frozen=True)
class LowerTailEvent:
    """N_H(G) <= threshold, with threshold = eta * N_H(1) * p^{e(H)}.

    The threshold is kept as an exact rational of the float inputs so the
    integer comparison never flaps at the boundary.
    """

    hg: CopyHypergraph
    p: float
    eta: float
    threshold_exact: Fraction = field(init=False, repr=False)

    def __post_init__(self):
        if not 0.0 < self.p < 1.0:
            raise ValueError(f"p must lie in (0, 1), got {self.p}")
        if not 0.0 <= self.eta:
            raise ValueError(f"eta must be nonnegative, got {self.eta}")
        thr = Fraction(self.eta) * self.hg.num_hyperedges * Fraction(self.p) ** self.hg.r
        object.__setattr__(self, "threshold_exact", thr)

    @property
    def threshold(self) -> float:
        return float(self.threshold_exact)

    @property
    def max_count(self) -> int:
        """Largest copy count inside the event."""
        return math.floor(self.threshold_exact)

    def contains_count(self, count: int) -> bool:
        return count <= self.threshold_exact

    @property
    def is_whole_space(self) -> bool:
        return self.hg.num_hyperedges <= self.threshold_exact


class ExactConditional:
    """Full enumeration of all 2^{C(n,2)} graphs, reweighted on the event.

    Exposes exact conditional expectations of slot monomials, copy counts of
    arbitrary copy hypergraphs on the same slot set, and conditional marginal
    vectors given partial edge information.
    """

    def __init__(self, event: LowerTailEvent):
        m = event.hg.num_slots
        if m > EXACT_SLOT_LIMIT:
            raise ResourceBudgetError(
                f"exact conditioning enumerates 2^{m} graphs; limit is C(n,2) <= {EXACT_SLOT_LIMIT}"
            )
        self.event = event
        self.num_slots = m
        masks = np.arange(1 << m, dtype=np.uint32)
        edge_counts = np.bitwise_count(masks).astype(np.int64)
        counts = self._copy_counts(event.hg, masks)
        in_event = counts <= event.max_count
        logw = edge_counts * math.log(event.p) + (m - edge_counts) * math.log1p(-event.p)
        weights = np.exp(logw)
        self.z = math.fsum(weights[in_event].tolist())
        probs = np.where(in_event, weights, 0.0)
        probs /= probs.sum()
        self.masks = masks
        self.edge_counts = edge_counts
        self.copy_counts = counts
        self.in_event = in_event
        self.probs = probs

    @staticmethod
    def _copy_counts(hg: CopyHypergraph, masks: np.ndarray) -> np.ndarray:
        counts = np.zeros(masks.shape, dtype=np.int64)
        for he in hg.hyperedges:
            hm = np.uint32(sum(1 << s for s in he))
            counts += (masks & hm) == hm
        return counts

    @property
    def event_probability(self) -> float:
        return self.z

    @property
    def neg_log_probability(self) -> float:
        return -math.log(self.z)

    def monomial_expectation(self, slots) -> float:
        """E[prod_{s in slots} Y_s | event]; the empty product is 1."""
        mask = np.uint32(sum(1 << int(s) for s in set(slots)))
        sel = (self.masks & mask) == mask
        return math.fsum(self.probs[sel].tolist())

    def marginals(self) -> EdgeWeights:
        vals = np.array([self.monomial_expectation([s]) for s in range(self.num_slots)])
        return EdgeWeights(self.event.hg.n, vals)

    def pair_marginal(self, s: int, t: int) -> float:
        return self.monomial_expectation([s, t])

    def expectation_of(self, values: np.ndarray) -> float:
        """E[f(G) | event] for a per-graph value table indexed by bitmask."""
        return math.fsum((self.probs * np.asarray(values, dtype=float)).tolist())

    def copy_count_table(self, other: CopyHypergraph) -> np.ndarray:
        """Per-graph N_F table for another copy hypergraph on the same slots."""
        if other.num_slots != self.num_slots:
            raise ValueError("copy hypergraph lives on a different slot set")
        return self._copy_counts(other, self.masks)

    def conditional_mean_count(self, other: CopyHypergraph | None = None) -> float:
        table = self.copy_counts if other is None else self.copy_count_table(other)
        return self.expectation_of(table)

    def conditional_var_count(self, other: CopyHypergraph | None = None) -> float:
        table = self.copy_counts if other is None else self.copy_count_table(other)
        mean = self.expectation_of(table)
        return self.expectation_of((table - mean) ** 2)

    # -- conditioning on a slot assignment -----------------------------

    def _assignment_selector(self, w_slots, bits) -> np.ndarray:
        w_slots = [int(s) for s in w_slots]
        if len(set(w_slots)) != len(w_slots):
            raise ValueError("duplicate slots in W")
        on = np.uint32(sum(1 << s for s, b in zip(w_slots, bits) if b))
        wmask = np.uint32(sum(1 << s for s in w_slots))
        return (self.masks & wmask) == on

    def assignment_probability(self, w_slots, bits) -> float:
        sel = self._assignment_selector(w_slots, bits)
        return math.fsum(self.probs[sel].tolist())

    def conditional_marginals_given(self, w_slots, bits) -> np.ndarray:
        """P(Y_s = 1 | event, Y_W = bits) for every slot s (including W)."""
        sel = self._assignment_selector(w_slots, bits)
        total = math.fsum(self.probs[sel].tolist())
        if total <= 0.0:
            raise ZeroProbabilityError(
                f"assignment {list(bits)} on W={sorted(int(s) for s in w_slots)} has zero conditional probability"
            )
        out = np.empty(self.num_slots)
        for s in range(self.num_slots):
            bit = np.uint32(1 << s)
            out[s] = math.fsum(self.probs[sel & ((self.masks & bit) == bit)].tolist()) / total
        return out

    def conditional_monomial_given(self, w_slots, bits, slots) -> float:
        """E[prod_{s in slots} Y_s | event, Y_W = bits]."""
        sel = self._assignment_selector(w_slots, bits)
        total = math.fsum(self.probs[sel].tolist())
        if total <= 0.0:
            raise ZeroProbabilityError("zero-probability assignment")
        mask = np.uint32(sum(1 << int(s) for s in set(slots)))
        return math.fsum(self.probs[sel & ((self.masks & mask) == mask)].tolist()) / total

    def assignment_distribution(self, w_slots):
        """Iterates (bits, probability) over all assignments on W with positive mass."""
        w_slots = [int(s) for s in w_slots]
        for bits in itertools.product((0, 1), repeat=len(w_slots)):
            prob = self.assignment_probability(w_slots, bits)
            if prob > 0.0:
                yield bits, prob

    def joint_count_distribution(self):
        """P(e(G) = e, N_H(G) = N | event) as a dict keyed by (e, N)."""
        out: dict[tuple[int, int], float] = {}
        active = np.nonzero(self.probs > 0)[0]
        es = self.edge_counts[active]
        ns = self.copy_counts[active]
        ps = self.probs[active]
        for e, nn, pr in zip(es.tolist(), ns.tolist(), ps.tolist()):
            out[(e, nn)] = out.get((e, nn), 0.0) + pr
        return out


def conditioned_marginal_vector_qW(exact: ExactConditional, w_slots, bits) -> EdgeWeights:
    """The vector q^W under a W-assignment: q^W_e = E[Y_e | event, Y_W] off W,
    and q^W_e = p on W by convention."""
    vals = exact.conditional_marginals_given(w_slots, bits)
    for s in w_slots:
        vals[int(s)] = exact.event.p
    return EdgeWeights(exact.event.hg.n, vals)


# -- MCMC -----------------------------------------------------------------


@dataclass(frozen=True)
class ChainConfig:
    steps: int = 10**6
    burn_in: int = 10**5
    thinning: int | None = None      # defaults to C(n,2)
    chains: int = 8
    seed: int = 0
    audit_interval: int = 1 << 16
    block: int = 1 << 14

    def resolved_thinning(self, n: int) -> int:
        return self.thinning if self.thinning is not None else slot_count(n)

    @staticmethod
    def from_mapping(d: dict) -> "ChainConfig":
        cfg = ChainConfig()
        known = set(cfg.__dataclass_fields__)
        bad = set(d) - known
        if bad:
            raise ValueError(f"unknown chain config keys: {sorted(bad)}")
        typed = {k: int(v) for k, v in d.items()}
        return ChainConfig(**typed)


@dataclass
class ChainResult:
    chain_index: int
    steps: int
    accepted: int
    proposed: int
    audits_passed: int
    sample_steps: list[int]
    sample_masks: list[int]
    sample_counts: list[int]

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.proposed if self.proposed else 0.0

    def sample_matrix(self, num_slots: int) -> np.ndarray:
        """Retained samples as a boolean (num_samples, num_slots) array.

        Masks are arbitrary-precision ints (slot counts routinely exceed 64),
        so they are widened through little-endian bytes.
        """
        nbytes = (num_slots + 7) // 8
        buf = b"".join(m.to_bytes(nbytes, "little") for m in self.sample_masks)
        raw = np.frombuffer(buf, dtype=np.uint8).reshape(len(self.sample_masks), nbytes)
        bits = np.unpackbits(raw, axis=1, bitorder="little")[:, :num_slots]
        return bits.astype(bool)


def _slot_neighbor_arrays(hg: CopyHypergraph) -> list[np.ndarray]:
    """For each slot s, the array of other-slot tuples of hyperedges through s."""
    out = []
    for s in range(hg.num_slots):
        rows = [
            [t for t in hg.hyperedges[idx] if t != s]
            for idx in hg.slot_incidence[s]
        ]
        out.append(np.array(rows, dtype=np.int64).reshape(len(rows), hg.r - 1))
    return out


def run_chain(event: LowerTailEvent, cfg: ChainConfig, chain_index: int) -> ChainResult:
    """One Metropolis chain from the empty graph.

    Flip proposals: a uniform slot; adding an edge is accepted with probability
    min(1, p/(1-p)) and only if the event still holds; removing with
    min(1, (1-p)/p), always inside the event by downward closure.  N_H is
    maintained incrementally and audited against a full recount periodically.
    """
    hg = event.hg
    m = hg.num_slots
    neighbors = _slot_neighbor_arrays(hg)
    x = np.zeros(m, dtype=bool)
    count = 0
    max_count = event.max_count
    p = event.p
    add_acc = min(1.0, p / (1.0 - p))
    del_acc = min(1.0, (1.0 - p) / p)
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence((cfg.seed, chain_index))))
    thinning = cfg.resolved_thinning(hg.n)

    accepted = 0
    audits = 0
    sample_steps: list[int] = []
    sample_masks: list[int] = []
    sample_counts: list[int] = []
    mask = 0
    step = 0
    while step < cfg.steps:
        block = min(cfg.block, cfg.steps - step)
        slots = rng.integers(0, m, size=block).tolist()
        us = rng.random(block).tolist()
        for s, u in zip(slots, us):
            step += 1
            if x[s]:
                if u <= del_acc:
                    nbrs = neighbors[s]
                    delta = int(np.all(x[nbrs], axis=1).sum()) if nbrs.size else len(nbrs)
                    x[s] = False
                    count -= delta
                    mask &= ~(1 << s)
                    accepted += 1
            else:
                if u <= add_acc:
                    nbrs = neighbors[s]
                    delta = int(np.all(x[nbrs], axis=1).sum()) if nbrs.size else len(nbrs)
                    if count + delta <= max_count:
                        x[s] = True
                        count += delta
                        mask |= 1 << s
                        accepted += 1
            if step % cfg.audit_interval == 0:
                recount = hg.count_in_slots(x)
                if recount != count:
                    raise AuditError(
                        f"chain {chain_index} step {step}: incremental count {count} "
                        f"!= recount {recount} (mask {mask:#x})"
                    )
                audits += 1
            if step > cfg.burn_in and (step - cfg.burn_in) % thinning == 0:
                sample_steps.append(step)
                sample_masks.append(mask)
                sample_counts.append(count)
    return ChainResult(
        chain_index=chain_index,
        steps=cfg.steps,
        accepted=accepted,
        proposed=cfg.steps,
        audits_passed=audits,
        sample_steps=sample_steps,
        sample_masks=sample_masks,
        sample_counts=sample_counts,
    )


def run_chains(event: LowerTailEvent, cfg: ChainConfig) -> list[ChainResult]:
    # chains are independent; sequential here, parallelizable by chain index
    return [run_chain(event, cfg, k) for k in range(cfg.chains)]


def effective_sample_size(series: np.ndarray, num_batches: int = 25) -> float:
    """Batch-means ESS of a scalar sample series."""
    series = np.asarray(series, dtype=float)
    n = len(series)
    if n < 2 * num_batches:
        num_batches = max(2, n // 2)
    bsize = n // num_batches
    if bsize < 1:
        return float(n)
    trimmed = series[: bsize * num_batches].reshape(num_batches, bsize)
    bmeans = trimmed.mean(axis=1)
    var_b = bmeans.var(ddof=1)
    var_s = series.var(ddof=1)
    if var_b <= 0 or var_s <= 0:
        return float(n)
    # sigma^2_mcmc ~ bsize * var_b, so ESS = n * var_s / (bsize * var_b)
    return float(n * var_s / (bsize * var_b))


def mcmc_marginals(results: list[ChainResult], num_slots: int) -> tuple[np.ndarray, np.ndarray]:
    """Pooled marginal estimates and their standard errors (by chain spread)."""
    per_chain = []
    for res in results:
        X = res.sample_matrix(num_slots)
        if len(X) == 0:
            raise ValueError("chain retained no samples; increase steps or cut burn-in")
        per_chain.append(X.mean(axis=0))
    per_chain = np.array(per_chain)
    est = per_chain.mean(axis=0)
    if len(results) > 1:
        se = per_chain.std(axis=0, ddof=1) / math.sqrt(len(results))
    else:
        se = np.full(num_slots, np.nan)
    return est, se


def conditional_marginals(
    event: LowerTailEvent,
    method: str = "exact",
    cfg: ChainConfig | None = None,
) -> tuple[EdgeWeights, np.ndarray | None]:
    """Conditional edge marginals, exact or MCMC with standard errors."""
    if method == "exact":
        exact = ExactConditional(event)
        return exact.marginals(), None
    if method == "mcmc":
        results = run_chains(event, cfg or ChainConfig())
        est, se = mcmc_marginals(results, event.hg.num_slots)
        return EdgeWeights(event.hg.n, est), se
    raise ValueError(f"unknown marginal method {method!r} (expected 'exact' or 'mcmc')")
