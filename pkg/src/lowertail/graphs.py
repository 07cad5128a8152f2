"""Labeled simple graphs, edge slots of K_n, and subgraph-copy counting.

Edge slots index the unordered pairs of [n] in colexicographic order:
slot({i, j}) = j*(j-1)/2 + i for i < j.  The mapping is fixed so that
weight vectors, sample bitmasks, and report files are stable across runs.
"""

from __future__ import annotations

import itertools
import math
import re
from fractions import Fraction
from functools import lru_cache


class GraphFormatError(ValueError):
    """Raised for malformed graph text or unknown named graphs."""


def slot_count(n: int) -> int:
    return n * (n - 1) // 2


def slot_index(i: int, j: int) -> int:
    """Colexicographic slot index of the unordered pair {i, j}."""
    if i == j:
        raise ValueError(f"no slot for a loop at vertex {i}")
    if i > j:
        i, j = j, i
    return j * (j - 1) // 2 + i


def slot_pair(s: int) -> tuple[int, int]:
    """Inverse of slot_index: the pair (i, j) with i < j."""
    if s < 0:
        raise ValueError(f"negative slot index {s}")
    j = int((1 + math.isqrt(1 + 8 * s)) // 2)
    while j * (j - 1) // 2 > s:
        j -= 1
    while (j + 1) * j // 2 <= s:
        j += 1
    i = s - j * (j - 1) // 2
    return i, j


class Graph:
    """Simple undirected graph on vertex set {0, ..., n-1}.

    Immutable after construction; neighborhoods are stored as frozensets so
    edge membership queries are O(1).
    """

    __slots__ = ("n", "edges", "_adj")

    def __init__(self, n: int, edges) -> None:
        if n < 1:
            raise ValueError(f"vertex count must be >= 1, got {n}")
        norm = set()
        adj: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) out of range [0,{n})")
            if u > v:
                u, v = v, u
            norm.add((u, v))
            adj[u].add(v)
            adj[v].add(u)
        self.n = n
        self.edges = frozenset(norm)
        self._adj = tuple(frozenset(a) for a in adj)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adj[u]

    def neighbors(self, u: int) -> frozenset[int]:
        return self._adj[u]

    def degree(self, u: int) -> int:
        return len(self._adj[u])

    def edge_slots(self) -> frozenset[int]:
        return frozenset(slot_index(u, v) for u, v in self.edges)

    def with_edge(self, u: int, v: int) -> "Graph":
        return Graph(self.n, self.edges | {(min(u, v), max(u, v))})

    def without_edge(self, u: int, v: int) -> "Graph":
        return Graph(self.n, self.edges - {(min(u, v), max(u, v))})

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.edge_count})"

    # -- constructors -------------------------------------------------

    @staticmethod
    def complete(k: int) -> "Graph":
        return Graph(k, itertools.combinations(range(k), 2))

    @staticmethod
    def cycle(k: int) -> "Graph":
        if k < 3:
            raise ValueError("cycles need at least 3 vertices")
        return Graph(k, [(i, (i + 1) % k) for i in range(k)])

    @staticmethod
    def path(k: int) -> "Graph":
        """Path on k vertices (k-1 edges)."""
        if k < 2:
            raise ValueError("paths need at least 2 vertices")
        return Graph(k, [(i, i + 1) for i in range(k - 1)])

    @staticmethod
    def from_name(name: str) -> "Graph":
        m = re.fullmatch(r"([KCP])(\d+)", name.strip())
        if not m:
            raise GraphFormatError(f"unknown graph name {name!r} (expected Kk, Ck, or Pk)")
        kind, k = m.group(1), int(m.group(2))
        if kind == "K":
            return Graph.complete(k)
        if kind == "C":
            return Graph.cycle(k)
        return Graph.path(k)

    @staticmethod
    def from_text(text: str) -> "Graph":
        """Parse the plain text format: first line n, then `i j` lines.

        Blank lines are skipped; `#` starts a comment.
        """
        n = None
        edges = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if n is None:
                if len(parts) != 1:
                    raise GraphFormatError(f"line {lineno}: expected vertex count, got {raw!r}")
                n = int(parts[0])
                continue
            if len(parts) != 2:
                raise GraphFormatError(f"line {lineno}: expected 'i j', got {raw!r}")
            edges.append((int(parts[0]), int(parts[1])))
        if n is None:
            raise GraphFormatError("empty graph file")
        return Graph(n, edges)

    @staticmethod
    def parse(spec: str) -> "Graph":
        """Named graph (K3, C4, ...) or a path to a graph text file."""
        try:
            return Graph.from_name(spec)
        except GraphFormatError:
            pass
        try:
            with open(spec) as fh:
                return Graph.from_text(fh.read())
        except OSError as exc:
            raise GraphFormatError(f"{spec!r} is neither a named graph nor a readable file") from exc

    def to_text(self) -> str:
        lines = [str(self.n)]
        lines += [f"{u} {v}" for u, v in sorted(self.edges)]
        return "\n".join(lines) + "\n"


def automorphism_count(H: Graph) -> int:
    """|Aut(H)| by brute force; fine for v(H) <= 8."""
    if H.n > 8:
        raise ValueError("automorphism brute force limited to v(H) <= 8")
    count = 0
    edges = H.edges
    for perm in itertools.permutations(range(H.n)):
        if all((min(perm[u], perm[v]), max(perm[u], perm[v])) in edges for u, v in edges):
            count += 1
    return count


def disjoint_union(G: Graph, H: Graph) -> Graph:
    edges = list(G.edges) + [(u + G.n, v + G.n) for u, v in H.edges]
    return Graph(G.n + H.n, edges)


def _connected(vertices: tuple[int, ...], G: Graph) -> bool:
    vs = set(vertices)
    seen = {vertices[0]}
    stack = [vertices[0]]
    while stack:
        u = stack.pop()
        for w in G.neighbors(u):
            if w in vs and w not in seen:
                seen.add(w)
                stack.append(w)
    return seen == vs


def two_density(G: Graph) -> Fraction:
    """m_2(G): max of (e(F)-1)/(v(F)-2) over subgraphs F with e(F) >= 2.

    Exact rational.  Only connected induced subgraphs on >= 3 vertices are
    scanned: for a fixed vertex set the induced subgraph maximizes the edge
    count, and a disconnected maximizer is dominated by one component.
    """
    if G.edge_count < 2:
        raise ValueError("two_density is undefined for graphs with fewer than 2 edges")
    best: Fraction | None = None
    for size in range(3, G.n + 1):
        for vs in itertools.combinations(range(G.n), size):
            inner = set(vs)
            e = sum(1 for u, v in G.edges if u in inner and v in inner)
            if e < 2 or not _connected(vs, G):
                continue
            cand = Fraction(e - 1, size - 2)
            if best is None or cand > best:
                best = cand
    if best is None:
        raise ValueError("no subgraph with at least 2 edges on >= 3 vertices")
    return best


@lru_cache(maxsize=None)
def _local_copies(H: Graph) -> tuple[frozenset[tuple[int, int]], ...]:
    """Distinct edge sets of copies of H inside K_{v(H)}."""
    out = set()
    for perm in itertools.permutations(range(H.n)):
        out.add(frozenset((min(perm[u], perm[v]), max(perm[u], perm[v])) for u, v in H.edges))
    return tuple(sorted(out, key=sorted))


def _embedding_order(H: Graph) -> list[int]:
    # connectivity-first ordering so partial maps are constrained early
    order = []
    remaining = set(range(H.n))
    while remaining:
        nxt = max(
            remaining,
            key=lambda u: (sum(1 for w in H.neighbors(u) if w in set(order)), H.degree(u)),
        )
        order.append(nxt)
        remaining.discard(nxt)
    return order


def _count_embeddings(H: Graph, G: Graph, extra_edge: tuple[int, int] | None = None,
                      pinned: dict[int, int] | None = None) -> int:
    """Number of injective maps V(H) -> V(G) sending edges of H into
    E(G) (plus optionally one extra edge), with some vertices pinned."""
    def has_edge(u: int, v: int) -> bool:
        if G.has_edge(u, v):
            return True
        if extra_edge is not None:
            a, b = extra_edge
            return (u == a and v == b) or (u == b and v == a)
        return False

    pinned = pinned or {}
    order = [v for v in _embedding_order(H) if v not in pinned]
    order = list(pinned.keys()) + order
    assign: dict[int, int] = dict(pinned)
    used = set(pinned.values())
    if len(used) != len(pinned):
        return 0
    for u, v in H.edges:
        if u in pinned and v in pinned and not has_edge(pinned[u], pinned[v]):
            return 0

    k0 = len(pinned)

    def rec(idx: int) -> int:
        if idx == len(order):
            return 1
        hv = order[idx]
        need = [w for w in H.neighbors(hv) if w in assign]
        total = 0
        for gv in range(G.n):
            if gv in used:
                continue
            if all(has_edge(gv, assign[w]) for w in need):
                assign[hv] = gv
                used.add(gv)
                total += rec(idx + 1)
                used.discard(gv)
                del assign[hv]
        return total

    return rec(k0)


def count_copies(H: Graph, G: Graph) -> int:
    """N_H(G): number of subgraphs of G isomorphic to H."""
    if H.n > G.n:
        return 0
    emb = _count_embeddings(H, G)
    aut = automorphism_count(H)
    assert emb % aut == 0
    return emb // aut


def count_copies_through_slot(H: Graph, G: Graph, s: int) -> int:
    """Copies of H in G + slot s whose edge set contains s.

    Equals N_H(G with s) - N_H(G without s), so it drives incremental
    count updates on single-edge flips.
    """
    a, b = slot_pair(s)
    if b >= G.n:
        raise ValueError(f"slot {s} is not a slot of K_{G.n}")
    aut = automorphism_count(H)
    emb = 0
    for u, v in H.edges:
        for hu, hv in ((u, v), (v, u)):
            emb += _count_embeddings(H, G, extra_edge=(a, b), pinned={hu: a, hv: b})
    assert emb % aut == 0
    return emb // aut
