"""Cut norms, spectral bounds, and closed-walk traces for edge-weight deviations.

The cut norm used throughout is
    ||A||_box = sup_{x, y in [0,1]^n} |x^T A y| / n^2,
whose supremum is attained at 0/1 vectors, so exact evaluation is a search
over vertex subsets.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .graphs import Graph, slot_count, slot_pair

EXACT_CUT_LIMIT = 20


def weights_to_matrix(q, n: int) -> np.ndarray:
    """Symmetric n x n matrix of slot weights with a zero diagonal."""
    q = np.asarray(q, dtype=float)
    if q.shape != (slot_count(n),):
        raise ValueError(f"weight vector has shape {q.shape}, expected ({slot_count(n)},)")
    A = np.zeros((n, n))
    for s, val in enumerate(q.tolist()):
        i, j = slot_pair(s)
        A[i, j] = A[j, i] = val
    return A


def graph_to_matrix(G: Graph) -> np.ndarray:
    A = np.zeros((G.n, G.n))
    for u, v in G.edges:
        A[u, v] = A[v, u] = 1.0
    return A


def deviation_matrix(A: np.ndarray, level: float) -> np.ndarray:
    """Subtract a constant level off-diagonal, leaving the diagonal at zero."""
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    return A - level * (np.ones((n, n)) - np.eye(n))


def _best_y_value(v: np.ndarray) -> float:
    """max over y in {0,1}^n of |sum_j v_j y_j| = max(sum of positives, -sum of negatives)."""
    pos = float(v[v > 0].sum())
    neg = float(-v[v < 0].sum())
    return max(pos, neg)


def cut_norm_exact(A: np.ndarray) -> float:
    """Exact cut norm by Gray-code enumeration of x in {0,1}^n.

    For each x the optimal y is coordinatewise, so the inner problem is
    linear.  Restricted to n <= EXACT_CUT_LIMIT.
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("cut norm needs a square matrix")
    if n > EXACT_CUT_LIMIT:
        raise ValueError(f"exact cut norm limited to n <= {EXACT_CUT_LIMIT}, got {n}")
    v = np.zeros(n)              # v = A^T x for the current subset
    best = 0.0
    state = 0
    for k in range(1, 1 << n):
        # Gray code: flip the bit at the ruler position of k
        bit = (k & -k).bit_length() - 1
        if state & (1 << bit):
            v -= A[bit]
            state &= ~(1 << bit)
        else:
            v += A[bit]
            state |= 1 << bit
        cand = _best_y_value(v)
        if cand > best:
            best = cand
    return best / (n * n)


def cut_norm_heuristic(A: np.ndarray, restarts: int = 32, seed: int = 0) -> float:
    """Alternating-maximization lower bound on the cut norm.

    Alternates between the coordinatewise-optimal x given y and vice versa,
    from random 0/1 starts (plus all-ones and top-eigenvector sign starts).
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("cut norm needs a square matrix")
    starts = [np.ones(n)]
    w, V = np.linalg.eigh((A + A.T) / 2)
    lead = V[:, np.argmax(np.abs(w))]
    starts.append((lead > 0).astype(float))
    starts.append((lead < 0).astype(float))
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    for _ in range(restarts):
        starts.append(rng.integers(0, 2, size=n).astype(float))
    best = 0.0
    for x in starts:
        for sign in (1.0, -1.0):
            xx = x.copy()
            val = -1.0
            for _ in range(200):
                y = (sign * (A.T @ xx) > 0).astype(float)
                xx_new = (sign * (A @ y) > 0).astype(float)
                new_val = sign * float(xx_new @ A @ y)
                if new_val <= val + 1e-15:
                    break
                xx, val = xx_new, new_val
            best = max(best, val)
    return best / (n * n)


def spectral_cut_bound(A: np.ndarray) -> float:
    """Upper bound: ||A||_box <= max |eigenvalue| / n for symmetric A."""
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    if not np.allclose(A, A.T, atol=1e-12):
        raise ValueError("spectral bound assumes a symmetric matrix")
    w = np.linalg.eigvalsh(A)
    return float(np.max(np.abs(w))) / n


def cut_norm_best(A: np.ndarray, restarts: int = 32, seed: int = 0) -> float:
    """Exact cut norm when the size permits, heuristic lower bound otherwise."""
    A = np.asarray(A, dtype=float)
    if A.shape[0] <= EXACT_CUT_LIMIT:
        return cut_norm_exact(A)
    return cut_norm_heuristic(A, restarts=restarts, seed=seed)


@dataclass(frozen=True)
class CutNormBracket:
    lower: float
    upper: float
    exact: bool

    @property
    def value(self) -> float:
        return self.lower if self.exact else 0.5 * (self.lower + self.upper)


def cut_norm_bracket(A: np.ndarray, restarts: int = 32, seed: int = 0) -> CutNormBracket:
    A = np.asarray(A, dtype=float)
    if A.shape[0] <= EXACT_CUT_LIMIT:
        v = cut_norm_exact(A)
        return CutNormBracket(lower=v, upper=v, exact=True)
    lo = cut_norm_heuristic(A, restarts=restarts, seed=seed)
    hi = spectral_cut_bound(A)
    return CutNormBracket(lower=lo, upper=hi, exact=False)


def closed_walk_trace(G: Graph, q: float, k: int, include_diagonal: bool = False) -> float:
    """Tr((A - qJ)^{2k}) for the adjacency matrix of G.

    By default q is subtracted off-diagonal only (J has a zero diagonal, the
    deviation-matrix convention used everywhere else).  include_diagonal=True
    subtracts on the diagonal too, so G = K_n with q = 1 gives Tr((-I)^{2k}) = n.
    """
    if k < 1:
        raise ValueError("walk length parameter k must be >= 1")
    A = graph_to_matrix(G)
    n = G.n
    if include_diagonal:
        D = A - q * np.ones((n, n))
    else:
        D = deviation_matrix(A, q)
    return float(np.trace(np.linalg.matrix_power(D, 2 * k)))


def closed_walk_census(G: Graph, k: int) -> dict[tuple[int, int], int]:
    """Closed 2k-walk counts of G grouped by (distinct vertices, distinct
    edges) of the walk; the values sum to Tr(A^{2k}).

    Brute force over walk sequences, so only for tiny n and k.
    """
    if k < 1:
        raise ValueError("walk length parameter k must be >= 1")
    length = 2 * k
    out: dict[tuple[int, int], int] = {}

    def rec(start: int, walk: list[int]):
        u = walk[-1]
        if len(walk) == length:
            if start in G.neighbors(u):
                full = walk + [start]
                vs = len(set(full))
                es = len({(min(a, b), max(a, b)) for a, b in zip(full, full[1:])})
                out[(vs, es)] = out.get((vs, es), 0) + 1
            return
        for w in G.neighbors(u):
            rec(start, walk + [w])

    for v in range(G.n):
        rec(v, [v])
    return out


def counting_discrepancy(H: Graph, hg_q, hg_qp, n: int) -> tuple[float, float]:
    """(|t_inj(H,q) - t_inj(H,q')|, e(H) * ||q - q'||_box) for two weight vectors.

    The second component is the counting-lemma bound on the first.
    """
    from .copies import enumerate_copies, injective_density

    q = np.asarray(hg_q, dtype=float)
    qp = np.asarray(hg_qp, dtype=float)
    hg = enumerate_copies(H, n)
    lhs = abs(injective_density(hg, q) - injective_density(hg, qp))
    diff = weights_to_matrix(q, n) - weights_to_matrix(qp, n)
    rhs = H.edge_count * cut_norm_best(diff)
    return lhs, rhs
