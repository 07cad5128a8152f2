"""Relative-entropy primitives: i_p, its edge-wise total, and h(x) = x log x - x + 1."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from .graphs import slot_count


@dataclass(frozen=True)
class EdgeWeights:
    """A symmetric edge-probability vector indexed by edge slot."""

    n: int
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (slot_count(self.n),):
            raise ValueError(
                f"expected {slot_count(self.n)} slot values for n={self.n}, got shape {vals.shape}"
            )
        if np.any(vals < 0) or np.any(vals > 1):
            raise ValueError("edge weights must lie in [0, 1]")
        object.__setattr__(self, "values", vals)

    @staticmethod
    def constant(n: int, value: float) -> "EdgeWeights":
        return EdgeWeights(n, np.full(slot_count(n), float(value)))


def _check_p(p: float) -> None:
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in the open interval (0, 1), got {p}")


def i_p_scalar(q: float, p: float) -> float:
    """KL divergence of Bernoulli(q) from Bernoulli(p); 0 log 0 = 0."""
    _check_p(p)
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must lie in [0, 1], got {q}")
    term1 = q * math.log(q / p) if q > 0 else 0.0
    term2 = (1 - q) * math.log((1 - q) / (1 - p)) if q < 1 else 0.0
    return term1 + term2


def i_p_vec(q, p: float) -> np.ndarray:
    """Vectorized i_p with the 0 log 0 = 0 convention."""
    _check_p(p)
    q = np.asarray(q, dtype=float)
    return xlogy(q, q / p) + xlogy(1 - q, (1 - q) / (1 - p))


def i_p_total(q, p: float) -> float:
    """Total relative entropy: sum of i_p over slots (compensated sum)."""
    vals = i_p_vec(np.asarray(q, dtype=float), p)
    return math.fsum(vals.tolist())


def i_p_grad(q, p: float) -> np.ndarray:
    """d/dq i_p(q) = log(q/p) - log((1-q)/(1-p)); +-inf at the endpoints."""
    _check_p(p)
    q = np.asarray(q, dtype=float)
    with np.errstate(divide="ignore"):
        return np.log(q / p) - np.log((1 - q) / (1 - p))


def h(x):
    """h(x) = x log x - x + 1 on [0, 1], with h(0) = 1 by continuity."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or np.any(x > 1):
        raise ValueError("h is only evaluated on [0, 1]")
    out = xlogy(x, x) - x + 1.0
    return float(out) if out.ndim == 0 else out


def h_total(x) -> float:
    """Sum of h over a weight vector (compensated sum)."""
    vals = np.atleast_1d(h(x))
    return math.fsum(vals.tolist())


def h_prime(x):
    """h'(x) = log x; -inf at 0."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        out = np.log(x)
    return float(out) if out.ndim == 0 else out
