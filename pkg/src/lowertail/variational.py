"""Solvers for the lower-tail entropic variational problem.

Covers the finite-p problem (minimize total i_p subject to an expected-copy
budget), its sparse limit in rescaled variables x = q/p with objective
sum h(x_e), the constancy-threshold fixed point, and a stability probe that
measures how far near-minimizers can stray from the constant in cut norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .copies import CopyHypergraph, expected_count
from .entropy import h, h_prime, h_total, i_p_grad, i_p_total

EPS_BOX = 1e-9


class SolverConvergenceError(RuntimeError):
    """Raised when no restart produced a feasible-within-tolerance point.

    Carries the best iterate found; callers must treat its value only as an
    upper bound on the optimum (the problem is non-convex).
    """

    def __init__(self, message: str, best: "VariationalSolution | None" = None):
        super().__init__(message)
        self.best = best


class ThresholdBracketError(RuntimeError):
    """Raised when the threshold equation does not show a unique sign change."""


@dataclass(frozen=True)
class SolverConfig:
    restarts: int = 8
    seed: int = 0
    feasibility_tol: float = 1e-8       # relative constraint violation
    stall_improvement: float = 1e-10
    stall_iters: int = 50
    max_inner_iters: int = 4000
    mu_rounds: int = 12
    mu_growth: float = 10.0
    grad_tol: float = 1e-9

    @staticmethod
    def from_mapping(d: dict) -> "SolverConfig":
        cfg = SolverConfig()
        known = {f for f in cfg.__dataclass_fields__}
        bad = set(d) - known
        if bad:
            raise ValueError(f"unknown solver config keys: {sorted(bad)}")
        typed = {}
        for k, v in d.items():
            want = type(getattr(cfg, k))
            typed[k] = want(v)
        return replace(cfg, **typed)


@dataclass(frozen=True)
class VariationalProblem:
    """Minimize entropy subject to E[N_H(q)] <= eta * baseline.

    p=None selects the sparse limit: variables are x = q/p in [0,1], the
    objective is sum h(x_e), and the baseline is N_H(1).
    """

    hg: CopyHypergraph
    eta: float
    p: float | None = None

    def __post_init__(self):
        if self.hg.num_hyperedges == 0:
            raise ValueError("variational problem needs a nonempty copy hypergraph")
        if not 0.0 < self.eta <= 1.0:
            raise ValueError(f"eta must lie in (0, 1], got {self.eta}")
        if self.p is not None and not 0.0 < self.p < 1.0:
            raise ValueError(f"p must lie in (0, 1), got {self.p}")

    @property
    def sparse(self) -> bool:
        return self.p is None

    @property
    def num_vars(self) -> int:
        return self.hg.num_slots

    @property
    def budget(self) -> float:
        base = float(self.hg.num_hyperedges)
        if not self.sparse:
            base *= self.p ** self.hg.r
        return self.eta * base

    def objective(self, q: np.ndarray) -> float:
        if self.sparse:
            return h_total(q)
        return i_p_total(q, self.p)

    def objective_grad(self, q: np.ndarray) -> np.ndarray:
        if self.sparse:
            return np.asarray(h_prime(q))
        return i_p_grad(q, self.p)

    def constraint_value(self, q: np.ndarray) -> float:
        return expected_count(self.hg, np.asarray(q, dtype=float))

    def constraint_grad(self, q: np.ndarray) -> np.ndarray:
        E = self.hg.hyperedge_array()
        vals = np.asarray(q, dtype=float)
        P = vals[E]
        rowprod = np.prod(P, axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            contrib = np.where(P > 0, rowprod[:, None] / P, 0.0)
        # recompute exactly where a factor vanished
        zero_rows, zero_cols = np.nonzero(P == 0)
        for i, j in zip(zero_rows.tolist(), zero_cols.tolist()):
            others = np.delete(P[i], j)
            contrib[i, j] = np.prod(others)
        grad = np.zeros(self.num_vars)
        np.add.at(grad, E, contrib)
        return grad

    def feasibility_gap(self, q: np.ndarray) -> float:
        return max(0.0, self.constraint_value(q) - self.budget) / self.budget

    def feasible_constant(self) -> float:
        """The level of the best feasible constant vector: eta^{1/r} in the
        sparse limit, eta^{1/r} * p at finite p."""
        c = self.eta ** (1.0 / self.hg.r)
        return c if self.sparse else c * self.p

    def constant_value(self) -> float:
        """Objective of the best constant vector, in closed form."""
        c = self.feasible_constant()
        m = self.num_vars
        if self.sparse:
            return m * h(c)
        return m * float(i_p_total(np.array([c]), self.p))


@dataclass
class VariationalSolution:
    q_star: np.ndarray
    value: float
    feasibility_gap: float
    multiplier: float
    restarts_used: int
    iterations: int
    converged: bool
    distance_to_constant: float
    projected_grad_norm: float

    def q_physical(self, prob: VariationalProblem) -> np.ndarray:
        """Edge probabilities; in the sparse limit q_star is x = q/p."""
        return self.q_star


def _project(q: np.ndarray) -> np.ndarray:
    return np.clip(q, EPS_BOX, 1.0)


def _penalized(prob: VariationalProblem, q: np.ndarray, mu: float) -> float:
    viol = max(0.0, prob.constraint_value(q) - prob.budget)
    return prob.objective(q) + mu * viol * viol


def _penalized_grad(prob: VariationalProblem, q: np.ndarray, mu: float) -> np.ndarray:
    viol = max(0.0, prob.constraint_value(q) - prob.budget)
    g = prob.objective_grad(q)
    if viol > 0:
        g = g + 2.0 * mu * viol * prob.constraint_grad(q)
    return g


def _inner_descent(prob, q, mu, cfg):
    """Projected gradient with backtracking on the penalized objective."""
    f = _penalized(prob, q, mu)
    step = 1.0
    stall = 0
    iters = 0
    for _ in range(cfg.max_inner_iters):
        iters += 1
        g = _penalized_grad(prob, q, mu)
        improved = False
        s = step
        for _ in range(40):
            cand = _project(q - s * g)
            fc = _penalized(prob, cand, mu)
            if fc < f:
                improved = True
                break
            s *= 0.5
        if not improved:
            break
        gain = f - fc
        q, f = cand, fc
        step = min(s * 2.0, 1e3)
        stall = stall + 1 if gain < cfg.stall_improvement else 0
        if stall >= cfg.stall_iters:
            break
        pg = q - _project(q - g)
        if float(np.linalg.norm(pg)) <= cfg.grad_tol:
            break
    return q, iters


def _polish_constant_direction(prob: VariationalProblem, q: np.ndarray) -> np.ndarray:
    """Exact 1-D line search along the segment toward the feasible constant."""
    c = prob.feasible_constant()
    target = np.full(prob.num_vars, c)
    tol = prob.budget * 1e-12 + 1e-300

    def val(t: float) -> float:
        cand = _project((1 - t) * q + t * target)
        if prob.constraint_value(cand) > prob.budget + prob.budget * 1e-8:
            return float("inf")
        return prob.objective(cand)

    res = minimize_scalar(val, bounds=(0.0, 1.0), method="bounded",
                          options={"xatol": 1e-14})
    best_t = float(res.x)
    # the segment endpoint (exactly constant) often wins; check it explicitly
    candidates = [best_t, 0.0, 1.0]
    best_q, best_v = q, val(0.0)
    for t in candidates:
        v = val(t)
        if v < best_v - 0.0:
            best_v = v
            best_q = _project((1 - t) * q + t * target)
    # snap to the exact constant when the search lands next to it
    if np.max(np.abs(best_q - c)) < 1e-7 and val(1.0) <= best_v + 1e-12:
        best_q = target.copy()
    return best_q


def _distance_to_constant(q: np.ndarray, n: int) -> float:
    from .metrics import cut_norm_best, weights_to_matrix

    c = float(np.mean(q))
    A = weights_to_matrix(q, n) - c * (np.ones((n, n)) - np.eye(n))
    return cut_norm_best(A)


def solve_phi(prob: VariationalProblem, cfg: SolverConfig | None = None) -> VariationalSolution:
    """Multi-start projected-gradient solve of Phi_p(H, eta) / Phi(H, eta).

    Returns the best point whose relative constraint violation is within
    cfg.feasibility_tol; the value is an upper bound on the optimum.
    """
    cfg = cfg or SolverConfig()
    m = prob.num_vars
    mu0 = 10.0 / (prob.budget ** 2)

    starts: list[np.ndarray] = [np.full(m, prob.feasible_constant())]
    for k in range(cfg.restarts):
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence((cfg.seed, k))))
        starts.append(rng.uniform(0.05, 1.0, size=m))

    best: VariationalSolution | None = None
    total_iters = 0
    for idx, q0 in enumerate(starts):
        q = _project(q0)
        mu = mu0
        for _ in range(cfg.mu_rounds):
            q, it = _inner_descent(prob, q, mu, cfg)
            total_iters += it
            if prob.feasibility_gap(q) <= cfg.feasibility_tol:
                break
            mu *= cfg.mu_growth
        q = _polish_constant_direction(prob, q)
        gap = prob.feasibility_gap(q)
        if gap > cfg.feasibility_tol:
            continue
        value = prob.objective(q)
        g = prob.objective_grad(q)
        viol = max(0.0, prob.constraint_value(q) - prob.budget)
        multiplier = 2.0 * mu * viol
        lag = g + (multiplier if multiplier > 0 else _active_multiplier(prob, q)) * prob.constraint_grad(q)
        pgnorm = float(np.linalg.norm(q - _project(q - lag)))
        sol = VariationalSolution(
            q_star=q,
            value=value,
            feasibility_gap=gap,
            multiplier=max(multiplier, _active_multiplier(prob, q)),
            restarts_used=idx,
            iterations=total_iters,
            converged=True,
            distance_to_constant=_distance_to_constant(q, prob.hg.n),
            projected_grad_norm=pgnorm,
        )
        if best is None or (sol.value, sol.distance_to_constant) < (best.value, best.distance_to_constant):
            best = sol
    if best is None:
        fallback = _project(starts[0])
        raise SolverConvergenceError(
            f"no feasible point within tolerance after {len(starts)} starts",
            best=VariationalSolution(
                q_star=fallback, value=prob.objective(fallback),
                feasibility_gap=prob.feasibility_gap(fallback), multiplier=0.0,
                restarts_used=len(starts), iterations=total_iters, converged=False,
                distance_to_constant=_distance_to_constant(fallback, prob.hg.n),
                projected_grad_norm=float("nan"),
            ),
        )
    return best


def _active_multiplier(prob: VariationalProblem, q: np.ndarray) -> float:
    """Least-squares KKT multiplier for the (near-)active constraint."""
    if prob.constraint_value(q) < prob.budget * (1 - 1e-6):
        return 0.0
    g = prob.objective_grad(q)
    cg = prob.constraint_grad(q)
    interior = (q > EPS_BOX * 2) & (q < 1 - 1e-12)
    denom = float(np.dot(cg[interior], cg[interior]))
    if denom == 0:
        return 0.0
    return max(0.0, -float(np.dot(g[interior], cg[interior])) / denom)


# -- constancy threshold ------------------------------------------------


def _threshold_residual(eta: float, r: int) -> float:
    """Residual of h(eta^{1/eta}) = h(q) + q log q (log eta^{1/eta} - log q),
    with q = eta^{1/r}; logs handled analytically so eta^{1/eta} may underflow."""
    log_eta = math.log(eta)
    lx = log_eta / eta
    lq = log_eta / r
    x = math.exp(lx) if lx > -745 else 0.0
    q = math.exp(lq)
    hx = x * lx - x + 1.0 if x > 0 else 1.0
    hq = q * lq - q + 1.0
    return hx - (hq + q * lq * (lx - lq))


def eta_threshold(r: int, grid_points: int = 1000) -> float:
    """Fixed point eta_H for an H with e(H) = r: the unique root in (0, 1)
    of the tangency equation underlying the constant-minimizer regime.

    Scans a grid for sign changes (excluding the trivial root at eta = 1)
    and bisects; raises ThresholdBracketError unless exactly one change is
    found.
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    lo, hi = 1e-4, 0.999
    grid = np.linspace(lo, hi, grid_points)
    vals = np.array([_threshold_residual(float(e), r) for e in grid])
    signs = np.sign(vals)
    changes = np.nonzero(np.diff(signs) != 0)[0]
    if len(changes) != 1:
        raise ThresholdBracketError(
            f"expected exactly one sign change on ({lo}, {hi}) for r={r}, found {len(changes)}"
        )
    i = int(changes[0])
    root = brentq(_threshold_residual, float(grid[i]), float(grid[i + 1]), args=(r,),
                  xtol=1e-14, rtol=8.9e-16)
    return float(root)


def tangency_margin(r: int, eta: float, grid: int = 200) -> float:
    """Min over a grid of the box inequality h(x) >= h(c) + c log c (log x - log c)
    for (x, c) in [eta^{1/eta}, 1] x [eta^{1/r}, 1]."""
    lx0 = math.log(eta) / eta
    lq0 = math.log(eta) / r
    lxs = np.linspace(lx0, 0.0, grid)
    lcs = np.linspace(lq0, 0.0, grid)
    xs = np.exp(lxs)
    cs = np.exp(lcs)
    hx = xs * lxs - xs + 1.0
    margin = np.inf
    for c, lc in zip(cs, lcs):
        rhs = (c * lc - c + 1.0) + c * lc * (lxs - lc)
        margin = min(margin, float(np.min(hx - rhs)))
    return margin


# -- stability probe -----------------------------------------------------


@dataclass(frozen=True)
class StabilityRow:
    excess: float
    max_cut_distance: float
    mean_cut_distance: float
    max_small_edge_fraction: float


@dataclass(frozen=True)
class StabilityProbeResult:
    eta: float
    n: int
    q_const: float
    small_edge_cutoff: float
    rows: tuple[StabilityRow, ...]

    def fitted_exponent(self) -> float:
        """Log-log slope of max cut distance against entropy excess,
        over the rows with positive excess and positive distance."""
        xs, ys = [], []
        for row in self.rows:
            if row.excess > 0 and row.max_cut_distance > 0:
                xs.append(math.log(row.excess))
                ys.append(math.log(row.max_cut_distance))
        if len(xs) < 2:
            raise ValueError("need at least two positive-excess rows to fit a slope")
        slope = np.polyfit(xs, ys, 1)[0]
        return float(slope)


class ProbeGenerationError(RuntimeError):
    pass


def stability_probe(
    hg: CopyHypergraph,
    eta: float,
    excess_levels,
    samples_per_level: int = 24,
    seed: int = 0,
    retry_budget: int = 200,
) -> StabilityProbeResult:
    """Empirical stability of the sparse-limit minimizer.

    For each entropy-excess level delta, draws random perturbations of the
    constant minimizer, rescales them back into the copy-count budget, sizes
    them so the entropy excess is at most delta * C(n,2), and records the cut
    distance to the constant plus the fraction of entries below eta^{1/eta}.
    """
    from .metrics import cut_norm_best, weights_to_matrix

    r = hg.r
    thr = eta_threshold(r)
    if eta <= thr:
        raise ValueError(f"probe requires eta > eta_threshold({r}) = {thr:.4f}")
    m = hg.num_slots
    q_const = eta ** (1.0 / r)
    phi = m * h(q_const)
    budget = eta * hg.num_hyperedges
    cutoff = math.exp(math.log(eta) / eta)
    ones = np.ones((hg.n, hg.n)) - np.eye(hg.n)

    def cut_dist(q):
        A = weights_to_matrix(q, hg.n) - q_const * ones
        return cut_norm_best(A)

    def make_feasible(qraw):
        q = np.clip(qraw, 0.0, 1.0)
        t = expected_count(hg, q)
        if t > budget:
            lam = (budget / t) ** (1.0 / r) * (1 - 1e-13)
            q = q * lam
        return q

    rows = []
    for level_idx, delta in enumerate(excess_levels):
        target = delta * m
        max_cut = 0.0
        cuts = []
        max_small = 0.0
        for k in range(samples_per_level):
            rng = np.random.Generator(
                np.random.Philox(np.random.SeedSequence((seed, level_idx, k)))
            )
            if delta == 0:
                q = np.full(m, q_const)
            else:
                if k % 3 == 2:
                    # sparse spike direction: drive a few entries hard
                    d = np.zeros(m)
                    nspike = max(1, m // 8)
                    idx = rng.choice(m, size=nspike, replace=False)
                    d[idx] = -rng.uniform(0.5, 1.0, size=nspike)
                else:
                    d = rng.uniform(-1.0, 1.0, size=m)
                q = None
                lo_s, hi_s = 0.0, 2.0
                # grow until the excess target is bracketed
                grow = 0
                while grow < retry_budget:
                    cand = make_feasible(q_const + hi_s * d)
                    if h_total(cand) - phi >= target:
                        break
                    hi_s *= 2.0
                    grow += 1
                else:
                    raise ProbeGenerationError("could not reach the excess target")
                for _ in range(80):
                    mid = 0.5 * (lo_s + hi_s)
                    cand = make_feasible(q_const + mid * d)
                    if h_total(cand) - phi <= target:
                        lo_s = mid
                    else:
                        hi_s = mid
                q = make_feasible(q_const + lo_s * d)
                assert h_total(q) - phi <= target + 1e-9
            dist = cut_dist(q)
            cuts.append(dist)
            max_cut = max(max_cut, dist)
            max_small = max(max_small, float(np.mean(q < cutoff)))
        rows.append(StabilityRow(
            excess=float(delta),
            max_cut_distance=max_cut,
            mean_cut_distance=float(np.mean(cuts)),
            max_small_edge_fraction=max_small,
        ))
    return StabilityProbeResult(
        eta=eta, n=hg.n, q_const=q_const, small_edge_cutoff=cutoff, rows=tuple(rows)
    )
