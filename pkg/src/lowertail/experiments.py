"""End-to-end experiment runners.

Each runner returns a Report (see reports module): conditioned-count
typicality, cut-norm typicality, marginal-vector structure, the variance
decomposition over intersecting and disjoint copy pairs, tail-probability
tables, and thin wrappers for the solver, sampler, increment, and threshold
outputs used by the command line.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .copies import CopyHypergraph, copy_count_in_complete, enumerate_copies, expected_count
from .entropy import h
from .graphs import Graph, disjoint_union, slot_count, slot_pair, two_density
from .increment import energy, greedy_increment
from .metrics import (
    cut_norm_bracket,
    cut_norm_best,
    deviation_matrix,
    weights_to_matrix,
)
from .reports import Report
from .sampler import (
    ChainConfig,
    ExactConditional,
    LowerTailEvent,
    conditioned_marginal_vector_qW,
    effective_sample_size,
    mcmc_marginals,
    run_chains,
)
from .variational import (
    SolverConfig,
    VariationalProblem,
    eta_threshold,
    solve_phi,
    stability_probe,
)

DEFAULT_EPS_GRID = (0.05, 0.1, 0.2)
HISTOGRAM_BINS = 20


def _histogram_rows(values: np.ndarray, weights: np.ndarray, bins: int = HISTOGRAM_BINS):
    lo, hi = float(values.min()), float(values.max())
    if hi == lo:
        return [[lo, hi, 1.0]]
    counts, edges = np.histogram(values, bins=bins, range=(lo, hi), weights=weights)
    total = counts.sum()
    return [
        [float(edges[i]), float(edges[i + 1]), float(counts[i] / total)]
        for i in range(len(counts))
    ]


def _count_series(results, hg_target: CopyHypergraph):
    """Per-chain arrays of N_target over retained samples."""
    E = hg_target.hyperedge_array()
    series = []
    for res in results:
        X = res.sample_matrix(hg_target.num_slots)
        if E.size:
            series.append(np.all(X[:, E.reshape(-1)].reshape(len(X), *E.shape), axis=2).sum(axis=1))
        else:
            series.append(np.zeros(len(X)))
    return series


def run_typicality(
    H_prime: Graph,
    H: Graph,
    n: int,
    p: float,
    eta: float,
    mode: str = "exact",
    chain_cfg: ChainConfig | None = None,
    eps_grid=DEFAULT_EPS_GRID,
) -> Report:
    """Conditioned count of H under the lower-tail event for H_prime.

    The prediction is E[N_H(q)] at the constant q = eta^{1/e(H_prime)} * p,
    recomputed independently through expected_count as a consistency check.
    """
    hg_prime = enumerate_copies(H_prime, n)
    hg_target = enumerate_copies(H, n)
    event = LowerTailEvent(hg_prime, p, eta)
    # above eta = 1 the prediction saturates at the unconditioned density
    q = min(eta, 1.0) ** (1.0 / H_prime.edge_count) * p
    predicted = copy_count_in_complete(H, n) * q ** H.edge_count
    recomputed = expected_count(hg_target, np.full(slot_count(n), q))
    if abs(predicted - recomputed) > 1e-12 * max(1.0, abs(predicted)):
        raise AssertionError(f"prediction mismatch: {predicted} vs {recomputed}")
    thr = eta_threshold(H_prime.edge_count)
    config = {
        "experiment": "typicality", "H_prime": f"{H_prime!r}", "H": f"{H!r}",
        "n": n, "p": p, "eta": eta, "mode": mode,
    }
    seed = 0
    reliable = True
    if mode == "exact":
        exact = ExactConditional(event)
        table = exact.copy_count_table(hg_target)
        mean = exact.expectation_of(table)
        var = exact.expectation_of((table - mean) ** 2)
        ess = float("inf")
        acceptance = float("nan")
        tails = []
        for eps in eps_grid:
            bad = np.abs(table - predicted) > eps * predicted
            tails.append([eps, math.fsum(exact.probs[bad].tolist()), 0.0])
        active = exact.probs > 0
        hist = _histogram_rows(table[active].astype(float), exact.probs[active])
        num_samples = int(active.sum())
    elif mode == "mcmc":
        chain_cfg = chain_cfg or ChainConfig()
        config.update({
            "steps": chain_cfg.steps, "burn_in": chain_cfg.burn_in,
            "chains": chain_cfg.chains,
            "thinning": chain_cfg.resolved_thinning(n),
        })
        seed = chain_cfg.seed
        results = run_chains(event, chain_cfg)
        series = _count_series(results, hg_target)
        pooled = np.concatenate(series)
        mean = float(pooled.mean())
        var = float(pooled.var(ddof=1))
        ess = float(sum(effective_sample_size(s) for s in series))
        acceptance = float(np.mean([r.acceptance_rate for r in results]))
        reliable = ess >= 500.0
        tails = []
        for eps in eps_grid:
            phat = float(np.mean(np.abs(pooled - predicted) > eps * predicted))
            se = math.sqrt(max(phat * (1 - phat), 1e-12) / max(ess, 1.0))
            tails.append([eps, phat, se])
        hist = _histogram_rows(pooled.astype(float), np.ones(len(pooled)))
        num_samples = len(pooled)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    rel_dev = (mean - predicted) / predicted if predicted > 0 else float("nan")
    report = Report(experiment="typicality", config=config, seed=seed)
    report.add_section(
        "prediction",
        ["q", "predicted_mean", "recomputed_mean", "eta_threshold", "proven_regime"],
        [[q, predicted, recomputed, thr, eta > thr]],
    )
    report.add_section(
        "estimate",
        ["mean", "variance", "relative_deviation", "ess", "acceptance_rate",
         "num_samples", "reliable"],
        [[mean, var, rel_dev, ess, acceptance, num_samples, reliable]],
    )
    report.add_section("tails", ["eps", "exceed_prob", "stderr"], tails)
    report.add_section("histogram", ["bin_left", "bin_right", "mass"], hist)
    report.summary = {
        "mean": mean, "predicted_mean": predicted, "relative_deviation": rel_dev,
        "ess": ess, "reliable": reliable,
    }
    return report


def run_cutnorm_typicality(
    H: Graph,
    n: int,
    p: float,
    eta: float,
    chain_cfg: ChainConfig | None = None,
    walk_ks=(2,),
) -> Report:
    """Distribution of ||A - qJ||_box / p over conditioned samples, with
    closed-walk traces Tr((A - qJ)^{2k}) alongside."""
    hg = enumerate_copies(H, n)
    event = LowerTailEvent(hg, p, eta)
    q = min(eta, 1.0) ** (1.0 / H.edge_count) * p
    chain_cfg = chain_cfg or ChainConfig()
    results = run_chains(event, chain_cfg)
    sample_rows = []
    trace_rows = []
    norm_values = []
    idx = 0
    ones_off = np.ones((n, n)) - np.eye(n)
    for res in results:
        X = res.sample_matrix(hg.num_slots)
        for row in X:
            A = weights_to_matrix(row.astype(float), n)
            D = A - q * ones_off
            bracket = cut_norm_bracket(D)
            norm_values.append(bracket.lower / p)
            sample_rows.append([idx, res.chain_index, bracket.lower / p,
                                bracket.upper / p, bracket.exact])
            for k in walk_ks:
                trace_rows.append([idx, k, float(np.trace(np.linalg.matrix_power(D, 2 * k)))])
            idx += 1
    norm_values = np.array(norm_values)
    median = float(np.median(norm_values))
    # bootstrap CI on the median
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(chain_cfg.seed)))
    boots = [float(np.median(rng.choice(norm_values, size=len(norm_values)))) for _ in range(400)]
    ci_lo, ci_hi = float(np.quantile(boots, 0.025)), float(np.quantile(boots, 0.975))
    config = {
        "experiment": "cutnorm", "H": f"{H!r}", "n": n, "p": p, "eta": eta,
        "steps": chain_cfg.steps, "chains": chain_cfg.chains,
        "walk_ks": ",".join(str(k) for k in walk_ks),
    }
    report = Report(experiment="cutnorm", config=config, seed=chain_cfg.seed)
    report.add_section(
        "samples",
        ["index", "chain", "cutnorm_over_p_lower", "cutnorm_over_p_upper", "exact"],
        sample_rows,
    )
    report.add_section("traces", ["index", "k", "trace"], trace_rows)
    report.add_section(
        "distribution",
        ["median_over_p", "ci_lo", "ci_hi", "num_samples", "q"],
        [[median, ci_lo, ci_hi, len(norm_values), q]],
    )
    report.summary = {"median_over_p": median, "ci_lo": ci_lo, "ci_hi": ci_hi,
                      "num_samples": len(norm_values)}
    return report


def run_marginal_structure(
    H: Graph,
    n: int,
    p: float,
    eta: float,
    w_sizes=(0, 1, 2),
    sets_per_size: int = 4,
    seed: int = 0,
) -> Report:
    """Assignment-weighted distribution of ||q^W - q||_box / p from exact
    enumeration, for random conditioning sets W of each requested size."""
    hg = enumerate_copies(H, n)
    event = LowerTailEvent(hg, p, eta)
    exact = ExactConditional(event)
    q = min(eta, 1.0) ** (1.0 / H.edge_count) * p
    m = hg.num_slots
    ones_off = np.ones((n, n)) - np.eye(n)
    rows = []
    by_size = []
    for size_idx, w_size in enumerate(w_sizes):
        if w_size > m:
            raise ValueError(f"W size {w_size} exceeds slot count {m}")
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence((seed, size_idx))))
        w_sets = {tuple(sorted(rng.choice(m, size=w_size, replace=False).tolist()))
                  for _ in range(sets_per_size if w_size > 0 else 1)}
        weighted = 0.0
        for w in sorted(w_sets):
            for a_idx, (bits, prob) in enumerate(exact.assignment_distribution(w)):
                qw = conditioned_marginal_vector_qW(exact, w, bits)
                D = weights_to_matrix(qw.values, n) - q * ones_off
                dist = cut_norm_best(D) / p
                rows.append([w_size, ",".join(map(str, w)) or "-", a_idx, prob, dist])
                weighted += prob * dist / len(w_sets)
        by_size.append([w_size, weighted])
    config = {"experiment": "marginals_structure", "H": f"{H!r}", "n": n, "p": p,
              "eta": eta, "w_sizes": ",".join(map(str, w_sizes)), "sets_per_size": sets_per_size}
    report = Report(experiment="marginals", config=config, seed=seed)
    report.add_section(
        "distribution",
        ["w_size", "w_slots", "assignment", "probability", "cut_distance_over_p"],
        rows,
    )
    report.add_section("by_size", ["w_size", "mean_cut_distance_over_p"], by_size)
    report.summary = {"q": q, "num_rows": len(rows)}
    return report


@dataclass(frozen=True)
class VarianceSplit:
    intersecting: float
    disjoint: float
    direct_var: float
    mean_count: float

    @property
    def split_total(self) -> float:
        return self.intersecting + self.disjoint

    @property
    def gap(self) -> float:
        return abs(self.split_total - self.direct_var)


def variance_split(event: LowerTailEvent, exact: ExactConditional | None = None) -> VarianceSplit:
    """Var(N_H) = sum over ordered hyperedge pairs of Cov(Y_A, Y_A'),
    partitioned by whether the copies share a slot."""
    exact = exact or ExactConditional(event)
    hg = event.hg
    singles = {}
    for he in hg.hyperedges:
        singles[he] = exact.monomial_expectation(he)
    inter = 0.0
    disj = 0.0
    for A in hg.hyperedges:
        sa = set(A)
        for B in hg.hyperedges:
            joint = exact.monomial_expectation(tuple(sa.union(B)))
            cov = joint - singles[A] * singles[B]
            if sa.intersection(B):
                inter += cov
            else:
                disj += cov
    mean = exact.conditional_mean_count()
    var = exact.conditional_var_count()
    return VarianceSplit(intersecting=inter, disjoint=disj, direct_var=var, mean_count=mean)


def variance_decomposition(H: Graph, n: int, p: float, eta: float | None) -> Report:
    """Exact variance split report; eta=None means unconditioned.

    Also records m_2(H disjoint-union H) against m_2(H), the reduction that
    lets disjoint-pair counts be treated as a single sparse graph count.
    """
    hg = enumerate_copies(H, n)
    if eta is None:
        eta_eff = 2.0 / p ** hg.r    # threshold above N_H(1): whole space
    else:
        eta_eff = eta
    event = LowerTailEvent(hg, p, eta_eff)
    split = variance_split(event)
    gamma = disjoint_union(H, H)
    m2_h = two_density(H)
    m2_gamma = two_density(gamma)
    config = {"experiment": "variance", "H": f"{H!r}", "n": n, "p": p,
              "eta": "none" if eta is None else eta}
    report = Report(experiment="variance", config=config, seed=0)
    report.add_section(
        "split",
        ["intersecting", "disjoint", "split_total", "direct_var", "abs_gap", "mean_count"],
        [[split.intersecting, split.disjoint, split.split_total, split.direct_var,
          split.gap, split.mean_count]],
    )
    report.add_section(
        "two_density",
        ["m2_H_num", "m2_H_den", "m2_gamma_num", "m2_gamma_den", "equal"],
        [[m2_h.numerator, m2_h.denominator, m2_gamma.numerator, m2_gamma.denominator,
          m2_h == m2_gamma]],
    )
    report.summary = {"abs_gap": split.gap, "m2_equal": m2_h == m2_gamma}
    return report


def tail_probability_table(
    H: Graph, n_values, p: float, eta: float, eps: float = 0.05,
    solver_cfg: SolverConfig | None = None,
) -> Report:
    """(-log P(event), solver values at eta and eta +- eps) across n.

    No inequality is asserted: the sandwich between the tail probability and
    the variational value is asymptotic, so the table only records the ratio.
    """
    rows = []
    for n in n_values:
        hg = enumerate_copies(H, n)
        event = LowerTailEvent(hg, p, eta)
        exact = ExactConditional(event)
        neg_log = exact.neg_log_probability
        phis = []
        for e in (eta, max(eta - eps, 1e-6), min(eta + eps, 1.0)):
            prob = VariationalProblem(hg, e, p)
            phis.append(solve_phi(prob, solver_cfg).value)
        ratio = neg_log / phis[0] if phis[0] > 0 else float("nan")
        rows.append([n, neg_log, phis[0], phis[1], phis[2], ratio])
    config = {"experiment": "tailprob", "H": f"{H!r}",
              "n_values": ",".join(map(str, n_values)), "p": p, "eta": eta, "eps": eps}
    report = Report(experiment="tailprob", config=config, seed=0)
    report.add_section(
        "table",
        ["n", "neg_log_prob", "phi_hat", "phi_hat_minus", "phi_hat_plus", "ratio"],
        rows,
    )
    report.add_section(
        "note", ["text"],
        [["asymptotic sandwich only; finite-n ratio recorded, not asserted"]],
    )
    report.summary = {"rows": len(rows)}
    return report


# -- thin wrappers used by the command line -------------------------------


def threshold_report(r_values) -> Report:
    from .variational import _threshold_residual

    rows = []
    for r in r_values:
        thr = eta_threshold(r)
        rows.append([r, thr, abs(_threshold_residual(thr, r))])
    config = {"experiment": "threshold", "r_values": ",".join(map(str, r_values))}
    report = Report(experiment="threshold", config=config, seed=0)
    report.add_section("threshold", ["r", "eta_threshold", "residual"], rows)
    report.summary = {f"eta_r{r}": v for r, v, _ in rows}
    return report


def solve_report(H: Graph, n: int, eta: float, mode: str = "sparse",
                 p: float | None = None, cfg: SolverConfig | None = None) -> Report:
    hg = enumerate_copies(H, n)
    prob = VariationalProblem(hg, eta, None if mode == "sparse" else p)
    sol = solve_phi(prob, cfg)
    config = {"experiment": "solve", "H": f"{H!r}", "n": n, "eta": eta, "mode": mode,
              "p": "none" if mode == "sparse" else p,
              "seed": (cfg or SolverConfig()).seed}
    report = Report(experiment="solve", config=config, seed=(cfg or SolverConfig()).seed)
    report.add_section(
        "solver",
        ["value", "feasibility_gap", "multiplier", "distance_to_constant",
         "restarts_used", "iterations", "converged", "constant_value"],
        [[sol.value, sol.feasibility_gap, sol.multiplier, sol.distance_to_constant,
          sol.restarts_used, sol.iterations, sol.converged, prob.constant_value()]],
    )
    report.add_section(
        "q_star", ["slot", "i", "j", "value"],
        [[s, *slot_pair(s), float(v)] for s, v in enumerate(sol.q_star.tolist())],
    )
    report.summary = {"value": sol.value, "distance_to_constant": sol.distance_to_constant}
    return report


def sample_report(H: Graph, n: int, p: float, eta: float, mode: str = "exact",
                  chain_cfg: ChainConfig | None = None) -> Report:
    hg = enumerate_copies(H, n)
    event = LowerTailEvent(hg, p, eta)
    config = {"experiment": "sample", "H": f"{H!r}", "n": n, "p": p, "eta": eta,
              "mode": mode}
    seed = 0
    if mode == "exact":
        exact = ExactConditional(event)
        marg = exact.marginals().values
        se = np.zeros(len(marg))
        mean = exact.conditional_mean_count()
        extra = [["joint", ["edges", "copies", "probability"],
                  [[e, c, pr] for (e, c), pr in sorted(exact.joint_count_distribution().items())]]]
        acc_rows = []
    elif mode == "mcmc":
        chain_cfg = chain_cfg or ChainConfig()
        seed = chain_cfg.seed
        config.update({"steps": chain_cfg.steps, "burn_in": chain_cfg.burn_in,
                       "chains": chain_cfg.chains,
                       "thinning": chain_cfg.resolved_thinning(n)})
        results = run_chains(event, chain_cfg)
        est, se = mcmc_marginals(results, hg.num_slots)
        marg = est
        pooled = np.concatenate([np.array(r.sample_counts, dtype=float) for r in results])
        mean = float(pooled.mean())
        sample_rows = []
        for res in results:
            for st, mk, ct in zip(res.sample_steps, res.sample_masks, res.sample_counts):
                sample_rows.append([res.chain_index, st, f"{mk:#x}", ct])
        extra = [["samples", ["chain", "step", "mask", "copies"], sample_rows]]
        acc_rows = [[r.chain_index, r.acceptance_rate, r.audits_passed] for r in results]
    else:
        raise ValueError(f"unknown mode {mode!r}")
    report = Report(experiment="sample", config=config, seed=seed)
    report.add_section(
        "marginals", ["slot", "i", "j", "marginal", "stderr"],
        [[s, *slot_pair(s), float(marg[s]), float(se[s])] for s in range(hg.num_slots)],
    )
    report.add_section("count", ["mean_copies", "threshold"], [[mean, event.threshold]])
    for name, cols, rows in extra:
        report.add_section(name, cols, rows)
    if mode == "mcmc":
        report.add_section("chains", ["chain", "acceptance_rate", "audits_passed"], acc_rows)
    report.summary = {"mean_copies": mean, "threshold": event.threshold}
    return report


def increment_report(H: Graph, n: int, p: float, eta: float,
                     alpha: float = 0.5, beta: float = 0.1) -> Report:
    hg = enumerate_copies(H, n)
    event = LowerTailEvent(hg, p, eta)
    exact = ExactConditional(event)
    base = energy(event, (), exact=exact)
    result = greedy_increment(event, alpha, beta, exact=exact)
    config = {"experiment": "increment", "H": f"{H!r}", "n": n, "p": p, "eta": eta,
              "alpha": alpha, "beta": beta}
    report = Report(experiment="increment", config=config, seed=0)
    traj_rows = []
    for i, val in enumerate(result.trajectory):
        slot = result.w_slots[i - 1] if i > 0 else -1
        traj_rows.append([i, slot, val])
    report.add_section("trajectory", ["w_size", "slot_added", "energy"], traj_rows)
    report.add_section(
        "cauchy_schwarz", ["w_size", "lhs", "rhs"],
        [[0, base.lhs_cs, base.rhs_cs]],
    )
    report.add_section(
        "result", ["w_slots", "final_energy", "target", "succeeded"],
        [[",".join(map(str, result.w_slots)) or "-", result.trajectory[-1],
          result.target, result.succeeded]],
    )
    # greedy rule is a reconstruction; the success criterion is the only claim
    report.summary = {"succeeded": result.succeeded, "final_energy": result.trajectory[-1]}
    return report


def stability_report(H: Graph, n: int, eta: float, excess_levels,
                     samples_per_level: int = 24, seed: int = 0) -> Report:
    hg = enumerate_copies(H, n)
    probe = stability_probe(hg, eta, excess_levels, samples_per_level, seed)
    config = {"experiment": "stability", "H": f"{H!r}", "n": n, "eta": eta,
              "levels": ",".join(repr(float(x)) for x in excess_levels),
              "samples_per_level": samples_per_level}
    report = Report(experiment="stability", config=config, seed=seed)
    report.add_section(
        "rows",
        ["excess", "max_cut_distance", "mean_cut_distance", "max_small_edge_fraction"],
        [[r.excess, r.max_cut_distance, r.mean_cut_distance, r.max_small_edge_fraction]
         for r in probe.rows],
    )
    try:
        slope = probe.fitted_exponent()
    except ValueError:
        slope = float("nan")
    report.add_section(
        "fit", ["slope", "q_const", "small_edge_cutoff"],
        [[slope, probe.q_const, probe.small_edge_cutoff]],
    )
    report.summary = {"slope": slope}
    return report
