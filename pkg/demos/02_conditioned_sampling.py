"""Sample G(n,p) conditioned on having few triangles, two ways.

At n=5 the whole state space (2^10 graphs) is enumerable, so the exact
conditional law is available and the Metropolis chain can be checked
against it.  Marginals only ever go down under lower-tail conditioning.
"""

import numpy as np

from lowertail import Graph, enumerate_copies
from lowertail.sampler import (
    ChainConfig,
    ExactConditional,
    LowerTailEvent,
    mcmc_marginals,
    run_chains,
)

K3 = Graph.complete(3)
n, p, eta = 5, 0.4, 0.5
event = LowerTailEvent(enumerate_copies(K3, n), p, eta)
print(f"event: at most {event.max_count} triangles "
      f"(threshold {float(event.threshold):.3f})")

exact = ExactConditional(event)
print(f"P(event) = {exact.event_probability:.6f}, "
      f"-log P = {exact.neg_log_probability:.6f}")
marg = exact.marginals().values
print(f"exact edge marginal: {marg[0]:.6f} (unconditioned p = {p}); "
      f"Harris says it can only drop")

cfg = ChainConfig(steps=200_000, burn_in=20_000, chains=4, seed=1)
results = run_chains(event, cfg)
est, se = mcmc_marginals(results, event.hg.num_slots)
print(f"MCMC edge marginal:  {est[0]:.6f} +/- {se[0]:.6f} "
      f"({sum(r.accepted for r in results)} accepted moves)")
print(f"max |mcmc - exact| over slots: {np.max(np.abs(est - marg)):.4f}")
