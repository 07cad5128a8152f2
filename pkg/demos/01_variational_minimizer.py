"""Walk through the entropy variational problem for the triangle lower tail.

The story: among edge-probability vectors whose expected triangle count is at
most an eta fraction of the unconditioned one, which costs the least entropy?
Above a threshold eta_H the answer is the constant vector eta^{1/e(H)}.
"""

import numpy as np

from lowertail import Graph, enumerate_copies
from lowertail.entropy import h
from lowertail.graphs import slot_count
from lowertail.variational import VariationalProblem, eta_threshold, solve_phi

K3 = Graph.complete(3)

# the constancy threshold for three-edge graphs
thr = eta_threshold(3)
print(f"constancy threshold for e(H)=3: {thr:.6f}")

n = 12
hg = enumerate_copies(K3, n)
for eta in (0.4, 0.6, 0.8):
    sol = solve_phi(VariationalProblem(hg, eta))
    c = eta ** (1 / 3)
    print(f"eta={eta}: solver value {sol.value:.6f}, "
          f"constant closed form {slot_count(n) * h(c):.6f}, "
          f"max |q - {c:.4f}| = {np.max(np.abs(sol.q_star - c)):.2e}")

# the finite-p problem works on physical edge probabilities instead of ratios
sol_p = solve_phi(VariationalProblem(hg, 0.6, p=0.2))
print(f"finite p=0.2, eta=0.6: value {sol_p.value:.6f}, "
      f"mean q {sol_p.q_star.mean():.4f} (constant prediction "
      f"{0.6 ** (1 / 3) * 0.2:.4f})")
