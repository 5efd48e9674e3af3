"""Small changes in the interaction move efforts and contracts a little, and
agents who are more influential are asked for more effort.
"""
import numpy as np

from graphon_contracts import builtin, solve_continuum, step_graphon
from graphon_contracts.analysis import check_influence_monotonicity, stability_contracts, stability_effort
from graphon_contracts.population import reservation

base = builtin("constant", c=1.0)
for eps in (0.1, 0.01, 0.001):
    r = stability_effort(base, builtin("constant", c=1.0 + eps))
    w2, shape = stability_contracts(base, builtin("constant", c=1.0 + eps), reservation(0.0), 0.5)
    print("eps=%.3f  sup|dQ|/eps = %.4f (limit e = %.4f)  W2 = %.2e  sqrt(eps)+eps = %.2e"
          % (eps, r.ratio, np.e, w2, shape))

G = builtin("logistic", theta=10)
for s in (1.0, 0.1, 0.01):
    r = stability_effort(G, builtin("logistic", theta=10 + 0.5 * s))
    print("theta 10 -> %.3f   ratio %.4f" % (10 + 0.5 * s, r.ratio))

# influence ordering: columns of this step graphon increase with the influencer's block
G = step_graphon([0.3, 0.7], [[0.2, 0.5, 1.0], [0.1, 0.4, 0.4], [0.0, 0.9, 1.5]])
Q = solve_continuum(G, 1.0)
for u1, u2 in [(0.1, 0.5), (0.5, 0.9), (0.9, 0.1)]:
    v = check_influence_monotonicity(G, u1, u2, Q)
    print("u1=%.1f u2=%.1f  %s" % (u1, u2, v.verdict))
