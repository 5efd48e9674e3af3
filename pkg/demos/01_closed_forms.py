"""Separable interactions have closed-form efforts.

When G(u, v) = Ghat(v) only the influencer matters: the type average of Q
decays at rate gbar = int Ghat and Q(t, u) = 1 + Ghat(u) (e^{gbar (T-t)} - 1)/gbar,
which is exp(g (T-t)) for a constant profile g. When G(u, v) = Ghat(u) the
effort does not depend on the type at all: Q = exp(gbar (T-t)).
"""
import numpy as np

from graphon_contracts import builtin, solve_continuum
from graphon_contracts.continuum import contract_law, principal_value
from graphon_contracts.population import point_mass, reservation

T = 1.0

for g in (0.5, 1.0, 2.0):
    Q = solve_continuum(builtin("column-separable", profile=g), T, M=256, K=256)
    err = np.max(np.abs(Q.values - np.exp(g * (T - Q.times))[:, None]))
    print("constant profile g=%.1f   Q(0,.)=%.6f   max error %.1e" % (g, Q.values[0, 0], err))

# affine profile Ghat(u) = u: more influential types work harder
Q = solve_continuum(builtin("column-separable", profile={"affine": [0.0, 1.0]}), T)
exact = 1 + Q.type_nodes * np.expm1(0.5 * (T - 0.0)) / 0.5
print("\nGhat(u) = u (influencer side): Q(0,u) at u = 0, 0.5, 1:",
      np.round([Q.at(0, 0.0), Q.at(0, 0.5), Q.at(0, 1.0)], 6))
print("closed form max error at t=0: %.1e" % np.max(np.abs(Q.values[0] - exact)))

Q = solve_continuum(builtin("row-separable", profile={"affine": [0.0, 1.0]}), T)
print("\nGhat(u) = u (receiver side): Q(0,.) spread %.1e, value %.6f vs e^0.5 = %.6f"
      % (np.ptp(Q.values[0]), Q.values[0, 0], np.exp(0.5)))

# the principal's value and contract law for the constant profile g = 1
Q = solve_continuum(builtin("constant", c=1.0), T)
law = contract_law(Q, reservation(0.0), 0.5)
print("\nconstant g=1: V_P = %.6f (exact (e^2-1)/4 = %.6f)"
      % (principal_value(Q, point_mass(0.0), reservation(0.0)), (np.e**2 - 1) / 4))
print("contract law N(%.5f, %.5f)" % (law.mean, law.variance))
