"""Optimal contracts are Gaussian.

Simulates the equilibrium output of a tagged agent of type u inside a
particle population and records the realised contract payment. Its sample
law is compared with N(R_a + 1/2 int Q^2, int Q^2).
"""
from graphon_contracts import builtin, discretize, solve_continuum, solve_finite
from graphon_contracts.continuum import contract_law
from graphon_contracts.montecarlo import SimConfig, sample_contracts, sample_contracts_finite
from graphon_contracts.population import point_mass, reservation

G, law0, R = builtin("G2"), point_mass(0.0), reservation(0.1)
Q = solve_continuum(G, 1.0)
cfg = SimConfig(paths=100_000, steps=256, seed=2024, threads=4)

for u in (0.1, 0.5, 0.9):
    s = sample_contracts(G, Q, law0, R, u, cfg)
    target = contract_law(Q, R, u)
    print("u=%.1f  mean %.4f +- %.4f (law %.4f)  var %.4f (law %.4f)  skew %+.3f  ex.kurt %+.3f"
          % (u, s.empirical_mean, s.standard_error_mean, target.mean, s.empirical_variance,
             target.variance, s.skewness, s.excess_kurtosis))

# the same check for agent 2 of a 4-agent system
D = discretize(G, 4)
F = solve_finite(D, 1.0, 256)
s = sample_contracts_finite(D, F, law0, R, 2, SimConfig(paths=20_000, seed=7))
print("\n4 agents, agent 2: mean %.4f +- %.4f, variance %.4f"
      % (s.empirical_mean, s.standard_error_mean, s.empirical_variance))
