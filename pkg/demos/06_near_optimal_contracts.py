"""Using the continuum contract in an N-agent firm.

Agent i is offered the continuum contract of type i/N. The principal's loss
against the N-agent optimum is half the mean squared distance between the two
effort profiles, so it shrinks like 1/N^2 here, comfortably inside a C/N bound.
"""
from graphon_contracts import builtin, solve_continuum
from graphon_contracts.finite import near_optimal_comparison
from graphon_contracts.population import point_mass, reservation

G = builtin("G2")
Q = solve_continuum(G, 1.0, 256, 2048)
for n in (16, 32, 64, 128, 256, 512):
    c = near_optimal_comparison(G, Q, point_mass(0.0), reservation(0.0), n, 1.0, 256)
    print("N=%4d  optimum %.6f  projected %.6f  gap %.3e  N*gap %.3e  N^2*gap %.4f"
          % (n, c.optimal_value, c.projected_value, c.gap, n * c.gap, n * n * c.gap))
