"""The N-agent problem approaches the continuum one.

Efforts converge at rate 1/N. The mean-square value error follows 1/N when
initial outputs are random; with deterministic initial outputs it decays much
faster. Contract laws (Gaussian, compared in W2) converge at least like
1/sqrt(N) and in practice like 1/N.
"""
from graphon_contracts import builtin
from graphon_contracts.analysis import effort_convergence, value_convergence
from graphon_contracts.population import gaussian, point_mass, reservation

G = builtin("G2")
sizes = [8, 16, 32, 64, 128, 256, 512]


def show(title, rep):
    print(title, "  fitted slope", None if rep.fitted_slope is None else round(rep.fitted_slope, 3))
    for n, e, c, s in rep.rows():
        print("   N=%4d  error %.3e  scaled %.4f" % (n, e, c))


show("effort sup error", effort_convergence(G, 1.0, sizes))
mse, w2 = value_convergence(G, gaussian(0.0, 1.0), reservation(0.0), 1.0, sizes[1:], replications=30)
show("\nvalue MSE, Gaussian initial outputs", mse)
show("\ncontract W2 (scaled by sqrt N)", w2)
mse, _ = value_convergence(G, point_mass(0.0), reservation(0.0), 1.0, sizes[1:], replications=30)
show("\nvalue MSE, all agents start at 0", mse)
