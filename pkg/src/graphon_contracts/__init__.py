"""Optimal contracts for a principal and heterogeneously interacting agents.

N-agent and continuum (graphon) formulations: equilibrium efforts, principal
values, Gaussian contract laws, equilibrium simulation, and empirical checks
of the convergence and stability results.
"""

__version__ = "0.1.0"

from .graphon import (  # noqa: E402
    DiscreteInteraction,
    InteractionFunction,
    builtin,
    discretize,
    load_step_graphon,
    step_graphon,
    sup_distance,
)
from .population import InitialLaw, ReservationUtility, gaussian, point_mass, reservation  # noqa: E402
from .continuum import (  # noqa: E402
    ContractLaw,
    EffortField,
    contract_law,
    effort,
    marginal_value,
    principal_value,
    solve_continuum,
)
from .finite import (  # noqa: E402
    FiniteEffort,
    FiniteSolution,
    finite_solution,
    mean_output_trajectory,
    near_optimal_gap,
    solve_finite,
)
from .montecarlo import SimConfig, sample_contracts, sample_contracts_finite, simulate_particles  # noqa: E402
from .analysis import (  # noqa: E402
    RateReport,
    check_influence_monotonicity,
    effort_convergence,
    gaussian_w2,
    stability_contracts,
    stability_effort,
    value_convergence,
)
