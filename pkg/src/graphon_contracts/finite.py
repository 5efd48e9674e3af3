"""The N-agent problem.

Efforts solve the backward linear system

    dQ_i/dt = -(1/N) sum_j G^N_{j,i} Q_j,      Q_i(T) = 1,

(note the transpose: agent i's incentive grows with its influence on the
others), while expected outputs follow the forward system

    dm_i/dt = (1/N) sum_j G^N_{i,j} m_j + effort_i(t).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng as rngmod
from ._ode import backward_linear, rk4, simpson, time_grid, trapezoid
from .continuum import ContractLaw, EffortField
from .graphon import DiscreteInteraction, InteractionFunction, agent_types, discretize
from .population import InitialLaw, ReservationUtility


@dataclass(frozen=True, eq=False)
class FiniteEffort:
    n: int
    times: np.ndarray
    values: np.ndarray  # (M+1, n); column i-1 is agent i
    T: float

    @property
    def M(self):
        return self.times.size - 1

    def at(self, t):
        """Effort vector at time ``t`` (linear in time, exact on the grid)."""
        return _interp_rows(self.times, self.values, t)


@dataclass(frozen=True, eq=False)
class FiniteSolution:
    effort: FiniteEffort
    principal_value: float
    contract_laws: tuple
    initial_outputs: np.ndarray
    reservation: np.ndarray


def _interp_rows(times, values, t):
    t = float(t)
    h = times[1] - times[0]
    k = int(np.clip(np.floor((t - times[0]) / h + 1e-9), 0, times.size - 2))
    s = (t - times[k]) / (times[k + 1] - times[k])
    if abs(s) < 1e-9:
        return values[k]
    if abs(s - 1) < 1e-9:
        return values[k + 1]
    return (1 - s) * values[k] + s * values[k + 1]


def _check_steps(T, M):
    if not T > 0:
        raise ValueError("horizon T must be positive, got %r" % (T,))
    if int(M) != M or M < 1:
        raise ValueError("M must be a positive integer, got %r" % (M,))
    return int(M)


def solve_finite(D: DiscreteInteraction, T: float = 1.0, M: int = 256) -> FiniteEffort:
    M = _check_steps(T, M)
    if not np.all(np.isfinite(D.weights)):
        raise ValueError("interaction matrix must be finite")
    Wt = np.ascontiguousarray(D.weights.T) / D.n
    values = backward_linear(lambda q: Wt @ q, np.ones(D.n), T, M)
    values.flags.writeable = False
    return FiniteEffort(D.n, time_grid(T, M), values, float(T))


def initial_outputs(law: InitialLaw, n: int, seed) -> np.ndarray:
    """Independent draws ``x0_i ~ law(i/n)``, reproducible from ``seed``."""
    return np.asarray(law.sample_initial(agent_types(n), rngmod.stream(seed, rngmod.INITIAL_OUTPUTS, n)),
                      dtype=float)


def finite_solution(D: DiscreteInteraction, T: float, M: int, law: InitialLaw,
                    R: ReservationUtility, seed=0) -> FiniteSolution:
    F = solve_finite(D, T, M)
    x0 = initial_outputs(law, D.n, seed)
    r = np.asarray(R(agent_types(D.n)), dtype=float)
    sq = trapezoid(F.values**2, F.times, axis=0)
    value = float(np.mean(F.values[0] * x0) + 0.5 * np.mean(sq) - np.mean(r))
    laws = tuple(ContractLaw(float(ri + 0.5 * s), float(s)) for ri, s in zip(r, sq))
    return FiniteSolution(F, value, laws, x0, r)


def principal_value_of(sol: FiniteSolution) -> float:
    """Recompute the principal value from a solution's own fields."""
    F = sol.effort
    sq = trapezoid(F.values**2, F.times, axis=0)
    return float(np.mean(F.values[0] * sol.initial_outputs) + 0.5 * np.mean(sq) - np.mean(sol.reservation))


def mean_output_trajectory(D: DiscreteInteraction, effort, x0, T: float, M: int) -> np.ndarray:
    """Expected outputs ``m(t_k)`` for ``k = 0..M`` under the given effort.

    ``effort`` maps a time to an ``n``-vector and is called at the RK4 stage
    times ``t_k``, ``t_k + h/2``, ``t_k + h``.
    """
    M = _check_steps(T, M)
    W = np.asarray(D.weights) / D.n
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (D.n,):
        raise ValueError("x0 must have shape (%d,)" % D.n)
    return rk4(lambda t, m: W @ m + np.asarray(effort(t), dtype=float), x0, time_grid(T, M))


@dataclass(frozen=True)
class NearOptimalComparison:
    projected_value: float  # principal's payoff under the projected continuum contracts
    optimal_value: float  # N-agent optimum
    n: int

    @property
    def gap(self):
        """Signed shortfall ``V - J``; nonnegative up to discretisation error."""
        return self.optimal_value - self.projected_value


def projected_effort(Qc: EffortField, n: int, times) -> np.ndarray:
    """``Q(t, i/n)`` for each agent on ``times`` (bilinear within blocks)."""
    out = np.empty((len(times), n))
    for c, u in enumerate(agent_types(n)):
        i, j, a = Qc.grid.bracket(u)
        col = (1 - a) * Qc.values[:, i] + a * Qc.values[:, j]
        out[:, c] = np.interp(times, Qc.times, col)
    return out


def near_optimal_comparison(G: InteractionFunction, Qc: EffortField, law: InitialLaw,
                            R: ReservationUtility, n: int, T: float, M: int, seed=0) -> NearOptimalComparison:
    """Payoffs of the projected continuum contracts versus the N-agent optimum.

    Both payoffs are ``-mean R_a(i/n) + mean E[X_T^i] - 1/(2n) sum int e_i^2``
    with ``E[X_T]`` from :func:`mean_output_trajectory`, evaluated with effort
    ``e_i(t) = Q(t, i/n)`` and ``e_i(t) = Q^{i,n}(t)`` respectively. Efforts
    are tabulated on a grid twice as fine as the ``M`` mean-ODE steps so that
    every RK4 stage hits a grid node; the effort-cost integrals use Simpson's
    rule on that grid, which keeps the quadrature consistent with the
    fourth-order mean ODE.
    """
    if abs(Qc.T - T) > 1e-12 * max(1.0, T):
        raise ValueError("effort field horizon %r does not match T=%r" % (Qc.T, T))
    M = _check_steps(T, M)
    D = discretize(G, n)
    fine = time_grid(T, 2 * M)
    q_hat = projected_effort(Qc, n, fine)
    q_opt = solve_finite(D, T, 2 * M).values
    x0 = initial_outputs(law, n, seed)
    r = np.asarray(R(agent_types(n)), dtype=float)

    def payoff(q):
        m = mean_output_trajectory(D, lambda t: _interp_rows(fine, q, t), x0, T, M)
        return float(-np.mean(r) + np.mean(m[-1]) - 0.5 * np.mean(simpson(q**2, fine, axis=0)))

    return NearOptimalComparison(payoff(q_hat), payoff(q_opt), int(n))


def near_optimal_gap(G: InteractionFunction, Qc: EffortField, law: InitialLaw, R: ReservationUtility,
                     n: int, T: float, M: int, seed=0) -> float:
    """``|J(projected contracts) - V^N|``."""
    return abs(near_optimal_comparison(G, Qc, law, R, n, T, M, seed).gap)
