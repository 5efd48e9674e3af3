"""Empirical checks of convergence rates, stability and comparative statics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import rng as rngmod
from ._ode import trapezoid
from .continuum import ContractLaw, EffortField, contract_law, nystrom_column, principal_value, solve_continuum
from .finite import finite_solution, solve_finite
from .graphon import InteractionFunction, _sample_axes, agent_types, discretize, sup_distance
from .population import InitialLaw, ReservationUtility

ORDERED = "hypothesis-holds-and-ordered"
VIOLATED = "hypothesis-holds-but-violated"
HYPOTHESIS_FAILS = "hypothesis-fails"
INAPPLICABLE = "negative-graphon-theorem-inapplicable"


def gaussian_w2(a: ContractLaw, b: ContractLaw) -> float:
    """Wasserstein-2 distance between two 1-D Gaussian laws."""
    if a.variance < 0 or b.variance < 0:
        raise ValueError("variances must be nonnegative")
    return math.hypot(a.mean - b.mean, math.sqrt(a.variance) - math.sqrt(b.variance))


def fit_slope(sizes, errors):
    """Least-squares slope of log(error) against log(size); None if undefined."""
    sizes = np.asarray(sizes, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if sizes.size < 3 or np.any(errors <= 0):
        return None
    return float(np.polyfit(np.log(sizes), np.log(errors), 1)[0])


@dataclass(frozen=True)
class RateReport:
    sizes: tuple
    errors: tuple
    fitted_slope: float | None  # None when not applicable (e.g. all errors zero)
    constant_estimates: tuple  # size**order * error
    order: float = 1.0
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        s = np.asarray(self.sizes)
        if s.size < 2 or np.any(np.diff(s) <= 0):
            raise ValueError("sizes must be strictly increasing with at least two entries")
        if not np.all(np.isfinite(self.errors)):
            raise ValueError("errors must be finite")

    @classmethod
    def build(cls, sizes, errors, order=1.0, **extras):
        sizes = tuple(int(n) for n in sizes)
        errors = tuple(float(e) for e in errors)
        consts = tuple(n**order * e for n, e in zip(sizes, errors))
        return cls(sizes, errors, fit_slope(sizes, errors), consts, float(order), extras)

    def constant_spread(self, upper_half=True):
        """max/min of the constant estimates (over the upper half of sizes)."""
        c = np.asarray(self.constant_estimates)
        if upper_half:
            c = c[len(c) // 2:]
        if np.all(c == 0):
            return 1.0
        return float(c.max() / c.min()) if c.min() > 0 else math.inf

    def rows(self):
        """Table rows ``(N, error, N^order * error, slope over sizes so far)``."""
        out = []
        for k, (n, e, c) in enumerate(zip(self.sizes, self.errors, self.constant_estimates)):
            s = fit_slope(self.sizes[:k + 1], self.errors[:k + 1])
            out.append((n, e, c, s))
        return out


def _check_sizes(sizes):
    sizes = sorted(int(n) for n in sizes)
    if len(sizes) < 2 or sizes[0] < 1 or len(set(sizes)) != len(sizes):
        raise ValueError("need at least two distinct positive sizes, got %r" % (sizes,))
    return sizes


def _reference_panels(sizes, factor=4):
    return factor * math.lcm(*sizes) if math.lcm(*sizes) <= max(sizes) else factor * max(sizes)


def effort_convergence(G: InteractionFunction, T: float, sizes, M: int = 256, K: int | None = None) -> RateReport:
    """``max_i max_t |Q(t, i/N) - Q^{i,N}(t)|`` for each ``N`` in ``sizes``.

    The continuum reference uses ``K >= 4 max(sizes)`` type panels on the same
    time grid; ``Q(t, i/N)`` is read at the nearest reference node, which is
    exact when ``K`` is a multiple of ``N``. A half-resolution reference is
    solved too and its discrepancy reported as ``reference_error``.
    """
    sizes = _check_sizes(sizes)
    if K is None:
        K = _reference_panels(sizes)
    if K < 4 * max(sizes):
        raise ValueError("reference grid K=%d is coarser than 4 x max(sizes)=%d" % (K, 4 * max(sizes)))
    ref = solve_continuum(G, T, M, K)
    half = solve_continuum(G, T, M, K // 2)
    errors, ref_err = [], 0.0
    for n in sizes:
        F = solve_finite(discretize(G, n), T, M)
        idx = [ref.grid.node_index(u) for u in agent_types(n)]
        idx_half = [half.grid.node_index(u) for u in agent_types(n)]
        errors.append(float(np.max(np.abs(ref.values[:, idx] - F.values))))
        ref_err = max(ref_err, float(np.max(np.abs(ref.values[:, idx] - half.values[:, idx_half]))))
    # halving the panels quadruples a second-order quadrature error
    return RateReport.build(sizes, errors, 1.0, reference_error=ref_err / 3.0, K=int(K), M=int(M))


def value_convergence(G: InteractionFunction, law: InitialLaw, R: ReservationUtility, T: float, sizes,
                      replications: int = 30, seed=0, M: int = 256, K: int | None = None):
    """Mean-square principal-value error and contract-law W2 distances.

    Returns ``(value_report, w2_report)``: the first holds
    ``E[(V_N - V)^2]`` averaged over ``replications`` independent draws of the
    initial outputs (order 1), the second ``max_i W2(continuum law at i/N,
    agent i's law)`` (order 1/2).
    """
    sizes = _check_sizes(sizes)
    if replications < 30:
        raise ValueError("value_convergence needs at least 30 replications, got %d" % replications)
    if K is None:
        K = _reference_panels(sizes)
    ref = solve_continuum(G, T, M, K)
    v_cont = principal_value(ref, law, R)
    mse, w2 = [], []
    for n in sizes:
        D = discretize(G, n)
        sq = []
        for r in range(replications):
            sol = finite_solution(D, T, M, law, R, seed=_replication_seed(seed, n, r))
            sq.append((sol.principal_value - v_cont) ** 2)
        mse.append(float(np.mean(sq)))
        w2.append(max(gaussian_w2(contract_law(ref, R, u), fl)
                      for u, fl in zip(agent_types(n), sol.contract_laws)))
    return (RateReport.build(sizes, mse, 1.0, continuum_value=v_cont, replications=replications),
            RateReport.build(sizes, w2, 0.5))


def _replication_seed(seed, n, r):
    # a distinct 64-bit seed per (size, replication), derived from the master seed
    return int(rngmod.stream(seed, 99, n, r).integers(0, 2**63))


@dataclass(frozen=True)
class StabilityResult:
    sup_Q_diff: float
    sup_G_diff: float
    ratio: float  # nan when sup_G_diff == 0


def _paired_solves(G1, G2, T, M, K):
    Q1 = solve_continuum(G1, T, M, K, extra_breaks=G2.breaks)
    Q2 = solve_continuum(G2, T, M, K, extra_breaks=G1.breaks)
    return Q1, Q2


def stability_effort(G1: InteractionFunction, G2: InteractionFunction, T: float = 1.0, M: int = 256,
                     K: int = 256, mesh: int = 1024) -> StabilityResult:
    """Effort perturbation ``sup |Q_G1 - Q_G2|`` against ``sup |G1 - G2|``.

    Both solves share the grid built on the union of the two block partitions.
    """
    Q1, Q2 = _paired_solves(G1, G2, T, M, K)
    dq = float(np.max(np.abs(Q1.values - Q2.values)))
    dg = sup_distance(G1, G2, mesh)
    return StabilityResult(dq, dg, dq / dg if dg > 0 else math.nan)


def stability_contracts(G1: InteractionFunction, G2: InteractionFunction, R: ReservationUtility, u,
                        T: float = 1.0, M: int = 256, K: int = 256, mesh: int = 1024):
    """``(W2 between the two contract laws of type u, ||dG||^(1/2) + ||dG||)``."""
    Q1, Q2 = _paired_solves(G1, G2, T, M, K)
    w2 = gaussian_w2(contract_law(Q1, R, u), contract_law(Q2, R, u))
    dg = sup_distance(G1, G2, mesh)
    return w2, math.sqrt(dg) + dg


@dataclass(frozen=True)
class MonotonicityVerdict:
    verdict: str
    max_violation: float  # max_t (Q(t,u1) - Q(t,u2)), positive means u1 got more effort
    equal: bool


def check_influence_monotonicity(G: InteractionFunction, u1, u2, Q: EffortField, mesh: int = 1024,
                                 tol: float = 1e-9) -> MonotonicityVerdict:
    """Check that a type at most as influential as another gets no more effort.

    ``u1`` is at most as influential as ``u2`` when ``G(v, u1) <= G(v, u2)``
    for every sampled ``v`` (influence enters through the second argument).
    Efforts at ``u1`` and ``u2`` are taken from the integral form of the
    solved field (see :func:`nystrom_column`). A graphon with negative samples
    yields the ``INAPPLICABLE`` verdict instead of an assertion.
    """
    for u in (u1, u2):
        if not 0.0 <= u <= 1.0:
            raise ValueError("type %r outside [0, 1]" % u)
    axis, _ = _sample_axes(mesh, G.edges, Q.grid.nodes)
    if np.min(G(axis[:, None], axis[None, :])) < 0:
        return MonotonicityVerdict(INAPPLICABLE, math.nan, False)
    v = np.concatenate([axis, Q.grid.nodes])
    if np.any(G(v, u1) > G(v, u2)):
        return MonotonicityVerdict(HYPOTHESIS_FAILS, math.nan, False)
    q1 = nystrom_column(Q, G, u1)
    q2 = nystrom_column(Q, G, u2)
    worst = float(np.max(q1 - q2))
    verdict = ORDERED if worst <= tol else VIOLATED
    return MonotonicityVerdict(verdict, worst, bool(np.all(np.abs(q1 - q2) <= tol)))
