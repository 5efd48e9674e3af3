"""Continuum of agents: the backward integro-differential effort equation

    dQ/dt (t, u) = - int_0^1 G(v, u) Q(t, v) dv,     Q(T, u) = 1,

and the quantities derived from its solution (principal value, marginal
values, Gaussian contract laws, equilibrium effort).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._ode import backward_linear, time_grid, trapezoid
from .graphon import InteractionFunction
from .population import InitialLaw, ReservationUtility


@dataclass(frozen=True, eq=False)
class TypeGrid:
    """Union of per-block uniform grids on ``[0, 1]``.

    Each block carries its own end nodes, so a block edge appears twice (once
    as the right end of the left block, once as the left end of the right
    block); no quadrature panel straddles an edge.
    """

    edges: np.ndarray
    nodes: np.ndarray
    weights: np.ndarray  # composite trapezoid weights
    block: np.ndarray  # block index of each node
    offsets: np.ndarray  # first node of each block, plus a final sentinel

    @property
    def size(self):
        return self.nodes.size

    def node_index(self, u):
        """Nearest node to ``u`` inside the block that owns ``u``."""
        u = float(u)
        if not 0.0 <= u <= 1.0:
            raise ValueError("type %r outside [0, 1]" % u)
        b = int(np.searchsorted(self.edges[1:-1], u, side="left"))
        lo, hi = self.offsets[b], self.offsets[b + 1]
        seg = self.nodes[lo:hi]
        return lo + int(np.argmin(np.abs(seg - u)))

    def bracket(self, u):
        """Indices ``(i, j)`` and weight ``a`` with ``u = (1-a) x_i + a x_j`` in u's block."""
        u = float(u)
        if not 0.0 <= u <= 1.0:
            raise ValueError("type %r outside [0, 1]" % u)
        b = int(np.searchsorted(self.edges[1:-1], u, side="left"))
        lo, hi = self.offsets[b], self.offsets[b + 1]
        seg = self.nodes[lo:hi]
        j = int(np.clip(np.searchsorted(seg, u, side="left"), 1, seg.size - 1))
        a = (u - seg[j - 1]) / (seg[j] - seg[j - 1])
        return lo + j - 1, lo + j, float(np.clip(a, 0.0, 1.0))


def _allocate(lengths, K):
    """Split ``K`` panels among blocks proportionally, at least one each."""
    raw = K * lengths
    n = np.maximum(1, np.floor(raw).astype(int))
    short = K - n.sum()
    if short < 0:
        raise ValueError("K=%d type panels cannot cover %d blocks" % (K, lengths.size))
    order = np.argsort(-(raw - np.floor(raw)), kind="stable")
    n[order[:short]] += 1
    return n


def type_grid(edges, K: int) -> TypeGrid:
    """Block-aware trapezoid grid with ``K`` panels in total."""
    edges = np.asarray(edges, dtype=float)
    if int(K) != K or K < 1:
        raise ValueError("K must be a positive integer, got %r" % (K,))
    counts = _allocate(np.diff(edges), int(K))
    nodes, weights, block, offsets = [], [], [], [0]
    for b, (lo, hi, n) in enumerate(zip(edges[:-1], edges[1:], counts)):
        x = np.linspace(lo, hi, n + 1)
        w = np.full(n + 1, (hi - lo) / n)
        w[0] *= 0.5
        w[-1] *= 0.5
        nodes.append(x)
        weights.append(w)
        block.append(np.full(n + 1, b))
        offsets.append(offsets[-1] + n + 1)
    arrays = [np.concatenate(a) for a in (nodes, weights, block)]
    for a in arrays:
        a.flags.writeable = False
    return TypeGrid(edges, arrays[0], arrays[1], arrays[2], np.asarray(offsets))


@dataclass(frozen=True)
class ContractLaw:
    """Gaussian law ``N(mean, variance)`` of an optimal contract."""

    mean: float
    variance: float

    def __post_init__(self):
        if not self.variance >= 0:
            raise ValueError("contract variance must be >= 0, got %r" % self.variance)

    @property
    def std(self):
        return float(np.sqrt(self.variance))


@dataclass(frozen=True, eq=False)
class EffortField:
    """Solution ``Q(t_j, u_k)`` on a time x type grid; equals the optimal effort."""

    times: np.ndarray
    grid: TypeGrid
    values: np.ndarray
    T: float
    source: dict = field(default_factory=dict)

    @property
    def M(self):
        return self.times.size - 1

    @property
    def type_nodes(self):
        return self.grid.nodes

    def squared_time_integral(self):
        """``int_0^T Q(t, u_k)^2 dt`` at every type node (trapezoid in t)."""
        return trapezoid(self.values**2, self.times, axis=0)

    def column(self, u):
        """Time series ``Q(., u)`` at the node nearest to ``u`` (within u's block)."""
        return self.values[:, self.grid.node_index(u)]

    def at(self, t, u):
        return effort(self, t, u)


def _graphon_blocks(G: InteractionFunction, grid: TypeGrid, block):
    """Translate grid block indices into blocks of ``G`` (the grid may be finer)."""
    mids = 0.5 * (grid.edges[:-1] + grid.edges[1:])
    return G.block_of(mids)[block]


def integral_operator(G: InteractionFunction, grid: TypeGrid):
    """Matrix ``A`` with ``(A q)_k = sum_l w_l G(v_l, u_k) q_l``.

    Row index = receiver type ``u_k``; the quadrature runs over the first
    argument of ``G``.
    """
    x, b = grid.nodes, _graphon_blocks(G, grid, grid.block)
    kern = G.eval_blocks(x[None, :], x[:, None], b[None, :], b[:, None])
    if not np.all(np.isfinite(kern)):
        raise ValueError("graphon %s evaluated to non-finite values on the type grid" % G.name)
    return kern * grid.weights[None, :]


def solve_continuum(G: InteractionFunction, T: float = 1.0, M: int = 256, K: int = 256,
                    extra_breaks=()) -> EffortField:
    """Solve the effort equation with RK4 in reversed time.

    ``M`` is the number of uniform time steps and ``K`` the total number of
    trapezoid panels in type space (split across the blocks of ``G`` refined
    by ``extra_breaks``, e.g. the blocks of a second graphon to compare with).
    """
    if not T > 0:
        raise ValueError("horizon T must be positive, got %r" % (T,))
    if int(M) != M or M < 1:
        raise ValueError("M must be a positive integer, got %r" % (M,))
    grid = type_grid(np.union1d(G.edges, np.asarray(extra_breaks, dtype=float)), K)
    A = integral_operator(G, grid)
    with np.errstate(over="ignore", invalid="ignore"):
        values = backward_linear(lambda q: A @ q, np.ones(grid.size), T, int(M))
    if not np.all(np.isfinite(values)):
        raise FloatingPointError("effort solve diverged")
    values.flags.writeable = False
    return EffortField(time_grid(T, int(M)), grid, values, float(T),
                       {"graphon": G.name, "params": G.params, "M": int(M), "K": int(K)})


def nystrom_column(Q: EffortField, G: InteractionFunction, u) -> np.ndarray:
    """``Q(t_k, u)`` at an arbitrary type via the integral form

        Q(t, u) = 1 + int_t^T sum_l w_l G(v_l, u) Q(s, v_l) ds,

    using the solved node values and the trapezoid rule in time. The
    extension preserves orderings inherited from ``G(., u)`` exactly.
    """
    u = float(u)
    g = Q.grid
    b = int(np.searchsorted(g.edges[1:-1], u, side="left"))
    kern = G.eval_blocks(g.nodes, u, _graphon_blocks(G, g, g.block), _graphon_blocks(G, g, b)) * g.weights
    rate = Q.values @ kern  # (M+1,)
    steps = 0.5 * np.diff(Q.times) * (rate[:-1] + rate[1:])
    tail = np.concatenate([np.cumsum(steps[::-1])[::-1], [0.0]])
    return 1.0 + tail


def principal_value(Q: EffortField, law: InitialLaw, R: ReservationUtility) -> float:
    """Principal's value: ``int Q(0,u) m(u) du + 1/2 int int Q^2 - int R_a``."""
    w, x = Q.grid.weights, Q.grid.nodes
    initial = float(np.dot(w, Q.values[0] * law.mean_initial(x)))
    running = 0.5 * float(trapezoid(Q.values**2 @ w, Q.times))
    return initial + running - float(np.dot(w, R(x)))


def marginal_value(Q: EffortField, law: InitialLaw, R: ReservationUtility, u) -> float:
    """Contribution density ``v_p(u)``; integrates to the principal value."""
    q = Q.column(u)
    return float(law.mean_initial(u) + 0.5 * trapezoid(q**2, Q.times) - R(u))


def contract_law(Q: EffortField, R: ReservationUtility, u) -> ContractLaw:
    var = float(trapezoid(Q.column(u) ** 2, Q.times))
    return ContractLaw(float(R(u)) + 0.5 * var, var)


def marginal_table(Q: EffortField, law: InitialLaw, R: ReservationUtility):
    """Columns ``(u, v_p, contract mean, contract variance)`` at every node."""
    x = Q.grid.nodes
    var = Q.squared_time_integral()
    r = R(x)
    return np.column_stack([x, law.mean_initial(x) + 0.5 * var - r, r + 0.5 * var, var])


def effort(Q: EffortField, t, u) -> float:
    """Equilibrium effort ``Q(t, u)``, bilinear inside the block owning ``u``."""
    t = float(t)
    if not 0.0 <= t <= Q.T * (1 + 1e-12):
        raise ValueError("time %r outside [0, %r]" % (t, Q.T))
    i, j, a = Q.grid.bracket(u)
    times = Q.times
    k = int(np.clip(np.searchsorted(times, t, side="right") - 1, 0, times.size - 2))
    s = float(np.clip((t - times[k]) / (times[k + 1] - times[k]), 0.0, 1.0))
    rows = (1 - s) * Q.values[k] + s * Q.values[k + 1]
    return float((1 - a) * rows[i] + a * rows[j])
