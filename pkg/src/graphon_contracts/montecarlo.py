"""Euler-Maruyama simulation of the equilibrium dynamics and of optimal contracts.

Randomness is drawn from per-chunk Philox streams keyed by (seed, purpose,
chunk index), with a fixed chunk size, so every output is a pure function of
the configuration and seed and does not depend on the worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats

from . import rng as rngmod
from ._ode import time_grid
from .continuum import EffortField
from .finite import FiniteEffort
from .graphon import DiscreteInteraction, InteractionFunction
from .population import InitialLaw, ReservationUtility

CHUNK = 1024
MAX_DUMPED_PATHS = 1000


@dataclass(frozen=True)
class SimConfig:
    paths: int = 100_000
    steps: int = 256
    seed: int = 0
    T: float = 1.0
    particles: int = 4096  # population size behind the mean-field term of tagged samples
    buckets: int = 16
    threads: int = 1

    def __post_init__(self):
        for name in ("paths", "steps", "particles", "buckets", "threads"):
            val = getattr(self, name)
            if int(val) != val or val < 1:
                raise ValueError("SimConfig.%s must be a positive integer, got %r" % (name, val))
        if not self.T > 0:
            raise ValueError("SimConfig.T must be positive")
        rngmod.stream(self.seed)  # validates the seed range


@dataclass(frozen=True)
class ContractSampleStats:
    count: int
    empirical_mean: float
    empirical_variance: float
    standard_error_mean: float
    skewness: float
    excess_kurtosis: float

    @classmethod
    def from_samples(cls, xi):
        xi = np.asarray(xi, dtype=float)
        var = float(np.var(xi, ddof=1)) if xi.size > 1 else 0.0
        skew = float(stats.skew(xi)) if var > 0 else 0.0
        kurt = float(stats.kurtosis(xi)) if var > 0 else 0.0
        return cls(int(xi.size), float(np.mean(xi)), var, float(np.sqrt(var / xi.size)), skew, kurt)


@dataclass(frozen=True, eq=False)
class ParticleSummary:
    times: np.ndarray
    bucket_edges: np.ndarray
    bucket_mean: np.ndarray  # (steps+1, buckets)
    bucket_second_moment: np.ndarray
    bucket_count: np.ndarray
    population_mean: np.ndarray  # (steps+1,)
    population_std: np.ndarray
    paths: np.ndarray | None = None  # (steps+1, <= 1000) when requested


def _check_horizon(Q, cfg):
    if abs(Q.T - cfg.T) > 1e-12 * max(1.0, cfg.T):
        raise ValueError("effort horizon %r does not match simulation horizon %r" % (Q.T, cfg.T))


def _effort_columns(Q: EffortField, types, times):
    """``Q(t_k, u_p)`` as an array (len(times), len(types))."""
    out = np.empty((len(times), len(types)))
    cache = {}
    for p, u in enumerate(types):
        i, j, a = Q.grid.bracket(u)
        key = (i, j, a)
        if key not in cache:
            col = (1 - a) * Q.values[:, i] + a * Q.values[:, j]
            cache[key] = np.interp(times, Q.times, col)
        out[:, p] = cache[key]
    return out


def _kernel(G: InteractionFunction, rows, cols):
    """``G(rows_p, cols_q) / len(cols)`` built in row chunks to cap temporaries."""
    out = np.empty((rows.size, cols.size))
    step = max(1, 2**21 // max(cols.size, 1))
    for s in range(0, rows.size, step):
        out[s:s + step] = G(rows[s:s + step, None], cols[None, :])
    out /= cols.size
    return out


def _chunk_slices(total):
    return [slice(s, min(s + CHUNK, total)) for s in range(0, total, CHUNK)]


def _run_population(G, Q, law, P, steps, T, seed, keep=0):
    """Interacting particle system; returns times, types, states (steps+1, P)."""
    types = (np.arange(P) + 0.5) / P
    times = time_grid(T, steps)
    h = T / steps
    sq = np.sqrt(h)
    effort = _effort_columns(Q, types, times)
    K = _kernel(G, types, types)
    X = np.empty(P)
    noise = np.empty((steps, P))
    for c, sl in enumerate(_chunk_slices(P)):
        X[sl] = law.sample_initial(types[sl], rngmod.stream(seed, rngmod.INITIAL_OUTPUTS, c))
        noise[:, sl] = rngmod.stream(seed, rngmod.PARTICLE_NOISE, c).standard_normal((steps, sl.stop - sl.start))
    states = np.empty((steps + 1, P))
    states[0] = X
    for k in range(steps):
        X = X + h * (effort[k] + K @ X) + sq * noise[k]
        states[k + 1] = X
    return times, types, states


def simulate_particles(G: InteractionFunction, Qc: EffortField, law: InitialLaw, cfg: SimConfig,
                       dump_paths=False) -> ParticleSummary:
    """Particle approximation of the equilibrium McKean-Vlasov dynamics.

    ``cfg.paths`` particles with stratified types ``(p - 0.5)/P`` evolve by

        X <- X + h [Q(t, u_p) + (1/P) sum_q G(u_p, u_q) X_q] + sqrt(h) Z.

    Per-bucket means and second moments are summarised at every step.
    """
    _check_horizon(Qc, cfg)
    times, types, states = _run_population(G, Qc, law, cfg.paths, cfg.steps, cfg.T, cfg.seed)
    B = cfg.buckets
    edges = np.linspace(0.0, 1.0, B + 1)
    which = np.minimum((types * B).astype(int), B - 1)
    count = np.bincount(which, minlength=B)
    mean = np.full((times.size, B), np.nan)
    second = np.full((times.size, B), np.nan)
    for b in range(B):
        sel = which == b
        if sel.any():
            mean[:, b] = states[:, sel].mean(axis=1)
            second[:, b] = (states[:, sel] ** 2).mean(axis=1)
    dumped = states[:, :MAX_DUMPED_PATHS].copy() if dump_paths else None
    return ParticleSummary(times, edges, mean, second, count, states.mean(axis=1), states.std(axis=1), dumped)


def _map_chunks(fn, chunks, threads):
    if threads <= 1 or len(chunks) == 1:
        return [fn(c, sl) for c, sl in enumerate(chunks)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda args: fn(*args), enumerate(chunks)))


def _trap_steps(f, h):
    """Per-step trapezoid increments of a sampled integrand along axis 0."""
    return 0.5 * h * (f[:-1] + f[1:])


def sample_contracts(G: InteractionFunction, Qc: EffortField, law: InitialLaw, R: ReservationUtility,
                     u: float, cfg: SimConfig) -> ContractSampleStats:
    """Sample the optimal continuum contract of type ``u``.

    A population of ``cfg.particles`` interacting particles supplies the
    mean-field term ``int G(u, v) x mu_t(dv, dx)``; ``cfg.paths`` tagged
    particles of type ``u`` move in that field and accumulate

        xi = R_a(u) - int (Q^2/2 + Q * meanfield) dt + int Q dX

    with the Ito integral taken at left endpoints and the ``dt`` integral by
    the trapezoid rule.
    """
    return ContractSampleStats.from_samples(sample_contract_values(G, Qc, law, R, u, cfg))


def sample_contract_values(G, Qc, law, R, u, cfg: SimConfig):
    _check_horizon(Qc, cfg)
    u = float(u)
    if not 0.0 <= u <= 1.0:
        raise ValueError("type %r outside [0, 1]" % u)
    times, types, states = _run_population(G, Qc, law, cfg.particles, cfg.steps, cfg.T, cfg.seed)
    field_u = states @ (G(u, types) / types.size)  # (steps+1,)
    q = _effort_columns(Qc, [u], times)[:, 0]
    h = cfg.T / cfg.steps
    drift = q + field_u
    deterministic = float(R(u)) - np.sum(_trap_steps(0.5 * q**2 + q * field_u, h))

    def chunk(c, sl):
        n = sl.stop - sl.start
        z = rngmod.stream(cfg.seed, rngmod.TAGGED_NOISE, c).standard_normal((cfg.steps, n))
        dX = h * drift[:-1, None] + np.sqrt(h) * z
        return deterministic + q[:-1] @ dX

    return np.concatenate(_map_chunks(chunk, _chunk_slices(cfg.paths), cfg.threads))


def sample_contracts_finite(D: DiscreteInteraction, F: FiniteEffort, law: InitialLaw, R: ReservationUtility,
                            i: int, cfg: SimConfig) -> ContractSampleStats:
    """Sample agent ``i``'s optimal N-agent contract (``i`` is 1-indexed).

    Each replication simulates the whole ``n``-agent system under the
    equilibrium efforts and accumulates

        xi_i = R_a(i/n) - int (Q_i^2/2 + Q_i (1/n) sum_j G_ij X_j) dt + int Q_i dX_i.
    """
    return ContractSampleStats.from_samples(sample_contract_values_finite(D, F, law, R, i, cfg))


def sample_contract_values_finite(D, F, law, R, i, cfg: SimConfig):
    if int(i) != i or not 1 <= i <= D.n:
        raise ValueError("agent index %r out of range 1..%d" % (i, D.n))
    if F.n != D.n:
        raise ValueError("effort has %d agents, interaction matrix %d" % (F.n, D.n))
    if abs(F.T - cfg.T) > 1e-12 * max(1.0, cfg.T):
        raise ValueError("effort horizon %r does not match simulation horizon %r" % (F.T, cfg.T))
    i = int(i) - 1
    n, steps = D.n, cfg.steps
    h = cfg.T / steps
    times = time_grid(cfg.T, steps)
    Q = np.array([F.at(t) for t in times])  # (steps+1, n)
    Wt = (np.asarray(D.weights) / n).T
    row = np.asarray(D.weights)[i] / n
    types = np.arange(1, n + 1) / n
    r = float(R(types[i]))

    def chunk(c, sl):
        m = sl.stop - sl.start
        init = rngmod.stream(cfg.seed, rngmod.INITIAL_OUTPUTS, c)
        X = np.asarray(law.sample_initial(np.broadcast_to(types, (m, n)), init), dtype=float)
        X = np.array(X, copy=True)
        noise = rngmod.stream(cfg.seed, rngmod.AGENT_NOISE, c)
        stoch = np.zeros(m)
        field_prev = X @ row
        cost = np.zeros(m)
        for k in range(steps):
            dX = h * (X @ Wt + Q[k]) + np.sqrt(h) * noise.standard_normal((m, n))
            stoch += Q[k, i] * dX[:, i]
            X += dX
            field_next = X @ row
            cost += 0.5 * h * (0.5 * Q[k, i] ** 2 + Q[k, i] * field_prev
                               + 0.5 * Q[k + 1, i] ** 2 + Q[k + 1, i] * field_next)
            field_prev = field_next
        return r - cost + stoch

    return np.concatenate(_map_chunks(chunk, _chunk_slices(cfg.paths), cfg.threads))
