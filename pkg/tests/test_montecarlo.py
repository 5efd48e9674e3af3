import dataclasses
import math

import numpy as np
import pytest

from graphon_contracts import builtin, discretize, solve_continuum, solve_finite
from graphon_contracts.continuum import contract_law
from graphon_contracts.montecarlo import (
    ContractSampleStats, SimConfig, sample_contract_values, sample_contract_values_finite, sample_contracts,
    sample_contracts_finite, simulate_particles,
)
from graphon_contracts.population import point_mass, reservation

E = math.e
DELTA0 = point_mass(0.0)
R0 = reservation(0.0)
ZERO = builtin("constant", c=0.0)


def test_config_validation():
    with pytest.raises(ValueError):
        SimConfig(paths=0)
    with pytest.raises(ValueError):
        SimConfig(steps=0)
    with pytest.raises(ValueError):
        SimConfig(T=0.0)
    with pytest.raises(ValueError):
        SimConfig(seed=-1)
    with pytest.raises(ValueError):
        SimConfig(seed=2**64)


def test_stats_fields():
    s = ContractSampleStats.from_samples([1.0, 2.0, 4.0])
    assert s.count == 3 and s.empirical_variance >= 0
    assert s.standard_error_mean == pytest.approx(math.sqrt(s.empirical_variance / 3))
    flat = ContractSampleStats.from_samples(np.ones(10))
    assert flat.empirical_variance == 0 and flat.skewness == 0


def test_particles_zero_graphon_bucket_means():
    Q = solve_continuum(ZERO, 1.0, 8, 8)
    cfg = SimConfig(paths=4096, steps=64, seed=11, buckets=8)
    s = simulate_particles(ZERO, Q, DELTA0, cfg)
    se = 1.0 / np.sqrt(s.bucket_count)
    assert np.all(np.abs(s.bucket_mean[-1] - 1.0) <= 3 * se)
    assert s.bucket_count.sum() == 4096
    assert s.bucket_mean.shape == (65, 8)
    np.testing.assert_allclose(s.bucket_second_moment[0], 0.0)


def test_particles_constant_graphon_mean_ode():
    # mean ODE dm/dt = g m + Q(t), Q(t) = e^{g(1-t)}, m(0) = 0
    g = 1.0
    G = builtin("constant", c=g)
    Q = solve_continuum(G, 1.0, 256, 16)
    P = 10_000
    s = simulate_particles(G, Q, DELTA0, SimConfig(paths=P, steps=256, seed=0))
    # m(1) = int_0^1 e^{g(1-s)} e^{(1-s)} ds = (e^2 - 1)/2 for g = 1
    oracle = (E**2 - 1) / 2
    # the empirical mean carries the averaged noise amplified by the interaction:
    # Var = (1/P) int_0^1 e^{2g(1-s)} ds
    se = math.sqrt((E ** (2 * g) - 1) / (2 * g) / P)
    assert abs(s.population_mean[-1] - oracle) <= 3 * se


def test_particles_single_particle_reproducible():
    G = builtin("G2")
    Q = solve_continuum(G, 1.0, 4, 4)
    cfg = SimConfig(paths=1, steps=1, seed=99)
    a = simulate_particles(G, Q, DELTA0, cfg, dump_paths=True)
    b = simulate_particles(G, Q, DELTA0, cfg, dump_paths=True)
    assert a.paths.tobytes() == b.paths.tobytes()
    assert a.paths.shape == (2, 1)


def test_dumped_paths_capped():
    Q = solve_continuum(ZERO, 1.0, 4, 4)
    s = simulate_particles(ZERO, Q, DELTA0, SimConfig(paths=1500, steps=4), dump_paths=True)
    assert s.paths.shape == (5, 1000)
    assert simulate_particles(ZERO, Q, DELTA0, SimConfig(paths=10, steps=4)).paths is None


def test_horizon_mismatch():
    Q = solve_continuum(ZERO, 2.0, 4, 4)
    with pytest.raises(ValueError):
        simulate_particles(ZERO, Q, DELTA0, SimConfig(paths=4, steps=4))
    with pytest.raises(ValueError):
        sample_contracts(ZERO, Q, DELTA0, R0, 0.5, SimConfig(paths=4, steps=4))


def test_contracts_zero_graphon_law():
    Q = solve_continuum(ZERO, 1.0, 16, 16)
    s = sample_contracts(ZERO, Q, DELTA0, R0, 0.3, SimConfig(paths=100_000, steps=64, seed=1, particles=256))
    assert abs(s.empirical_mean - 0.5) <= 3 * s.standard_error_mean
    assert abs(s.empirical_variance - 1.0) <= 0.05


def test_contracts_type_independent_graphon_mean():
    G = builtin("column-separable", profile=1.0)
    Q = solve_continuum(G, 1.0, 256, 64)
    s = sample_contracts(G, Q, DELTA0, R0, 0.5, SimConfig(paths=100_000, steps=256, seed=2, particles=2048))
    assert abs(s.empirical_mean - (E**2 - 1) / 4) <= 3 * s.standard_error_mean


def test_contracts_shift_with_reservation():
    G = builtin("G2")
    Q = solve_continuum(G, 1.0, 64, 64)
    cfg = SimConfig(paths=5000, steps=64, seed=3, particles=512)
    a = sample_contract_values(G, Q, DELTA0, R0, 0.4, cfg)
    b = sample_contract_values(G, Q, DELTA0, reservation(1.25), 0.4, cfg)
    np.testing.assert_allclose(b - a, 1.25, atol=1e-12)
    assert np.var(a) == pytest.approx(np.var(b), rel=1e-12)


def test_reservation_binds_in_mean():
    G = builtin("G2")
    Q = solve_continuum(G, 1.0, 256, 64)
    R = reservation({"affine": [0.2, 0.4]})
    u = 0.7
    xi = sample_contract_values(G, Q, DELTA0, R, u, SimConfig(paths=100_000, seed=4, particles=2048))
    law = contract_law(Q, R, u)
    se = np.std(xi, ddof=1) / math.sqrt(xi.size)
    assert abs(np.mean(xi - 0.5 * law.variance) - R(u)) <= 3 * se


def test_contracts_thread_invariance():
    G = builtin("G1")
    Q = solve_continuum(G, 1.0, 32, 32)
    cfg = SimConfig(paths=5000, steps=32, seed=5, particles=300)
    a = sample_contract_values(G, Q, DELTA0, R0, 0.5, cfg)
    b = sample_contract_values(G, Q, DELTA0, R0, 0.5, dataclasses.replace(cfg, threads=4))
    assert a.tobytes() == b.tobytes()
    D = discretize(G, 3)
    F = solve_finite(D, 1.0, 32)
    a = sample_contract_values_finite(D, F, DELTA0, R0, 2, cfg)
    b = sample_contract_values_finite(D, F, DELTA0, R0, 2, dataclasses.replace(cfg, threads=3))
    assert a.tobytes() == b.tobytes()


def test_contracts_type_domain():
    Q = solve_continuum(ZERO, 1.0, 4, 4)
    with pytest.raises(ValueError):
        sample_contracts(ZERO, Q, DELTA0, R0, 1.5, SimConfig(paths=4, steps=4))


def test_finite_contracts_zero_matrix():
    D = discretize(ZERO, 3)
    F = solve_finite(D, 1.0, 32)
    s = sample_contracts_finite(D, F, DELTA0, R0, 1, SimConfig(paths=50_000, steps=32, seed=6))
    assert abs(s.empirical_mean - 0.5) <= 3 * s.standard_error_mean
    assert abs(s.empirical_variance - 1.0) <= 0.05


def test_finite_contracts_constant_matrix_variance():
    D = discretize(builtin("constant", c=1.0), 4)
    F = solve_finite(D, 1.0, 256)
    s = sample_contracts_finite(D, F, DELTA0, R0, 3, SimConfig(paths=50_000, steps=256, seed=7))
    assert abs(s.empirical_variance / ((E**2 - 1) / 2) - 1) <= 0.05
    assert abs(s.empirical_mean - (E**2 - 1) / 4) <= 3 * s.standard_error_mean


def test_finite_contracts_seeds():
    D = discretize(builtin("G2"), 4)
    F = solve_finite(D, 1.0, 16)
    cfg = SimConfig(paths=500, steps=16, seed=8)
    a = sample_contracts_finite(D, F, DELTA0, R0, 4, cfg)
    b = sample_contracts_finite(D, F, DELTA0, R0, 4, cfg)
    c = sample_contracts_finite(D, F, DELTA0, R0, 4, dataclasses.replace(cfg, seed=9))
    assert a == b
    assert a != c


def test_finite_contracts_index_range():
    D = discretize(ZERO, 3)
    F = solve_finite(D, 1.0, 4)
    for i in (0, 4, 1.5):
        with pytest.raises(ValueError):
            sample_contracts_finite(D, F, DELTA0, R0, i, SimConfig(paths=4, steps=4))
