import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from graphon_contracts import builtin, discretize, load_step_graphon, step_graphon, sup_distance
from graphon_contracts.graphon import FAMILIES, agent_types


def test_builtin_point_values():
    assert builtin("sine-distance")(0.25, 0.25) == 0.0
    assert builtin("logistic", theta=10)(0.3, 0.3) == 0.5
    assert builtin("block-product", L=5)(0.1, 0.9) == pytest.approx(0.2, abs=1e-15)
    assert builtin("constant", c=2.5)(0.1, 0.7) == 2.5


def test_aliases_match_families():
    u, v = np.meshgrid(np.linspace(0, 1, 33), np.linspace(0, 1, 33))
    for alias, fam in [("G1", "sine-distance"), ("G2", "logistic"), ("G3", "block-product"), ("G4", "block-logistic")]:
        np.testing.assert_array_equal(builtin(alias)(u, v), builtin(fam)(u, v))


def test_separable_orientation():
    row = builtin("row-separable", profile={"affine": [0.0, 1.0]})
    col = builtin("column-separable", profile={"affine": [0.0, 1.0]})
    assert row(0.2, 0.9) == pytest.approx(0.2)
    assert col(0.2, 0.9) == pytest.approx(0.9)


def test_block_product_half_open_blocks():
    G = builtin("block-product", L=5)
    # 0.2 belongs to the first block (0, 0.2]; 0 is assigned to the first block too
    assert G(0.2, 1.0) == pytest.approx(1 / 5)
    assert G(0.0, 1.0) == pytest.approx(1 / 5)
    assert G(0.2 + 1e-12, 1.0) == pytest.approx(2 / 5)
    np.testing.assert_allclose(G.breaks, [0.2, 0.4, 0.6, 0.8])


def test_block_logistic_matches_formula():
    L = 5
    G = builtin("block-logistic", L=L)
    for u, v in [(0.05, 0.15), (0.3, 0.25), (0.9, 0.85), (0.1, 0.5)]:
        i, j = math.ceil(u * L), math.ceil(v * L)
        want = L / (1 + math.exp((i - 1) * L * (u - v))) if i == j else 0.0
        assert G(u, v) == pytest.approx(want, rel=1e-14)


@pytest.mark.parametrize("name", ["sine-distance", "logistic", "block-product", "block-logistic", "constant"])
def test_builtin_bounded_by_documented_norm(name):
    G = builtin(name)
    x = np.linspace(0, 1, 401)
    vals = G(x[:, None], x[None, :])
    assert np.all(np.isfinite(vals))
    assert np.max(np.abs(vals)) <= G.sup_norm_hint + 1e-12


@pytest.mark.parametrize("name", ["sine-distance", "logistic", "block-product", "block-logistic"])
def test_blockwise_lipschitz(name):
    # difference quotients inside block rectangles stay bounded under refinement
    G = builtin(name)
    quotients = []
    for mesh in (64, 256, 1024):
        x = np.linspace(0, 1, mesh + 1)
        b = G.block_of(x)
        vals = G(x[:, None], x[None, :])
        same = (b[1:] == b[:-1])
        dq = np.abs(np.diff(vals, axis=0))[same] * mesh
        quotients.append(dq.max())
    assert quotients[-1] <= 1.5 * quotients[0] + 1e-9


def test_unknown_family_and_bad_params():
    with pytest.raises(ValueError):
        builtin("nope")
    with pytest.raises(ValueError):
        builtin("logistic", theta=0)
    with pytest.raises(ValueError):
        builtin("block-product", L=0)
    with pytest.raises(ValueError):
        builtin("block-logistic", L=2.5)
    with pytest.raises(ValueError):
        builtin("sine-distance", theta=1)


def test_domain_check():
    with pytest.raises(ValueError):
        builtin("G1")(1.5, 0.2)


def test_families_listed():
    assert {"constant", "row-separable", "column-separable", "sine-distance", "logistic",
            "block-product", "block-logistic"} <= set(FAMILIES)


def test_load_step_graphon_examples():
    zero = load_step_graphon(io.StringIO("\n0\n"))
    assert zero(0.3, 0.9) == 0.0
    G = load_step_graphon(io.StringIO("0.5\n1, 0\n0; 1\n"))
    assert G(0.25, 0.75) == 0.0
    assert G(0.25, 0.25) == 1.0
    assert G(0.5, 0.5) == 1.0 and G(0.5, 0.75) == 0.0  # 0.5 closes the first block


def test_load_step_graphon_from_file(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("# two blocks\n0.3\n1 2\n3 4\n")
    G = load_step_graphon(p)
    assert G(0.1, 0.9) == 2.0 and G(0.9, 0.1) == 3.0


@pytest.mark.parametrize("text", ["0.5\n1 0\n", "0.6 0.4\n1 0 0\n0 1 0\n0 0 1\n", "0.5\n1 x\n0 1\n",
                                  "0.5\n1 nan\n0 1\n", "1.0\n1 0\n0 1\n", ""])
def test_load_step_graphon_rejects(text):
    with pytest.raises(ValueError):
        load_step_graphon(io.StringIO(text))


def test_discretize_examples():
    np.testing.assert_array_equal(discretize(builtin("constant", c=0.0), 3).weights, np.zeros((3, 3)))
    W = discretize(builtin("sine-distance"), 2).weights
    np.testing.assert_allclose(W, [[0, math.sin(0.5)], [math.sin(0.5), 0]], atol=1e-15)
    np.testing.assert_array_equal(discretize(builtin("logistic", theta=10), 1).weights, [[0.5]])
    with pytest.raises(ValueError):
        discretize(builtin("G1"), 0)


def test_agent_types_are_i_over_n():
    np.testing.assert_allclose(agent_types(4), [0.25, 0.5, 0.75, 1.0])


def test_discretize_matches_eval_and_step_blocks():
    G = builtin("G2")
    D = discretize(G, 7)
    u = agent_types(7)
    np.testing.assert_array_equal(D.weights, G(u[:, None], u[None, :]))
    S = step_graphon([0.25, 0.5], [[1, 2, 3], [4, 5, 6], [7, 8, 9]])
    W = discretize(S, 4).weights
    # types 1/4, 2/4 close blocks 0 and 1; 3/4 and 1 are in block 2
    np.testing.assert_array_equal(W[0], [1, 2, 3, 3])
    np.testing.assert_array_equal(W[3], [7, 8, 9, 9])


def test_discretize_symmetry_preserved():
    D = discretize(builtin("G1"), 17)
    np.testing.assert_array_equal(D.weights, D.weights.T)
    assert np.max(np.abs(D.weights)) <= builtin("G1").sup_norm_hint


def test_sup_distance_examples():
    G = builtin("G2")
    assert sup_distance(G, G, 64) == 0.0
    assert sup_distance(builtin("constant", c=0.0), builtin("constant", c=2.0), 16) == 2.0


def test_sup_distance_logistic_golden():
    a, b = builtin("logistic", theta=10), builtin("logistic", theta=10.1)
    got = sup_distance(a, b, 256)
    x = np.linspace(0, 1, 4097)
    oracle = 0.0
    for s in range(0, x.size, 512):
        oracle = max(oracle, np.max(np.abs(a(x[s:s + 512, None], x[None, :]) - b(x[s:s + 512, None], x[None, :]))))
    assert got <= oracle + 1e-15
    assert oracle - got < 1e-3


def test_sup_distance_includes_block_corners():
    # jump sits at 1/3, off the uniform mesh; the corner must be sampled
    A = step_graphon([1 / 3], [[0, 0], [0, 0]])
    B = step_graphon([1 / 3], [[0, 0], [0, 5]])
    assert sup_distance(A, B, 2) == 5.0


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2), st.integers(2, 40))
def test_sup_distance_pseudometric(i, j, k, mesh):
    fams = [builtin("G1"), builtin("G2"), builtin("constant", c=0.3)]
    a, b, c = fams[i], fams[j], fams[k]
    dab, dba = sup_distance(a, b, mesh), sup_distance(b, a, mesh)
    assert dab >= 0 and dab == dba
    assert dab <= sup_distance(a, c, mesh) + sup_distance(c, b, mesh) + 1e-15


def test_sup_distance_monotone_in_refinement():
    a, b = builtin("G1"), builtin("G2")
    d = [sup_distance(a, b, m) for m in (8, 16, 32, 64)]
    assert all(x <= y + 1e-15 for x, y in zip(d, d[1:]))
