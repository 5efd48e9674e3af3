"""Interaction functions (graphons) with a block structure.

An :class:`InteractionFunction` is a bounded map ``G: [0,1]^2 -> R`` that is
Lipschitz on every rectangle ``I_i x I_j`` of an ordered partition of
``[0, 1]`` into half-open blocks ``(b_{i-1}, b_i]``; the point ``u = 0``
belongs to the first block.

``G(u, v)`` is the weight with which type ``v`` acts on the dynamics of type
``u`` (first argument = receiver). In the effort equation the integration
variable is therefore the *first* argument.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .profiles import as_profile, block_index

_DELIMS = re.compile(r"[,;\s]+")

# Inward shift used to take one-sided limits at the left edge of a block.
_EDGE_NUDGE = 1e-12


class InteractionFunction:
    """A block-Lipschitz graphon.

    Parameters
    ----------
    func : callable
        Vectorised ``func(u, v)`` on broadcastable arrays.
    breaks : sequence of float, optional
        Interior block boundaries ``0 < b_1 < ... < b_{m-1} < 1``.
    sup_norm : float, optional
        Known value of ``sup |G|``.
    block_func : callable, optional
        ``block_func(u, v, bu, bv)`` evaluating the Lipschitz extension of
        block ``(bu, bv)`` at ``(u, v)``; used for one-sided limits at block
        edges. Without it the edge point is nudged into the block.
    """

    __slots__ = ("_func", "_block_func", "edges", "sup_norm_hint", "name", "params")

    def __init__(self, func, breaks=(), sup_norm=None, block_func=None, name="custom", params=None):
        breaks = np.asarray(breaks, dtype=float).ravel()
        if breaks.size and (np.any(np.diff(breaks) <= 0) or breaks[0] <= 0 or breaks[-1] >= 1):
            raise ValueError("block breakpoints must be strictly increasing inside (0, 1)")
        edges = np.concatenate([[0.0], breaks, [1.0]])
        edges.flags.writeable = False
        self._func = func
        self._block_func = block_func
        self.edges = edges
        self.sup_norm_hint = None if sup_norm is None else float(sup_norm)
        self.name = name
        self.params = dict(params or {})

    @property
    def breaks(self):
        return self.edges[1:-1]

    @property
    def n_blocks(self):
        return self.edges.size - 1

    def block_of(self, x):
        return block_index(x, self.breaks)

    def __call__(self, u, v):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        if np.any((u < 0) | (u > 1)) or np.any((v < 0) | (v > 1)):
            raise ValueError("graphon arguments must lie in [0, 1]")
        out = self._func(u, v)
        return np.broadcast_to(out, np.broadcast_shapes(u.shape, v.shape)).astype(float)

    def eval_blocks(self, u, v, bu, bv):
        """Evaluate block ``(bu, bv)``'s continuous extension at ``(u, v)``.

        Differs from ``G(u, v)`` only when ``u`` or ``v`` sits on the left edge
        of its stated block, where the one-sided limit is returned.
        """
        u, v, bu, bv = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float), bu, bv)
        if self._block_func is not None:
            return np.asarray(self._block_func(u, v, bu, bv), dtype=float)
        lo_u = self.edges[bu]
        lo_v = self.edges[bv]
        uu = np.where((bu > 0) & (u <= lo_u), lo_u + _EDGE_NUDGE, u)
        vv = np.where((bv > 0) & (v <= lo_v), lo_v + _EDGE_NUDGE, v)
        return np.asarray(self._func(uu, vv), dtype=float)

    def sup_norm(self, mesh=1024):
        if self.sup_norm_hint is not None:
            return self.sup_norm_hint
        u, v = _sample_axes(mesh, self.edges)
        return float(np.max(np.abs(self(u[:, None], v[None, :]))))

    def __repr__(self):
        return "InteractionFunction(%s, %r, blocks=%d)" % (self.name, self.params, self.n_blocks)


@dataclass(frozen=True, eq=False)
class DiscreteInteraction:
    """``weights[i-1, j-1] = G(i/n, j/n)`` for agents ``i, j = 1..n``."""

    n: int
    weights: np.ndarray

    @property
    def types(self):
        return agent_types(self.n)


def agent_types(n):
    """Agent ``i`` of ``n`` (1-indexed) has type ``i/n``; types are 1/n, ..., 1."""
    return np.arange(1, n + 1) / n


def discretize(G: InteractionFunction, n: int) -> DiscreteInteraction:
    if int(n) != n or n < 1:
        raise ValueError("agent count must be a positive integer, got %r" % (n,))
    n = int(n)
    x = agent_types(n)
    w = G(x[:, None], x[None, :]).copy()
    if not np.all(np.isfinite(w)):
        raise ValueError("graphon %s is not finite on the agent grid" % G.name)
    w.flags.writeable = False
    return DiscreteInteraction(n, w)


def _sample_axes(mesh, *edge_sets):
    pts = [np.arange(mesh + 1) / mesh]
    pts.extend(np.asarray(e, dtype=float) for e in edge_sets)
    axis = np.unique(np.concatenate(pts))
    return axis, axis


def sup_distance(G1: InteractionFunction, G2: InteractionFunction, mesh: int = 1024) -> float:
    """Sampled ``sup |G1 - G2|`` on the grid ``{k/mesh}`` plus all block edges.

    Grids are nested when one mesh divides the other, so the value is
    nondecreasing along such refinements.
    """
    if mesh < 2:
        raise ValueError("mesh must be >= 2")
    if G1 is G2:
        return 0.0
    u, v = _sample_axes(mesh, G1.edges, G2.edges)
    best = 0.0
    # row chunks keep memory bounded for fine meshes
    step = max(1, 2**22 // v.size)
    for s in range(0, u.size, step):
        uu = u[s:s + step, None]
        d = np.abs(G1(uu, v[None, :]) - G2(uu, v[None, :]))
        best = max(best, float(d.max()))
    return best


# ---------------------------------------------------------------- builtins

def _constant(c=1.0):
    c = float(c)
    return InteractionFunction(lambda u, v: np.full(np.broadcast_shapes(np.shape(u), np.shape(v)), c),
                               sup_norm=abs(c), name="constant", params={"c": c})


def _separable(profile, axis):
    prof = as_profile(profile)
    name = "row-separable" if axis == 0 else "column-separable"

    if axis == 0:
        def func(u, v):
            return np.broadcast_to(prof(u), np.broadcast_shapes(np.shape(u), np.shape(v)))
    else:
        def func(u, v):
            return np.broadcast_to(prof(v), np.broadcast_shapes(np.shape(u), np.shape(v)))

    def block_func(u, v, bu, bv):
        # tables are constant per block; affine/constant profiles are continuous
        if prof.kind == "table":
            vals = np.asarray(prof.coef)
            return vals[bu] if axis == 0 else vals[bv]
        return func(u, v)

    return InteractionFunction(func, breaks=prof.breaks, sup_norm=prof.sup_abs,
                               block_func=block_func, name=name, params={"profile": prof.to_spec()})


def _sine_distance():
    return InteractionFunction(lambda u, v: np.sin(np.abs(u - v)), sup_norm=math.sin(1.0),
                               name="sine-distance", params={})


def _logistic(theta=10.0):
    theta = float(theta)
    if not theta > 0:
        raise ValueError("logistic graphon needs theta > 0, got %r" % theta)
    # exp overflow for large theta is harmless: 1/(1+inf) = 0
    def func(u, v):
        with np.errstate(over="ignore"):
            return 1.0 / (1.0 + np.exp(theta * (u - v)))

    return InteractionFunction(func, sup_norm=1.0 / (1.0 + math.exp(-theta)),
                               name="logistic", params={"theta": theta})


def _check_levels(L):
    if int(L) != L or L < 1:
        raise ValueError("number of blocks L must be a positive integer, got %r" % (L,))
    return int(L)


def _block_product(L=5):
    L = _check_levels(L)
    breaks = np.arange(1, L) / L

    def block_func(u, v, bu, bv):
        return (np.asarray(bu) + 1.0) * (np.asarray(bv) + 1.0) / L**2

    def func(u, v):
        return block_func(u, v, block_index(u, breaks), block_index(v, breaks))

    return InteractionFunction(func, breaks=breaks, sup_norm=1.0, block_func=block_func,
                               name="block-product", params={"L": L})


def _block_logistic(L=5):
    L = _check_levels(L)
    breaks = np.arange(1, L) / L

    def block_func(u, v, bu, bv):
        bu = np.asarray(bu)
        with np.errstate(over="ignore"):
            inner = L / (1.0 + np.exp(bu * L * (u - v)))
        return np.where(bu == np.asarray(bv), inner, 0.0)

    def func(u, v):
        return block_func(u, v, block_index(u, breaks), block_index(v, breaks))

    return InteractionFunction(func, breaks=breaks, sup_norm=L / (1.0 + math.exp(-(L - 1))),
                               block_func=block_func, name="block-logistic", params={"L": L})


_FAMILIES = {
    "constant": _constant,
    "row-separable": lambda profile=1.0: _separable(profile, 0),
    "column-separable": lambda profile=1.0: _separable(profile, 1),
    "sine-distance": _sine_distance,
    "logistic": _logistic,
    "block-product": _block_product,
    "block-logistic": _block_logistic,
}

# the four interaction structures studied numerically, with their default parameters
_ALIASES = {"G1": "sine-distance", "G2": "logistic", "G3": "block-product", "G4": "block-logistic"}

FAMILIES = tuple(_FAMILIES) + tuple(_ALIASES)


def builtin(name: str, **params) -> InteractionFunction:
    """Construct a builtin family by id.

    ``constant`` (``c``), ``row-separable`` / ``column-separable``
    (``profile``: G(u,v) = profile(u) resp. profile(v)), ``sine-distance``
    (sin|u-v|), ``logistic`` (``theta``: 1/(1+exp(theta(u-v)))),
    ``block-product`` (``L``) and ``block-logistic`` (``L``). ``G1``..``G4``
    are aliases of the last four.
    """
    key = _ALIASES.get(name, name)
    try:
        factory = _FAMILIES[key]
    except KeyError:
        raise ValueError("unknown graphon family %r; expected one of %s" % (name, ", ".join(FAMILIES))) from None
    try:
        return factory(**params)
    except TypeError as exc:
        raise ValueError("bad parameters for graphon family %r: %s" % (name, exc)) from None


# ----------------------------------------------------------- step graphons

def step_graphon(breaks, blocks) -> InteractionFunction:
    """Piecewise-constant graphon equal to ``blocks[i][j]`` on ``I_i x I_j``."""
    blocks = np.array(blocks, dtype=float)
    breaks = np.asarray(breaks, dtype=float).ravel()
    m = breaks.size + 1
    if blocks.ndim != 2 or blocks.shape != (m, m):
        raise ValueError("step graphon with %d breakpoints needs a %dx%d block table, got shape %s"
                         % (breaks.size, m, m, blocks.shape))
    if not np.all(np.isfinite(blocks)):
        raise ValueError("step graphon block values must be finite")
    if breaks.size and (np.any(np.diff(breaks) <= 0) or breaks[0] <= 0 or breaks[-1] >= 1):
        raise ValueError("step graphon breakpoints must be strictly increasing inside (0, 1)")
    blocks.flags.writeable = False

    def block_func(u, v, bu, bv):
        return blocks[bu, bv]

    def func(u, v):
        return blocks[block_index(u, breaks), block_index(v, breaks)]

    return InteractionFunction(func, breaks=breaks, sup_norm=float(np.abs(blocks).max()),
                               block_func=block_func, name="step",
                               params={"breaks": breaks.tolist(), "blocks": blocks.tolist()})


def load_step_graphon(source) -> InteractionFunction:
    """Read a step graphon from delimited text.

    The first row holds the ``m - 1`` interior breakpoints (empty for a single
    block); the next ``m`` rows hold the block values. Commas, semicolons, tabs
    or whitespace are accepted as delimiters. ``source`` is a path or an
    open text stream.
    """
    if hasattr(source, "read"):
        text = source.read()
    else:
        text = Path(source).read_text()
    lines = text.splitlines()
    if not lines:
        raise ValueError("step graphon table is empty")
    rows = []
    for line in lines:
        line = line.strip()
        if line.startswith("#"):
            continue
        cells = [c for c in _DELIMS.split(line) if c]
        try:
            rows.append([float(c) for c in cells])
        except ValueError as exc:
            raise ValueError("malformed step graphon table: %s" % exc) from None
    # drop trailing blank lines but keep a blank first row (no breakpoints)
    while len(rows) > 1 and not rows[-1]:
        rows.pop()
    breaks, blocks = rows[0], rows[1:]
    if any(len(r) == 0 for r in blocks):
        raise ValueError("malformed step graphon table: blank block row")
    if len({len(r) for r in blocks}) > 1:
        raise ValueError("malformed step graphon table: ragged block rows")
    if not np.all(np.isfinite(breaks)):
        raise ValueError("step graphon breakpoints must be finite")
    return step_graphon(breaks, blocks)
