"""Scalar type profiles ``f: [0, 1] -> R``.

Reservation utilities, initial means and standard deviations, and the
separable graphon families are all specified with one of three forms:

* a number ``c`` (constant),
* ``{"affine": [a, b]}`` meaning ``a + b*u``,
* ``{"breaks": [b_1, ..., b_{m-1}], "values": [f_1, ..., f_m]}``, a
  per-block table constant on ``(b_{i-1}, b_i]`` (``u = 0`` goes to the first
  block).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from numbers import Real

import numpy as np


def block_index(x, breaks):
    """Index of the half-open block ``(b_{i-1}, b_i]`` containing ``x``."""
    return np.searchsorted(np.asarray(breaks, dtype=float), x, side="left")


@dataclass(frozen=True)
class Profile:
    kind: str  # "constant" | "affine" | "table"
    coef: tuple = (0.0,)
    breaks: tuple = field(default=())

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        if self.kind == "constant":
            return np.full(u.shape, self.coef[0]) if u.ndim else float(self.coef[0])
        if self.kind == "affine":
            a, b = self.coef
            out = a + b * u
            return out if u.ndim else float(out)
        vals = np.asarray(self.coef, dtype=float)
        out = vals[block_index(u, self.breaks)]
        return out if u.ndim else float(out)

    @property
    def lipschitz(self):
        """Global Lipschitz constant on [0, 1] (``inf`` for jumpy tables)."""
        if self.kind == "constant":
            return 0.0
        if self.kind == "affine":
            return abs(self.coef[1])
        return 0.0 if len(set(self.coef)) <= 1 else float("inf")

    @property
    def sup_abs(self):
        if self.kind == "affine":
            a, b = self.coef
            return max(abs(a), abs(a + b))
        return float(np.max(np.abs(self.coef)))

    def integral(self):
        """Exact integral over [0, 1]."""
        if self.kind == "constant":
            return float(self.coef[0])
        if self.kind == "affine":
            a, b = self.coef
            return a + 0.5 * b
        edges = np.concatenate([[0.0], self.breaks, [1.0]])
        return float(np.dot(np.diff(edges), self.coef))

    def to_spec(self):
        if self.kind == "constant":
            return self.coef[0]
        if self.kind == "affine":
            return {"affine": list(self.coef)}
        return {"breaks": list(self.breaks), "values": list(self.coef)}


def constant(c):
    return Profile("constant", (float(c),))


def affine(a, b):
    return Profile("affine", (float(a), float(b)))


def table(breaks, values):
    breaks = tuple(float(b) for b in breaks)
    values = tuple(float(v) for v in values)
    if len(values) != len(breaks) + 1:
        raise ValueError("table needs len(values) == len(breaks) + 1, got %d values for %d breaks"
                         % (len(values), len(breaks)))
    b = np.asarray(breaks)
    if b.size and (np.any(np.diff(b) <= 0) or b[0] <= 0 or b[-1] >= 1):
        raise ValueError("table breaks must be strictly increasing inside (0, 1): %r" % (breaks,))
    if not np.all(np.isfinite(values)):
        raise ValueError("table values must be finite")
    return Profile("table", values, breaks)


def as_profile(spec) -> Profile:
    """Build a :class:`Profile` from a number, a mapping, or a profile."""
    if isinstance(spec, Profile):
        return spec
    if isinstance(spec, Real) and not isinstance(spec, bool):
        if not np.isfinite(spec):
            raise ValueError("profile constant must be finite, got %r" % spec)
        return constant(spec)
    if isinstance(spec, dict):
        if "affine" in spec:
            a, b = spec["affine"]
            if not (np.isfinite(a) and np.isfinite(b)):
                raise ValueError("affine coefficients must be finite")
            return affine(a, b)
        if "values" in spec:
            return table(spec.get("breaks", ()), spec["values"])
        if "constant" in spec:
            return as_profile(spec["constant"])
    raise ValueError("cannot interpret %r as a profile (number, {'affine': [a, b]} "
                     "or {'breaks': [...], 'values': [...]})" % (spec,))
