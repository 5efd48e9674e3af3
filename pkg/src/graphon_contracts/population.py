"""Type-indexed initial output laws and reservation utilities."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .profiles import Profile, as_profile, constant

KINDS = ("point-mass", "gaussian")


def _check_types(u):
    u = np.asarray(u, dtype=float)
    if np.any((u < 0) | (u > 1)) or np.any(~np.isfinite(u)):
        raise ValueError("type must lie in [0, 1], got %r" % (u.tolist(),))
    return u


@dataclass(frozen=True)
class InitialLaw:
    """Law of the initial output of type ``u``.

    ``point-mass`` puts all mass on ``mean(u)``; ``gaussian`` is
    ``N(mean(u), std(u)^2)``. Both have bounded second moments whenever the
    profiles are bounded, which is all the convergence results need.
    """

    kind: str = "point-mass"
    mean: Profile = constant(0.0)
    std: Profile = constant(0.0)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError("unknown initial law kind %r; expected one of %s" % (self.kind, KINDS))
        object.__setattr__(self, "mean", as_profile(self.mean))
        object.__setattr__(self, "std", as_profile(self.std))
        if self.kind == "gaussian":
            s = self.std
            lowest = min(s.coef) if s.kind != "affine" else min(s.coef[0], s.coef[0] + s.coef[1])
            if lowest < 0:
                raise ValueError("gaussian initial law needs std(u) >= 0 on [0, 1]")

    def second_moment_bound(self):
        s = self.std.sup_abs if self.kind == "gaussian" else 0.0
        return self.mean.sup_abs**2 + s**2

    def mean_initial(self, u):
        return self.mean(_check_types(u))

    def variance(self, u):
        u = _check_types(u)
        if self.kind == "point-mass":
            return np.zeros_like(u) if u.ndim else 0.0
        return self.std(u) ** 2

    def sample_initial(self, u, rng: np.random.Generator):
        """Draw from the law of type(s) ``u`` using ``rng``.

        Point masses consume no random numbers, so mixing them into a run
        does not shift anyone else's stream.
        """
        u = _check_types(u)
        m = self.mean(u)
        if self.kind == "point-mass":
            return m
        z = rng.standard_normal(u.shape) if u.ndim else rng.standard_normal()
        return m + self.std(u) * z


def point_mass(mean=0.0):
    return InitialLaw("point-mass", as_profile(mean))


def gaussian(mean=0.0, std=1.0):
    return InitialLaw("gaussian", as_profile(mean), as_profile(std))


def mean_initial(law: InitialLaw, u):
    return law.mean_initial(u)


def sample_initial(law: InitialLaw, u, rng):
    return law.sample_initial(u, rng)


@dataclass(frozen=True)
class ReservationUtility:
    """Reservation utility ``R_a(u)``."""

    r: Profile = constant(0.0)

    def __post_init__(self):
        object.__setattr__(self, "r", as_profile(self.r))

    def __call__(self, u):
        return self.r(_check_types(u))

    @property
    def lipschitz(self):
        return self.r.lipschitz

    def integral(self):
        return self.r.integral()

    def shifted(self, c):
        """The same utility plus a constant ``c``."""
        r = self.r
        if r.kind == "constant":
            return ReservationUtility(constant(r.coef[0] + c))
        if r.kind == "affine":
            return ReservationUtility(as_profile({"affine": [r.coef[0] + c, r.coef[1]]}))
        return ReservationUtility(as_profile({"breaks": list(r.breaks), "values": [x + c for x in r.coef]}))


def reservation(spec=0.0) -> ReservationUtility:
    return ReservationUtility(as_profile(spec))


def initial_law(kind="point-mass", mean=0.0, std=0.0) -> InitialLaw:
    return InitialLaw(kind, as_profile(mean), as_profile(std))
