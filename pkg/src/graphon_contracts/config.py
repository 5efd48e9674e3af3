"""Run configuration: JSON file + ``GC_*`` environment overrides + defaults.

Every key has a default (see ``DEFAULTS``). An environment variable named
``GC_`` followed by the upper-cased key path with dots replaced by
underscores overrides the file, e.g. ``GC_SOLVER_M=512`` or
``GC_MODEL_GRAPHON_FAMILY=logistic``; its value is parsed as JSON when
possible and as a plain string otherwise.
"""

from __future__ import annotations

import copy
import json
import os
from dataclasses import dataclass
from pathlib import Path

from .graphon import InteractionFunction, builtin, load_step_graphon
from .montecarlo import SimConfig
from .population import InitialLaw, ReservationUtility, initial_law
from .profiles import as_profile

ENV_PREFIX = "GC_"

DEFAULTS = {
    "model": {
        # absent graphon block -> zero graphon; a present block needs "family" or "file"
        "graphon": None,
        "T": 1.0,
        "reservation": 0.0,
        "population": {"kind": "point-mass", "mean": 0.0, "std": 0.0},
    },
    "solver": {"M": 256, "K": 256, "n": 64},
    "sim": {"paths": 100000, "steps": 256, "seed": 0, "particles": 4096, "buckets": 16,
            "u": 0.5, "agent": 1},
    "analysis": {
        "sizes": [8, 16, 32, 64, 128, 256, 512],
        "replications": 30,
        "perturbed": None,  # second graphon for `stability`; defaults to the model graphon
        "types": [0.0, 0.25, 0.5, 0.75, 1.0],
        "figure_families": ["G1", "G2", "G3", "G4"],
        "figure_mesh": 256,
    },
    "output": {"directory": "out", "formats": ["csv"]},
}

ZERO_GRAPHON = {"family": "constant", "params": {"c": 0.0}}


class ConfigError(ValueError):
    def __init__(self, key, message):
        super().__init__("%s: %s" % (key, message))
        self.key = key


def _leaf_paths(tree, prefix=()):
    for k, v in tree.items():
        path = prefix + (k,)
        if isinstance(v, dict):
            yield from _leaf_paths(v, path)
        else:
            yield path


def _merge(base, over, prefix=""):
    for k, v in over.items():
        key = prefix + k
        if k not in base:
            raise ConfigError(key, "unknown key")
        if isinstance(base[k], dict) and base[k] and k != "population":
            if not isinstance(v, dict):
                raise ConfigError(key, "expected a mapping")
            _merge(base[k], v, key + ".")
        elif k == "population":
            if not isinstance(v, dict):
                raise ConfigError(key, "expected a mapping")
            for kk in v:
                if kk not in base[k]:
                    raise ConfigError(key + "." + kk, "unknown key")
            base[k].update(v)
        else:
            base[k] = v


def _env_overrides(tree, environ):
    for path in _leaf_paths(DEFAULTS):
        name = ENV_PREFIX + "_".join(p.upper() for p in path)
        if name not in environ:
            continue
        raw = environ[name]
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        node = tree
        for p in path[:-1]:
            node = node[p]
        node[path[-1]] = value
    # graphon sub-keys are not leaves of DEFAULTS
    for sub in ("family", "file"):
        name = ENV_PREFIX + "MODEL_GRAPHON_" + sub.upper()
        if name in environ:
            g = tree["model"]["graphon"]
            g = dict(g) if isinstance(g, dict) else {}
            g[sub] = environ[name]
            tree["model"]["graphon"] = g


@dataclass
class RunConfig:
    text: str  # raw config file contents, echoed into the manifest
    tree: dict  # fully resolved configuration
    base_dir: Path

    def get(self, dotted):
        node = self.tree
        for p in dotted.split("."):
            node = node[p]
        return node

    # --- typed accessors; each raises ConfigError naming the offending key

    def graphon(self, key="model.graphon") -> InteractionFunction:
        spec = self.get(key)
        if spec is None:
            spec = ZERO_GRAPHON
        return graphon_from_spec(spec, key, self.base_dir)

    def perturbed_graphon(self):
        if self.get("analysis.perturbed") is None:
            return self.graphon()
        return self.graphon("analysis.perturbed")

    def horizon(self):
        return _positive_float(self.get("model.T"), "model.T")

    def reservation(self) -> ReservationUtility:
        try:
            return ReservationUtility(as_profile(self.get("model.reservation")))
        except ValueError as exc:
            raise ConfigError("model.reservation", str(exc)) from None

    def population(self) -> InitialLaw:
        p = self.get("model.population")
        try:
            return initial_law(p["kind"], p["mean"], p["std"])
        except ValueError as exc:
            raise ConfigError("model.population", str(exc)) from None

    def solver(self, name):
        return _positive_int(self.get("solver." + name), "solver." + name)

    def sim(self, threads=1) -> SimConfig:
        s = self.tree["sim"]
        kw = {k: _positive_int(s[k], "sim." + k) for k in ("paths", "steps", "particles", "buckets")}
        seed = s["seed"]
        if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 2**64:
            raise ConfigError("sim.seed", "must be an unsigned 64-bit integer, got %r" % (seed,))
        return SimConfig(seed=seed, T=self.horizon(), threads=threads, **kw)

    def sizes(self):
        sizes = self.get("analysis.sizes")
        if not isinstance(sizes, list) or len(sizes) < 2:
            raise ConfigError("analysis.sizes", "need a list of at least two agent counts")
        out = [_positive_int(n, "analysis.sizes") for n in sizes]
        if sorted(set(out)) != out:
            raise ConfigError("analysis.sizes", "must be strictly increasing")
        return out

    def type_value(self, key):
        u = self.get(key)
        if not isinstance(u, (int, float)) or isinstance(u, bool) or not 0 <= u <= 1:
            raise ConfigError(key, "type must lie in [0, 1], got %r" % (u,))
        return float(u)

    def types(self, key="analysis.types"):
        vals = self.get(key)
        if not isinstance(vals, list) or not vals:
            raise ConfigError(key, "need a nonempty list of types")
        for u in vals:
            if not isinstance(u, (int, float)) or isinstance(u, bool) or not 0 <= u <= 1:
                raise ConfigError(key, "types must lie in [0, 1], got %r" % (u,))
        return [float(u) for u in vals]


def _positive_int(v, key):
    if not isinstance(v, int) or isinstance(v, bool) or v < 1:
        raise ConfigError(key, "must be a positive integer, got %r" % (v,))
    return v


def _positive_float(v, key):
    if not isinstance(v, (int, float)) or isinstance(v, bool) or not v > 0:
        raise ConfigError(key, "must be a positive number, got %r" % (v,))
    return float(v)


def graphon_from_spec(spec, key="model.graphon", base_dir=Path(".")) -> InteractionFunction:
    if not isinstance(spec, dict):
        raise ConfigError(key, "expected a mapping with 'family' or 'file'")
    unknown = set(spec) - {"family", "params", "file"}
    if unknown:
        raise ConfigError(key + "." + sorted(unknown)[0], "unknown key")
    if "file" in spec:
        path = Path(spec["file"])
        if not path.is_absolute():
            path = base_dir / path
        try:
            return load_step_graphon(path)
        except (OSError, ValueError) as exc:
            raise ConfigError(key + ".file", str(exc)) from None
    if "family" not in spec:
        raise ConfigError(key + ".family", "missing graphon family name")
    params = spec.get("params", {}) or {}
    if not isinstance(params, dict):
        raise ConfigError(key + ".params", "expected a mapping")
    try:
        return builtin(spec["family"], **params)
    except ValueError as exc:
        raise ConfigError(key + ".family", str(exc)) from None


def load_config(path=None, environ=None, overrides=None) -> RunConfig:
    """Resolve defaults <- file <- environment <- ``overrides`` (dotted keys)."""
    environ = os.environ if environ is None else environ
    tree = copy.deepcopy(DEFAULTS)
    text = ""
    base = Path(".")
    if path is not None:
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError("--config", str(exc)) from None
        base = path.parent
        try:
            data = json.loads(text) if text.strip() else {}
        except json.JSONDecodeError as exc:
            raise ConfigError("--config", "invalid JSON: %s" % exc) from None
        if not isinstance(data, dict):
            raise ConfigError("--config", "top level must be a mapping")
        _merge(tree, data)
    _env_overrides(tree, environ)
    for dotted, value in (overrides or {}).items():
        node = tree
        parts = dotted.split(".")
        for p in parts[:-1]:
            node = node[p]
        node[parts[-1]] = value
    return RunConfig(text, tree, base)
