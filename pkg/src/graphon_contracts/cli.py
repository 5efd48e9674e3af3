"""Command-line front end.

    graphon-contracts [--config PATH] [--out DIR] [--seed U64] [--threads K]
                      [--dump-paths] COMMAND

Commands: solve-continuum, solve-finite, simulate, converge, stability,
compare, figures. Each writes delimited-text tables plus ``manifest.json``
into the output directory. Exit codes: 0 success, 2 configuration error,
3 solver failure. Any config key can be overridden from the environment
with ``GC_`` + the upper-cased key path (``GC_SOLVER_M=512``).
"""

from __future__ import annotations

import argparse
import dataclasses
import itertools
import math
import sys
from pathlib import Path

import numpy as np

from . import analysis, continuum, finite, io, montecarlo
from .config import ConfigError, graphon_from_spec, load_config
from .graphon import discretize

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER = 0, 2, 3
FORMATS = {"csv": ",", "tsv": "\t"}


class Emitter:
    """Collects output tables so the manifest can hash every one of them."""

    def __init__(self, out_dir, formats):
        self.out = Path(out_dir)
        self.formats = formats
        self.files = []

    def table(self, stem, header, rows):
        rows = [list(r) for r in rows]
        for fmt in self.formats:
            path = self.out / ("%s.%s" % (stem, fmt))
            io.write_table(path, header, rows, FORMATS[fmt])
            self.files.append(path)

    def grid(self, stem, row_label, row_values, col_values, values):
        header = [row_label] + [io._fmt(c) for c in col_values]
        self.table(stem, header, ([r] + list(v) for r, v in zip(row_values, values)))


def _formats(cfg):
    fmts = cfg.get("output.formats")
    if isinstance(fmts, str):
        fmts = [fmts]
    if not isinstance(fmts, list) or not fmts or any(f not in FORMATS for f in fmts):
        raise ConfigError("output.formats", "expected a nonempty list drawn from %s, got %r"
                          % (sorted(FORMATS), fmts))
    return list(dict.fromkeys(fmts))


# --- commands: each takes (cfg, args, emit) and returns a dict of scalar results


def cmd_solve_continuum(cfg, args, emit):
    G, T, R, law = cfg.graphon(), cfg.horizon(), cfg.reservation(), cfg.population()
    M, K = cfg.solver("M"), cfg.solver("K")
    Q = continuum.solve_continuum(G, T, M, K)
    emit.grid("effort", "t", Q.times, Q.type_nodes, Q.values)
    emit.table("marginal_values", ["u", "v_p", "contract_mean", "contract_variance"],
               continuum.marginal_table(Q, law, R))
    return {"principal_value": continuum.principal_value(Q, law, R), "graphon": G.name,
            "type_nodes": int(Q.grid.size)}


def cmd_solve_finite(cfg, args, emit):
    G, T, R, law = cfg.graphon(), cfg.horizon(), cfg.reservation(), cfg.population()
    M, n = cfg.solver("M"), cfg.solver("n")
    seed = cfg.sim().seed
    sol = finite.finite_solution(discretize(G, n), T, M, law, R, seed=seed)
    F = sol.effort
    emit.table("agents", ["i", "u", "Q0", "initial_output", "contract_mean", "contract_variance"],
               ((i + 1, (i + 1) / n, F.values[0, i], sol.initial_outputs[i], c.mean, c.variance)
                for i, c in enumerate(sol.contract_laws)))
    emit.grid("effort", "t", F.times, range(1, n + 1), F.values)
    Qc = continuum.solve_continuum(G, T, M, cfg.solver("K"))
    gap = finite.near_optimal_gap(G, Qc, law, R, n, T, M, seed)
    return {"principal_value": sol.principal_value, "near_optimal_gap": gap, "n": n, "graphon": G.name}


def cmd_simulate(cfg, args, emit):
    G, T, R, law = cfg.graphon(), cfg.horizon(), cfg.reservation(), cfg.population()
    sim = cfg.sim(args.threads)
    u = cfg.type_value("sim.u")
    Q = continuum.solve_continuum(G, T, cfg.solver("M"), cfg.solver("K"))
    pop = montecarlo.simulate_particles(G, Q, law, dataclasses.replace(sim, paths=sim.particles),
                                        dump_paths=args.dump_paths)
    mids = 0.5 * (pop.bucket_edges[:-1] + pop.bucket_edges[1:])
    emit.grid("bucket_mean", "t", pop.times, mids, pop.bucket_mean)
    emit.grid("bucket_second_moment", "t", pop.times, mids, pop.bucket_second_moment)
    emit.table("population", ["t", "mean", "std"],
               zip(pop.times, pop.population_mean, pop.population_std))
    if pop.paths is not None:
        emit.grid("paths", "t", pop.times, range(pop.paths.shape[1]), pop.paths)
    stats = montecarlo.sample_contracts(G, Q, law, R, u, sim)
    law_u = continuum.contract_law(Q, R, u)
    fields = [f.name for f in dataclasses.fields(stats)]
    emit.table("contract_stats", ["u"] + fields + ["law_mean", "law_variance"],
               [[u] + [getattr(stats, f) for f in fields] + [law_u.mean, law_u.variance]])
    return {"u": u, "contract_stats": dataclasses.asdict(stats),
            "contract_law": dataclasses.asdict(law_u),
            "mean_z_score": (stats.empirical_mean - law_u.mean) / stats.standard_error_mean
            if stats.standard_error_mean > 0 else None}


def cmd_converge(cfg, args, emit):
    G, T, R, law = cfg.graphon(), cfg.horizon(), cfg.reservation(), cfg.population()
    sizes, M = cfg.sizes(), cfg.solver("M")
    reps = cfg.get("analysis.replications")
    if not isinstance(reps, int) or isinstance(reps, bool) or reps < 30:
        raise ConfigError("analysis.replications", "need an integer >= 30, got %r" % (reps,))
    seed = cfg.sim().seed
    eff = analysis.effort_convergence(G, T, sizes, M)
    val, w2 = analysis.value_convergence(G, law, R, T, sizes, reps, seed, M)
    header = ["N", "error", "scaled_error", "running_slope"]
    emit.table("effort_rate", header, eff.rows())
    emit.table("value_rate", header, val.rows())
    emit.table("w2_rate", header, w2.rows())

    def summary(rep):
        return {"fitted_slope": rep.fitted_slope, "order": rep.order,
                "constant_spread_upper_half": rep.constant_spread(), **rep.extras}

    return {"effort": summary(eff), "value_mse": summary(val), "contract_w2": summary(w2)}


def cmd_stability(cfg, args, emit):
    G1, G2 = cfg.graphon(), cfg.perturbed_graphon()
    T, R = cfg.horizon(), cfg.reservation()
    M, K = cfg.solver("M"), cfg.solver("K")
    types = cfg.types()
    res = analysis.stability_effort(G1, G2, T, M, K)
    rows = []
    for u in types:
        w2, bound = analysis.stability_contracts(G1, G2, R, u, T, M, K)
        rows.append((u, w2, bound))
    emit.table("contract_stability", ["u", "w2", "sqrt_dG_plus_dG"], rows)
    return {"sup_Q_diff": res.sup_Q_diff, "sup_G_diff": res.sup_G_diff,
            "ratio": None if math.isnan(res.ratio) else res.ratio}


def cmd_compare(cfg, args, emit):
    G, T = cfg.graphon(), cfg.horizon()
    Q = continuum.solve_continuum(G, T, cfg.solver("M"), cfg.solver("K"))
    rows, counts = [], {}
    for u1, u2 in itertools.permutations(sorted(set(cfg.types())), 2):
        v = analysis.check_influence_monotonicity(G, u1, u2, Q)
        rows.append((u1, u2, v.verdict, v.max_violation, v.equal))
        counts[v.verdict] = counts.get(v.verdict, 0) + 1
    emit.table("monotonicity", ["u1", "u2", "verdict", "max_violation", "equal"], rows)
    return {"verdict_counts": counts}


def cmd_figures(cfg, args, emit):
    T, R, law = cfg.horizon(), cfg.reservation(), cfg.population()
    M, K = cfg.solver("M"), cfg.solver("K")
    mesh = cfg.get("analysis.figure_mesh")
    if not isinstance(mesh, int) or isinstance(mesh, bool) or mesh < 2:
        raise ConfigError("analysis.figure_mesh", "need an integer >= 2, got %r" % (mesh,))
    fams = cfg.get("analysis.figure_families")
    if not isinstance(fams, list) or not fams:
        raise ConfigError("analysis.figure_families", "need a nonempty list of family names")
    axis = np.linspace(0.0, 1.0, mesh)
    out = {}
    for fam in fams:
        spec = fam if isinstance(fam, dict) else {"family": fam}
        G = graphon_from_spec(spec, "analysis.figure_families", cfg.base_dir)
        tag = spec.get("family", Path(str(spec.get("file", "custom"))).stem)
        Q = continuum.solve_continuum(G, T, M, K)
        emit.grid("figure_%s_graphon" % tag, "u", axis, axis, G(axis[:, None], axis[None, :]))
        emit.table("figure_%s_marginal" % tag, ["u", "v_p", "contract_mean", "contract_variance"],
                   continuum.marginal_table(Q, law, R))
        emit.grid("figure_%s_effort" % tag, "t", Q.times, Q.type_nodes, Q.values)
        out[tag] = {"principal_value": continuum.principal_value(Q, law, R), "graphon": G.name}
    return out


COMMANDS = {
    "solve-continuum": cmd_solve_continuum,
    "solve-finite": cmd_solve_finite,
    "simulate": cmd_simulate,
    "converge": cmd_converge,
    "stability": cmd_stability,
    "compare": cmd_compare,
    "figures": cmd_figures,
}


def _u64(text):
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError("not an integer: %r" % text) from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return v


def _positive(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("not an integer: %r" % text) from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser():
    p = argparse.ArgumentParser(prog="graphon-contracts", description=__doc__.splitlines()[0])
    p.add_argument("--config", help="JSON run configuration (defaults used when omitted)")
    p.add_argument("--out", help="output directory (overrides output.directory)")
    p.add_argument("--seed", type=_u64, help="master seed (overrides sim.seed)")
    p.add_argument("--threads", type=_positive, default=1, help="worker threads; never changes results")
    p.add_argument("--dump-paths", action="store_true", help="simulate: also write up to 1000 raw paths")
    p.add_argument("command", choices=sorted(COMMANDS))
    return p


def _manifest_config(tree):
    # the output location is not part of the experiment; keep manifests comparable across directories
    tree = dict(tree)
    tree["output"] = {k: v for k, v in tree["output"].items() if k != "directory"}
    return tree


def main(argv=None, environ=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        overrides = {}
        if args.seed is not None:
            overrides["sim.seed"] = args.seed
        if args.out is not None:
            overrides["output.directory"] = args.out
        cfg = load_config(args.config, environ, overrides)
        emit = Emitter(cfg.get("output.directory"), _formats(cfg))
        cfg.sim(args.threads)  # validate sim block and seed up front
        emit.out.mkdir(parents=True, exist_ok=True)
        results = COMMANDS[args.command](cfg, args, emit)
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, FloatingPointError, ArithmeticError, np.linalg.LinAlgError, MemoryError) as exc:
        print("solver error: %s" % exc, file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print("output error: %s" % exc, file=sys.stderr)
        return EXIT_SOLVER
    path = io.write_manifest(emit.out, args.command, cfg.text, _manifest_config(cfg.tree), results, emit.files)
    print(path)
    return EXIT_OK


def main_exit():
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
