"""Command-line front end.

Every command emits one JSON report (stdout, or ``--out``) that echoes the
full configuration, the package version, the numeric mode, and every
tolerance used; tabular views go to ``--csv`` where offered.  Outputs are
byte-deterministic for a fixed (config, seed): wall-clock timing is printed
to stderr only, never into artifacts.

Exit codes: 0 success; 2 configuration or usage errors; 3 validation or
precondition failures; 4 resource-cap aborts.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction
from math import comb

import numpy as np

from . import __version__, intrinsic, io, simplex, zoo
from ._kernels import backend_name
from .equipment import EquippedGraph, central_equipment, validate
from .graph import CapExceeded, VertexId
from .measures import LevelMeasure
from .operators import markov_matrix, martin_kernel, vertex_measure

__all__ = ["main"]

# commands whose defining examples are exact keep rational defaults; the
# large-scale analyses default to float
_MODE_DEFAULTS = {
    "zoo": "rational",
    "validate": "rational",
    "mu": "rational",
    "martin-kernel": "rational",
    "project": "rational",
    "export": "float",
    "omega": "float",
    "extremality": "float",
    "decompose": "float",
    "martin": "float",
    "poulsen": "float",
    "intrinsic": "float",
    "concentration": "float",
    "lacunarize": "float",
}


def _common_parent() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--mode", choices=("rational", "float"), default=None,
                   help="numeric mode (default depends on the command)")
    p.add_argument("--seed", type=int, default=0, help="seed for anything sampled")
    p.add_argument("--threads", type=int, default=1,
                   help="worker bound (reserved; current kernels are single-threaded)")
    p.add_argument("--out", default=None, help="write the JSON report here instead of stdout")
    p.add_argument("--csv", default=None, help="write the tabular view here")
    return p


def _graph_parent(require_graph: bool = True) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--graph", required=require_graph,
                   help="zoo kind (pascal|young|unordered_pairs|random) or a graph JSON file")
    p.add_argument("--depth", type=int, default=None,
                   help="depth for zoo kinds (for intrinsic/export: levels analyzed)")
    p.add_argument("--base", type=int, default=None, help="base for unordered_pairs")
    p.add_argument("--density", type=float, default=None, help="density for random graphs")
    p.add_argument("--equipment", choices=("central", "file"), default="central",
                   help="cotransition weights: central closed form, or the table from the graph file")
    return p


def _measure_parent() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--point-file", default=None,
                   help="JSON measure file for the top of the coherent sequence")
    p.add_argument("--bernoulli", default=None, metavar="P",
                   help="binomial(top level, P) top measure (levels must have n+1 vertices)")
    p.add_argument("--mixture", default=None, metavar="P1:W1,P2:W2,...",
                   help="mixture of binomial top measures")
    return p


def _base_parent() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--base-weights", default=None,
                   help="comma list of base-metric weights c_n (fractions allowed); default 2^-n")
    p.add_argument("--no-normalize", action="store_true",
                   help="keep raw c_n scaling instead of unit level-1 distances")
    return p


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="bratteli", description=__doc__)
    top.add_argument("--version", action="version", version=f"bratteli {__version__}")
    sub = top.add_subparsers(dest="command", required=True)
    com = _common_parent()
    gr = _graph_parent()
    meas = _measure_parent()
    bm = _base_parent()

    p = sub.add_parser("zoo", parents=[com], help="generate a graph and save it as JSON")
    p.add_argument("kind", choices=zoo.KINDS)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--base", type=int, default=None)
    p.add_argument("--density", type=float, default=None)
    p.add_argument("--level-cap", type=int, default=zoo.LEVEL_CAP_DEFAULT)

    sub.add_parser("validate", parents=[com, gr], help="check graph and equipment invariants")

    p = sub.add_parser("mu", parents=[com, gr], help="projected measure of one vertex")
    p.add_argument("--vertex", required=True, metavar="N,I")
    p.add_argument("--k", type=int, required=True, help="target level")

    p = sub.add_parser("martin-kernel", parents=[com, gr], help="Martin kernel K(u, v)")
    p.add_argument("--u", required=True, metavar="N,I")
    p.add_argument("--v", required=True, metavar="N,I")

    p = sub.add_parser("project", parents=[com, gr], help="project a measure file down")
    p.add_argument("--point-file", required=True)
    p.add_argument("--m", type=int, required=True, help="target level")

    p = sub.add_parser("omega", parents=[com, gr], help="projected vertex cloud at level m")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("extremality", parents=[com, gr, meas], help="spread of a coherent point")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--tol", type=float, default=0.05,
                   help="extreme-at-tolerance threshold on the spread")

    p = sub.add_parser("decompose", parents=[com, gr, meas],
                       help="cluster the representing measure (approximate ergodic decomposition)")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--atom-floor", type=float, default=1e-12)

    p = sub.add_parser("martin", parents=[com, gr], help="boundary limit of a vertex sequence")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--ray", default=None, metavar="p=VAL",
                   help="vertices (L, round(p*L)) on a halving ladder of levels")
    p.add_argument("--until", type=int, default=None, help="top level of the ray ladder")
    p.add_argument("--sequence", default=None, metavar="N,I;N,I;...",
                   help="explicit vertex sequence")
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--window", type=int, default=5)

    p = sub.add_parser("poulsen", parents=[com, gr], help="cloud fill distance on a simplex grid")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--resolution", type=int, required=True)
    p.add_argument("--grid-cap", type=int, default=simplex.GRID_CAP)

    p = sub.add_parser("intrinsic", parents=[com, gr, meas, bm],
                       help="intrinsic-metric standardness diagnostic")
    p.add_argument("--eps", required=True, help="comma list of radii")

    p = sub.add_parser("concentration", parents=[com, gr, meas, bm],
                       help="mass of the best epsilon-ball at one level")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eps", type=float, required=True)

    p = sub.add_parser("lacunarize", parents=[com, gr, bm],
                       help="greedy lacunary level subsequence")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--max-depth", type=int, required=True)
    p.add_argument("--chain-csv", default=None,
                   help="write composed chain entries (step, u, v, weight)")

    p = sub.add_parser("export", parents=[com, gr, bm], help="CSV exports of analysis tables")
    p.add_argument("--what", choices=("covering-curve", "distance-table"), required=True)
    p.add_argument("--eps", type=float, default=None, help="radius for covering-curve")
    p.add_argument("--level", type=int, default=None, help="level for distance-table")
    p.add_argument("--table-cap", type=int, default=2000,
                   help="largest level size exported as a distance table")
    return top


# -- argument helpers ---------------------------------------------------------


def _parse_vertex(s: str) -> VertexId:
    parts = s.split(",")
    if len(parts) != 2:
        raise ValueError(f"vertex must be 'level,index', got {s!r}")
    return VertexId(int(parts[0]), int(parts[1]))


def _resolve_mode(args) -> str:
    return args.mode or _MODE_DEFAULTS[args.command]


def _load_graph(args, default_depth=None):
    """Graph + equipment from --graph: a JSON file or a zoo kind.  Zoo kinds
    build levels 0..depth; file graphs come as they are."""
    src = args.graph
    if src.endswith(".json") or os.path.exists(src):
        g, eq = io.load_graph(src)
        if args.equipment == "file":
            if eq is None:
                raise ValueError(f"{src} embeds no equipment")
        else:
            eq = central_equipment(g)
        desc = {"file": src, "equipment": args.equipment}
    else:
        depth = args.depth if args.depth is not None else default_depth
        if depth is None:
            raise ValueError("zoo graphs need --depth")
        if args.equipment == "file":
            raise ValueError("--equipment file needs a graph file")
        density = args.density
        if src == "random" and density is None:
            density = 0.5
        spec = zoo.GraphSpec(kind=src, depth=depth, base=args.base,
                             seed=args.seed if src == "random" else None,
                             density=density)
        g = zoo.make(spec)
        eq = central_equipment(g)
        desc = {"zoo": spec.to_dict(), "equipment": "central"}
    return EquippedGraph(g, eq), desc


def _parse_fraction(s: str) -> Fraction:
    return Fraction(s)  # accepts "1/2", "0.5", "3"


def _binomial_weights(n: int, p: Fraction, exact: bool):
    if not 0 <= p <= 1:
        raise ValueError("parameter must lie in [0, 1]")
    if exact:
        q = 1 - p
        return [comb(n, k) * p**k * q ** (n - k) for k in range(n + 1)]
    pf = float(p)
    qf = 1.0 - pf
    out = np.array([comb(n, k) for k in range(n + 1)], dtype=np.float64)
    out *= np.power(pf, np.arange(n + 1)) * np.power(qf, n - np.arange(n + 1))
    return out


def _top_measure(eg: EquippedGraph, args, n: int, exact: bool) -> LevelMeasure:
    given = [x for x in (args.point_file, args.bernoulli, args.mixture) if x]
    if len(given) != 1:
        raise ValueError("give exactly one of --point-file, --bernoulli, --mixture")
    if args.point_file:
        mu = io.load_measure(args.point_file)
        if mu.level != n:
            raise ValueError(f"measure level {mu.level} does not match --n {n}")
        if exact and not mu.is_exact:
            raise ValueError("rational mode needs a rational measure file")
        return mu if mu.is_exact == exact else mu.to_float_measure()
    if eg.graph.level_size(n) != n + 1:
        raise ValueError("binomial measures need n+1 vertices at level n")
    if args.bernoulli:
        w = _binomial_weights(n, _parse_fraction(args.bernoulli), exact)
    else:
        parts = []
        for tok in args.mixture.split(","):
            pv, wv = tok.split(":")
            parts.append((_parse_fraction(pv), _parse_fraction(wv)))
        if sum(w for _, w in parts) != 1:
            raise ValueError("mixture weights must sum to 1")
        if exact:
            w = [Fraction(0)] * (n + 1)
            for pv, wv in parts:
                for k, x in enumerate(_binomial_weights(n, pv, True)):
                    w[k] += wv * x
        else:
            w = np.zeros(n + 1)
            for pv, wv in parts:
                w = w + float(wv) * _binomial_weights(n, pv, False)
    return LevelMeasure(n, w, exact=exact)


def _base_config(args) -> intrinsic.BaseMetricConfig:
    weights = None
    if getattr(args, "base_weights", None):
        weights = tuple(_parse_fraction(tok) for tok in args.base_weights.split(","))
    return intrinsic.BaseMetricConfig(
        weights=weights, normalize=not getattr(args, "no_normalize", False)
    )


def _num(x):
    """JSON-ready number: Fractions to strings, numpy scalars to built-ins."""
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    return x


def _weights_out(weights):
    return [_num(w) for w in weights]


# -- commands -----------------------------------------------------------------


def _cmd_zoo(args):
    spec = zoo.GraphSpec(
        kind=args.kind,
        depth=args.depth,
        base=args.base,
        seed=args.seed if args.kind == "random" else None,
        density=args.density if args.kind == "random" else None,
    )
    g = zoo.make(spec, level_cap=args.level_cap)
    data = io.graph_to_dict(g, central_equipment(g))
    if args.out:
        # --out is the graph artifact here; the report goes to stdout
        with open(args.out, "w") as fh:
            json.dump(data, fh, sort_keys=True, indent=2)
            fh.write("\n")
        results = {"written": args.out, "level_sizes": list(g.level_sizes),
                   "edge_total": sum(g.edge_count(n) for n in range(g.depth - 1))}
        args.out = None
        return {"spec": spec.to_dict()}, results, 0
    return {"spec": spec.to_dict()}, {"graph": data}, 0


def _cmd_validate(args):
    eg, desc = _load_graph(args)
    violations = validate(eg)
    results = {
        "violations": [
            {"rule": v.rule, "location": v.location, "detail": v.detail}
            for v in violations
        ],
        "count": len(violations),
    }
    return {"graph": desc}, results, 0 if not violations else 3


def _cmd_mu(args):
    eg, desc = _load_graph(args)
    v = _parse_vertex(args.vertex)
    mode = _resolve_mode(args)
    mu = vertex_measure(eg, v, args.k, mode="exact" if mode == "rational" else "float")
    if args.csv:
        io.write_csv(args.csv, ["level", "index", "weight"],
                     [[mu.level, i, _num(w)] for i, w in enumerate(mu.weights)])
    results = {"vertex": list(v), "k": args.k, "weights": _weights_out(mu.weights)}
    return {"graph": desc, "mode": mode}, results, 0


def _cmd_martin_kernel(args):
    eg, desc = _load_graph(args)
    u = _parse_vertex(args.u)
    v = _parse_vertex(args.v)
    mode = _resolve_mode(args)
    val = martin_kernel(eg, u, v, mode="exact" if mode == "rational" else "float")
    if args.csv:
        io.write_csv(args.csv, ["u_level", "u_index", "v_level", "v_index", "value"],
                     [[u.level, u.index, v.level, v.index, _num(val)]])
    return {"graph": desc, "mode": mode}, {"u": list(u), "v": list(v), "value": _num(val)}, 0


def _cmd_project(args):
    eg, desc = _load_graph(args)
    mode = _resolve_mode(args)
    mu = io.load_measure(args.point_file)
    if mode == "float" and mu.is_exact:
        mu = mu.to_float_measure()
    out = simplex.project(eg, mu, args.m)
    if args.csv:
        io.write_csv(args.csv, ["level", "index", "weight"],
                     [[out.level, i, _num(w)] for i, w in enumerate(out.weights)])
    results = {"level_from": mu.level, "level_to": out.level,
               "weights": _weights_out(out.weights)}
    return {"graph": desc, "mode": mode, "point_file": args.point_file}, results, 0


def _cmd_omega(args):
    eg, desc = _load_graph(args, default_depth=args.n)
    mode = _resolve_mode(args)
    cloud = simplex.omega_cloud(eg, args.m, args.n,
                                mode="exact" if mode == "rational" else "float")
    pts = cloud.points
    if args.csv:
        d = pts.shape[0]
        rows = [[v] + [_num(pts[i, v]) for i in range(d)] for v in range(pts.shape[1])]
        io.write_csv(args.csv, ["source_index"] + [f"coord_{i}" for i in range(d)], rows)
    results = {"m": args.m, "n": args.n, "point_count": int(pts.shape[1]),
               "coordinate_dim": int(pts.shape[0])}
    return {"graph": desc, "mode": mode}, results, 0


def _prefix(eg, args, mode):
    top = _top_measure(eg, args, args.n, exact=(mode == "rational"))
    return simplex.CoherentPrefix.from_top(eg, top)


def _cmd_extremality(args):
    eg, desc = _load_graph(args, default_depth=args.n)
    mode = _resolve_mode(args)
    pref = _prefix(eg, args, mode)
    spread = simplex.extremality_spread(
        eg, pref, args.m, args.n, mode="exact" if mode == "rational" else "float"
    )
    results = {
        "m": args.m,
        "n": args.n,
        "spread": _num(spread),
        "tolerance": args.tol,
        "extreme_at_tolerance": bool(float(spread) < args.tol),
        "note": "finite-stage evidence at the stated depth and tolerance only",
    }
    if args.csv:
        io.write_csv(args.csv, ["m", "n", "spread", "tolerance"],
                     [[args.m, args.n, _num(spread), args.tol]])
    return {"graph": desc, "mode": mode, "tolerance": args.tol}, results, 0


def _cmd_decompose(args):
    eg, desc = _load_graph(args, default_depth=args.n)
    mode = _resolve_mode(args)
    pref = _prefix(eg, args, mode)
    clusters = simplex.choquet_decompose(
        eg, pref, args.m, args.n, args.radius, atom_floor=args.atom_floor
    )
    results = {
        "m": args.m,
        "n": args.n,
        "cluster_radius": args.radius,
        "atom_floor": args.atom_floor,
        "clusters": [
            {
                "weight": c.weight,
                "barycenter": [float(x) for x in c.barycenter],
                "member_count": len(c.members),
                "first_member": min(c.members),
            }
            for c in clusters
        ],
    }
    if args.csv:
        d = len(clusters[0].barycenter) if clusters else 0
        io.write_csv(
            args.csv,
            ["cluster", "weight"] + [f"coord_{i}" for i in range(d)],
            [[i, c.weight] + [float(x) for x in c.barycenter] for i, c in enumerate(clusters)],
        )
    return {"graph": desc, "mode": mode}, results, 0


def _ray_levels(m: int, until: int, window: int) -> list[int]:
    """Stage levels for a ray: the trailing Cauchy window sits linearly in
    the top octave, with a halving run-up below it for context."""
    if until <= m + 1:
        raise ValueError("--until must exceed --m by at least 2")
    if window > 1:
        top = [until * (window - 1 + j) // (2 * (window - 1)) for j in range(window)]
    else:
        top = [until]
    coarse = []
    lv = until // 4
    floor = max(m + 1, until // 16)
    while lv >= floor:
        coarse.append(lv)
        lv //= 2
    levels = sorted({x for x in top + coarse if x > m})
    if len(levels) < 2:
        raise ValueError("ray too short; raise --until")
    return levels


def _cmd_martin(args):
    mode = _resolve_mode(args)
    if args.sequence:
        seq = [_parse_vertex(tok) for tok in args.sequence.split(";")]
        eg, desc = _load_graph(args, default_depth=max(v.level for v in seq))
    elif args.ray:
        if not args.ray.startswith("p=") or args.until is None:
            raise ValueError("--ray needs the form p=VALUE plus --until")
        p = _parse_fraction(args.ray[2:])
        eg, desc = _load_graph(args, default_depth=args.until)
        seq = []
        for lv in _ray_levels(args.m, args.until, args.window):
            k = int(round(float(p) * lv))
            seq.append(VertexId(lv, min(max(k, 0), eg.graph.level_size(lv) - 1)))
    else:
        raise ValueError("give --sequence or --ray")
    rep = simplex.martin_limit(
        eg, seq, args.m, tol=args.tol, window=args.window,
        mode="exact" if mode == "rational" else "float",
    )
    if args.csv:
        io.write_csv(args.csv, ["level", "index", "weight"],
                     [[rep.limit.level, i, _num(w)] for i, w in enumerate(rep.limit.weights)])
    results = {
        "m": args.m,
        "stages": [list(v) for v in seq],
        "cauchy": rep.cauchy,
        "max_tail_distance": float(rep.max_tail_distance),
        "tol": rep.tol,
        "window": rep.window,
        "limit": _weights_out(rep.limit.weights),
    }
    return {"graph": desc, "mode": mode, "tol": args.tol, "window": args.window}, results, 0


def _cmd_poulsen(args):
    eg, desc = _load_graph(args, default_depth=args.n)
    rep = simplex.poulsen_density(eg, args.m, args.n, args.resolution, cap=args.grid_cap)
    results = {
        "m": args.m,
        "n": args.n,
        "grid_resolution": args.resolution,
        "fill_distance": rep.fill_distance,
        "worst_point": list(rep.worst_point),
        "grid_size": rep.grid_size,
        "cloud_size": rep.cloud_size,
    }
    return {"graph": desc, "mode": "float"}, results, 0


def _cmd_intrinsic(args):
    if args.depth is None:
        raise ValueError("intrinsic needs --depth")
    eg, desc = _load_graph(args)
    mode = _resolve_mode(args)
    base = _base_config(args)
    eps = [float(tok) for tok in args.eps.split(",")]
    measure = None
    if args.point_file or args.bernoulli or args.mixture:
        args.n = args.depth
        measure = _prefix(eg, args, "float")
    rep = intrinsic.standardness_diagnostic(
        eg, base, args.depth, eps, measure=measure,
        mode="exact" if mode == "rational" else "float", seed=args.seed,
    )
    if args.csv:
        rows = []
        for j, e in enumerate(rep.eps):
            for lvl, row in zip(rep.levels, rep.covering):
                rows.append([e, lvl, row[j]])
        io.write_csv(args.csv, ["eps", "level", "covering"], rows)
    results = {
        "eps": list(rep.eps),
        "levels": list(rep.levels),
        "covering": [list(r) for r in rep.covering],
        "diameters": [_num(d) for d in rep.diameters],
        "ball_masses": None if rep.ball_masses is None else [list(r) for r in rep.ball_masses],
        "sampled_levels": list(rep.sampled_levels),
        "sample_size": rep.sample_size,
    }
    return {"graph": desc, "mode": mode, "base": base.to_dict(), "eps": eps,
            "seed": args.seed}, results, 0


def _cmd_concentration(args):
    eg, desc = _load_graph(args, default_depth=args.n)
    base = _base_config(args)
    pref = _prefix(eg, args, "float")
    mass = intrinsic.concentration_test(eg, base, pref, args.n, args.eps)
    results = {"n": args.n, "eps": args.eps, "best_ball_mass": mass}
    return {"graph": desc, "mode": "float", "base": base.to_dict()}, results, 0


def _cmd_lacunarize(args):
    eg, desc = _load_graph(args, default_depth=args.max_depth)
    base = _base_config(args)
    res = intrinsic.lacunarize(eg, base, args.eps, args.max_depth)
    if args.chain_csv:
        rows = []
        for step, M in enumerate(res.chain):
            for v in range(M.shape[1]):
                lo, hi = M.indptr[v], M.indptr[v + 1]
                for e in range(lo, hi):
                    rows.append([step, int(M.indices[e]), v, float(M.weights[e])])
        io.write_csv(args.chain_csv, ["step", "u", "v", "weight"], rows)
    results = {
        "eps": res.eps,
        "levels": list(res.levels),
        "coverings": list(res.coverings),
        "flagged": res.flagged,
        "forced_level": res.forced_level,
        "forced_covering": res.forced_covering,
        "note": res.note,
        "chain": [
            {"lower_level": M.n, "shape": list(M.shape), "entries": int(len(M.indices))}
            for M in res.chain
        ],
    }
    return {"graph": desc, "mode": "float", "base": base.to_dict(),
            "eps": args.eps, "max_depth": args.max_depth}, results, 0


def _cmd_export(args):
    base = _base_config(args)
    if not args.csv:
        raise ValueError("export needs --csv for its output table")
    if args.what == "covering-curve":
        if args.eps is None or args.depth is None:
            raise ValueError("covering-curve needs --eps and --depth")
        eg, desc = _load_graph(args)
        rep = intrinsic.standardness_diagnostic(
            eg, base, args.depth, [args.eps], seed=args.seed
        )
        io.write_csv(args.csv, ["level", "covering"],
                     [[lvl, row[0]] for lvl, row in zip(rep.levels, rep.covering)])
        results = {"what": args.what, "eps": args.eps, "depth": args.depth,
                   "written": args.csv}
    else:
        if args.level is None:
            raise ValueError("distance-table needs --level")
        eg, desc = _load_graph(args, default_depth=args.level)
        size = eg.graph.level_size(args.level)
        if size > args.table_cap:
            raise CapExceeded(
                f"level {args.level} has {size} vertices; cap is {args.table_cap}"
            )
        rho = intrinsic.iterate_intrinsic(eg, base, args.level, seed=args.seed)[-1]
        D = rho.as_floats()
        io.write_csv(args.csv, ["i"] + [str(j) for j in range(size)],
                     [[i] + [float(x) for x in D[i]] for i in range(size)])
        results = {"what": args.what, "level": args.level, "written": args.csv}
    return {"graph": desc, "mode": "float", "base": base.to_dict(),
            "seed": args.seed}, results, 0


_COMMANDS = {
    "zoo": _cmd_zoo,
    "validate": _cmd_validate,
    "mu": _cmd_mu,
    "martin-kernel": _cmd_martin_kernel,
    "project": _cmd_project,
    "omega": _cmd_omega,
    "extremality": _cmd_extremality,
    "decompose": _cmd_decompose,
    "martin": _cmd_martin,
    "poulsen": _cmd_poulsen,
    "intrinsic": _cmd_intrinsic,
    "concentration": _cmd_concentration,
    "lacunarize": _cmd_lacunarize,
    "export": _cmd_export,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    started = time.perf_counter()
    try:
        config, results, rc = _COMMANDS[args.command](args)
    except CapExceeded as exc:
        print(f"error (resource cap): {exc}", file=sys.stderr)
        return 4
    except ArithmeticError as exc:
        print(f"error (numeric precondition): {exc}", file=sys.stderr)
        return 3
    except (ValueError, TypeError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    config.setdefault("seed", args.seed)
    config["threads"] = args.threads
    report = {
        "command": args.command,
        "version": __version__,
        "backend": backend_name(),
        "config": config,
        "results": results,
    }
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(f"elapsed {time.perf_counter() - started:.3f}s", file=sys.stderr)
    return rc


if __name__ == "__main__":
    sys.exit(main())
