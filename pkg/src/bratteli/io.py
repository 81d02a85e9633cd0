"""Interchange formats: graph/equipment JSON and CSV table writers.

Graph schema (version 1)::

    {
      "format": "bratteli-graph",
      "version": 1,
      "level_sizes": [1, 2, 3, ...],
      "edges": [[n, u, v], ...],                 # u at level n, v at n+1
      "lambda": [[n, u, v, num, den], ...],      # rational weights, or
                 [[n, u, v, w], ...],            # float weights
      "equipment": "central" | "table" | null,
      "labels": {"n,i": <json>, ...}             # optional
    }

Edges are sorted by (n, v, u), matching the internal predecessor order.
Rational weights round-trip losslessly (JSON integers are unbounded);
``"equipment": "central"`` stores no table at all, since the weights are
recomputable from the graph.  Everything is written with sorted keys so
identical inputs produce byte-identical files.
"""

from __future__ import annotations

import csv
import json
from fractions import Fraction

import numpy as np

from .equipment import CentralEquipment, TableEquipment, central_equipment
from .graph import GradedGraph
from .measures import LevelMeasure

__all__ = [
    "graph_from_dict",
    "graph_to_dict",
    "load_graph",
    "load_measure",
    "measure_to_dict",
    "save_graph",
    "save_measure",
    "write_csv",
]

FORMAT_NAME = "bratteli-graph"
FORMAT_VERSION = 1


def graph_to_dict(
    g: GradedGraph, equipment=None
) -> dict:
    """JSON-ready mapping for a graph and (optionally) its equipment."""
    edges = []
    for n in range(1, g.depth):
        indptr, indices = g.pred_block(n)
        for v in range(g.level_size(n)):
            for e in range(indptr[v], indptr[v + 1]):
                edges.append([n - 1, int(indices[e]), v])
    out = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "level_sizes": list(g.level_sizes),
        "edges": edges,
        "equipment": None,
    }
    if g.labels is not None:
        out["labels"] = {
            f"{n},{i}": _jsonable_label(lab) for (n, i), lab in sorted(g.labels.items())
        }
    if isinstance(equipment, CentralEquipment):
        out["equipment"] = "central"
    elif isinstance(equipment, TableEquipment):
        out["equipment"] = "table"
        lam = []
        for n in range(1, g.depth):
            indptr, indices = g.pred_block(n)
            for v in range(g.level_size(n)):
                for e in range(indptr[v], indptr[v + 1]):
                    u = int(indices[e])
                    w = equipment.weight(n - 1, u, v)
                    if isinstance(w, Fraction):
                        lam.append([n - 1, u, v, w.numerator, w.denominator])
                    else:
                        lam.append([n - 1, u, v, float(w)])
        out["lambda"] = lam
    elif equipment is not None:
        raise TypeError(f"cannot serialize equipment of type {type(equipment).__name__}")
    return out


def _jsonable_label(lab):
    if isinstance(lab, tuple):
        return [_jsonable_label(x) for x in lab]
    return lab


def _label_from_json(lab):
    if isinstance(lab, list):
        return tuple(_label_from_json(x) for x in lab)
    return lab


def graph_from_dict(data: dict):
    """Inverse of :func:`graph_to_dict`; returns (graph, equipment or None)."""
    if data.get("format") != FORMAT_NAME:
        raise ValueError("not a graph interchange file")
    if data.get("version") != FORMAT_VERSION:
        raise ValueError(f"unsupported format version {data.get('version')!r}")
    labels = None
    if "labels" in data:
        labels = {}
        for key, lab in data["labels"].items():
            n, i = key.split(",")
            labels[(int(n), int(i))] = _label_from_json(lab)
    g = GradedGraph.from_edges(
        data["level_sizes"],
        [tuple(e) for e in data["edges"]],
        labels=labels,
    )
    kind = data.get("equipment")
    if kind is None:
        return g, None
    if kind == "central":
        return g, central_equipment(g)
    if kind != "table":
        raise ValueError(f"unknown equipment kind {kind!r}")
    lam = data["lambda"]
    exact = all(len(row) == 5 for row in lam)
    if not exact and any(len(row) == 5 for row in lam):
        raise ValueError("mixed rational and float weights")
    weights = {}
    for row in lam:
        if exact:
            n, u, v, num, den = row
            weights[(n, u, v)] = Fraction(num, den)
        else:
            n, u, v, w = row
            weights[(n, u, v)] = float(w)
    return g, TableEquipment.from_map(g, weights, exact=exact)


def save_graph(path, g: GradedGraph, equipment=None) -> None:
    data = graph_to_dict(g, equipment)
    with open(path, "w") as fh:
        json.dump(data, fh, sort_keys=True, indent=2)
        fh.write("\n")


def load_graph(path):
    """Load (graph, equipment or None) from a JSON interchange file."""
    with open(path) as fh:
        return graph_from_dict(json.load(fh))


def measure_to_dict(mu: LevelMeasure) -> dict:
    if mu.is_exact:
        weights = [str(w) for w in mu.weights]
    else:
        weights = [float(w) for w in mu.weights]
    return {"level": mu.level, "weights": weights}


def save_measure(path, mu: LevelMeasure) -> None:
    with open(path, "w") as fh:
        json.dump(measure_to_dict(mu), fh, sort_keys=True, indent=2)
        fh.write("\n")


def load_measure(path) -> LevelMeasure:
    with open(path) as fh:
        data = json.load(fh)
    level = int(data["level"])
    raw = data["weights"]
    if any(isinstance(w, str) for w in raw):
        return LevelMeasure(level, [Fraction(w) for w in raw])
    return LevelMeasure(level, np.asarray(raw, dtype=np.float64), exact=False)


def write_csv(path, header, rows) -> None:
    """Plain CSV with one header row; values are written as given (use
    strings for rationals)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow(row)
