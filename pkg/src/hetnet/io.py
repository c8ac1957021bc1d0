"""Reading network files and writing JSON-safe reports."""
from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import DimensionMismatch, InvalidGraph, ParseError
from .graph import WeightedGraph, leader_set
from .hetero import HeteroNetwork, LinearAgent
from .highorder import HighOrderNetwork
from .steering import PiecewiseConstant

__all__ = ["parse_graph", "parse_network", "parse_graph_and_leaders", "load_json",
           "load_network", "to_jsonable", "dumps", "report_schema"]


def load_json(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(obj, dict):
        raise ParseError(f"{path}: top level must be an object")
    return obj


def _require(obj, key, where):
    if key not in obj:
        raise ParseError(f"{where}: missing key {key!r}")
    return obj[key]


def _matrix(value, where):
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{where}: not a numeric array") from exc
    return arr


def parse_graph(obj, where="graph") -> WeightedGraph:
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object")
    n = _require(obj, "n", where)
    edges = obj.get("edges", [])
    if not isinstance(n, int) or isinstance(n, bool):
        raise ParseError(f"{where}: n must be an integer")
    if not isinstance(edges, list):
        raise ParseError(f"{where}: edges must be a list")
    try:
        return WeightedGraph(n, tuple(tuple(e) for e in edges))
    except (InvalidGraph, TypeError) as exc:
        raise ParseError(f"{where}: {exc}") from exc


def _leaders(obj, where):
    leaders = _require(obj, "leaders", where)
    if not isinstance(leaders, list) or not all(isinstance(k, int) for k in leaders):
        raise ParseError(f"{where}: leaders must be a list of integers")
    return leaders


def _drift(obj):
    try:
        return PiecewiseConstant(tuple(_require(obj, "breakpoints", "drift")),
                                 _matrix(_require(obj, "values", "drift"), "drift.values"))
    except TypeError as exc:
        raise ParseError(f"drift: {exc}") from exc


def parse_network(obj):
    """Build a network from its JSON object, dispatching on ``"type"``."""
    kind = obj.get("type")
    try:
        if kind == "high-order":
            graphs = [parse_graph(g, f"graphs[{i}]")
                      for i, g in enumerate(_require(obj, "graphs", "network"))]
            if "m" in obj and obj["m"] != len(graphs):
                raise DimensionMismatch(f"m = {obj['m']} but {len(graphs)} graphs given")
            if "n" in obj and graphs and any(g.n != obj["n"] for g in graphs):
                raise DimensionMismatch(f"n = {obj['n']} disagrees with a graph's node count")
            return HighOrderNetwork(tuple(graphs), tuple(_leaders(obj, "network")),
                                    obj.get("gains"))
        if kind == "hetero":
            agents = []
            for i, a in enumerate(_require(obj, "agents", "network")):
                if not isinstance(a, dict):
                    raise ParseError(f"agents[{i}]: expected an object")
                agents.append(LinearAgent(_matrix(_require(a, "A", f"agents[{i}]"), f"agents[{i}].A"),
                                          _matrix(_require(a, "b", f"agents[{i}]"), f"agents[{i}].b")))
            betas = obj.get("betas")
            drift = obj.get("drift")
            return HeteroNetwork(tuple(agents), parse_graph(_require(obj, "graph", "network")),
                                 tuple(_leaders(obj, "network")),
                                 None if betas is None else tuple(
                                     _matrix(b, "betas") for b in betas),
                                 None if drift is None else _drift(drift))
    except InvalidGraph as exc:
        raise ParseError(str(exc)) from exc
    raise ParseError(f"unknown network type {kind!r}; expected 'high-order' or 'hetero'")


def parse_graph_and_leaders(obj):
    """A bare ``{"graph": ..., "leaders": [...]}`` object."""
    try:
        g = parse_graph(_require(obj, "graph", "file"))
        return g, leader_set(_leaders(obj, "file"), g.n)
    except InvalidGraph as exc:
        raise ParseError(str(exc)) from exc


def load_network(path):
    return parse_network(load_json(path))


def to_jsonable(obj):
    """Recursively convert numpy values and complex numbers for ``json``."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        if obj.imag == 0:
            return to_jsonable(obj.real)
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if not np.isfinite(v):
            return str(v)
        return v
    if hasattr(obj, "to_json"):
        return to_jsonable(obj.to_json())
    return obj


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True)


def report_schema() -> dict:
    """The JSON schema every command-line report validates against."""
    return json.loads(resources.files("hetnet").joinpath("report_schema.json").read_text())
