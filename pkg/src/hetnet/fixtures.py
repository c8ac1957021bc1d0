"""Bundled example networks (the JSON files under ``hetnet/data``)."""
from __future__ import annotations

from importlib import resources

from .io import load_json, parse_graph_and_leaders, parse_network

NAMES = ("example4", "uncontrollable_agent", "uncontrollable_path", "highorder5", "star4")


def path(name: str):
    if name not in NAMES:
        raise KeyError(f"unknown fixture {name!r}; choose from {NAMES}")
    return resources.files("hetnet") / "data" / f"{name}.json"


def load(name: str):
    """Parsed network, or ``(graph, leaders)`` for bare graph files."""
    obj = load_json(path(name))
    if "type" in obj:
        return parse_network(obj)
    return parse_graph_and_leaders(obj)
