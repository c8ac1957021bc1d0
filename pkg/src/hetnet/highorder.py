"""Networks of ``m``-th order integrator agents with one topology per order.

Agent ``i`` runs ``x_i^(m)' = u_i`` with the consensus protocol
``u_i = sum_l k_l sum_j a_ij^(l) (x_j^(l) - x_i^(l)) + u_oi``. Stacking the
states order by order gives ``x' = Q x + (e_m kron B) u_o`` with

    Q = S kron I_n - sum_l (e_m e_l^T) kron (k_l L_l),

``S`` the ``m x m`` upshift. The network is controllable for some gains iff
the first-order graph is leader-follower connected and some combination
``sum_l c_l L_l`` is controllable with the leader inputs.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ctrb import DEFAULT_TOL, ToleranceConfig, pbh_test
from .errors import DimensionMismatch, MissingGains
from .graph import (WeightedGraph, input_matrix, is_leader_follower_connected,
                    laplacian, leader_set, leaderless_components, union_graph)
from .network import CONTROLLABLE, INCONCLUSIVE, UNCONTROLLABLE, CompactSystem, Verdict

__all__ = [
    "HighOrderNetwork",
    "assemble_high_order",
    "check_theorem_high",
    "union_graph_screen",
    "direct_check_high",
    "SUFFICIENT_PASS",
    "NECESSARY_FAIL",
    "NEITHER",
]

SUFFICIENT_PASS = "SufficientPass"
NECESSARY_FAIL = "NecessaryFail"
NEITHER = "Neither"

DEFAULT_TRIALS = 16
_MIN_COEFF_NORM = 1e-3


@dataclass(frozen=True)
class HighOrderNetwork:
    """``graphs[l]`` carries the ``(l+1)``-th order information."""

    graphs: tuple
    leaders: tuple
    gains: tuple | None = None

    def __post_init__(self):
        graphs = tuple(self.graphs)
        if not graphs:
            raise DimensionMismatch("at least one order is required")
        n = graphs[0].n
        for g in graphs:
            if not isinstance(g, WeightedGraph):
                raise TypeError("graphs must be WeightedGraph instances")
            if g.n != n:
                raise DimensionMismatch(f"graphs have {n} and {g.n} nodes")
        object.__setattr__(self, "graphs", graphs)
        object.__setattr__(self, "leaders", leader_set(self.leaders, n))
        if self.gains is not None:
            gains = tuple(float(k) for k in self.gains)
            if len(gains) != len(graphs):
                raise DimensionMismatch(f"{len(gains)} gains for {len(graphs)} orders")
            object.__setattr__(self, "gains", gains)

    @property
    def m(self) -> int:
        return len(self.graphs)

    @property
    def n(self) -> int:
        return self.graphs[0].n

    def laplacians(self) -> list:
        return [laplacian(g) for g in self.graphs]

    def input_matrix(self) -> np.ndarray:
        return input_matrix(self.leaders, self.n)

    def to_json(self) -> dict:
        out = {"type": "high-order", "m": self.m, "n": self.n,
               "graphs": [g.to_json() for g in self.graphs],
               "leaders": list(self.leaders)}
        if self.gains is not None:
            out["gains"] = list(self.gains)
        return out


def assemble_high_order(net: HighOrderNetwork) -> CompactSystem:
    """Closed-loop compact pair with order-major state ordering."""
    if net.gains is None:
        raise MissingGains("feedback gains k_1..k_m are required")
    m, n = net.m, net.n
    Q = np.kron(np.eye(m, k=1), np.eye(n))
    for l, (k, L) in enumerate(zip(net.gains, net.laplacians())):
        Q[(m - 1) * n:, l * n:(l + 1) * n] -= k * L
    Bmat = np.kron(np.eye(m)[:, [-1]], net.input_matrix())
    layout = [(i + 1, l + 1) for l in range(m) for i in range(n)]
    return CompactSystem(Q, Bmat, layout, meta={"model": "high-order", "m": m, "n": n})


def direct_check_high(net: HighOrderNetwork, cfg: ToleranceConfig = DEFAULT_TOL) -> bool:
    """PBH test on the assembled closed loop for the network's own gains."""
    sys = assemble_high_order(net)
    return pbh_test(sys.Amat, sys.Bmat, cfg)[0]


def union_graph_screen(net: HighOrderNetwork, cfg: ToleranceConfig = DEFAULT_TOL) -> str:
    """Cheap screen through the union graph.

    ``NecessaryFail`` when the union or first-order graph leaves a component
    without a leader, ``SufficientPass`` when the union graph is controllable
    and the first-order graph is leader-follower connected, else ``Neither``.
    """
    union = union_graph(net.graphs)
    if not (is_leader_follower_connected(union, net.leaders)
            and is_leader_follower_connected(net.graphs[0], net.leaders)):
        return NECESSARY_FAIL
    if pbh_test(laplacian(union), net.input_matrix(), cfg)[0]:
        return SUFFICIENT_PASS
    return NEITHER


def _draw_coefficients(m, seed, trial):
    rng = np.random.default_rng([seed, trial])
    while True:
        c = rng.uniform(-1.0, 1.0, size=m)
        if np.max(np.abs(c)) >= _MIN_COEFF_NORM:
            return c


def check_theorem_high(net: HighOrderNetwork, trials: int = DEFAULT_TRIALS, seed: int = 0,
                       cfg: ToleranceConfig = DEFAULT_TOL) -> Verdict:
    """Decide controllability of a high-order network.

    The leader-follower conditions are exact. The existence of a
    controllable combination ``sum_l c_l L_l`` is decided by sampling:
    ``c = 1`` first, then ``trials`` seeded draws from ``[-1, 1]^m``. The
    controllable set of coefficients is either empty or of full measure,
    so exhaustion yields ``Inconclusive`` rather than a negative answer.
    """
    first = leaderless_components(net.graphs[0], net.leaders)
    if first:
        return Verdict(UNCONTROLLABLE, certificate={
            "reason": "NotLeaderFollowerConnected", "graph": 1,
            "components": [sorted(c) for c in first]})
    union = union_graph(net.graphs)
    loose = leaderless_components(union, net.leaders)
    if loose:
        return Verdict(UNCONTROLLABLE, certificate={
            "reason": "UnionGraphDisconnected",
            "components": [sorted(c) for c in loose]})

    Ls = net.laplacians()
    B = net.input_matrix()
    failures = []
    draws = [np.ones(net.m)] + [_draw_coefficients(net.m, seed, t) for t in range(trials)]
    for used, c in enumerate(draws, start=1):
        Lc = sum(ck * L for ck, L in zip(c, Ls))
        ok, cert = pbh_test(Lc, B, cfg)
        if ok:
            diagnostics = {"union_screen": union_graph_screen(net, cfg)}
            if net.gains is not None:
                diagnostics["direct_pbh"] = direct_check_high(net, cfg)
            return Verdict(CONTROLLABLE, witness={"coefficients": [float(x) for x in c]},
                           trials_used=used, diagnostics=diagnostics)
        failures.append({"coefficients": [float(x) for x in c],
                         "eigenvalue": float(np.real(cert[0]))})
    return Verdict(INCONCLUSIVE, trials_used=len(draws),
                   diagnostics={"failed_draws": failures,
                                "union_screen": union_graph_screen(net, cfg)})
