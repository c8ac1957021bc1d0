"""A hidden mode inside one agent stays hidden in the network, and only it.

Agent 1 has an uncontrollable mode; agent 2 is a controllable scalar.
While the two are connected and agent 1 leads, the network's uncontrollable
directions are exactly agent 1's hidden mode, lifted into network
coordinates. Cutting the edge strands agent 2 and adds a second one.
"""
import dataclasses

import numpy as np

from hetnet import WeightedGraph, check_theorem4
from hetnet import fixtures

net = fixtures.load("uncontrollable_path")
for label, g in [("connected", net.graph), ("edge removed", WeightedGraph(2, ()))]:
    xi_net, matches, info = check_theorem4(dataclasses.replace(net, graph=g))
    print(f"{label}: network has {info['network_dim']} hidden direction(s), "
          f"agents contribute {info['embedded_dim']}; match={matches}")
    for lam, V in xi_net.groups:
        print(f"    eigenvalue {lam:+.4f}: {np.round(V[:, 0].real, 4)}")
