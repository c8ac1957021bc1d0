"""How the bundled five-agent, third-order fixture was found.

We want three graphs on five nodes, one per derivative order, such that
no single graph is controllable from node 1, yet the first one is
leader-follower connected and their union is controllable. The seeded
search below stops at the first hit; it is the ``highorder5`` fixture.
"""
import itertools
import time

import numpy as np

from hetnet import (HighOrderNetwork, WeightedGraph, check_theorem_high, direct_check_high,
                    is_leader_follower_connected, laplacian, pbh_test, union_graph,
                    union_graph_screen)
from hetnet import fixtures
from hetnet.graph import input_matrix

pairs = list(itertools.combinations(range(1, 6), 2))
B = input_matrix([1], 5)
rng = np.random.default_rng(2024)

start = time.perf_counter()
for trial in range(20000):
    graphs = []
    for _ in range(3):
        mask = rng.random(len(pairs)) < 0.35
        graphs.append(WeightedGraph(5, tuple(p for p, keep in zip(pairs, mask) if keep)))
    if min(len(g.edges) for g in graphs) < 2:
        continue
    if not is_leader_follower_connected(graphs[0], [1]):
        continue
    if any(pbh_test(laplacian(g), B)[0] for g in graphs):
        continue
    if not pbh_test(laplacian(union_graph(graphs)), B)[0]:
        continue
    net = HighOrderNetwork(tuple(graphs), (1,), (1.0, 1.0, 1.0))
    if direct_check_high(net):
        break
print(f"hit at trial {trial} after {time.perf_counter() - start:.2f} s")
for l, g in enumerate(graphs, start=1):
    print(f"  order {l}: {[e[:2] for e in g.edges]}")

frozen = fixtures.load("highorder5")
print("same as the bundled fixture:", frozen.graphs == net.graphs)

print("union screen:", union_graph_screen(net))
v = check_theorem_high(net, trials=16, seed=0)
print("verdict:", v.status, "with coefficients", v.witness["coefficients"])

# with every order on the same star graph no combination can help
star = WeightedGraph(5, ((1, 2), (1, 3), (1, 4), (1, 5)))
v = check_theorem_high(HighOrderNetwork((star,) * 3, (1,)), trials=16)
print("all orders on a star:", v.status, f"after {v.trials_used} draws")
