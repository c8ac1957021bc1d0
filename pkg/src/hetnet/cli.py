"""Command-line front end.

    hetnet analyze   network.json [--certify] [--out report.json]
    hetnet gains     network.json [--strategy first-entry-k|uniform] [--seed S]
    hetnet steer     network.json [--target random|JSON] [--t0 0 --tf 2] [--out-csv t.csv]
    hetnet decompose network.json [--agent i|all]

Exit codes: 0 controllable / success, 1 uncontrollable (or no gain, or a
singular Gramian), 2 inconclusive, 64 unparsable input, 65 inconsistent
dimensions, 70 eigenvalue failure.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import time
from contextlib import contextmanager

import numpy as np

from . import __version__
from .ctrb import (ToleranceConfig, kalman_decomposition, kalman_test, pbh_test,
                   uncontrollable_basis)
from .errors import (DimensionMismatch, EigenFailure, GramianSingular, HetnetError,
                     LBNotControllable, MissingGains, NoGainExists, ParseError,
                     SearchExhausted)
from .graph import is_leader_follower_connected, input_matrix, laplacian, union_graph
from .hetero import (FirstEntryK, HeteroNetwork, UniformFirstEntry, assemble_hetero_decomposed,
                     check_theorem4, check_theorem_heter, design_beta, search_gain_K)
from .highorder import (HighOrderNetwork, assemble_high_order, check_theorem_high,
                        union_graph_screen)
from .io import dumps, load_json, parse_graph_and_leaders, parse_network
from .network import CONTROLLABLE, INCONCLUSIVE, UNCONTROLLABLE
from .steering import SteeringProblem, min_energy_steer

EXIT_CODES = {CONTROLLABLE: 0, UNCONTROLLABLE: 1, INCONCLUSIVE: 2}
EXIT_PARSE, EXIT_DIM, EXIT_EIG, EXIT_OTHER = 64, 65, 70, 3


class _Timer:
    def __init__(self):
        self.ms = {}

    @contextmanager
    def stage(self, name):
        start = time.perf_counter()
        try:
            yield
        finally:
            self.ms[name] = round(1000 * (time.perf_counter() - start), 3)


def _cfg(args) -> ToleranceConfig:
    return ToleranceConfig(args.tol_rank_factor, args.tol_eig_cluster, args.tol_residual)


def _default_seed():
    raw = os.environ.get("HETNET_SEED")
    try:
        return int(raw) if raw is not None else 0
    except ValueError:
        return 0


def _emit(report, out):
    text = dumps(report) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _closed_loop(net, cfg, seed):
    """Compact system for steering, filling in default gains when absent."""
    if isinstance(net, HighOrderNetwork):
        source = "given"
        if net.gains is None:
            net = dataclasses.replace(net, gains=(1.0,) * net.m)
            source = "default"
        return assemble_high_order(net), {"gains": list(net.gains), "gains_source": source}
    source = "given"
    if net.betas is None:
        try:
            betas = design_beta(net, FirstEntryK(seed=seed), cfg)
        except HetnetError:
            betas = [np.eye(a.dim)[0] for a in net.agents]
            source = "default"
        else:
            source = "synthesized"
        net = dataclasses.replace(net, betas=tuple(betas))
    sys_, _ = assemble_hetero_decomposed(net, cfg)
    return sys_, {"betas": [b.tolist() for b in net.betas], "betas_source": source}


def _steer(system, args_target, seed, t0, tf, grid, drift=None, x0=None):
    N = system.N
    if args_target in (None, "random"):
        rng = np.random.default_rng(seed)
        target = rng.standard_normal(N)
        target /= np.linalg.norm(target)
    else:
        try:
            target = np.asarray(json.loads(args_target), dtype=float).reshape(-1)
        except (json.JSONDecodeError, TypeError, ValueError) as exc:
            raise ParseError(f"--target: {exc}") from exc
    x0 = np.zeros(N) if x0 is None else x0
    prob = SteeringProblem(system, x0, target, t0, tf, drift)
    return min_energy_steer(prob, grid), target


def cmd_analyze(args) -> int:
    cfg = _cfg(args)
    timer = _Timer()
    with timer.stage("parse"):
        net = parse_network(load_json(args.file))
    checks = []
    if isinstance(net, HighOrderNetwork):
        with timer.stage("screens"):
            for l, g in enumerate(net.graphs, start=1):
                checks.append({"name": f"leader_follower_graph_{l}",
                               "result": is_leader_follower_connected(g, net.leaders)})
            checks.append({"name": "leader_follower_union",
                           "result": is_leader_follower_connected(union_graph(net.graphs),
                                                                  net.leaders)})
            checks.append({"name": "union_screen", "result": union_graph_screen(net, cfg)})
            B = net.input_matrix()
            for l, L in enumerate(net.laplacians(), start=1):
                checks.append({"name": f"pbh_graph_{l}", "result": pbh_test(L, B, cfg)[0]})
        with timer.stage("decide"):
            verdict = check_theorem_high(net, args.trials, args.seed, cfg)
        model = "high-order"
    else:
        with timer.stage("screens"):
            for i, ag in enumerate(net.agents, start=1):
                rank, ok = kalman_test(ag.A, ag.b, cfg)
                checks.append({"name": f"agent_{i}_kalman", "result": ok, "rank": rank})
            checks.append({"name": "leader_follower",
                           "result": is_leader_follower_connected(net.graph, net.leaders)})
            checks.append({"name": "pbh_L_B",
                           "result": pbh_test(laplacian(net.graph), net.input_matrix(), cfg)[0]})
        with timer.stage("decide"):
            verdict = check_theorem_heter(net, cfg, seed=args.seed)
        if net.betas is not None:
            sys_, _ = assemble_hetero_decomposed(net, cfg)
            rank, ok = kalman_test(sys_.Amat, sys_.Bmat, cfg)
            checks.append({"name": "assembled_kalman", "result": ok, "rank": rank,
                           "state_dim": sys_.N})
        model = "hetero"

    report = {"command": "analyze", "model": model, "file": os.path.basename(args.file),
              "verdict": verdict.to_json(), "checks": checks, "seed": args.seed,
              "tolerances": cfg.to_json(), "version": __version__}
    if args.certify and verdict.status == CONTROLLABLE:
        with timer.stage("certify"):
            if isinstance(net, HeteroNetwork) and net.betas is None:
                net = dataclasses.replace(net, betas=tuple(
                    np.asarray(b) for b in verdict.witness["betas"]))
            system, gains = _closed_loop(net, cfg, args.seed)
            try:
                res, _ = _steer(system, None, args.seed, 0.0, args.tf, args.grid,
                                getattr(net, "drift", None))
                report["steering"] = {**res.summary(), **gains}
            except GramianSingular as exc:
                report["steering"] = {"error": "GramianSingular",
                                         "gramian_condition": exc.condition, **gains}
    report["timing_ms"] = timer.ms
    _emit(report, args.out)
    return EXIT_CODES[verdict.status]


def cmd_gains(args) -> int:
    cfg = _cfg(args)
    obj = load_json(args.file)
    report = {"command": "gains", "seed": args.seed, "strategy": args.strategy,
              "tolerances": cfg.to_json()}
    try:
        if obj.get("type") == "hetero":
            net = parse_network(obj)
            strategy = (UniformFirstEntry(args.q) if args.strategy == "uniform"
                        else FirstEntryK(seed=args.seed, trials=args.trials))
            betas = design_beta(net, strategy, cfg)
            sys_, _ = assemble_hetero_decomposed(dataclasses.replace(net, betas=tuple(betas)), cfg)
            report.update({"betas": [b.tolist() for b in betas],
                           "K": [float(b[0]) for b in betas],
                           "verification": {"pbh": pbh_test(sys_.Amat, sys_.Bmat, cfg)[0],
                                            "kalman_rank": kalman_test(sys_.Amat, sys_.Bmat, cfg)[0],
                                            "state_dim": sys_.N}})
        else:
            g, leaders = parse_graph_and_leaders(obj)
            L = laplacian(g)
            B = input_matrix(leaders, g.n)
            if args.strategy == "uniform":
                if not pbh_test(L, B, cfg)[0]:
                    raise LBNotControllable("(L, B) fails the PBH test")
                k = np.full(g.n, args.q)
            else:
                k = search_gain_K(L, leaders, args.trials, args.seed, cfg)
            report.update({"K": k.tolist(),
                           "verification": {"pbh": pbh_test(L * k, B, cfg)[0]}})
    except NoGainExists as exc:
        report["error"] = {"type": "NoGainExists", "leaderless_component": exc.component}
        _emit(report, args.out)
        return 1
    except (SearchExhausted, LBNotControllable) as exc:
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        _emit(report, args.out)
        return 1
    _emit(report, args.out)
    return 0


def cmd_steer(args) -> int:
    cfg = _cfg(args)
    net = parse_network(load_json(args.file))
    system, gains = _closed_loop(net, cfg, args.seed)
    report = {"command": "steer", "seed": args.seed, **gains}
    try:
        res, target = _steer(system, args.target, args.seed, args.t0, args.tf, args.grid,
                             getattr(net, "drift", None))
    except GramianSingular as exc:
        report["error"] = {"type": "GramianSingular", "gramian_condition": exc.condition}
        _emit(report, args.out)
        return 1
    report.update(res.summary())
    report["target"] = target.tolist()
    if args.out_csv:
        with open(args.out_csv, "w", newline="") as fh:
            res.to_csv(fh)
        report["csv"] = os.path.basename(args.out_csv)
    _emit(report, args.out)
    return 0


def _agent_entry(i, ag, cfg):
    kd = kalman_decomposition(ag.A, ag.b, cfg)
    return {"agent": i, **kd.to_json(), "xi": uncontrollable_basis(ag.A, ag.b, cfg).to_json()}


def cmd_decompose(args) -> int:
    cfg = _cfg(args)
    net = parse_network(load_json(args.file))
    if not isinstance(net, HeteroNetwork):
        raise ParseError("decompose needs a hetero network file")
    report = {"command": "decompose", "tolerances": cfg.to_json()}
    if args.agent == "all":
        report["agents"] = [_agent_entry(i, ag, cfg) for i, ag in enumerate(net.agents, start=1)]
        xi_net, matches, info = check_theorem4(net, cfg, seed=args.seed)
        report["network_xi"] = xi_net.to_json()
        report["embedded_xi"] = [{"agent": e["agent"], "eigenvalue": e["eigenvalue"],
                                  "vector": e["network_vector"]} for e in info["xi_map"]]
        report["match"] = matches
        report["span_residual"] = info["span_residual"]
        report["leader_follower_connected"] = info["leader_follower_connected"]
    else:
        try:
            i = int(args.agent)
        except ValueError as exc:
            raise ParseError(f"--agent must be an index or 'all', got {args.agent!r}") from exc
        if not 1 <= i <= net.n:
            raise DimensionMismatch(f"agent {i} out of range 1..{net.n}")
        report["agents"] = [_agent_entry(i, net.agents[i - 1], cfg)]
    _emit(report, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=_default_seed(),
                        help="random seed (default: $HETNET_SEED or 0)")
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("--tol-rank-factor", type=float, default=100.0)
    common.add_argument("--tol-eig-cluster", type=float, default=1e-8)
    common.add_argument("--tol-residual", type=float, default=1e-8)

    p = argparse.ArgumentParser(prog="hetnet", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", parents=[common], help="decide controllability")
    a.add_argument("file")
    a.add_argument("--trials", type=int, default=16)
    a.add_argument("--certify", action="store_true", help="also run a steering certificate")
    a.add_argument("--tf", type=float, default=2.0)
    a.add_argument("--grid", type=int, default=1000)
    a.set_defaults(func=cmd_analyze)

    g = sub.add_parser("gains", parents=[common], help="synthesize feedback gains")
    g.add_argument("file")
    g.add_argument("--strategy", choices=["first-entry-k", "uniform"], default="first-entry-k")
    g.add_argument("--q", type=float, default=1.0)
    g.add_argument("--trials", type=int, default=64)
    g.set_defaults(func=cmd_gains)

    s = sub.add_parser("steer", parents=[common], help="minimum-energy steering run")
    s.add_argument("file")
    s.add_argument("--target", default="random", help="'random' or a JSON array")
    s.add_argument("--t0", type=float, default=0.0)
    s.add_argument("--tf", type=float, default=2.0)
    s.add_argument("--grid", type=int, default=1000)
    s.add_argument("--out-csv")
    s.set_defaults(func=cmd_steer)

    d = sub.add_parser("decompose", parents=[common], help="Kalman decomposition per agent")
    d.add_argument("file")
    d.add_argument("--agent", default="all")
    d.set_defaults(func=cmd_decompose)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"hetnet: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (DimensionMismatch, MissingGains, ValueError) as exc:
        print(f"hetnet: {exc}", file=sys.stderr)
        return EXIT_DIM
    except EigenFailure as exc:
        print(f"hetnet: eigenvalue computation failed: {exc}", file=sys.stderr)
        return EXIT_EIG
    except HetnetError as exc:
        print(f"hetnet: {exc}", file=sys.stderr)
        return EXIT_OTHER


if __name__ == "__main__":
    sys.exit(main())
