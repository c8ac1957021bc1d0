"""Controllability analysis of heterogeneous multi-agent networks."""

__version__ = "0.1.0"

from .ctrb import (DEFAULT_TOL, KalmanDecomposition, ToleranceConfig, UncontrollableBasis,
                   controllability_matrix, is_xi_uncontrollable, kalman_decomposition,
                   kalman_test, left_eigenpairs, numerical_rank, pbh_test,
                   to_controllable_canonical, uncontrollable_basis)
from .errors import *  # noqa: F401,F403
from .graph import (WeightedGraph, connected_components, input_matrix,
                    is_leader_follower_connected, laplacian, leader_set, union_graph)
from .hetero import (FirstEntryK, HeteroNetwork, LinearAgent, UniformFirstEntry,
                     assemble_hetero, assemble_hetero_decomposed, check_theorem4,
                     check_theorem_heter, design_beta, search_gain_K, with_drift)
from .highorder import (HighOrderNetwork, assemble_high_order, check_theorem_high,
                        direct_check_high, union_graph_screen)
from .network import CompactSystem, Verdict
from .steering import (PiecewiseConstant, SteeringProblem, SteeringResult, gramian,
                       gramian_is_definite, matrix_exponential, min_energy_steer)
