"""Interference-minimising power assignment for wireless networks under a
physical signal model."""

from .graph import ComponentSet, NetworkGraph, build_graph, components, cross_edges
from .minimizer import (
    DisconnectedError,
    Solution,
    build_cover_instance,
    interference_accounting,
    minimize_interference,
)
from .model import (
    ExplicitGain,
    Instance,
    InterferenceReport,
    Node,
    PathLoss,
    PowerAssignment,
    UnitDisk,
    UnreachableError,
    interference,
    min_power,
    power_assignment_from_edges,
    signal_strength,
)
from .oracle import (
    brute_force_opt,
    gen_exponential_chain,
    gen_random_geometric,
    nearest_neighbor_baseline,
)
from .wmpmpsc import Cover, CoverSet, WmpmpscInstance, derandomize, estimator_P, solve_wmpmpsc

__version__ = "0.1.0"
