"""Iterative interference minimisation.

Start from the empty edge set. Each round turns the cross-component edges
into a weighted cover instance (component labels must be covered, every node
carries the interference the edge would add), solves it, and adds the
selected edges. Every component merges with at least one other per round,
so the number of rounds is logarithmic in n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .graph import ComponentSet, Edge, NetworkGraph, build_graph, components, cross_edges
from .model import (
    Instance,
    InterferenceReport,
    PowerAssignment,
    _strength,
    interference,
    min_power,
    power_assignment_from_edges,
)
from .wmpmpsc import Cover, CoverSet, RoundingParams, WmpmpscInstance, solve_wmpmpsc


class DisconnectedError(ValueError):
    """The feasibility graph itself is disconnected, so no power assignment connects the network."""

    def __init__(self, groups: List[List[int]]):
        self.groups = groups
        super().__init__(f"feasibility graph has {len(groups)} components: {groups}")


class InvariantError(RuntimeError):
    pass


@dataclass(frozen=True)
class CoverMapping:
    wmpmpsc: WmpmpscInstance
    edge_of_set: Tuple[Edge, ...]
    w_max: float
    labels: Tuple[int, ...]
    raw_weights: np.ndarray = field(repr=False, compare=False)


@dataclass(frozen=True)
class IterationLog:
    l: int
    components_before: int
    components_after: int
    h_size: int
    z_prime: float
    sets_chosen: int
    normalized_max_weight: float
    raw_max_weight: float
    w_max: float
    bound: float
    initial_estimator: float
    estimator_trace: Tuple[float, ...] = field(default=(), repr=False)
    chosen_edges: Tuple[Edge, ...] = ()


@dataclass(frozen=True)
class Solution:
    edges: Tuple[Edge, ...]
    powers: PowerAssignment
    report: InterferenceReport
    logs: Tuple[IterationLog, ...] = ()
    opt_hint: Optional[float] = None

    @property
    def iterations(self) -> int:
        return len(self.logs)


def link_weights(instance: Instance, u: int, v: int) -> np.ndarray:
    """Interference each node picks up if (u, v) becomes a link run at minimum powers.

    A node's own transmission never counts towards its own interference.
    """
    n = instance.n
    xi_uv = min_power(instance, u, v)
    xi_vu = min_power(instance, v, u)
    w = np.zeros(n)
    for t in range(n):
        if t != u:
            w[t] += _strength(instance, u, t, xi_uv)
        if t != v:
            w[t] += _strength(instance, v, t, xi_vu)
    return w


def build_cover_instance(
    instance: Instance, graph: NetworkGraph, comps: ComponentSet, used_edges: Sequence[Edge] = ()
) -> CoverMapping:
    labels = comps.labels()
    h = cross_edges(graph, comps, used_edges)
    if not h:
        if len(labels) >= 2:
            raise DisconnectedError(comps.groups())
        raise ValueError("network is already connected; nothing to cover")
    index = {lab: i for i, lab in enumerate(labels)}
    raw = np.array([link_weights(instance, u, v) for u, v in h])
    w_max = float(raw.max())
    norm = raw / w_max if w_max > 0 else raw
    norm = np.clip(norm, 0.0, 1.0)
    sets = []
    for k, (u, v) in enumerate(h):
        covers = frozenset((index[comps.root(u)], index[comps.root(v)]))
        weights = {t: float(norm[k, t]) for t in range(instance.n) if norm[k, t] > 0}
        sets.append(CoverSet(covers=covers, weights=weights))
    inst = WmpmpscInstance(s1_count=len(labels), s2_count=instance.n, sets=tuple(sets))
    return CoverMapping(wmpmpsc=inst, edge_of_set=tuple(h), w_max=w_max, labels=tuple(labels), raw_weights=raw)


def minimize_interference(instance: Instance, solver=solve_wmpmpsc) -> Solution:
    """Connected topology with approximately minimal maximum interference.

    ``solver`` maps a WmpmpscInstance to a Cover; the default is the
    deterministic LP + derandomized rounding.
    """
    n = instance.n
    graph = build_graph(instance)
    full = components(n, graph.edges)
    if full.count > 1:
        raise DisconnectedError(full.groups())

    cap = 2 * math.ceil(math.log2(n)) if n > 1 else 0
    used: List[Edge] = []
    logs: List[IterationLog] = []
    comps = components(n, used)
    while comps.count > 1:
        if len(logs) >= cap:
            raise InvariantError(f"more than {cap} iterations for n={n}; component halving failed")
        before = comps.count
        mapping = build_cover_instance(instance, graph, comps, used)
        cover = solver(mapping.wmpmpsc)
        new_edges = [mapping.edge_of_set[j] for j in cover.chosen]
        used.extend(new_edges)
        comps = components(n, used)
        logs.append(
            IterationLog(
                l=len(logs) + 1,
                components_before=before,
                components_after=comps.count,
                h_size=mapping.wmpmpsc.m,
                z_prime=cover.lp_value,
                sets_chosen=len(cover.chosen),
                normalized_max_weight=cover.max_weight,
                raw_max_weight=cover.max_weight * mapping.w_max,
                w_max=mapping.w_max,
                bound=cover.bound,
                initial_estimator=cover.estimator_trace[0] if cover.estimator_trace else float("nan"),
                estimator_trace=cover.estimator_trace,
                chosen_edges=tuple(new_edges),
            )
        )

    edges = tuple(sorted(used))
    powers = power_assignment_from_edges(instance, edges)
    return Solution(edges=edges, powers=powers, report=interference(instance, powers), logs=tuple(logs))


def interference_accounting(
    logs: Sequence[IterationLog], final_max: Optional[float] = None
) -> Tuple[List[float], float]:
    """Per-iteration raw maximum added weight and their sum.

    The sum upper-bounds the true final I(V): a node's real power is the max
    over its links, while the cover weights add them. Pass ``final_max`` to
    have that checked.
    """
    per_iter = [lg.raw_max_weight for lg in logs]
    total = float(sum(per_iter))
    if final_max is not None and final_max > total + 1e-6 * max(1.0, total):
        raise InvariantError(f"final interference {final_max} exceeds accumulated bound {total}")
    return per_iter, total
