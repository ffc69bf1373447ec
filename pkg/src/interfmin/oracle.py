"""Ground truth and comparison points: exhaustive optimum, a nearest-neighbour
baseline, and instance generators."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .graph import Edge, build_graph, components
from .minimizer import DisconnectedError, Solution
from .model import (
    ExplicitGain,
    Instance,
    ModelError,
    Node,
    PathLoss,
    UnitDisk,
    _strength,
    interference,
    min_power,
    power_assignment_from_edges,
)

DEFAULT_LIMIT = 16
MAX_CHAIN = 40
TIE_TOL = 1e-9


class TooLargeError(ValueError):
    pass


@dataclass(frozen=True)
class OracleResult:
    opt: float
    best_edges: Tuple[Edge, ...]
    explored: int

    @property
    def feasible(self) -> bool:
        return math.isfinite(self.opt)


def brute_force_opt(instance: Instance, limit: int = DEFAULT_LIMIT) -> OracleResult:
    """Exact minimum of I(V) over every connected spanning edge subset.

    Vectorised over all 2**|E| subsets at once. Returns ``opt = inf`` with no
    edges when the feasibility graph is disconnected.
    """
    n = instance.n
    edges = build_graph(instance).sorted_edges()
    ne = len(edges)
    if ne > limit:
        raise TooLargeError(f"{ne} feasible edges exceed the enumeration limit of {limit}")
    if n == 1:
        return OracleResult(opt=0.0, best_edges=(), explored=1)

    masks = np.arange(1 << ne, dtype=np.int64)
    bits = ((masks[:, None] >> np.arange(ne)) & 1).astype(bool)

    # connectivity by min-label propagation, all subsets in parallel
    lab = np.tile(np.arange(n), (len(masks), 1))
    for _ in range(n - 1):
        changed = False
        for e, (u, v) in enumerate(edges):
            on = bits[:, e]
            low = np.minimum(lab[:, u], lab[:, v])
            new_u = np.where(on, low, lab[:, u])
            new_v = np.where(on, low, lab[:, v])
            if not changed:
                changed = bool(np.any(new_u != lab[:, u]) or np.any(new_v != lab[:, v]))
            lab[:, u], lab[:, v] = new_u, new_v
        if not changed:
            break
    connected = np.all(lab == 0, axis=1)
    if not connected.any():
        return OracleResult(opt=math.inf, best_edges=(), explored=len(masks))

    # a node's power is its largest per-link minimum power; interference is
    # the sum of the corresponding strength vectors
    total = np.zeros((len(masks), n))
    for u in range(n):
        inc = [(e, v if a == u else a) for e, (a, v) in enumerate(edges) if u in (a, v)]
        if not inc:
            continue
        need = np.array([min_power(instance, u, w) for _, w in inc])
        strength = np.array(
            [[_strength(instance, u, t, p) if t != u else 0.0 for t in range(n)] for p in need]
        )
        cols = bits[:, [e for e, _ in inc]]
        masked = np.where(cols, need[None, :], -1.0)
        pick = masked.argmax(axis=1)
        active = masked.max(axis=1) >= 0
        total += np.where(active[:, None], strength[pick], 0.0)
    worst = total.max(axis=1)
    worst = np.where(connected, worst, np.inf)
    best = int(np.argmin(worst))
    chosen = tuple(edges[e] for e in range(ne) if bits[best, e])
    # recompute through the public path so opt agrees with interference() exactly
    opt = interference(instance, power_assignment_from_edges(instance, chosen)).max
    return OracleResult(opt=opt, best_edges=chosen, explored=len(masks))


def _cheapest(items):
    """Key of the smallest cost; costs equal up to round-off tie, lowest key wins."""
    low = min(c for c, _ in items)
    return min(k for c, k in items if c <= low + TIE_TOL * max(1.0, abs(low)))


def _link_cost(instance: Instance, u: int, v: int) -> float:
    return max(min_power(instance, u, v), min_power(instance, v, u))


def nearest_neighbor_baseline(instance: Instance) -> Solution:
    """Every node links to its cheapest feasible neighbour, then the cheapest
    cross-component links are added until the network is connected.

    Comparison point only; ties go to the lowest id.
    """
    n = instance.n
    graph = build_graph(instance)
    full = components(n, graph.edges)
    if full.count > 1:
        raise DisconnectedError(full.groups())
    adj: List[List[int]] = [[] for _ in range(n)]
    for u, v in graph.sorted_edges():
        adj[u].append(v)
        adj[v].append(u)
    chosen = set()
    for u in range(n):
        if adj[u]:
            v = _cheapest([(min_power(instance, u, w), w) for w in adj[u]])
            chosen.add((min(u, v), max(u, v)))
    comps = components(n, chosen)
    while comps.count > 1:
        cands = [(_link_cost(instance, *e), e) for e in graph.sorted_edges() if not comps.connected(*e)]
        e = _cheapest(cands)
        chosen.add(e)
        comps.union(*e)
    edges = tuple(sorted(chosen))
    powers = power_assignment_from_edges(instance, edges)
    return Solution(edges=edges, powers=powers, report=interference(instance, powers))


def chain_positions(n: int) -> List[float]:
    if n < 1:
        raise ModelError("chain needs n >= 1")
    if n > MAX_CHAIN:
        raise ModelError(f"exponential chain limited to n <= {MAX_CHAIN}")
    return [float(2**i - 1) for i in range(n)]


def gen_exponential_chain(n: int, beta_acc: float = 1.0, alpha: float = 2.0) -> Instance:
    """Nodes on a line with gaps 1, 2, 4, ...; every pair is mutually reachable."""
    pos = chain_positions(n)
    span = max(pos[-1], 1.0)
    xi_max = 2.0 * beta_acc * span**alpha
    nodes = tuple(Node(id=i, xi_max=xi_max, position=(p,)) for i, p in enumerate(pos))
    return Instance(nodes=nodes, signal=PathLoss(alpha=alpha), beta_acc=beta_acc)


def gen_random_geometric(
    n: int,
    seed: int,
    side: float = 10.0,
    alpha: float = 2.0,
    beta_acc: float = 1.0,
    xi_max: Optional[float] = None,
    model: str = "pathloss",
) -> Instance:
    """``n`` points uniform in the square [0, side]^2 from a seeded PCG64 stream.

    Coincident draws are redrawn. ``xi_max`` defaults to a value that makes
    the feasibility graph complete.
    """
    if n < 1:
        raise ModelError("need n >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    pts: List[Tuple[float, float]] = []
    while len(pts) < n:
        p = tuple(float(c) for c in rng.uniform(0.0, side, size=2))
        if p in pts:
            continue
        pts.append(p)
    if xi_max is None:
        xi_max = beta_acc * (side * math.sqrt(2.0)) ** (alpha if model == "pathloss" else 2.0) * 1.01
    signal = PathLoss(alpha=alpha) if model == "pathloss" else UnitDisk()
    nodes = tuple(Node(id=i, xi_max=xi_max, position=p) for i, p in enumerate(pts))
    return Instance(nodes=nodes, signal=signal, beta_acc=beta_acc)


def gen_uniform_gain(n: int, gain: float = 1.0, beta_acc: float = 1.0, xi_max: float = 1.0) -> Instance:
    """Every ordered pair has the same gain; a dense instance with a large LP value."""
    g = tuple(tuple(0.0 if i == j else gain for j in range(n)) for i in range(n))
    nodes = tuple(Node(id=i, xi_max=xi_max) for i in range(n))
    return Instance(nodes=nodes, signal=ExplicitGain(gain=g), beta_acc=beta_acc)
