"""Feasible-link graph, union-find components and cross-component edges."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Sequence, Tuple

from .model import Instance, UnreachableError, min_power, normalize_edge

Edge = Tuple[int, int]


@dataclass(frozen=True)
class NetworkGraph:
    n: int
    edges: FrozenSet[Edge]

    def sorted_edges(self) -> List[Edge]:
        return sorted(self.edges)


class ComponentSet:
    """Union-find with path compression and union by rank.

    ``root`` reports the smallest node id of a component, so labels do not
    depend on the order unions happened in.
    """

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.rank = [0] * n
        self._smallest = list(range(n))
        self.count = n

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1
        self._smallest[ra] = min(self._smallest[ra], self._smallest[rb])
        self.count -= 1
        return True

    def root(self, x: int) -> int:
        return self._smallest[self.find(x)]

    def connected(self, a: int, b: int) -> bool:
        return self.find(a) == self.find(b)

    def labels(self) -> List[int]:
        """Sorted component labels (smallest member id of each component)."""
        return sorted({self.root(x) for x in range(len(self.parent))})

    def groups(self) -> List[List[int]]:
        out: Dict[int, List[int]] = {}
        for x in range(len(self.parent)):
            out.setdefault(self.root(x), []).append(x)
        return [out[k] for k in sorted(out)]


def build_graph(instance: Instance) -> NetworkGraph:
    """Pairs that hear each other at the acceptance threshold when both use maximum power."""
    n = instance.n
    edges = set()
    for u in range(n):
        for v in range(u + 1, n):
            try:
                min_power(instance, u, v)
                min_power(instance, v, u)
            except UnreachableError:
                continue
            edges.add((u, v))
    return NetworkGraph(n=n, edges=frozenset(edges))


def components(n: int, edges: Iterable[Sequence[int]]) -> ComponentSet:
    comps = ComponentSet(n)
    for u, v in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
        comps.union(u, v)
    return comps


def cross_edges(graph: NetworkGraph, comps: ComponentSet, used: Iterable[Sequence[int]] = ()) -> List[Edge]:
    """Unused graph edges whose endpoints lie in different components, sorted."""
    used_set = {normalize_edge(u, v) for u, v in used}
    return [e for e in graph.sorted_edges() if e not in used_set and not comps.connected(*e)]


def is_connected(n: int, edges: Iterable[Sequence[int]]) -> bool:
    return components(n, edges).count <= 1
