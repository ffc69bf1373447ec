"""Physical-model domain types: nodes, signal strength, power assignments, interference."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np

# absolute tolerance for threshold comparisons
TOL = 1e-9


class ModelError(ValueError):
    """Invalid instance or argument."""


class SelfSignalError(ModelError):
    pass


class PowerDomainError(ModelError):
    pass


class UnreachableError(ModelError):
    """No power in [0, xi_max] lets ``u`` reach ``v`` at the acceptance threshold."""

    def __init__(self, u: int, v: int, message: str = ""):
        self.pair = (u, v)
        super().__init__(message or f"node {u} cannot reach node {v} at maximum power")


@dataclass(frozen=True)
class Node:
    id: int
    xi_max: float
    position: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        if not (self.xi_max > 0 and math.isfinite(self.xi_max)):
            raise ModelError(f"node {self.id}: xi_max must be positive and finite, got {self.xi_max}")
        if self.position is not None:
            object.__setattr__(self, "position", tuple(float(c) for c in self.position))


@dataclass(frozen=True)
class PathLoss:
    """phi_u(v, xi) = xi / d(u, v)**alpha."""

    alpha: float = 2.0

    def __post_init__(self):
        if not 2.0 <= self.alpha <= 6.0:
            raise ModelError(f"path-loss exponent must lie in [2, 6], got {self.alpha}")


@dataclass(frozen=True)
class ExplicitGain:
    """phi_u(v, xi) = xi * gain[u][v]."""

    gain: Tuple[Tuple[float, ...], ...]

    def __post_init__(self):
        g = tuple(tuple(float(x) for x in row) for row in self.gain)
        object.__setattr__(self, "gain", g)


@dataclass(frozen=True)
class UnitDisk:
    """Disk-model reduction: full strength beta_acc inside the disk d**2 <= xi / beta_acc, zero outside."""

    alpha: float = field(default=2.0, init=False)


SignalModel = Union[PathLoss, ExplicitGain, UnitDisk]


@dataclass(frozen=True, eq=False)
class Instance:
    nodes: Tuple[Node, ...]
    signal: SignalModel
    beta_acc: float

    def __post_init__(self):
        nodes = tuple(self.nodes)
        object.__setattr__(self, "nodes", nodes)
        n = len(nodes)
        if n == 0:
            raise ModelError("instance needs at least one node")
        if [nd.id for nd in nodes] != list(range(n)):
            raise ModelError("node ids must be unique and dense 0..n-1, in order")
        if not (self.beta_acc > 0 and math.isfinite(self.beta_acc)):
            raise ModelError(f"beta_acc must be positive, got {self.beta_acc}")
        if self.beta_acc < 1:
            warnings.warn(f"beta_acc={self.beta_acc} < 1: approximation bounds assume beta >= 1", stacklevel=3)

        sig = self.signal
        if isinstance(sig, (PathLoss, UnitDisk)):
            if any(nd.position is None for nd in nodes):
                raise ModelError("geometric signal models need every node position")
            dims = {len(nd.position) for nd in nodes}
            if len(dims) != 1:
                raise ModelError("node positions have mixed dimensions")
            pos = np.array([nd.position for nd in nodes], dtype=float)
            diff = pos[:, None, :] - pos[None, :, :]
            dist = np.sqrt((diff**2).sum(axis=-1))
            off = ~np.eye(n, dtype=bool)
            if n > 1 and np.any(dist[off] <= 0):
                i, j = np.argwhere((dist <= 0) & off)[0]
                raise ModelError(f"nodes {i} and {j} coincide")
            dist.setflags(write=False)
            object.__setattr__(self, "_dist", dist)
        elif isinstance(sig, ExplicitGain):
            g = np.array(sig.gain, dtype=float)
            if g.shape != (n, n):
                raise ModelError(f"gain matrix must be {n}x{n}, got {g.shape}")
            if np.any(g < 0) or not np.all(np.isfinite(g)):
                raise ModelError("gain entries must be finite and non-negative")
            if np.any(np.diag(g) != 0):
                raise ModelError("gain matrix diagonal must be zero")
            if n > 1 and not np.any(g > 0):
                raise ModelError("gain matrix needs at least one positive entry")
            g.setflags(write=False)
            object.__setattr__(self, "_gain", g)
        else:
            raise ModelError(f"unknown signal model {sig!r}")

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def warning(self) -> bool:
        """True when beta_acc < 1, outside the regime the bounds assume."""
        return self.beta_acc < 1

    @property
    def xi_max(self) -> np.ndarray:
        return np.array([nd.xi_max for nd in self.nodes])

    def distance(self, u: int, v: int) -> float:
        return float(self._dist[u, v])

    def gain_matrix(self) -> np.ndarray:
        """Linear gain matrix g with phi_u(v, xi) = xi * g[u, v]; None for the disk model."""
        if isinstance(self.signal, ExplicitGain):
            return self._gain
        if isinstance(self.signal, PathLoss):
            with np.errstate(divide="ignore"):
                g = 1.0 / self._dist**self.signal.alpha
            np.fill_diagonal(g, 0.0)
            return g
        return None

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return (self.nodes, self.signal, self.beta_acc) == (other.nodes, other.signal, other.beta_acc)

    def __hash__(self):
        return hash((self.nodes, self.signal, self.beta_acc))


@dataclass(frozen=True)
class PowerAssignment:
    xi: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "xi", tuple(float(x) for x in self.xi))

    def validate(self, instance: Instance) -> None:
        if len(self.xi) != instance.n:
            raise ModelError(f"expected {instance.n} powers, got {len(self.xi)}")
        for u, (x, nd) in enumerate(zip(self.xi, instance.nodes)):
            if not (-TOL <= x <= nd.xi_max + TOL):
                raise PowerDomainError(f"power {x} of node {u} outside [0, {nd.xi_max}]")


@dataclass(frozen=True)
class InterferenceReport:
    per_node: Tuple[float, ...]
    max: float


def _check_pair(instance: Instance, u: int, v: int) -> None:
    n = instance.n
    if not (0 <= u < n and 0 <= v < n):
        raise ModelError(f"node id out of range: ({u}, {v})")
    if u == v:
        raise SelfSignalError(f"self-signal of node {u} is undefined")


def _strength(instance: Instance, u: int, v: int, xi: float) -> float:
    sig = instance.signal
    if isinstance(sig, PathLoss):
        return xi / instance._dist[u, v] ** sig.alpha
    if isinstance(sig, ExplicitGain):
        return xi * instance._gain[u, v]
    # disk: covered when d^2 <= xi / beta (with tolerance on the boundary)
    reach = xi / instance.beta_acc
    return instance.beta_acc if instance._dist[u, v] ** 2 <= reach + TOL * max(1.0, reach) else 0.0


def signal_strength(instance: Instance, u: int, v: int, xi: float) -> float:
    """Strength of ``u``'s signal at ``v`` when ``u`` transmits with power ``xi``."""
    _check_pair(instance, u, v)
    xmax = instance.nodes[u].xi_max
    if not (0 <= xi <= xmax + TOL * max(1.0, xmax)):
        raise PowerDomainError(f"power {xi} of node {u} outside [0, {xmax}]")
    return float(_strength(instance, u, v, xi))


def min_power(instance: Instance, u: int, v: int) -> float:
    """Smallest power at which ``u`` is heard by ``v`` at the acceptance threshold.

    Raises UnreachableError when even ``xi_max`` falls short.
    """
    _check_pair(instance, u, v)
    beta = instance.beta_acc
    sig = instance.signal
    if isinstance(sig, PathLoss):
        need = beta * instance._dist[u, v] ** sig.alpha
    elif isinstance(sig, ExplicitGain):
        g = instance._gain[u, v]
        if g <= 0:
            raise UnreachableError(u, v, f"zero gain from {u} to {v}")
        need = beta / g
    else:
        need = beta * instance._dist[u, v] ** 2
    xmax = instance.nodes[u].xi_max
    if need > xmax + TOL * max(1.0, xmax):
        raise UnreachableError(u, v)
    return float(min(need, xmax))


def interference(instance: Instance, powers: PowerAssignment) -> InterferenceReport:
    powers.validate(instance)
    n = instance.n
    xi = np.array(powers.xi)
    g = instance.gain_matrix()
    if g is not None:
        per_node = xi @ g
    else:
        per_node = np.zeros(n)
        for v in range(n):
            if xi[v] <= 0:
                continue
            for u in range(n):
                if u != v:
                    per_node[u] += _strength(instance, v, u, xi[v])
    per_node = tuple(float(x) for x in per_node)
    return InterferenceReport(per_node=per_node, max=max(per_node) if per_node else 0.0)


def normalize_edge(u: int, v: int) -> Tuple[int, int]:
    return (u, v) if u < v else (v, u)


def power_assignment_from_edges(instance: Instance, edges: Iterable[Sequence[int]]) -> PowerAssignment:
    """Each node gets the least power that reaches all of its neighbours."""
    xi = [0.0] * instance.n
    for u, v in edges:
        xi[u] = max(xi[u], min_power(instance, u, v))
        xi[v] = max(xi[v], min_power(instance, v, u))
    return PowerAssignment(tuple(xi))
