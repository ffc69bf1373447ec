"""Weighted minimum partial membership partial set cover (WMPMPSC).

Every element of S1 must be covered; the accumulated weight over chosen sets
of the worst element of S2 is minimised. Solved by LP relaxation followed by
randomized rounding, or its derandomization through a pessimistic estimator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from . import lp as lpmod

Z_FLOOR = 1e-9
BOUND_TOL = 1e-9


class WmpmpscError(ValueError):
    pass


class UncoverableError(WmpmpscError):
    def __init__(self, elements: Sequence[int]):
        self.elements = tuple(elements)
        super().__init__(f"S1 elements covered by no set: {list(self.elements)}")


class DerandomizationError(RuntimeError):
    pass


@dataclass(frozen=True)
class CoverSet:
    covers: FrozenSet[int]
    weights: Mapping[int, float]

    def __post_init__(self):
        object.__setattr__(self, "covers", frozenset(int(i) for i in self.covers))
        object.__setattr__(self, "weights", {int(k): float(w) for k, w in sorted(self.weights.items())})

    def __hash__(self):
        return hash((self.covers, tuple(self.weights.items())))


@dataclass(frozen=True, eq=False)
class WmpmpscInstance:
    s1_count: int
    s2_count: int
    sets: Tuple[CoverSet, ...]

    def __post_init__(self):
        object.__setattr__(self, "sets", tuple(self.sets))
        if self.s1_count < 0 or self.s2_count < 0:
            raise WmpmpscError("element counts must be non-negative")
        for j, cs in enumerate(self.sets):
            for i in cs.covers:
                if not 0 <= i < self.s1_count:
                    raise WmpmpscError(f"set {j} covers unknown S1 element {i}")
            for i, w in cs.weights.items():
                if not 0 <= i < self.s2_count:
                    raise WmpmpscError(f"set {j} weighs unknown S2 element {i}")
                if not 0.0 <= w <= 1.0:
                    raise WmpmpscError(f"set {j}: weight {w} on element {i} outside [0, 1]")
        if self.s1_count >= 1 and not self.sets:
            raise WmpmpscError("no sets to cover S1 with")
        cover = np.zeros((self.s1_count, self.m), dtype=bool)
        weight = np.zeros((self.s2_count, self.m))
        for j, cs in enumerate(self.sets):
            for i in cs.covers:
                cover[i, j] = True
            for i, w in cs.weights.items():
                weight[i, j] = w
        cover.setflags(write=False)
        weight.setflags(write=False)
        object.__setattr__(self, "cover_matrix", cover)
        object.__setattr__(self, "weight_matrix", weight)

    @property
    def m(self) -> int:
        return len(self.sets)

    def uncovered(self, chosen) -> List[int]:
        mask = np.zeros(self.m, dtype=bool)
        mask[list(chosen)] = True
        hit = self.cover_matrix[:, mask].any(axis=1) if self.s1_count else np.zeros(0, dtype=bool)
        return [int(i) for i in np.flatnonzero(~hit)]

    def accumulated_weight(self, chosen) -> np.ndarray:
        mask = np.zeros(self.m)
        mask[list(chosen)] = 1.0
        return self.weight_matrix @ mask

    def max_weight(self, chosen) -> float:
        acc = self.accumulated_weight(chosen)
        return float(acc.max()) if acc.size else 0.0


@dataclass(frozen=True)
class RoundingParams:
    alpha: float
    beta_r: float
    z_clamped: float

    @classmethod
    def from_instance(cls, inst: WmpmpscInstance, z_prime: float) -> "RoundingParams":
        alpha = math.log(max(inst.s1_count, inst.s2_count, 1)) + 1.0
        z = max(float(z_prime), Z_FLOOR)
        beta_r = 1.0 + max(math.sqrt(3.0 / z), 3.0 / z)
        return cls(alpha=alpha, beta_r=beta_r, z_clamped=z)

    @property
    def bound(self) -> float:
        """Acceptance ceiling alpha * beta_r * z on the accumulated weight."""
        return self.alpha * self.beta_r * self.z_clamped


@dataclass(frozen=True)
class Cover:
    chosen: Tuple[int, ...]
    max_weight: float
    lp_value: float
    bound: float = float("inf")
    estimator_trace: Tuple[float, ...] = ()


def formulate_lp(inst: WmpmpscInstance, weight_scale: float = 1.0) -> lpmod.LinearProgram:
    """LP relaxation over variables (x_1..x_m, z): minimise z.

    One ``>= 1`` cover row per S1 element, then one ``sum w x - z <= 0`` row
    per S2 element. ``weight_scale`` multiplies every weight; the optimum
    ``x`` is unchanged and ``z`` scales with it.
    """
    m = inst.m
    rows = []
    for i in range(inst.s1_count):
        coeffs = np.append(inst.cover_matrix[i].astype(float), 0.0)
        rows.append(lpmod.Constraint(tuple(coeffs), lpmod.GE, 1.0))
    for i in range(inst.s2_count):
        coeffs = np.append(inst.weight_matrix[i] * weight_scale, -1.0)
        rows.append(lpmod.Constraint(tuple(coeffs), lpmod.LE, 0.0))
    objective = (0.0,) * m + (1.0,)
    upper = (1.0,) * m + (math.inf,)
    return lpmod.LinearProgram(objective=objective, constraints=tuple(rows), upper=upper)


def _greedy_upper(inst: WmpmpscInstance) -> float:
    """Weight of a cheap feasible cover; used only to put the LP on a unit scale."""
    chosen = set()
    colmax = inst.weight_matrix.max(axis=0) if inst.s2_count else np.zeros(inst.m)
    for i in range(inst.s1_count):
        cands = np.flatnonzero(inst.cover_matrix[i])
        if cands.size == 0:
            continue
        if chosen.intersection(cands.tolist()):
            continue
        chosen.add(int(cands[np.argmin(colmax[cands])]))
    return inst.max_weight(chosen) if chosen else 0.0


def solve_lp(inst: WmpmpscInstance) -> Tuple[np.ndarray, float]:
    """Fractional optimum (x', z') of the relaxation.

    Raises UncoverableError when some S1 element lies in no set.
    """
    missing = [i for i in range(inst.s1_count) if not inst.cover_matrix[i].any()]
    if missing:
        raise UncoverableError(missing)
    ub = _greedy_upper(inst)
    scale = 1.0 / ub if ub > 0 else 1.0
    sol = lpmod.solve(formulate_lp(inst, weight_scale=scale))
    if not sol.optimal:
        raise UncoverableError(missing)
    x = np.array(sol.x[: inst.m])
    # z' from the unscaled rows, so it is exactly the max of accumulated fractional weight
    z = float((inst.weight_matrix @ x).max()) if inst.s2_count else 0.0
    return x, max(z, 0.0)


def rounding_probabilities(x_frac: Sequence[float], params: RoundingParams) -> np.ndarray:
    return np.clip(params.alpha * np.asarray(x_frac, dtype=float), 0.0, 1.0)


def sample_rounding(p: np.ndarray, rng: np.random.Generator) -> Tuple[int, ...]:
    """One Bernoulli draw per set."""
    draws = rng.random(len(p))
    return tuple(int(j) for j in np.flatnonzero(draws < p))


def randomized_round(
    inst: WmpmpscInstance, x_frac: Sequence[float], z_prime: float, seed: int
) -> Optional[Cover]:
    """One rounding trial; returns the Cover if it is feasible and within the bound, else None."""
    params = RoundingParams.from_instance(inst, z_prime)
    p = rounding_probabilities(x_frac, params)
    chosen = sample_rounding(p, np.random.default_rng(seed))
    return _accept(inst, chosen, z_prime, params)


def _accept(inst, chosen, z_prime, params) -> Optional[Cover]:
    if inst.uncovered(chosen):
        return None
    mw = inst.max_weight(chosen)
    if mw > params.bound + BOUND_TOL:
        return None
    return Cover(chosen=tuple(chosen), max_weight=mw, lp_value=float(z_prime), bound=params.bound)


def estimator_P(inst: WmpmpscInstance, p: Sequence[float], params: RoundingParams) -> float:
    """Pessimistic estimator of the probability that a rounding misses an S1
    element or overloads an S2 element."""
    p = np.asarray(p, dtype=float)
    cov = inst.cover_matrix
    # A_i = prod over sets containing i of (1 - p_j)
    a_bar = np.where(cov, 1.0 - p[None, :], 1.0).prod(axis=1)
    term_a = float(np.prod(1.0 - a_bar))

    # B_i in log space: -alpha*beta*z*ln(beta) + sum_j log(1 + (beta^w - 1) p_j)
    lnb = math.log(params.beta_r)
    growth = np.expm1(inst.weight_matrix * lnb)
    log_b = -params.alpha * params.beta_r * params.z_clamped * lnb + np.log1p(growth * p[None, :]).sum(axis=1)
    b_bar = np.exp(np.minimum(log_b, 700.0))
    term_b = float(np.prod(1.0 - b_bar))
    return 2.0 - term_a - term_b


def derandomize(inst: WmpmpscInstance, x_frac: Sequence[float], z_prime: float) -> Cover:
    """Fix the rounding probabilities to 0 or 1 one set at a time (ascending
    index), each time taking the branch with the smaller estimator value.
    Ties go to 0."""
    params = RoundingParams.from_instance(inst, z_prime)
    p = rounding_probabilities(x_frac, params)
    current = estimator_P(inst, p, params)
    if not current < 1.0:
        raise DerandomizationError(f"initial estimator {current:.6g} >= 1; no good rounding is certified")
    trace = [current]
    for j in range(inst.m):
        p[j] = 0.0
        at_zero = estimator_P(inst, p, params)
        p[j] = 1.0
        at_one = estimator_P(inst, p, params)
        if at_zero <= at_one:
            p[j] = 0.0
            current = at_zero
        else:
            current = at_one
        trace.append(current)
    chosen = tuple(int(j) for j in np.flatnonzero(p > 0.5))
    missing = inst.uncovered(chosen)
    mw = inst.max_weight(chosen)
    if missing or mw > params.bound + BOUND_TOL:
        raise DerandomizationError(
            f"derandomized cover violates its guarantee (uncovered={missing}, weight={mw}, bound={params.bound})"
        )
    return Cover(chosen=chosen, max_weight=mw, lp_value=float(z_prime), bound=params.bound, estimator_trace=tuple(trace))


def solve_wmpmpsc(inst: WmpmpscInstance) -> Cover:
    if inst.s1_count == 0:
        return Cover(chosen=(), max_weight=0.0, lp_value=0.0, bound=0.0)
    x, z = solve_lp(inst)
    return derandomize(inst, x, z)


def brute_force_cover(inst: WmpmpscInstance) -> Tuple[float, Tuple[int, ...]]:
    """Integral optimum by enumerating every sub-collection; for small m only."""
    m = inst.m
    if m > 20:
        raise WmpmpscError(f"exhaustive enumeration over {m} sets refused")
    best, best_set = math.inf, None
    for mask in range(1 << m):
        chosen = [j for j in range(m) if mask >> j & 1]
        if inst.uncovered(chosen):
            continue
        w = inst.max_weight(chosen)
        if w < best:
            best, best_set = w, tuple(chosen)
    if best_set is None:
        raise UncoverableError([])
    return best, best_set


def random_instance(
    rng: np.random.Generator,
    s1_count: int,
    s2_count: int,
    m: int,
    density: float = 0.4,
) -> WmpmpscInstance:
    """Random instance where every S1 element is covered by at least one set."""
    sets = []
    cover = rng.random((m, s1_count)) < density
    for i in range(s1_count):
        if not cover[:, i].any():
            cover[rng.integers(m), i] = True
    for j in range(m):
        weights = {}
        for i in range(s2_count):
            if rng.random() < 0.6:
                weights[i] = float(rng.random())
        sets.append(CoverSet(covers=frozenset(np.flatnonzero(cover[j]).tolist()), weights=weights))
    return WmpmpscInstance(s1_count=s1_count, s2_count=s2_count, sets=tuple(sets))
