"""Dense bounded-variable primal simplex.

Minimises ``c @ x`` subject to rows ``a @ x (>=|<=) b`` and ``lower <= x <= upper``
with ``lower = 0``. Two phases on a dense tableau, Bland's rule for both the
entering and the leaving variable, and implicit upper bounds (bound flips)
so the box constraints never become rows.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"

GE = ">="
LE = "<="

MAX_PIVOTS = 10**6


class SolverError(RuntimeError):
    """Iteration cap hit or the program turned out unbounded."""


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple
    sense: str
    rhs: float

    def __post_init__(self):
        if self.sense not in (GE, LE):
            raise ValueError(f"relation must be '>=' or '<=', got {self.sense!r}")
        coeffs = tuple(float(a) for a in self.coeffs)
        if not all(np.isfinite(coeffs)) or not np.isfinite(self.rhs):
            raise ValueError("constraint coefficients must be finite")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "rhs", float(self.rhs))


@dataclass(frozen=True)
class LinearProgram:
    objective: tuple
    constraints: tuple
    upper: tuple

    def __post_init__(self):
        object.__setattr__(self, "objective", tuple(float(c) for c in self.objective))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        object.__setattr__(self, "upper", tuple(float(u) for u in self.upper))
        k = len(self.objective)
        if len(self.upper) != k:
            raise ValueError("one upper bound per variable")
        for con in self.constraints:
            if len(con.coeffs) != k:
                raise ValueError("constraint width does not match variable count")
        if any(u < 0 for u in self.upper):
            raise ValueError("upper bounds must be non-negative")

    @property
    def num_vars(self) -> int:
        return len(self.objective)

    def matrix(self):
        a = np.array([c.coeffs for c in self.constraints], dtype=float).reshape(len(self.constraints), self.num_vars)
        b = np.array([c.rhs for c in self.constraints], dtype=float)
        senses = [c.sense for c in self.constraints]
        return a, b, senses

    def is_feasible(self, x: Sequence[float], tol: float = 1e-7) -> bool:
        x = np.asarray(x, dtype=float)
        if np.any(x < -tol) or np.any(x > np.array(self.upper) + tol):
            return False
        a, b, senses = self.matrix()
        lhs = a @ x
        for val, rhs, s in zip(lhs, b, senses):
            if s == GE and val < rhs - tol:
                return False
            if s == LE and val > rhs + tol:
                return False
        return True


@dataclass(frozen=True)
class LpSolution:
    status: str
    x: tuple = ()
    objective: float = float("nan")
    pivots: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


@dataclass
class _Tableau:
    t: np.ndarray  # B^-1 A
    basis: List[int]
    x: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    pivots: int = 0
    frozen: np.ndarray = field(default=None)


def _iterate(tab: _Tableau, cost: np.ndarray, piv_tol: float, opt_tol: float, feas_tol: float) -> None:
    t, basis, x, lo, up = tab.t, tab.basis, tab.x, tab.lower, tab.upper
    nrows, ncols = t.shape
    is_basic = np.zeros(ncols, dtype=bool)
    is_basic[basis] = True
    while True:
        if tab.pivots >= MAX_PIVOTS:
            raise SolverError(f"simplex exceeded {MAX_PIVOTS} pivots")
        d = cost - cost[basis] @ t
        at_lower = x <= lo + feas_tol
        at_upper = x >= up - feas_tol
        movable = ~is_basic & (up - lo > feas_tol) & ~tab.frozen
        eligible = movable & ((at_lower & (d < -opt_tol)) | (at_upper & ~at_lower & (d > opt_tol)))
        cand = np.flatnonzero(eligible)
        if cand.size == 0:
            return
        j = int(cand[0])
        sign = 1.0 if at_lower[j] and d[j] < 0 else -1.0

        col = t[:, j] * sign
        theta = up[j] - lo[j]
        leave = -1
        leave_to_upper = False
        xb = x[basis]
        lb = lo[basis]
        ub = up[basis]
        best_var = ncols
        for r in range(nrows):
            a = col[r]
            if a > piv_tol:
                step = max(xb[r] - lb[r], 0.0) / a
                to_upper = False
            elif a < -piv_tol and np.isfinite(ub[r]):
                step = max(ub[r] - xb[r], 0.0) / -a
                to_upper = True
            else:
                continue
            if step < theta - 1e-12 or (leave >= 0 and abs(step - theta) <= 1e-12 and basis[r] < best_var):
                theta, leave, leave_to_upper, best_var = step, r, to_upper, basis[r]
        if not np.isfinite(theta):
            raise SolverError("linear program is unbounded")

        x[j] += sign * theta
        x[basis] = xb - theta * col
        tab.pivots += 1
        if leave < 0:
            # bound flip, basis unchanged
            x[j] = up[j] if sign > 0 else lo[j]
            continue

        out = basis[leave]
        x[out] = up[out] if leave_to_upper else lo[out]
        prow = t[leave] / t[leave, j]
        t -= np.outer(t[:, j], prow)
        t[leave] = prow
        basis[leave] = j
        is_basic[out] = False
        is_basic[j] = True


def solve(
    lp: LinearProgram,
    feas_tol: float = 1e-7,
    piv_tol: float = 1e-10,
    opt_tol: float = 1e-11,
) -> LpSolution:
    """Solve ``lp``; returns status ``infeasible`` rather than raising when no point exists."""
    a, b, senses = lp.matrix()
    m, k = a.shape
    up_struct = np.array(lp.upper, dtype=float)

    # slack s >= 0: a x - s = b for >=, a x + s = b for <=
    slack = np.zeros((m, m))
    for i, s in enumerate(senses):
        slack[i, i] = -1.0 if s == GE else 1.0
    full = np.hstack([a, slack])
    rhs = b.copy()
    neg = rhs < 0
    full[neg] *= -1
    rhs[neg] *= -1
    art = np.eye(m)
    t = np.hstack([full, art])
    ncols = k + 2 * m
    lo = np.zeros(ncols)
    up = np.concatenate([up_struct, np.full(m, np.inf), np.full(m, np.inf)])
    x = np.zeros(ncols)
    x[k + m :] = rhs
    basis = list(range(k + m, ncols))
    frozen = np.zeros(ncols, dtype=bool)
    tab = _Tableau(t=t, basis=basis, x=x, lower=lo, upper=up, frozen=frozen)

    phase1 = np.concatenate([np.zeros(k + m), np.ones(m)])
    _iterate(tab, phase1, piv_tol, opt_tol, feas_tol)
    infeas = float(tab.x[k + m :].sum())
    if infeas > feas_tol * max(1.0, float(rhs.sum())):
        return LpSolution(status=INFEASIBLE, pivots=tab.pivots)

    # artificials are pinned at zero for phase two; basic ones leave on degenerate pivots
    tab.upper[k + m :] = 0.0
    tab.x[k + m :] = np.minimum(tab.x[k + m :], 0.0)
    tab.frozen[k + m :] = True
    phase2 = np.concatenate([np.array(lp.objective), np.zeros(2 * m)])
    _iterate(tab, phase2, piv_tol, opt_tol, feas_tol)

    xs = _refine(full, rhs, tab)
    xs = np.clip(xs[:k], 0.0, up_struct)
    obj = float(np.dot(lp.objective, xs))
    return LpSolution(status=OPTIMAL, x=tuple(float(v) for v in xs), objective=obj, pivots=tab.pivots)


def _refine(full: np.ndarray, rhs: np.ndarray, tab: _Tableau) -> np.ndarray:
    """Recompute basic values from the original rows to shed accumulated round-off."""
    m = full.shape[0]
    x = tab.x.copy()
    if m == 0:
        return x
    aug = np.hstack([full, np.eye(m)])
    basis = tab.basis
    nonbasic = np.ones(aug.shape[1], dtype=bool)
    nonbasic[basis] = False
    r = rhs - aug[:, nonbasic] @ x[nonbasic]
    try:
        x[basis] = np.linalg.solve(aug[:, basis], r)
    except np.linalg.LinAlgError:
        pass
    return x
