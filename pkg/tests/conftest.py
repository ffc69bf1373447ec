import math
import os

import numpy as np
import pytest

from interfmin.graph import build_graph, components
from interfmin.model import Instance, Node, PathLoss
from interfmin.oracle import gen_random_geometric

DATA = os.path.join(os.path.dirname(__file__), "data")

ACCEPTANCE_LINES = []


def line_instance(xs, alpha=2.0, beta=1.0, xi_max=100.0):
    nodes = tuple(Node(id=i, xi_max=xi_max, position=(float(x),)) for i, x in enumerate(xs))
    return Instance(nodes=nodes, signal=PathLoss(alpha=alpha), beta_acc=beta)


def geometric_corpus(count=50, n_range=(5, 12), max_edges=None, max_n=None):
    """Seeded connected geometric instances with varying radio range."""
    out = []
    seed = 0
    lo, hi = n_range
    while len(out) < count:
        seed += 1
        n = lo + seed % (hi - lo + 1)
        if max_n is not None and n > max_n:
            continue
        radius = (4.0, 5.0, 6.0, 8.0, 20.0)[seed % 5]
        inst = gen_random_geometric(n, seed, side=10.0, xi_max=radius**2)
        graph = build_graph(inst)
        if components(n, graph.edges).count > 1:
            continue
        if max_edges is not None and len(graph.edges) > max_edges:
            continue
        out.append((seed, inst))
    return out


def scipy_lp(lp):
    """Independent LP optimum via HiGHS; returns (status, objective)."""
    from scipy.optimize import linprog

    a, b, senses = lp.matrix()
    sign = np.array([-1.0 if s == ">=" else 1.0 for s in senses])
    bounds = [(0, u if math.isfinite(u) else None) for u in lp.upper]
    res = linprog(lp.objective, A_ub=a * sign[:, None], b_ub=b * sign, bounds=bounds, method="highs")
    return res.status, res.fun


@pytest.fixture
def path3():
    return line_instance([0.0, 1.0, 2.0], xi_max=10.0)


@pytest.fixture
def acceptance_report():
    def report(criterion, ok, detail=""):
        ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}")
        return ok

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
