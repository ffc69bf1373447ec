import json
import math
import os

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from interfmin.lp import LE, GE, solve
from interfmin.wmpmpsc import (
    CoverSet,
    DerandomizationError,
    RoundingParams,
    UncoverableError,
    WmpmpscError,
    WmpmpscInstance,
    brute_force_cover,
    derandomize,
    estimator_P,
    formulate_lp,
    random_instance,
    randomized_round,
    rounding_probabilities,
    solve_lp,
    solve_wmpmpsc,
)

from conftest import DATA, scipy_lp


def make(s1, s2, sets):
    return WmpmpscInstance(s1, s2, tuple(CoverSet(frozenset(c), w) for c, w in sets))


def test_instance_validation():
    with pytest.raises(WmpmpscError):
        make(1, 1, [({0}, {0: 1.5})])
    with pytest.raises(WmpmpscError):
        make(1, 1, [({3}, {})])
    with pytest.raises(WmpmpscError):
        make(1, 1, [])


def test_formulate_lp_structure():
    inst = make(2, 3, [({0}, {0: 0.5}), ({1}, {1: 0.2}), ({0, 1}, {2: 1.0}), (set(), {})])
    lp = formulate_lp(inst)
    assert lp.num_vars == 5
    senses = [c.sense for c in lp.constraints]
    assert senses == [GE, GE, LE, LE, LE]
    assert lp.constraints[0].coeffs == (1.0, 0.0, 1.0, 0.0, 0.0)
    assert lp.constraints[4].coeffs == (0.0, 0.0, 1.0, 0.0, -1.0)
    assert lp.upper[:4] == (1.0,) * 4 and math.isinf(lp.upper[4])


def test_uncovered_element_is_infeasible():
    inst = make(2, 1, [({0}, {0: 0.3})])
    assert solve(formulate_lp(inst)).status == "infeasible"
    with pytest.raises(UncoverableError) as err:
        solve_wmpmpsc(inst)
    assert err.value.elements == (1,)


def test_zero_weights_give_zero_optimum():
    inst = make(2, 2, [({0}, {}), ({1}, {0: 0.0}), ({0, 1}, {})])
    x, z = solve_lp(inst)
    assert z == 0.0
    cover = solve_wmpmpsc(inst)
    assert cover.max_weight == 0.0


def test_rounding_params():
    inst = make(2, 4, [({0, 1}, {})])
    params = RoundingParams.from_instance(inst, 0.75)
    assert params.alpha == pytest.approx(math.log(4) + 1)
    assert params.beta_r == pytest.approx(1 + 4.0)
    assert RoundingParams.from_instance(inst, 0.0).z_clamped == 1e-9


def test_rounding_probabilities():
    params = RoundingParams(alpha=math.log(4) + 1, beta_r=2.0, z_clamped=1.0)
    p = rounding_probabilities([0.3, 0.6, 0.0], params)
    assert p[0] == pytest.approx(0.7159, abs=1e-4)
    assert p[1] == 1.0
    assert p[2] == 0.0


def test_randomized_round_integral():
    inst = make(2, 2, [({0}, {0: 0.4}), ({1}, {1: 0.4}), ({0, 1}, {0: 1.0, 1: 1.0})])
    cover = randomized_round(inst, [1.0, 1.0, 0.0], 0.4, seed=3)
    assert cover is not None and cover.chosen == (0, 1)


def test_randomized_round_nothing_selected():
    inst = make(1, 1, [({0}, {0: 0.4})])
    assert all(randomized_round(inst, [0.0], 0.4, seed=s) is None for s in range(10))


def load_golden():
    with open(os.path.join(DATA, "wmpmpsc8.json")) as fh:
        doc = json.load(fh)
    raw = doc["instance"]
    inst = WmpmpscInstance(
        raw["s1_count"],
        raw["s2_count"],
        tuple(CoverSet(frozenset(s["covers"]), {int(k): v for k, v in s["weights"].items()}) for s in raw["sets"]),
    )
    return inst, doc


def test_randomized_round_replay():
    inst, doc = load_golden()
    x, z = solve_lp(inst)
    for seed, chosen in doc["randomized_round"].items():
        got = randomized_round(inst, x, z, int(seed))
        assert (None if got is None else list(got.chosen)) == chosen


def test_derandomize_golden_and_ip():
    inst, doc = load_golden()
    x, z = solve_lp(inst)
    assert z == pytest.approx(doc["z_prime"], abs=1e-12)
    cover = derandomize(inst, x, z)
    assert list(cover.chosen) == doc["derandomized"]
    opt, _ = brute_force_cover(inst)
    assert z <= opt + 1e-9
    assert opt <= cover.max_weight <= cover.bound + 1e-9


def test_estimator_certain_outcomes():
    inst = make(1, 0, [({0}, {})])
    params = RoundingParams(alpha=1.0, beta_r=2.0, z_clamped=1.0)
    assert estimator_P(inst, [1.0], params) == pytest.approx(0.0)
    assert estimator_P(inst, [0.0], params) == pytest.approx(1.0)


def test_estimator_overload_term():
    # beta_r = 2, alpha * beta_r * z = 1  ->  B = 2**-1 * (1 + 1) = 1
    inst = make(0, 1, [(set(), {0: 1.0})])
    params = RoundingParams(alpha=1.0, beta_r=2.0, z_clamped=0.5)
    assert estimator_P(inst, [1.0], params) == pytest.approx(2.0 - 1.0 - 0.0)


def test_derandomize_integral_input():
    inst = make(2, 2, [({0}, {0: 0.4}), ({1}, {1: 0.4}), ({0, 1}, {0: 1.0, 1: 1.0})])
    cover = derandomize(inst, [1.0, 1.0, 0.0], 0.4)
    assert cover.chosen == (0, 1)


def test_derandomize_identical_sets_hand_oracle():
    inst = make(1, 1, [({0}, {0: 1.0}), ({0}, {0: 1.0})])
    # hand evaluation: alpha = 1, z = 0.5, beta = 1 + max(sqrt 6, 6) = 7, alpha*beta*z = 3.5
    beta, scale = 7.0, 7.0**-3.5

    def p_est(p0, p1):
        a = (1 - p0) * (1 - p1)
        b = scale * (1 + (beta - 1) * p0) * (1 + (beta - 1) * p1)
        return 2 - (1 - a) - (1 - b)

    assert p_est(1, 0.5) < p_est(0, 0.5)  # first set kept
    assert p_est(1, 0) < p_est(1, 1)  # second dropped
    cover = derandomize(inst, [0.5, 0.5], 0.5)
    assert cover.chosen == (0,)
    assert cover.estimator_trace == pytest.approx([p_est(0.5, 0.5), p_est(1, 0.5), p_est(1, 0)])


def test_derandomize_rejects_uncoverable():
    inst = make(2, 1, [({0}, {0: 0.5})])
    with pytest.raises(DerandomizationError):
        derandomize(inst, [1.0], 0.5)


def test_solve_small_brute_force_example():
    inst = make(2, 1, [({0}, {0: 1.0}), ({1}, {0: 1.0}), ({0, 1}, {0: 0.5})])
    opt, best = brute_force_cover(inst)
    assert (opt, best) == (0.5, (2,))
    cover = solve_wmpmpsc(inst)
    assert cover.chosen == (2,) and cover.max_weight == 0.5


def test_empty_s1():
    cover = solve_wmpmpsc(make(0, 2, [(set(), {0: 0.5})]))
    assert cover.chosen == () and cover.max_weight == 0.0


def test_single_zero_weight_set():
    cover = solve_wmpmpsc(make(3, 2, [({0, 1, 2}, {0: 0.0})]))
    assert cover.chosen == (0,) and cover.max_weight == 0.0


def test_unit_weights_match_unweighted_lp():
    rng = np.random.default_rng(2)
    for _ in range(10):
        base = random_instance(rng, 4, 5, 7)
        unit = WmpmpscInstance(
            base.s1_count,
            base.s2_count,
            tuple(CoverSet(s.covers, {k: 1.0 for k in s.weights}) for s in base.sets),
        )
        # membership LP written out independently: sum over member sets of x <= z
        from interfmin.lp import Constraint, LinearProgram

        m = unit.m
        rows = [Constraint(tuple(float(i in s.covers) for s in unit.sets) + (0.0,), GE, 1.0) for i in range(4)]
        rows += [Constraint(tuple(float(i in s.weights) for s in unit.sets) + (-1.0,), LE, 0.0) for i in range(5)]
        lp = LinearProgram((0.0,) * m + (1.0,), tuple(rows), (1.0,) * m + (math.inf,))
        _, fun = scipy_lp(lp)
        _, z = solve_lp(unit)
        assert z == pytest.approx(fun, abs=1e-7)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_estimator_never_increases_and_bound_holds(seed):
    rng = np.random.default_rng(seed)
    inst = random_instance(rng, int(rng.integers(1, 6)), int(rng.integers(1, 7)), int(rng.integers(1, 13)))
    x, z = solve_lp(inst)
    cover = derandomize(inst, x, z)
    trace = np.array(cover.estimator_trace)
    assert trace[0] < 0.8
    assert np.all(np.diff(trace) <= 1e-12)
    assert not inst.uncovered(cover.chosen)
    assert cover.max_weight <= cover.bound + 1e-9
    assert cover.max_weight == pytest.approx(inst.max_weight(cover.chosen), abs=1e-12)


def test_rounding_success_rate_theory():
    inst = make(4, 3, [({i}, {0: 1.0, 1: 1.0, 2: 1.0}) for i in range(4)] + [({i}, {0: 1.0, 1: 1.0, 2: 1.0}) for i in range(4)])
    x, z = solve_lp(inst)
    assert z == pytest.approx(4.0)
    hits = sum(randomized_round(inst, x, z, s) is not None for s in range(500))
    assert hits / 500 >= 0.15


def test_large_weights_stay_finite():
    # tiny z' drives beta_r to ~3e9; products must not overflow
    inst = make(1, 1, [({0}, {0: 0.0})] + [(set(), {0: 1.0})] * 60)
    params = RoundingParams.from_instance(inst, 0.0)
    p = np.ones(61)
    assert math.isfinite(estimator_P(inst, p, params))
