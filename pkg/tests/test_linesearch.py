import numpy as np
import pytest

from conftest import sample_direction_states
from oracles import CountingMap, brute_force_line_search
from dfproj.linesearch import (
    LineSearchFailure,
    LineSearchParams,
    line_search,
)


def identity(x):
    return x.copy()


def test_accepting_example():
    # F = identity, x = (1), d = (-1).  At alpha = 1 and 0.6 the trial point
    # is nonnegative so the left side is <= 0; the first acceptance is the
    # brute-force winner alpha = 0.6 after two trials... checked below that
    # the oracle agrees.
    x = np.array([1.0])
    d = np.array([-1.0])
    res = line_search(identity, x, d, identity(x), LineSearchParams())
    oracle = brute_force_line_search(
        identity, x, d, gamma=1.0, rho=0.6, sigma=0.01, t1=1e-3, t2=0.4,
        max_backtracks=60,
    )
    assert oracle is not None
    assert res.alpha == pytest.approx(oracle[1])
    assert res.trials == oracle[0] + 1
    np.testing.assert_allclose(res.z, x + res.alpha * d)
    np.testing.assert_allclose(res.F_z, res.z)


def test_accepting_example_pinned_values():
    x = np.array([1.0])
    d = np.array([-1.0])
    res = line_search(identity, x, d, identity(x), LineSearchParams())
    assert res.alpha == pytest.approx(0.6)
    assert res.trials == 2
    np.testing.assert_allclose(res.z, [0.4])


def test_immediate_acceptance():
    # Strongly aligned descent accepts the very first trial alpha = gamma:
    # F(z) = (9, 9) against d = (-1, -1) gives 18 on the left and
    # 0.01 * 1 * 0.4 * 2 on the right.
    def F(x):
        return x + 10.0

    x = np.array([0.0, 0.0])
    d = np.array([-1.0, -1.0])
    res = line_search(F, x, d, F(x), LineSearchParams())
    assert res.alpha == 1.0
    assert res.trials == 1


def test_failure_when_no_step_accepted():
    # From the origin along a direction pointing away from the zero of F the
    # acceptance left side is negative for every trial step, so the search
    # must exhaust its budget and raise.
    x = np.array([0.0])
    d = np.array([-1.0])
    oracle = brute_force_line_search(
        identity, x, d, gamma=1.0, rho=0.6, sigma=0.01, t1=1e-3, t2=0.4,
        max_backtracks=60,
    )
    assert oracle is None
    with pytest.raises(LineSearchFailure) as err:
        line_search(identity, x, d, identity(x), LineSearchParams())
    assert err.value.last_trial.trials == 61


def test_zero_direction_rejected():
    x = np.array([1.0])
    with pytest.raises(ValueError):
        line_search(identity, x, np.zeros(1), identity(x), LineSearchParams())


def test_matches_brute_force_on_random_instances():
    rng = np.random.default_rng(42)
    params = LineSearchParams()
    checked = 0
    for _ in range(300):
        n = int(rng.integers(1, 12))
        shift = rng.normal(size=n)

        def F(x, shift=shift):
            return np.tanh(x - shift) + 0.05 * (x - shift)

        x = rng.normal(size=n)
        F_x = F(x)
        d = -F_x + 0.05 * rng.normal(size=n)
        if np.linalg.norm(d) == 0.0:
            continue
        oracle = brute_force_line_search(
            F, x, d,
            gamma=params.gamma, rho=params.rho, sigma=params.sigma,
            t1=params.t1, t2=params.t2, max_backtracks=params.max_backtracks,
        )
        if oracle is None:
            with pytest.raises(LineSearchFailure):
                line_search(F, x, d, F_x, params)
        else:
            res = line_search(F, x, d, F_x, params)
            assert res.alpha == pytest.approx(oracle[1], rel=1e-15)
            assert res.trials == oracle[0] + 1
            checked += 1
    assert checked >= 100


def test_trials_counts_map_evaluations():
    params = LineSearchParams()
    x = np.array([1.0])
    d = np.array([-1.0])
    F = CountingMap(identity)
    res = line_search(F, x, d, identity(x), params)
    assert F.calls == res.trials


def test_trials_counts_map_evaluations_on_failure():
    params = LineSearchParams(max_backtracks=7)
    F = CountingMap(identity)
    with pytest.raises(LineSearchFailure):
        line_search(F, np.zeros(1), np.array([-1.0]), np.zeros(1), params)
    assert F.calls == 8


def test_accepts_on_solver_like_states():
    # The search must succeed whenever it is fed a sufficient-descent
    # direction for a monotone map, i.e. in exactly the situation the outer
    # iteration creates.  Reuse the synthetic direction states with a smooth
    # monotone map anchored at x.
    params = LineSearchParams()
    count = 0
    for F_k, x, state in sample_direction_states(count=200, seed=5):
        def F(y, x=x, F_k=F_k):
            return np.tanh(y - x) + F_k

        d = -F_k
        if np.linalg.norm(d) == 0.0:
            continue
        res = line_search(F, x, d, F(x), params)
        assert res.alpha > 0.0
        count += 1
    assert count >= 190


def test_params_validation():
    with pytest.raises(ValueError):
        LineSearchParams(rho=1.0)
    with pytest.raises(ValueError):
        LineSearchParams(rho=0.0)
    with pytest.raises(ValueError):
        LineSearchParams(sigma=0.0)
    with pytest.raises(ValueError):
        LineSearchParams(gamma=0.0)
    with pytest.raises(ValueError):
        LineSearchParams(t1=0.5, t2=0.4)
    with pytest.raises(ValueError):
        LineSearchParams(t1=-1.0)
    with pytest.raises(ValueError):
        LineSearchParams(max_backtracks=-1)
    # Zero backtracks is legal: a single trial at alpha = gamma.
    assert LineSearchParams(max_backtracks=0).max_backtracks == 0
