"""Shared samplers for the direction property tests.

The sampling used by the descent and norm-bound suites is part of the
test contract, so it lives here where both the unit tests, the fixture
generator, and the acceptance suite import the same definitions:

* ``sample_direction_states``: fully synthetic states with iid standard
  normal vectors under a random common scale in [1e-2, 1e2], dimensions
  2..59.  These are adversarial; no structure of actual runs is assumed.
* ``harvest_solver_states``: states recorded from live solver runs on the
  built-in problems plus a small logistic instance, which is what the
  solvers actually encounter.
"""

import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent))

from dfproj.anderson import AaParams, solve_aa_dfpm
from dfproj.directions import DirectionState
from dfproj.problems import LogisticProblem, make_problem, synth_dataset
from dfproj.solver import SolverConfig, solve_dfpm

SYNTHETIC_SEED = 20260822
SYNTHETIC_COUNT = 2000


def sample_direction_states(count=SYNTHETIC_COUNT, seed=SYNTHETIC_SEED):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        dim = int(rng.integers(2, 60))
        scale = 10.0 ** rng.uniform(-2.0, 2.0)
        x_prev = scale * rng.normal(size=dim)
        x = scale * rng.normal(size=dim)
        F_prev = scale * rng.normal(size=dim)
        F_k = scale * rng.normal(size=dim)
        d_prev = scale * rng.normal(size=dim)
        state = DirectionState(1, x_prev=x_prev, F_prev=F_prev, d_prev=d_prev)
        out.append((F_k, x, state))
    return out


class _Recorder:
    def __init__(self, rule):
        self.rule = rule
        self.states = []

    def __call__(self, F_k, x, state):
        d = self.rule(F_k, x, state)
        if state.k >= 1:
            self.states.append((F_k, x, state))
        return d


def harvest_solver_states(rule, seed=7):
    """Record every (F_k, x, state) pair a pair of short runs encounters."""
    recorder = _Recorder(rule)
    config = SolverConfig(direction=recorder)
    for pid in (1, 2, 3, 4):
        for n in (50, 400):
            problem = make_problem(pid, n)
            for rep in range(3):
                rng = np.random.default_rng([seed, pid, n, rep])
                x0 = rng.uniform(0.0, 1.0, size=n)
                solve_dfpm(problem, config, x0)
                solve_aa_dfpm(problem, config, AaParams(), x0)
    logistic = LogisticProblem(synth_dataset(150, 40, seed=3)).to_problem_def()
    for rep in range(3):
        rng = np.random.default_rng([seed + 1, rep])
        x0 = rng.uniform(-1.0, 1.0, size=40)
        solve_dfpm(logistic, config, x0)
        solve_aa_dfpm(logistic, config, AaParams(), x0)
    return recorder.states
