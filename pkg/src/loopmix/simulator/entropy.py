"""Single-mix entropy experiment.

Feeds one pool with Poisson traffic and applies the incremental entropy
update at every departure: each emission is a choice between the messages
that arrived since the previous emission (uniform) and the older residents
(carrying the accumulated entropy). The steady-state level grows with the
arrival rate and with the mean delay, since both fatten the pool.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import List, Tuple

from ..analysis.pools import entropy_step
from ..mixnode import MixPool


@dataclass
class EntropyRun:
    lambda_in: float
    mu: float
    duration: float
    seed: int
    steady_mean: float
    series: List[Tuple[float, float]] = field(repr=False)


def run_entropy_experiment(
    lambda_in: float, mu: float, duration: float, seed: int
) -> EntropyRun:
    """Simulate one mix and return (departure_time, entropy) per emission.

    steady_mean averages the entropy over departures in the second half of
    the run, past the initial fill-up transient.
    """
    if lambda_in <= 0 or mu <= 0:
        raise ValueError("rates must be positive")
    if duration <= 0:
        raise ValueError("duration must be positive")

    rng = random.Random(seed)
    pool = MixPool()
    next_arrival = rng.expovariate(lambda_in)
    entropy = 0.0
    fresh = 0
    held = 0
    series: List[Tuple[float, float]] = []

    while True:
        release = pool.peek_time()
        t_next = next_arrival if release is None else min(next_arrival, release)
        if t_next > duration:
            break
        if release is not None and release <= next_arrival:
            pool.next_release(release)
            entropy = entropy_step(entropy, fresh, held)
            series.append((release, entropy))
            held = fresh + held - 1
            fresh = 0
        else:
            pool.add(t_next + rng.expovariate(mu), None, now=t_next)
            fresh += 1
            next_arrival = t_next + rng.expovariate(lambda_in)

    tail = [h for (t, h) in series if t >= duration / 2]
    steady = sum(tail) / len(tail) if tail else 0.0
    return EntropyRun(
        lambda_in=lambda_in,
        mu=mu,
        duration=duration,
        seed=seed,
        steady_mean=steady,
        series=series,
    )
