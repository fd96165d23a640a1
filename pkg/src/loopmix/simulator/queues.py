"""Steady-state behaviour of one mix pool under Poisson load.

Drives the exact MixPool container the live node uses with Poisson(lambda)
arrivals and Exp(mu) holding times, recording the time-averaged pool size,
point-in-time size samples, and departure instants. At steady state the pool
should sit at lambda/mu on average with a Poisson-shaped size distribution
and Poisson output.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import List

from ..mixnode import MixPool


@dataclass
class PoolRun:
    lambda_in: float
    mu: float
    duration: float
    seed: int
    time_avg_size: float
    sampled_sizes: List[int] = field(repr=False)
    departure_times: List[float] = field(repr=False)


def run_pool_experiment(
    lambda_in: float,
    mu: float,
    duration: float,
    seed: int,
    sample_every: float = 1.0,
) -> PoolRun:
    """Simulate one pool for `duration` time units.

    sampled_sizes holds the pool size at t = sample_every, 2*sample_every, …
    which for sample gaps well above 1/mu are nearly independent draws from
    the stationary law.
    """
    if lambda_in <= 0 or mu <= 0:
        raise ValueError("rates must be positive")
    if duration <= 0 or sample_every <= 0:
        raise ValueError("duration and sample_every must be positive")

    rng = random.Random(seed)
    pool = MixPool()
    area = 0.0
    last_t = 0.0
    next_sample = sample_every
    next_arrival = rng.expovariate(lambda_in)
    sizes: List[int] = []
    departures: List[float] = []

    while True:
        release = pool.peek_time()
        t_next = next_arrival if release is None else min(next_arrival, release)
        if t_next > duration:
            break
        while next_sample <= t_next:
            sizes.append(len(pool))
            next_sample += sample_every
        area += len(pool) * (t_next - last_t)
        last_t = t_next
        if release is not None and release <= next_arrival:
            pool.next_release(release)
            departures.append(release)
        else:
            pool.add(t_next + rng.expovariate(mu), None, now=t_next)
            next_arrival = t_next + rng.expovariate(lambda_in)

    while next_sample <= duration:
        sizes.append(len(pool))
        next_sample += sample_every
    area += len(pool) * (duration - last_t)

    return PoolRun(
        lambda_in=lambda_in,
        mu=mu,
        duration=duration,
        seed=seed,
        time_avg_size=area / duration,
        sampled_sizes=sizes,
        departure_times=departures,
    )
