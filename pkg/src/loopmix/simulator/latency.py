"""End-to-end latency model: a sum of independent exponential hop delays.

With `hops` stops at mean delay 1/mu each, total delay is Gamma(hops, mu);
an optional per-hop processing constant shifts the whole distribution.
"""

from __future__ import annotations

import numpy as np

from ..client import Rates


def run_latency_experiment(
    rates: Rates,
    hops: int,
    n_messages: int,
    seed: int,
    processing_s: float = 0.0,
) -> np.ndarray:
    """Sample n_messages end-to-end latencies over a fixed-length path."""
    if hops < 1:
        raise ValueError("need at least one hop")
    if n_messages < 1:
        raise ValueError("need at least one message")
    if processing_s < 0:
        raise ValueError("processing time cannot be negative")
    rng = np.random.default_rng(seed)
    delays = rng.exponential(1.0 / rates.mu, size=(n_messages, hops))
    return delays.sum(axis=1) + hops * processing_s
