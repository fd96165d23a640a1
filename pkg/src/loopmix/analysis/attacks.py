"""Closed forms for active-adversary success rates and link traffic.

Covers the n-1 style blocking attack (isolate a target by stopping everyone
else and watch what still flows), the patience game of delaying a packet and
betting the observed links stay otherwise quiet, and the per-link rate the
latter depends on.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from ..client import Rates


def blocking_attack_prob(
    s: float, mu: float, lambda_M: float, lambda_R: float
) -> float:
    """Chance the attacker picks the target out after splitting the blockade.

    Blocking spreads residual real traffic lambda_R over s mixes, each of
    which keeps emitting its own loops at lambda_M; the target's exponential
    clock at rate mu races that background, giving s*mu/(s*lambda_M +
    lambda_R). The expression is a large-pool approximation, so values above
    1 are clamped with a warning.
    """
    if s <= 1:
        raise ValueError("splitting factor s must exceed 1: s=1 means no blockade")
    if mu <= 0:
        raise ValueError("mu must be positive")
    if lambda_M < 0 or lambda_R < 0:
        raise ValueError("rates must be non-negative")
    denom = s * lambda_M + lambda_R
    if denom <= 0:
        raise ValueError("attack needs competing traffic to race against")
    p = s * mu / denom
    if p > 1.0:
        warnings.warn(
            "blocking approximation exceeded 1, clamping; parameters are "
            "outside the large-pool regime",
            RuntimeWarning,
            stacklevel=2,
        )
        return 1.0
    return p


def delay_attack_prob(k_links: int, Lambda: float, Delta: float, t: float) -> float:
    """Chance that holding a packet leaves all k observed links silent.

    Each of the k links carries Poisson traffic at per-link rate Lambda; the
    probability no confusing packet appears before the deadline decays with
    the holding time t at rate Delta, giving exp(-k*Lambda*exp(-Delta*t)/Delta).
    """
    if k_links < 0:
        raise ValueError("link count must be non-negative")
    if Lambda < 0:
        raise ValueError("Lambda must be non-negative")
    if Delta <= 0:
        raise ValueError("Delta must be positive")
    if t < 0:
        raise ValueError("holding time must be non-negative")
    return math.exp(-k_links * Lambda * math.exp(-Delta * t) / Delta)


@dataclass(frozen=True)
class LinkParams:
    """Deployment shape: U users, N mixes, P providers, k_links adjacent
    nodes reachable per node, paths of ell inter-node hops, client and mix
    rates bundled in rates."""

    U: int
    N: int
    P: int
    k_links: int
    ell: int
    rates: Rates

    def __post_init__(self):
        if self.U < 0:
            raise ValueError("user count must be non-negative")
        if self.N < 1 or self.P < 1:
            raise ValueError("need at least one mix and one provider")
        if self.k_links < 1:
            raise ValueError("per-node connectivity must be positive")
        if self.ell < 1:
            raise ValueError("paths must cross at least one link")


def link_rate(params: LinkParams) -> float:
    """Mean packet rate on a single inter-node link.

    Every client packet crosses ell links and that volume spreads over
    k_links * (N + P) directed links; each mix's loop stream adds its share
    on top.
    """
    r = params.rates
    client_rate = r.lambda_P + r.lambda_L + r.lambda_D
    user_term = (
        params.U * params.ell * client_rate / (params.k_links * (params.N + params.P))
    )
    loop_term = params.ell * r.lambda_M / params.k_links
    return user_term + loop_term
