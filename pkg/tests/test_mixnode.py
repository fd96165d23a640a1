"""Mix node behaviour: pooling, dedup, loops, health, and the queue law."""

import json
import random

import pytest
import scipy.stats as stats

from loopmix import crypto
from loopmix.mixnode import (
    HEALTHY,
    UNDER_ATTACK,
    MixConfig,
    MixNode,
    MixPool,
    TopologyTooSmall,
    loop_health,
)
from loopmix.packet import Deliver, HopFlags, HopSpec, Relay, create_packet
from loopmix.simulator.queues import run_pool_experiment

from conftest import build_network


def make_mix(seed=0, mu=1.0, **cfg_kwargs):
    rng = random.Random(seed)
    sk, pub = crypto.generate_keypair(rng)
    cfg = MixConfig(
        secret_key=sk,
        node_id="m0",
        addr="127.0.0.1:9001",
        layer_index=0,
        mu=mu,
        **cfg_kwargs,
    )
    return MixNode(cfg), pub, rng


def relay_packet(pub, delay, rng, next_addr="10.0.0.9:9000"):
    """Two-hop packet whose first hop is the mix under test."""
    _, pub2 = crypto.generate_keypair(rng)
    path = [
        (pub, HopSpec(next_addr=next_addr, delay_s=delay, flags=HopFlags.NONE)),
        (pub2, HopSpec(next_addr="10.0.0.8:9000", delay_s=0.1, flags=HopFlags.FINAL)),
    ]
    return create_packet(path, "rcpt", b"x", rng)


def test_on_receive_schedules_at_now_plus_delay():
    node, pub, rng = make_mix()
    packet = relay_packet(pub, 1.5, rng)
    result = node.on_receive(packet, now=10.0)
    assert isinstance(result, Relay)
    assert len(node.pool) == 1
    assert node.pool.peek_time() == pytest.approx(11.5)


def test_duplicate_packet_discarded():
    node, pub, rng = make_mix()
    packet = relay_packet(pub, 1.0, rng)
    assert node.on_receive(packet, now=0.0) is not None
    assert node.on_receive(packet, now=0.5) is None
    assert len(node.pool) == 1
    assert node.dropped_replay == 1


def test_bad_mac_counted_and_pool_unchanged():
    node, pub, rng = make_mix()
    packet = relay_packet(pub, 1.0, rng)
    raw = bytearray(packet.to_bytes())
    raw[40] ^= 0xFF
    from loopmix.packet import SphinxPacket

    assert node.on_receive(SphinxPacket.from_bytes(bytes(raw)), now=0.0) is None
    assert len(node.pool) == 0
    assert node.dropped_mac == 1


def test_pool_next_release_timing():
    pool = MixPool()
    pool.add(11.5, "a")
    pool.add(12.0, "b")
    assert pool.next_release(11.6) == (11.5, "a")
    assert pool.next_release(11.6) is None
    assert pool.next_release(12.4) == (12.0, "b")


def test_pool_equal_release_times_pop_in_arrival_order():
    pool = MixPool()
    pool.add(5.0, "first")
    pool.add(5.0, "second")
    assert pool.next_release(5.0) == (5.0, "first")
    assert pool.next_release(5.0) == (5.0, "second")


def test_emission_order_follows_release_time_not_arrival():
    node, pub, rng = make_mix()
    slow = relay_packet(pub, 5.0, rng, next_addr="10.0.0.1:1")
    fast = relay_packet(pub, 1.0, rng, next_addr="10.0.0.2:1")
    node.on_receive(slow, now=0.0)
    node.on_receive(fast, now=0.1)
    assert node.next_release(0.5) is None
    release, _, hop = node.next_release(1.2)
    assert release == pytest.approx(1.1)
    assert hop.next_addr == "10.0.0.2:1"
    release, _, hop = node.next_release(6.0)
    assert release == pytest.approx(5.0)
    assert hop.next_addr == "10.0.0.1:1"
    assert node.forwarded == 2


def test_no_replay_tag_forwarded_twice():
    node, pub, rng = make_mix(seed=3)
    packets = [relay_packet(pub, 0.5, rng) for _ in range(30)]
    feeds = packets + rng.choices(packets, k=40)
    rng.shuffle(feeds)
    tags = []
    for i, packet in enumerate(feeds):
        result = node.on_receive(packet, now=i * 0.01)
        if result is not None:
            tags.append(result.replay_tag)
    assert len(tags) == 30
    assert len(set(tags)) == 30
    assert node.dropped_replay == 40
    assert len(node.pool) == 30


def test_overflow_drops_above_watermark():
    node, pub, rng = make_mix(queue_high_watermark=5)
    results = [node.on_receive(relay_packet(pub, 1.0, rng), now=0.0) for _ in range(8)]
    assert len(node.pool) == 5
    assert node.dropped_overflow == 3
    assert results[5:] == [None, None, None]


def test_deliver_at_plain_mix_is_junk():
    node, pub, rng = make_mix()
    path = [(pub, HopSpec("10.0.0.8:1", 0.2, HopFlags.FINAL))]
    packet = create_packet(path, "not-this-mix", b"hi", rng)
    assert node.on_receive(packet, now=0.0) is None
    assert node.dropped_mac == 1
    assert len(node.pool) == 0


def test_pool_law_mean_distribution_and_output():
    # M/M/inf: Poisson(20) in, Exp(2) hold -> pool ~ Poisson(10), output
    # gaps Exp(20). Desk-scale version of the acceptance run.
    lam, mu = 20.0, 2.0
    run = run_pool_experiment(lam, mu, duration=400.0, seed=5, sample_every=1.0)
    assert run.time_avg_size == pytest.approx(lam / mu, abs=0.6)

    sizes = run.sampled_sizes[20:]
    n = len(sizes)
    mean = lam / mu
    # categories {<=4}, {5}, ..., {15}, {>=16} keep every expected count > 5
    lo, hi = 5, 16
    observed = [0] * (hi - lo + 2)
    for s in sizes:
        observed[min(max(s - lo + 1, 0), hi - lo + 1)] += 1
    expected = (
        [stats.poisson.cdf(lo - 1, mean)]
        + [stats.poisson.pmf(k, mean) for k in range(lo, hi)]
        + [stats.poisson.sf(hi - 1, mean)]
    )
    expected = [p_k * n for p_k in expected]
    _, p = stats.chisquare(observed, f_exp=expected)
    assert p > 0.01

    departures = [t for t in run.departure_times if t > 20.0]
    gaps = [b - a for a, b in zip(departures, departures[1:])]
    ks = stats.kstest(gaps, "expon", args=(0, 1 / lam))
    assert ks.pvalue > 0.01


def test_mix_loop_gaps_are_exponential():
    net = build_network(layers=1, per_layer=1, n_providers=1, client_specs=(("a", "prov-0"),))
    node = net.mixes["mix-0-0"]
    rng = random.Random(11)
    now, gaps = 0.0, []
    for _ in range(10_000):
        send_time, _ = node.generate_mix_loop(net.topology, rng, now)
        gaps.append(send_time - now)
        now = send_time
    ks = stats.kstest(gaps, "expon", args=(0, 1 / node.cfg.lambda_M))
    assert ks.pvalue > 0.01
    assert node.loops_sent == 10_000


def test_returned_loop_recognized(network):
    node = network.mixes["mix-0-0"]
    rng = random.Random(7)
    send_time, packet = node.generate_mix_loop(network.topology, rng, now=0.0)
    first = network.node_for_addr(node.last_loop_first_hop)
    first_id = first.cfg.node_id if isinstance(first, MixNode) else first.node.cfg.node_id
    result = network.route(packet, first_id, now=send_time)
    assert isinstance(result, Deliver)
    assert node.loops_returned == 1
    assert node.loop_latencies[0] > 0
    assert node.health() == HEALTHY


def test_lambda_m_zero_never_builds_loops(network):
    node = network.providers["prov-0"].node
    assert node.cfg.lambda_M == 0.0
    with pytest.raises(ValueError):
        node.generate_mix_loop(network.topology, random.Random(0), now=0.0)
    assert node.loops_sent == 0


def test_loop_path_must_fit_hop_budget():
    net = build_network(layers=5, per_layer=1, n_providers=1, client_specs=(("a", "prov-0"),))
    with pytest.raises(TopologyTooSmall):
        net.mixes["mix-0-0"].generate_mix_loop(net.topology, random.Random(0), now=0.0)


def test_loop_health_thresholds():
    assert loop_health(100, 90, 0.8) == HEALTHY
    assert loop_health(100, 50, 0.8) == UNDER_ATTACK
    assert loop_health(10, 10, 1.0) == HEALTHY
    with pytest.raises(ValueError):
        loop_health(0, 0, 0.8)


def test_config_validation():
    sk, _ = crypto.generate_keypair(random.Random(0))
    base = dict(secret_key=sk, node_id="m", addr="a:1", layer_index=0)
    with pytest.raises(ValueError):
        MixConfig(**base, mu=0.0)
    with pytest.raises(ValueError):
        MixConfig(**base, lambda_M=-1.0)
    with pytest.raises(ValueError):
        MixConfig(**base, queue_high_watermark=0)
    with pytest.raises(ValueError):
        MixConfig(**base, loop_return_fraction_r=0.0)
    with pytest.raises(ValueError):
        MixConfig(**base, loop_return_fraction_r=1.5)


def test_metrics_line_schema():
    node, pub, rng = make_mix()
    node.on_receive(relay_packet(pub, 1.0, rng), now=0.0)
    line = json.loads(node.metrics_line(12.5))
    assert set(line) == {
        "time",
        "pool_size",
        "received",
        "forwarded",
        "dropped_replay",
        "dropped_mac",
        "loops_sent",
        "loops_returned",
    }
    assert line["time"] == 12.5
    assert line["pool_size"] == 1
    assert line["received"] == 1
