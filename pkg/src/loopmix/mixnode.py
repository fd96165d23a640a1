"""Continuous-time Poisson mix: pool scheduling, dedup, and self-loop cover.

Each accepted packet waits for its sender-chosen delay and leaves in
release-time order (FIFO on ties), which makes a loaded mix an M/M/infinity
queue: Poisson(lambda) in, Pois(lambda/mu) pool, Poisson(lambda) out. The same
MixPool container drives both the live node and the simulator.
"""

from __future__ import annotations

import heapq
import json
import struct
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

from . import crypto, packet as pkt
from .packet import HopFlags, HopSpec, SphinxPacket
from .topology import Topology, path_to_packet_hops

HEALTHY = "HEALTHY"
UNDER_ATTACK = "UNDER_ATTACK"

REPLAY_HORIZON_S = 3600.0

_LOOP_MAGIC = b"MIXLOOP1"


class TopologyTooSmall(Exception):
    pass


@dataclass
class MixPool:
    """Pending messages keyed by release time, plus replay and size history.

    record_history is off by default for the live node; the simulator and the
    queue-law tests switch it on to integrate pool size over time.
    """

    record_history: bool = False
    pending: list = field(default_factory=list)
    replay_cache: dict = field(default_factory=dict)
    size_history: list = field(default_factory=list)
    _seq: int = 0

    def __len__(self) -> int:
        return len(self.pending)

    def add(self, release_time: float, item: Any, now: Optional[float] = None) -> None:
        heapq.heappush(self.pending, (release_time, self._seq, item))
        self._seq += 1
        if self.record_history:
            self.size_history.append(
                (release_time if now is None else now, len(self.pending))
            )

    def peek_time(self) -> Optional[float]:
        return self.pending[0][0] if self.pending else None

    def next_release(self, now: float):
        """Pop the earliest entry due at or before now; None when nothing is."""
        if not self.pending or self.pending[0][0] > now:
            return None
        release_time, _, item = heapq.heappop(self.pending)
        if self.record_history:
            self.size_history.append((release_time, len(self.pending)))
        return release_time, item

    def seen_replay(self, tag: bytes, now: float) -> bool:
        """Record the tag; True when it was already in the cache."""
        horizon = now - REPLAY_HORIZON_S
        if len(self.replay_cache) > 100_000:
            for k in [k for k, t in self.replay_cache.items() if t < horizon]:
                del self.replay_cache[k]
        if tag in self.replay_cache and self.replay_cache[tag] >= horizon:
            return True
        self.replay_cache[tag] = now
        return False


@dataclass
class MixConfig:
    secret_key: bytes
    node_id: str
    addr: str
    layer_index: int
    lambda_M: float = 0.0
    mu: float = 1.0
    queue_high_watermark: int = 100_000
    loop_return_fraction_r: float = 0.8

    def __post_init__(self):
        if self.mu <= 0:
            raise ValueError("mu must be positive")
        if self.lambda_M < 0:
            raise ValueError("lambda_M must be non-negative")
        if self.queue_high_watermark <= 0:
            raise ValueError("watermark must be positive")
        if not 0 < self.loop_return_fraction_r <= 1:
            raise ValueError("r must lie in (0, 1]")


def loop_health(window_loops_sent: int, window_loops_returned: int, r: float) -> str:
    if window_loops_sent < 1:
        raise ValueError("need at least one loop sent in the window")
    return HEALTHY if window_loops_returned / window_loops_sent >= r else UNDER_ATTACK


def encode_loop_payload(nonce: bytes, emitted_at: float) -> bytes:
    return _LOOP_MAGIC + nonce + struct.pack(">d", emitted_at)


def decode_loop_payload(plain: bytes) -> Optional[tuple[bytes, float]]:
    if len(plain) != len(_LOOP_MAGIC) + 16 + 8 or not plain.startswith(_LOOP_MAGIC):
        return None
    nonce = plain[len(_LOOP_MAGIC) : len(_LOOP_MAGIC) + 16]
    (emitted,) = struct.unpack(">d", plain[-8:])
    return nonce, emitted


class MixNode:
    """Processing node: verifies, deduplicates, pools, and emits loops."""

    def __init__(self, cfg: MixConfig, record_history: bool = False):
        self.cfg = cfg
        self.pool = MixPool(record_history=record_history)
        self.outstanding_loops: dict[bytes, float] = {}
        self.loop_latencies: list[float] = []
        self.last_loop_first_hop = ""
        self.received = 0
        self.forwarded = 0
        self.dropped_replay = 0
        self.dropped_mac = 0
        self.dropped_overflow = 0
        self.loops_sent = 0
        self.loops_returned = 0
        # Providers install a handler for Deliver/Drop results; a plain mix
        # treats terminal packets (other than its own returning loops) as junk.
        self.terminal_handler: Optional[Callable[[pkt.ProcessResult, float], None]] = None

    def on_receive(self, packet: SphinxPacket, now: float):
        """Process one packet; returns the ProcessResult or None if dropped."""
        self.received += 1
        try:
            result = pkt.process_packet(self.cfg.secret_key, packet)
        except (pkt.MacMismatch, pkt.MalformedPacket):
            self.dropped_mac += 1
            return None
        if self.pool.seen_replay(result.replay_tag, now):
            self.dropped_replay += 1
            return None
        if isinstance(result, pkt.Relay):
            if len(self.pool) >= self.cfg.queue_high_watermark:
                self.dropped_overflow += 1
                return None
            self.pool.add(now + result.next.delay_s, result, now=now)
            return result
        if isinstance(result, pkt.Deliver) and result.recipient_id == self.cfg.node_id:
            if self._absorb_loop(result.payload, now):
                return result
        if self.terminal_handler is not None:
            self.terminal_handler(result, now)
            return result
        self.dropped_mac += 1
        return None

    def _absorb_loop(self, body: bytes, now: float) -> bool:
        try:
            plain = crypto.e2e_open(self.cfg.secret_key, body)
        except crypto.GroupError:
            return False
        decoded = decode_loop_payload(plain)
        if decoded is None:
            return False
        nonce, emitted = decoded
        if nonce in self.outstanding_loops:
            del self.outstanding_loops[nonce]
            self.loops_returned += 1
            self.loop_latencies.append(now - emitted)
            return True
        return False

    def next_release(self, now: float):
        """Earliest due (release_time, packet, next) or None; counts it sent."""
        popped = self.pool.next_release(now)
        if popped is None:
            return None
        release_time, relay = popped
        self.forwarded += 1
        return release_time, relay.packet, relay.next

    def generate_mix_loop(self, topology: Topology, rng, now: float):
        """Build one self-loop: remaining layers, a provider, back to self.

        Returns (send_time, packet) with send_time = now + Exp(lambda_M).
        """
        if self.cfg.lambda_M <= 0:
            raise ValueError("loops disabled: lambda_M is zero")
        if topology.n_layers < 1 or not topology.providers:
            raise TopologyTooSmall("need at least one layer and one provider")
        if topology.n_layers + 1 > pkt.MAX_HOPS:
            raise TopologyTooSmall("loop path exceeds the packet hop budget")

        descriptors = []
        for layer in range(self.cfg.layer_index + 1, topology.n_layers):
            nodes = topology.layers[layer]
            descriptors.append(nodes[rng.randrange(len(nodes))])
        descriptors.append(topology.providers[rng.randrange(len(topology.providers))])
        for layer in range(0, self.cfg.layer_index):
            nodes = topology.layers[layer]
            descriptors.append(nodes[rng.randrange(len(nodes))])
        me = topology.node(self.cfg.node_id)
        descriptors.append(me)

        send_time = now + rng.expovariate(self.cfg.lambda_M)
        nonce = rng.randbytes(16)
        body = crypto.e2e_seal(me.pubkey, encode_loop_payload(nonce, send_time), rng)
        delays = [rng.expovariate(self.cfg.mu) for _ in descriptors]
        hops = path_to_packet_hops(descriptors, delays, self.cfg.addr, HopFlags.FINAL)
        loop_packet = pkt.create_packet(hops, self.cfg.node_id, body, rng)

        self.outstanding_loops[nonce] = send_time
        if len(self.outstanding_loops) > 10_000:
            oldest = min(self.outstanding_loops, key=self.outstanding_loops.get)
            del self.outstanding_loops[oldest]
        self.loops_sent += 1
        self.last_loop_first_hop = descriptors[0].addr
        return send_time, loop_packet

    def health(self) -> str:
        if self.loops_sent < 1:
            return HEALTHY
        return loop_health(
            self.loops_sent, self.loops_returned, self.cfg.loop_return_fraction_r
        )

    def metrics_line(self, now: float) -> str:
        return json.dumps(
            {
                "time": now,
                "pool_size": len(self.pool),
                "received": self.received,
                "forwarded": self.forwarded,
                "dropped_replay": self.dropped_replay,
                "dropped_mac": self.dropped_mac,
                "loops_sent": self.loops_sent,
                "loops_returned": self.loops_returned,
            }
        )
