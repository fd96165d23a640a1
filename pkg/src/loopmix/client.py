"""Client traffic generation: payload, loop, and drop streams plus pulls.

A client runs three independent Poisson streams. The payload stream sends the
oldest queued message, or an indistinguishable cover packet when the queue is
empty, so the aggregate emission rate never depends on real activity. Loop
packets come back to the client's own inbox and double as a liveness check;
drop packets terminate at a random provider and vanish.

Message bodies are sealed end to end for the recipient, which is also what
lets a recipient tell real mail from the random dummies that pad every pull
response: only real items decrypt.
"""

from __future__ import annotations

import math
import struct
from collections import deque
from dataclasses import dataclass
from typing import Deque, List, Optional, Tuple

from . import crypto, packet as pkt
from .packet import HopFlags
from .topology import Topology, path_to_packet_hops, sample_forward_path
from .transport import PULL_ITEM_LEN

# Fixed-size sealed envelope: [32 ephemeral pub][16 tag + 4 length + body].
ENVELOPE_LEN = PULL_ITEM_LEN
_SEALED_PLAIN_LEN = ENVELOPE_LEN - crypto.GROUP_ELEMENT_LEN - crypto.AEAD_OVERHEAD
USER_MESSAGE_CAPACITY = _SEALED_PLAIN_LEN - 4

_LOOP_MARKER = b"CLILOOP1"

PACKET_REAL = "REAL"
PACKET_LOOP = "LOOP"
PACKET_DROP = "DROP"


class MessageTooLarge(Exception):
    pass


def seal_envelope(recipient_pub: crypto.GroupElement, message: bytes, rng) -> bytes:
    """Encrypt message into a fixed-size blob only the recipient can open."""
    if len(message) > USER_MESSAGE_CAPACITY:
        raise MessageTooLarge(f"{len(message)} > {USER_MESSAGE_CAPACITY}")
    plain = struct.pack(">I", len(message)) + message
    plain += bytes(_SEALED_PLAIN_LEN - len(plain))
    return crypto.e2e_seal(recipient_pub, plain, rng)


def open_envelope(secret_key: bytes, blob: bytes) -> Optional[bytes]:
    """Decrypt a pull item; None when it is a dummy or not addressed to us."""
    if len(blob) != ENVELOPE_LEN:
        return None
    try:
        plain = crypto.e2e_open(secret_key, blob)
    except crypto.GroupError:
        return None
    (length,) = struct.unpack(">I", plain[:4])
    if length > USER_MESSAGE_CAPACITY:
        return None
    return plain[4 : 4 + length]


@dataclass(frozen=True)
class Rates:
    """Poisson intensity bundle: the three client streams, mix loops, and the
    per-hop delay parameter mu (mean hop delay is 1/mu)."""

    lambda_P: float
    lambda_L: float
    lambda_D: float
    lambda_M: float
    mu: float

    def __post_init__(self):
        for name in ("lambda_P", "lambda_L", "lambda_D", "lambda_M"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be finite and non-negative")
        if not math.isfinite(self.mu) or self.mu <= 0:
            raise ValueError("mu must be finite and positive")


def aggregate_output_rate(rates: Rates) -> float:
    """Total client emission intensity; constant regardless of queued mail."""
    return rates.lambda_P + rates.lambda_L + rates.lambda_D


@dataclass
class ClientConfig:
    client_id: str
    secret_key: bytes
    provider_id: str
    token: bytes
    rates: Rates
    pull_interval_s: float = 10.0
    pull_max_items: int = 5

    def __post_init__(self):
        if self.pull_interval_s <= 0:
            raise ValueError("pull_interval_s must be positive")


class Client:
    def __init__(self, cfg: ClientConfig):
        self.cfg = cfg
        self.buffer: Deque[Tuple[str, bytes]] = deque()
        self.outstanding_loops: dict[bytes, float] = {}
        self.loop_latencies: List[float] = []
        self.sent_real = 0
        self.sent_payload_cover = 0
        self.loops_sent = 0
        self.loops_returned = 0
        self.drops_sent = 0
        self.received_real = 0
        self.received_dummy = 0

    def enqueue_message(self, recipient_id: str, message: bytes) -> None:
        if len(message) > USER_MESSAGE_CAPACITY:
            raise MessageTooLarge(f"{len(message)} > {USER_MESSAGE_CAPACITY}")
        self.buffer.append((recipient_id, message))

    def queue_depth(self) -> int:
        return len(self.buffer)

    def _check_depth(self, topology: Topology) -> None:
        if topology.n_layers + 2 > pkt.MAX_HOPS:
            raise ValueError("path exceeds the packet hop budget")

    def _mix_path(self, topology: Topology, dest_provider_id: str, rng):
        own = topology.provider_of(self.cfg.client_id)
        dest = topology.node(dest_provider_id)
        return sample_forward_path(topology, own, dest, rng)

    def _build(self, descriptors, recipient_id, body, flags, rng):
        delays = [rng.expovariate(self.cfg.rates.mu) for _ in descriptors]
        hops = path_to_packet_hops(descriptors, delays, "", flags)
        return pkt.create_packet(hops, recipient_id, body, rng)

    def payload_tick(self, topology: Topology, rng, now: float):
        """Emit one payload-stream packet: queued mail, else drop cover.

        Returns (packet, kind, next_tick_time) where kind is REAL or DROP.
        """
        if self.cfg.rates.lambda_P <= 0:
            raise ValueError("payload stream disabled")
        self._check_depth(topology)
        if self.buffer:
            recipient_id, message = self.buffer.popleft()
            recipient = topology.client(recipient_id)
            descriptors = self._mix_path(topology, recipient.provider_id, rng)
            body = seal_envelope(recipient.pubkey, message, rng)
            packet = self._build(descriptors, recipient_id, body, HopFlags.FINAL, rng)
            self.sent_real += 1
            kind = PACKET_REAL
        else:
            packet = self._drop_packet(topology, rng)
            self.sent_payload_cover += 1
            kind = PACKET_DROP
        return packet, kind, now + rng.expovariate(self.cfg.rates.lambda_P)

    def loop_tick(self, topology: Topology, rng, now: float):
        """Emit one self-loop through the mix layers back to our own inbox.

        Returns (packet, next_tick_time).
        """
        if self.cfg.rates.lambda_L <= 0:
            raise ValueError("loop stream disabled")
        self._check_depth(topology)
        own = topology.provider_of(self.cfg.client_id)
        descriptors = self._mix_path(topology, own.id, rng)
        nonce = rng.randbytes(16)
        marker = _LOOP_MARKER + nonce + struct.pack(">d", now)
        me = topology.client(self.cfg.client_id)
        body = seal_envelope(me.pubkey, marker, rng)
        packet = self._build(
            descriptors, self.cfg.client_id, body, HopFlags.FINAL, rng
        )
        self.outstanding_loops[nonce] = now
        if len(self.outstanding_loops) > 10_000:
            oldest = min(self.outstanding_loops, key=self.outstanding_loops.get)
            del self.outstanding_loops[oldest]
        self.loops_sent += 1
        return packet, now + rng.expovariate(self.cfg.rates.lambda_L)

    def drop_tick(self, topology: Topology, rng, now: float):
        """Emit one drop-cover packet to a uniformly chosen provider."""
        if self.cfg.rates.lambda_D <= 0:
            raise ValueError("drop stream disabled")
        self._check_depth(topology)
        packet = self._drop_packet(topology, rng)
        self.drops_sent += 1
        return packet, now + rng.expovariate(self.cfg.rates.lambda_D)

    def _drop_packet(self, topology: Topology, rng):
        dest = topology.providers[rng.randrange(len(topology.providers))]
        descriptors = self._mix_path(topology, dest.id, rng)
        body = rng.randbytes(USER_MESSAGE_CAPACITY)
        return self._build(descriptors, self.cfg.client_id, body, HopFlags.DROP, rng)

    def process_pull_items(self, blobs, now: float) -> List[bytes]:
        """Sort pull items into real mail, returned loops, and dummies."""
        messages: List[bytes] = []
        for blob in blobs:
            plain = open_envelope(self.cfg.secret_key, blob)
            if plain is None:
                self.received_dummy += 1
                continue
            if plain.startswith(_LOOP_MARKER) and len(plain) == len(_LOOP_MARKER) + 24:
                nonce = plain[len(_LOOP_MARKER) : len(_LOOP_MARKER) + 16]
                (emitted,) = struct.unpack(">d", plain[-8:])
                if nonce in self.outstanding_loops:
                    del self.outstanding_loops[nonce]
                    self.loops_returned += 1
                    self.loop_latencies.append(now - emitted)
                continue
            self.received_real += 1
            messages.append(plain)
        return messages
