"""Continuous-time mix network with cover traffic and analysis tooling.

The package splits into a wire side and a study side. On the wire side,
`packet` builds and peels layered onion packets, `mixnode` and `provider`
implement the relaying and mailbox roles, `client` drives the three Poisson
sending streams, and `runtime` binds all of them to UDP sockets. On the study
side, `analysis` holds the closed-form match probabilities, entropy updates,
and trace predicates, and `simulator` reproduces them with seeded experiments.
"""

from .packet import (
    HEADER_LEN,
    MAX_HOPS,
    MESSAGE_CAPACITY,
    PACKET_LEN,
    PAYLOAD_LEN,
    Deliver,
    Drop,
    HopFlags,
    HopSpec,
    MacMismatch,
    MalformedPacket,
    Relay,
    SphinxPacket,
    create_packet,
    process_packet,
)
from .topology import (
    ClientDescriptor,
    MixDescriptor,
    ProviderDescriptor,
    Topology,
    load_directory,
    loads_directory,
)

__version__ = "0.1.0"

__all__ = [
    "HEADER_LEN",
    "MAX_HOPS",
    "MESSAGE_CAPACITY",
    "PACKET_LEN",
    "PAYLOAD_LEN",
    "Deliver",
    "Drop",
    "HopFlags",
    "HopSpec",
    "MacMismatch",
    "MalformedPacket",
    "Relay",
    "SphinxPacket",
    "create_packet",
    "process_packet",
    "ClientDescriptor",
    "MixDescriptor",
    "ProviderDescriptor",
    "Topology",
    "load_directory",
    "loads_directory",
    "__version__",
]
