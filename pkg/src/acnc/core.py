"""Shared vocabulary: network configuration, coded packets, feedback bundles."""

from dataclasses import dataclass, field


# Packet kinds.  FEC kinds are distinguished so transmission logs can be
# audited mechanism by mechanism.
NEW = 1
FEC_AP = 2      # a-priori (scheduled every RTT)
FEC_PO = 3      # posterior (feedback triggered)
FEC_EOW = 4     # end-of-window repeat

KIND_NAMES = {NEW: "NEW", FEC_AP: "FEC_AP", FEC_PO: "FEC_PO", FEC_EOW: "FEC_EOW"}

FEC_KINDS = (FEC_AP, FEC_PO, FEC_EOW)


class ProtocolViolation(Exception):
    """A module was driven outside its contract (double push, early step...)."""


@dataclass(frozen=True)
class NetworkConfig:
    """Static parameters of one simulated chain.

    ``rtt_per_hop`` entries must be even so the one-way delay RTT/2 is an
    integer number of slots.  ``max_window`` caps the coding window span
    (end-of-window mechanism), ``delivery_window`` is the averaging window
    for the delivery-rate series.
    """

    node_count: int
    erasure_rates: tuple
    rtt_per_hop: tuple
    horizon: int
    arrival_rate: float
    alpha: float = 1.0
    threshold: float = 0.0
    max_window: int = 0          # 0 -> defaulted to 2 * global RTT
    delivery_window: int = 500
    seed: int = 0

    @property
    def hops(self):
        return self.node_count - 1

    @property
    def global_rtt(self):
        return sum(self.rtt_per_hop)

    @property
    def one_way_delays(self):
        return tuple(r // 2 for r in self.rtt_per_hop)

    def initial_delay(self, n):
        """First slot at which node n may transmit."""
        return sum(self.rtt_per_hop[i] // 2 for i in range(n))

    @property
    def window_cap(self):
        return self.max_window if self.max_window > 0 else 2 * self.global_rtt


def validate_config(cfg: NetworkConfig) -> list:
    """Return every violated invariant as a message; empty list means ok."""
    errors = []
    if cfg.node_count < 2:
        errors.append("node_count < 2")
    if len(cfg.erasure_rates) != cfg.node_count - 1:
        errors.append("erasure_rates length must be node_count - 1")
    if len(cfg.rtt_per_hop) != cfg.node_count - 1:
        errors.append("rtt_per_hop length must be node_count - 1")
    for i, e in enumerate(cfg.erasure_rates):
        if not 0.0 <= e <= 1.0:
            errors.append(f"erasure_rates[{i}] not in [0,1]")
    for i, r in enumerate(cfg.rtt_per_hop):
        if r <= 0:
            errors.append(f"rtt_per_hop[{i}] not positive")
        elif r % 2 != 0:
            errors.append(f"odd RTT at hop {i}")
    if cfg.horizon < 0:
        errors.append("horizon negative")
    if not 0.0 <= cfg.arrival_rate <= 1.0:
        errors.append("arrival_rate not in [0,1]")
    if cfg.alpha < 0:
        errors.append("alpha negative")
    if cfg.max_window < 0:
        errors.append("max_window negative")
    if cfg.delivery_window <= 0:
        errors.append("delivery_window not positive")
    elif cfg.horizon > 0 and cfg.delivery_window >= cfg.horizon:
        errors.append("delivery_window must be < horizon")
    return errors


def round_half_up(x: float) -> int:
    """Nearest integer, halves away from zero (used for the a-priori FEC count)."""
    import math
    return int(math.floor(x + 0.5))


@dataclass
class CodedPacket:
    """One transmitted degree of freedom.

    ``w_min``/``w_max`` are information-packet indices spanned by the
    combination (``w_max < w_min`` marks a content-free filler used by the
    never-idle baselines).  ``rank_bound`` is the dimension of the sender's
    emission space counted from packet 0; a receiver holding fewer DoFs than
    this gains one from a successful delivery.  ``coefficients`` is a sparse
    mapping {information-packet index: field element} and only present in
    verification mode.
    """

    origin: int
    created_at: int
    w_min: int
    w_max: int
    kind: int
    rank_bound: int
    coefficients: object = None
    payload: object = None


@dataclass
class FeedbackBundle:
    """Per-slot feedback for one observed packet plus aggregated triples.

    ``downstream`` entries are ``(node_index, slot, ack_bit)`` where
    ``node_index`` is the node that produced the bit (so it concerns forward
    channel ``node_index - 1``).  ``window_start`` is the sender of the
    bundle's own window start, which anchors the whole chain of coding
    windows to the destination's decode frontier.  ``innovative`` is only
    set in verification mode: whether the acked delivery actually added a
    degree of freedom, letting the sender retract an absorb that died to a
    random-coefficient collision.
    """

    acked_packet_created_at: int
    ack: int
    downstream: list = field(default_factory=list)
    window_start: int = 0
    innovative: int = None
