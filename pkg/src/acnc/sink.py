"""Destination node: DoF accounting, in-order decode bookkeeping, feedback
generation, and the optional Gaussian-elimination oracle."""

from .channel import ERASED
from .core import FeedbackBundle
from .gf256 import IncrementalDecoder
from .source import DofTracker


class SinkNode:
    """Fast-path destination for the coded protocols.

    Coverage accounting: a delivered packet adds a DoF when its rank bound
    exceeds the rank already held over the packet's span; the in-order
    prefix decodes as soon as coverage is contiguous.  With
    ``ack_innovative`` the feedback bit reports whether the DoF helped
    (used by the single-window multi-hop baseline) instead of plain
    delivery.

    In verification mode (``oracle=True``) the run is fully algebraic:
    real elimination of the received coefficient rows drives the feedback
    bits, the advertised window start, and the decode bookkeeping, while
    the counting accounting runs alongside as a passive shadow.  Every
    delivery where the two verdicts diverge is tallied; the shadow can
    only over-claim through an actual rank deficiency of the received row
    (a random-coefficient collision), and the matching under-claim a few
    deliveries later re-synchronizes it, so divergences stay rare and
    individually attributable instead of cascading.
    """

    def __init__(self, upstream_delay, ack_innovative=False, oracle=False):
        self.upstream_delay = upstream_delay
        self.ack_innovative = ack_innovative
        self.tracker = DofTracker()
        self.top = -1
        self.decode_times = {}
        self.oracle = IncrementalDecoder() if oracle else None
        self.oracle_decode_times = {}
        self._oracle_frontier = -1
        self.opportunities = 0
        self.rank_deficiencies = 0
        self.disagreements = 0

    @property
    def g(self):
        return self.tracker.g

    @property
    def frontier(self):
        return self.tracker.kp - 1

    def process_forward(self, item, t) -> FeedbackBundle:
        packet_slot = t - self.upstream_delay
        if item is ERASED:
            return FeedbackBundle(packet_slot, 0, window_start=self.decoded_count())
        pkt = item
        if pkt.w_max > self.top:
            self.top = pkt.w_max
        if self.oracle is not None and pkt.coefficients is not None:
            innovative = self._check_oracle(pkt, t)
        else:
            before = self.tracker.kp
            innovative = self.tracker.absorb(pkt.w_max, pkt.rank_bound)
            for i in range(before, self.tracker.kp):
                self.decode_times[i] = t
        ack = 1 if not self.ack_innovative or innovative else 0
        fb = FeedbackBundle(packet_slot, ack, window_start=self.decoded_count())
        if self.oracle is not None:
            fb.innovative = 1 if innovative else 0
        return fb

    def _check_oracle(self, pkt, t) -> bool:
        """Absorb via real elimination and tally the counting verdict the
        shadow accounting issues for the same delivery."""
        self.opportunities += 1
        claim = self.tracker.absorb(pkt.w_max, pkt.rank_bound)
        truth = self.oracle.absorb(pkt.coefficients) if pkt.coefficients else False
        if claim and not truth:
            self.rank_deficiencies += 1
        if claim != truth:
            self.disagreements += 1
        new_frontier = self.oracle.inorder_frontier()
        for i in range(self._oracle_frontier + 1, new_frontier + 1):
            self.decode_times[i] = t
            self.oracle_decode_times[i] = t
        self._oracle_frontier = new_frontier
        return truth

    def idle_feedback(self) -> FeedbackBundle:
        """Status-only bundle for slots without a delivery attempt; carries
        the decode frontier that anchors every upstream window."""
        return FeedbackBundle(None, None, window_start=self.decoded_count())

    def decoded_count(self):
        if self.oracle is not None:
            return self._oracle_frontier + 1
        return self.tracker.kp


class UncodedSink:
    """Destination for the per-hop selective-repeat baseline: raw packets,
    in-order frontier bookkeeping."""

    def __init__(self, upstream_delay):
        self.upstream_delay = upstream_delay
        self.received = set()
        self.frontier = -1
        self.decode_times = {}

    def process_forward(self, item, t) -> FeedbackBundle:
        packet_slot = t - self.upstream_delay
        if item is ERASED:
            return FeedbackBundle(packet_slot, 0)
        self.received.add(item.w_min)
        while self.frontier + 1 in self.received:
            self.frontier += 1
            self.decode_times[self.frontier] = t
        return FeedbackBundle(packet_slot, 1)

    def idle_feedback(self) -> FeedbackBundle:
        return FeedbackBundle(None, None)

    def decoded_count(self):
        return self.frontier + 1
