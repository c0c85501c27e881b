"""Erasure-rate estimation from feedback, forward-bottleneck identification,
and backward feedback aggregation."""

from .core import FeedbackBundle, ProtocolViolation


class EstimatorState:
    """Per-node view of the downstream channels.

    Node ``n`` estimates channels ``n .. n_channels-1`` from its own channel's
    acks plus the aggregated triples relayed back from further nodes.  The
    estimate is 1 minus the mean ack bit over the full received history
    (channels are static, so no forgetting window).  Before any feedback the
    prior is 0 (optimistic: no FEC until evidence of loss).
    """

    def __init__(self, node_index, n_channels):
        self.node_index = node_index
        self.n_channels = n_channels
        # (acks, total) per channel; indices < node_index stay unused
        self._acks = [0] * n_channels
        self._total = [0] * n_channels
        # triples received but not yet forwarded upstream
        self.pending_upstream = []

    def record(self, channel, ack_bit):
        if channel < self.node_index:
            raise ProtocolViolation(
                f"node {self.node_index} got feedback for upstream channel {channel}")
        self._acks[channel] += ack_bit
        self._total[channel] += 1

    def ingest_feedback(self, fb: FeedbackBundle):
        """Fold one bundle from the next node into the histories.

        The bundle's local bit concerns this node's own forward channel; each
        downstream triple (i, t', bit) concerns channel i-1.  Every triple is
        also queued for one-time forwarding to the previous node.  A ``None``
        local bit marks a status-only bundle (no packet observed that slot):
        it contributes no sample but still relays triples and the window
        start.
        """
        n = self.node_index
        if fb.ack is not None:
            self.record(n, fb.ack)
            self.pending_upstream.append((n + 1, fb.acked_packet_created_at, fb.ack))
        for (i, t_prime, bit) in fb.downstream:
            if i - 1 <= n:
                raise ProtocolViolation(
                    f"malformed bundle: downstream triple for channel {i - 1} at node {n}")
            self.record(i - 1, bit)
        self.pending_upstream.extend(fb.downstream)

    def epsilon_hat(self, channel) -> float:
        t = self._total[channel]
        if t == 0:
            return 0.0
        return 1.0 - self._acks[channel] / t

    def sample_count(self, channel) -> int:
        return self._total[channel]

    def bottleneck(self) -> int:
        """Channel index with the highest estimated erasure rate from this
        node to the destination; ties break toward the smallest index."""
        best = self.node_index
        best_eps = self.epsilon_hat(best)
        for i in range(self.node_index + 1, self.n_channels):
            e = self.epsilon_hat(i)
            if e > best_eps:
                best, best_eps = i, e
        return best

    def build_outgoing_bundle(self, local_ack, packet_slot,
                              window_start=0) -> FeedbackBundle:
        """Bundle this slot's own observation with every stored triple not
        yet forwarded."""
        fb = FeedbackBundle(packet_slot, local_ack, self.pending_upstream,
                            window_start)
        self.pending_upstream = []
        return fb
