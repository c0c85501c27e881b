"""The three comparison protocols: the never-idle re-encoding variant is
built directly on the relay module; this file adds the single-window
multi-hop mixer and per-hop selective-repeat ARQ."""

from collections import deque

from .channel import ERASED
from .core import NEW, FEC_PO, CodedPacket, FeedbackBundle
from .estimation import EstimatorState
from .gf256 import IncrementalDecoder, gf_mul
from .source import SourceNode, coeff_rng, dof_rate_gap, NNF_IDLE


class MpmhSource(SourceNode):
    """Adaptive source keyed to the whole-path round trip.

    Feedback comes from the destination only: its per-delivery bits report
    whether the delivered combination added a DoF, relayed back through the
    chain as aggregated triples, and its decode frontier rides the bundles'
    window-start field hop by hop.  The rate control runs on the
    destination's DoF count; the window start follows the decode frontier so
    relays never drop content the destination still needs.
    """

    def __init__(self, cfg, verify=False):
        super().__init__(cfg, verify, never_idle=True)
        self.rtt = cfg.global_rtt
        self.sink_index = cfg.node_count - 1
        self.g_sink = 0                # destination DoF count from its bits
        self.recent = deque()          # (slot, kind) of recent emissions

    def local_eps(self):
        """Bottleneck loss over the channels with delivery-based bits.  The
        destination's bits report innovation, not delivery, so they read
        high whenever it is already caught up and cannot serve as a loss
        estimate."""
        return max(self.est.epsilon_hat(i) for i in range(self.cfg.hops - 1))

    def _emit(self, t, kind, rank_bound, end=None):
        self.recent.append((t, kind))
        return super()._emit(t, kind, rank_bound, end)

    def _pending(self, t):
        """Emissions whose destination verdict cannot have returned yet.
        The local channel acks resolve the inherited in-flight counters far
        too early for a whole-path window, so pipeline slack is taken over
        the global round trip instead."""
        while self.recent and t - self.recent[0][0] >= self.rtt:
            self.recent.popleft()
        new = sum(1 for (_, k) in self.recent if k == NEW)
        return new, len(self.recent) - new

    def delta(self):
        new, fec = self._pending(self._now)
        md = self.out_end + 1 - self.g_sink - new
        return dof_rate_gap(md, 0, self.local_eps(), new, fec)

    def _fec_span(self):
        # relays re-mix everything they hold, so repairs carry the full window
        return self.out_end, self.out_end + 1

    def step(self, t):
        self._now = t
        return super().step(t)

    def process_feedback(self, fb, t):
        self.est.ingest_feedback(fb)
        self._resolve(fb)
        for (i, slot, bit) in fb.downstream:
            if i == self.sink_index and bit:
                self.g_sink += 1
        new_wmin = min(fb.window_start, self.out_end + 1)
        if new_wmin > self.w_min:
            self._advance(new_wmin)


class MpmhRelay:
    """Windowless re-encoder: every slot it transmits one mix of everything
    it holds.  Held rows are dropped once the incoming window start has moved
    past their span (the source only advances it on destination DoFs, so the
    dropped content is already held downstream).

    The rank stamp on each emission is the cumulative count of DoFs this
    relay has received; the held rows plus the dropped prefix span exactly
    that many dimensions.
    """

    def __init__(self, node, cfg, verify=False):
        self.n = node
        self.cfg = cfg
        self.first_slot = cfg.initial_delay(node)
        self.est = EstimatorState(node, cfg.hops)
        self.rows = deque()            # (start, end, coeffs) in arrival order
        self.g_own = 0
        self.last_end = -1
        self.w_min = 0                 # destination decode frontier, relayed
        self.verify = verify
        self.crng = coeff_rng(cfg.seed, node) if verify else None
        self.decoder = IncrementalDecoder() if verify else None

    def process_feedback(self, fb, t):
        self.est.ingest_feedback(fb)
        if fb.window_start > self.w_min:
            self.w_min = fb.window_start

    def process_forward(self, item, t) -> int:
        if item is ERASED:
            return 0
        pkt = item
        if self.decoder is not None:
            # verification mode: count and hold by the true verdict
            if pkt.coefficients and self.decoder.absorb(dict(pkt.coefficients)):
                self.g_own += 1
                self.rows.append((pkt.w_min, pkt.w_max, pkt.coefficients))
        elif self.g_own < pkt.rank_bound:
            self.g_own += 1
            if pkt.w_max >= pkt.w_min:
                self.rows.append((pkt.w_min, pkt.w_max, pkt.coefficients))
        # spans below the incoming window start are ack-covered at the
        # destination; both starts and ends arrive non-decreasing
        while self.rows and self.rows[0][1] < pkt.w_min:
            self.rows.popleft()
        return 1

    def build_feedback(self, ack, packet_slot):
        return self.est.build_outgoing_bundle(ack, packet_slot, self.w_min)

    def _mix_coefficients(self):
        out = {}
        for (_, _, held) in self.rows:
            mu = self.crng.randrange(256)
            if mu == 0 or not held:
                continue
            for idx, v in held.items():
                if v:
                    out[idx] = out.get(idx, 0) ^ gf_mul(v, mu)
        return out

    def step(self, t):
        if not self.rows:
            pkt = CodedPacket(self.n, t, 0, -1, FEC_PO, 0, {} if self.verify else None)
            return pkt, FEC_PO
        start = self.rows[0][0]
        end = self.rows[-1][1]
        kind = NEW if end > self.last_end else FEC_PO
        if end > self.last_end:
            self.last_end = end
        coeffs = self._mix_coefficients() if self.verify else None
        pkt = CodedPacket(self.n, t, start, end, kind, self.g_own, coeffs)
        return pkt, kind


class SrNode:
    """Per-hop selective repeat, uncoded.  Window and retransmission timeout
    are both one hop round trip.  NACKed packets retransmit before timed-out
    ones; received packets are forwarded in arrival order."""

    def __init__(self, node, cfg):
        self.n = node
        self.cfg = cfg
        self.first_slot = cfg.initial_delay(node)
        self.window = cfg.rtt_per_hop[node]
        self.timeout = cfg.rtt_per_hop[node]
        self.queue = []                # packet indices awaiting first send
        self.next_new = 0
        self.unacked = {}              # index -> last sent slot
        self.retx = deque()
        self._retx_set = set()
        self.sent_log = {}             # slot -> index
        self.seen = set()
        self.arrived = 0               # source only

    def add_arrival(self, index):
        self.arrived += 1
        self.queue.append(index)

    def process_feedback(self, fb, t):
        idx = self.sent_log.pop(fb.acked_packet_created_at, None)
        if idx is None:
            return
        if fb.ack:
            self.unacked.pop(idx, None)
        elif idx in self.unacked and idx not in self._retx_set:
            self.retx.append(idx)
            self._retx_set.add(idx)

    def process_forward(self, item, t) -> int:
        if item is ERASED:
            return 0
        idx = item.w_min
        if idx not in self.seen:
            self.seen.add(idx)
            self.queue.append(idx)
        return 1

    def build_feedback(self, ack, packet_slot):
        return FeedbackBundle(packet_slot, ack)

    def _send(self, t, idx, kind):
        self.unacked[idx] = t
        self.sent_log[t] = idx
        return CodedPacket(self.n, t, idx, idx, kind, idx + 1), kind

    def step(self, t):
        for idx, sent in self.unacked.items():
            if t - sent >= self.timeout and idx not in self._retx_set:
                self.retx.append(idx)
                self._retx_set.add(idx)
        while self.retx:
            idx = self.retx.popleft()
            self._retx_set.discard(idx)
            if idx in self.unacked:
                return self._send(t, idx, FEC_PO)
        if len(self.unacked) < self.window and self.next_new < len(self.queue):
            idx = self.queue[self.next_new]
            self.next_new += 1
            return self._send(t, idx, NEW)
        return None, NNF_IDLE
