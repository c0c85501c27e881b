"""Adaptive causal RLNC source encoder: sliding window over arrived
information packets, a-priori FEC every RTT, posterior FEC from the DoF-rate
gap, end-of-window repeats."""

import math
import random
from bisect import bisect_left, bisect_right, insort

from .core import (NEW, FEC_AP, FEC_PO, FEC_EOW, CodedPacket, round_half_up)
from .estimation import EstimatorState

# Idle action codes shared with the run ledger.
BSP_IDLE = 5
NNF_IDLE = 6


def coeff_rng(seed, node):
    return random.Random((seed * 0xD1342543DE82EF95 + node * 0xAF251AF3B0F025B5 + 0x9E6D) & 0xFFFFFFFFFFFFFFFF)


def dof_rate_gap(md, ad, eps, c_new, c_same) -> float:
    """DoF-rate gap: (md + eps*c_new) / (ad + (1-eps)*c_same) - 1.

    Numerator: DoFs the receiver will end up short of (confirmed missing
    plus expected losses among in-flight new transmissions).  Denominator:
    compensation on its way (confirmed plus expected in-flight FEC
    deliveries).  Positive means retransmission is due.  A zero numerator
    yields -1 (nothing missing); a zero denominator with something missing
    yields +inf.
    """
    num = md + eps * c_new
    den = ad + (1.0 - eps) * c_same
    if num <= 0:
        return -1.0
    if den == 0:
        return math.inf
    return num / den - 1.0


class DofTracker:
    """Coverage accounting for one receiver: a certified prefix ``kp``
    (packets 0..kp-1 fully spanned) plus the span ends of held DoFs beyond
    it.  Rank over 0..e is the prefix plus the rows ending by e, capped by
    the span size; a delivery is innovative when the sender's rank bound
    exceeds the rank already held over the packet's own span.  Contiguous
    coverage promotes into the prefix immediately."""

    __slots__ = ("g", "kp", "ends")

    def __init__(self):
        self.g = 0                     # DoFs held in total
        self.kp = 0                    # packets 0..kp-1 fully known
        self.ends = []                 # sorted span ends of rows beyond kp

    def rank_over(self, e) -> int:
        if e < self.kp:
            return e + 1
        return min(e + 1, self.kp + bisect_right(self.ends, e))

    def absorb(self, w_max, rank_bound) -> bool:
        # no claim can exceed the span size; cap so the accounting stays
        # total even on malformed input
        if rank_bound > w_max + 1:
            rank_bound = w_max + 1
        if rank_bound <= self.rank_over(w_max):
            return False
        self.g += 1
        insort(self.ends, w_max)
        # promote: whenever the prefix plus the rows ending by e fill all of
        # 0..e, the whole prefix 0..e is known
        new_kp = self.kp
        for i, e in enumerate(self.ends):
            if self.kp + i + 1 >= e + 1 and e + 1 > new_kp:
                new_kp = e + 1
        if new_kp > self.kp:
            del self.ends[:bisect_left(self.ends, new_kp)]
            self.kp = new_kp
        return True

    def clone(self) -> "DofTracker":
        other = DofTracker()
        other.g = self.g
        other.kp = self.kp
        other.ends = list(self.ends)
        return other


class DofSender:
    """State shared by every window-managing transmitter (source and NET
    re-encoders): erasure estimation, per-RTT FEC counters, a send log and
    an ack-accounted mirror of the next node's coverage state.

    Feedback replays deliveries in emission order, and the receiver's
    accounting is deterministic in its deliveries, so the mirror is an
    exact replica; window advances need no decoder callback.
    """

    def __init__(self, node, cfg, verify=False):
        self.n = node
        self.cfg = cfg
        self.rtt = cfg.rtt_per_hop[node]
        self.first_slot = cfg.initial_delay(node)
        self.window_cap = cfg.window_cap
        self.est = EstimatorState(node, cfg.hops)
        self.w_min = 0
        self.out_end = -1              # w_max announced downstream so far
        self.c_new = 0                 # new DoFs sent this RTT period
        self.c_same = 0                # repeats sent this RTT period
        self.md = 0                    # lost data-bearing emissions (gross)
        self.ad = 0                    # acked repair emissions (gross)
        self.pending_apriori = 0
        self.send_log = {}             # created_at -> (kind, rank_bound, w_max)
        self.mirror = DofTracker()     # next node's coverage, replayed from acks
        self.opt = DofTracker()        # mirror plus in-flight emissions assumed
                                       # delivered; rebuilt on each loss report
        self.acked_top = -1            # highest w_max among acked packets
        self._last_innovative = None   # verification mode: last receive verdict
        self.verify = verify
        self.crng = coeff_rng(cfg.seed, node) if verify else None

    # -- feedback path -----------------------------------------------------

    def _resolve(self, fb):
        """Pop the emission this feedback concerns."""
        return self.send_log.pop(fb.acked_packet_created_at, None)

    def process_feedback(self, fb, t):
        self.est.ingest_feedback(fb)
        rec = self._resolve(fb)
        if rec is not None:
            kind, rho, end = rec
            if fb.ack:
                if fb.innovative == 0 and rho > 0:
                    # verification mode: the delivery landed but carried no
                    # new DoF, so retract the optimistic absorb and let the
                    # span deficit trigger a fresh repair
                    self.opt = self.mirror.clone()
                    for (_, rho2, end2) in self.send_log.values():
                        self.opt.absorb(end2, rho2)
                else:
                    self.mirror.absorb(end, rho)
                    if kind != NEW and rho > 0:
                        self.ad += 1
                    if end > self.acked_top:
                        self.acked_top = end
            else:
                if rho > 0:
                    self.md += 1
                # the optimistic replica assumed this delivery; rebuild it
                # from the confirmed state plus what is still in flight
                self.opt = self.mirror.clone()
                for (_, rho2, end2) in self.send_log.values():
                    self.opt.absorb(end2, rho2)
        if fb.window_start > self.w_min:
            self._advance(fb.window_start)

    def _advance(self, new_wmin):
        """Semi-decode elimination: the window start chains to the next
        node's window start and ultimately to the destination's decode
        frontier, so everything below ``new_wmin`` is delivered end to end
        and responsibility for it is dropped."""
        self.w_min = new_wmin
        if self.out_end < new_wmin - 1:
            self.out_end = new_wmin - 1
        self._prune(new_wmin)

    def _prune(self, new_wmin):
        pass

    def build_feedback(self, ack, packet_slot):
        fb = self.est.build_outgoing_bundle(ack, packet_slot, self.w_min)
        if ack is not None and self.verify:
            fb.innovative = self._last_innovative
        return fb

    # -- FEC mechanisms ----------------------------------------------------

    def local_eps(self):
        return self.est.epsilon_hat(self.n)

    @property
    def missing(self) -> int:
        """Feedback-confirmed DoF deficit at the next node: the acked span
        needs acked_top+1 DoFs, the mirror says how many are held there."""
        if self.acked_top < 0:
            return 0
        return max(0, self.acked_top + 1 - self.mirror.rank_over(self.acked_top))

    def delta(self) -> float:
        """Current DoF-rate gap, from the gross loss and repair-ack tallies
        plus this period's send counts.  The tallies are never reset: the
        gap stays positive exactly while losses accrue faster than acked
        repairs can compensate, which is what saturates a bottleneck whose
        erasure rate exceeds its delivery rate."""
        return dof_rate_gap(self.md, self.ad, self.local_eps(),
                            self.c_new, self.c_same)

    def at_rtt_boundary(self, t):
        return t > self.first_slot and (t - self.first_slot) % self.rtt == 0

    def _start_period(self):
        """Schedule the a-priori burst from the closing period's new-DoF
        count, then reset the per-period counters."""
        self.pending_apriori = round_half_up(self.local_eps() * self.c_new)
        self.c_new = 0
        self.c_same = 0
        if not self.window_nonempty():
            self.pending_apriori = 0

    def window_nonempty(self):
        return self.out_end >= self.w_min

    # -- emission ----------------------------------------------------------

    def _mix_coefficients(self):
        raise NotImplementedError

    def _emit(self, t, kind, rank_bound, end=None):
        if end is None:
            end = self.out_end
        coeffs = self._mix_coefficients(end) if self.verify else None
        pkt = CodedPacket(self.n, t, self.w_min, end, kind, rank_bound, coeffs)
        self.send_log[t] = (kind, rank_bound, end)
        self.opt.absorb(end, rank_bound)
        if kind == NEW:
            self.c_new += 1
        else:
            self.c_same += 1
        return pkt

    def _emit_padding(self, t):
        """Content-free filler used by never-idle baselines when the window
        is empty; receivers gain nothing from it."""
        pkt = CodedPacket(self.n, t, self.w_min, self.w_min - 1, FEC_PO, 0,
                          {} if self.verify else None)
        self.send_log[t] = (FEC_PO, 0, self.w_min - 1)
        return pkt


class SourceNode(DofSender):
    """Node 0: encodes raw information packets.  ``never_idle`` replaces
    every pause with a (possibly content-free) FEC transmission, which is
    how the maximum-utilization baselines run the source."""

    def __init__(self, cfg, verify=False, never_idle=False):
        super().__init__(0, cfg, verify)
        self.arrived = 0
        self.never_idle = never_idle
        self.threshold = cfg.threshold

    def add_arrival(self, index):
        self.arrived += 1

    def new_available(self):
        return self.out_end + 1 < self.arrived

    def _mix_coefficients(self, end):
        return {i: self.crng.randrange(256) for i in range(self.w_min, end + 1)}

    def _rank_bound(self):
        return self.out_end + 1

    def _fec_span(self):
        """Narrowest useful repair: span just past the first dimension not
        covered by the receiver or by anything in flight to it, so the
        repair certifies as short a prefix as possible downstream."""
        end = min(self.out_end, max(self.w_min, self.opt.kp))
        return end, end + 1

    def step(self, t):
        if self.at_rtt_boundary(t):
            self._start_period()
        if self.pending_apriori > 0 and self.window_nonempty():
            # proactive cover for losses still in flight: full window span
            self.pending_apriori -= 1
            return self._emit(t, FEC_AP, self._rank_bound()), FEC_AP
        if self.window_nonempty():
            if self.out_end - self.w_min >= self.window_cap:
                end, rank = self._fec_span()
                return self._emit(t, FEC_EOW, rank, end), FEC_EOW
            if self.delta() - self.threshold > 0:
                end, rank = self._fec_span()
                return self._emit(t, FEC_PO, rank, end), FEC_PO
        if self.new_available() and self.out_end - self.w_min < self.window_cap:
            self.out_end += 1
            return self._emit(t, NEW, self._rank_bound()), NEW
        if self.never_idle:
            if self.window_nonempty():
                return self._emit(t, FEC_PO, self._rank_bound()), FEC_PO
            return self._emit_padding(t), FEC_PO
        return None, NNF_IDLE
