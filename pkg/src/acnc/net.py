"""Intermediate-node re-encoder: semi-decoding buffer management, a-priori
FEC period, blank-space pausing sized by the downstream bottleneck, and the
no-new no-FEC pause."""

import math
from bisect import bisect_right

from .channel import ERASED
from .core import NEW, FEC_AP, FEC_PO, FEC_EOW, ProtocolViolation
from .gf256 import IncrementalDecoder, gf_mul
from .source import DofSender, DofTracker, BSP_IDLE, NNF_IDLE


class NetNode(DofSender):
    """One re-encoding relay.

    Semi-decoding: the relay keeps coverage accounting (certified prefix
    plus held span ends) over what it received, and a mirror of the same
    accounting for the next node, replayed from acks.  No elimination is
    performed in fast mode; in verification mode a real eliminator holds the
    received rows in reduced echelon form and every emission mixes the
    reduced rows whose span fits, which realizes the rank the accounting
    claims (a certified prefix reduces to unit rows, so narrow spans stay
    available even when the raw receptions were wide).

    ``bs_enabled`` turns the blank-space period on (the full protocol);
    ``never_idle`` replaces every pause with a FEC transmission (the
    maximum-utilization variant).
    """

    def __init__(self, node, cfg, verify=False, bs_enabled=True, never_idle=False):
        super().__init__(node, cfg, verify)
        self.bs_enabled = bs_enabled
        self.never_idle = never_idle
        self.own = DofTracker()        # what this relay holds
        # reverse-pivot form: rows with pivot <= e span exactly the part of
        # this relay's space confined to packets 0..e
        self.decoder = IncrementalDecoder(reverse=True) if verify else None
        self.bs_remaining = 0.0
        self._bs_recompute = False
        # audit trail of pause scheduling and per-slot termination checks
        self.bsp_log = []

    @property
    def g_own(self):
        return self.own.g

    @property
    def known_prefix(self):
        return self.own.kp

    # -- receive path ------------------------------------------------------

    def process_forward(self, item, t) -> int:
        if item is ERASED:
            return 0
        pkt = item
        if self.decoder is not None and pkt.coefficients is not None:
            # verification mode: count by the true verdict so one random
            # collision cannot inflate this relay's claims forever after
            truth = self.decoder.absorb(pkt.coefficients) if pkt.coefficients else False
            if truth:
                rho = max(pkt.rank_bound, self.own.rank_over(pkt.w_max) + 1)
                self.own.absorb(pkt.w_max, rho)
            self._last_innovative = 1 if truth else 0
        else:
            self.own.absorb(pkt.w_max, pkt.rank_bound)
        return 1

    # -- blank space -------------------------------------------------------

    def bs_duration(self) -> float:
        """Pause budget from the a-priori FEC load of downstream hops up to
        the forward bottleneck; zero when this node is the bottleneck."""
        bn = self.est.bottleneck()
        if bn == self.n:
            return 0.0
        rtt = self.cfg.rtt_per_hop
        return self.cfg.alpha * sum(rtt[i] * self.est.epsilon_hat(i)
                                    for i in range(self.n + 1, bn + 1))

    def bs_dof_rate(self) -> float:
        """Effective DoF rate of treating the pause as one guaranteed loss
        compensated within the remaining blank-space window; +inf whenever
        the expression is undefined or non-positive (forcing termination)."""
        bn = self.est.bottleneck()
        eps_n = self.est.epsilon_hat(self.n)
        eps_bn = self.est.epsilon_hat(bn)
        if eps_bn - eps_n <= 0.0:
            return math.inf
        h = bn - self.n
        bracket = (1.0 - eps_n) * self.bs_remaining + h * math.log(eps_bn - eps_n)
        if bracket <= 0.0:
            return math.inf
        return 1.0 / bracket

    def _bs_terminate(self) -> bool:
        bn = self.est.bottleneck()
        return self.bs_dof_rate() > 1.0 - self.est.epsilon_hat(bn)

    # -- emission ----------------------------------------------------------

    def window_nonempty(self):
        return self.out_end >= self.w_min and self.own.rank_over(self.out_end) > 0

    def _rank_bound(self):
        """Dimension of the emission space over packets 0..out_end."""
        return self.own.rank_over(self.out_end)

    def _fec_span(self):
        """Narrowest useful repair: the smallest announced span over which
        this relay's rank exceeds the receiver's rank counting everything
        already in flight to it.  None when no such span exists (a repeat
        could not add a DoF downstream)."""
        lo = max(self.opt.kp, self.w_min)
        if lo > self.out_end:
            return None
        pos = bisect_right(self.own.ends, lo)
        candidates = [lo]
        candidates.extend(e for e in self.own.ends[pos:] if e <= self.out_end)
        candidates.append(self.out_end)
        for e in candidates:
            r = self.own.rank_over(e)
            if r > self.opt.rank_over(e):
                return e, r
        return None

    def _mix_coefficients(self, end):
        # mix the reduced rows fitting the span; their count matches the
        # accounting's rank claim up to random-coefficient collision odds
        row = {}
        for pivot, prow in self.decoder.pivots.items():
            if not prow or pivot > end:
                continue
            mu = self.crng.randrange(256)
            if mu == 0:
                continue
            for idx, v in prow.items():
                if v:
                    row[idx] = row.get(idx, 0) ^ gf_mul(v, mu)
        return row

    def new_available(self):
        return self.out_end + 1 < self.own.kp or \
            bisect_right(self.own.ends, self.out_end) < len(self.own.ends)

    def step(self, t):
        if t < self.first_slot:
            raise ProtocolViolation(f"node {self.n} stepped at {t} before {self.first_slot}")
        if self.at_rtt_boundary(t):
            self._start_period()
            if self.pending_apriori == 0:
                self._bs_recompute = True
        if self.pending_apriori > 0:
            if self.window_nonempty():
                self.pending_apriori -= 1
                if self.pending_apriori == 0:
                    self._bs_recompute = True
                return self._emit(t, FEC_AP, self._rank_bound()), FEC_AP
            self.pending_apriori = 0
            self._bs_recompute = True
        if self.bs_enabled:
            if self._bs_recompute:
                self._bs_recompute = False
                d = self.bs_duration()
                self.bs_remaining = d if d >= 1.0 else 0.0
                if self.bs_remaining > 0.0:
                    self.bsp_log.append(("start", t, d, self.est.bottleneck()))
            if self.bs_remaining > 0.0:
                rate = self.bs_dof_rate()
                cap = 1.0 - self.est.epsilon_hat(self.est.bottleneck())
                stop = rate > cap
                self.bsp_log.append(("check", t, self.bs_remaining, rate, cap, stop))
                if stop:
                    self.bs_remaining = 0.0
                else:
                    self.bs_remaining -= 1.0
                    return None, BSP_IDLE
        capped = self.out_end - self.w_min > self.window_cap
        # targeted repair first (a span over which the next node is short a
        # DoF even counting everything in flight), then new content, then
        # window-wide redundancy while the loss tally outruns the acked
        # repairs; redundancy fills otherwise-idle slots rather than
        # blocking the forwarding of new DoFs
        span = self._fec_span()
        if capped:
            if span is not None:
                return self._emit(t, FEC_EOW, span[1], span[0]), FEC_EOW
            if self.window_nonempty() and self.delta() >= 0:
                return self._emit(t, FEC_EOW, self._rank_bound()), FEC_EOW
        else:
            if span is not None:
                return self._emit(t, FEC_PO, span[1], span[0]), FEC_PO
            if self.new_available():
                if self.out_end + 1 < self.own.kp:
                    self.out_end += 1
                else:
                    idx = bisect_right(self.own.ends, self.out_end)
                    self.out_end = self.own.ends[idx]
                return self._emit(t, NEW, self._rank_bound()), NEW
            if self.window_nonempty() and self.delta() >= 0:
                return self._emit(t, FEC_PO, self._rank_bound()), FEC_PO
        if self.never_idle:
            if self.window_nonempty():
                return self._emit(t, FEC_PO, self._rank_bound()), FEC_PO
            return self._emit_padding(t), FEC_PO
        return None, NNF_IDLE
