"""Binary erasure channel with a fixed one-way delay line, plus the
noiseless reverse feedback line."""

import random
from collections import deque

from .core import ProtocolViolation

# Marker delivered to the receiver in place of an erased packet, so a NACK
# can be issued for that slot.  Idle sender slots deliver nothing at all.
ERASED = "ERASED"


def channel_rng(seed: int, index: int) -> random.Random:
    """Independent per-channel stream; a protocol change on one hop must not
    perturb another hop's noise."""
    return random.Random((seed * 0x9E3779B97F4A7C15 + index * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF)


class ChannelInstance:
    """Forward BEC + reverse noiseless line between nodes ``index`` and
    ``index + 1``."""

    def __init__(self, index, erasure_rate, one_way_delay, seed):
        self.index = index
        self.erasure_rate = erasure_rate
        self.one_way_delay = one_way_delay
        self.forward_line = deque()
        self.feedback_line = deque()
        self.rng = channel_rng(seed, index)
        self._last_forward_push = -1
        self._last_feedback_push = -1

    def push_forward(self, t, pkt):
        if t == self._last_forward_push:
            raise ProtocolViolation(f"two forward pushes on channel {self.index} at slot {t}")
        self._last_forward_push = t
        item = pkt if self.rng.random() >= self.erasure_rate else ERASED
        self.forward_line.append((t + self.one_way_delay, item))

    def push_feedback(self, t, bundle):
        if t == self._last_feedback_push:
            raise ProtocolViolation(f"two feedback pushes on channel {self.index} at slot {t}")
        self._last_feedback_push = t
        self.feedback_line.append((t + self.one_way_delay, bundle))

    def poll(self, t):
        """Remove and return (forward, feedback) entries due at slot t.

        At most one entry per line can be due because pushes are one per
        slot and the delay is constant.
        """
        fwd = None
        if self.forward_line and self.forward_line[0][0] == t:
            fwd = self.forward_line.popleft()[1]
        fb = None
        if self.feedback_line and self.feedback_line[0][0] == t:
            fb = self.feedback_line.popleft()[1]
        return fwd, fb
