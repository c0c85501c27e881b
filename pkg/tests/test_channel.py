"""Erasure channel statistics, delay-line exactness, and push contracts."""

import math

import pytest

from acnc.channel import ERASED, ChannelInstance, channel_rng
from acnc.core import FeedbackBundle, ProtocolViolation


def drain(ch, until):
    got = []
    for t in range(until):
        fwd, _ = ch.poll(t)
        if fwd is not None:
            got.append((t, fwd))
    return got


def test_noiseless_limit():
    ch = ChannelInstance(0, 0.0, 10, seed=1)
    for t in range(100):
        ch.push_forward(t, f"pkt{t}")
    arrivals = drain(ch, 200)
    assert len(arrivals) == 100
    for i, (t, item) in enumerate(arrivals):
        assert t == i + 10 and item == f"pkt{i}"


def test_fully_erased_limit():
    ch = ChannelInstance(0, 1.0, 5, seed=1)
    for t in range(50):
        ch.push_forward(t, "x")
    arrivals = drain(ch, 100)
    assert len(arrivals) == 50
    assert all(item is ERASED for _, item in arrivals)


def test_delay_exactness():
    ch = ChannelInstance(0, 0.0, 10, seed=0)
    ch.push_forward(5, "p")
    assert ch.poll(14) == (None, None)
    assert ch.poll(15)[0] == "p"


def test_erasure_fraction_binomial():
    eps, n = 0.4, 10 ** 5
    ch = ChannelInstance(0, eps, 1, seed=42)
    erased = 0
    for t in range(n):
        ch.push_forward(t, "p")
        item, _ = ch.poll(t + 1)
        erased += item is ERASED
    sigma = math.sqrt(eps * (1 - eps) / n)
    assert abs(erased / n - eps) <= 3 * sigma


def test_erasure_independence_lag1():
    eps, n = 0.3, 10 ** 5
    ch = ChannelInstance(0, eps, 1, seed=7)
    bits = []
    for t in range(n):
        ch.push_forward(t, "p")
        item, _ = ch.poll(t + 1)
        bits.append(1 if item is ERASED else 0)
    mean = sum(bits) / n
    var = mean * (1 - mean)
    cov = sum((bits[i] - mean) * (bits[i + 1] - mean) for i in range(n - 1)) / (n - 1)
    assert abs(cov / var) <= 3 / math.sqrt(n)


def test_feedback_noiseless_and_complete():
    ch = ChannelInstance(0, 0.9, 10, seed=3)
    for t in range(5000):
        ch.push_feedback(t, FeedbackBundle(t, 1))
    got = 0
    for t in range(6000):
        _, fb = ch.poll(t)
        if fb is not None:
            assert fb.acked_packet_created_at == t - 10
            got += 1
    assert got == 5000


def test_double_push_rejected():
    ch = ChannelInstance(0, 0.0, 1, seed=0)
    ch.push_forward(3, "a")
    with pytest.raises(ProtocolViolation):
        ch.push_forward(3, "b")
    ch.push_feedback(3, FeedbackBundle(0, 1))
    with pytest.raises(ProtocolViolation):
        ch.push_feedback(3, FeedbackBundle(0, 1))


def test_per_channel_streams_independent():
    # same seed, different index -> different noise; same index -> identical
    a = [channel_rng(9, 0).random() for _ in range(5)]
    b = [channel_rng(9, 1).random() for _ in range(5)]
    c = [channel_rng(9, 0).random() for _ in range(5)]
    assert a == c and a != b
