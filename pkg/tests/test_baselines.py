"""Comparison protocols: selective-repeat capacity, uncoded invariant,
whole-hold mixing at windowless relays."""

from acnc.baselines import MpmhRelay, SrNode
from acnc.channel import ERASED
from acnc.core import CodedPacket, FeedbackBundle, NEW, NetworkConfig
from acnc.engine import run
from acnc.metrics import summarize


def srarq_cfg(eps, horizon=4000, seed=0):
    hops = len(eps)
    return NetworkConfig(node_count=hops + 1, erasure_rates=eps,
                         rtt_per_hop=(20,) * hops, horizon=horizon,
                         arrival_rate=1.0, seed=seed)


def test_srarq_single_hop_capacity():
    rates = []
    for seed in range(3):
        led = run(srarq_cfg((0.1,), seed=seed), "srarq")
        rates.append(led.decoded_total() / led.cfg.horizon)
    mean = sum(rates) / len(rates)
    assert abs(mean - 0.9) < 0.02


def test_srarq_two_hop_capacity():
    # converges to the worst hop's capacity from below; finite-horizon runs
    # sit slightly under it
    rates = []
    for seed in range(3):
        led = run(srarq_cfg((0.1, 0.4), horizon=8000, seed=seed), "srarq")
        rates.append(led.decoded_total() / led.cfg.horizon)
    mean = sum(rates) / len(rates)
    assert 0.55 < mean <= 0.62


def test_srarq_never_codes():
    cfg = srarq_cfg((0.3,), horizon=50)
    node = SrNode(0, cfg)
    for i in range(10):
        node.add_arrival(i)
    for t in range(20):
        pkt, _ = node.step(t)
        if pkt is not None:
            assert pkt.w_min == pkt.w_max     # one raw packet per emission


def test_srarq_selective_retransmission():
    cfg = srarq_cfg((0.0,), horizon=100)
    node = SrNode(0, cfg)
    for i in range(10):
        node.add_arrival(i)
    sent = {}
    for t in range(5):
        pkt, _ = node.step(t)
        sent[t] = pkt.w_min
    # NACK packet sent at t=1 (index 1), ACK the others
    for t in range(5):
        node.process_feedback(FeedbackBundle(t, 0 if t == 1 else 1), t + 20)
    pkt, _ = node.step(30)
    assert pkt.w_min == 1                     # exactly the NACKed packet
    pkt, _ = node.step(31)
    assert pkt.w_min != 1                     # others continue unaffected


def relay_with_rows(spans):
    cfg = NetworkConfig(node_count=3, erasure_rates=(0.1, 0.1),
                        rtt_per_hop=(10, 10), horizon=100, arrival_rate=0.5)
    relay = MpmhRelay(1, cfg)
    for t, (lo, hi) in enumerate(spans):
        relay.process_forward(
            CodedPacket(0, t, lo, hi, NEW, relay.g_own + 1), t)
    return relay


def test_mpmh_relay_mixes_entire_hold():
    relay = relay_with_rows([(0, 0), (0, 3), (2, 5)])
    pkt, kind = relay.step(10)
    assert (pkt.w_min, pkt.w_max) == (0, 5)   # spans everything held
    assert pkt.rank_bound == 3
    assert kind == NEW
    pkt2, kind2 = relay.step(11)
    assert (pkt2.w_min, pkt2.w_max) == (0, 5)
    assert kind2 != NEW                       # same frontier: a repeat


def test_mpmh_relay_empty_hold_emits_filler():
    relay = relay_with_rows([])
    pkt, _ = relay.step(0)
    assert pkt.w_max < pkt.w_min and pkt.rank_bound == 0


def test_mpmh_relay_ignores_erasures():
    relay = relay_with_rows([(0, 1)])
    assert relay.process_forward(ERASED, 5) == 0
    assert relay.g_own == 1


def test_mpmh_relay_prunes_acked_prefix():
    relay = relay_with_rows([(0, 1), (0, 3)])
    # an incoming packet whose window starts past the old rows drops them
    relay.process_forward(CodedPacket(0, 9, 4, 6, NEW, 3), 9)
    assert [r[:2] for r in relay.rows] == [(4, 6)]


def test_delivery_bits_drive_rate_control():
    # end to end: the windowless chain still saturates a lossy path
    cfg = NetworkConfig(node_count=4, erasure_rates=(0.1, 0.3, 0.1),
                        rtt_per_hop=(10,) * 3, horizon=2000,
                        arrival_rate=0.6, delivery_window=200, seed=2)
    row = summarize(run(cfg, "mpmh"))
    assert row["U"] == 1.0
    assert row["R_del"] > 0.5
