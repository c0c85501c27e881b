"""The closed-form pieces checked against hand-computed values: erasure
estimate, DoF-rate gap, a-priori FEC count, pause duration, pause DoF rate
and termination, goodput, channel usage, delay statistics."""

import math

from acnc.core import NEW, NetworkConfig
from acnc.estimation import EstimatorState
from acnc.metrics import RunLedger, channel_usage, delays, goodput
from acnc.net import NetNode
from acnc.source import NNF_IDLE, dof_rate_gap

REL = 1e-12


def feed(est, channel, acks, nacks):
    for _ in range(acks):
        est.record(channel, 1)
    for _ in range(nacks):
        est.record(channel, 0)


def test_erasure_estimate_exact():
    est = EstimatorState(0, 1)
    feed(est, 0, 3, 1)
    assert est.epsilon_hat(0) == 1 - 3 / 4


def test_dof_rate_gap_hand_values():
    assert dof_rate_gap(1, 1, 0.0, 0, 0) == 0.0      # one loss, one repair
    assert dof_rate_gap(0, 1, 0.0, 0, 0) == -1.0     # nothing missing
    # (2 + 0.4*5) / (1 + 0.6*5) - 1 = 4/4 - 1 = 0
    assert dof_rate_gap(2, 1, 0.4, 5, 5) == 0.0
    assert dof_rate_gap(3, 0, 0.0, 0, 0) == math.inf  # no compensation coming
    assert abs(dof_rate_gap(1, 2, 0.25, 4, 4) - (2 / 5 - 1)) <= REL


def relay(eps_by_channel, rtt=20, alpha=1.0, samples=10):
    hops = len(eps_by_channel)
    cfg = NetworkConfig(node_count=hops + 1, erasure_rates=tuple(eps_by_channel),
                        rtt_per_hop=(rtt,) * hops, horizon=1000, arrival_rate=0.5,
                        alpha=alpha)
    node = NetNode(0, cfg)
    for ch, eps in enumerate(eps_by_channel):
        nacks = round(eps * samples)
        feed(node.est, ch, samples - nacks, nacks)
    return node


def test_apriori_count():
    node = relay([0.4, 0.1])
    node.c_new = 20
    node.out_end = 5                       # non-empty window with content
    node.own.absorb(5, 1)
    node._start_period()
    assert node.pending_apriori == 8       # round(0.4 * 20)
    assert node.c_new == 0 and node.c_same == 0


def test_pause_duration_hand_values():
    assert relay([0.1, 0.4]).bs_duration() == 1.0 * 20 * 0.4   # = 8
    node = relay([0.1, 0.4, 0.6])
    assert abs(node.bs_duration() - (20 * 0.4 + 20 * 0.6)) <= REL
    assert relay([0.4, 0.1]).bs_duration() == 0.0  # node is its own bottleneck
    assert relay([0.1, 0.4], alpha=0.5).bs_duration() == 4.0   # linear in alpha
    assert relay([0.1, 0.4], alpha=2.0).bs_duration() == 16.0


def test_pause_dof_rate_hand_values():
    node = relay([0.1, 0.4])
    node.bs_remaining = 8.0
    want = 1.0 / (0.9 * 8 + math.log(0.3))
    assert abs(node.bs_dof_rate() - want) <= REL * abs(want)
    node.bs_remaining = 1.0                # bracket 0.9 + ln 0.3 < 0
    assert node.bs_dof_rate() == math.inf
    flat = relay([0.4, 0.4])               # no headroom over the bottleneck
    flat.bs_remaining = 8.0
    assert flat.bs_dof_rate() == math.inf


def test_pause_termination_rule():
    node = relay([0.1, 0.4])
    node.bs_remaining = 8.0
    # rate 0.1668 <= 1 - 0.4: keep pausing
    assert not node._bs_terminate()
    node.bs_remaining = 1.0                # guarded to +inf: terminate
    assert node._bs_terminate()


def ledger(cfg, idle_per_node, decode_times, arrivals):
    actions = []
    for n in range(cfg.hops):
        slots = cfg.horizon - cfg.initial_delay(n)
        row = [NNF_IDLE] * idle_per_node[n] + [NEW] * (slots - idle_per_node[n])
        actions.append(row)
    return RunLedger(cfg, "bs", actions, arrivals, decode_times)


def test_goodput_hand_value():
    cfg = NetworkConfig(node_count=2, erasure_rates=(0.1,), rtt_per_hop=(100,),
                        horizon=200, arrival_rate=0.9, delivery_window=100)
    led = ledger(cfg, [20], {i: 100 + i for i in range(100)}, list(range(150)))
    assert goodput(led) == 100 / 130       # d / (T - O0 - RTT/2)


def test_channel_usage_hand_value():
    cfg = NetworkConfig(node_count=6, erasure_rates=(0.1, 0.4, 0.3, 0.3, 0.1),
                        rtt_per_hop=(20,) * 5, horizon=5000, arrival_rate=0.5)
    led = ledger(cfg, [0, 0, 50, 0, 0], {}, [])
    u, per_node = channel_usage(led)
    assert per_node[2] == 1 - 50 / 4980    # opportunities = T - 2 * RTT/2
    assert per_node[0] == 1.0
    # network denominator: sum over i of (T - (N-2-i) * RTT_i/2)
    assert u == 1 - 50 / (5 * 5000 - (4 + 3 + 2 + 1) * 10)
    full = ledger(cfg, [0] * 5, {}, [])
    assert channel_usage(full)[0] == 1.0


def test_delay_hand_values():
    cfg = NetworkConfig(node_count=2, erasure_rates=(0.0,), rtt_per_hop=(100,),
                        horizon=200, arrival_rate=0.9, delivery_window=100)
    led = ledger(cfg, [0], {0: 60, 1: 80}, [10, 20])
    d_mean, d_max = delays(led)
    assert d_mean == 55 and d_max == 60
    single = ledger(cfg, [0], {0: 60}, [10])
    assert delays(single) == (50, 50)
