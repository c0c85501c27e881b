"""Slotted event loop: Bernoulli arrivals, channel polling, node stepping in
index order, ledger recording.  Fully deterministic per seed."""

import random
from dataclasses import replace

from .baselines import MpmhRelay, MpmhSource, SrNode
from .channel import ChannelInstance
from .core import NetworkConfig, validate_config
from .metrics import RunLedger
from .net import NetNode
from .sink import SinkNode, UncodedSink
from .source import SourceNode

PROTOCOLS = ("bs", "netfec", "mpmh", "srarq")


def arrival_rng(seed):
    return random.Random((seed * 0xC2B2AE3D27D4EB4F + 0x165667B19E3779F9) & 0xFFFFFFFFFFFFFFFF)


def bottleneck_arrival_rate(erasure_rates) -> float:
    """Load slightly below the worst channel's capacity."""
    return max(0.0, 1.0 - max(erasure_rates) - 0.1)


def benchmark_config(eps_mid, seed, horizon=5000) -> NetworkConfig:
    """The reference six-node chain: erasure rates (0.1, 0.4, x, 0.3, 0.1)
    with the middle channel swept, 20-slot hop round trips."""
    eps = (0.1, 0.4, eps_mid, 0.3, 0.1)
    return NetworkConfig(
        node_count=6, erasure_rates=eps, rtt_per_hop=(20,) * 5,
        horizon=horizon, arrival_rate=bottleneck_arrival_rate(eps), seed=seed)


def build_nodes(cfg, protocol, verify=False):
    """(source, relay list, sink) for one protocol binding."""
    hops = cfg.hops
    sink_delay = cfg.one_way_delays[-1]
    if protocol == "bs":
        source = SourceNode(cfg, verify)
        relays = [NetNode(n, cfg, verify) for n in range(1, hops)]
        sink = SinkNode(sink_delay, oracle=verify)
    elif protocol == "netfec":
        source = SourceNode(cfg, verify, never_idle=True)
        relays = [NetNode(n, cfg, verify, bs_enabled=False, never_idle=True)
                  for n in range(1, hops)]
        sink = SinkNode(sink_delay, oracle=verify)
    elif protocol == "mpmh":
        source = MpmhSource(cfg, verify)
        relays = [MpmhRelay(n, cfg, verify) for n in range(1, hops)]
        sink = SinkNode(sink_delay, ack_innovative=True, oracle=verify)
    elif protocol == "srarq":
        source = SrNode(0, cfg)
        relays = [SrNode(n, cfg) for n in range(1, hops)]
        sink = UncodedSink(sink_delay)
    else:
        raise ValueError(f"unknown protocol {protocol!r}")
    return source, relays, sink


def run(cfg, protocol, verify=False) -> RunLedger:
    """Execute slots 0..T-1 and return the completed ledger.

    Per slot: draw the source arrival, poll every channel for due
    deliveries, step senders 0..N-2 in index order (feedback ingest, forward
    ingest with immediate ack, then the transmit decision), then let the
    destination absorb and acknowledge.
    """
    errors = validate_config(cfg)
    if errors:
        raise ValueError("invalid config: " + "; ".join(errors))
    source, relays, sink = build_nodes(cfg, protocol, verify)
    senders = [source] + relays
    delays = cfg.one_way_delays
    channels = [ChannelInstance(i, cfg.erasure_rates[i], delays[i], cfg.seed)
                for i in range(cfg.hops)]
    arrivals = []
    actions = [[] for _ in senders]
    rng = arrival_rng(cfg.seed)
    lam = cfg.arrival_rate
    for t in range(cfg.horizon):
        if rng.random() < lam:
            source.add_arrival(len(arrivals))
            arrivals.append(t)
        polled = [ch.poll(t) for ch in channels]
        for n, node in enumerate(senders):
            if t < node.first_slot:
                continue
            fb = polled[n][1]
            if fb is not None:
                node.process_feedback(fb, t)
            if n > 0:
                item = polled[n - 1][0]
                if item is not None:
                    bundle = node.build_feedback(node.process_forward(item, t),
                                                 t - delays[n - 1])
                else:
                    # status-only bundle: no packet observed this slot, but
                    # the window start and stored triples still flow upstream
                    bundle = node.build_feedback(None, None)
                channels[n - 1].push_feedback(t, bundle)
            pkt, action = node.step(t)
            if pkt is not None:
                channels[n].push_forward(t, pkt)
            actions[n].append(action)
        item = polled[-1][0]
        if item is not None:
            bundle = sink.process_forward(item, t)
        else:
            bundle = sink.idle_feedback()
        channels[-1].push_feedback(t, bundle)
    oracle_stats = None
    if verify and isinstance(sink, SinkNode) and sink.oracle is not None:
        oracle_stats = {
            "opportunities": sink.opportunities,
            "rank_deficiencies": sink.rank_deficiencies,
            "disagreements": sink.disagreements,
            "fast_decoded": sink.decoded_count(),
            "oracle_decoded": sink.oracle.inorder_frontier() + 1,
        }
    bsp_log = [(n,) + entry for n, node in enumerate(senders)
               if isinstance(node, NetNode) for entry in node.bsp_log]
    return RunLedger(cfg, protocol, actions, arrivals, dict(sink.decode_times),
                     oracle_stats, bsp_log)


def iter_sweep(base_cfg, parameter, values, seeds, protocols=PROTOCOLS,
               verify=False, auto_arrival=True):
    """Lazily yield ((protocol, value, seed), ledger) over the cross
    product.  When the swept parameter is the erasure profile the arrival
    rate is re-derived from the new bottleneck unless disabled."""
    field_names = set(base_cfg.__dataclass_fields__)
    if parameter not in field_names:
        raise ValueError(f"unknown parameter {parameter!r}")
    for value in values:
        cfg = replace(base_cfg, **{parameter: value})
        if auto_arrival and parameter == "erasure_rates":
            cfg = replace(cfg, arrival_rate=bottleneck_arrival_rate(value))
        for protocol in protocols:
            for seed in seeds:
                run_cfg = replace(cfg, seed=seed)
                yield (protocol, value, seed), run(run_cfg, protocol, verify)


def sweep(base_cfg, parameter, values, seeds, protocols=PROTOCOLS,
          verify=False, auto_arrival=True) -> dict:
    """Materialized form of iter_sweep, keyed (protocol, value, seed)."""
    return dict(iter_sweep(base_cfg, parameter, values, seeds, protocols,
                           verify, auto_arrival))
