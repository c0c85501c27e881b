"""Run ledger and the derived performance quantities: normalized goodput,
delivery-rate series, channel usage, in-order delay statistics."""

import bisect

from .source import BSP_IDLE, NNF_IDLE

IDLE_ACTIONS = (BSP_IDLE, NNF_IDLE)
PRE_OP = 0


class RunLedger:
    """Immutable record of one finished run.

    ``actions[n]`` holds one action code per slot of node n's operational
    life (slots ``initial_delay(n) .. T-1``).  ``arrival_times[i]`` is the
    slot information packet i reached the source; ``decode_times[i]`` the
    slot the destination recovered it in order.
    """

    def __init__(self, cfg, protocol, actions, arrival_times, decode_times,
                 oracle_stats=None, bsp_log=None):
        self.cfg = cfg
        self.protocol = protocol
        self.actions = actions
        self.arrival_times = arrival_times
        self.decode_times = decode_times
        self.oracle_stats = oracle_stats
        self.bsp_log = bsp_log or []

    def idle_count(self, n) -> int:
        return sum(1 for a in self.actions[n] if a in IDLE_ACTIONS)

    def opportunity_count(self, n) -> int:
        return len(self.actions[n])

    def decoded_total(self) -> int:
        return len(self.decode_times)

    def d(self, t) -> int:
        """Packets decoded in order by the end of slot t."""
        return sum(1 for s in self.decode_times.values() if s <= t)


def goodput(ledger) -> float:
    """Decoded information over the source's effective active horizon:
    d(T) / (T - O0 - RTT/2) with the whole-path round trip."""
    cfg = ledger.cfg
    denom = cfg.horizon - ledger.idle_count(0) - cfg.global_rtt // 2
    if denom <= 0:
        raise ValueError("degenerate run: no effective source horizon")
    return ledger.decoded_total() / denom


def delivery_rate(ledger, window=None) -> list:
    """Per-window increments of the in-order decode count, divided by the
    window length."""
    cfg = ledger.cfg
    if window is None:
        window = cfg.delivery_window
    if window >= cfg.horizon:
        raise ValueError("delivery window must be smaller than the horizon")
    times = sorted(ledger.decode_times.values())
    series = []
    prev = 0
    for k in range(window, cfg.horizon + 1, window):
        upto = bisect.bisect_right(times, k - 1)
        series.append((upto - prev) / window)
        prev = upto
    return series


def channel_usage(ledger):
    """(U, [U_0 .. U_{N-2}]): per-node ratio of transmitting slots to
    transmission opportunities, and the network-wide aggregate."""
    cfg = ledger.cfg
    T = cfg.horizon
    n_send = cfg.node_count - 1
    per_node = []
    for n in range(n_send):
        opportunities = T - cfg.initial_delay(n)
        if opportunities <= 0:
            per_node.append(1.0)
            continue
        per_node.append(1.0 - ledger.idle_count(n) / opportunities)
    total_idle = sum(ledger.idle_count(n) for n in range(n_send))
    total_opp = sum(T - (n_send - 1 - i) * cfg.rtt_per_hop[i] // 2
                    for i in range(n_send))
    u = 1.0 - total_idle / total_opp if total_opp > 0 else 1.0
    return u, per_node


def delays(ledger):
    """(mean, max) of in-order delivery delay over decoded packets."""
    if not ledger.decode_times:
        raise ValueError("no packet decoded: delay undefined")
    ds = [ledger.decode_times[i] - ledger.arrival_times[i]
          for i in ledger.decode_times]
    return sum(ds) / len(ds), max(ds)


def summarize(ledger) -> dict:
    """One flat result row for CSV output and sweep aggregation."""
    u, per_node = channel_usage(ledger)
    rate_series = delivery_rate(ledger)
    r_del = sum(rate_series) / len(rate_series) if rate_series else 0.0
    if ledger.decode_times:
        d_mean, d_max = delays(ledger)
    else:
        d_mean = d_max = float("nan")
    row = {
        "protocol": ledger.protocol,
        "seed": ledger.cfg.seed,
        "U": u,
        "eta": goodput(ledger),
        "R_del": r_del,
        "D_mean": d_mean,
        "D_max": d_max,
        "decoded": ledger.decoded_total(),
        "undelivered": len(ledger.arrival_times) - ledger.decoded_total(),
    }
    for n, un in enumerate(per_node):
        row[f"U{n}"] = un
    return row
