"""Deterministic slotted-time simulator and protocol library for adaptive
causal network coding over multi-hop erasure networks."""

from .core import (NEW, FEC_AP, FEC_PO, FEC_EOW, CodedPacket, FeedbackBundle,
                   NetworkConfig, ProtocolViolation, validate_config)
from .engine import (PROTOCOLS, benchmark_config, bottleneck_arrival_rate,
                     iter_sweep, run, sweep)
from .metrics import (RunLedger, channel_usage, delays, delivery_rate,
                      goodput, summarize)
from .source import BSP_IDLE, NNF_IDLE

__version__ = "0.1.0"

__all__ = [
    "NEW", "FEC_AP", "FEC_PO", "FEC_EOW", "BSP_IDLE", "NNF_IDLE",
    "CodedPacket", "FeedbackBundle", "NetworkConfig", "ProtocolViolation",
    "validate_config", "PROTOCOLS", "benchmark_config",
    "bottleneck_arrival_rate", "iter_sweep", "run", "sweep", "RunLedger",
    "channel_usage", "delays", "delivery_rate", "goodput", "summarize",
    "__version__",
]
