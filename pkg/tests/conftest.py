import pytest

from acnc.core import NetworkConfig
from acnc.engine import bottleneck_arrival_rate


@pytest.fixture
def small_verify_cfg():
    eps = (0.2, 0.15)
    return NetworkConfig(node_count=3, erasure_rates=eps, rtt_per_hop=(10, 10),
                         horizon=500, arrival_rate=bottleneck_arrival_rate(eps),
                         delivery_window=100, seed=17)
