import math
from collections import defaultdict

import pytest

from leo5g.event_sim import DelayedLink
from leo5g.harq import (
    AckMode,
    HarqConfig,
    RedundancyModel,
    buffer_requirement,
    compare_strategies,
    dci_process_bits,
    min_processes,
    simulate_harq,
)

LOOP59 = DelayedLink(25.5)  # rtt 51 ms + 8 ms ACK window = 59 ms loop
DURATION = 2000.0


def analytic_utilization(n, rtt=51.0, ack=8.0, tti=1.0):
    return min(1.0, n * tti / (rtt + ack))


@pytest.mark.parametrize("rtt, ack, tti, n", [(51, 8, 1, 59), (0, 1, 1, 1), (24.32, 8, 1, 33), (51.66, 8, 1, 60)])
def test_min_processes(rtt, ack, tti, n):
    assert min_processes(rtt, ack, tti) == n


def test_min_processes_rejects_bad_tti():
    with pytest.raises(ValueError):
        min_processes(51, 8, 0)


@pytest.mark.parametrize("n, bits", [(8, 3), (59, 6), (1, 1), (2, 1), (9, 4), (64, 6), (65, 7)])
def test_dci_bits(n, bits):
    assert dci_process_bits(n) == bits
    if n > 1:
        assert bits == math.ceil(math.log2(n))


def test_buffer():
    assert buffer_requirement(59, 1, 3.0) == 177.0
    assert buffer_requirement(59, 1, 1.0) / buffer_requirement(8, 1, 1.0) == pytest.approx(7.375)
    assert buffer_requirement(1, 1, 2.5) == 2.5


@pytest.mark.parametrize("n", [1, 8, 16, 59, 64])
def test_throughput_law(n):
    stats = simulate_harq(HarqConfig(n_processes=n), LOOP59, 0.0, DURATION)
    assert stats.utilization == pytest.approx(analytic_utilization(n), abs=0.02)
    assert stats.retransmissions == 0


def test_lte_default_shortfall():
    stats = simulate_harq(HarqConfig(n_processes=8), LOOP59, 0.0, DURATION)
    assert stats.utilization == pytest.approx(8 / 59, abs=0.01)


def test_exact_delay_loop_rounds_to_tti_grid():
    # 51.677 + 8 ms loop: a freed process waits for the next TTI boundary,
    # so transmissions come in bursts of 16 every 60 TTIs
    link = DelayedLink(25.838661227228506)
    _, trace = simulate_harq(HarqConfig(n_processes=16), link, 0.0, DURATION, keep_trace=True)
    tx = [r.time_us for r in trace if r.kind == "tx" and r.detail["pid"] == 0]
    assert {b - a for a, b in zip(tx, tx[1:])} == {60_000}
    stats = simulate_harq(HarqConfig(n_processes=16), link, 0.0, DURATION)
    assert stats.utilization == pytest.approx(16 / 59.677, abs=0.01)


@pytest.mark.parametrize("mode", list(AckMode))
@pytest.mark.parametrize("p", [0.0, 0.1, 0.4])
def test_conservation(mode, p):
    s = simulate_harq(HarqConfig(n_processes=20, ack_mode=mode), LOOP59, p, 1000.0, seed=2)
    assert s.delivered_packets + s.pending_packets + s.abandoned_packets + s.lost_packets == s.offered_packets
    assert s.delivered_packets <= s.offered_packets
    assert 0.0 <= s.utilization <= 1.0
    assert s.transmissions == s.offered_packets + s.retransmissions


def test_lossy_link_does_not_stall():
    s = simulate_harq(HarqConfig(n_processes=59), DelayedLink(25.5, 0.2, 4), 0.05, DURATION, seed=1)
    assert s.utilization == pytest.approx(1.0, abs=0.02)
    assert s.delivered_packets + s.pending_packets + s.abandoned_packets == s.offered_packets


def test_feedback_causality():
    _, trace = simulate_harq(HarqConfig(n_processes=10), LOOP59, 0.2, 1000.0, seed=3, keep_trace=True)
    waiting = defaultdict(bool)
    last_tx = {}
    for rec in trace:
        if rec.kind == "tx":
            pid = rec.detail["pid"]
            assert not waiting[pid], f"process {pid} reused before feedback"
            waiting[pid] = True
            last_tx[pid] = rec.time_us
        elif rec.kind == "feedback":
            pid = rec.detail["pid"]
            assert waiting[pid]
            assert rec.time_us - last_tx[pid] == 59_000
            waiting[pid] = False


def test_max_transmissions_cap():
    s = simulate_harq(HarqConfig(n_processes=59, max_transmissions=1), LOOP59, 0.3, DURATION, seed=1)
    assert s.retransmissions == 0
    assert s.abandoned_packets > 0


@pytest.mark.parametrize("p", [0.05, 0.1, 0.2])
def test_two_bit_reduces_retransmissions(p):
    # the acceptance suite repeats this over ten seeds
    for seed in range(3):
        one = simulate_harq(HarqConfig(59, ack_mode="one_bit"), LOOP59, p, DURATION, seed)
        two = simulate_harq(HarqConfig(59, ack_mode="two_bit"), LOOP59, p, DURATION, seed)
        assert two.retransmissions < one.retransmissions


def test_redundancy_model():
    m = RedundancyModel()
    assert m.increment(AckMode.ONE_BIT, 3) == 1
    assert [m.increment(AckMode.TWO_BIT, k) for k in (1, 2, 3)] == [1, 2, 3]
    with pytest.raises(ValueError):
        RedundancyModel(two_bit_increments=(3, 2, 1))
    with pytest.raises(ValueError):
        RedundancyModel(one_bit_increment=0)


def test_disabled_mode():
    s = simulate_harq(HarqConfig(n_processes=59, ack_mode="disabled"), LOOP59, 0.0, DURATION)
    assert s.utilization == 1.0 and s.retransmissions == 0 and s.peak_buffer == 1.0
    lossy = simulate_harq(HarqConfig(ack_mode="disabled"), LOOP59, 0.25, DURATION, seed=5)
    assert lossy.lost_packets / lossy.offered_packets == pytest.approx(0.25, abs=0.04)


def test_peak_buffer_tracks_processes():
    s = simulate_harq(HarqConfig(n_processes=59, per_process_buffer=2.0), LOOP59, 0.0, DURATION)
    assert s.peak_buffer == buffer_requirement(59, 1.0, 2.0)


def test_deterministic():
    cfg = HarqConfig(n_processes=30, ack_mode="two_bit")
    a = simulate_harq(cfg, LOOP59, 0.15, DURATION, seed=8)
    b = simulate_harq(cfg, LOOP59, 0.15, DURATION, seed=8)
    assert a == b
    assert a != simulate_harq(cfg, LOOP59, 0.15, DURATION, seed=9)


def test_duration_shorter_than_rtt_rejected():
    with pytest.raises(ValueError):
        simulate_harq(HarqConfig(), LOOP59, 0.0, 50.0)


class TestStrategies:
    def test_table(self):
        rows = compare_strategies(LOOP59, 0.0, DURATION, seed=0)
        by = {r["strategy"]: r for r in rows}
        assert [r["strategy"] for r in rows] == ["i", "ii", "iii", "iv"]
        assert by["i"]["n_processes"] == 59 and by["i"]["dci_bits"] == 6
        assert by["iii"]["utilization"] == pytest.approx(16 / 59, abs=0.01)
        assert by["iv"]["utilization"] == 1.0
        assert by["iv"]["retransmissions"] == 0
        assert by["iv"]["buffer_requirement"] == 1.0
        assert by["i"]["buffer_requirement"] == 59.0

    def test_full_dominates_reduced(self):
        for seed in range(10):
            rows = {r["strategy"]: r for r in compare_strategies(LOOP59, 0.1, 1000.0, seed=seed)}
            assert rows["i"]["utilization"] >= rows["iii"]["utilization"]

    def test_parallel_workers_match_serial(self):
        assert compare_strategies(LOOP59, 0.1, 500.0, 3, workers=2) == compare_strategies(LOOP59, 0.1, 500.0, 3)
