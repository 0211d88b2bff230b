import pytest

from manetsim.metrics import (PacketStatus, RunMetrics, avg_end_to_end_delay, pdr)


def run_with(generated, received, delays_ms=None):
    m = RunMetrics(seed=1)
    m.generated = dict(generated)
    m.received = dict(received)
    if delays_ms:
        for dst, values in delays_ms.items():
            m.delay_sum_us[dst] = sum(v * 1000 for v in values)
            m.delay_count[dst] = len(values)
    return m


def test_pdr_single_run():
    m = run_with({0: 100, 1: 100, 2: 100}, {10: 95, 11: 85, 12: 90})
    assert pdr([m]) == pytest.approx(0.9)


def test_pdr_is_ratio_of_sums_across_runs():
    a = run_with({0: 300}, {9: 270})
    b = run_with({0: 300}, {9: 240})
    assert pdr([a, b]) == pytest.approx(510 / 600)


def test_pdr_upper_bound_when_everything_arrives():
    m = run_with({0: 50, 1: 50}, {8: 50, 9: 50})
    assert pdr([m]) == 1.0


def test_pdr_without_traffic_is_an_error():
    with pytest.raises(ValueError):
        pdr([run_with({}, {})])


def test_delay_averages_destination_means():
    m = run_with({0: 3}, {5: 3}, delays_ms={5: [10], 6: [20], 7: [30]})
    assert m.run_delay_us() == pytest.approx(20_000)


def test_delay_excludes_starved_destinations():
    m = run_with({0: 2}, {5: 1}, delays_ms={5: [10]})
    m.delay_count[6] = 0  # destination that never received
    assert m.run_delay_us() == pytest.approx(10_000)


def test_delay_none_when_nothing_delivered():
    m = run_with({0: 5}, {})
    assert m.run_delay_us() is None
    assert avg_end_to_end_delay([m]) is None


def test_cross_run_delay_skips_empty_runs():
    a = run_with({0: 2}, {5: 2}, delays_ms={5: [10, 30]})
    b = run_with({0: 2}, {})
    assert avg_end_to_end_delay([a, b]) == pytest.approx(20_000)


# ----- packet lifecycle ------------------------------------------------------

def test_packet_state_machine_counts_each_packet_once():
    m = RunMetrics(seed=2)
    recs = [m.new_packet(0, 9, i, now=1000) for i in range(5)]
    m.deliver(recs[0], now=5000)
    m.drop(recs[1], PacketStatus.DROPPED_QUEUE)
    m.drop(recs[2], PacketStatus.DROPPED_MAC)
    m.drop(recs[3], PacketStatus.DROPPED_NO_ROUTE)
    m.finalize()
    assert m.total_generated == 5
    assert (m.total_delivered, m.dropped_queue, m.dropped_mac,
            m.dropped_no_route, m.in_flight_at_end) == (1, 1, 1, 1, 1)


def test_ghost_drop_after_delivery_is_ignored():
    m = RunMetrics(seed=3)
    rec = m.new_packet(0, 9, 0, now=0)
    m.deliver(rec, now=100)
    m.drop(rec, PacketStatus.DROPPED_MAC)
    m.finalize()
    assert m.total_delivered == 1 and m.dropped_mac == 0
    assert m.in_flight_at_end == 0


def test_double_delivery_counts_once():
    m = RunMetrics(seed=4)
    rec = m.new_packet(0, 9, 0, now=0)
    m.deliver(rec, now=100)
    m.deliver(rec, now=200)
    assert m.total_delivered == 1
    assert m.delay_sum_us[9] == 100


def test_delay_records_follow_received_counts():
    m = RunMetrics(seed=5)
    for i in range(4):
        rec = m.new_packet(0, 7, i, now=0)
        m.deliver(rec, now=2500 + i)
    assert m.received[7] == m.delay_count[7] == 4
