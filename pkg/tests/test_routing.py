import pytest

from manetsim.mac import Frame, FrameKind
from manetsim.routing import Rreq
from manetsim.scenario import Scenario
from manetsim.simulation import Simulation


def fixed_sim(positions, seed=1, trace_paths=False, **kw):
    defaults = dict(node_count=len(positions), fixed_positions=list(positions),
                    tx_range=200.0, sdp_count=0, sim_end_s=10.0,
                    traffic_start_s=0.0, traffic_end_s=0.0)
    defaults.update(kw)
    return Simulation(Scenario(**defaults), seed, trace_paths=trace_paths)


LINE = [(0.0, 0.0), (180.0, 0.0), (360.0, 0.0)]  # A - B - C, A cannot hear C


def test_line_discovery_installs_two_hop_route():
    sim = fixed_sim(LINE, trace_paths=True)
    frame = sim.send(0, 2)
    sim.run()
    assert sim.metrics.total_delivered == 1
    assert frame.path == [0, 1, 2]
    route = sim.routing[0].table[2]
    assert (route.next_hop, route.hop_count) == (1, 2)
    # reverse path toward the originator was recorded while the flood spread
    back = sim.routing[2].table[0]
    assert (back.next_hop, back.hop_count) == (1, 2)


def test_existing_route_forwards_without_control_traffic():
    sim = fixed_sim(LINE)
    sim.send(0, 2)
    sim.run_until(2_000_000)
    floods_before = sim.metrics.rreq_originated
    assert sim.routing[0].route_or_discover(sim.make_packet(0, 2), sim.kernel.now) == "forwarded"
    sim.run()
    assert sim.metrics.rreq_originated == floods_before
    assert sim.metrics.total_delivered == 2


def test_duplicate_rreq_is_ignored():
    sim = fixed_sim(LINE)
    rreq = Rreq(originator=0, rreq_id=7, target=2, hops=0)
    fr = Frame(FrameKind.BROADCAST, 0, -1, 24, seq=7, origin_source=0,
               final_destination=2, ctl=rreq)
    assert sim.routing[1].handle_rreq(fr, 0) == "rebroadcast"
    assert sim.routing[1].handle_rreq(fr, 0) == "ignored"


def test_destination_replies_to_the_neighbor_the_request_came_from():
    sim = fixed_sim(LINE)
    rreq = Rreq(originator=0, rreq_id=3, target=2, hops=1)
    fr = Frame(FrameKind.BROADCAST, 1, -1, 24, seq=3, origin_source=0,
               final_destination=2, ctl=rreq)
    assert sim.routing[2].handle_rreq(fr, 0) == "replied"
    queued = sim.macs[2].queue[0]
    assert queued.dst == 1
    assert queued.ctl.originator == 0 and queued.ctl.target == 2


def test_partitioned_destination_drops_after_retries():
    # two islands: {0,1} and {2}
    sim = fixed_sim([(0.0, 0.0), (100.0, 0.0), (5000.0, 0.0)], sim_end_s=10.0)
    for _ in range(4):
        sim.send(0, 2)
    sim.run_until(2_900_000)
    assert sim.metrics.dropped_no_route == 0       # still retrying
    assert sim.metrics.rreq_originated == 3        # request plus two retries
    sim.run()
    assert sim.metrics.dropped_no_route == 4
    assert sim.metrics.total_delivered == 0
    assert not sim.routing[0].pending


def test_discovery_buffer_overflow_drops_excess():
    sim = fixed_sim([(0.0, 0.0), (5000.0, 0.0)], sim_end_s=0.5)
    results = [sim.routing[0].route_or_discover(sim.make_packet(0, 1), 0)
               for _ in range(70)]
    assert results.count("buffered") == 64
    assert results.count("dropped") == 6
    assert sim.metrics.dropped_no_route == 6


def test_buffered_packets_flush_in_fifo_order_after_reply():
    sim = fixed_sim(LINE, trace_paths=True)
    frames = [sim.send(0, 2) for _ in range(5)]
    sim.run()
    assert sim.metrics.total_delivered == 5
    # FIFO flush preserves sequence order through the MAC queue
    deliveries = sorted(frames, key=lambda f: f.seq)
    assert frames == deliveries


def test_link_failure_invalidates_and_rediscovers():
    # A - B - C line plus D: both B and D can relay between A and C
    positions = [(0.0, 0.0), (150.0, 0.0), (300.0, 0.0), (150.0, 100.0)]
    sim = fixed_sim(positions, sim_end_s=30.0)
    relay = None
    delivered_at_departure = None
    for i in range(60):  # one packet every 250 ms, relay departs mid-session
        sim.run_until(i * 250_000)
        if i == 8:
            relay = sim.routing[0].table[2].next_hop
            assert relay in (1, 3)
            sim.mobility.positions[relay] = (9999.0, 9999.0)
            delivered_at_departure = sim.metrics.total_delivered
        sim.send(0, 2)
    sim.run()
    assert sim.metrics.routes_invalidated >= 1
    assert sim.metrics.dropped_mac >= 1
    assert sim.metrics.total_delivered > delivered_at_departure + 20
    assert sim.routing[0].table[2].next_hop == (1 if relay == 3 else 3)


def test_no_routes_through_dead_hop_invalidates_nothing():
    sim = fixed_sim(LINE)
    sim.send(0, 2)
    sim.run()
    assert sim.routing[0].on_link_failure(99, sim.kernel.now) == 0


def test_unused_route_expires_after_timeout():
    sim = fixed_sim(LINE)
    sim.send(0, 2)
    sim.run_until(2_000_000)
    assert 2 in sim.routing[0].table
    sim.run_until(9_000_000)
    expired = sim.routing[0].expire_routes(sim.kernel.now)
    assert expired >= 1
    assert 2 not in sim.routing[0].table


def test_steady_traffic_keeps_the_route_alive():
    sim = fixed_sim(LINE, sim_end_s=12.0)
    for i in range(40):  # 4 per second for 10 s, well past the 3 s timeout
        sim.run_until(i * 250_000)
        sim.send(0, 2)
    sim.run()
    assert sim.metrics.total_delivered == 40
    assert sim.metrics.rreq_originated == 1  # a single initial discovery


def test_flood_is_bounded_by_node_count():
    positions = [(float(i * 120), float((i % 3) * 90)) for i in range(8)]
    sim = fixed_sim(positions, sim_end_s=5.0)
    sim.send(0, 7)
    sim.run()
    per_flood = sim.metrics.rreq_rebroadcast / max(1, sim.metrics.rreq_originated)
    assert per_flood <= len(positions)
