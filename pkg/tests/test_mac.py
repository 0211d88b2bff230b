import pytest

from manetsim.kernel import RandomSource
from manetsim.mac import FrameKind, MacPhase
from manetsim.scenario import Scenario
from manetsim.simulation import Simulation


def fixed_sim(positions, seed=1, **kw):
    defaults = dict(node_count=len(positions), fixed_positions=list(positions),
                    tx_range=200.0, sdp_count=0, sim_end_s=10.0,
                    traffic_start_s=0.0, traffic_end_s=0.0)
    defaults.update(kw)
    return Simulation(Scenario(**defaults), seed)


def first_backoff_draw(seed, cw=32):
    return RandomSource(seed).uniform_int(0, cw - 1)


# ----- timing ----------------------------------------------------------------

@pytest.mark.parametrize("seed", [1, 2, 9, 40])
def test_single_frame_latency_closed_form(seed):
    sim = fixed_sim([(0.0, 0.0), (100.0, 0.0)], seed=seed)
    k = first_backoff_draw(seed)
    sim.send_direct(0, 1, with_record=True)
    sim.run()
    expected = 50 + 20 * k + 2352
    assert sim.metrics.delay_sum_us[1] == expected
    assert sim.macs[0].stats.last_success_at == expected + 10 + 248


def test_second_frame_contends_afresh_after_success():
    sim = fixed_sim([(0.0, 0.0), (100.0, 0.0)], seed=4)
    k1 = first_backoff_draw(4)
    sim.send_direct(0, 1, with_record=True)
    sim.send_direct(0, 1, with_record=True)
    sim.run()
    first_done = 50 + 20 * k1 + 2352 + 10 + 248
    # second access starts at the ack instant with a fresh DIFS and draw
    rng = RandomSource(4)
    rng.uniform_int(0, 31)
    k2 = rng.uniform_int(0, 31)
    second_delivery = first_done + 50 + 20 * k2 + 2352
    assert sim.metrics.delay_count[1] == 2
    assert sim.metrics.delay_sum_us[1] == (50 + 20 * k1 + 2352) + second_delivery


# ----- retries ---------------------------------------------------------------

def test_unreachable_receiver_burns_exactly_eight_attempts():
    sim = fixed_sim([(0.0, 0.0), (1000.0, 0.0)])  # out of range
    sim.macs[0].record_cw = True
    sim.send_direct(0, 1, with_record=True)
    sim.run()
    mac = sim.macs[0]
    assert mac.stats.tx_attempts == 8          # 1 + retry_limit
    assert mac.stats.dropped_retry == 1
    assert mac.cw_trace == [32, 64, 128, 256, 512, 1024, 1024, 1024]
    assert mac.stats.collisions == 8           # every timeout applies the policy
    assert sim.metrics.dropped_mac == 1
    assert sim.metrics.total_delivered == 0


def test_retry_trajectory_matches_policy_oracle_for_mild():
    sim = fixed_sim([(0.0, 0.0), (1000.0, 0.0)], algorithm="mild")
    sim.macs[0].record_cw = True
    sim.send_direct(0, 1)
    sim.run()
    assert sim.macs[0].cw_trace == [32, 48, 72, 108, 162, 243, 365, 548]


# ----- queueing ----------------------------------------------------------------

def test_queue_capacity_drop_tail():
    sim = fixed_sim([(0.0, 0.0), (100.0, 0.0)])
    accepted = sum(sim.mac_enqueue(0, sim.direct_frame(0, 1, with_record=True))
                   for _ in range(55))
    assert accepted == 50
    assert sim.metrics.dropped_queue == 5
    assert sim.macs[0].stats.queue_rejected == 5


def test_queue_drains_in_fifo_order():
    sim = fixed_sim([(0.0, 0.0), (100.0, 0.0)])
    frames = [sim.send_direct(0, 1, with_record=True) for _ in range(5)]
    sim.run()
    assert sim.metrics.total_delivered == 5
    order = sorted(frames, key=lambda f: f.seq)
    assert frames == order


# ----- broadcast ----------------------------------------------------------------

def test_broadcast_completes_without_ack_or_cw_change():
    from manetsim.mac import BROADCAST_ADDR, Frame
    sim = fixed_sim([(0.0, 0.0), (100.0, 0.0), (150.0, 0.0)])
    bc = Frame(FrameKind.BROADCAST, 0, BROADCAST_ADDR, 24, seq=0)
    sim.mac_enqueue(0, bc)
    sim.run()
    mac = sim.macs[0]
    assert mac.stats.tx_attempts == 1
    assert mac.stats.collisions == 0 and mac.stats.successes == 0
    assert mac.contention.cw == 32
    assert mac.phase is MacPhase.IDLE
    assert not mac.queue


# ----- reception -----------------------------------------------------------------

def test_duplicate_data_is_acked_but_delivered_once():
    sim = fixed_sim([(0.0, 0.0), (100.0, 0.0)])
    delivered = []
    sim.deliver_up = lambda node, frame: delivered.append((node, frame.seq))
    frame = sim.direct_frame(0, 1)
    acks = []
    sim.send_ack = lambda node, data: acks.append(node)
    sim.macs[1].on_receive(frame, 100)
    sim.macs[1].on_receive(frame, 200)  # retransmission of the same frame
    assert delivered == [(1, frame.seq)]
    assert acks == [1, 1]


def test_overheard_unicast_is_ignored():
    sim = fixed_sim([(0.0, 0.0), (100.0, 0.0), (150.0, 0.0)])
    frame = sim.direct_frame(0, 1)
    sim.macs[2].on_receive(frame, 50)
    assert not frame.accepted


def test_two_saturated_nodes_share_the_channel():
    sim = fixed_sim([(0.0, 0.0), (50.0, 0.0)], sim_end_s=5.0)
    for n in (0, 1):
        sim.macs[n].attach_source(lambda n=n: sim.direct_frame(n, 1 - n))
        sim.mac_enqueue(n, sim.direct_frame(n, 1 - n))
    sim.run()
    s0 = sim.macs[0].stats.successes
    s1 = sim.macs[1].stats.successes
    assert s0 + s1 > 1000
    assert abs(s0 - s1) / max(s0, s1) < 0.2


def test_retry_bound_holds_under_contention():
    sim = fixed_sim([(0.0, 0.0), (50.0, 0.0), (100.0, 0.0)], sim_end_s=3.0)
    frames = []
    for n in (0, 1, 2):
        def make(n=n):
            f = sim.direct_frame(n, (n + 1) % 3)
            frames.append(f)
            return f
        sim.macs[n].attach_source(make)
        sim.mac_enqueue(n, make())
    sim.run()
    assert frames and all(f.retries <= 7 for f in frames)
