import pytest

from manetsim.kernel import KernelError
from manetsim.phy import Channel, RadioConfig, airtime_us, in_range


def make_channel(positions, tx_range=200.0, cs_range=None):
    cfg = RadioConfig(tx_range=tx_range, carrier_sense_range=cs_range)
    return Channel(cfg, len(positions), lambda n, t: positions[n])


# ----- airtime --------------------------------------------------------------

def test_airtime_data_frame():
    cfg = RadioConfig(tx_range=100.0)
    assert airtime_us(540, cfg) == 192 + 2160 == 2352


def test_airtime_ack_frame():
    cfg = RadioConfig(tx_range=100.0)
    assert airtime_us(14, cfg) == 192 + 56 == 248


def test_airtime_rejects_empty_frame():
    with pytest.raises(ValueError):
        airtime_us(0, RadioConfig(tx_range=100.0))


# ----- geometry --------------------------------------------------------------

def test_in_range_zero_distance():
    assert in_range((5.0, 5.0), (5.0, 5.0), 0.0)


def test_in_range_three_four_five():
    assert in_range((0.0, 0.0), (300.0, 400.0), 500.0)
    assert not in_range((0.0, 0.0), (300.0, 400.0), 499.0)


def test_in_range_boundary_is_closed():
    assert in_range((0.0, 0.0), (200.0, 0.0), 200.0)


def test_in_range_symmetry():
    import random
    r = random.Random(4)
    for _ in range(200):
        a = (r.uniform(0, 1000), r.uniform(0, 1000))
        b = (r.uniform(0, 1000), r.uniform(0, 1000))
        radius = r.uniform(0, 600)
        assert in_range(a, b, radius) == in_range(b, a, radius)


# ----- reception outcomes ----------------------------------------------------

def test_lone_sender_delivers_to_receiver_in_range():
    ch = make_channel([(0.0, 0.0), (100.0, 0.0), (500.0, 0.0)])
    tx = ch.begin(0, "frame", now=0, airtime=1000)
    outcomes = ch.finish(tx)
    assert [(r.receiver, r.corrupted) for r in outcomes] == [(1, False)]


def test_overlapping_senders_corrupt_common_receiver():
    # 0 and 2 both reach 1; overlapping in time kills both frames there
    ch = make_channel([(0.0, 0.0), (150.0, 0.0), (300.0, 0.0)])
    t0 = ch.begin(0, "a", now=0, airtime=1000)
    t2 = ch.begin(2, "b", now=400, airtime=1000)
    for rec in ch.finish(t0) + ch.finish(t2):
        if rec.receiver == 1:
            assert rec.corrupted


def test_hidden_terminal_line_topology():
    # ends are 0.9*range from the middle and out of range of each other
    ch = make_channel([(0.0, 0.0), (180.0, 0.0), (360.0, 0.0)])
    assert not in_range((0.0, 0.0), (360.0, 0.0), 200.0)
    ta = ch.begin(0, "a", now=0, airtime=2000)
    tc = ch.begin(2, "c", now=100, airtime=2000)
    assert all(r.corrupted for r in ch.finish(ta) if r.receiver == 1)
    assert all(r.corrupted for r in ch.finish(tc) if r.receiver == 1)


def test_back_to_back_frames_do_not_overlap():
    ch = make_channel([(0.0, 0.0), (100.0, 0.0)])
    t0 = ch.begin(0, "a", now=0, airtime=1000)
    out0 = ch.finish(t0)
    t1 = ch.begin(0, "b", now=1000, airtime=1000)  # starts exactly at the old end
    out1 = ch.finish(t1)
    assert not out0[0].corrupted and not out1[0].corrupted


def test_transmitting_node_cannot_receive():
    ch = make_channel([(0.0, 0.0), (100.0, 0.0)])
    t1 = ch.begin(1, "theirs", now=0, airtime=5000)
    t0 = ch.begin(0, "mine", now=1000, airtime=1000)
    # node 1 was mid-transmission when frame "mine" arrived
    assert all(r.corrupted for r in ch.finish(t0) if r.receiver == 1)
    # node 0 started sending while "theirs" was in flight
    assert all(r.corrupted for r in ch.finish(t1) if r.receiver == 0)


def test_double_transmit_is_a_fault():
    ch = make_channel([(0.0, 0.0), (100.0, 0.0)])
    ch.begin(0, "a", now=0, airtime=1000)
    with pytest.raises(KernelError):
        ch.begin(0, "b", now=500, airtime=1000)


def test_one_outcome_per_in_range_receiver():
    positions = [(0.0, 0.0), (50.0, 0.0), (120.0, 80.0), (199.0, 0.0), (260.0, 0.0)]
    ch = make_channel(positions)
    tx = ch.begin(0, "x", now=0, airtime=100)
    outcomes = ch.finish(tx)
    expect = [n for n in range(1, 5) if in_range(positions[0], positions[n], 200.0)]
    assert sorted(r.receiver for r in outcomes) == expect
    assert len({r.receiver for r in outcomes}) == len(outcomes)


# ----- carrier sense ----------------------------------------------------------

def test_medium_quiet_when_nothing_transmits():
    ch = make_channel([(0.0, 0.0), (100.0, 0.0)])
    assert not ch.medium_busy(0, 0)


def test_own_transmission_is_busy():
    ch = make_channel([(0.0, 0.0), (100.0, 0.0)])
    ch.begin(0, "a", now=0, airtime=1000)
    assert ch.medium_busy(0, 500)


def test_sender_just_past_sense_range_is_quiet():
    ch = make_channel([(0.0, 0.0), (201.0, 0.0)], tx_range=100.0, cs_range=200.0)
    ch.begin(1, "a", now=0, airtime=1000)
    assert not ch.medium_busy(0, 500)


def test_sense_range_boundary_is_heard():
    ch = make_channel([(0.0, 0.0), (200.0, 0.0)], tx_range=100.0, cs_range=200.0)
    ch.begin(1, "a", now=0, airtime=1000)
    assert ch.medium_busy(0, 500)


def test_busy_ends_with_the_transmission():
    ch = make_channel([(0.0, 0.0), (100.0, 0.0)])
    ch.begin(1, "a", now=0, airtime=1000)
    assert ch.medium_busy(0, 999)
    assert not ch.medium_busy(0, 1000)


def test_start_instant_visible_only_to_deferral_sense():
    ch = make_channel([(0.0, 0.0), (100.0, 0.0)])
    ch.begin(1, "a", now=500, airtime=1000)
    assert ch.medium_busy(0, 500)            # deferral-grade: already busy
    assert not ch.medium_busy_strict(0, 500)  # transmit-grade: not yet detectable
    assert ch.medium_busy_strict(0, 501)
