import pytest

from manetsim.backoff import BackoffParams, Policy
from manetsim.microsim import MicroConfig, run_micro


def test_single_station_never_collides():
    r = run_micro(MicroConfig(Policy.BEB, stations=1, horizon_slots=50_000, seed=1))
    assert r.collisions == [0]
    assert r.successes[0] > 1000


def test_every_slot_is_idle_success_or_collision():
    cfg = MicroConfig(Policy.DIDD, stations=2, horizon_slots=200_000, seed=2)
    r = run_micro(cfg)
    assert r.idle_slots + r.success_slots + r.collision_slots == cfg.horizon_slots


def test_lower_cw_cap_collides_more():
    tight = run_micro(MicroConfig(Policy.BEB, stations=2, horizon_slots=1_000_000,
                                  seed=3, params=BackoffParams(cw_max=64)))
    roomy = run_micro(MicroConfig(Policy.BEB, stations=2, horizon_slots=1_000_000,
                                  seed=3, params=BackoffParams(cw_max=1024)))
    assert tight.collision_slots / tight.outcome_slots \
        > roomy.collision_slots / roomy.outcome_slots


def test_two_symmetric_stations_share_successes():
    r = run_micro(MicroConfig(Policy.EIED, stations=2, horizon_slots=2_000_000, seed=4))
    a, b = r.successes
    assert abs(a - b) / max(a, b) < 0.05


def test_three_stations_supported():
    r = run_micro(MicroConfig(Policy.MILD, stations=3, horizon_slots=300_000, seed=5))
    assert all(s > 0 for s in r.successes)
    assert sum(r.collisions) > 0


def test_same_config_reproduces_exactly():
    cfg = dict(policy=Policy.LOG, stations=2, horizon_slots=100_000, seed=6)
    a = run_micro(MicroConfig(**cfg))
    b = run_micro(MicroConfig(**cfg))
    assert (a.successes, a.collisions, a.idle_slots) == (b.successes, b.collisions, b.idle_slots)


def test_stop_after_outcomes_halts_early():
    r = run_micro(MicroConfig(Policy.BEB, stations=2, horizon_slots=10_000_000,
                              seed=7, stop_after_outcomes=1000))
    assert 1000 <= r.outcome_slots <= 1002


def test_cw_trace_follows_policy_updates():
    r = run_micro(MicroConfig(Policy.BEB, stations=2, horizon_slots=5000, seed=8,
                              record_trace=True))
    for station in r.cw_trace:
        assert all(32 <= cw <= 1024 for cw in station)
        assert station.count(32) >= 1  # resets after every success


def test_station_count_validated():
    with pytest.raises(ValueError):
        run_micro(MicroConfig(Policy.BEB, stations=4))
