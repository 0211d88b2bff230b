"""Slot-synchronous contention oracle for validating the full MAC.

A deliberately naive model of 2-3 saturated stations in mutual range: no
timing, no airtime, no queues, just slots.  Every station holds a backoff
counter drawn from its contention window.  In each slot, stations at zero
transmit: a lone transmitter succeeds (success update, redraw), several
collide (collision update each, redraw), and the rest keep their counters
frozen for that slot.  In a slot with no transmitter every counter drops by
one.  This mirrors the contention structure of the real protocol exactly
while being simple enough to trust by inspection.

Draw order: initial counters for stations 0..n-1, then, after each outcome
slot, redraws for the involved stations in ascending station index.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .backoff import (BackoffParams, ContentionState, Policy, draw_backoff,
                      fresh_state, on_collision, on_success)
from .kernel import RandomSource


@dataclass(slots=True)
class MicroConfig:
    policy: Policy
    stations: int = 2
    horizon_slots: int = 1_000_000
    seed: int = 1
    params: BackoffParams = field(default_factory=BackoffParams)
    stop_after_outcomes: int | None = None
    record_trace: bool = False

    def validate(self) -> None:
        if not (1 <= self.stations <= 3):
            raise ValueError(f"stations must be 1..3, got {self.stations}")
        if self.horizon_slots < 1:
            raise ValueError("horizon_slots must be positive")


@dataclass
class MicroResult:
    successes: list[int]
    collisions: list[int]
    idle_slots: int = 0
    success_slots: int = 0
    collision_slots: int = 0
    cw_trace: list[list[int]] | None = None

    @property
    def outcome_slots(self) -> int:
        return self.success_slots + self.collision_slots

    def success_fraction(self) -> float:
        return self.success_slots / self.outcome_slots if self.outcome_slots else 0.0


def run_micro(cfg: MicroConfig) -> MicroResult:
    cfg.validate()
    cfg.params.validate()
    rng = RandomSource(cfg.seed)
    n = cfg.stations
    states: list[ContentionState] = [fresh_state(cfg.policy, cfg.params) for _ in range(n)]
    counters = [draw_backoff(states[i], rng) for i in range(n)]
    result = MicroResult(successes=[0] * n, collisions=[0] * n,
                         cw_trace=[[] for _ in range(n)] if cfg.record_trace else None)

    for _ in range(cfg.horizon_slots):
        ready = [i for i in range(n) if counters[i] == 0]
        if not ready:
            result.idle_slots += 1
            for i in range(n):
                counters[i] -= 1
            continue
        if len(ready) == 1:
            i = ready[0]
            result.successes[i] += 1
            result.success_slots += 1
            states[i] = on_success(states[i])
            counters[i] = draw_backoff(states[i], rng)
            if result.cw_trace is not None:
                result.cw_trace[i].append(states[i].cw)
        else:
            result.collision_slots += 1
            for i in ready:
                result.collisions[i] += 1
                states[i] = on_collision(states[i])
                counters[i] = draw_backoff(states[i], rng)
                if result.cw_trace is not None:
                    result.cw_trace[i].append(states[i].cw)
        if (cfg.stop_after_outcomes is not None
                and result.outcome_slots >= cfg.stop_after_outcomes):
            break
    return result
