"""Deterministic discrete-event engine: clock, event queue, seeded randomness.

One simulation run owns a single :class:`Kernel` and a single
:class:`RandomSource`.  Every piece of randomness in a run flows through that
one source, and events firing at the same microsecond are dispatched in the
order they were scheduled, so a (configuration, seed) pair fully determines
the event trace and every output byte.

Time is counted in integer microseconds.  All 802.11 timing constants used
here (slot, SIFS, DIFS) are whole microseconds, so integer time avoids any
float drift in the scheduler.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable


class KernelError(Exception):
    """Internal simulator fault: scheduling in the past, corrupted state."""


class EventKind(Enum):
    TX_START = "tx_start"
    TX_END = "tx_end"
    SLOT_TICK = "slot_tick"
    DIFS_EXPIRED = "difs_expired"
    ACK_TIMEOUT = "ack_timeout"
    WAYPOINT_ARRIVAL = "waypoint_arrival"
    CBR_EMIT = "cbr_emit"
    ROUTE_TIMEOUT = "route_timeout"
    RREQ_RETRY = "rreq_retry"
    RREQ_FORWARD = "rreq_forward"
    METRICS_WINDOW_START = "metrics_window_start"
    SIM_END = "sim_end"


@dataclass(slots=True)
class Event:
    """One scheduled occurrence.  Also serves as its own cancellation handle.

    Events with equal ``fire_at`` are dispatched in ascending ``seq`` order;
    ``seq`` is assigned at schedule time, making the ordering a total order.
    """

    fire_at: int
    seq: int
    kind: EventKind
    node: int | None = None
    frame: Any = None
    data: Any = None
    cancelled: bool = False


_MASK64 = (1 << 64) - 1


class RandomSource:
    """xorshift64* pseudo-random generator with a splitmix64-derived seed.

    The recurrence, applied once per draw::

        x ^= x >> 12
        x = (x ^ (x << 25)) mod 2**64
        x ^= x >> 27
        output = (x * 0x2545F4914F6CDD1D) mod 2**64

    Seeding runs the raw 64-bit seed through one splitmix64 step::

        z = (seed + 0x9E3779B97F4A7C15) mod 2**64
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) mod 2**64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) mod 2**64
        state = z ^ (z >> 31), replaced by 1 if zero

    Pure integer arithmetic, so the draw sequence for a given seed is
    identical on every platform.  Each ``uniform_int`` / ``uniform_real``
    call consumes exactly one generator step, which keeps event traces
    reproducible when draws are interleaved with scheduling.
    """

    __slots__ = ("seed", "_state")

    def __init__(self, seed: int):
        self.seed = seed & _MASK64
        z = (self.seed + 0x9E3779B97F4A7C15) & _MASK64
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        self._state = (z ^ (z >> 31)) or 1

    def next_u64(self) -> int:
        x = self._state
        x ^= x >> 12
        x = (x ^ (x << 25)) & _MASK64
        x ^= x >> 27
        self._state = x
        return (x * 0x2545F4914F6CDD1D) & _MASK64

    def uniform_int(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi], both ends inclusive.  One draw."""
        if lo > hi:
            raise KernelError(f"uniform_int: lo {lo} > hi {hi}")
        return lo + self.next_u64() % (hi - lo + 1)

    def uniform_real(self, lo: float, hi: float) -> float:
        """Uniform real in [lo, hi).  One draw (53-bit mantissa mapping)."""
        if lo > hi:
            raise KernelError(f"uniform_real: lo {lo} > hi {hi}")
        return lo + (self.next_u64() >> 11) * (2.0**-53) * (hi - lo)


class Kernel:
    """Time-ordered event queue with a monotone clock.

    Handlers are registered per :class:`EventKind`; dispatching an event sets
    the clock to its fire time and calls the handler with the event.
    """

    def __init__(self) -> None:
        self.now: int = 0
        self._heap: list[tuple[int, int, Event]] = []
        self._seq = 0
        self._handlers: dict[EventKind, Callable[[Event], None]] = {}

    def on(self, kind: EventKind, handler: Callable[[Event], None]) -> None:
        self._handlers[kind] = handler

    def schedule(self, fire_at: int, kind: EventKind, node: int | None = None,
                 frame: Any = None, data: Any = None) -> Event:
        """Enqueue an event; returns it as a handle usable with cancel()."""
        if fire_at < self.now:
            raise KernelError(
                f"scheduled {kind.value} at {fire_at} before current clock {self.now}")
        ev = Event(fire_at, self._seq, kind, node, frame, data)
        self._seq += 1
        heapq.heappush(self._heap, (fire_at, ev.seq, ev))
        return ev

    def cancel(self, ev: Event) -> None:
        ev.cancelled = True

    def run_until(self, end: int) -> int:
        """Dispatch every event with fire_at <= end; leave the clock at end.

        Returns the number of handler invocations (cancelled events are
        popped silently and not counted).
        """
        dispatched = 0
        heap = self._heap
        while heap and heap[0][0] <= end:
            fire_at, _, ev = heapq.heappop(heap)
            if ev.cancelled:
                continue
            self.now = fire_at
            self._handlers[ev.kind](ev)
            dispatched += 1
        self.now = end
        return dispatched
