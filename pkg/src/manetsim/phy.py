"""Unit-disk radio: range-based connectivity, airtime, receiver-side collisions.

Reception is binary at ``tx_range``: a node hears a frame iff its distance to
the sender is at most the range at the moment the transmission starts.  A
frame arrives intact at a receiver iff no other audible transmission
overlapped any part of its airtime at that receiver; any overlap corrupts
every involved frame there (no capture effect).  Transmitting nodes cannot
receive.

Carrier sense has a one-instant detection delay: a transmission starting at
time t is not audible to other nodes' decisions taken at exactly t.  That is
what lets two stations whose backoff counters reach zero in the same slot
actually collide, as on a real channel.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

from .kernel import KernelError

Position = tuple[float, float]
PositionFn = Callable[[int, int], Position]


@dataclass(slots=True)
class RadioConfig:
    tx_range: float
    carrier_sense_range: float | None = None
    data_rate: int = 2_000_000
    phy_overhead_us: int = 192

    def __post_init__(self) -> None:
        if self.carrier_sense_range is None:
            self.carrier_sense_range = self.tx_range
        if self.tx_range <= 0:
            raise ValueError(f"tx_range must be positive, got {self.tx_range}")
        if self.carrier_sense_range < self.tx_range:
            raise ValueError("carrier_sense_range must be at least tx_range")
        if self.data_rate <= 0:
            raise ValueError("data_rate must be positive")


def airtime_us(frame_bytes: int, cfg: RadioConfig) -> int:
    """Microseconds a frame of the given total byte size occupies the air."""
    if frame_bytes <= 0:
        raise ValueError(f"frame_bytes must be positive, got {frame_bytes}")
    bits = frame_bytes * 8
    return cfg.phy_overhead_us + -(-bits * 1_000_000 // cfg.data_rate)


def in_range(a: Position, b: Position, radius: float) -> bool:
    """Closed-ball test: distance(a, b) <= radius."""
    dx = a[0] - b[0]
    dy = a[1] - b[1]
    return dx * dx + dy * dy <= radius * radius


@dataclass(slots=True)
class Reception:
    receiver: int
    pos: Position
    corrupted: bool = False


@dataclass(slots=True)
class Transmission:
    sender: int
    frame: Any
    start: int
    end: int
    origin: Position
    receptions: list[Reception] = field(default_factory=list)


class Channel:
    """Tracks in-flight transmissions and decides reception outcomes.

    Positions are sampled once per transmission at its start; node movement
    within a single frame's airtime is below a decimetre at the speeds
    modelled here and is ignored.
    """

    def __init__(self, cfg: RadioConfig, node_count: int, position_fn: PositionFn):
        self.cfg = cfg
        self.node_count = node_count
        self._pos = position_fn
        self.active: list[Transmission] = []
        self.corrupted_count: dict[int, int] = {}
        self.delivered_count: dict[int, int] = {}

    def is_transmitting(self, node: int, now: int) -> bool:
        return any(t.sender == node and t.start <= now < t.end for t in self.active)

    def medium_busy(self, node: int, now: int) -> bool:
        """Deferral-grade carrier sense: counts transmissions starting <= now."""
        return self._busy(node, now, include_now_started=True)

    def medium_busy_strict(self, node: int, now: int) -> bool:
        """Transmit-decision carrier sense: a tx starting exactly now is inaudible."""
        return self._busy(node, now, include_now_started=False)

    def _busy(self, node: int, now: int, include_now_started: bool) -> bool:
        cs2 = self.cfg.carrier_sense_range ** 2
        px = py = 0.0
        have_pos = False
        for t in self.active:
            if not (t.start <= now < t.end):
                continue
            if t.sender == node:
                return True
            if t.start == now and not include_now_started:
                continue
            if not have_pos:
                px, py = self._pos(node, now)
                have_pos = True
            dx = t.origin[0] - px
            dy = t.origin[1] - py
            if dx * dx + dy * dy <= cs2:
                return True
        return False

    def begin(self, sender: int, frame: Any, now: int, airtime: int) -> Transmission:
        """Start a transmission; build its reception set and mark collisions."""
        if self.is_transmitting(sender, now):
            raise KernelError(f"node {sender} started a transmission while already transmitting")
        origin = self._pos(sender, now)
        ox, oy = origin
        tx = Transmission(sender, frame, now, now + airtime, origin)

        # a frame ending exactly now is already off the air (its completion
        # event may simply not have run yet)
        live = [t for t in self.active if t.end > now]
        on_air = {t.sender for t in live if t.start <= now}
        r2 = self.cfg.tx_range ** 2
        pos_of = self._pos
        receptions = tx.receptions
        for nid in range(self.node_count):
            if nid == sender:
                continue
            pos = pos_of(nid, now)
            dx = pos[0] - ox
            dy = pos[1] - oy
            if dx * dx + dy * dy <= r2:
                # half-duplex: a busy sender hears nothing
                receptions.append(Reception(nid, pos, nid in on_air))

        # overlap with anything still on the air corrupts both ways, and a
        # node that starts sending loses whatever it was receiving
        for other in live:
            oox, ooy = other.origin
            for rec in receptions:
                dx = rec.pos[0] - oox
                dy = rec.pos[1] - ooy
                if dx * dx + dy * dy <= r2:
                    rec.corrupted = True
            for rec in other.receptions:
                if rec.receiver == sender:
                    rec.corrupted = True
                else:
                    dx = rec.pos[0] - ox
                    dy = rec.pos[1] - oy
                    if dx * dx + dy * dy <= r2:
                        rec.corrupted = True

        self.active.append(tx)
        return tx

    def finish(self, tx: Transmission) -> list[Reception]:
        """Remove a completed transmission and return its reception outcomes."""
        self.active.remove(tx)
        for rec in tx.receptions:
            if rec.corrupted:
                self.corrupted_count[rec.receiver] = self.corrupted_count.get(rec.receiver, 0) + 1
            else:
                self.delivered_count[rec.receiver] = self.delivered_count.get(rec.receiver, 0) + 1
        return tx.receptions
