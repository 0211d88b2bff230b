"""Per-node IEEE 802.11 DCF: DIFS deference, slotted backoff, DATA/ACK, retries.

Channel access for a head-of-line frame follows the basic-access DCF cycle:
wait for a full DIFS of idle medium, draw a backoff from the current
contention window, count it down one idle slot at a time (freezing while the
medium is busy and re-waiting DIFS before resuming), transmit at zero, and
for unicast data wait SIFS + ack airtime + one guard slot for the ACK.  A
received ACK applies the policy's success update; an ACK timeout applies the
collision update and retries from the DIFS step, up to ``retry_limit``
retries, after which the frame is dropped and routing is told the link
failed.  Broadcast frames contend the same way but complete without ACK,
retries, or any contention-window change.

The backoff countdown is realised as a single scheduled event at the slot
boundary where the counter reaches zero; when the medium turns busy
mid-countdown the event is cancelled and the whole slots already elapsed are
credited (a partially elapsed slot is discarded).  On the aligned slot
boundaries this is step-for-step identical to per-slot ticking, with far
fewer events.

ACKs bypass carrier sense and backoff entirely: they are transmitted exactly
SIFS after the data frame that elicited them.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable

from .backoff import ContentionState, draw_backoff, on_collision, on_success
from .kernel import Event, EventKind, KernelError
from .metrics import PacketRecord

BROADCAST_ADDR = -1


class FrameKind(Enum):
    DATA = "data"
    ACK = "ack"
    BROADCAST = "broadcast"


@dataclass(slots=True)
class Frame:
    kind: FrameKind
    src: int
    dst: int
    payload_bytes: int
    seq: int
    enqueue_time: int | None = None
    origin_source: int = -1
    final_destination: int = -1
    retries: int = 0
    ctl: Any = None                      # routing control payload, if any
    record: PacketRecord | None = None   # metrics identity for CBR data
    routed_via: int | None = None        # routing-table key used to pick dst
    accepted: bool = False               # set once the addressed receiver took it
    path: list[int] | None = None        # hop trace, filled when tracing is on


@dataclass(slots=True)
class MacTiming:
    slot_us: int = 20
    sifs_us: int = 10
    difs_us: int = 50
    ack_timeout_us: int = 278  # sifs + ack airtime + one guard slot
    retry_limit: int = 7
    queue_capacity: int = 50
    mac_overhead_bytes: int = 28
    ack_bytes: int = 14


@dataclass(slots=True)
class MacStats:
    tx_attempts: int = 0
    successes: int = 0
    collisions: int = 0
    dropped_retry: int = 0
    queue_rejected: int = 0
    last_success_at: int = -1


class MacPhase(Enum):
    IDLE = "idle"
    WAIT_DIFS = "wait_difs"   # pending event set: DIFS running; unset: awaiting idle
    BACKOFF = "backoff"       # counting down; completion event pending
    TX = "tx"
    WAIT_ACK = "wait_ack"


class MacNode:
    """DCF state machine for one node.

    The host object supplies the kernel, RNG, channel queries and the upcalls
    (deliver_up, on_mac_success, on_mac_drop, on_queue_drop, send_ack,
    begin_data_tx); see Simulation for the production wiring.
    """

    def __init__(self, node_id: int, timing: MacTiming, contention: ContentionState, host):
        self.id = node_id
        self.timing = timing
        self.contention = contention
        self.host = host
        self.queue: deque[Frame] = deque()
        self.phase = MacPhase.IDLE
        self.remaining_slots: int | None = None  # None: fresh draw on next DIFS expiry
        self.anchor = 0                          # countdown start time
        self.pending: Event | None = None        # DIFS_EXPIRED or SLOT_TICK in flight
        self.ack_timer: Event | None = None
        self.stats = MacStats()
        self.source: Callable[[], Frame] | None = None  # saturated-traffic hook
        self.record_cw = False
        self.cw_trace: list[int] = []
        self._last_rx: dict[int, Frame] = {}     # per-transmitter duplicate filter

    # ----- queueing ---------------------------------------------------

    def enqueue(self, frame: Frame, now: int) -> bool:
        """Append to the interface queue; full queue drops the frame."""
        if len(self.queue) >= self.timing.queue_capacity:
            self.stats.queue_rejected += 1
            self.host.on_queue_drop(self.id, frame)
            return False
        if frame.enqueue_time is None:
            frame.enqueue_time = now
        self.queue.append(frame)
        if self.phase is MacPhase.IDLE:
            self._start_access(now)
        return True

    def extract_frames_to(self, next_hop: int) -> list[Frame]:
        """Remove queued data frames addressed to next_hop.

        The head frame stays put unless the MAC is idle: any running access
        cycle (DIFS, backoff, transmission, ack wait) is pinned to it.
        """
        if not self.queue:
            return []
        head_pinned = self.phase is not MacPhase.IDLE
        keep: deque[Frame] = deque()
        pulled: list[Frame] = []
        for i, frame in enumerate(self.queue):
            in_service = head_pinned and i == 0
            if (not in_service and frame.kind is FrameKind.DATA
                    and frame.ctl is None and frame.dst == next_hop):
                pulled.append(frame)
            else:
                keep.append(frame)
        self.queue = keep
        return pulled

    def attach_source(self, make_frame: Callable[[], Frame]) -> None:
        self.source = make_frame

    def _refill(self, now: int) -> None:
        if self.source is not None and not self.queue:
            self.enqueue(self.source(), now)

    # ----- channel access ---------------------------------------------

    def _start_access(self, now: int) -> None:
        self.phase = MacPhase.WAIT_DIFS
        if self.host.medium_busy(self.id):
            self.pending = None  # resume via the idle notification
        else:
            self.pending = self.host.schedule_mac(
                now + self.timing.difs_us, EventKind.DIFS_EXPIRED, self.id)

    def on_medium_busy(self, now: int) -> None:
        """Freeze a running DIFS wait or backoff countdown.

        An event firing at exactly `now` is left alone: the station cannot
        have sensed a transmission that starts this very instant, which is
        what produces same-slot collisions.
        """
        if self.pending is None or self.pending.fire_at <= now:
            return
        if self.phase is MacPhase.WAIT_DIFS:
            self.host.cancel_mac(self.pending)
            self.pending = None
        elif self.phase is MacPhase.BACKOFF:
            elapsed = (now - self.anchor) // self.timing.slot_us
            self.remaining_slots = (self.remaining_slots or 0) - elapsed
            self.host.cancel_mac(self.pending)
            self.pending = None
            self.phase = MacPhase.WAIT_DIFS

    def on_medium_idle(self, now: int) -> None:
        """Restart the DIFS wait once the medium has gone quiet."""
        if self.phase is MacPhase.WAIT_DIFS and self.pending is None:
            self.pending = self.host.schedule_mac(
                now + self.timing.difs_us, EventKind.DIFS_EXPIRED, self.id)

    def on_difs_expired(self, now: int) -> None:
        self.pending = None
        if self.phase is not MacPhase.WAIT_DIFS:
            raise KernelError(f"node {self.id}: DIFS expiry in phase {self.phase}")
        if self.remaining_slots is None:
            self.remaining_slots = draw_backoff(self.contention, self.host.rng)
        if self.remaining_slots == 0:
            self._transmit(now)
            return
        # a transmission that began at this same instant is only noticed now
        if self.host.medium_busy(self.id):
            return
        self.phase = MacPhase.BACKOFF
        self.anchor = now
        self.pending = self.host.schedule_mac(
            now + self.remaining_slots * self.timing.slot_us, EventKind.SLOT_TICK, self.id)

    def on_slot_tick(self, now: int) -> None:
        self.pending = None
        if self.phase is not MacPhase.BACKOFF:
            raise KernelError(f"node {self.id}: slot tick in phase {self.phase}")
        self.remaining_slots = 0
        if self.host.medium_busy_strict(self.id):
            # drifted into carrier-sense range mid-countdown; defer
            self.phase = MacPhase.WAIT_DIFS
            return
        self._transmit(now)

    def _transmit(self, now: int) -> None:
        frame = self.queue[0]
        self.phase = MacPhase.TX
        self.remaining_slots = None
        self.stats.tx_attempts += 1
        if self.record_cw:
            self.cw_trace.append(self.contention.cw)
        self.host.begin_data_tx(self.id, frame)

    # ----- transmission completion ------------------------------------

    def on_tx_end(self, frame: Frame, now: int) -> None:
        """Sender-side bookkeeping once a data/broadcast frame left the air."""
        if frame.kind is FrameKind.BROADCAST:
            self.queue.popleft()
            self.phase = MacPhase.IDLE
            self._refill(now)
            if self.queue:
                self._start_access(now)
        else:
            self.phase = MacPhase.WAIT_ACK
            self.ack_timer = self.host.schedule_mac(
                now + self.timing.ack_timeout_us, EventKind.ACK_TIMEOUT, self.id)

    def on_ack_timeout(self, now: int) -> None:
        self.ack_timer = None
        if self.phase is not MacPhase.WAIT_ACK:
            raise KernelError(f"node {self.id}: ack timeout in phase {self.phase}")
        self.contention = on_collision(self.contention)
        self.stats.collisions += 1
        frame = self.queue[0]
        frame.retries += 1
        if frame.retries > self.timing.retry_limit:
            self.queue.popleft()
            self.stats.dropped_retry += 1
            self.phase = MacPhase.IDLE
            self.host.on_mac_drop(self.id, frame)
            self._refill(now)
            if self.queue and self.phase is MacPhase.IDLE:
                self._start_access(now)
        else:
            self._start_access(now)

    # ----- reception ---------------------------------------------------

    def on_receive(self, frame: Frame, now: int) -> None:
        """Handle an intact frame heard at this node."""
        if frame.kind is FrameKind.ACK:
            if (self.phase is MacPhase.WAIT_ACK and frame.dst == self.id
                    and self.queue and frame.src == self.queue[0].dst
                    and frame.seq == self.queue[0].seq):
                self._complete_success(now)
            return
        if frame.kind is FrameKind.BROADCAST:
            self.host.deliver_up(self.id, frame)
            return
        # unicast data
        if frame.dst != self.id:
            return
        duplicate = self._last_rx.get(frame.src) is frame
        self._last_rx[frame.src] = frame
        self.host.send_ack(self.id, frame)
        if not duplicate:
            frame.accepted = True
            self.host.deliver_up(self.id, frame)

    def _complete_success(self, now: int) -> None:
        if self.ack_timer is not None:
            self.host.cancel_mac(self.ack_timer)
            self.ack_timer = None
        self.contention = on_success(self.contention)
        self.stats.successes += 1
        self.stats.last_success_at = now
        frame = self.queue.popleft()
        self.phase = MacPhase.IDLE
        self.host.on_mac_success(self.id, frame)
        self._refill(now)
        if self.queue and self.phase is MacPhase.IDLE:
            self._start_access(now)
