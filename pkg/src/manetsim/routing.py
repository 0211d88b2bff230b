"""On-demand distance-vector routing: RREQ flooding, reverse-path RREP,
route expiry, local invalidation on MAC link failure, discovery buffering.

Deliberately minimal: replies come from the destination only, there are no
sequence numbers, no hello messages and no error propagation beyond removing
the routes that used a dead next hop.  Each node caches (originator,
rreq_id) pairs so a flood visits it at most once, records the reverse path
hop-by-hop while the request spreads, and the reply walks that reverse path
back, installing forward routes as it goes.

Packets with no route are buffered (64 per node) while discovery runs: one
request plus up to ``rreq_retries`` re-floods at ``rreq_retry_interval``
spacing, after which the buffered packets are dropped as unroutable.  A
route stays alive for ``route_timeout`` after the last acked forward along
it.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, replace

from .kernel import Event, EventKind
from .mac import BROADCAST_ADDR, Frame, FrameKind


@dataclass(slots=True)
class RouteEntry:
    destination: int
    next_hop: int
    hop_count: int
    expires_at: int


@dataclass(slots=True)
class Rreq:
    originator: int
    rreq_id: int
    target: int
    hops: int


@dataclass(slots=True)
class Rrep:
    originator: int   # node that asked; the reply travels back to it
    target: int       # node that was sought and is replying
    hops: int


@dataclass(slots=True)
class RoutingConfig:
    route_timeout_us: int = 3_000_000
    rreq_retries: int = 2
    rreq_retry_interval_us: int = 1_000_000
    buffer_capacity: int = 64
    rreq_bytes: int = 24
    rrep_bytes: int = 20
    # flooded requests are deferred by a uniform random jitter so that the
    # neighbours of one sender do not all contend in lockstep
    rreq_jitter_us: int = 10_000


@dataclass(slots=True)
class _Discovery:
    rreq_id: int
    retries_left: int
    timer: Event


class RoutingNode:
    """Routing state and handlers for one node."""

    def __init__(self, node_id: int, cfg: RoutingConfig, host):
        self.id = node_id
        self.cfg = cfg
        self.host = host
        self.table: dict[int, RouteEntry] = {}
        self.seen_rreq: set[tuple[int, int]] = set()
        self.buffer: dict[int, deque[Frame]] = {}
        self.buffered_total = 0
        self.pending: dict[int, _Discovery] = {}
        self._rreq_counter = 0

    # ----- lookup -------------------------------------------------------

    def live_route(self, destination: int, now: int) -> RouteEntry | None:
        entry = self.table.get(destination)
        if entry is None:
            return None
        if entry.expires_at < now:
            del self.table[destination]
            return None
        return entry

    def expire_routes(self, now: int) -> int:
        """Drop every entry past its expiry; returns how many went."""
        stale = [d for d, e in self.table.items() if e.expires_at < now]
        for d in stale:
            del self.table[d]
        return len(stale)

    # ----- data path ------------------------------------------------------

    def route_or_discover(self, frame: Frame, now: int) -> str:
        """Forward along a live route, or buffer the packet and flood a request.

        Returns "forwarded", "buffered" or "dropped" (buffer overflow).
        """
        dest = frame.final_destination
        entry = self.live_route(dest, now)
        if entry is not None:
            hop = replace(frame, src=self.id, dst=entry.next_hop,
                          retries=0, accepted=False, routed_via=dest)
            if hop.path is not None:
                hop.path.append(self.id)
            self.host.mac_enqueue(self.id, hop)
            return "forwarded"
        if self.buffered_total >= self.cfg.buffer_capacity:
            self.host.on_no_route_drop(self.id, frame)
            return "dropped"
        self.buffer.setdefault(dest, deque()).append(frame)
        self.buffered_total += 1
        if dest not in self.pending:
            self._originate_rreq(dest, now)
        return "buffered"

    def _originate_rreq(self, dest: int, now: int) -> None:
        rreq_id = self._rreq_counter
        self._rreq_counter += 1
        self.seen_rreq.add((self.id, rreq_id))
        self._broadcast_rreq(Rreq(self.id, rreq_id, dest, 0), now)
        self.host.metrics.rreq_originated += 1
        timer = self.host.schedule_routing(
            now + self.cfg.rreq_retry_interval_us, EventKind.RREQ_RETRY, self.id, dest)
        self.pending[dest] = _Discovery(rreq_id, self.cfg.rreq_retries, timer)

    def _broadcast_rreq(self, rreq: Rreq, now: int) -> None:
        frame = Frame(FrameKind.BROADCAST, self.id, BROADCAST_ADDR,
                      self.cfg.rreq_bytes, seq=rreq.rreq_id,
                      origin_source=rreq.originator, final_destination=rreq.target,
                      ctl=rreq)
        self.host.enqueue_jittered(self.id, frame, self.cfg.rreq_jitter_us)

    def on_rreq_retry(self, dest: int, now: int) -> None:
        disc = self.pending.get(dest)
        if disc is None:
            return
        if disc.retries_left > 0:
            disc.retries_left -= 1
            disc.rreq_id = self._rreq_counter
            self._rreq_counter += 1
            self.seen_rreq.add((self.id, disc.rreq_id))
            self._broadcast_rreq(Rreq(self.id, disc.rreq_id, dest, 0), now)
            self.host.metrics.rreq_originated += 1
            kind = EventKind.RREQ_RETRY if disc.retries_left > 0 else EventKind.ROUTE_TIMEOUT
            disc.timer = self.host.schedule_routing(
                now + self.cfg.rreq_retry_interval_us, kind, self.id, dest)
        else:
            self._discovery_failed(dest)

    def _discovery_failed(self, dest: int) -> None:
        self.pending.pop(dest, None)
        queued = self.buffer.pop(dest, None)
        if queued:
            self.buffered_total -= len(queued)
            for frame in queued:
                self.host.on_no_route_drop(self.id, frame)

    # ----- control path ---------------------------------------------------

    def handle_rreq(self, frame: Frame, now: int) -> str:
        rreq: Rreq = frame.ctl
        key = (rreq.originator, rreq.rreq_id)
        if key in self.seen_rreq:
            return "ignored"
        self.seen_rreq.add(key)
        self._install(rreq.originator, frame.src, rreq.hops + 1, now)
        if rreq.target == self.id:
            reply = Rrep(rreq.originator, self.id, 0)
            out = Frame(FrameKind.DATA, self.id, frame.src, self.cfg.rrep_bytes,
                        seq=rreq.rreq_id, origin_source=self.id,
                        final_destination=rreq.originator, ctl=reply,
                        routed_via=rreq.originator)
            self.host.mac_enqueue(self.id, out)
            self.host.metrics.rrep_sent += 1
            return "replied"
        onward = replace(frame, src=self.id, ctl=replace(rreq, hops=rreq.hops + 1))
        self.host.enqueue_jittered(self.id, onward, self.cfg.rreq_jitter_us)
        self.host.metrics.rreq_rebroadcast += 1
        return "rebroadcast"

    def handle_rrep(self, frame: Frame, now: int) -> None:
        rrep: Rrep = frame.ctl
        self._install(rrep.target, frame.src, rrep.hops + 1, now)
        if rrep.originator == self.id:
            disc = self.pending.pop(rrep.target, None)
            if disc is not None:
                self.host.cancel_routing(disc.timer)
            self._flush_buffer(rrep.target, now)
            return
        back = self.live_route(rrep.originator, now)
        if back is None:
            return  # reverse path gone; originator will retry
        out = replace(frame, src=self.id, dst=back.next_hop, retries=0,
                      accepted=False, ctl=replace(rrep, hops=rrep.hops + 1),
                      routed_via=rrep.originator)
        self.host.mac_enqueue(self.id, out)

    def _flush_buffer(self, dest: int, now: int) -> None:
        queued = self.buffer.pop(dest, None)
        if not queued:
            return
        self.buffered_total -= len(queued)
        for frame in queued:
            self.route_or_discover(frame, now)

    def _install(self, destination: int, next_hop: int, hops: int, now: int) -> None:
        self.table[destination] = RouteEntry(
            destination, next_hop, hops, now + self.cfg.route_timeout_us)

    # ----- MAC feedback -----------------------------------------------------

    def on_mac_success(self, frame: Frame, now: int) -> None:
        """An acked forward refreshes the route entry it travelled on."""
        if frame.routed_via is None:
            return
        entry = self.table.get(frame.routed_via)
        if entry is not None and entry.next_hop == frame.dst:
            entry.expires_at = now + self.cfg.route_timeout_us

    def on_link_failure(self, next_hop: int, now: int) -> int:
        """Invalidate routes through a dead hop and re-route queued frames."""
        dead = [d for d, e in self.table.items() if e.next_hop == next_hop]
        for d in dead:
            del self.table[d]
        self.host.metrics.routes_invalidated += len(dead)
        for frame in self.host.mac_extract(self.id, next_hop):
            self.route_or_discover(frame, now)
        return len(dead)
