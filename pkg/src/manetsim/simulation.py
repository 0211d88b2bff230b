"""One seeded run: builds every subsystem and drives it through the kernel.

The Simulation object is the host surface the MAC and routing layers talk
to: it owns the kernel, the shared random source, the radio channel, one
MacNode and one RoutingNode per node, the mobility model and the CBR
sessions, and it translates kernel events into the right per-node handler
calls.

Carrier-sense change notifications are pushed, not polled: when a
transmission starts, every node in carrier-sense range with a running
DIFS/backoff timer freezes; when one ends, every node still waiting
re-checks the medium and, if quiet, restarts its DIFS.  A node can drift
relative to senders between events, so the end-of-transmission re-check
deliberately scans all nodes rather than only those near the finished
sender.
"""

from __future__ import annotations

from .backoff import BackoffParams, fresh_state, policy_from_name
from .kernel import Event, EventKind, Kernel, RandomSource
from .mac import BROADCAST_ADDR, Frame, FrameKind, MacNode, MacPhase, MacTiming
from .metrics import PacketStatus, RunMetrics
from .mobility import CbrSession, FixedPositions, RandomWaypoint, build_sdp_set
from .phy import Channel, RadioConfig, airtime_us, in_range
from .routing import RoutingConfig, RoutingNode, Rrep, Rreq
from .scenario import Scenario

UNROUTED = -2  # placeholder MAC destination before routing picks a next hop


class Simulation:
    def __init__(self, scenario: Scenario, seed: int, trace_paths: bool = False):
        scenario.validate()
        self.scenario = scenario
        self.trace_paths = trace_paths
        self.kernel = Kernel()
        self.rng = RandomSource(seed)
        self.metrics = RunMetrics(seed=seed)

        self.radio = RadioConfig(
            tx_range=scenario.tx_range,
            carrier_sense_range=scenario.tx_range * scenario.carrier_sense_factor,
            data_rate=scenario.data_rate,
            phy_overhead_us=scenario.phy_overhead_us,
        )
        self.timing = MacTiming(
            slot_us=scenario.slot_us,
            sifs_us=scenario.sifs_us,
            difs_us=scenario.difs_us,
            retry_limit=scenario.retry_limit,
            queue_capacity=scenario.queue_capacity,
            mac_overhead_bytes=scenario.mac_overhead_bytes,
            ack_bytes=scenario.ack_bytes,
        )
        self.timing.ack_timeout_us = (
            scenario.sifs_us + airtime_us(scenario.ack_bytes, self.radio) + scenario.slot_us)

        if scenario.fixed_positions is not None:
            self.mobility = FixedPositions(scenario.fixed_positions)
        else:
            self.mobility = RandomWaypoint(
                scenario.node_count, scenario.terrain_width, scenario.terrain_height,
                scenario.avg_speed, self.rng)
        self.channel = Channel(self.radio, scenario.node_count, self.mobility.position)

        params = BackoffParams(
            cw_min=scenario.cw_min, cw_max=scenario.cw_max,
            eied_increase=scenario.eied_increase, eied_decrease=scenario.eied_decrease,
            mbeb_base=scenario.mbeb_base, mild_step=scenario.mild_step)
        policy = policy_from_name(scenario.algorithm)
        self.macs = [MacNode(n, self.timing, fresh_state(policy, params), self)
                     for n in range(scenario.node_count)]

        routing_cfg = RoutingConfig(
            route_timeout_us=round(scenario.route_timeout_s * 1_000_000),
            rreq_retries=scenario.rreq_retries,
            rreq_retry_interval_us=round(scenario.rreq_retry_interval_s * 1_000_000),
            buffer_capacity=scenario.discovery_buffer,
            rreq_bytes=scenario.rreq_bytes,
            rrep_bytes=scenario.rrep_bytes,
            rreq_jitter_us=scenario.rreq_jitter_us)
        self.routing = [RoutingNode(n, routing_cfg, self) for n in range(scenario.node_count)]

        self.sessions = [
            CbrSession(src, dst, scenario.packet_bytes, scenario.cbr_interval_us,
                       scenario.traffic_start_us, scenario.traffic_end_us)
            for src, dst in build_sdp_set(
                self.rng, scenario.node_count, scenario.sdp_count, scenario.disjoint_sdps)
        ]
        self._mac_seq = 0

        k = self.kernel
        k.on(EventKind.WAYPOINT_ARRIVAL, self._on_waypoint)
        k.on(EventKind.METRICS_WINDOW_START, self._on_window_start)
        k.on(EventKind.CBR_EMIT, self._on_cbr_emit)
        k.on(EventKind.DIFS_EXPIRED, self._on_difs)
        k.on(EventKind.SLOT_TICK, self._on_slot_tick)
        k.on(EventKind.ACK_TIMEOUT, self._on_ack_timeout)
        k.on(EventKind.TX_START, self._on_tx_start)
        k.on(EventKind.TX_END, self._on_tx_end)
        k.on(EventKind.RREQ_RETRY, self._on_rreq_timer)
        k.on(EventKind.ROUTE_TIMEOUT, self._on_rreq_timer)
        k.on(EventKind.RREQ_FORWARD, self._on_rreq_forward)
        k.on(EventKind.SIM_END, self._on_sim_end)

        self.mobility.start(k)
        if self.sessions:
            k.schedule(scenario.traffic_start_us, EventKind.METRICS_WINDOW_START)
        k.schedule(scenario.sim_end_us, EventKind.SIM_END)

    # ----- event handlers -------------------------------------------------

    def _on_waypoint(self, ev: Event) -> None:
        self.mobility.on_arrival(self.kernel, ev.node)

    def _on_window_start(self, ev: Event) -> None:
        for idx, session in enumerate(self.sessions):
            self.kernel.schedule(session.start_us, EventKind.CBR_EMIT, data=idx)

    def _on_cbr_emit(self, ev: Event) -> None:
        session = self.sessions[ev.data]
        now = self.kernel.now
        record = self.metrics.new_packet(
            session.source, session.destination, session.next_seq, now)
        frame = Frame(FrameKind.DATA, session.source, UNROUTED, session.packet_bytes,
                      seq=session.next_seq, enqueue_time=now,
                      origin_source=session.source, final_destination=session.destination,
                      record=record, path=[] if self.trace_paths else None)
        session.next_seq += 1
        self.routing[session.source].route_or_discover(frame, now)
        nxt = now + session.interval_us
        if nxt < session.end_us:
            self.kernel.schedule(nxt, EventKind.CBR_EMIT, data=ev.data)

    def _on_difs(self, ev: Event) -> None:
        self.macs[ev.node].on_difs_expired(self.kernel.now)

    def _on_slot_tick(self, ev: Event) -> None:
        self.macs[ev.node].on_slot_tick(self.kernel.now)

    def _on_ack_timeout(self, ev: Event) -> None:
        self.macs[ev.node].on_ack_timeout(self.kernel.now)

    def _on_tx_start(self, ev: Event) -> None:
        # deferred start used for ACKs: fires SIFS after the data frame
        now = self.kernel.now
        if self.channel.is_transmitting(ev.node, now):
            return  # cannot double-transmit; the data sender will retry
        self._begin_tx(ev.node, ev.frame, now)

    def _on_tx_end(self, ev: Event) -> None:
        now = self.kernel.now
        frame: Frame = ev.frame
        receptions = self.channel.finish(ev.data)
        if frame.kind is not FrameKind.ACK:
            self.macs[ev.node].on_tx_end(frame, now)
        for rec in receptions:
            if not rec.corrupted:
                self.macs[rec.receiver].on_receive(frame, now)
        self._notify_idle(now)

    def _on_rreq_timer(self, ev: Event) -> None:
        self.routing[ev.node].on_rreq_retry(ev.data, self.kernel.now)

    def _on_rreq_forward(self, ev: Event) -> None:
        self.mac_enqueue(ev.node, ev.frame)

    def _on_sim_end(self, ev: Event) -> None:
        self.metrics.finalize()

    # ----- host surface for MacNode ----------------------------------------

    def schedule_mac(self, fire_at: int, kind: EventKind, node: int) -> Event:
        return self.kernel.schedule(fire_at, kind, node=node)

    def cancel_mac(self, ev: Event) -> None:
        self.kernel.cancel(ev)

    def medium_busy(self, node: int) -> bool:
        return self.channel.medium_busy(node, self.kernel.now)

    def medium_busy_strict(self, node: int) -> bool:
        return self.channel.medium_busy_strict(node, self.kernel.now)

    def frame_total_bytes(self, frame: Frame) -> int:
        if frame.kind is FrameKind.ACK:
            return frame.payload_bytes
        return frame.payload_bytes + self.timing.mac_overhead_bytes

    def begin_data_tx(self, node: int, frame: Frame) -> None:
        self._begin_tx(node, frame, self.kernel.now)

    def _begin_tx(self, node: int, frame: Frame, now: int) -> None:
        airtime = airtime_us(self.frame_total_bytes(frame), self.radio)
        tx = self.channel.begin(node, frame, now, airtime)
        self.kernel.schedule(tx.end, EventKind.TX_END, node=node, frame=frame, data=tx)
        self._notify_busy(tx.origin, now)

    def send_ack(self, node: int, data_frame: Frame) -> None:
        ack = Frame(FrameKind.ACK, node, data_frame.src, self.timing.ack_bytes,
                    seq=data_frame.seq)
        self.kernel.schedule(self.kernel.now + self.timing.sifs_us,
                             EventKind.TX_START, node=node, frame=ack)

    def _notify_busy(self, origin: tuple[float, float], now: int) -> None:
        cs = self.radio.carrier_sense_range
        pos = self.mobility.position
        for mac in self.macs:
            if mac.pending is not None and in_range(origin, pos(mac.id, now), cs):
                mac.on_medium_busy(now)

    def _notify_idle(self, now: int) -> None:
        busy = self.channel.medium_busy
        for mac in self.macs:
            if mac.phase is MacPhase.WAIT_DIFS and mac.pending is None \
                    and not busy(mac.id, now):
                mac.on_medium_idle(now)

    def deliver_up(self, node: int, frame: Frame) -> None:
        now = self.kernel.now
        if isinstance(frame.ctl, Rreq):
            self.routing[node].handle_rreq(frame, now)
        elif isinstance(frame.ctl, Rrep):
            self.routing[node].handle_rrep(frame, now)
        elif frame.final_destination == node:
            if frame.path is not None:
                frame.path.append(node)
            if frame.record is not None:
                self.metrics.deliver(frame.record, now)
        elif frame.kind is FrameKind.DATA:
            self.routing[node].route_or_discover(frame, now)

    def on_mac_success(self, node: int, frame: Frame) -> None:
        self.routing[node].on_mac_success(frame, self.kernel.now)

    def on_mac_drop(self, node: int, frame: Frame) -> None:
        # a copy that already reached its receiver is a ghost: the packet
        # lives on downstream and this drop must not hit the ledger
        if frame.record is not None and not frame.accepted:
            self.metrics.drop(frame.record, PacketStatus.DROPPED_MAC)
        self.routing[node].on_link_failure(frame.dst, self.kernel.now)

    def on_queue_drop(self, node: int, frame: Frame) -> None:
        if frame.record is not None:
            self.metrics.drop(frame.record, PacketStatus.DROPPED_QUEUE)

    def on_no_route_drop(self, node: int, frame: Frame) -> None:
        if frame.record is not None:
            self.metrics.drop(frame.record, PacketStatus.DROPPED_NO_ROUTE)

    # ----- host surface for RoutingNode -------------------------------------

    def schedule_routing(self, fire_at: int, kind: EventKind, node: int, dest: int) -> Event:
        return self.kernel.schedule(fire_at, kind, node=node, data=dest)

    def cancel_routing(self, ev: Event) -> None:
        self.kernel.cancel(ev)

    def mac_enqueue(self, node: int, frame: Frame) -> bool:
        return self.macs[node].enqueue(frame, self.kernel.now)

    def enqueue_jittered(self, node: int, frame: Frame, jitter_us: int) -> None:
        if jitter_us <= 0:
            self.mac_enqueue(node, frame)
            return
        delay = self.rng.uniform_int(0, jitter_us)
        self.kernel.schedule(self.kernel.now + delay, EventKind.RREQ_FORWARD,
                             node=node, frame=frame)

    def mac_extract(self, node: int, next_hop: int) -> list[Frame]:
        return self.macs[node].extract_frames_to(next_hop)

    # ----- direct injection helpers (tests and harnesses) --------------------

    def make_packet(self, source: int, destination: int,
                    payload_bytes: int | None = None, with_record: bool = True) -> Frame:
        """A data packet ready for route_or_discover at its source."""
        seq = self._mac_seq
        self._mac_seq += 1
        now = self.kernel.now
        record = self.metrics.new_packet(source, destination, seq, now) if with_record else None
        return Frame(FrameKind.DATA, source, UNROUTED,
                     payload_bytes or self.scenario.packet_bytes, seq=seq,
                     enqueue_time=now, origin_source=source, final_destination=destination,
                     record=record, path=[] if self.trace_paths else None)

    def send(self, source: int, destination: int) -> Frame:
        frame = self.make_packet(source, destination)
        self.routing[source].route_or_discover(frame, self.kernel.now)
        return frame

    def direct_frame(self, src: int, dst: int, with_record: bool = False) -> Frame:
        """Single-hop data frame handed straight to the MAC (no routing)."""
        frame = self.make_packet(src, dst, with_record=with_record)
        frame.dst = dst
        return frame

    def send_direct(self, src: int, dst: int, with_record: bool = False) -> Frame:
        frame = self.direct_frame(src, dst, with_record)
        self.mac_enqueue(src, frame)
        return frame

    # ----- running -----------------------------------------------------------

    def run(self) -> RunMetrics:
        self.kernel.run_until(self.scenario.sim_end_us)
        return self.metrics

    def run_until(self, t_us: int) -> int:
        return self.kernel.run_until(t_us)
