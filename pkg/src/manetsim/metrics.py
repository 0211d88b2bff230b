"""Per-run counters, packet lifecycle accounting, and the two report metrics.

Every CBR packet gets one PacketRecord that moves through exactly one
lifecycle: in_network -> delivered | dropped_queue | dropped_mac |
dropped_no_route, or it is still in_network when the run ends and counts as
in flight.  That single-status rule is what makes the conservation ledger

    generated == delivered + dropped_queue + dropped_mac + dropped_no_route
                 + in_flight_at_end

hold exactly.  A MAC-level drop of a frame whose data already reached the
next hop (data arrived, ack lost, retries exhausted) is a ghost copy, not a
packet loss: the live copy continues downstream, so such drops do not touch
the ledger.

The end-to-end delay clock starts when the source generates the packet and
stops when the final destination receives it, so it covers route-discovery
buffering, interface queueing, MAC retransmissions, and airtime.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum


class PacketStatus(Enum):
    IN_NETWORK = "in_network"
    DELIVERED = "delivered"
    DROPPED_QUEUE = "dropped_queue"
    DROPPED_MAC = "dropped_mac"
    DROPPED_NO_ROUTE = "dropped_no_route"


@dataclass(slots=True)
class PacketRecord:
    origin: int
    destination: int
    seq: int
    created_at: int
    status: PacketStatus = PacketStatus.IN_NETWORK


@dataclass
class RunMetrics:
    """Counters for one seeded run."""

    seed: int = 0
    generated: dict[int, int] = field(default_factory=dict)     # per source
    received: dict[int, int] = field(default_factory=dict)      # per destination
    delay_sum_us: dict[int, int] = field(default_factory=dict)  # per destination
    delay_count: dict[int, int] = field(default_factory=dict)   # per destination
    dropped_queue: int = 0
    dropped_mac: int = 0
    dropped_no_route: int = 0
    in_flight_at_end: int = 0
    rreq_originated: int = 0
    rreq_rebroadcast: int = 0
    rrep_sent: int = 0
    routes_invalidated: int = 0
    _records: list[PacketRecord] = field(default_factory=list, repr=False)

    _DROP_FIELD = {
        PacketStatus.DROPPED_QUEUE: "dropped_queue",
        PacketStatus.DROPPED_MAC: "dropped_mac",
        PacketStatus.DROPPED_NO_ROUTE: "dropped_no_route",
    }

    def new_packet(self, origin: int, destination: int, seq: int, now: int) -> PacketRecord:
        rec = PacketRecord(origin, destination, seq, now)
        self._records.append(rec)
        self.generated[origin] = self.generated.get(origin, 0) + 1
        return rec

    def deliver(self, rec: PacketRecord, now: int) -> None:
        if rec.status is not PacketStatus.IN_NETWORK:
            return
        rec.status = PacketStatus.DELIVERED
        dst = rec.destination
        self.received[dst] = self.received.get(dst, 0) + 1
        self.delay_sum_us[dst] = self.delay_sum_us.get(dst, 0) + (now - rec.created_at)
        self.delay_count[dst] = self.delay_count.get(dst, 0) + 1

    def drop(self, rec: PacketRecord, status: PacketStatus) -> None:
        if rec.status is not PacketStatus.IN_NETWORK:
            return
        rec.status = status
        name = self._DROP_FIELD[status]
        setattr(self, name, getattr(self, name) + 1)

    def finalize(self) -> None:
        self.in_flight_at_end = sum(
            1 for r in self._records if r.status is PacketStatus.IN_NETWORK)

    @property
    def total_generated(self) -> int:
        return sum(self.generated.values())

    @property
    def total_delivered(self) -> int:
        return sum(self.received.values())

    def run_pdr(self) -> float:
        return pdr([self])

    def run_delay_us(self) -> float | None:
        """Mean over destinations of per-destination mean delay, in us."""
        means = [self.delay_sum_us[d] / self.delay_count[d]
                 for d in sorted(self.delay_count) if self.delay_count[d] > 0]
        if not means:
            return None
        return sum(means) / len(means)


def pdr(runs: list[RunMetrics]) -> float:
    """Packet delivery ratio over a set of runs: ratio of summed counts."""
    generated = sum(r.total_generated for r in runs)
    if generated == 0:
        raise ValueError("packet delivery ratio is undefined with zero generated packets")
    delivered = sum(r.total_delivered for r in runs)
    return delivered / generated


def avg_end_to_end_delay(runs: list[RunMetrics]) -> float | None:
    """Cross-run mean of each run's destination-averaged delay, in us.

    Destinations that received nothing contribute no per-destination mean;
    runs that delivered nothing at all are likewise excluded.  Returns None
    when no run delivered anything.
    """
    per_run = [d for d in (r.run_delay_us() for r in runs) if d is not None]
    if not per_run:
        return None
    return sum(per_run) / len(per_run)
