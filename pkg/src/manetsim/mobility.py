"""Random-waypoint motion with zero pause, plus CBR session construction.

Each node repeatedly picks a destination uniformly inside the terrain and a
speed uniformly from [1, 2*avg_speed - 1] m/s (mean avg_speed, strictly
positive minimum), then moves there in a straight line and immediately picks
the next leg.  Positions between waypoints are linear interpolations, so
trajectories are continuous and stay inside the terrain.

Draw order is pinned for reproducibility: first every node's starting
position (x then y, node 0 upward), then every node's first leg (x, y,
speed), then the source-destination pair permutation; after startup, draws
happen in event order.
"""

from __future__ import annotations

from dataclasses import dataclass

from .kernel import EventKind, Kernel, RandomSource
from .scenario import ConfigError


@dataclass(slots=True)
class WaypointLeg:
    from_x: float
    from_y: float
    to_x: float
    to_y: float
    speed: float
    depart_us: int
    arrive_us: int


class RandomWaypoint:
    """Per-node waypoint legs driven by WAYPOINT_ARRIVAL events."""

    def __init__(self, node_count: int, width: float, height: float,
                 avg_speed: float, rng: RandomSource):
        if avg_speed < 1.0:
            raise ConfigError("avg_speed must be at least 1 m/s")
        self.width = width
        self.height = height
        self.speed_lo = 1.0
        self.speed_hi = 2.0 * avg_speed - 1.0
        self._rng = rng
        self.legs: list[WaypointLeg] = []
        starts = [(rng.uniform_real(0.0, width), rng.uniform_real(0.0, height))
                  for _ in range(node_count)]
        for x, y in starts:
            self.legs.append(self._new_leg(x, y, depart_us=0))

    def _new_leg(self, x: float, y: float, depart_us: int) -> WaypointLeg:
        to_x = self._rng.uniform_real(0.0, self.width)
        to_y = self._rng.uniform_real(0.0, self.height)
        speed = self._rng.uniform_real(self.speed_lo, self.speed_hi)
        dist = ((to_x - x) ** 2 + (to_y - y) ** 2) ** 0.5
        arrive = depart_us + round(dist / speed * 1_000_000)
        return WaypointLeg(x, y, to_x, to_y, speed, depart_us, arrive)

    def start(self, kernel: Kernel) -> None:
        for node, leg in enumerate(self.legs):
            kernel.schedule(leg.arrive_us, EventKind.WAYPOINT_ARRIVAL, node=node)

    def on_arrival(self, kernel: Kernel, node: int) -> None:
        old = self.legs[node]
        leg = self._new_leg(old.to_x, old.to_y, depart_us=kernel.now)
        self.legs[node] = leg
        kernel.schedule(leg.arrive_us, EventKind.WAYPOINT_ARRIVAL, node=node)

    def position(self, node: int, t_us: int) -> tuple[float, float]:
        leg = self.legs[node]
        depart = leg.depart_us
        if t_us <= depart:
            return (leg.from_x, leg.from_y)
        arrive = leg.arrive_us
        if t_us >= arrive:
            return (leg.to_x, leg.to_y)
        frac = (t_us - depart) / (arrive - depart)
        return (leg.from_x + (leg.to_x - leg.from_x) * frac,
                leg.from_y + (leg.to_y - leg.from_y) * frac)


class FixedPositions:
    """Immobile stand-in for RandomWaypoint, for controlled topologies."""

    def __init__(self, positions: list[tuple[float, float]]):
        self.positions = list(positions)

    def start(self, kernel: Kernel) -> None:
        pass

    def on_arrival(self, kernel: Kernel, node: int) -> None:
        pass

    def position(self, node: int, t_us: int) -> tuple[float, float]:
        return self.positions[node]


@dataclass(slots=True)
class CbrSession:
    source: int
    destination: int
    packet_bytes: int = 512
    interval_us: int = 250_000
    start_us: int = 1_000_000_000
    end_us: int = 1_800_000_000
    next_seq: int = 0


def build_sdp_set(rng: RandomSource, node_count: int, sdp_count: int,
                  disjoint: bool = True) -> list[tuple[int, int]]:
    """Pick source-destination pairs.

    In disjoint mode (the default) all 2*sdp_count endpoints are distinct
    nodes, chosen by a Fisher-Yates shuffle of the node ids; pair i is
    (perm[2i], perm[2i+1]).  Otherwise pairs are drawn with replacement,
    rejecting self-pairs and repeats of an already chosen pair.
    """
    if sdp_count == 0:
        return []
    if disjoint:
        if 2 * sdp_count > node_count:
            raise ConfigError(
                f"{sdp_count} disjoint pairs need {2 * sdp_count} nodes, have {node_count}")
        perm = list(range(node_count))
        for i in range(node_count - 1, 0, -1):
            j = rng.uniform_int(0, i)
            perm[i], perm[j] = perm[j], perm[i]
        return [(perm[2 * i], perm[2 * i + 1]) for i in range(sdp_count)]
    if sdp_count > node_count * (node_count - 1):
        raise ConfigError("more pairs requested than distinct (source, destination) pairs exist")
    pairs: list[tuple[int, int]] = []
    chosen: set[tuple[int, int]] = set()
    while len(pairs) < sdp_count:
        src = rng.uniform_int(0, node_count - 1)
        dst = rng.uniform_int(0, node_count - 1)
        if src == dst or (src, dst) in chosen:
            continue
        chosen.add((src, dst))
        pairs.append((src, dst))
    return pairs
