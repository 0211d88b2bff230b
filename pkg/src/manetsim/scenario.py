"""Run configuration: defaults, flat key=value config files, validation.

A Scenario captures one complete simulation setup.  Defaults describe the
standard workload: 50 nodes in a 1000 x 1000 m terrain, random waypoint
motion with zero pause, 25 CBR source-destination pairs at 4 packets/s of
512 bytes over 2 Mbps 802.11 DCF, 1800 s of simulated time with traffic and
measurement confined to the last 800 s.  Every field can be overridden from
a config file (``key = value`` lines, ``#`` comments) or CLI flags.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace

from .backoff import POLICY_KEYS

SPEED_SWEEP_DEFAULT = [5.0, 10.0, 15.0, 20.0, 25.0, 30.0]
RANGE_SWEEP_DEFAULT = [50.0, 100.0, 150.0, 200.0, 250.0, 300.0]


class ConfigError(Exception):
    """Bad user-supplied configuration; reported with exit code 1."""


@dataclass
class Scenario:
    # topology and timeline
    node_count: int = 50
    terrain_width: float = 1000.0
    terrain_height: float = 1000.0
    sim_end_s: float = 1800.0
    traffic_start_s: float = 1000.0
    traffic_end_s: float = 1800.0
    # traffic
    sdp_count: int = 25
    disjoint_sdps: bool = True
    packet_bytes: int = 512
    cbr_interval_us: int = 250_000
    # mobility
    avg_speed: float = 10.0
    # radio
    tx_range: float = 250.0
    carrier_sense_factor: float = 2.0
    data_rate: int = 2_000_000
    phy_overhead_us: int = 192
    # MAC
    algorithm: str = "beb"
    cw_min: int = 32
    cw_max: int = 1024
    eied_increase: float = 2.0
    eied_decrease: float = 2.0 ** 0.125
    mbeb_base: float = 1.5
    mild_step: int = 1
    slot_us: int = 20
    sifs_us: int = 10
    difs_us: int = 50
    retry_limit: int = 7
    queue_capacity: int = 50
    mac_overhead_bytes: int = 28
    ack_bytes: int = 14
    # routing
    route_timeout_s: float = 3.0
    rreq_retries: int = 2
    rreq_retry_interval_s: float = 1.0
    discovery_buffer: int = 64
    rreq_bytes: int = 24
    rrep_bytes: int = 20
    rreq_jitter_us: int = 10_000
    # execution
    seeds: list[int] = field(default_factory=lambda: [1, 2, 3, 4, 5])
    # test hook: pin node positions and disable mobility (not file-configurable)
    fixed_positions: list[tuple[float, float]] | None = None

    def validate(self) -> None:
        if self.fixed_positions is not None and len(self.fixed_positions) != self.node_count:
            raise ConfigError("fixed_positions length must equal node_count")
        if self.node_count < 2:
            raise ConfigError("node_count must be at least 2")
        if self.terrain_width <= 0 or self.terrain_height <= 0:
            raise ConfigError("terrain dimensions must be positive")
        if not (0 <= self.traffic_start_s <= self.traffic_end_s <= self.sim_end_s):
            raise ConfigError("need 0 <= traffic_start_s <= traffic_end_s <= sim_end_s")
        if self.sdp_count < 0:
            raise ConfigError("sdp_count must be non-negative")
        if self.disjoint_sdps and 2 * self.sdp_count > self.node_count:
            raise ConfigError(
                f"{self.sdp_count} disjoint source-destination pairs need "
                f"{2 * self.sdp_count} distinct nodes but only {self.node_count} exist")
        if self.packet_bytes <= 0 or self.cbr_interval_us <= 0:
            raise ConfigError("packet_bytes and cbr_interval_us must be positive")
        if self.fixed_positions is None and self.avg_speed < 1.0:
            raise ConfigError("avg_speed must be at least 1 m/s")
        if self.tx_range <= 0:
            raise ConfigError("tx_range must be positive")
        if self.carrier_sense_factor < 1.0:
            raise ConfigError("carrier_sense_factor must be at least 1")
        if self.algorithm not in POLICY_KEYS:
            raise ConfigError(f"algorithm must be one of {POLICY_KEYS}, got {self.algorithm!r}")
        if not (1 <= self.cw_min <= self.cw_max):
            raise ConfigError(f"need 1 <= cw_min <= cw_max, got {self.cw_min}..{self.cw_max}")
        if self.eied_increase <= 1 or self.eied_decrease <= 1:
            raise ConfigError("eied_increase and eied_decrease must exceed 1")
        if not (1 < self.mbeb_base < 2):
            raise ConfigError(f"mbeb_base must lie in (1, 2), got {self.mbeb_base}")
        if min(self.slot_us, self.sifs_us, self.difs_us) <= 0:
            raise ConfigError("slot_us, sifs_us and difs_us must be positive")
        if self.difs_us != self.sifs_us + 2 * self.slot_us:
            raise ConfigError("difs_us must equal sifs_us + 2 * slot_us")
        if self.retry_limit < 0 or self.queue_capacity < 1:
            raise ConfigError("retry_limit must be >= 0 and queue_capacity >= 1")
        if self.discovery_buffer < 1 or self.rreq_retries < 0:
            raise ConfigError("discovery_buffer must be >= 1 and rreq_retries >= 0")
        if self.rreq_jitter_us < 0:
            raise ConfigError("rreq_jitter_us must be non-negative")
        if not self.seeds:
            raise ConfigError("at least one seed is required")

    # timeline accessors in integer microseconds
    @property
    def sim_end_us(self) -> int:
        return round(self.sim_end_s * 1_000_000)

    @property
    def traffic_start_us(self) -> int:
        return round(self.traffic_start_s * 1_000_000)

    @property
    def traffic_end_us(self) -> int:
        return round(self.traffic_end_s * 1_000_000)


@dataclass
class SweepSpec:
    """One experiment grid: an axis, its values, and the algorithms to compare."""

    axis: str  # "speed" or "range"
    values: list[float]
    algorithms: list[str]

    def validate(self) -> None:
        if self.axis not in ("speed", "range"):
            raise ConfigError(f"axis must be 'speed' or 'range', got {self.axis!r}")
        if not self.values:
            raise ConfigError("sweep needs at least one axis value")
        if not self.algorithms:
            raise ConfigError("sweep needs at least one algorithm")
        for a in self.algorithms:
            if a not in POLICY_KEYS:
                raise ConfigError(f"unknown algorithm {a!r}; expected one of {POLICY_KEYS}")

    def point(self, base: Scenario, algorithm: str, value: float) -> Scenario:
        """Scenario for one grid point of this sweep."""
        if self.axis == "speed":
            return replace(base, algorithm=algorithm, avg_speed=value)
        return replace(base, algorithm=algorithm, tx_range=value)


_SKIP_FIELDS = {"fixed_positions"}


def _parse_value(name: str, text: str, type_name: str) -> object:
    text = text.strip()
    try:
        if name == "seeds":
            return [int(part) for part in text.replace(",", " ").split()]
        if type_name == "bool":
            low = text.lower()
            if low in ("true", "1", "yes", "on"):
                return True
            if low in ("false", "0", "no", "off"):
                return False
            raise ValueError(text)
        if type_name == "int":
            return int(text)
        if type_name == "float":
            return float(text)
        if type_name == "str":
            return text
    except ValueError:
        raise ConfigError(f"bad value for {name!r}: {text!r}")
    raise ConfigError(f"option {name!r} cannot be set from configuration")


def apply_overrides(scenario: Scenario, overrides: dict[str, str]) -> Scenario:
    """Set fields from raw string values, rejecting unknown keys."""
    by_name = {f.name: f for f in fields(Scenario) if f.name not in _SKIP_FIELDS}
    updates: dict[str, object] = {}
    for key, text in overrides.items():
        f = by_name.get(key)
        if f is None:
            raise ConfigError(f"unknown configuration key {key!r}")
        type_name = f.type if isinstance(f.type, str) else getattr(f.type, "__name__", "")
        updates[key] = _parse_value(key, text, type_name)
    return replace(scenario, **updates)


def load_scenario(path: str | None = None, overrides: dict[str, str] | None = None) -> Scenario:
    """Defaults, overlaid by a config file, overlaid by explicit overrides."""
    scenario = Scenario()
    if path is not None:
        file_values: dict[str, str] = {}
        try:
            with open(path, encoding="utf-8") as fh:
                for lineno, raw in enumerate(fh, 1):
                    line = raw.split("#", 1)[0].strip()
                    if not line:
                        continue
                    if "=" not in line:
                        raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw.rstrip()!r}")
                    key, _, value = line.partition("=")
                    file_values[key.strip()] = value.strip()
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}")
        scenario = apply_overrides(scenario, file_values)
    if overrides:
        scenario = apply_overrides(scenario, overrides)
    scenario.validate()
    return scenario
