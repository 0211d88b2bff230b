"""Experiment sweeps: per-seed runs, aggregation, CSV emission, B/W summary.

Grid order is algorithm-major, then axis value, then seed, and CSV rows are
written in that order regardless of how the runs are executed, so the same
invocation always produces byte-identical files.

CSV schema (both files, LF line endings, reals with six decimals)::

    algorithm,axis,axis_value,sdps,seed,pdr,avg_delay_us,generated,delivered,
    dropped_queue,dropped_mac,dropped_no_route

The aggregate file carries one ``seed=avg`` row per (algorithm, axis value):
its pdr is the ratio of summed delivered to summed generated over the seeds,
its delay the mean over seed runs of each run's destination-averaged delay
(runs that delivered nothing are left out), and its counters are sums.  A
delay with no surviving data is printed as an empty field, not zero.
"""

from __future__ import annotations

from dataclasses import dataclass

from .metrics import RunMetrics, avg_end_to_end_delay, pdr
from .scenario import Scenario, SweepSpec
from .simulation import Simulation

CSV_HEADER = ("algorithm,axis,axis_value,sdps,seed,pdr,avg_delay_us,"
              "generated,delivered,dropped_queue,dropped_mac,dropped_no_route")


@dataclass
class ReportRow:
    algorithm: str
    axis: str
    axis_value: float
    sdps: int
    seed: int | str          # seed number, or "avg" for aggregates
    pdr: float
    avg_delay_us: float | None
    generated: int
    delivered: int
    dropped_queue: int
    dropped_mac: int
    dropped_no_route: int

    def to_csv(self) -> str:
        delay = "" if self.avg_delay_us is None else f"{self.avg_delay_us:.6f}"
        return (f"{self.algorithm},{self.axis},{self.axis_value:.6f},{self.sdps},"
                f"{self.seed},{self.pdr:.6f},{delay},{self.generated},{self.delivered},"
                f"{self.dropped_queue},{self.dropped_mac},{self.dropped_no_route}")


def run_one(scenario: Scenario, seed: int) -> RunMetrics:
    return Simulation(scenario, seed).run()


def _row(algorithm: str, axis: str, value: float, sdps: int, seed: int | str,
         runs: list[RunMetrics]) -> ReportRow:
    return ReportRow(
        algorithm=algorithm, axis=axis, axis_value=value, sdps=sdps, seed=seed,
        pdr=pdr(runs), avg_delay_us=avg_end_to_end_delay(runs),
        generated=sum(r.total_generated for r in runs),
        delivered=sum(r.total_delivered for r in runs),
        dropped_queue=sum(r.dropped_queue for r in runs),
        dropped_mac=sum(r.dropped_mac for r in runs),
        dropped_no_route=sum(r.dropped_no_route for r in runs))


def run_sweep(spec: SweepSpec, base: Scenario, progress=None,
              keep_metrics: bool = False):
    """Run the whole grid.  Returns (raw_rows, aggregate_rows[, metrics]).

    ``progress`` is called with each finished raw row.  With
    ``keep_metrics`` the per-run RunMetrics objects are returned as a third
    element keyed by (algorithm, axis_value, seed).
    """
    spec.validate()
    base.validate()
    raw_rows: list[ReportRow] = []
    agg_rows: list[ReportRow] = []
    all_metrics: dict[tuple[str, float, int], RunMetrics] = {}
    for algorithm in spec.algorithms:
        for value in spec.values:
            scenario = spec.point(base, algorithm, value)
            runs = []
            for seed in base.seeds:
                metrics = run_one(scenario, seed)
                runs.append(metrics)
                if keep_metrics:
                    all_metrics[(algorithm, value, seed)] = metrics
                row = _row(algorithm, spec.axis, value, scenario.sdp_count, seed, [metrics])
                raw_rows.append(row)
                if progress is not None:
                    progress(row)
            agg_rows.append(_row(algorithm, spec.axis, value, scenario.sdp_count, "avg", runs))
    if keep_metrics:
        return raw_rows, agg_rows, all_metrics
    return raw_rows, agg_rows


def rows_to_csv(rows: list[ReportRow]) -> str:
    return "\n".join([CSV_HEADER] + [r.to_csv() for r in rows]) + "\n"


def write_csv(rows: list[ReportRow], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(rows_to_csv(rows))


@dataclass
class SummaryEntry:
    axis: str
    axis_value: float
    metric: str               # "pdr" or "avg_delay_us"
    best: list[str]
    worst: list[str]


def summarize_best_worst(rows: list[ReportRow], tie_tolerance: float = 0.01) -> list[SummaryEntry]:
    """Mark best/worst algorithm per grid point and metric.

    Values within ``tie_tolerance`` relative of the best (or worst) value are
    co-marked, so near-identical results share the B (or W) label.
    """
    points: dict[tuple[str, float], list[ReportRow]] = {}
    for row in rows:
        points.setdefault((row.axis, row.axis_value), []).append(row)

    def close(a: float, b: float) -> bool:
        return abs(a - b) <= tie_tolerance * abs(b)

    entries: list[SummaryEntry] = []
    for (axis, value), group in sorted(points.items()):
        pdr_vals = [(r.algorithm, r.pdr) for r in group]
        best_pdr = max(v for _, v in pdr_vals)
        worst_pdr = min(v for _, v in pdr_vals)
        entries.append(SummaryEntry(
            axis, value, "pdr",
            best=[a for a, v in pdr_vals if close(v, best_pdr)],
            worst=[a for a, v in pdr_vals if close(v, worst_pdr)]))
        delay_vals = [(r.algorithm, r.avg_delay_us) for r in group
                      if r.avg_delay_us is not None]
        if delay_vals:
            best_delay = min(v for _, v in delay_vals)
            worst_delay = max(v for _, v in delay_vals)
            entries.append(SummaryEntry(
                axis, value, "avg_delay_us",
                best=[a for a, v in delay_vals if close(v, best_delay)],
                worst=[a for a, v in delay_vals if close(v, worst_delay)]))
    return entries


def render_summary(entries: list[SummaryEntry]) -> str:
    lines = ["metric          axis   value      best            worst"]
    for e in entries:
        lines.append(f"{e.metric:<15} {e.axis:<6} {e.axis_value:<10.6g} "
                     f"{'+'.join(e.best):<15} {'+'.join(e.worst)}")
    return "\n".join(lines) + "\n"
