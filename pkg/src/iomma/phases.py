"""Phase decomposition of execution traces and the per-phase inequalities.

A phase is a maximal run of events containing exactly M loads plus stores
(the last phase may fall short). Fma and evict events ride along for free
and belong to the phase whose I/O budget was open when they happened; the
boundary falls immediately before the load or store that would be transfer
M + 1. Per phase we record the distinct A, B and C elements the fmas
actually touched, which is what the sqrt(x*y*z) fma cap and the S + M
capacity argument constrain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .memsim import FastMemoryState, SimulationError
from .model import Fma, Load, OutOfBoundsError, Schedule, Store


class UnvalidatedTraceError(Exception):
    """The trace breaks a residency or bounds rule and cannot be analyzed."""


class EmptyInputError(ValueError):
    """No phase reports to aggregate."""


@dataclass(frozen=True)
class PhaseConfig:
    """Phase size M: loads plus stores per phase."""

    M: int

    def __post_init__(self):
        if not isinstance(self.M, int) or isinstance(self.M, bool) or self.M < 1:
            raise ValueError(f"M must be a positive integer, got {self.M!r}")


@dataclass(frozen=True)
class PhaseReport:
    """Counters and fma-input footprints for one phase.

    x, y, z count distinct A elements, B elements and C positions used as
    fma inputs during the phase; resident_at_start is fast-memory occupancy
    when the phase opened.
    """

    index: int
    loads: int
    stores: int
    fmas: int
    x: int
    y: int
    z: int
    resident_at_start: int

    @property
    def lw_bound(self) -> float:
        """Loomis-Whitney fma cap for this footprint: sqrt(x*y*z)."""
        return math.sqrt(self.x * self.y * self.z)


class _PhaseAccumulator:
    __slots__ = ("loads", "stores", "fmas", "xs", "ys", "zs", "resident_at_start")

    def __init__(self, resident_at_start: int):
        self.loads = 0
        self.stores = 0
        self.fmas = 0
        self.xs: set = set()
        self.ys: set = set()
        self.zs: set = set()
        self.resident_at_start = resident_at_start

    def to_report(self, index: int) -> PhaseReport:
        return PhaseReport(
            index=index,
            loads=self.loads,
            stores=self.stores,
            fmas=self.fmas,
            x=len(self.xs),
            y=len(self.ys),
            z=len(self.zs),
            resident_at_start=self.resident_at_start,
        )


def partition_phases(trace: Schedule, config: PhaseConfig) -> list[PhaseReport]:
    """Split a valid trace at every M-th transfer and report each phase.

    Replays residency as it goes; any rule violation (non-resident fma input,
    double load, dirty eviction, missing writeback, bad coordinates) raises
    UnvalidatedTraceError. An empty trace yields no phases.
    """
    M = config.M
    state = FastMemoryState(capacity=None)
    dims = trace.dims
    reports: list[PhaseReport] = []
    current: _PhaseAccumulator | None = None
    io_in_phase = 0

    for event in trace.events:
        cls = event.__class__
        is_io = cls is Load or cls is Store
        if current is None:
            current = _PhaseAccumulator(resident_at_start=state.occupancy)
        elif is_io and io_in_phase == M:
            reports.append(current.to_report(len(reports)))
            current = _PhaseAccumulator(resident_at_start=state.occupancy)
            io_in_phase = 0
        try:
            state.apply(event, dims)
        except (SimulationError, OutOfBoundsError) as exc:
            raise UnvalidatedTraceError(f"invalid trace: {exc}") from exc
        if cls is Load:
            current.loads += 1
            io_in_phase += 1
        elif cls is Store:
            current.stores += 1
            io_in_phase += 1
        elif cls is Fma:
            current.fmas += 1
            current.xs.add((event.i, event.p))
            current.ys.add((event.p, event.j))
            current.zs.add((event.i, event.j))

    try:
        state.finish()
    except SimulationError as exc:
        raise UnvalidatedTraceError(f"invalid trace: {exc}") from exc
    if current is not None:
        reports.append(current.to_report(len(reports)))
    return reports


def check_loomis_whitney(report: PhaseReport) -> bool:
    """fmas^2 <= x*y*z, compared in exact integers."""
    return report.fmas * report.fmas <= report.x * report.y * report.z


def check_capacity(report: PhaseReport, S: int, M: int) -> bool:
    """Footprint fits in resident-plus-transferred data.

    Two exact inequalities: x + y + z <= S + M, and distinct operands used
    <= resident_at_start + loads (every fma input was either already in fast
    memory or brought in during the phase).
    """
    footprint = report.x + report.y + report.z
    return footprint <= S + M and footprint <= report.resident_at_start + report.loads


def phase_efficiency(reports: list[PhaseReport], S: int, M: int) -> float:
    """Total fmas per transfer across all phases.

    At full phases of M = 2S a schedule can reach at most sqrt(S)/2; the
    blocked algorithms approach b/2 at scale. S and M identify the regime
    the reports came from; the ratio itself is pure arithmetic on them.
    """
    if not reports:
        raise EmptyInputError("no phases to aggregate")
    total_fmas = sum(r.fmas for r in reports)
    total_io = sum(r.loads + r.stores for r in reports)
    if total_io == 0:
        raise EmptyInputError("phases contain no transfers")
    return total_fmas / total_io


PHASE_CSV_HEADER = "phase,loads,stores,fmas,x,y,z,lw_bound,resident_at_start"


def phases_to_csv(reports: list[PhaseReport]) -> str:
    """Render reports as the one-row-per-phase CSV wire format."""
    lines = [PHASE_CSV_HEADER]
    for r in reports:
        lines.append(
            f"{r.index},{r.loads},{r.stores},{r.fmas},{r.x},{r.y},{r.z},"
            f"{r.lw_bound!r},{r.resident_at_start}"
        )
    return "\n".join(lines) + "\n"
