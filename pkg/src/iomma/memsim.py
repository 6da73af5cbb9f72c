"""Two-level memory simulator.

Fast memory holds at most S scalars and starts empty; slow memory holds the
three matrices. The simulator executes a schedule one event at a time,
enforces residency and capacity rules, counts every transfer, and checks
that all accumulated C values reach slow memory before the schedule ends.

A scalar slot is the unit of accounting: no cache lines, no replacement
policy. Eviction of clean data is explicit and free; writing back a dirty
C element costs one write.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import (
    Evict,
    Fma,
    IOStats,
    Load,
    Matrix,
    OperandRef,
    OutOfBoundsError,
    ProblemDims,
    Schedule,
    Store,
    validate_event,
)


class SimulationError(Exception):
    """Base class for schedule-execution failures."""


class NonResidentOperandError(SimulationError):
    """An Fma input or an evicted element is not in fast memory."""


class CapacityExceededError(SimulationError):
    """A load would push occupancy past the S-scalar capacity."""


class DoubleLoadError(SimulationError):
    """A load names an element that is already resident."""


class DirtyEvictionError(SimulationError):
    """An evict names a C element with unwritten updates."""


class StoreNonCError(SimulationError):
    """Only C elements may be stored; A and B are read-only."""


class StoreNonResidentError(SimulationError):
    """A store names a C element that is not in fast memory."""


class IncompleteWritebackError(SimulationError):
    """The schedule ended while a dirty C element was still resident."""


class ShapeMismatchError(ValueError):
    """A matrix argument does not match the problem dimensions."""


@dataclass(frozen=True)
class MemoryConfig:
    """Fast-memory capacity in scalars. Any schedule with an Fma needs S >= 3."""

    S: int

    def __post_init__(self):
        if not isinstance(self.S, int) or isinstance(self.S, bool) or self.S < 1:
            raise ValueError(f"S must be a positive integer, got {self.S!r}")


@dataclass(frozen=True)
class ExecutionResult:
    stats: IOStats
    trace: Schedule
    output_c: np.ndarray


class FastMemoryState:
    """Structural residency tracker: which elements are resident, which are dirty.

    Enforces the same legality rules as execute() without touching values,
    so a trace can be replayed for analysis when the numeric inputs are not
    around. capacity=None disables the occupancy bound (used when the trace's
    fast-memory size is unknown).
    """

    def __init__(self, capacity: int | None = None):
        if capacity is not None and capacity < 1:
            raise ValueError("capacity must be positive or None")
        self.capacity = capacity
        self._slots: dict[OperandRef, bool] = {}

    @property
    def occupancy(self) -> int:
        return len(self._slots)

    def is_resident(self, ref: OperandRef) -> bool:
        return ref in self._slots

    def apply(self, event, dims: ProblemDims) -> None:
        validate_event(event, dims)
        slots = self._slots
        if isinstance(event, Fma):
            needed = (
                OperandRef(Matrix.A, event.i, event.p),
                OperandRef(Matrix.B, event.p, event.j),
                OperandRef(Matrix.C, event.i, event.j),
            )
            for ref in needed:
                if ref not in slots:
                    raise NonResidentOperandError(
                        f"fma({event.i},{event.j},{event.p}) needs "
                        f"{ref.matrix.value}({ref.row},{ref.col}) resident"
                    )
            slots[needed[2]] = True
        elif isinstance(event, Load):
            ref = event.ref
            if ref in slots:
                raise DoubleLoadError(
                    f"{ref.matrix.value}({ref.row},{ref.col}) is already resident"
                )
            if self.capacity is not None and len(slots) >= self.capacity:
                raise CapacityExceededError(
                    f"load of {ref.matrix.value}({ref.row},{ref.col}) exceeds "
                    f"capacity {self.capacity}"
                )
            slots[ref] = False
        elif isinstance(event, Store):
            ref = event.ref
            if ref.matrix is not Matrix.C:
                raise StoreNonCError(f"cannot store read-only {ref.matrix.value}")
            if ref not in slots:
                raise StoreNonResidentError(
                    f"store of non-resident C({ref.row},{ref.col})"
                )
            del slots[ref]
        elif isinstance(event, Evict):
            ref = event.ref
            if ref not in slots:
                raise NonResidentOperandError(
                    f"evict of non-resident {ref.matrix.value}({ref.row},{ref.col})"
                )
            if slots[ref]:
                raise DirtyEvictionError(
                    f"evict of dirty C({ref.row},{ref.col}); store it first"
                )
            del slots[ref]
        else:
            raise TypeError(f"unknown event type {type(event).__name__}")

    def finish(self) -> None:
        dirty = [ref for ref, d in self._slots.items() if d]
        if dirty:
            ref = dirty[0]
            raise IncompleteWritebackError(
                f"{len(dirty)} dirty C element(s) still resident at end of "
                f"schedule, e.g. C({ref.row},{ref.col})"
            )


def _as_rows(mat, rows: int, cols: int, name: str) -> list[list[float]]:
    arr = np.asarray(mat, dtype=float)
    if arr.ndim != 2 or arr.shape != (rows, cols):
        raise ShapeMismatchError(
            f"{name} must have shape ({rows}, {cols}), got {arr.shape}"
        )
    return arr.tolist()


def execute(
    schedule: Schedule, config: MemoryConfig, a, b, c_in
) -> ExecutionResult:
    """Run a schedule and count every transfer exactly.

    Loads of C bring the current slow-memory value in clean; the first Fma on
    a C slot marks it dirty; a store writes the slot back and frees it. The
    schedule must leave no dirty slot behind. Returns the counters, the
    as-executed trace, and the final C as a fresh array.
    """
    dims = schedule.dims
    m, n, k = dims.m, dims.n, dims.k
    cap = config.S
    a_rows = _as_rows(a, m, k, "a")
    b_rows = _as_rows(b, k, n, "b")
    c_rows = _as_rows(c_in, m, n, "c_in")

    res_a: dict[tuple[int, int], float] = {}
    res_b: dict[tuple[int, int], float] = {}
    res_c: dict[tuple[int, int], list] = {}  # (i, j) -> [value, dirty]

    reads = writes = fmas = 0
    occupancy = peak = 0

    for event in schedule.events:
        cls = event.__class__
        if cls is Fma:
            i = event.i
            j = event.j
            p = event.p
            if not 0 <= i < m:
                raise OutOfBoundsError("i", f"fma i={i} outside [0, {m})")
            if not 0 <= j < n:
                raise OutOfBoundsError("j", f"fma j={j} outside [0, {n})")
            if not 0 <= p < k:
                raise OutOfBoundsError("p", f"fma p={p} outside [0, {k})")
            try:
                av = res_a[(i, p)]
            except KeyError:
                raise NonResidentOperandError(
                    f"fma({i},{j},{p}) needs A({i},{p}) resident"
                ) from None
            try:
                bv = res_b[(p, j)]
            except KeyError:
                raise NonResidentOperandError(
                    f"fma({i},{j},{p}) needs B({p},{j}) resident"
                ) from None
            try:
                slot = res_c[(i, j)]
            except KeyError:
                raise NonResidentOperandError(
                    f"fma({i},{j},{p}) needs C({i},{j}) resident"
                ) from None
            slot[0] += av * bv
            slot[1] = True
            fmas += 1
        elif cls is Load:
            ref = event.ref
            row = ref.row
            col = ref.col
            mat = ref.matrix
            if mat is Matrix.A:
                if not 0 <= row < m:
                    raise OutOfBoundsError("row", f"A row {row} outside [0, {m})")
                if not 0 <= col < k:
                    raise OutOfBoundsError("col", f"A col {col} outside [0, {k})")
                pool = res_a
                key = (row, col)
                if key in pool:
                    raise DoubleLoadError(f"A({row},{col}) is already resident")
                if occupancy >= cap:
                    raise CapacityExceededError(
                        f"load of A({row},{col}) exceeds capacity {cap}"
                    )
                pool[key] = a_rows[row][col]
            elif mat is Matrix.B:
                if not 0 <= row < k:
                    raise OutOfBoundsError("row", f"B row {row} outside [0, {k})")
                if not 0 <= col < n:
                    raise OutOfBoundsError("col", f"B col {col} outside [0, {n})")
                pool = res_b
                key = (row, col)
                if key in pool:
                    raise DoubleLoadError(f"B({row},{col}) is already resident")
                if occupancy >= cap:
                    raise CapacityExceededError(
                        f"load of B({row},{col}) exceeds capacity {cap}"
                    )
                pool[key] = b_rows[row][col]
            else:
                if not 0 <= row < m:
                    raise OutOfBoundsError("row", f"C row {row} outside [0, {m})")
                if not 0 <= col < n:
                    raise OutOfBoundsError("col", f"C col {col} outside [0, {n})")
                key = (row, col)
                if key in res_c:
                    raise DoubleLoadError(f"C({row},{col}) is already resident")
                if occupancy >= cap:
                    raise CapacityExceededError(
                        f"load of C({row},{col}) exceeds capacity {cap}"
                    )
                res_c[key] = [c_rows[row][col], False]
            reads += 1
            occupancy += 1
            if occupancy > peak:
                peak = occupancy
        elif cls is Store:
            ref = event.ref
            if ref.matrix is not Matrix.C:
                raise StoreNonCError(f"cannot store read-only {ref.matrix.value}")
            row = ref.row
            col = ref.col
            if not 0 <= row < m:
                raise OutOfBoundsError("row", f"C row {row} outside [0, {m})")
            if not 0 <= col < n:
                raise OutOfBoundsError("col", f"C col {col} outside [0, {n})")
            try:
                slot = res_c.pop((row, col))
            except KeyError:
                raise StoreNonResidentError(
                    f"store of non-resident C({row},{col})"
                ) from None
            c_rows[row][col] = slot[0]
            writes += 1
            occupancy -= 1
        elif cls is Evict:
            ref = event.ref
            row = ref.row
            col = ref.col
            mat = ref.matrix
            if mat is Matrix.A:
                if not 0 <= row < m:
                    raise OutOfBoundsError("row", f"A row {row} outside [0, {m})")
                if not 0 <= col < k:
                    raise OutOfBoundsError("col", f"A col {col} outside [0, {k})")
                if (row, col) not in res_a:
                    raise NonResidentOperandError(
                        f"evict of non-resident A({row},{col})"
                    )
                del res_a[(row, col)]
            elif mat is Matrix.B:
                if not 0 <= row < k:
                    raise OutOfBoundsError("row", f"B row {row} outside [0, {k})")
                if not 0 <= col < n:
                    raise OutOfBoundsError("col", f"B col {col} outside [0, {n})")
                if (row, col) not in res_b:
                    raise NonResidentOperandError(
                        f"evict of non-resident B({row},{col})"
                    )
                del res_b[(row, col)]
            else:
                if not 0 <= row < m:
                    raise OutOfBoundsError("row", f"C row {row} outside [0, {m})")
                if not 0 <= col < n:
                    raise OutOfBoundsError("col", f"C col {col} outside [0, {n})")
                slot = res_c.get((row, col))
                if slot is None:
                    raise NonResidentOperandError(
                        f"evict of non-resident C({row},{col})"
                    )
                if slot[1]:
                    raise DirtyEvictionError(
                        f"evict of dirty C({row},{col}); store it first"
                    )
                del res_c[(row, col)]
            occupancy -= 1
        else:
            raise TypeError(f"unknown event type {cls.__name__}")

    for (i, j), slot in res_c.items():
        if slot[1]:
            raise IncompleteWritebackError(
                f"dirty C({i},{j}) still resident at end of schedule"
            )

    stats = IOStats(reads=reads, writes=writes, fmas=fmas, peak_residency=peak)
    return ExecutionResult(stats=stats, trace=schedule, output_c=np.array(c_rows, dtype=float))


def reference_gemm(a, b, c_in) -> np.ndarray:
    """C := A*B + C by the canonical triple loop with p innermost, ascending.

    Every shipped schedule generator accumulates each c(i,j) over p in the
    same order, so simulator output agrees with this loop bit for bit.
    """
    a_arr = np.asarray(a, dtype=float)
    b_arr = np.asarray(b, dtype=float)
    c_arr = np.asarray(c_in, dtype=float)
    if a_arr.ndim != 2 or b_arr.ndim != 2 or c_arr.ndim != 2:
        raise ShapeMismatchError("a, b and c_in must be two-dimensional")
    m, k = a_arr.shape
    kb, n = b_arr.shape
    if kb != k:
        raise ShapeMismatchError(f"a is {a_arr.shape} but b is {b_arr.shape}")
    if c_arr.shape != (m, n):
        raise ShapeMismatchError(f"c_in must have shape ({m}, {n}), got {c_arr.shape}")
    a_rows = a_arr.tolist()
    b_rows = b_arr.tolist()
    out = c_arr.tolist()
    for i in range(m):
        a_row = a_rows[i]
        out_row = out[i]
        for j in range(n):
            acc = out_row[j]
            for p in range(k):
                acc += a_row[p] * b_rows[p][j]
            out_row[j] = acc
    return np.array(out, dtype=float)


_EVENT_LETTER = {Load: "L", Store: "S", Evict: "E"}


def dump_trace(schedule: Schedule) -> str:
    """Render a schedule in the line-per-event wire format.

    Lines are ``L A i j`` / ``S C i j`` / ``E X i j`` / ``F i j p`` with a
    trailing newline; all-ASCII, LF line endings.
    """
    lines = []
    for event in schedule.events:
        if isinstance(event, Fma):
            lines.append(f"F {event.i} {event.j} {event.p}")
        else:
            letter = _EVENT_LETTER[type(event)]
            ref = event.ref
            lines.append(f"{letter} {ref.matrix.value} {ref.row} {ref.col}")
    return "\n".join(lines) + ("\n" if lines else "")


def parse_trace(text: str, dims: ProblemDims) -> Schedule:
    """Inverse of dump_trace. Raises ValueError on malformed lines."""
    events: list = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        kind = parts[0]
        try:
            if kind == "F":
                if len(parts) != 4:
                    raise ValueError("expected 'F i j p'")
                events.append(Fma(int(parts[1]), int(parts[2]), int(parts[3])))
            elif kind in ("L", "S", "E"):
                if len(parts) != 4:
                    raise ValueError(f"expected '{kind} X row col'")
                ref = OperandRef(Matrix(parts[1]), int(parts[2]), int(parts[3]))
                events.append({"L": Load, "S": Store, "E": Evict}[kind](ref))
            else:
                raise ValueError(f"unknown event letter {kind!r}")
        except ValueError as exc:
            raise ValueError(f"trace line {lineno}: {exc}") from None
    return Schedule(tuple(events), dims)
