"""Lower bounds on slow-fast transfers for multiply-accumulate schedules.

The bound machinery has two independent routes on purpose: closed-form
expressions derived from the Loomis-Whitney inequality, and a brute-force
grid oracle over the per-phase footprint maximization. Their agreement is
part of the test surface, so neither should be rewritten in terms of the
other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .algorithms import naive_schedule
from .model import (
    Evict,
    Fma,
    Load,
    Matrix,
    OperandRef,
    ProblemDims,
    Schedule,
    Store,
    fma_count,
)

_THREE_ROOT_THREE = 3.0 * math.sqrt(3.0)

# grid_search_xyz refuses grids above this many points
_MAX_GRID_POINTS = 10_000_000


class GridTooFineError(ValueError):
    """The requested step would enumerate more than the allowed grid points."""


class CapsExceededError(ValueError):
    """The exact search only handles instances with mnk <= 8 and S <= 6."""


@dataclass(frozen=True)
class XYZOptimum:
    """A footprint split (x, y, z) with x + y + z = S + M and its fma cap f."""

    x: float
    y: float
    z: float
    f: float


@dataclass(frozen=True)
class BoundReport:
    """All bound quantities for one problem, ready for serialization."""

    dims: ProblemDims
    S: int
    M: int
    f_max: float
    general_bound: float
    bound_M_eq_S: float
    bound_M_eq_2S: float
    hong_kung_reference: float

    @classmethod
    def compute(cls, dims: ProblemDims, S: int, M: int) -> "BoundReport":
        return cls(
            dims=dims,
            S=S,
            M=M,
            f_max=fmax(S, M),
            general_bound=lower_bound_general(dims, S, M),
            bound_M_eq_S=lower_bound_MS(dims, S),
            bound_M_eq_2S=lower_bound_final(dims, S),
            hong_kung_reference=2.0 * fma_count(dims) / math.sqrt(S),
        )


def fmax(S: int, M: int) -> float:
    """Most fmas any phase of M transfers can perform: (S+M)^{3/2} / (3*sqrt(3)).

    Follows from maximizing sqrt(x*y*z) subject to x + y + z <= S + M; the
    maximum sits at x = y = z = (S+M)/3.
    """
    _check_positive(S=S, M=M)
    total = S + M
    return total * math.sqrt(total) / _THREE_ROOT_THREE


def optimal_xyz(S: int, M: int) -> XYZOptimum:
    """The balanced footprint split that attains fmax."""
    _check_positive(S=S, M=M)
    side = (S + M) / 3.0
    return XYZOptimum(x=side, y=side, z=side, f=math.sqrt(side * side * side))


def grid_search_xyz(S: int, M: int, step: float) -> XYZOptimum:
    """Brute-force oracle for the footprint maximization.

    Scans x and y over multiples of step with x + y <= S + M and puts all
    remaining budget into z, maximizing f = sqrt(x*y*z). Deliberately
    independent of the calculus behind optimal_xyz. First maximizer in scan
    order wins ties.
    """
    _check_positive(S=S, M=M)
    if step <= 0:
        raise ValueError("step must be positive")
    total = S + M
    points_per_axis = int(total / step) + 1
    if points_per_axis * points_per_axis > _MAX_GRID_POINTS:
        raise GridTooFineError(
            f"step {step} needs {points_per_axis}^2 grid points "
            f"(limit {_MAX_GRID_POINTS})"
        )
    best_x = best_y = best_z = 0.0
    best_f = -1.0
    for ix in range(points_per_axis):
        x = ix * step
        rest = total - x
        if rest < 0:
            break
        for iy in range(int(rest / step) + 1):
            y = iy * step
            z = rest - y
            if z < 0:
                break
            f = math.sqrt(x * y * z)
            if f > best_f:
                best_x, best_y, best_z, best_f = x, y, z, f
    return XYZOptimum(x=best_x, y=best_y, z=best_z, f=best_f)


def lower_bound_general(dims: ProblemDims, S: int, M: int) -> float:
    """Transfers any complete schedule needs, as a function of the phase size M.

    (3*sqrt(3) * mnk / (S+M)^{3/2} - 1) * M. May be negative or vacuous for
    tiny problems; callers decide what to do with that, the value is never
    clamped.
    """
    _check_positive(S=S, M=M)
    total = S + M
    mnk = fma_count(dims)
    return (_THREE_ROOT_THREE * mnk / (total * math.sqrt(total)) - 1.0) * M


def lower_bound_MS(dims: ProblemDims, S: int) -> float:
    """The general bound specialized to phases of M = S transfers."""
    _check_positive(S=S)
    return (
        _THREE_ROOT_THREE / (2.0 * math.sqrt(2.0)) * fma_count(dims) / math.sqrt(S)
        - S
    )


def lower_bound_final(dims: ProblemDims, S: int) -> float:
    """The strongest specialization, at M = 2S: 2*mnk/sqrt(S) - 2S."""
    _check_positive(S=S)
    return 2.0 * fma_count(dims) / math.sqrt(S) - 2.0 * S


def lower_bound_AB(dims: ProblemDims, S: int, c_mn: float = 3.0) -> float:
    """Bound for plain C := A*B, where C need not be read before first use.

    Dropping the initial-C reads can save at most a constant multiple of mn
    transfers; c_mn sets that constant.
    """
    return lower_bound_final(dims, S) - c_mn * dims.m * dims.n


def phase_size_payoff(S: int, M: float) -> float:
    """fmas-per-transfer factor g(M) = 3*sqrt(3) * M / (S+M)^{3/2}.

    The general bound is (mnk / fmax(S, M) - 1) * M; maximizing it over M is
    equivalent to maximizing g. g peaks at M = 2S with g(2S) = 2/sqrt(S).
    """
    _check_positive(S=S)
    if M <= 0:
        raise ValueError("M must be positive")
    total = S + M
    return _THREE_ROOT_THREE * M / (total * math.sqrt(total))


def optimal_M(S: int, grid: list[float]) -> float:
    """The grid point maximizing the phase-size payoff g; first wins ties."""
    _check_positive(S=S)
    if not grid:
        raise ValueError("grid must not be empty")
    best = grid[0]
    best_g = phase_size_payoff(S, grid[0])
    for candidate in grid[1:]:
        g = phase_size_payoff(S, candidate)
        if g > best_g:
            best, best_g = candidate, g
    return best


def _check_positive(**named: int) -> None:
    for name, value in named.items():
        if not isinstance(value, int) or isinstance(value, bool) or value < 1:
            raise ValueError(f"{name} must be a positive integer, got {value!r}")


# ---------------------------------------------------------------------------
# Exact minimal I/O for tiny instances, by branch and bound.
# ---------------------------------------------------------------------------

_DEFAULT_NODE_BUDGET = 3_000_000


@dataclass(frozen=True)
class TinyOptimum:
    """Result of the exact search: cost, witness schedule, and completeness."""

    min_io: int
    schedule: Schedule
    optimal: bool
    nodes: int


def tiny_optimal_schedule(
    dims: ProblemDims, S: int, budget: int = _DEFAULT_NODE_BUDGET
) -> TinyOptimum:
    """Provably minimal loads + stores for a tiny instance.

    Depth-first branch and bound over legal event sequences. The admissible
    pruning bound counts loads of needed-but-absent operands plus one store
    per unfinished C element plus stores of finished-but-dirty slots, all of
    which any completion must still pay. Ties expand loads before fmas before
    stores before evicts. If the node budget runs out the best schedule found
    so far is returned with optimal=False.
    """
    m, n, k = dims.m, dims.n, dims.k
    if m * n * k > 8 or S > 6:
        raise CapsExceededError(
            f"instance ({m},{n},{k}) with S={S} exceeds the exact-search caps "
            "(mnk <= 8, S <= 6)"
        )
    if S < 3:
        raise ValueError("S must be at least 3: an fma needs three resident scalars")

    triples = [(i, j, p) for i in range(m) for j in range(n) for p in range(k)]
    remaining = set(triples)
    uses_a: dict[tuple[int, int], int] = {}
    uses_b: dict[tuple[int, int], int] = {}
    uses_c: dict[tuple[int, int], int] = {}
    for i, j, p in triples:
        uses_a[(i, p)] = uses_a.get((i, p), 0) + 1
        uses_b[(p, j)] = uses_b.get((p, j), 0) + 1
        uses_c[(i, j)] = uses_c.get((i, j), 0) + 1
    needed_a = set(uses_a)
    needed_b = set(uses_b)
    needed_c = set(uses_c)

    res_a: set[tuple[int, int]] = set()
    res_b: set[tuple[int, int]] = set()
    res_c: dict[tuple[int, int], bool] = {}  # (i, j) -> dirty

    # the naive schedule is always a valid incumbent at S >= 3
    best_cost = 4 * m * n * k
    best_events = list(naive_schedule(dims).events)
    events: list = []
    memo: dict = {}
    nodes = 0
    exhausted = False

    def remaining_floor() -> int:
        load_a = len(needed_a) - len(needed_a & res_a)
        load_b = len(needed_b) - len(needed_b & res_b)
        load_c = sum(1 for ij in needed_c if ij not in res_c)
        stores = len(needed_c) + sum(
            1 for ij, dirty in res_c.items() if dirty and ij not in needed_c
        )
        return load_a + load_b + load_c + stores

    def dfs(cost: int) -> None:
        nonlocal nodes, exhausted, best_cost, best_events
        if exhausted:
            return
        if not remaining and not any(res_c.values()):
            if cost < best_cost:
                best_cost = cost
                best_events = list(events)
            return
        if cost + remaining_floor() >= best_cost:
            return
        key = (
            frozenset(res_a),
            frozenset(res_b),
            tuple(sorted(res_c.items())),
            frozenset(remaining),
        )
        seen = memo.get(key)
        if seen is not None and seen <= cost:
            return
        memo[key] = cost
        nodes += 1
        if nodes >= budget:
            exhausted = True
            return

        occupancy = len(res_a) + len(res_b) + len(res_c)

        # forced move: a dirty slot with no fmas left must be stored sooner or
        # later; storing now frees a slot and commutes with everything else.
        for ij in sorted(res_c):
            if res_c[ij] and ij not in needed_c:
                events.append(Store(OperandRef(Matrix.C, ij[0], ij[1])))
                del res_c[ij]
                dfs(cost + 1)
                res_c[ij] = True
                events.pop()
                return
        # forced move: a clean resident no pending fma uses is dead weight.
        for rc in sorted(res_a):
            if rc not in needed_a:
                events.append(Evict(OperandRef(Matrix.A, rc[0], rc[1])))
                res_a.discard(rc)
                dfs(cost)
                res_a.add(rc)
                events.pop()
                return
        for rc in sorted(res_b):
            if rc not in needed_b:
                events.append(Evict(OperandRef(Matrix.B, rc[0], rc[1])))
                res_b.discard(rc)
                dfs(cost)
                res_b.add(rc)
                events.pop()
                return
        for ij in sorted(res_c):
            if not res_c[ij] and ij not in needed_c:
                events.append(Evict(OperandRef(Matrix.C, ij[0], ij[1])))
                dirty = res_c.pop(ij)
                dfs(cost)
                res_c[ij] = dirty
                events.pop()
                return

        # loads of operands some pending fma still needs
        if occupancy < S:
            for rc in sorted(needed_a - res_a):
                res_a.add(rc)
                events.append(Load(OperandRef(Matrix.A, rc[0], rc[1])))
                dfs(cost + 1)
                events.pop()
                res_a.discard(rc)
            for rc in sorted(needed_b - res_b):
                res_b.add(rc)
                events.append(Load(OperandRef(Matrix.B, rc[0], rc[1])))
                dfs(cost + 1)
                events.pop()
                res_b.discard(rc)
            for ij in sorted(needed_c):
                if ij not in res_c:
                    res_c[ij] = False
                    events.append(Load(OperandRef(Matrix.C, ij[0], ij[1])))
                    dfs(cost + 1)
                    events.pop()
                    del res_c[ij]

        # fmas whose three inputs are resident
        for triple in sorted(remaining):
            i, j, p = triple
            if (i, p) in res_a and (p, j) in res_b and (i, j) in res_c:
                was_dirty = res_c[(i, j)]
                res_c[(i, j)] = True
                remaining.discard(triple)
                uses_a[(i, p)] -= 1
                if uses_a[(i, p)] == 0:
                    needed_a.discard((i, p))
                uses_b[(p, j)] -= 1
                if uses_b[(p, j)] == 0:
                    needed_b.discard((p, j))
                uses_c[(i, j)] -= 1
                if uses_c[(i, j)] == 0:
                    needed_c.discard((i, j))
                events.append(Fma(i, j, p))
                dfs(cost)
                events.pop()
                if uses_c[(i, j)] == 0:
                    needed_c.add((i, j))
                uses_c[(i, j)] += 1
                if uses_b[(p, j)] == 0:
                    needed_b.add((p, j))
                uses_b[(p, j)] += 1
                if uses_a[(i, p)] == 0:
                    needed_a.add((i, p))
                uses_a[(i, p)] += 1
                remaining.add(triple)
                res_c[(i, j)] = was_dirty

        # stores of dirty slots with work left (partial writeback)
        for ij in sorted(res_c):
            if res_c[ij]:
                events.append(Store(OperandRef(Matrix.C, ij[0], ij[1])))
                del res_c[ij]
                dfs(cost + 1)
                res_c[ij] = True
                events.pop()

        # evictions of still-needed clean residents: only worthwhile at full
        # occupancy, to make room
        if occupancy >= S:
            for rc in sorted(res_a):
                events.append(Evict(OperandRef(Matrix.A, rc[0], rc[1])))
                res_a.discard(rc)
                dfs(cost)
                res_a.add(rc)
                events.pop()
            for rc in sorted(res_b):
                events.append(Evict(OperandRef(Matrix.B, rc[0], rc[1])))
                res_b.discard(rc)
                dfs(cost)
                res_b.add(rc)
                events.pop()
            for ij in sorted(res_c):
                if not res_c[ij]:
                    events.append(Evict(OperandRef(Matrix.C, ij[0], ij[1])))
                    del res_c[ij]
                    dfs(cost)
                    res_c[ij] = False
                    events.pop()

    dfs(0)
    return TinyOptimum(
        min_io=best_cost,
        schedule=Schedule(tuple(best_events), dims),
        optimal=not exhausted,
        nodes=nodes,
    )
