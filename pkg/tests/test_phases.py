"""Phase partitioning, the Loomis-Whitney and capacity checks, and the
fmas-per-transfer efficiency ratio."""

import pytest

from iomma import (
    Algorithm,
    EmptyInputError,
    Evict,
    Fma,
    Load,
    Matrix,
    MemoryConfig,
    OperandRef,
    PHASE_CSV_HEADER,
    PhaseConfig,
    ProblemDims,
    Schedule,
    Store,
    UnvalidatedTraceError,
    build_schedule,
    check_capacity,
    check_loomis_whitney,
    execute,
    naive_schedule,
    partition_phases,
    phase_efficiency,
    phases_to_csv,
    seeded_matrices,
)


def _alg_c_phases(size=6, S=16, M=32):
    dims = ProblemDims(size, size, size)
    schedule = build_schedule(Algorithm.C, dims, S)
    return schedule, partition_phases(schedule, PhaseConfig(M))


def test_alg_c_6_phase_structure():
    _, reports = _alg_c_phases()
    assert len(reports) == 7
    transfers = [r.loads + r.stores for r in reports]
    assert transfers == [32, 32, 32, 32, 32, 32, 24]
    assert sum(r.fmas for r in reports) == 216
    assert reports[0].resident_at_start == 0
    for r in reports:
        assert check_loomis_whitney(r)
        assert check_capacity(r, 16, 32)
        assert r.resident_at_start <= 15  # never above the peak residency


def test_phase_counts_match_execution():
    dims = ProblemDims(5, 4, 3)
    for alg in Algorithm:
        schedule = build_schedule(alg, dims, 9)
        a, b, c = seeded_matrices(dims, 7)
        stats = execute(schedule, MemoryConfig(9), a, b, c).stats
        for M in (9, 18, 5):
            reports = partition_phases(schedule, PhaseConfig(M))
            assert sum(r.loads for r in reports) == stats.reads
            assert sum(r.stores for r in reports) == stats.writes
            assert sum(r.fmas for r in reports) == stats.fmas
            for r in reports[:-1]:
                assert r.loads + r.stores == M
            assert 1 <= reports[-1].loads + reports[-1].stores <= M


def test_footprints_count_distinct_elements():
    dims = ProblemDims(1, 1, 2)
    # two fmas on one c element: z=1 even though it is touched twice
    reports = partition_phases(naive_schedule(dims), PhaseConfig(100))
    assert len(reports) == 1
    r = reports[0]
    assert (r.x, r.y, r.z) == (2, 2, 1)
    assert r.fmas == 2
    assert check_loomis_whitney(r)


def test_trailing_compute_belongs_to_last_phase():
    # M transfers then fmas and evicts: the tail must not open a new phase
    dims = ProblemDims(1, 1, 1)
    a_ref = OperandRef(Matrix.A, 0, 0)
    b_ref = OperandRef(Matrix.B, 0, 0)
    c_ref = OperandRef(Matrix.C, 0, 0)
    events = (
        Load(a_ref), Load(b_ref), Load(c_ref),
        Fma(0, 0, 0),
        Store(c_ref),
        Evict(a_ref), Evict(b_ref),
    )
    reports = partition_phases(Schedule(events, dims), PhaseConfig(4))
    assert len(reports) == 1
    assert reports[0].loads == 3 and reports[0].stores == 1
    assert reports[0].fmas == 1


def test_phase_boundary_right_after_mth_transfer():
    dims = ProblemDims(1, 1, 2)
    reports = partition_phases(naive_schedule(dims), PhaseConfig(4))
    # 8 transfers total: two full phases, fma of the second iteration lands
    # in phase 1 because it follows the 4th transfer
    assert [r.loads + r.stores for r in reports] == [4, 4]
    assert [r.fmas for r in reports] == [1, 1]


def test_empty_trace_yields_no_phases():
    reports = partition_phases(Schedule((), ProblemDims(1, 1, 1)), PhaseConfig(4))
    assert reports == []


def test_resident_at_start_matches_independent_replay():
    dims = ProblemDims(4, 3, 5)
    schedule = build_schedule(Algorithm.C, dims, 9)
    M = 9
    reports = partition_phases(schedule, PhaseConfig(M))
    # replay occupancy by hand: +1 on load, -1 on store and evict
    occupancy = 0
    boundaries = [0]
    io_seen = 0
    for event in schedule.events:
        if isinstance(event, Load):
            if io_seen == M:
                boundaries.append(occupancy)
                io_seen = 0
            occupancy += 1
            io_seen += 1
        elif isinstance(event, Store):
            if io_seen == M:
                boundaries.append(occupancy)
                io_seen = 0
            occupancy -= 1
            io_seen += 1
        elif isinstance(event, Evict):
            occupancy -= 1
    assert [r.resident_at_start for r in reports] == boundaries[: len(reports)]


def test_invalid_traces_rejected():
    dims = ProblemDims(1, 1, 1)
    c_ref = OperandRef(Matrix.C, 0, 0)
    with pytest.raises(UnvalidatedTraceError):
        partition_phases(Schedule((Fma(0, 0, 0),), dims), PhaseConfig(4))
    with pytest.raises(UnvalidatedTraceError):
        partition_phases(Schedule((Store(c_ref),), dims), PhaseConfig(4))
    with pytest.raises(UnvalidatedTraceError):
        # dirty at end of trace
        partition_phases(
            Schedule(
                (
                    Load(OperandRef(Matrix.A, 0, 0)),
                    Load(OperandRef(Matrix.B, 0, 0)),
                    Load(c_ref),
                    Fma(0, 0, 0),
                ),
                dims,
            ),
            PhaseConfig(4),
        )
    with pytest.raises(UnvalidatedTraceError):
        partition_phases(
            Schedule((Load(OperandRef(Matrix.A, 5, 0)),), dims), PhaseConfig(4)
        )


def test_loomis_whitney_is_exact_integer_comparison():
    good = _report(fmas=6, x=6, y=6, z=1)
    assert check_loomis_whitney(good)
    bad = _report(fmas=7, x=6, y=6, z=1)  # 49 > 36
    assert not check_loomis_whitney(bad)


def test_capacity_check_both_inequalities():
    r = _report(fmas=1, x=10, y=10, z=10, loads=20, resident_at_start=12)
    assert check_capacity(r, S=16, M=32)  # 30 <= 48 and 30 <= 32
    assert not check_capacity(r, S=4, M=8)  # 30 > 12
    starved = _report(fmas=1, x=10, y=10, z=10, loads=5, resident_at_start=3)
    assert not check_capacity(starved, S=16, M=32)  # 30 > 8


def _report(fmas=0, x=0, y=0, z=0, loads=0, stores=0, resident_at_start=0):
    from iomma import PhaseReport

    return PhaseReport(
        index=0, loads=loads, stores=stores, fmas=fmas,
        x=x, y=y, z=z, resident_at_start=resident_at_start,
    )


def test_naive_efficiency_is_quarter():
    dims = ProblemDims(4, 5, 6)
    reports = partition_phases(naive_schedule(dims), PhaseConfig(8))
    assert phase_efficiency(reports, 4, 8) == 0.25


def test_blocked_efficiency_approaches_half_block():
    _, reports = _alg_c_phases(size=60, S=16, M=32)
    eff = phase_efficiency(reports, 16, 32)
    assert eff == 216000 / 151200  # fmas / (147600 + 3600)
    # within 5% of the b/2 = 1.5 asymptote already at m=n=k=60
    assert abs(eff - 1.5) / 1.5 < 0.05


def test_efficiency_rejects_empty():
    with pytest.raises(EmptyInputError):
        phase_efficiency([], 16, 32)


def test_csv_format():
    _, reports = _alg_c_phases()
    text = phases_to_csv(reports)
    lines = text.splitlines()
    assert lines[0] == PHASE_CSV_HEADER
    assert len(lines) == 8
    first = lines[1].split(",")
    assert first[0] == "0"
    assert first[1:4] == ["32", "0", "27"]
    assert first[7] == "27.0"  # sqrt(9*9*9)
    assert text.endswith("\n")
