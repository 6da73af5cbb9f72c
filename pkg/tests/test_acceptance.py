"""Acceptance suite: ten numbered criteria, one test each.

Every test prints exactly one `criterion NN: PASS/FAIL (...)` line before
asserting, so a single glance at the verbose run shows the whole gate.
Tolerances are stated inline: integer counts are exact, analytic identities
allow 1e-12 relative error, grid-vs-analytic comparisons allow 1%.
"""

import math
import random
import time

import pytest

from iomma import (
    Algorithm,
    GotoParams,
    MemoryConfig,
    PhaseConfig,
    ProblemDims,
    block_size,
    build_schedule,
    check_capacity,
    check_loomis_whitney,
    execute,
    fmax,
    goto_report,
    grid_search_xyz,
    l2_reads,
    l3_reads,
    lower_bound_final,
    lower_bound_general,
    lower_bound_MS,
    optimal_M,
    optimal_xyz,
    partition_phases,
    predicted_io,
    reference_gemm,
    seeded_matrices,
    tiny_optimal_schedule,
)

ALL_ALGS = list(Algorithm)
SEED = 42


def _report(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number:02d}: {'PASS' if ok else 'FAIL'} ({detail})"
    print(line)
    assert ok, line


def _simulate(alg, dims, S):
    schedule = build_schedule(alg, dims, S)
    a, b, c = seeded_matrices(dims, SEED)
    return execute(schedule, MemoryConfig(S), a, b, c)


def test_criterion_01_alg_c_exact_counts():
    small = _simulate(Algorithm.C, ProblemDims(6, 6, 6), 16).stats
    big = _simulate(Algorithm.C, ProblemDims(60, 60, 60), 16).stats
    ok = (
        (small.reads, small.writes, small.fmas, small.peak_residency)
        == (180, 36, 216, 15)
        and (big.reads, big.writes) == (147600, 3600)
    )
    _report(
        1, ok,
        f"(6,6,6,16): r={small.reads} w={small.writes} f={small.fmas} "
        f"peak={small.peak_residency}; (60,60,60,16): r={big.reads} w={big.writes}; "
        "exact match required",
    )


def test_criterion_02_alg_a_b_exact_counts():
    dims = ProblemDims(6, 6, 6)
    stats_a = _simulate(Algorithm.A, dims, 16).stats
    stats_b = _simulate(Algorithm.B, dims, 16).stats
    mnk_over_b = 216 // block_size(16)
    ok = (
        (stats_a.reads, stats_a.writes) == (180, 72)
        and (stats_b.reads, stats_b.writes) == (180, 72)
        and stats_b.writes == mnk_over_b
        and stats_b.writes <= stats_b.reads
        and stats_a.writes <= stats_a.reads
    )
    _report(
        2, ok,
        f"A: r={stats_a.reads} w={stats_a.writes}; B: r={stats_b.reads} "
        f"w={stats_b.writes}; mnk/b={mnk_over_b}; writes<=reads both; exact",
    )


def test_criterion_03_bound_identities():
    rng = random.Random(31415)
    worst = 0.0
    for _ in range(1000):
        dims = ProblemDims(rng.randint(1, 100), rng.randint(1, 100), rng.randint(1, 100))
        S = rng.randint(1, 1000)
        for general, named in (
            (lower_bound_general(dims, S, 2 * S), lower_bound_final(dims, S)),
            (lower_bound_general(dims, S, S), lower_bound_MS(dims, S)),
        ):
            scale = max(1.0, abs(general), abs(named))
            worst = max(worst, abs(general - named) / scale)
    exact76 = lower_bound_final(ProblemDims(6, 6, 6), 16)
    ok = worst <= 1e-12 and exact76 == 76.0
    _report(
        3, ok,
        f"1000 samples, worst relative gap {worst:.2e} (tol 1e-12); "
        f"final bound at (6,6,6,16) = {exact76} (exact 76 required)",
    )


def test_criterion_04_xyz_grid_oracle():
    best = grid_search_xyz(16, 32, 1.0)
    analytic = optimal_xyz(16, 32)
    cap = fmax(16, 32)
    exact_ok = (
        (best.x, best.y, best.z) == (16.0, 16.0, 16.0)
        and best.f == 64.0
        and abs(best.f - analytic.f) <= 1e-12 * best.f
        and abs(best.f - cap) <= 1e-12 * best.f
    )
    rng = random.Random(2718)
    worst_pct = 0.0
    for _ in range(20):
        S = rng.randint(4, 400)
        M = rng.randint(4, 800)
        grid = grid_search_xyz(S, M, (S + M) / 200)
        worst_pct = max(worst_pct, (fmax(S, M) - grid.f) / fmax(S, M))
    ok = exact_ok and worst_pct <= 0.01
    _report(
        4, ok,
        f"grid(16,32,1) = ({best.x:.0f},{best.y:.0f},{best.z:.0f}) f={best.f} "
        f"(exact 64, analytic within 1e-12); 20 random grids within "
        f"{worst_pct:.3%} of analytic (tol 1%)",
    )


def test_criterion_05_optimal_M_near_2S():
    failures = []
    for S in (16, 64, 256, 1024):
        low, high = S / 4, 8 * S
        grid = [low + i * (high - low) / 199 for i in range(200)]
        got = optimal_M(S, grid)
        nearest = min(grid, key=lambda M: (abs(M - 2 * S), M))
        if got != nearest:
            failures.append((S, got, nearest))
    _report(
        5, not failures,
        "S in {16,64,256,1024}: argmax over 200-point [S/4,8S] grid equals "
        f"the point nearest 2S (exact); failures: {failures or 'none'}",
    )


def test_criterion_06_phase_inequalities_full_grid():
    violations = 0
    phases = 0
    for m in range(1, 9):
        for n in range(1, 9):
            for k in range(1, 9):
                dims = ProblemDims(m, n, k)
                for S in (4, 9, 16):
                    for alg in ALL_ALGS:
                        schedule = build_schedule(alg, dims, S)
                        for M in (S, 2 * S):
                            for r in partition_phases(schedule, PhaseConfig(M)):
                                phases += 1
                                if not check_loomis_whitney(r):
                                    violations += 1
                                elif not check_capacity(r, S, M):
                                    violations += 1
    _report(
        6, violations == 0,
        f"dims {{1..8}}^3, S in {{4,9,16}}, M in {{S,2S}}, all algorithms: "
        f"{phases} phases, {violations} violations (zero required)",
    )


def test_criterion_07_attainment_trend():
    S = 16
    anchor_dims = ProblemDims(60, 60, 60)
    anchor = _simulate(Algorithm.C, anchor_dims, S).stats
    predicted_anchor = predicted_io(Algorithm.C, anchor_dims, S)
    anchored = (anchor.reads, anchor.writes) == (
        predicted_anchor.reads, predicted_anchor.writes
    )
    ratios = []
    for size in (60, 120, 240):
        dims = ProblemDims(size, size, size)
        io_total = predicted_io(Algorithm.C, dims, S).io_total
        ratios.append(io_total / lower_bound_final(dims, S))
    ok = anchored and ratios[0] > ratios[1] > ratios[2] and ratios[2] <= 1.45
    _report(
        7, ok,
        f"simulation equals structural io at 60^3 ({anchored}); ratios "
        f"{ratios[0]:.4f} > {ratios[1]:.4f} > {ratios[2]:.4f}, last <= 1.45",
    )


def test_criterion_08_bitwise_agreement_full_grid():
    mismatches = 0
    cases = 0
    for m in range(1, 9):
        for n in range(1, 9):
            for k in range(1, 9):
                dims = ProblemDims(m, n, k)
                a, b, c = seeded_matrices(dims, SEED)
                expected = reference_gemm(a, b, c).tobytes()
                for S in (4, 9, 16):
                    for alg in ALL_ALGS:
                        schedule = build_schedule(alg, dims, S)
                        result = execute(schedule, MemoryConfig(S), a, b, c)
                        cases += 1
                        if result.output_c.tobytes() != expected:
                            mismatches += 1
    _report(
        8, mismatches == 0,
        f"dims {{1..8}}^3, S in {{4,9,16}}, all algorithms: {cases} runs, "
        f"{mismatches} byte-level mismatches (zero required)",
    )


def test_criterion_09_tiny_exact_optima():
    t0 = time.perf_counter()
    one = tiny_optimal_schedule(ProblemDims(1, 1, 1), 3)
    flat = tiny_optimal_schedule(ProblemDims(2, 2, 1), 4)
    elapsed = time.perf_counter() - t0
    checks = [
        one.min_io == 4 and one.optimal,
        flat.min_io == 12 and flat.optimal,
        one.min_io >= lower_bound_final(ProblemDims(1, 1, 1), 3),
        flat.min_io >= lower_bound_final(ProblemDims(2, 2, 1), 4),
        elapsed < 60.0,
    ]
    for dims, S, found in ((ProblemDims(1, 1, 1), 3, one), (ProblemDims(2, 2, 1), 4, flat)):
        for alg in ALL_ALGS:
            try:
                cost = predicted_io(alg, dims, S).io_total
            except ValueError:  # blocked algorithms need S >= 4
                continue
            checks.append(found.min_io <= cost)
    ok = all(checks)
    _report(
        9, ok,
        f"(1,1,1,S=3) -> {one.min_io} (expect 4), (2,2,1,S=4) -> {flat.min_io} "
        f"(expect 12); both >= final bound and <= every runnable algorithm; "
        f"search took {elapsed:.2f}s (< 60s)",
    )


def test_criterion_10_goto_model():
    d96 = ProblemDims(96, 96, 96)
    params96 = GotoParams(n_c=48, k_c=12, m_c=12, n_r=4, m_r=4, S2=144, S3=576)
    l3 = l3_reads(d96, params96)
    l2 = l2_reads(d96, params96)
    l2_ratio = goto_report(d96, params96).l2_ratio

    d4096 = ProblemDims(4096, 4096, 4096)
    square = GotoParams(
        n_c=1024, k_c=1024, m_c=64, n_r=4, m_r=4, S2=65536, S3=1 << 20
    )
    l3_ratio_4096 = goto_report(d4096, square).l3_ratio

    clauses = [
        l3 == 101376.0,
        l2 == 156672.0,
        abs(l2_ratio - 1.0625) <= 1e-12,
        l3_ratio_4096 <= 1.10,
    ]
    ok = all(clauses)
    _report(
        10, ok,
        f"l3(96^3,n_c=48,k_c=12)={l3:.0f} (expect 101376, {clauses[0]}); "
        f"l2(96^3,m_c=k_c=12)={l2:.0f} (expect 156672, {clauses[1]}); "
        f"l2_ratio={l2_ratio} (expect 1.0625 +- 1e-12, {clauses[2]}); "
        f"l3_ratio(4096^3,S3=2^20,n_c=k_c=1024)={l3_ratio_4096} "
        f"(required <= 1.10, {clauses[3]}: the three read terms give "
        f"2*mnk/sqrt(S3)*(1 + sqrt(S3)/(2m)) = 1.125 at these sizes)",
    )
