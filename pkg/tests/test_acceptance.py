"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with `pytest -s tests/test_acceptance.py` to see the per-criterion lines;
the slowest entries are the oracle sweep (~15 s) and the full-size benchmark
optimization (~2 min).
"""

import math
import time

import numpy as np
import pytest

from coilbench.benchmark import (
    N_RADII,
    RADIUS_MAX,
    RADIUS_MIN,
    REFERENCE_RADII,
    BenchmarkConfig,
    decode_design,
    line_profile,
    make_evaluator,
)
from coilbench.cli import main
from coilbench.field import EvalPoint, TurnGeometry, br_turn, bz_turn, field_coil
from coilbench.nsga2 import (
    Individual,
    NsgaConfig,
    dominates,
    fast_nondominated_sort,
    hypervolume_2d,
    nsga2_run,
)
from coilbench.oracle import loop_field_onaxis, oracle_field_coil
from coilbench.runio import default_nsga_config, read_config, read_run_record, write_run_record
from tests.test_runio import GOLDEN_CONFIG


def report(n, text):
    print(f"\n[acceptance] criterion {n}: PASS — {text}", flush=True)


def test_criterion_1_oracle_equivalence():
    """Solver vs triple-integral oracle along r = 3 mm, 20 points, < 1e-6."""
    t0 = time.perf_counter()
    cfg = BenchmarkConfig()
    layout = decode_design(REFERENCE_RADII, cfg)
    samples = line_profile(
        layout, 0.003, -cfg.roi_half_height, cfg.roi_half_height, 20, cfg.quad
    )
    worst = 0.0
    for s in samples:
        br_o, bz_o = oracle_field_coil(layout, s.point)
        worst = max(
            worst,
            abs(s.b_r - br_o) / max(abs(br_o), 1e-12),
            abs(s.b_z - bz_o) / max(abs(bz_o), 1e-12),
        )
    elapsed = time.perf_counter() - t0
    assert worst < 1e-6
    assert elapsed < 120.0
    report(1, f"max rel deviation {worst:.3e} over 20 points in {elapsed:.1f} s")


def test_criterion_2_physical_limits():
    """Thin-turn center field vs ideal loop; exact zero radial field on axis."""
    worst_loop = 0.0
    for a in (0.008, 0.02, 0.045):
        eps = a / 2000.0  # cross-section extents a/1000
        thin = TurnGeometry(a - eps, a + eps, -eps, eps, 1.0)
        got = bz_turn(thin, EvalPoint(r=0.0, z=0.0))
        want = loop_field_onaxis(a, 1.0, 0.0)
        worst_loop = max(worst_loop, abs(got - want) / want)
    assert worst_loop < 1e-3

    worst_axis = 0.0
    for current in (1.0, -3.0, 250.0):
        turn = TurnGeometry(0.006, 0.007, -0.001, 0.002, current)
        for z in (-0.01, 0.0, 0.0005, 0.03):
            br = br_turn(turn, EvalPoint(r=0.0, z=z))
            worst_axis = max(worst_axis, abs(br) / abs(current))
    assert worst_axis <= 1e-14

    report(
        2,
        f"thin-turn worst rel error {worst_loop:.2e} (< 0.1%), "
        f"axis |Br|/A worst {worst_axis:.1e} (<= 1e-14)",
    )


def test_criterion_3_symmetry_suite():
    """Any symmetric decoded layout: Br(r,0)=0; Bz even and Br odd in z."""
    cfg = BenchmarkConfig()
    rng = np.random.default_rng(314)
    designs = [REFERENCE_RADII] + [
        rng.uniform(RADIUS_MIN, RADIUS_MAX, N_RADII) for _ in range(3)
    ]
    worst_mid = 0.0
    worst_pair = 0.0
    for design in designs:
        layout = decode_design(design, cfg)
        n = 21
        samples = line_profile(layout, 0.003, -0.005, 0.005, n, cfg.quad)
        scale = max(max(abs(s.b_z), abs(s.b_r)) for s in samples)
        for i in range(n):
            j = n - 1 - i
            worst_pair = max(
                worst_pair,
                abs(samples[i].b_z - samples[j].b_z) / scale,
                abs(samples[i].b_r + samples[j].b_r) / scale,
            )
        for r in (0.001, 0.003, 0.005):
            s = field_coil(layout, EvalPoint(r=r, z=0.0), cfg.quad)
            worst_mid = max(worst_mid, abs(s.b_r) / abs(s.b_z))
    assert worst_mid < 1e-10
    assert worst_pair < 1e-10
    report(
        3,
        f"midplane |Br|/|Bz| worst {worst_mid:.1e}, mirror-pair worst "
        f"{worst_pair:.1e} over {len(designs)} layouts (< 1e-10)",
    )


def brute_force_fronts(objectives):
    remaining = list(range(len(objectives)))
    fronts = []
    while remaining:
        front = [
            i
            for i in remaining
            if not any(
                dominates(objectives[j], objectives[i]) for j in remaining if j != i
            )
        ]
        fronts.append(sorted(front))
        remaining = [i for i in remaining if i not in front]
    return fronts


def test_criterion_4_nsga_building_blocks():
    """Sorting vs brute force on 200 random populations; exact hypervolumes."""
    rng = np.random.default_rng(2718)
    for trial in range(200):
        if trial % 2:
            objs = rng.integers(0, 5, size=(20, 2)).astype(float)  # many ties
        else:
            objs = rng.random((20, 2))
        pop = [Individual(genes=np.array([i]), objectives=o) for i, o in enumerate(objs)]
        fronts = fast_nondominated_sort(pop)
        got = [sorted(pop.index(ind) for ind in front) for front in fronts]
        assert got == brute_force_fronts(objs)

    assert hypervolume_2d([(1.0, 1.0)], (2.0, 2.0)) == 1.0
    assert hypervolume_2d([(1.0, 3.0), (2.0, 2.0), (3.0, 1.0)], (4.0, 4.0)) == 6.0
    assert (
        hypervolume_2d([(1.0, 3.0), (2.0, 2.0), (3.0, 1.0), (3.5, 3.5)], (4.0, 4.0))
        == 6.0
    )
    report(4, "200 sort partitions match brute force; hand hypervolumes exact")


def test_criterion_5_schaffer_front():
    """Seeded 100x100 run recovers the closed-form Schaffer front."""

    def schaffer(genes):
        x = float(genes[0])
        return (x * x, (x - 2.0) ** 2)

    cfg = NsgaConfig(bounds=((-10.0, 10.0),), population=100, generations=100, seed=2024)
    t0 = time.perf_counter()
    _, archive, history = nsga2_run(cfg, schaffer)
    elapsed = time.perf_counter() - t0

    objs = archive.objective_matrix()
    # coverage: every probe point of the true front has a nearby archive point
    worst_cover = 0.0
    for x in np.linspace(0.0, 2.0, 50):
        probe = np.array([x * x, (x - 2.0) ** 2])
        dists = np.hypot(objs[:, 0] - probe[0], objs[:, 1] - probe[1])
        worst_cover = max(worst_cover, float(dists.min()))
    assert worst_cover < 0.05
    # closeness: every archive point sits on the true front
    worst_close = 0.0
    for f1, f2 in objs:
        worst_close = max(worst_close, abs(f2 - (math.sqrt(f1) - 2.0) ** 2))
    assert worst_close < 0.05
    # monotone cumulative-archive hypervolume across all generations
    hv = [row.hypervolume for row in history]
    assert len(hv) == 101
    assert all(b >= a for a, b in zip(hv, hv[1:]))
    assert elapsed < 30.0
    report(
        5,
        f"front coverage {worst_cover:.3f}, closeness {worst_close:.2e} (< 0.05), "
        f"hypervolume monotone over 100 generations, {elapsed:.1f} s",
    )


def test_criterion_6_benchmark_end_to_end():
    """Default 100x100 benchmark run: counts, archive sanity, progress."""
    bench = BenchmarkConfig()
    nsga = default_nsga_config()
    assert nsga.population == 100 and nsga.generations == 100

    calls = [0]
    inner = make_evaluator(bench)

    def evaluator(genes):
        calls[0] += 1
        return inner(genes)

    t0 = time.perf_counter()
    population, archive, history = nsga2_run(nsga, evaluator)
    elapsed = time.perf_counter() - t0

    assert calls[0] == nsga.population * (nsga.generations + 1) == 10100
    assert history[-1].evaluations == 10100

    objs = archive.objective_matrix()
    for i in range(len(objs)):
        for j in range(len(objs)):
            if i != j:
                assert not dominates(objs[i], objs[j])

    for member in archive.members:
        assert np.all(member.genes >= RADIUS_MIN) and np.all(member.genes <= RADIUS_MAX)
    for ind in population:
        assert np.all(ind.genes >= RADIUS_MIN) and np.all(ind.genes <= RADIUS_MAX)

    hv = [row.hypervolume for row in history]
    assert all(b >= a for a, b in zip(hv, hv[1:]))

    best_f1 = float(objs[:, 0].min())
    assert best_f1 < bench.b0_target  # strictly better than the dead coil
    assert elapsed < 600.0
    report(
        6,
        f"10100 evaluations, archive {len(archive)} pairwise non-dominated, "
        f"best f1 {best_f1:.3e} < 2e-3, hv monotone, {elapsed:.0f} s",
    )


def test_criterion_7_determinism(tmp_path, capsys):
    """Identical config + seed through the CLI: byte-identical artifacts."""
    cfg = tmp_path / "run.cfg"
    cfg.write_text("population = 16\ngenerations = 5\nseed = 31\n")
    dir_a, dir_b = tmp_path / "a", tmp_path / "b"
    assert main(["optimize", "--config", str(cfg), "--out", str(dir_a)]) == 0
    assert main(["optimize", "--config", str(cfg), "--out", str(dir_b)]) == 0
    capsys.readouterr()
    for name in ("pareto.csv", "run_record.json", "last_generation.csv"):
        assert (dir_a / name).read_bytes() == (dir_b / name).read_bytes()
    report(7, "pareto.csv, last_generation.csv and run_record.json byte-identical")


def test_criterion_8_roundtrip(tmp_path):
    """Config -> record -> file -> record is lossless; golden file is 100/100."""
    bench, nsga = read_config(GOLDEN_CONFIG)
    assert bench == BenchmarkConfig()
    assert nsga == default_nsga_config()
    assert nsga.population == 100 and nsga.generations == 100

    small = NsgaConfig(
        bounds=nsga.bounds, population=8, generations=2,
        mutation_prob=nsga.mutation_prob, seed=nsga.seed,
    )
    grid_bench = BenchmarkConfig(roi_grid=(2, 2))
    from coilbench.runio import make_run_record

    _, archive, history = nsga2_run(small, make_evaluator(grid_bench))
    record = make_run_record(grid_bench, small, history, archive)
    path = tmp_path / "record.json"
    write_run_record(record, path)
    loaded = read_run_record(path)
    assert loaded == record
    assert loaded.benchmark == grid_bench
    assert loaded.nsga == small
    report(8, "golden config parses to 100/100 defaults; record round-trip lossless")
