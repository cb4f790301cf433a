"""Persistence formats: CSV round trips, config parsing, run records."""

import json
from pathlib import Path

import numpy as np
import pytest

from coilbench.benchmark import BenchmarkConfig
from coilbench.field import EvalPoint, FieldSample, QuadratureSpec
from coilbench.nsga2 import HistoryRow, NsgaConfig, ParetoArchive
from coilbench.runio import (
    DESIGN_BOUNDS,
    ParseFailure,
    RunRecord,
    SchemaMismatch,
    UnknownKey,
    default_nsga_config,
    format_float,
    make_run_record,
    read_config,
    read_pareto_csv,
    read_run_record,
    write_pareto_csv,
    write_profile_csv,
    write_run_record,
)

GOLDEN_CONFIG = Path(__file__).resolve().parent.parent / "configs" / "default.cfg"


def small_archive():
    archive = ParetoArchive()
    rng = np.random.default_rng(0)
    for _ in range(6):
        genes = rng.uniform(0.005, 0.05, 10)
        archive.add(genes, (float(rng.uniform(1e-5, 2e-3)), float(genes.sum())))
    return archive


class TestFormatFloat:
    def test_seventeen_digits_roundtrip(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            x = float(rng.uniform(-1.0, 1.0) * 10.0 ** rng.integers(-9, 9))
            assert float(format_float(x)) == x

    def test_zero_prints_bare(self):
        assert format_float(0.0) == "0"


class TestParetoCsv:
    def test_empty_archive_header_only(self, tmp_path):
        path = tmp_path / "pareto.csv"
        write_pareto_csv(ParetoArchive(), path)
        assert path.read_bytes() == b"f1_tesla,f2_meters,r1,r2,r3,r4,r5,r6,r7,r8,r9,r10\n"

    def test_single_member_roundtrip(self, tmp_path):
        archive = ParetoArchive()
        genes = np.linspace(0.005, 0.05, 10)
        archive.add(genes, (1.25e-4, float(genes.sum())))
        path = tmp_path / "pareto.csv"
        write_pareto_csv(archive, path)
        rows = read_pareto_csv(path)
        assert len(rows) == 1
        (f1, f2), got_genes = rows[0]
        assert f1 == 1.25e-4
        assert got_genes == tuple(genes)

    def test_rows_sorted_by_f1(self, tmp_path):
        path = tmp_path / "pareto.csv"
        write_pareto_csv(small_archive(), path)
        rows = read_pareto_csv(path)
        f1s = [r[0][0] for r in rows]
        assert f1s == sorted(f1s)

    def test_write_read_write_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        archive = small_archive()
        write_pareto_csv(archive, a)
        rebuilt = ParetoArchive()
        for (f1, f2), genes in read_pareto_csv(a):
            rebuilt.add(genes, (f1, f2))
        write_pareto_csv(rebuilt, b)
        assert a.read_bytes() == b.read_bytes()

    def test_lf_line_endings(self, tmp_path):
        path = tmp_path / "pareto.csv"
        write_pareto_csv(small_archive(), path)
        assert b"\r" not in path.read_bytes()


class TestProfileCsv:
    def samples(self, n=20):
        return [
            FieldSample(point=EvalPoint(r=0.003, z=float(z)), b_r=1e-6 * z, b_z=2e-3)
            for z in np.linspace(-0.005, 0.005, n)
        ]

    def test_twenty_samples_give_21_lines(self, tmp_path):
        path = tmp_path / "profile.csv"
        write_profile_csv(self.samples(20), path)
        lines = path.read_text().splitlines()
        assert len(lines) == 21
        assert lines[0] == "r_m,z_m,br_tesla,bz_tesla"

    def test_values_parse_finite_and_roundtrip(self, tmp_path):
        path = tmp_path / "profile.csv"
        samples = self.samples(5)
        write_profile_csv(samples, path)
        lines = path.read_text().splitlines()[1:]
        for line, s in zip(lines, samples):
            r, z, br, bz = map(float, line.split(","))
            assert (r, z, br, bz) == (s.point.r, s.point.z, s.b_r, s.b_z)

    def test_empty_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            write_profile_csv([], tmp_path / "x.csv")


class TestReadConfig:
    def test_empty_file_gives_defaults(self, tmp_path):
        path = tmp_path / "empty.cfg"
        path.write_text("")
        bench, nsga = read_config(path)
        assert bench == BenchmarkConfig()
        assert nsga.population == 100
        assert nsga.generations == 100
        assert nsga.bounds == DESIGN_BOUNDS
        assert nsga == default_nsga_config()

    def test_single_override(self, tmp_path):
        path = tmp_path / "one.cfg"
        path.write_text("population=50\n")
        _, nsga = read_config(path)
        assert nsga.population == 50
        assert nsga.generations == 100

    def test_bad_value_names_line(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("population=zzz\n")
        with pytest.raises(ParseFailure) as err:
            read_config(path)
        assert err.value.line == 1

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "unk.cfg"
        path.write_text("# fine\nwarp_factor=9\n")
        with pytest.raises(UnknownKey) as err:
            read_config(path)
        assert err.value.line == 2

    def test_comments_and_blanks_ignored(self, tmp_path):
        path = tmp_path / "c.cfg"
        path.write_text("\n# comment\nseed = 7\n\n")
        _, nsga = read_config(path)
        assert nsga.seed == 7

    def test_golden_default_config(self):
        bench, nsga = read_config(GOLDEN_CONFIG)
        assert bench == BenchmarkConfig()
        assert nsga == default_nsga_config()
        assert nsga.population == 100 and nsga.generations == 100


class TestRunRecord:
    def record(self):
        bench = BenchmarkConfig(roi_grid=(3, 3))
        nsga = NsgaConfig(bounds=DESIGN_BOUNDS, population=8, generations=2,
                          mutation_prob=0.1, seed=5)
        history = [
            HistoryRow(0, 8, 1e-3, 0.06, 3, 0.0),
            HistoryRow(1, 16, 9e-4, 0.06, 4, 1e-8),
            HistoryRow(2, 24, 8e-4, 0.055, 5, 2e-8),
        ]
        return make_run_record(bench, nsga, history, small_archive())

    def test_roundtrip_structural_equality(self, tmp_path):
        path = tmp_path / "run.json"
        record = self.record()
        write_run_record(record, path)
        assert read_run_record(path) == record

    def test_write_is_deterministic(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        record = self.record()
        write_run_record(record, a)
        write_run_record(record, b)
        assert a.read_bytes() == b.read_bytes()

    def test_schema_mismatch_rejected(self, tmp_path):
        path = tmp_path / "run.json"
        write_run_record(self.record(), path)
        doc = json.loads(path.read_text())
        doc["schema_version"] = 99
        path.write_text(json.dumps(doc))
        with pytest.raises(SchemaMismatch):
            read_run_record(path)

    def test_history_rows_match_generations_plus_one(self, tmp_path):
        record = self.record()
        assert len(record.history) == record.nsga.generations + 1

    def test_rerun_from_loaded_record_reproduces_archive(self, tmp_path):
        from coilbench.benchmark import make_evaluator
        from coilbench.nsga2 import nsga2_run

        bench = BenchmarkConfig(roi_grid=(2, 2))
        nsga = NsgaConfig(bounds=DESIGN_BOUNDS, population=6, generations=2,
                          mutation_prob=0.1, seed=17)
        _, archive, history = nsga2_run(nsga, make_evaluator(bench))
        path = tmp_path / "run.json"
        write_run_record(make_run_record(bench, nsga, history, archive), path)

        loaded = read_run_record(path)
        _, archive2, history2 = nsga2_run(loaded.nsga, make_evaluator(loaded.benchmark))
        rerun = make_run_record(loaded.benchmark, loaded.nsga, history2, archive2)
        assert rerun.archive_genes == loaded.archive_genes
        assert rerun.archive_objectives == loaded.archive_objectives
        assert rerun.history == loaded.history

    def test_timestamps_roundtrip(self, tmp_path):
        record = self.record()
        stamped = RunRecord(
            benchmark=record.benchmark,
            nsga=record.nsga,
            tool_version=record.tool_version,
            rng_algorithm=record.rng_algorithm,
            history=record.history,
            archive_genes=record.archive_genes,
            archive_objectives=record.archive_objectives,
            started_at="2021-01-01T00:00:00+00:00",
            finished_at="2021-01-01T00:05:00+00:00",
        )
        path = tmp_path / "stamped.json"
        write_run_record(stamped, path)
        assert read_run_record(path) == stamped
