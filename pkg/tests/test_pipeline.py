"""Two-stage analysis flow, verdict logic, and report output."""

import csv

import numpy as np
import pytest

from conftest import frame_from_arrays, outlier_flip_points
from prodsize import classify, stats
from prodsize.config import RunConfig
from prodsize.dataset import Dataset
from prodsize.pipeline import (
    CONSTANT,
    CONSTANT_RETURNS,
    EXCLUDED,
    INCREASING,
    INCREASING_RETURNS,
    NOT_RUN,
    PipelineError,
    derive_sds_seed,
    format_summary_table,
    loess_verdict,
    run_analysis,
    stage_confirm,
    stage_quality_screen,
    stage_size_productivity,
    write_report,
)


def near_independent_frame():
    # 35 units; the top-share x size table carries G = 0.0484 (p = 0.826)
    sizes = list(range(1, 36))
    tops = [0.0] * 35
    for i in list(range(0, 7)) + list(range(18, 24)):
        tops[i] = 0.5
    return frame_from_arrays(sizes, sizes, tops=tops)


class TestQualityScreen:
    def test_near_independent_not_screened(self):
        top, inactive, screened = stage_quality_screen(near_independent_frame())
        assert top.p_value == pytest.approx(0.826, abs=1e-3)
        assert not top.significant
        assert not screened

    def test_planted_association_screens_out(self):
        # all the top scientists sit in the large units
        sizes = list(range(1, 41))
        tops = [0.0] * 20 + [0.5] * 20
        frame = frame_from_arrays(sizes, sizes, tops=tops)
        top, _, screened = stage_quality_screen(frame)
        assert top.significant
        assert screened

    def test_below_min_units_not_run(self):
        frame = frame_from_arrays([1, 2, 3, 4, 5], [1, 2, 3, 4, 5])
        top, inactive, screened = stage_quality_screen(frame, min_units=10)
        assert top.not_run and inactive.not_run
        assert screened  # conservative exclusion


class TestSizeProductivity:
    def test_47_unit_pattern(self):
        # 47 units engineered so productivity x size dichotomizes to (14, 10, 10, 13)
        sizes = list(range(1, 48))  # Small = 24 units
        prods = np.empty(47)
        small = list(range(0, 24))
        large = list(range(24, 47))
        low_values = iter(np.linspace(1.0, 1.9, 24))
        high_values = iter(np.linspace(2.1, 3.0, 23))
        for i in small[:14] + large[:10]:
            prods[i] = next(low_values)
        for i in small[14:] + large[10:]:
            prods[i] = next(high_values)
        frame = frame_from_arrays(sizes, prods)
        table = classify.contingency(frame, "productivity", "size")
        assert (table.a, table.b, table.c, table.d) == (14, 10, 10, 13)
        assoc = stage_size_productivity(frame)
        assert assoc.g_statistic == pytest.approx(1.0409, abs=1e-3)
        assert assoc.p_value == pytest.approx(0.308, abs=1e-3)
        assert assoc.tau_b == pytest.approx(0.1486, abs=1e-4)
        assert not assoc.significant

    def test_concordant_pattern_significant(self):
        sizes = list(range(1, 49))
        prods = np.empty(48)
        low_values = iter(np.linspace(1.0, 1.9, 24))
        high_values = iter(np.linspace(2.1, 3.0, 24))
        for i in list(range(0, 15)) + list(range(24, 33)):
            prods[i] = next(low_values)
        for i in list(range(15, 24)) + list(range(33, 48)):
            prods[i] = next(high_values)
        frame = frame_from_arrays(sizes, prods)
        table = classify.contingency(frame, "productivity", "size")
        assert (table.a, table.b, table.c, table.d) == (15, 9, 9, 15)
        assoc = stage_size_productivity(frame)
        assert assoc.p_value == pytest.approx(0.082, abs=1e-3)
        assert assoc.significant
        assert assoc.tau_b == pytest.approx(0.25, abs=1e-12)

    def test_independent_frame_near_zero_g(self):
        rng = np.random.default_rng(0)
        sizes = np.arange(1, 41)
        prods = np.tile([1.0, 2.0], 20)  # alternating: independent of size
        frame = frame_from_arrays(sizes, prods)
        assoc = stage_size_productivity(frame)
        assert assoc.g_statistic < 0.2
        assert not assoc.significant


def confirm_config(**kw):
    return RunConfig(**kw)


class TestConfirm:
    def test_planted_step_up(self):
        # clear productivity step between the first quartile and the rest
        rng = np.random.default_rng(8)
        sizes = np.arange(1, 41)
        prods = np.where(sizes <= 10, 1.0, 2.0) + rng.normal(0, 0.05, 40)
        frame = frame_from_arrays(sizes, prods)
        result = stage_confirm(frame, None, confirm_config(), seed=5)
        assert result.npc_p < 0.1
        assert result.loess_verdict == INCREASING

    def test_flat_frame_constant(self):
        rng = np.random.default_rng(9)
        sizes = np.arange(1, 41)
        prods = 2.0 + rng.normal(0, 0.05, 40)
        frame = frame_from_arrays(sizes, prods)
        result = stage_confirm(frame, None, confirm_config(), seed=5)
        assert result.loess_verdict == CONSTANT

    def test_too_few_units_not_run(self):
        frame = frame_from_arrays(range(1, 8), range(1, 8))
        result = stage_confirm(frame, None, confirm_config(), seed=1)
        assert result.npc_p is None
        assert result.loess_verdict == NOT_RUN

    def test_outlier_removal_flips_verdict(self):
        points, planted = outlier_flip_points()
        span, degree = 0.5, 1
        before = stats.loess_fit(points, span, degree)
        assert loess_verdict(before, 0.05) == CONSTANT
        flagged = stats.detect_outliers_residual(before, 3.0)
        assert planted <= flagged
        after = stats.loess_fit(points, span, degree, exclude=flagged)
        assert loess_verdict(after, 0.05) == INCREASING

    def test_confirm_applies_outlier_removal(self):
        points, planted = outlier_flip_points()
        frame = frame_from_arrays([p[0] for p in points], [p[1] for p in points])
        result = stage_confirm(frame, None, confirm_config(loess_span=0.5), seed=2)
        assert planted <= result.outliers
        assert result.loess_verdict == INCREASING


class TestRunAnalysis:
    def test_empty_dataset_is_an_error(self):
        with pytest.raises(PipelineError):
            run_analysis(Dataset([], [], (2004, 2008)), RunConfig())

    def test_concordant_world_flagged(self, concordant_world):
        report = run_analysis(concordant_world, RunConfig(seed=5), {"SDS1": "UDA3"})
        (result,) = report.results
        assert not result.screened_out
        assert result.size_prod_assoc.tau_b == pytest.approx(0.25, abs=1e-12)
        assert result.final_class == INCREASING_RETURNS
        (row,) = report.increasing
        assert row.sds_id == "SDS1"
        assert row.tau_b == pytest.approx(0.25, abs=1e-12)
        assert row.stars == "*"

    def test_exclusion_accounting(self, concordant_world):
        report = run_analysis(concordant_world, RunConfig(seed=5), {"SDS1": "UDA3"})
        n_excluded = sum(r.final_class == EXCLUDED for r in report.results)
        n_analyzed = sum(r.final_class in (CONSTANT_RETURNS, INCREASING_RETURNS) for r in report.results)
        assert n_excluded + n_analyzed == len(report.results)
        for r in report.results:
            if r.final_class == INCREASING_RETURNS:
                assert r.size_prod_assoc.tau_b > 0

    def test_summary_totals(self, concordant_world):
        report = run_analysis(concordant_world, RunConfig(seed=5), {"SDS1": "UDA3"})
        for analysis in ("top", "inactive", "size_prod"):
            rows = [r for r in report.summary if r.analysis == analysis]
            total = next(r for r in rows if r.uda_id == "TOTAL")
            assert total.n_sds == sum(r.n_sds for r in rows if r.uda_id != "TOTAL")
            assert total.n_significant == sum(r.n_significant for r in rows if r.uda_id != "TOTAL")

    def test_deterministic_across_jobs(self, concordant_world):
        one = run_analysis(concordant_world, RunConfig(seed=5, jobs=1), {"SDS1": "UDA3"})
        two = run_analysis(concordant_world, RunConfig(seed=5, jobs=4), {"SDS1": "UDA3"})
        assert one.results == two.results
        assert one.increasing == two.increasing

    def test_alpha_monotone(self, concordant_world):
        tight = run_analysis(concordant_world, RunConfig(seed=5, alpha=0.05), {"SDS1": "UDA3"})
        loose = run_analysis(concordant_world, RunConfig(seed=5, alpha=0.2), {"SDS1": "UDA3"})

        def significant_set(report):
            return {
                r.sds_id
                for r in report.results
                if r.size_prod_assoc is not None and r.size_prod_assoc.significant
            }

        assert significant_set(tight) <= significant_set(loose)


class TestReportOutput:
    def test_files_written(self, tmp_path, concordant_world):
        report = run_analysis(concordant_world, RunConfig(seed=5), {"SDS1": "UDA3"})
        write_report(report, tmp_path)
        assert (tmp_path / "report_summary.csv").exists()
        assert (tmp_path / "report_increasing.csv").exists()
        assert (tmp_path / "frames.csv").exists()
        assert (tmp_path / "plots" / "SDS1_box.csv").exists()
        assert (tmp_path / "plots" / "SDS1_loess.csv").exists()

        with open(tmp_path / "report_increasing.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert rows[0]["sds_id"] == "SDS1"
        assert float(rows[0]["tau_b"]) == pytest.approx(0.25)
        assert rows[0]["stars"] == "*"

        with open(tmp_path / "plots" / "SDS1_loess.csv", newline="") as fh:
            loess_rows = list(csv.DictReader(fh))
        assert len(loess_rows) == 48
        assert set(r["is_outlier"] for r in loess_rows) <= {"0", "1"}

        with open(tmp_path / "plots" / "SDS1_box.csv", newline="") as fh:
            box_rows = list(csv.DictReader(fh))
        assert [r["quartile"] for r in box_rows] == ["1", "2", "3", "4"]
        assert sum(int(r["n"]) for r in box_rows) == 48

    def test_summary_table_text(self, concordant_world):
        report = run_analysis(concordant_world, RunConfig(seed=5), {"SDS1": "UDA3"})
        text = format_summary_table(report)
        assert "UDA3" in text
        assert "TOTAL" in text
        assert "increasing returns" in text


def test_sds_seed_stable():
    assert derive_sds_seed(42, "S001") == derive_sds_seed(42, "S001")
    assert derive_sds_seed(42, "S001") != derive_sds_seed(42, "S002")
    assert derive_sds_seed(42, "S001") != derive_sds_seed(43, "S001")
