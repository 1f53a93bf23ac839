import pytest

from degraforge import MetricTable, compute_gap, render_gap_csv, render_gap_markdown
from degraforge.gap import GapError, parse_gap_csv

# Classical x4 blind-SR table: one-branch blind network vs per-case upper bounds.
CLASSICAL_CASES = ["bic", "0.6", "1.2", "1.8", "2.4"]
METHOD_PSNR = [26.51, 27.25, 28.07, 28.42, 28.43]
UPPER_PSNR = [26.75, 27.46, 28.43, 28.71, 28.74]
EXPECTED_DELTAS = [0.24, 0.21, 0.36, 0.29, 0.31]


def classical_tables():
    method = dict(zip(CLASSICAL_CASES, METHOD_PSNR))
    upper = dict(zip(CLASSICAL_CASES, UPPER_PSNR))
    return method, upper


class TestComputeGap:
    def test_classical_table_deltas(self):
        gap = compute_gap(*classical_tables())
        assert [r.case for r in gap.rows] == CLASSICAL_CASES
        for row, expected in zip(gap.rows, EXPECTED_DELTAS):
            assert abs(row.delta - expected) < 1e-9

    def test_argmax_case_and_summary(self):
        gap = compute_gap(*classical_tables())
        assert gap.argmax_case == "1.2"
        assert abs(gap.max_delta - 0.36) < 1e-9
        assert abs(gap.mean_delta - sum(EXPECTED_DELTAS) / 5) < 1e-9

    def test_identical_tables_give_zero_deltas(self):
        method, _ = classical_tables()
        gap = compute_gap(method, method)
        assert all(r.delta == 0.0 for r in gap.rows)

    def test_antisymmetry(self):
        method, upper = classical_tables()
        forward = compute_gap(method, upper)
        backward = compute_gap(upper, method)
        for f, b in zip(forward.rows, backward.rows):
            assert f.delta == -b.delta

    def test_negative_delta_not_clamped(self):
        # method beating its upper bound must stay negative (e.g. 25.55 vs 25.13)
        gap = compute_gap({"bic": 25.55}, {"bic": 25.13})
        assert gap.rows[0].delta == pytest.approx(-0.42)

    def test_uncompared_cases_listed(self):
        gap = compute_gap({"bic": 25.0, "x": 1.0}, {"bic": 25.5, "y": 2.0})
        assert gap.uncompared == ("x", "y")
        assert [r.case for r in gap.rows] == ["bic"]

    def test_disjoint_tables_rejected(self):
        with pytest.raises(GapError):
            compute_gap({"a": 1.0}, {"b": 2.0})

    def test_accepts_metric_tables(self):
        text = "case,n_images,psnr_mean,ssim_mean\nbic,3,24.63,\n"
        method = MetricTable.from_csv(text)
        upper = MetricTable.from_csv("case,n_images,psnr_mean,ssim_mean\nbic,3,26.36,\n")
        gap = compute_gap(method, upper)
        assert gap.rows[0].delta == pytest.approx(26.36 - 24.63)


class TestRendering:
    def test_csv_has_data_rows_plus_summary(self):
        gap = compute_gap(*classical_tables())
        lines = render_gap_csv(gap).strip().splitlines()
        assert len(lines) == 1 + 5 + 1  # header, data, summary
        assert lines[0] == "case,method_psnr,upper_psnr,delta"
        assert lines[-1].startswith("summary,")
        assert "argmax=1.2" in lines[-1]

    def test_csv_roundtrip_to_1e9(self):
        gap = compute_gap(*classical_tables())
        parsed = parse_gap_csv(render_gap_csv(gap))
        for original, reparsed in zip(gap.rows, parsed.rows):
            assert abs(original.method_psnr - reparsed.method_psnr) < 1e-9
            assert abs(original.upper_psnr - reparsed.upper_psnr) < 1e-9
            assert abs(original.delta - reparsed.delta) < 1e-9

    def test_markdown_mentions_summary(self):
        gap = compute_gap(*classical_tables())
        md = render_gap_markdown(gap)
        assert "| 1.2 |" in md
        assert "max delta 0.36" in md
