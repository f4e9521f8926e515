"""Distribution kernels checked against scipy as an independent
high-precision oracle over fixed probe grids."""

import numpy as np
import pytest
from scipy import stats as scipy_stats

from playinsight.stats import (
    chi2_cdf,
    chi2_sf,
    f_sf,
    norm_cdf,
    norm_ppf,
    norm_sf,
    studentized_range_cdf,
    studentized_range_crit,
    studentized_range_sf,
)

TOL = 1e-6


class TestNormal:
    @pytest.mark.parametrize("x", [-8.0, -3.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.683, 8.0])
    def test_cdf_probe_grid(self, x):
        assert norm_cdf(x) == pytest.approx(scipy_stats.norm.cdf(x), abs=TOL)
        assert norm_sf(x) == pytest.approx(scipy_stats.norm.sf(x), abs=TOL)

    @pytest.mark.parametrize("p", [1e-6, 0.01, 0.25, 0.5, 0.75, 0.975, 1 - 1e-6])
    def test_ppf_probe_grid(self, p):
        assert norm_ppf(p) == pytest.approx(scipy_stats.norm.ppf(p), abs=1e-8)

    def test_ppf_domain(self):
        with pytest.raises(ValueError):
            norm_ppf(0.0)


class TestChiSquare:
    @pytest.mark.parametrize("x", [0.01, 0.5, 3.6, 7.2, 20.0, 80.0])
    @pytest.mark.parametrize("df", [1, 2, 3, 7, 28, 115])
    def test_sf_probe_grid(self, x, df):
        assert chi2_sf(x, df) == pytest.approx(scipy_stats.chi2.sf(x, df), abs=TOL)
        assert chi2_cdf(x, df) == pytest.approx(scipy_stats.chi2.cdf(x, df), abs=TOL)

    def test_df2_closed_form(self):
        # chi-square with 2 df: SF(x) = exp(-x/2)
        assert chi2_sf(7.2, 2) == pytest.approx(np.exp(-3.6), abs=1e-12)

    def test_edges(self):
        assert chi2_sf(0.0, 4) == 1.0
        assert chi2_cdf(0.0, 4) == 0.0


class TestF:
    @pytest.mark.parametrize("f", [0.05, 0.5, 1.0, 4.0, 8.0, 46.343])
    @pytest.mark.parametrize("dfs", [(1, 2), (3, 112), (2, 27), (7, 100), (1, 1)])
    def test_sf_probe_grid(self, f, dfs):
        d1, d2 = dfs
        assert f_sf(f, d1, d2) == pytest.approx(scipy_stats.f.sf(f, d1, d2), abs=TOL)

    def test_f_1_2_closed_form(self):
        # F(1,2) survival has the closed form 1 - sqrt(f/(f+2))... checked at 8:
        # SF(8) = 1 - sqrt(0.8) = 0.10557...
        assert f_sf(8.0, 1, 2) == pytest.approx(1 - np.sqrt(0.8), abs=1e-12)

    def test_edges(self):
        assert f_sf(0.0, 3, 10) == 1.0
        assert f_sf(float("inf"), 3, 10) == 0.0


class TestStudentizedRange:
    @pytest.mark.parametrize("q", [0.5, 2.0, 3.0, 3.958, 5.0, 8.0])
    @pytest.mark.parametrize("k_df", [(2, 10), (3, 20), (4, 20), (4, 60), (4, 112), (8, 40)])
    def test_cdf_probe_grid(self, q, k_df):
        k, df = k_df
        assert studentized_range_cdf(q, k, df) == pytest.approx(
            scipy_stats.studentized_range.cdf(q, k, df), abs=TOL
        )

    def test_sf_at_zero(self):
        assert studentized_range_sf(0.0, 4, 20) == 1.0

    def test_k2_reduces_to_student_t(self):
        # For two groups, Q = |t| * sqrt(2); check against the t distribution.
        q = 3.0
        df = 30
        expected = 2 * scipy_stats.t.sf(q / np.sqrt(2), df)
        assert studentized_range_sf(q, 2, df) == pytest.approx(expected, abs=TOL)

    # Critical values as printed in standard 5% studentized-range tables.
    @pytest.mark.parametrize(
        "k,df,published",
        [(4, 20, 3.96), (4, 60, 3.74), (4, 120, 3.69)],
    )
    def test_published_q_table(self, k, df, published):
        assert studentized_range_crit(0.05, k, df) == pytest.approx(published, abs=0.01)

    def test_crit_inverts_sf(self):
        q = studentized_range_crit(0.05, 3, 25)
        assert studentized_range_sf(q, 3, 25) == pytest.approx(0.05, abs=1e-7)

    def test_domain_checks(self):
        with pytest.raises(ValueError):
            studentized_range_cdf(1.0, 1, 10)
        with pytest.raises(ValueError):
            studentized_range_crit(1.5, 3, 10)
