import csv
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from winf import (DomainError, EmpiricalMeasure, SeedSpec, derive_stream_seed,
                  dkw_tail, draw_samples, empirical_quantile, ks_statistic)
from winf.sampling import write_sample_csv


def _manual_em(values):
    arr = np.array(sorted(values), dtype=float)
    return EmpiricalMeasure(samples=arr, n=len(arr), seed=SeedSpec(0),
                            model_id="manual")


class TestSeeds:
    def test_streams_are_distinct(self):
        seeds = {derive_stream_seed(123, i) for i in range(10_000)}
        assert len(seeds) == 10_000

    def test_negative_stream_rejected(self):
        with pytest.raises(DomainError):
            derive_stream_seed(1, -1)

    def test_spec_matches_function(self):
        assert SeedSpec(9, 4).stream_seed() == derive_stream_seed(9, 4)


class TestDrawSamples:
    def test_deterministic(self, uniform_F):
        a = draw_samples(uniform_F, 3, SeedSpec(7))
        b = draw_samples(uniform_F, 3, SeedSpec(7))
        assert np.array_equal(a.samples, b.samples)
        c = draw_samples(uniform_F, 3, SeedSpec(7, stream_index=1))
        assert not np.array_equal(a.samples, c.samples)

    def test_sorted_in_open_interval(self, tent_F):
        em = draw_samples(tent_F, 10_000, SeedSpec(11))
        assert np.all(np.diff(em.samples) >= 0.0)
        assert em.samples[0] > 0.0 and em.samples[-1] < 1.0
        assert em.n == 10_000
        assert em.model_id == "tent"

    def test_uniform_mean_sanity(self, uniform_F):
        em = draw_samples(uniform_F, 100_000, SeedSpec(5))
        assert abs(float(em.samples.mean()) - 0.5) < 0.01

    def test_zero_size_rejected(self, uniform_F):
        with pytest.raises(DomainError):
            draw_samples(uniform_F, 0, SeedSpec(1))

    def test_unsorted_measure_rejected(self):
        with pytest.raises(DomainError):
            EmpiricalMeasure(samples=np.array([0.5, 0.2]), n=2,
                             seed=SeedSpec(0), model_id="bad")


class TestEmpiricalQuantile:
    def test_single_atom(self):
        em = _manual_em([0.4])
        assert empirical_quantile(em, 0.7) == 0.4

    def test_two_atom_step(self):
        em = _manual_em([0.2, 0.9])
        assert empirical_quantile(em, 0.5) == 0.2
        assert empirical_quantile(em, 0.51) == 0.9

    def test_four_atoms(self):
        em = _manual_em([0.1, 0.2, 0.3, 0.4])
        assert empirical_quantile(em, 0.75) == 0.3

    def test_domain(self):
        em = _manual_em([0.5])
        with pytest.raises(DomainError):
            empirical_quantile(em, 0.0)
        with pytest.raises(DomainError):
            empirical_quantile(em, 1.5)

    @given(st.lists(st.floats(min_value=1e-6, max_value=1 - 1e-6),
                    min_size=1, max_size=12),
           st.floats(min_value=1e-9, max_value=1.0))
    @settings(max_examples=200, deadline=None)
    def test_matches_enumeration(self, values, y):
        em = _manual_em(values)
        expected = None
        n = em.n
        for i in range(1, n + 1):
            if (i - 1) / n < y <= i / n:
                expected = em.samples[i - 1]
                break
        assert empirical_quantile(em, y) == expected


class TestKsStatistic:
    def test_single_midpoint(self, uniform_F):
        assert ks_statistic(_manual_em([0.5]), uniform_F) == pytest.approx(0.5)

    def test_quantile_midpoints(self, uniform_F):
        n = 8
        em = _manual_em([(2 * i - 1) / (2 * n) for i in range(1, n + 1)])
        assert ks_statistic(em, uniform_F) == pytest.approx(1 / (2 * n))

    def test_extreme_atom(self, uniform_F):
        assert ks_statistic(_manual_em([0.999]), uniform_F) == pytest.approx(0.999)

    def test_against_scipy(self, tent_F):
        em = draw_samples(tent_F, 500, SeedSpec(3))
        ours = ks_statistic(em, tent_F)
        ref = stats.kstest(np.asarray(em.samples),
                           lambda x: tent_F.cdf(np.asarray(x))).statistic
        assert ours == pytest.approx(float(ref), abs=1e-12)


class TestDistributionalProperties:
    def test_probability_integral_transform(self, tent_F):
        em = draw_samples(tent_F, 2000, SeedSpec(17))
        u = tent_F.cdf(em.samples)
        stat = stats.kstest(np.asarray(u), "uniform").statistic
        # 1% critical value for the KS statistic
        assert stat < 1.63 / math.sqrt(2000)

    def test_dkw_coverage_small(self, uniform_F):
        n, t, trials = 200, 0.07, 600
        hits = 0
        for trial in range(trials):
            em = draw_samples(uniform_F, n, SeedSpec(99, stream_index=trial))
            if ks_statistic(em, uniform_F) >= t:
                hits += 1
        cap = dkw_tail(n, t)
        slack = 3.0 * math.sqrt(cap * (1 - cap) / trials)
        assert hits / trials <= cap + slack


class TestCsv:
    def test_header_and_round_trip(self, uniform_F, tmp_path):
        em = draw_samples(uniform_F, 5, SeedSpec(2))
        path = tmp_path / "samples.csv"
        write_sample_csv(path, [(0, em), (1, em)])
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["trial", "index", "value"]
        assert len(rows) == 1 + 2 * 5
        back = np.array([float(r[2]) for r in rows[1:6]])
        assert np.array_equal(back, em.samples)
