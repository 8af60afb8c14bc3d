import itertools
import math

import numpy as np
import pytest

import winf.presets as presets
from winf import (DomainError, EmpiricalMeasure, SeedSpec, build_evaluator,
                  draw_samples, full_report, ks_statistic, model_from_dict,
                  w1_empirical, winf_discrete, winf_empirical)


def _manual_em(values):
    arr = np.array(sorted(values), dtype=float)
    return EmpiricalMeasure(samples=arr, n=len(arr), seed=SeedSpec(0),
                            model_id="manual")


def _grid_sup(F, em, points=1_000_000):
    """Brute-force sup of |F^{-1}(y) - F_n^{-1}(y)| on a dense y-grid."""
    y = np.arange(1, points + 1, dtype=float) / points
    fq = F.quantile(y)
    idx = np.minimum(np.ceil(y * em.n).astype(int), em.n) - 1
    eq = em.samples[np.maximum(idx, 0)]
    return float(np.max(np.abs(fq - eq)))


class TestWinfEmpirical:
    def test_single_sample_uniform(self, uniform_F):
        em = _manual_em([0.3])
        rep = winf_empirical(uniform_F, em)
        assert rep.w_infinity == pytest.approx(0.7, abs=1e-12)
        assert rep.argmax_endpoint == "right"
        assert _grid_sup(uniform_F, em) == pytest.approx(0.7, abs=1e-5)

    def test_two_samples_uniform(self, uniform_F):
        em = _manual_em([0.25, 0.75])
        rep = winf_empirical(uniform_F, em)
        assert rep.w_infinity == pytest.approx(0.25, abs=1e-12)
        assert _grid_sup(uniform_F, em) == pytest.approx(0.25, abs=1e-5)

    @pytest.mark.parametrize("seed", range(12))
    def test_grid_oracle_equivalence(self, uniform_F, tent_F, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 9))
        F = tent_F if seed % 2 else uniform_F
        em = _manual_em(rng.uniform(0.01, 0.99, size=n))
        rep = winf_empirical(F, em)
        assert rep.w_infinity == pytest.approx(_grid_sup(F, em, 200_000),
                                               abs=2e-5)

    def test_gap_counterexample_single(self, gap_F):
        em = draw_samples(gap_F, 101, SeedSpec(12))
        left = int(np.sum(em.samples < 1.0 / 3.0))
        assert left != 50.5  # odd n: block count can never split evenly
        rep = winf_empirical(gap_F, em)
        assert rep.w_infinity >= 1.0 / 3.0 - 1e-9

    def test_diameter_bound(self, tent_F, gap_F):
        for F in (tent_F, gap_F):
            for seed in range(5):
                em = draw_samples(F, 64, SeedSpec(seed))
                assert winf_empirical(F, em).w_infinity <= 1.0

    def test_quantile_lipschitz_bound(self, uniform_F, invsqrt_F):
        # deterministic consequence of a density lower bound:
        # the quantile sup gap is at most the CDF sup gap over lambda
        for F in (uniform_F, invsqrt_F):
            lam = F.model.lower_bound
            for seed in range(10):
                em = draw_samples(F, 256, SeedSpec(seed))
                w = winf_empirical(F, em).w_infinity
                assert w <= ks_statistic(em, F) / lam + 1e-12

    def test_empty_rejected(self, uniform_F):
        with pytest.raises((DomainError, ValueError)):
            EmpiricalMeasure(samples=np.array([]), n=0, seed=SeedSpec(0),
                             model_id="x")


class TestW1Empirical:
    def test_single_sample_closed_form(self, uniform_F):
        for x in (0.5, 0.3, 0.9):
            em = _manual_em([x])
            expect = x * x / 2 + (1 - x) ** 2 / 2
            assert w1_empirical(uniform_F, em) == pytest.approx(expect,
                                                                abs=1e-12)

    def test_quantile_midpoints(self, uniform_F):
        n = 16
        em = _manual_em([(2 * i - 1) / (2 * n) for i in range(1, n + 1)])
        assert w1_empirical(uniform_F, em) == pytest.approx(1 / (4 * n),
                                                            abs=1e-12)

    @pytest.mark.parametrize("seed", range(6))
    def test_riemann_oracle(self, tent_F, seed):
        em = draw_samples(tent_F, 37, SeedSpec(seed))
        xs = np.linspace(0.0, 1.0, 2_000_001)
        fn = np.searchsorted(em.samples, xs, side="right") / em.n
        gap = np.abs(tent_F.cdf(xs) - fn)
        riemann = float(np.trapezoid(gap, xs))
        assert w1_empirical(tent_F, em) == pytest.approx(riemann, abs=2e-6)

    def test_dominated_by_winf(self, tent_F, mixed_F):
        for F in (tent_F, mixed_F):
            for seed in range(8):
                em = draw_samples(F, 100, SeedSpec(seed))
                assert w1_empirical(F, em) <= winf_empirical(
                    F, em).w_infinity + 1e-12


class TestWinfDiscrete:
    def test_identity(self):
        xs = np.sort(np.random.default_rng(0).uniform(size=6))
        assert winf_discrete(xs, xs) == 0.0

    def test_small_example(self):
        assert winf_discrete([0.1, 0.9], [0.2, 0.8]) == pytest.approx(0.1)

    def test_symmetry(self):
        rng = np.random.default_rng(4)
        xs = np.sort(rng.uniform(size=5))
        ys = np.sort(rng.uniform(size=5))
        assert winf_discrete(xs, ys) == winf_discrete(ys, xs)

    @pytest.mark.parametrize("seed", range(10))
    def test_permutation_oracle(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 8))
        xs = np.sort(rng.uniform(size=n))
        ys = np.sort(rng.uniform(size=n))
        brute = min(max(abs(xs[p[i]] - ys[i]) for i in range(n))
                    for p in itertools.permutations(range(n)))
        assert winf_discrete(xs, ys) == pytest.approx(brute, abs=1e-15)

    def test_length_mismatch(self):
        with pytest.raises(DomainError):
            winf_discrete([0.1], [0.1, 0.2])

    def test_unsorted_rejected(self):
        with pytest.raises(DomainError):
            winf_discrete([0.5, 0.1], [0.1, 0.5])


class TestReport:
    def test_full_report_fields(self, tent_F):
        em = draw_samples(tent_F, 50, SeedSpec(9))
        rep = full_report(tent_F, em)
        assert rep.w_one is not None and rep.w_one <= rep.w_infinity + 1e-12
        d = rep.to_dict()
        assert set(d) == {"n", "w_infinity", "w_one", "argmax_index",
                          "argmax_endpoint"}
        assert 1 <= d["argmax_index"] <= em.n
        assert d["argmax_endpoint"] in ("left", "right")

    def test_scaling_invariance(self):
        # same shape scaled by 3: normalization folds the factor away and
        # every distance is unchanged
        base = build_evaluator(model_from_dict(presets.tent()))
        scaled_spec = presets.tent()
        scaled_spec["pieces"][0]["form"]["coefficient"] = 12.0
        scaled_spec["zeros"][0]["lower_coeff"] = 12.0
        scaled_spec["zeros"][0]["upper_coeff"] = 12.0
        scaled = build_evaluator(model_from_dict(scaled_spec))
        em1 = draw_samples(base, 200, SeedSpec(21))
        em2 = draw_samples(scaled, 200, SeedSpec(21))
        assert np.allclose(em1.samples, em2.samples, atol=1e-14)
        assert winf_empirical(base, em1).w_infinity == pytest.approx(
            winf_empirical(scaled, em2).w_infinity, abs=1e-13)
        assert w1_empirical(base, em1) == pytest.approx(
            w1_empirical(scaled, em2), abs=1e-13)
