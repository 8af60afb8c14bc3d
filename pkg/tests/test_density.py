import math

import numpy as np
import pytest
from scipy.integrate import quad

import winf.presets as presets
from winf import (DomainError, ModelAssumptionError, ModelSpecError,
                  build_evaluator, cdf_eval, mass_of_interval,
                  model_from_dict, quantile_eval, validate_model)


def _quad_cdf(F, x):
    """Independent quadrature oracle for the CDF, split at breakpoints."""
    pts = sorted({p.lo for p in F.model.pieces} | {p.hi for p in F.model.pieces})
    total = 0.0
    for a, b in zip(pts, pts[1:]):
        if a >= x:
            break
        hi = min(b, x)
        val, _ = quad(lambda t: float(F.density(np.array([t]))[0]),
                      a, hi, limit=200, epsabs=1e-13, epsrel=1e-13)
        total += val
    return total


def _bisect_quantile(F, y, tol=1e-14):
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if F.cdf(mid) >= y:
            hi = mid
        else:
            lo = mid
    return hi


class TestValidation:
    def test_uniform_lower_bounded(self, uniform_F):
        rep = validate_model(uniform_F.model)
        assert rep.passed
        assert rep.applies_lower_bounded
        assert rep.lambda_lower == pytest.approx(1.0)

    def test_gap_is_no_convergence_regime(self):
        rep = validate_model(model_from_dict(presets.gap()))
        assert rep.no_convergence
        assert not rep.passed

    def test_tent_polynomial_zero(self, tent_F):
        rep = validate_model(tent_F.model)
        assert rep.passed
        assert rep.applies_polynomial_zeros
        assert not rep.applies_lower_bounded
        assert rep.k_max == 1
        z = tent_F.model.zeros[0]
        assert z.lower_coeff == pytest.approx(4.0)
        assert z.upper_coeff == pytest.approx(4.0)

    def test_tent_envelope_grid(self, tent_F):
        # envelope check at 1e4 points on the declared neighborhood
        z = tent_F.model.zeros[0]
        grid = np.linspace(z.location - z.radius, z.location + z.radius, 10_000)
        rho = tent_F.density(grid)
        dist = np.abs(z.location - grid) ** z.order
        assert np.all(rho >= z.lower_coeff * dist * (1 - 1e-9) - 1e-12)
        assert np.all(rho <= z.upper_coeff * dist * (1 + 1e-9) + 1e-12)

    def test_mixed_model_regimes(self, mixed_F):
        rep = validate_model(mixed_F.model)
        assert rep.passed
        assert rep.applies_mixed
        assert not rep.applies_polynomial_zeros   # unbounded above
        assert math.isinf(rep.upper)

    def test_inverse_sqrt_lower_bounded(self, invsqrt_F):
        rep = validate_model(invsqrt_F.model)
        assert rep.applies_lower_bounded
        assert rep.lambda_lower == pytest.approx(0.5)

    def test_malformed_interval_is_structural_error(self):
        spec = {"pieces": [{"interval": [0.0, 0.4],
                            "form": {"kind": "constant", "value": 1.0}},
                           {"interval": [0.5, 1.0],
                            "form": {"kind": "constant", "value": 1.0}}]}
        with pytest.raises(ModelSpecError):
            model_from_dict(spec)

    def test_reversed_interval_rejected(self):
        spec = {"pieces": [{"interval": [0.7, 0.2],
                            "form": {"kind": "constant", "value": 1.0}}]}
        with pytest.raises(ModelSpecError):
            model_from_dict(spec)

    def test_force_accept_needed_for_gap(self):
        model = model_from_dict(presets.gap())
        with pytest.raises(ModelAssumptionError):
            build_evaluator(model)
        F = build_evaluator(model, force=True)
        assert F.forced

    def test_negative_density_rejected(self):
        spec = {"pieces": [{"interval": [0.0, 1.0],
                            "form": {"kind": "polynomial",
                                     "coefficients": [0.2, -1.0]}}]}
        model = model_from_dict(spec)
        with pytest.raises(ModelSpecError):
            build_evaluator(model, force=True)


class TestCdf:
    def test_uniform_identity(self, uniform_F):
        assert cdf_eval(uniform_F, 0.3) == pytest.approx(0.3, abs=1e-15)

    def test_tent_closed_form(self, tent_F):
        # F(x) = 2x - 2x^2 on the left half
        assert cdf_eval(tent_F, 0.25) == pytest.approx(0.375, abs=1e-12)
        assert cdf_eval(tent_F, 0.5) == pytest.approx(0.5, abs=1e-12)

    @pytest.mark.parametrize("x", [0.1, 0.25, 0.4999, 0.5, 0.77, 1.0])
    def test_tent_vs_quadrature(self, tent_F, x):
        assert cdf_eval(tent_F, x) == pytest.approx(_quad_cdf(tent_F, x),
                                                    abs=1e-10)

    @pytest.mark.parametrize("x", [0.05, 0.25, 0.3, 0.9])
    def test_mixed_vs_quadrature(self, mixed_F, x):
        assert cdf_eval(mixed_F, x) == pytest.approx(_quad_cdf(mixed_F, x),
                                                     abs=1e-10)

    def test_domain_error(self, uniform_F):
        with pytest.raises(DomainError):
            cdf_eval(uniform_F, 1.2)
        with pytest.raises(DomainError):
            cdf_eval(uniform_F, -0.1)


class TestQuantile:
    def test_uniform(self, uniform_F):
        assert quantile_eval(uniform_F, 0.7) == pytest.approx(0.7, abs=1e-15)

    def test_tent_inversion(self, tent_F):
        # invert 2x - 2x^2 = y; bisection oracle at 1e-14
        got = quantile_eval(tent_F, 0.375)
        assert got == pytest.approx(0.25, abs=1e-12)
        assert got == pytest.approx(_bisect_quantile(tent_F, 0.375), abs=1e-12)

    def test_gap_generalized_inverse(self, gap_F):
        assert quantile_eval(gap_F, 0.5) == pytest.approx(1.0 / 3.0, abs=1e-9)

    def test_endpoints(self, tent_F, gap_F):
        for F in (tent_F, gap_F):
            assert quantile_eval(F, 0.0) == 0.0
            assert quantile_eval(F, 1.0) == 1.0

    def test_domain_error(self, tent_F):
        with pytest.raises(DomainError):
            quantile_eval(tent_F, -0.01)
        with pytest.raises(DomainError):
            quantile_eval(tent_F, 1.01)

    def test_residual_tolerance(self, tent_F, mixed_F, invsqrt_F):
        ys = np.linspace(0.0, 1.0, 2001)
        for F in (tent_F, mixed_F, invsqrt_F):
            xs = F.quantile(ys)
            assert np.max(np.abs(F.cdf(xs) - ys)) <= 1e-12


class TestMass:
    def test_uniform(self, uniform_F):
        assert mass_of_interval(uniform_F, 0.2, 0.5) == pytest.approx(0.3)

    def test_tent_symmetry(self, tent_F):
        assert mass_of_interval(tent_F, 0.0, 0.5) == pytest.approx(0.5)
        assert mass_of_interval(tent_F, 0.25, 0.75) == pytest.approx(0.25)

    def test_order_error(self, tent_F):
        with pytest.raises(DomainError):
            mass_of_interval(tent_F, 0.6, 0.4)

    def test_normalization(self, uniform_F, tent_F, quad_F, invsqrt_F, mixed_F):
        for F in (uniform_F, tent_F, quad_F, invsqrt_F, mixed_F):
            assert mass_of_interval(F, 0.0, 1.0) == pytest.approx(1.0,
                                                                  abs=1e-10)


class TestInvariants:
    def test_monotone_cdf(self, tent_F, mixed_F, invsqrt_F, gap_F):
        grid = np.linspace(0.0, 1.0, 4001)
        for F in (tent_F, mixed_F, invsqrt_F, gap_F):
            vals = F.cdf(grid)
            assert np.all(np.diff(vals) >= -1e-15)

    def test_round_trip(self, tent_F, mixed_F, invsqrt_F):
        ys = np.linspace(0.0, 1.0, 1201)
        for F in (tent_F, mixed_F, invsqrt_F):
            assert np.max(np.abs(F.cdf(F.quantile(ys)) - ys)) <= 1e-10

    def test_density_interval_bounds(self, tent_F):
        # analytic extrema agree with dense sampling
        inf_v = tent_F.density_inf(0.3, 0.6)
        sup_v = tent_F.density_sup(0.3, 0.6)
        grid = np.linspace(0.3, 0.6, 5001)
        vals = tent_F.density(grid)
        assert inf_v <= vals.min() + 1e-12
        assert sup_v >= vals.max() - 1e-12
        assert inf_v == pytest.approx(0.0, abs=1e-15)
        assert sup_v == pytest.approx(0.8)


class TestPolynomialPieces:
    @pytest.fixture(scope="class")
    def poly_F(self):
        # 6x(1-x) hump, unnormalized on purpose
        spec = {"name": "poly-hump",
                "pieces": [{"interval": [0.0, 1.0],
                            "form": {"kind": "polynomial",
                                     "coefficients": [0.5, 6.0, -6.0]}}]}
        return build_evaluator(model_from_dict(spec), force=True)

    def test_quadrature_agreement(self, poly_F):
        for x in (0.2, 0.5, 0.9):
            assert poly_F.cdf(x) == pytest.approx(_quad_cdf(poly_F, x),
                                                  abs=1e-10)

    def test_newton_inversion(self, poly_F):
        ys = np.linspace(0.0, 1.0, 501)
        xs = poly_F.quantile(ys)
        assert np.max(np.abs(poly_F.cdf(xs) - ys)) <= 1e-12

    def test_scaling_folds_into_coefficients(self):
        base = presets.tent()
        scaled = presets.tent()
        scaled["pieces"][0]["form"]["coefficient"] = 12.0  # 3x the shape
        scaled["zeros"][0]["lower_coeff"] = 12.0
        scaled["zeros"][0]["upper_coeff"] = 12.0
        F1 = build_evaluator(model_from_dict(base))
        F2 = build_evaluator(model_from_dict(scaled))
        ys = np.linspace(0.0, 1.0, 101)
        assert np.allclose(F1.quantile(ys), F2.quantile(ys), atol=1e-14)
        assert F2.model.normalization == pytest.approx(3.0)
