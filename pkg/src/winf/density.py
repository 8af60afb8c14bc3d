"""Piecewise-analytic probability densities on the open unit interval.

A density model is an ordered list of pieces tiling ``(0, 1)``.  Each piece
carries one analytic form: a constant, a shifted power ``c * |x - s|**p``
with ``p > -1``, or a polynomial in ``x``.  The builder normalizes the
supplied shape to unit mass, so users declare an unnormalized shape;
declared envelope constants, bounds and singular coefficients are rescaled
by the same factor.

CDF values are exact per-piece antiderivatives and quantiles invert those
antiderivatives piece by piece.  Integrable singularities (``p`` in
``(-1, 0)``) are integrated in closed form in the substituted variable
``u = |x - s|**(p + 1)``; no quadrature runs across a singular point.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import DomainError, ModelAssumptionError, ModelSpecError

__all__ = [
    "ConstantForm",
    "PowerForm",
    "PolynomialForm",
    "Piece",
    "ZeroPoint",
    "SingularPoint",
    "DensityModel",
    "ValidationReport",
    "CdfEvaluator",
    "model_from_dict",
    "load_model",
    "validate_model",
    "build_evaluator",
    "cdf_eval",
    "quantile_eval",
    "mass_of_interval",
]

# Tolerances shared by the evaluator and the validator.
MASS_TOL = 1e-10            # total-mass / tiling mass checks
QUANTILE_RESIDUAL = 1e-12   # |F(x) - y| target for quantile inversion
EDGE_TOL = 1e-12            # piece tiling gap/overlap tolerance
NEWTON_DENSITY_FLOOR = 1e-6  # below this density the solver bisects


# ---------------------------------------------------------------------------
# analytic piece forms

@dataclass(frozen=True)
class ConstantForm:
    """Density ``rho(x) = value`` on a piece."""

    value: float

    def density(self, x):
        return np.full_like(np.asarray(x, dtype=float), self.value)

    def mass(self, a, b):
        return self.value * (np.asarray(b, dtype=float) - a)

    def mass_integral(self, a, b):
        # integral over (a, b) of mass(a, t) dt
        d = np.asarray(b, dtype=float) - a
        return 0.5 * self.value * d * d

    def invert_mass(self, a, m):
        m = np.asarray(m, dtype=float)
        if self.value <= 0.0:
            return np.full_like(m, a)
        return a + m / self.value

    def bounds_on(self, a, b):
        return self.value, self.value

    def scaled(self, factor):
        return ConstantForm(self.value * factor)


@dataclass(frozen=True)
class PowerForm:
    """Density ``rho(x) = coefficient * |x - center|**exponent``.

    ``exponent > -1`` keeps the form integrable; negative exponents model
    integrable blow-ups and positive integer exponents model polynomial
    zeros.  The antiderivative is
    ``G(x) = c * sign(x - s) * |x - s|**(p + 1) / (p + 1)``.
    """

    coefficient: float
    center: float
    exponent: float

    def _g(self, x):
        x = np.asarray(x, dtype=float)
        u = x - self.center
        p1 = self.exponent + 1.0
        return self.coefficient * np.sign(u) * np.abs(u) ** p1 / p1

    def density(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            return self.coefficient * np.abs(x - self.center) ** self.exponent

    def mass(self, a, b):
        return self._g(b) - self._g(a)

    def mass_integral(self, a, b):
        a_arr = np.asarray(a, dtype=float)
        b_arr = np.asarray(b, dtype=float)
        p1 = self.exponent + 1.0
        p2 = self.exponent + 2.0
        h = self.coefficient / (p1 * p2)
        term = h * (np.abs(b_arr - self.center) ** p2
                    - np.abs(a_arr - self.center) ** p2)
        return term - self._g(a) * (b_arr - a_arr)

    def invert_mass(self, a, m):
        m = np.asarray(m, dtype=float)
        p1 = self.exponent + 1.0
        g = self._g(a) + m
        u = g * p1 / self.coefficient
        return self.center + np.sign(u) * np.abs(u) ** (1.0 / p1)

    def bounds_on(self, a, b):
        da, db = abs(a - self.center), abs(b - self.center)
        inside = a <= self.center <= b
        dmin = 0.0 if inside else min(da, db)
        dmax = max(da, db)
        c, p = self.coefficient, self.exponent
        if p == 0.0:
            return c, c
        if p > 0.0:
            return c * dmin ** p, c * dmax ** p
        hi = math.inf if dmin == 0.0 else c * dmin ** p
        return c * dmax ** p, hi

    def scaled(self, factor):
        return PowerForm(self.coefficient * factor, self.center, self.exponent)


@dataclass(frozen=True)
class PolynomialForm:
    """Density ``rho(x) = sum_k coefficients[k] * x**k``."""

    coefficients: tuple[float, ...]

    @cached_property
    def _anti(self):
        return npoly.polyint(self.coefficients)

    @cached_property
    def _anti2(self):
        return npoly.polyint(self._anti)

    def density(self, x):
        return npoly.polyval(np.asarray(x, dtype=float), self.coefficients)

    def mass(self, a, b):
        b_arr = np.asarray(b, dtype=float)
        return npoly.polyval(b_arr, self._anti) - npoly.polyval(a, self._anti)

    def mass_integral(self, a, b):
        b_arr = np.asarray(b, dtype=float)
        raw = npoly.polyval(b_arr, self._anti2) - npoly.polyval(a, self._anti2)
        return raw - npoly.polyval(a, self._anti) * (b_arr - a)

    def invert_mass(self, a, m, hi=1.0):
        # Safeguarded Newton seeded by the bracket [a, hi]; bisection keeps
        # the iterate inside and takes over where the density is near zero.
        m = np.atleast_1d(np.asarray(m, dtype=float))
        lo_b = np.full_like(m, a)
        hi_b = np.full_like(m, hi)
        x = 0.5 * (lo_b + hi_b)
        for _ in range(120):
            r = self.mass(a, x) - m
            done = np.abs(r) <= QUANTILE_RESIDUAL
            if done.all():
                break
            pos = r > 0
            hi_b = np.where(pos, x, hi_b)
            lo_b = np.where(pos, lo_b, x)
            d = self.density(x)
            with np.errstate(divide="ignore", invalid="ignore"):
                xn = x - r / d
            use_newton = (d >= NEWTON_DENSITY_FLOOR) & (xn > lo_b) & (xn < hi_b)
            x = np.where(done, x, np.where(use_newton, xn, 0.5 * (lo_b + hi_b)))
        return x

    def bounds_on(self, a, b):
        cand = [a, b]
        deriv = npoly.polyder(self.coefficients)
        if len(deriv) > 1 or (len(deriv) == 1 and deriv[0] != 0.0):
            for r in npoly.polyroots(deriv):
                if abs(r.imag) < 1e-12 and a < r.real < b:
                    cand.append(float(r.real))
        vals = self.density(np.asarray(cand))
        return float(vals.min()), float(vals.max())

    def scaled(self, factor):
        return PolynomialForm(tuple(c * factor for c in self.coefficients))


@dataclass(frozen=True)
class Piece:
    """One tile of the density: an interval and its analytic form."""

    lo: float
    hi: float
    form: ConstantForm | PowerForm | PolynomialForm

    @cached_property
    def mass(self) -> float:
        return float(self.form.mass(self.lo, self.hi))


# ---------------------------------------------------------------------------
# model containers

@dataclass(frozen=True)
class ZeroPoint:
    """An isolated density zero with its polynomial envelope.

    On the neighborhood ``(location - radius, location + radius)`` the
    density is sandwiched between ``lower_coeff * |location - x|**order``
    and ``upper_coeff * |location - x|**order``.
    """

    location: float
    order: int
    lower_coeff: float
    upper_coeff: float
    radius: float


@dataclass(frozen=True)
class SingularPoint:
    """An integrable blow-up ``~ coefficient * |x - location|**exponent``."""

    location: float
    exponent: float
    coefficient: float


@dataclass(frozen=True)
class DensityModel:
    model_id: str
    pieces: tuple[Piece, ...]
    zeros: tuple[ZeroPoint, ...] = ()
    singulars: tuple[SingularPoint, ...] = ()
    lower_bound: float = 0.0
    upper_bound: float = math.inf
    normalization: float = 1.0

    @property
    def k_max(self) -> int | None:
        if not self.zeros:
            return None
        return max(z.order for z in self.zeros)


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of checking a model against the convergence assumptions."""

    model_id: str
    violations: tuple[str, ...]
    no_convergence: bool
    applies_lower_bounded: bool
    applies_polynomial_zeros: bool
    applies_mixed: bool
    lambda_lower: float
    upper: float
    k_max: int | None

    @property
    def passed(self) -> bool:
        return (not self.violations
                and not self.no_convergence
                and (self.applies_lower_bounded
                     or self.applies_polynomial_zeros
                     or self.applies_mixed))

    def to_dict(self) -> dict:
        return {
            "model_id": self.model_id,
            "passed": self.passed,
            "violations": list(self.violations),
            "no_convergence": self.no_convergence,
            "applies_lower_bounded": self.applies_lower_bounded,
            "applies_polynomial_zeros": self.applies_polynomial_zeros,
            "applies_mixed": self.applies_mixed,
            "lambda_lower": self.lambda_lower,
            "upper": None if math.isinf(self.upper) else self.upper,
            "k_max": self.k_max,
        }


# ---------------------------------------------------------------------------
# parsing

def _parse_form(d: dict):
    kind = d.get("kind")
    if kind == "constant":
        v = float(d["value"])
        if v < 0.0:
            raise ModelSpecError("constant piece value must be nonnegative")
        return ConstantForm(v)
    if kind == "power":
        c = float(d["coefficient"])
        p = float(d["exponent"])
        s = float(d["center"])
        if c <= 0.0:
            raise ModelSpecError("power piece coefficient must be positive")
        if p <= -1.0:
            raise ModelSpecError("power piece exponent must exceed -1")
        return PowerForm(c, s, p)
    if kind == "polynomial":
        coeffs = tuple(float(c) for c in d["coefficients"])
        if not coeffs:
            raise ModelSpecError("polynomial piece needs coefficients")
        return PolynomialForm(coeffs)
    raise ModelSpecError(f"unknown piece kind: {kind!r}")


def model_from_dict(spec: dict) -> DensityModel:
    """Build a normalized :class:`DensityModel` from a plain dictionary.

    The dictionary layout matches the on-disk density file documented in
    the README: ``pieces[]`` (each with ``interval`` and ``form``),
    optional ``zeros[]``, ``singulars[]``, ``lower_bound``, ``upper_bound``
    and ``name``.  The shape may be unnormalized: total mass is computed
    once here and folded into every coefficient, envelope constant and
    declared bound.
    """
    raw_pieces = spec.get("pieces")
    if not raw_pieces:
        raise ModelSpecError("model needs at least one piece")

    parsed = []
    for rp in raw_pieces:
        try:
            lo, hi = (float(v) for v in rp["interval"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ModelSpecError(f"malformed piece interval: {rp!r}") from exc
        if not lo < hi:
            raise ModelSpecError(f"piece interval empty or reversed: ({lo}, {hi})")
        parsed.append((lo, hi, _parse_form(rp["form"])))

    parsed.sort(key=lambda t: t[0])
    if abs(parsed[0][0]) > EDGE_TOL or abs(parsed[-1][1] - 1.0) > EDGE_TOL:
        raise ModelSpecError("pieces must span (0, 1)")
    for (_, hi_a, _), (lo_b, _, _) in zip(parsed, parsed[1:]):
        if abs(hi_a - lo_b) > EDGE_TOL:
            raise ModelSpecError(
                f"pieces leave a gap or overlap near x={lo_b!r}")

    # Snap shared breakpoints so the tiling is exact.
    edges = [0.0] + [lo for lo, _, _ in parsed[1:]] + [1.0]
    pieces = tuple(Piece(edges[i], edges[i + 1], form)
                   for i, (_, _, form) in enumerate(parsed))

    total = sum(p.mass for p in pieces)
    if not math.isfinite(total) or total <= 0.0:
        raise ModelSpecError(f"shape has non-normalizable total mass {total!r}")
    scale = 1.0 / total
    pieces = tuple(Piece(p.lo, p.hi, p.form.scaled(scale)) for p in pieces)

    zeros = []
    for z in spec.get("zeros", ()):
        order = int(z["order"])
        loc = float(z["location"])
        radius = float(z["radius"])
        c_lo = float(z["lower_coeff"]) * scale
        c_hi = float(z["upper_coeff"]) * scale
        if order < 1:
            raise ModelSpecError("zero order must be a positive integer")
        if not 0.0 < loc < 1.0:
            raise ModelSpecError("zero location must lie strictly inside (0, 1)")
        if radius <= 0.0 or not (0.0 < c_lo <= c_hi):
            raise ModelSpecError("zero envelope needs radius > 0 and 0 < lower <= upper")
        zeros.append(ZeroPoint(loc, order, c_lo, c_hi, radius))
    zeros.sort(key=lambda z: z.location)

    singulars = []
    for s in spec.get("singulars", ()):
        loc = float(s["location"])
        p = float(s["exponent"])
        c = float(s["coefficient"]) * scale
        if not 0.0 <= loc <= 1.0:
            raise ModelSpecError("singular location must lie in [0, 1]")
        if not -1.0 < p < 0.0:
            raise ModelSpecError("singular exponent must lie in (-1, 0)")
        if c <= 0.0:
            raise ModelSpecError("singular coefficient must be positive")
        singulars.append(SingularPoint(loc, p, c))

    infimum, supremum = _global_bounds(pieces)
    lower = spec.get("lower_bound")
    upper = spec.get("upper_bound")
    lower = infimum if lower is None else float(lower) * scale
    upper = supremum if upper is None else float(upper) * scale

    name = spec.get("name")
    if not name:
        digest = hashlib.md5(
            json.dumps(spec, sort_keys=True, default=str).encode()).hexdigest()
        name = f"model-{digest[:8]}"

    return DensityModel(
        model_id=str(name),
        pieces=pieces,
        zeros=tuple(zeros),
        singulars=tuple(singulars),
        lower_bound=lower,
        upper_bound=upper,
        normalization=total,
    )


def load_model(path) -> DensityModel:
    with open(path, encoding="utf-8") as fh:
        spec = json.load(fh)
    schema = spec.get("schema", "density/1")
    if schema != "density/1":
        raise ModelSpecError(f"unsupported density schema {schema!r}")
    return model_from_dict(spec)


def _global_bounds(pieces: Sequence[Piece]) -> tuple[float, float]:
    lo = math.inf
    hi = 0.0
    for p in pieces:
        a, b = p.form.bounds_on(p.lo, p.hi)
        lo = min(lo, a)
        hi = max(hi, b)
    return lo, hi


# ---------------------------------------------------------------------------
# validation

_ENVELOPE_GRID = 10_000
_SIGN_GRID = 2_048


def validate_model(model: DensityModel) -> ValidationReport:
    """Check a model against the hypotheses of the convergence results.

    The report separates structural violations (negative density, bad
    envelopes, overlapping neighborhoods) from regime applicability:
    densities bounded below, densities with finitely many polynomial
    zeros, and the mixed zero/singular case.  A density that vanishes on
    a set of positive measure is flagged as the no-convergence regime.
    """
    violations: list[str] = []

    # Nonnegativity on a grid plus exact piece extrema.
    no_convergence = False
    for p in model.pieces:
        inf_p, sup_p = p.form.bounds_on(p.lo, p.hi)
        if inf_p < -1e-12:
            violations.append(
                f"density negative on piece ({p.lo:g}, {p.hi:g})")
        grid = np.linspace(p.lo, p.hi, _SIGN_GRID)[1:-1]
        vals = p.form.density(grid)
        if np.any(vals < -1e-12):
            violations.append(
                f"density negative inside piece ({p.lo:g}, {p.hi:g})")
        if sup_p <= 1e-15 and p.hi - p.lo > 0.0:
            no_convergence = True

    total = sum(p.mass for p in model.pieces)
    if abs(total - 1.0) > MASS_TOL:
        violations.append(f"total mass {total!r} differs from 1")

    # Zero neighborhoods: inside the domain, pairwise disjoint, envelope
    # verified on a dense grid.
    zeros_ok = True
    intervals = []
    for z in model.zeros:
        b_lo, b_hi = z.location - z.radius, z.location + z.radius
        if not (0.0 < b_lo and b_hi < 1.0):
            violations.append(
                f"zero neighborhood around {z.location:g} leaves (0, 1)")
            zeros_ok = False
            continue
        intervals.append((b_lo, b_hi))
        grid = np.linspace(b_lo, b_hi, _ENVELOPE_GRID)
        rho = _density_on_grid(model, grid)
        dist = np.abs(z.location - grid) ** z.order
        lo_env = z.lower_coeff * dist
        hi_env = z.upper_coeff * dist
        tol = 1e-9
        if np.any(rho < lo_env * (1.0 - tol) - 1e-12) or np.any(
                rho > hi_env * (1.0 + tol) + 1e-12):
            violations.append(
                f"envelope fails on neighborhood of zero at {z.location:g}")
            zeros_ok = False
    intervals.sort()
    for (a0, b0), (a1, b1) in zip(intervals, intervals[1:]):
        if b0 > a1 + EDGE_TOL:
            violations.append("zero neighborhoods overlap")
            zeros_ok = False

    # Positivity away from the declared zeros.
    pos_off_zeros = True
    complement = _complement_segments(intervals)
    for a, b in complement:
        if b - a <= EDGE_TOL:
            continue
        if _inf_on(model, a, b) <= 1e-15:
            pos_off_zeros = False
            grid = np.linspace(a, b, _SIGN_GRID)
            vals = _density_on_grid(model, grid)
            if np.all(vals <= 1e-15):
                no_convergence = True
    if not pos_off_zeros and not no_convergence:
        violations.append(
            "density vanishes outside the declared zero neighborhoods")

    applies_lower = (model.lower_bound > 0.0 and not model.zeros
                     and pos_off_zeros and not no_convergence)
    applies_poly = (math.isfinite(model.upper_bound) and zeros_ok
                    and pos_off_zeros and not no_convergence)
    applies_mixed = zeros_ok and pos_off_zeros and not no_convergence

    return ValidationReport(
        model_id=model.model_id,
        violations=tuple(violations),
        no_convergence=no_convergence,
        applies_lower_bounded=applies_lower,
        applies_polynomial_zeros=applies_poly,
        applies_mixed=applies_mixed,
        lambda_lower=model.lower_bound,
        upper=model.upper_bound,
        k_max=model.k_max,
    )


def _density_on_grid(model: DensityModel, grid: np.ndarray) -> np.ndarray:
    out = np.empty_like(grid)
    edges = np.array([p.lo for p in model.pieces] + [1.0])
    idx = np.clip(np.searchsorted(edges[1:-1], grid, side="right"),
                  0, len(model.pieces) - 1)
    for k, p in enumerate(model.pieces):
        mask = idx == k
        if mask.any():
            out[mask] = p.form.density(grid[mask])
    return out


def _inf_on(model: DensityModel, a: float, b: float) -> float:
    lo = math.inf
    for p in model.pieces:
        s, e = max(p.lo, a), min(p.hi, b)
        if s < e:
            lo = min(lo, p.form.bounds_on(s, e)[0])
    return lo


def _complement_segments(intervals):
    segs = []
    cursor = 0.0
    for a, b in intervals:
        if a > cursor:
            segs.append((cursor, a))
        cursor = max(cursor, b)
    if cursor < 1.0:
        segs.append((cursor, 1.0))
    return segs


# ---------------------------------------------------------------------------
# evaluator

class CdfEvaluator:
    """Immutable CDF/quantile evaluator for a density model.

    Construction is single-threaded; afterwards the object only reads its
    arrays, so it is safe to share across threads and to pickle into
    worker processes.
    """

    def __init__(self, model: DensityModel, report: ValidationReport,
                 forced: bool = False):
        self.model = model
        self.report = report
        self.forced = forced
        self._edges = np.array([p.lo for p in model.pieces] + [1.0])
        masses = np.array([p.mass for p in model.pieces])
        self._cum = np.concatenate([[0.0], np.cumsum(masses)])
        self._masses = masses
        # cumulative integral of F at the left edge of each piece, for the
        # exact L1 distance between CDFs
        acc = [0.0]
        for k, p in enumerate(model.pieces):
            seg = (self._cum[k] * (p.hi - p.lo)
                   + float(p.form.mass_integral(p.lo, p.hi)))
            acc.append(acc[-1] + seg)
        self._cdf_int = np.array(acc)

    # -- basic lookups ------------------------------------------------

    def _piece_index(self, x: np.ndarray) -> np.ndarray:
        return np.clip(np.searchsorted(self._edges[1:-1], x, side="right"),
                       0, len(self.model.pieces) - 1)

    def density(self, x):
        x_arr, scalar = _as_array(x)
        _check_domain(x_arr, 0.0, 1.0, "x")
        idx = self._piece_index(x_arr)
        out = np.empty_like(x_arr)
        for k, p in enumerate(self.model.pieces):
            mask = idx == k
            if mask.any():
                out[mask] = p.form.density(x_arr[mask])
        return float(out[0]) if scalar else out

    def cdf(self, x):
        """F(x), exact per-piece antiderivatives accumulated left to right."""
        x_arr, scalar = _as_array(x)
        _check_domain(x_arr, 0.0, 1.0, "x")
        idx = self._piece_index(x_arr)
        out = np.empty_like(x_arr)
        for k, p in enumerate(self.model.pieces):
            mask = idx == k
            if mask.any():
                out[mask] = self._cum[k] + p.form.mass(p.lo, x_arr[mask])
        out = np.clip(out, 0.0, 1.0)
        return float(out[0]) if scalar else out

    def quantile(self, y):
        """Generalized inverse ``inf{x : F(x) >= y}`` with F^{-1}(0)=0, F^{-1}(1)=1.

        Piece selection shifts the target by the residual tolerance so a
        flat CDF run (a zero-density piece) resolves to its left edge.
        """
        y_arr, scalar = _as_array(y)
        _check_domain(y_arr, 0.0, 1.0, "y")
        idx = np.clip(
            np.searchsorted(self._cum[1:], y_arr - QUANTILE_RESIDUAL,
                            side="left"),
            0, len(self.model.pieces) - 1)
        out = np.empty_like(y_arr)
        for k, p in enumerate(self.model.pieces):
            mask = idx == k
            if not mask.any():
                continue
            m_in = np.clip(y_arr[mask] - self._cum[k], 0.0, self._masses[k])
            if isinstance(p.form, PolynomialForm):
                xs = p.form.invert_mass(p.lo, m_in, hi=p.hi)
            else:
                xs = p.form.invert_mass(p.lo, m_in)
            out[mask] = np.clip(xs, p.lo, p.hi)
        return float(out[0]) if scalar else out

    def mass(self, a, b):
        """F(b) - F(a) for 0 <= a <= b <= 1."""
        a_arr = np.asarray(a, dtype=float)
        b_arr = np.asarray(b, dtype=float)
        if np.any(a_arr > b_arr):
            raise DomainError("interval must satisfy a <= b")
        return self.cdf(b) - self.cdf(a)

    def cdf_integral(self, x):
        """A(x) = integral of F over (0, x), exact per piece."""
        x_arr, scalar = _as_array(x)
        _check_domain(x_arr, 0.0, 1.0, "x")
        idx = self._piece_index(x_arr)
        out = np.empty_like(x_arr)
        for k, p in enumerate(self.model.pieces):
            mask = idx == k
            if mask.any():
                xm = x_arr[mask]
                out[mask] = (self._cdf_int[k]
                             + self._cum[k] * (xm - p.lo)
                             + p.form.mass_integral(p.lo, xm))
        return float(out[0]) if scalar else out

    # -- interval density bounds --------------------------------------

    def density_inf(self, a: float, b: float) -> float:
        return _inf_on(self.model, a, b)

    def density_sup(self, a: float, b: float) -> float:
        hi = 0.0
        for p in self.model.pieces:
            s, e = max(p.lo, a), min(p.hi, b)
            if s < e:
                hi = max(hi, p.form.bounds_on(s, e)[1])
        return hi


def _as_array(x) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        return arr.reshape(1), True
    return arr, False


def _check_domain(arr: np.ndarray, lo: float, hi: float, name: str):
    if arr.size and (np.any(arr < lo) or np.any(arr > hi) or
                     not np.all(np.isfinite(arr))):
        raise DomainError(f"{name} must lie in [{lo:g}, {hi:g}]")


def build_evaluator(model: DensityModel, force: bool = False) -> CdfEvaluator:
    """Validate and wrap a model; ``force`` accepts assumption-violating models.

    Forcing exists for deliberately degenerate densities (for example a
    density vanishing on an interval, used to exhibit non-convergence);
    structural defects are never forced through.
    """
    report = validate_model(model)
    if report.violations:
        raise ModelSpecError(
            "model is structurally invalid: " + "; ".join(report.violations))
    if not report.passed and not force:
        raise ModelAssumptionError(
            f"model {model.model_id!r} fails validation"
            " (pass force=True to evaluate anyway)")
    return CdfEvaluator(model, report, forced=not report.passed)


# Operation-style aliases used by the CLI and tests.

def cdf_eval(F: CdfEvaluator, x):
    return F.cdf(x)


def quantile_eval(F: CdfEvaluator, y):
    return F.quantile(y)


def mass_of_interval(F: CdfEvaluator, a, b):
    return F.mass(a, b)
