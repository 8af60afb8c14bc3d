"""Monte Carlo harness: sweeps over n, rate fits, coverage tables, records.

Per-trial seeds derive from ``(base_seed, n, trial)`` only, so the record
set is identical whether trials run serially or on a worker pool.  The
regression runs against ``log(n / log n)`` rather than ``log n``: the rate
envelopes carry the logarithmic factor, and regressing against the exact
predicted functional form isolates the exponent.
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .bounds import dkw_tail, thm1_envelope
from .density import (CdfEvaluator, DensityModel, build_evaluator, load_model,
                      model_from_dict)
from .errors import ConfigError, DomainError, RecordSchemaError
from .sampling import SeedSpec, draw_samples, ks_statistic
from .transport import w1_empirical, winf_empirical

__all__ = [
    "ExperimentConfig",
    "RunRecord",
    "RateFit",
    "CoverageRow",
    "load_experiment_config",
    "run_rate_experiment",
    "run_coverage_experiment",
    "fit_rate",
    "persist_records",
    "load_records",
]

RECORD_SCHEMA = "records/1"
RECORD_HEADER = ("schema", "model_id", "n", "trial", "seed",
                 "w_inf", "w_one", "ks", "violations")

# Slack for floating-point comparison in the deterministic inequality suite.
_INEQ_EPS = 1e-12


@dataclass(frozen=True)
class RunRecord:
    model_id: str
    n: int
    trial: int
    seed: int
    w_inf: float
    w_one: float
    ks: float
    violations: tuple[str, ...]


@dataclass(frozen=True)
class RateFit:
    """Least-squares fit of log(statistic) against log(n / log n).

    ``pinned_constant`` comes from a second fit with the slope pinned to
    the predicted exponent, separating "is the exponent right" from "what
    is the constant".  Median and 90th-percentile fits are always carried
    along; ``statistic_disagreement`` flags a slope gap beyond 0.08.
    """

    slope: float
    intercept: float
    residual_se: float
    n_points: int
    statistic: str = "median"
    k_max: int | None = None
    predicted_exponent: float | None = None
    pinned_intercept: float | None = None
    pinned_constant: float | None = None
    median_slope: float | None = None
    p90_slope: float | None = None
    statistic_disagreement: bool = False

    def to_dict(self) -> dict:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "residual_se": self.residual_se,
            "n_points": self.n_points,
            "statistic": self.statistic,
            "k_max": self.k_max,
            "predicted_exponent": self.predicted_exponent,
            "pinned_intercept": self.pinned_intercept,
            "pinned_constant": self.pinned_constant,
            "median_slope": self.median_slope,
            "p90_slope": self.p90_slope,
            "statistic_disagreement": self.statistic_disagreement,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


@dataclass(frozen=True)
class CoverageRow:
    model_id: str
    kind: str            # "dkw" or "envelope"
    n: int
    threshold: float     # t for dkw, M for envelope
    trials: int
    violation_frequency: float
    theoretical_cap: float
    binomial_slack: float

    def to_dict(self) -> dict:
        return {
            "model_id": self.model_id,
            "kind": self.kind,
            "n": self.n,
            "threshold": self.threshold,
            "trials": self.trials,
            "violation_frequency": self.violation_frequency,
            "theoretical_cap": self.theoretical_cap,
            "binomial_slack": self.binomial_slack,
        }


@dataclass(frozen=True)
class ExperimentConfig:
    model: DensityModel
    n_grid: tuple[int, ...]
    trials: int
    base_seed: int
    statistic: tuple = ("median",)
    checks: tuple[tuple[str, float], ...] = ()
    workers: int = 1
    force_accept: bool = False

    def evaluator(self) -> CdfEvaluator:
        return build_evaluator(self.model, force=self.force_accept)


def load_experiment_config(path) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {path}") from exc
    schema = raw.get("schema", "experiment/1")
    if schema != "experiment/1":
        raise ConfigError(f"unsupported experiment schema {schema!r}")

    model_ref = raw.get("model")
    if isinstance(model_ref, str):
        base = os.path.dirname(os.path.abspath(path))
        model = load_model(os.path.join(base, model_ref)
                           if not os.path.isabs(model_ref) else model_ref)
    elif isinstance(model_ref, dict):
        model = model_from_dict(model_ref)
    else:
        raise ConfigError("config needs a 'model' path or inline density")

    stat_raw = raw.get("statistic", "median")
    if stat_raw in ("median", "mean"):
        statistic = (stat_raw,)
    elif isinstance(stat_raw, dict) and "quantile" in stat_raw:
        q = float(stat_raw["quantile"])
        if not 0.0 < q < 1.0:
            raise ConfigError("statistic quantile must lie in (0, 1)")
        statistic = ("quantile", q)
    else:
        raise ConfigError(f"unknown statistic {stat_raw!r}")

    checks = []
    for chk in raw.get("checks", ()):
        kind = chk.get("kind")
        if kind == "dkw":
            checks.append(("dkw", float(chk["t"])))
        elif kind == "envelope":
            checks.append(("envelope", float(chk["M"])))
        else:
            raise ConfigError(f"unknown coverage check kind {kind!r}")

    return ExperimentConfig(
        model=model,
        n_grid=tuple(int(v) for v in raw.get("n_grid", ())),
        trials=int(raw.get("trials", 0)),
        base_seed=int(raw.get("base_seed", 0)),
        statistic=statistic,
        checks=tuple(checks),
        workers=int(raw.get("workers", 1)),
        force_accept=bool(raw.get("force_accept", False)),
    )


# ---------------------------------------------------------------------------
# single trials

def trial_stream_index(n: int, trial: int) -> int:
    """Injective (n, trial) -> stream index used for per-trial seeds."""
    return (n << 32) + trial


def run_trial(F: CdfEvaluator, n: int, trial: int, base_seed: int) -> RunRecord:
    seed = SeedSpec(base_seed=base_seed,
                    stream_index=trial_stream_index(n, trial))
    em = draw_samples(F, n, seed)
    w_inf = winf_empirical(F, em).w_infinity
    w_one = w1_empirical(F, em)
    ks = ks_statistic(em, F)
    lam = F.model.lower_bound
    violations = []
    if w_inf > 1.0 + _INEQ_EPS:
        violations.append("w_inf_gt_1")
    if w_one > w_inf + _INEQ_EPS:
        violations.append("w_one_gt_w_inf")
    if lam > 0.0 and w_inf > ks / lam + _INEQ_EPS:
        violations.append("w_inf_gt_ks_over_lambda")
    return RunRecord(model_id=F.model.model_id, n=n, trial=trial,
                     seed=seed.stream_seed(), w_inf=w_inf, w_one=w_one,
                     ks=ks, violations=tuple(violations))


def _trial_chunk(args) -> list[RunRecord]:
    F, n, lo, hi, base_seed = args
    return [run_trial(F, n, t, base_seed) for t in range(lo, hi)]


def _run_grid(F: CdfEvaluator, n_grid, trials, base_seed,
              workers) -> list[RunRecord]:
    tasks = []
    chunk = 32
    for n in n_grid:
        for lo in range(0, trials, chunk):
            tasks.append((F, n, lo, min(lo + chunk, trials), base_seed))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            batches = list(pool.map(_trial_chunk, tasks))
    else:
        batches = [_trial_chunk(t) for t in tasks]
    records = [r for batch in batches for r in batch]
    records.sort(key=lambda r: (r.n, r.trial))
    return records


# ---------------------------------------------------------------------------
# experiments

def run_rate_experiment(config: ExperimentConfig):
    """Sweep the n-grid, aggregate the per-n statistic, fit the rate.

    Returns ``(records, fit)``.  Deterministic given ``base_seed``
    regardless of the worker count.
    """
    if len(config.n_grid) < 4:
        raise ConfigError("rate experiments need an n-grid of length >= 4")
    if any(b <= a for a, b in zip(config.n_grid, config.n_grid[1:])):
        raise ConfigError("n_grid must be strictly increasing")
    if config.trials < 1:
        raise ConfigError("trials must be at least 1")

    F = config.evaluator()
    records = _run_grid(F, config.n_grid, config.trials, config.base_seed,
                        config.workers)

    by_n: dict[int, list[float]] = {n: [] for n in config.n_grid}
    for r in records:
        by_n[r.n].append(r.w_inf)

    def aggregate(stat) -> list[tuple[int, float]]:
        pts = []
        for n in config.n_grid:
            vals = np.array(by_n[n])
            if stat[0] == "median":
                v = float(np.median(vals))
            elif stat[0] == "mean":
                v = float(np.mean(vals))
            else:
                v = float(np.quantile(vals, stat[1]))
            pts.append((n, v))
        return pts

    k_max = F.model.k_max if F.model.k_max is not None else 0
    label = config.statistic[0] if config.statistic[0] != "quantile" \
        else f"q{config.statistic[1]:g}"
    fit = fit_rate(aggregate(config.statistic), k_max=k_max, statistic=label)
    med = fit_rate(aggregate(("median",)), k_max=k_max)
    p90 = fit_rate(aggregate(("quantile", 0.9)), k_max=k_max)
    fit = replace(fit, median_slope=med.slope, p90_slope=p90.slope,
                  statistic_disagreement=abs(med.slope - p90.slope) > 0.08)
    return records, fit


def run_coverage_experiment(config: ExperimentConfig):
    """Empirical violation frequencies against their theoretical caps.

    Returns ``(records, rows)`` with one row per (n, check).
    """
    if not config.n_grid:
        raise ConfigError("coverage experiments need a nonempty n-grid")
    if config.trials < 1:
        raise ConfigError("trials must be at least 1")
    if not config.checks:
        raise ConfigError("coverage experiments need at least one check")
    for kind, value in config.checks:
        if kind == "dkw" and value <= 0.0:
            raise ConfigError("dkw check needs t > 0")
        if kind == "envelope":
            if value <= 1.0:
                raise ConfigError("envelope check needs M > 1")
            if config.model.lower_bound <= 0.0:
                raise ConfigError(
                    "envelope check needs a density bounded below")

    F = config.evaluator()
    records = _run_grid(F, config.n_grid, config.trials, config.base_seed,
                        config.workers)
    lam = F.model.lower_bound

    rows = []
    for n in config.n_grid:
        recs = [r for r in records if r.n == n]
        T = len(recs)
        for kind, value in config.checks:
            if kind == "dkw":
                cap = dkw_tail(n, value)
                freq = sum(r.ks >= value for r in recs) / T
            else:
                env = thm1_envelope(lam, n, value)
                cap = 1.0 / value
                freq = sum(r.w_inf > env for r in recs) / T
            slack = 3.0 * math.sqrt(cap * (1.0 - cap) / T) if cap < 1.0 else 0.0
            rows.append(CoverageRow(
                model_id=F.model.model_id, kind=kind, n=n, threshold=value,
                trials=T, violation_frequency=freq, theoretical_cap=cap,
                binomial_slack=slack))
    return records, rows


def fit_rate(points, k_max: int | None = None,
             statistic: str = "median") -> RateFit:
    """Ordinary least squares of log(statistic) on log(n / log n)."""
    pts = [(int(n), float(v)) for n, v in points]
    if len(pts) < 4:
        raise DomainError("rate fits need at least 4 points")
    if any(v <= 0.0 for _, v in pts):
        raise DomainError("rate statistics must be positive")
    x = np.array([math.log(n / math.log(n)) for n, _ in pts])
    y = np.array([math.log(v) for _, v in pts])
    design = np.column_stack([x, np.ones_like(x)])
    (slope, intercept), *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - (slope * x + intercept)
    dof = len(pts) - 2
    res_se = float(np.sqrt(np.sum(resid ** 2) / dof)) if dof else 0.0

    predicted = None
    pinned_b = None
    pinned_c = None
    if k_max is not None:
        predicted = -1.0 / (2.0 * (k_max + 1))
        pinned_b = float(np.mean(y - predicted * x))
        pinned_c = math.exp(pinned_b)

    return RateFit(slope=float(slope), intercept=float(intercept),
                   residual_se=res_se, n_points=len(pts), statistic=statistic,
                   k_max=k_max, predicted_exponent=predicted,
                   pinned_intercept=pinned_b, pinned_constant=pinned_c)


# ---------------------------------------------------------------------------
# record persistence

def persist_records(records, path) -> None:
    """Write records as CSV; floats use repr so round trips are lossless."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(RECORD_HEADER)
        for r in records:
            writer.writerow([
                RECORD_SCHEMA, r.model_id, r.n, r.trial, r.seed,
                repr(r.w_inf), repr(r.w_one), repr(r.ks),
                "|".join(r.violations),
            ])


def load_records(path) -> list[RunRecord]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = tuple(next(reader))
        except StopIteration:
            raise RecordSchemaError(
                f"empty record file; expected header {','.join(RECORD_HEADER)}")
        if header != RECORD_HEADER:
            raise RecordSchemaError(
                f"unexpected header; expected {','.join(RECORD_HEADER)}")
        out = []
        for row in reader:
            if row[0] != RECORD_SCHEMA:
                raise RecordSchemaError(
                    f"unsupported record schema {row[0]!r};"
                    f" expected {RECORD_SCHEMA}")
            out.append(RunRecord(
                model_id=row[1], n=int(row[2]), trial=int(row[3]),
                seed=int(row[4]), w_inf=float(row[5]), w_one=float(row[6]),
                ks=float(row[7]),
                violations=tuple(v for v in row[8].split("|") if v)))
    return out
