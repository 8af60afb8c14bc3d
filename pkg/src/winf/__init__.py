"""Exact 1-D infinity-Wasserstein distances between a density and its
empirical measure, convergence-rate experiments, and an executable
partition-and-transport certificate."""

__version__ = "0.1.0"

from .bounds import (binomial_tails, chebyshev_standardized, dkw_tail,
                     power_inequality_holds, thm1_envelope, thm2_rate)
from .construction import (PartitionScheme, TiltedMeasures,
                           TransportCertificate, assemble_certificate,
                           build_partition, build_tilted_measures,
                           dyadic_family)
from .density import (CdfEvaluator, DensityModel, ValidationReport,
                      build_evaluator, cdf_eval, load_model, mass_of_interval,
                      model_from_dict, quantile_eval, validate_model)
from .errors import (CertificationError, ConfigError, DegenerateBlockError,
                     DepthError, DomainError, ModelAssumptionError,
                     ModelSpecError, RecordSchemaError, WinfError)
from .experiments import (ExperimentConfig, RateFit, RunRecord, fit_rate,
                          load_experiment_config, load_records,
                          persist_records, run_coverage_experiment,
                          run_rate_experiment)
from .sampling import (EmpiricalMeasure, SeedSpec, derive_stream_seed,
                       draw_samples, empirical_quantile, ks_statistic)
from .transport import (DistanceReport, full_report, w1_empirical,
                        winf_discrete, winf_empirical)
