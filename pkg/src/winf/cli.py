"""Command-line interface: one executable, one subcommand per workflow.

JSON goes to standard output, diagnostics to standard error.  Exit codes:
0 success, 1 domain/config error (stderr line prefixed ``winf-error:``),
2 usage error.  All randomness is controlled by ``--seed``.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

from . import __version__
from .bounds import binomial_tails, dkw_tail
from .construction import (assemble_certificate, build_partition,
                           build_tilted_measures)
from .density import build_evaluator, load_model, validate_model
from .errors import WinfError
from .experiments import (load_experiment_config, persist_records,
                          run_coverage_experiment, run_rate_experiment)
from .sampling import SeedSpec, draw_samples, write_sample_csv
from .transport import full_report

ERROR_PREFIX = "winf-error:"


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True) + "\n")


def _load_density(args):
    model = load_model(args.density)
    return build_evaluator(model, force=args.force_accept)


def _cmd_validate_density(args) -> int:
    model = load_model(args.density)
    report = validate_model(model)
    _emit(report.to_dict())
    return 0


def _cmd_sample(args) -> int:
    F = _load_density(args)
    em = draw_samples(F, args.n, SeedSpec(base_seed=args.seed))
    if args.out:
        write_sample_csv(args.out, [(0, em)])
        _emit({"written": args.out, "n": em.n, "model_id": em.model_id})
    else:
        writer = csv.writer(sys.stdout)
        writer.writerow(["trial", "index", "value"])
        for idx, val in enumerate(em.samples, start=1):
            writer.writerow([0, idx, repr(float(val))])
    return 0


def _cmd_distance(args) -> int:
    F = _load_density(args)
    em = draw_samples(F, args.n, SeedSpec(base_seed=args.seed))
    _emit(full_report(F, em).to_dict())
    return 0


def _cmd_bound_table(args) -> int:
    ns = [int(v) for v in args.n_values.split(",")]
    ts = [float(v) for v in args.t_values.split(",")]
    rows = []
    for n in ns:
        for t in ts:
            cheb, chern, bern = binomial_tails(n, args.p, t)
            rows.append((n, t, dkw_tail(n, t), chern, bern, cheb))
    out = open(args.out, "w", newline="", encoding="utf-8") if args.out \
        else sys.stdout
    try:
        writer = csv.writer(out)
        writer.writerow(["n", "t", "dkw", "chernoff", "bernstein", "chebyshev"])
        for n, t, d, c, b, ch in rows:
            writer.writerow([n, repr(t), repr(d), repr(c), repr(b), repr(ch)])
    finally:
        if args.out:
            out.close()
    return 0


def _cmd_transport_cert(args) -> int:
    F = _load_density(args)
    em = draw_samples(F, args.n, SeedSpec(base_seed=args.seed))
    scheme = build_partition(F, em, beta=args.beta)
    tilted = build_tilted_measures(scheme, F, em)
    cert = assemble_certificate(scheme, tilted, F, em)
    if args.cells_csv:
        with open(args.cells_csv, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["piece", "rank", "atom", "chunk_lo", "chunk_hi",
                             "displacement"])
            for row in cert.cells:
                writer.writerow([row[0], row[1], repr(row[2]), repr(row[3]),
                                 repr(row[4]), repr(row[5])])
    payload = cert.to_dict()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, sort_keys=True)
        _emit({"written": args.out, "max_displacement": cert.max_displacement,
               "exact_winf": cert.exact_winf})
    else:
        _emit(payload)
    return 0


def _cmd_rate_experiment(args) -> int:
    config = load_experiment_config(args.config)
    if args.workers is not None:
        config = _with_workers(config, args.workers)
    records, fit = run_rate_experiment(config)
    if args.out:
        persist_records(records, args.out)
        print(f"wrote {len(records)} records to {args.out}", file=sys.stderr)
    _emit(fit.to_dict())
    return 0


def _cmd_coverage_experiment(args) -> int:
    config = load_experiment_config(args.config)
    if args.workers is not None:
        config = _with_workers(config, args.workers)
    records, rows = run_coverage_experiment(config)
    if args.out:
        persist_records(records, args.out)
        print(f"wrote {len(records)} records to {args.out}", file=sys.stderr)
    _emit([row.to_dict() for row in rows])
    return 0


def _with_workers(config, workers: int):
    from dataclasses import replace
    return replace(config, workers=workers)


def _add_density_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--density", required=True, help="density JSON file")
    p.add_argument("--force-accept", action="store_true",
                   help="evaluate a model that fails the validity checks")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="winf",
        description="Exact 1-D infinity-Wasserstein distances and"
                    " convergence-rate experiments")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate-density",
                       help="report which convergence assumptions a density meets")
    _add_density_args(p)
    p.set_defaults(fn=_cmd_validate_density)

    p = sub.add_parser("sample", help="draw a reproducible sample as CSV")
    _add_density_args(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.set_defaults(fn=_cmd_sample)

    p = sub.add_parser("distance",
                       help="exact distances between a density and a sample")
    _add_density_args(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=_cmd_distance)

    p = sub.add_parser("bound-table",
                       help="CSV of concentration tail bounds over a grid")
    p.add_argument("--n", dest="n_values", default="100,1000,10000",
                   help="comma-separated sample sizes")
    p.add_argument("--t", dest="t_values", default="0.01,0.02,0.05,0.1",
                   help="comma-separated deviations")
    p.add_argument("--p", type=float, default=0.5, help="binomial success rate")
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.set_defaults(fn=_cmd_bound_table)

    p = sub.add_parser("transport-cert",
                       help="build the partition-and-transport certificate")
    _add_density_args(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--beta", type=float, default=3.0)
    p.add_argument("--out", help="write the certificate JSON here")
    p.add_argument("--cells-csv", help="write per-cell displacements here")
    p.set_defaults(fn=_cmd_transport_cert)

    p = sub.add_parser("rate-experiment",
                       help="sweep n, fit the convergence rate")
    p.add_argument("--config", required=True, help="experiment JSON file")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out", help="records CSV path")
    p.set_defaults(fn=_cmd_rate_experiment)

    p = sub.add_parser("coverage-experiment",
                       help="violation frequencies vs theoretical caps")
    p.add_argument("--config", required=True, help="experiment JSON file")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out", help="records CSV path")
    p.set_defaults(fn=_cmd_coverage_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except WinfError as exc:
        print(f"{ERROR_PREFIX} {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"{ERROR_PREFIX} file not found: {exc.filename}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
