"""Command line entry point: ``jumpcir <command> ...``.

Exit codes: 0 success, 2 hypothesis or parameter violation, 3 numerical
failure, 4 I/O failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import replace
from pathlib import Path as FsPath

from . import __version__
from .config import experiment_from, load_config, scheme_from
from .ensemble import STREAM_PATHS, STREAM_V, map_replicates, replicate_rng
from .exceptions import DegeneratePath, HypothesisViolation, JumpCIRError
from .experiment import LAPLACE_KINDS, laplace_monte_carlo, laplace_value, run_experiment
from .inference import Observation, extract_jumps, mle_b, random_scaled_error, sigma_sq_hat
from .limits import (BajdRepresentation, Direct, Representation, check_hypotheses,
                     sample_critical_limit, sample_supercritical_limit)
from .model import ModelParams
from .quadrature import QuadratureError
from .simulate import Path, integral_of_path, simulate_jump_cir

log = logging.getLogger("jumpcir")

EXIT_OK, EXIT_HYPOTHESIS, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4


def _params(args) -> tuple[dict, ModelParams]:
    doc = load_config(args.config)
    return doc, ModelParams.from_dict(doc)


def _emit(text: str, out) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        FsPath(out).write_text(text)


def _fmt(x) -> str:
    return repr(float(x))


# --------------------------------------------------------------------------- commands


def cmd_simulate(args) -> int:
    doc, params = _params(args)
    scheme = scheme_from(doc, args.dt, args.scheme)
    rng = replicate_rng(args.seed, STREAM_PATHS, 0)
    path = simulate_jump_cir(params, args.T, scheme, rng)
    path.meta["seed"] = args.seed
    _emit(path.to_csv(), args.out)
    return EXIT_OK


def cmd_laplace(args) -> int:
    _, params = _params(args)
    value = laplace_value(params, args.which, args.u, args.v, args.t)
    if args.check is None:
        print(_fmt(value))
        return EXIT_OK
    kind, _, n = args.check.partition(":")
    if kind != "mc" or not n.isdigit() or int(n) <= 0:
        raise argparse.ArgumentTypeError(f"--check expects mc:<n>, got {args.check!r}")
    res = laplace_monte_carlo(params, args.which, args.u, args.v, args.t, int(n), args.seed)
    print("closed,mc,se,z_score")
    print(",".join(_fmt(x) for x in (res.closed, res.mc, res.se, res.z_score)))
    return EXIT_OK


def cmd_estimate(args) -> int:
    with open(args.infile) as fh:
        path = Path.from_csv(fh)
    obs = Observation(path, args.a, args.sigma, args.threshold)
    jumps = extract_jumps(path, args.threshold, args.sigma)
    head = ["b_hat", "sigma_sq_hat", "int_y", "j_t"]
    row = [mle_b(obs), sigma_sq_hat(path, args.threshold, args.sigma), integral_of_path(path), jumps.total]
    if args.b_true is not None:
        head.append("scaled_error")
        row.append(random_scaled_error(obs, args.b_true))
    print(",".join(head))
    print(",".join(_fmt(x) for x in row))
    return EXIT_OK


_METHODS = {"direct": Direct(), "rep": Representation(), "bajd-rep": BajdRepresentation()}
_LAW_SIGN = {"subcritical": 1, "critical": 0, "supercritical": -1}


def cmd_limit_sample(args) -> int:
    _, params = _params(args)
    sign = _LAW_SIGN[args.law]
    if (params.b > 0) - (params.b < 0) != sign:
        raise HypothesisViolation(f"law {args.law!r} does not match the configured b={params.b}")
    check_hypotheses(params)
    if args.law == "subcritical":
        sd = params.sigma * math.sqrt(params.b / params.drift_total)
        draw = lambda rng: sd * rng.standard_normal()  # noqa: E731
    elif args.law == "critical":
        draw = lambda rng: sample_critical_limit(params.drift_total, params.sigma, rng,  # noqa: E731
                                                 scaling=args.scaling)
    else:
        method = _METHODS[args.method]
        draw = lambda rng: sample_supercritical_limit(params, rng, method)  # noqa: E731
    samples = map_replicates(draw, args.n, args.seed, STREAM_V, args.n_jobs)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["sample"])
    w.writerows([_fmt(x)] for x in samples)
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_experiment(args) -> int:
    doc = load_config(args.config)
    cfg = experiment_from(doc, seed=args.seed, out_dir=args.out_dir, n_jobs=args.n_jobs,
                          replicates=args.replicates)
    if args.seed_sweep is None:
        report = run_experiment(cfg)
        sys.stdout.write(report.summary_text())
        return EXIT_OK
    # rerun with k consecutive seeds to estimate how often the KS test rejects
    rows = []
    for k in range(args.seed_sweep):
        seed = cfg.seed + k
        out = None if cfg.out_dir is None else str(FsPath(cfg.out_dir) / f"seed_{seed}")
        s = run_experiment(replace(cfg, seed=seed, out_dir=out)).summary
        rows.append((seed, s["ks_stat"], s["ks_crit_5"], s["ks_crit_1"]))
    defined = [r for r in rows if r[1] is not None]
    result = {
        "seeds": [r[0] for r in rows],
        "ks_stat": [r[1] for r in rows],
        "reject_rate_5": (sum(r[1] > r[2] for r in defined) / len(defined)) if defined else None,
        "reject_rate_1": (sum(r[1] > r[3] for r in defined) / len(defined)) if defined else None,
    }
    sys.stdout.write(json.dumps(result, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


# --------------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="jumpcir", description=__doc__.splitlines()[0], allow_abbrev=False)
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate one path to CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--scheme", choices=("exact", "euler"), default="exact")
    p.add_argument("--dt", type=float, default=None, help="grid step (exact: 1/steps_per_unit)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("laplace", help="evaluate a Laplace transform")
    p.add_argument("--config", required=True)
    p.add_argument("--u", type=float, default=0.0)
    p.add_argument("--v", type=float, default=0.0)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--which", choices=LAPLACE_KINDS, default="joint")
    p.add_argument("--check", default=None, metavar="mc:N", help="add a Monte-Carlo estimate from N draws")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_laplace)

    p = sub.add_parser("estimate", help="MLE and sigma^2 statistic of an observed path")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--b-true", type=float, default=None)
    p.add_argument("--threshold", type=float, default=None, help="jump threshold for unannotated paths")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("limit-sample", help="draw from a limit law of the MLE")
    p.add_argument("--config", required=True)
    p.add_argument("--law", choices=tuple(_LAW_SIGN), required=True)
    p.add_argument("--method", choices=tuple(_METHODS), default="direct")
    p.add_argument("--scaling", choices=("deterministic", "random"), default="deterministic")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-jobs", type=int, default=1)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_limit_sample)

    p = sub.add_parser("experiment", help="Monte-Carlo experiment from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--replicates", type=int, default=None)
    p.add_argument("--n-jobs", type=int, default=None)
    p.add_argument("--seed-sweep", type=int, default=None, metavar="K")
    p.set_defaults(func=cmd_experiment)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (DegeneratePath, QuadratureError, ArithmeticError) as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERIC
    except (JumpCIRError, ValueError, KeyError, argparse.ArgumentTypeError) as exc:
        if isinstance(exc, (json.JSONDecodeError, UnicodeDecodeError)):
            log.error("cannot parse input: %s", exc)
            return EXIT_IO
        log.error("%s", exc)
        return EXIT_HYPOTHESIS
    except OSError as exc:
        log.error("I/O failure: %s", exc)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
