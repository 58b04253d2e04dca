"""Command-line interface: ``corrsv {eval,table,verify,eigencorr,moments}``.

Exit status: 0 success, 1 a verification case failed, 2 usage error
(including malformed input files), 3 domain or runtime error.

CSV is UTF-8 with a header row and ``\\n`` line endings; floats are written
with ``repr`` (shortest round-trip form, locale independent) and a zero
density has log value ``-inf``. JSON keys keep the order in which they are
documented in the README; non-finite floats become ``null``.
"""

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from .densities import (
    EnsembleParams,
    joint_eigen_logpdf,
    joint_marginal_logpdf,
    joint_singular_logpdf,
    marginal_logpdf,
    same_matrix_pair_logpdf,
)
from .mimo import MimoConfig, default_lags, eigen_corr_simulate
from .montecarlo import estimate_moments
from .quadrature import QuadratureError
from .sampling import MatrixPairSpec, SpecError
from .specfun import DomainError
from .suite import SCHEMA_VERSION, report_case, verify_suite

DENSITIES = ("joint-singular", "joint-eigen", "joint-marginal", "marginal", "pair-same-matrix")

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_RUNTIME = 3


class UsageError(Exception):
    """Bad flags or malformed input; maps to exit status 2."""


# ---------------------------------------------------------------------------
# argument parsing


def _seed(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("seed must be an unsigned integer")
    return value


def _trials(text):
    value = int(text)
    if value < 1000:
        raise argparse.ArgumentTypeError("trials must be >= 1000")
    return value


def _float_list(text):
    try:
        return [float(t) for t in text.replace(",", " ").split()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _ensemble_flags(p, rho_default=0.5):
    p.add_argument("--m", type=int, default=2, help="rows (m <= n)")
    p.add_argument("--n", type=int, default=2, help="columns")
    p.add_argument("--rho-abs", type=float, default=rho_default, help="correlation modulus in [0, 1)")


def _output_flags(p, default_format):
    p.add_argument("--output", "-o", default="-", help="output path, '-' for stdout")
    p.add_argument("--format", choices=("csv", "json"), default=default_format)


def _stat_flags(p):
    p.add_argument("--seed", type=_seed, required=True, help="unsigned integer seed (required)")
    p.add_argument("--trials", type=_trials, default=200_000, help="Monte Carlo draws (>= 1000)")
    p.add_argument("--jobs", type=int, default=1, help="worker threads; results do not depend on it")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="corrsv",
        description="Singular-value densities of correlated complex Gaussian matrix pairs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a density at given points")
    _ensemble_flags(p)
    p.add_argument("--density", choices=DENSITIES, required=True)
    p.add_argument(
        "--point",
        action="append",
        type=_float_list,
        default=[],
        help="one point as comma- or space-separated reals; repeatable",
    )
    p.add_argument("--input", help="file with one whitespace-separated point per line")
    _output_flags(p, "csv")

    p = sub.add_parser("table", help="tabulate a density on a 1-D or 2-D grid")
    _ensemble_flags(p)
    p.add_argument("--density", choices=DENSITIES, required=True)
    p.add_argument("--grid-min", type=float, default=0.0)
    p.add_argument("--grid-max", type=float, default=10.0)
    p.add_argument("--grid-count", type=int, default=101)
    _output_flags(p, "csv")

    p = sub.add_parser("verify", help="run the verification suite")
    _ensemble_flags(p)
    p.add_argument("--rho-phase", type=float, default=0.0, help="phase of rho in radians")
    _stat_flags(p)
    _output_flags(p, "json")

    p = sub.add_parser("eigencorr", help="eigen-channel correlation versus lag (2x2 Clarke channel)")
    p.add_argument("--m", type=int, default=2, help="receive antennas")
    p.add_argument("--n", type=int, default=2, help="transmit antennas")
    p.add_argument("--fd", type=float, default=1.0, help="maximum Doppler frequency (Hz)")
    p.add_argument("--lags", type=_float_list, help="lags tau in seconds, comma-separated")
    _stat_flags(p)
    _output_flags(p, "csv")

    p = sub.add_parser("moments", help="simulated vs theoretical eigenvalue moments")
    _ensemble_flags(p)
    p.add_argument("--rho-phase", type=float, default=0.0, help="phase of rho in radians")
    _stat_flags(p)
    _output_flags(p, "json")
    return parser


# ---------------------------------------------------------------------------
# formatting


def format_float(x):
    """Locale-independent shortest round-trip text; ``-inf``/``inf``/``nan`` literal."""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    return repr(float(x))


def write_csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format_float(v) for v in row])
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    return obj


def write_json(doc):
    return json.dumps(_jsonable(doc), indent=2, allow_nan=False) + "\n"


def _rows_doc(command, header, rows):
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "columns": list(header),
        "rows": [dict(zip(header, row)) for row in rows],
    }


def _emit(text, path):
    if path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc


def _table_output(args, command, header, rows):
    if args.format == "csv":
        return write_csv(header, rows)
    return write_json(_rows_doc(command, header, rows))


# ---------------------------------------------------------------------------
# density dispatch


def point_columns(density, m):
    """Input column names for ``density``."""
    if density == "joint-singular":
        return [f"s{k}" for k in range(1, m + 1)] + [f"r{k}" for k in range(1, m + 1)]
    if density == "joint-eigen":
        return [f"beta{k}" for k in range(1, m + 1)] + [f"alpha{k}" for k in range(1, m + 1)]
    if density == "joint-marginal":
        return ["beta", "alpha"]
    if density == "marginal":
        return ["alpha"]
    return ["phi", "varphi"]


def log_density(density, params, point):
    """Log density at one point laid out as in :func:`point_columns`."""
    m = params.m
    x = np.asarray(point, dtype=float)
    if density == "joint-singular":
        return joint_singular_logpdf(x[:m], x[m:], params)
    if density == "joint-eigen":
        return joint_eigen_logpdf(x[:m], x[m:], params)
    if density == "joint-marginal":
        return float(joint_marginal_logpdf(x[0], x[1], params))
    if density == "marginal":
        return float(marginal_logpdf(x[0], m, params.n))
    return float(same_matrix_pair_logpdf(x[0], x[1], m, params.n))


def _params(args):
    return EnsembleParams(args.m, args.n, args.rho_abs)


def read_points(path, width):
    """Parse one point per line; blank lines and ``#`` comments are skipped."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    points = []
    for lineno, line in enumerate(lines, 1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        try:
            values = [float(t) for t in text.split()]
        except ValueError:
            raise UsageError(f"{path}:{lineno}: not a list of numbers: {line!r}") from None
        if len(values) != width:
            raise UsageError(f"{path}:{lineno}: expected {width} values, got {len(values)}")
        points.append(values)
    return points


# ---------------------------------------------------------------------------
# commands


def cmd_eval(args):
    params = _params(args)
    cols = point_columns(args.density, params.m)
    points = list(args.point)
    for i, pt in enumerate(points, 1):
        if len(pt) != len(cols):
            raise UsageError(f"--point #{i}: expected {len(cols)} values ({', '.join(cols)}), got {len(pt)}")
    if args.input:
        points += read_points(args.input, len(cols))
    if not points:
        raise UsageError("no points given; use --point or --input")
    rows = []
    for pt in points:
        try:
            lp = log_density(args.density, params, pt)
        except DomainError as exc:
            raise DomainError(f"at point {pt}: {exc}") from None
        rows.append(list(pt) + [lp, math.exp(lp)])
    return _table_output(args, "eval", cols + ["log_density", "density"], rows), EXIT_OK


def cmd_table(args):
    params = _params(args)
    if args.grid_count < 2:
        raise UsageError("--grid-count must be >= 2")
    if not args.grid_max > args.grid_min or args.grid_min < 0:
        raise UsageError("need 0 <= --grid-min < --grid-max")
    if args.density in ("joint-singular", "joint-eigen") and params.m != 1:
        raise UsageError(f"{args.density} is a function of 2m = {2 * params.m} variables; tables need m = 1")
    grid = np.linspace(args.grid_min, args.grid_max, args.grid_count)
    cols = point_columns(args.density, params.m)
    rows = []
    if len(cols) == 1:
        for x in grid:
            lp = log_density(args.density, params, [x])
            rows.append([x, lp, math.exp(lp)])
    else:
        for x in grid:  # row-major: first variable outermost
            for y in grid:
                lp = log_density(args.density, params, [x, y])
                rows.append([x, y, lp, math.exp(lp)])
    return _table_output(args, "table", cols + ["log_density", "density"], rows), EXIT_OK


def _report_output(args, doc):
    if args.format == "json":
        return write_json(doc)
    header = ["name", "kind", "empirical", "theoretical", "tolerance_or_sigma", "pass"]
    rows = [[c[h] if c[h] is not None else math.nan for h in header] for c in doc["cases"]]
    return write_csv(header, rows)


def cmd_verify(args):
    _params(args)
    doc = verify_suite(
        args.m, args.n, args.rho_abs, args.rho_phase, trials=args.trials, seed=args.seed, n_jobs=args.jobs
    )
    return _report_output(args, doc), EXIT_OK if doc["all_pass"] else EXIT_FAIL


def cmd_moments(args):
    _params(args)
    spec = MatrixPairSpec.from_polar(args.m, args.n, args.rho_abs, args.rho_phase)
    cases = [report_case(r) for r in estimate_moments(spec, args.trials, args.seed, n_jobs=args.jobs)]
    doc = {
        "schema_version": SCHEMA_VERSION,
        "suite": "moments",
        "params": {
            "m": args.m,
            "n": args.n,
            "rho_abs": args.rho_abs,
            "rho_phase": args.rho_phase,
            "trials": args.trials,
            "seed": args.seed,
        },
        "cases": cases,
        "all_pass": all(c["pass"] for c in cases),
    }
    return _report_output(args, doc), EXIT_OK if doc["all_pass"] else EXIT_FAIL


EIGENCORR_COLUMNS = (
    "fd_tau",
    "tau",
    "rho_h",
    "k",
    "l",
    "pairing",
    "empirical",
    "theoretical",
    "std_error",
    "n_samples",
)


def cmd_eigencorr(args):
    if not args.fd > 0:
        raise UsageError("--fd must be > 0")
    lags = default_lags(args.fd) if args.lags is None else sorted(set([0.0] + list(args.lags)))
    try:
        config = MimoConfig(args.m, args.n, args.fd, tuple(lags), args.trials, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rows = [
        [r.fd_tau, r.tau, r.rho_h, r.k, r.l, r.pairing, r.empirical, r.theoretical, r.std_error, r.n_samples]
        for r in eigen_corr_simulate(config, n_jobs=args.jobs)
    ]
    return _table_output(args, "eigencorr", list(EIGENCORR_COLUMNS), rows), EXIT_OK


COMMANDS = {
    "eval": cmd_eval,
    "table": cmd_table,
    "verify": cmd_verify,
    "eigencorr": cmd_eigencorr,
    "moments": cmd_moments,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors, 0 on --help
        return int(exc.code or 0)
    try:
        text, status = COMMANDS[args.command](args)
        _emit(text, args.output)
    except UsageError as exc:
        print(f"corrsv {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, SpecError, QuadratureError, ValueError, OSError, RuntimeError) as exc:
        print(f"corrsv {args.command}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return status


if __name__ == "__main__":
    sys.exit(main())
