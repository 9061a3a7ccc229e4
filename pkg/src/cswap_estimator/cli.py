"""Command-line front end.

Every subcommand reads matrices/channels in the repo JSON format, runs one
estimation task and writes a JSON document (result fields, ``config`` echo,
``version`` and ``timestamp``).  ``--shots 0`` selects exact mode.

Exit codes: 0 success, 2 usage error, 3 unreadable or malformed input file,
4 physics invariant violated, 5 optimizer did not converge (result still
written).
"""
from __future__ import annotations

import argparse
import datetime as _dt
import os
import sys

from . import __version__
from .channels import (
    channel_tomography,
    choi_state,
    choi_to_json,
    distillability_operator_test,
    is_bistochastic,
    kraus_from_json,
    two_way_capacity_positive,
)
from .interferometer import overlap
from .linalg import InvalidStateError, trace_distance
from .observables import Observable, expectation_estimate
from .serialization import (
    MatrixFormatError,
    density_from_json,
    dump_json,
    load_json,
    matrix_from_json,
)
from .spectral import OptimizerConfig, bloch_length, extremal_eigen, purity_estimate
from .tomography import tomography

SEED_ENV = "CSWAP_ESTIMATOR_SEED"

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_BAD_INPUT = 3
EXIT_INVARIANT = 4
EXIT_NOT_CONVERGED = 5


def _read_density(path):
    return density_from_json(load_json(path))


def _read_matrix(path):
    return matrix_from_json(load_json(path))


def _read_channel(path):
    return kraus_from_json(load_json(path))


def _optimizer_config(args) -> OptimizerConfig:
    return OptimizerConfig(
        max_iters=args.max_iters,
        step_size=args.step_size,
        restarts=args.restarts,
        seed=args.seed,
        shots_per_eval=args.shots,
    )


def cmd_overlap(args):
    est = overlap(_read_density(args.a), _read_density(args.b), args.shots, args.seed)
    return est.to_dict(), True


def cmd_tomography(args):
    rho = _read_density(args.state)
    report = tomography(rho, shots_per_probe=args.shots, seed=args.seed)
    out = report.to_dict()
    out["trace_distance_to_input"] = trace_distance(report.state, rho)
    return out, True


def cmd_purity(args):
    return purity_estimate(_read_density(args.state), args.shots, args.seed).to_dict(), True


def cmd_bloch(args):
    rho = _read_density(args.state)
    if rho.dim != 2:
        raise InvalidStateError(f"Bloch length needs a qubit state, got dimension {rho.dim}", rho.dim)
    est = purity_estimate(rho, args.shots, args.seed)
    length, clamped = bloch_length(est.v, return_clamped=True)
    return {"purity": est.v, "stderr_purity": est.stderr_v, "bloch_length": length, "clamped": clamped}, True


def cmd_expectation(args):
    est = expectation_estimate(Observable(_read_matrix(args.observable)), _read_density(args.state),
                               args.shots, args.seed)
    return est.to_dict(), True


def cmd_eigen(args):
    res = extremal_eigen(_read_density(args.state), args.which, _optimizer_config(args))
    return res.to_dict(), res.converged


def cmd_channel_tomography(args):
    ch = _read_channel(args.channel)
    est, report = channel_tomography(ch, shots_per_probe=args.shots, seed=args.seed, return_report=True)
    truth = choi_state(ch)
    out = {
        "choi": choi_to_json(est),
        "a_marginal_deviation": est.a_marginal_deviation,
        "b_marginal_deviation": est.b_marginal_deviation,
        "bistochastic": is_bistochastic(est, tol=1e-9 if args.shots == 0 else 0.05),
        "trace_distance_to_input": trace_distance(est.state, truth.state),
        "per_probe_visibilities": [float(v) for v in report.per_probe_visibilities],
        "per_probe_stderr": [float(x) for x in report.per_probe_stderr],
        "total_shots": report.total_shots,
    }
    return out, True


def cmd_capacity_test(args):
    res = two_way_capacity_positive(choi_state(_read_channel(args.channel)), _optimizer_config(args))
    out = {
        "verdict": bool(res.verdict),
        "lambda_max": res.lambda_max,
        "stderr": res.stderr,
        "inconclusive": bool(res.inconclusive),
        "converged": bool(res.converged),
    }
    return out, res.converged


def cmd_distill_test(args):
    res = distillability_operator_test(_read_density(args.state))
    return {"verdict": bool(res.verdict), "min_eig": res.min_eig}, True


def _nonneg_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--shots", type=_nonneg_int, default=0, help="shots per setting; 0 = exact")
    common.add_argument("--seed", type=int, default=int(os.environ.get(SEED_ENV, "0")),
                        help=f"random seed (default: ${SEED_ENV} or 0)")
    common.add_argument("-o", "--output", help="write JSON here instead of stdout")
    common.add_argument("--pretty", action="store_true", help="print a human-readable table")

    opt = argparse.ArgumentParser(add_help=False)
    opt.add_argument("--max-iters", type=int, default=2000)
    opt.add_argument("--restarts", type=int, default=5)
    opt.add_argument("--step-size", type=float, default=0.5)

    parser = argparse.ArgumentParser(prog="cswap-estimator", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("overlap", parents=[common], help="tr(rho_a rho_b)")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.set_defaults(func=cmd_overlap)

    for name, func, text in (
        ("tomography", cmd_tomography, "reconstruct a density matrix"),
        ("purity", cmd_purity, "tr(rho^2)"),
        ("bloch", cmd_bloch, "Bloch-vector length of a qubit"),
        ("distill-test", cmd_distill_test, "two-qubit two-way distillability"),
    ):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--state", required=True)
        p.set_defaults(func=func)

    p = sub.add_parser("expectation", parents=[common], help="<A> in a state")
    p.add_argument("--observable", required=True)
    p.add_argument("--state", required=True)
    p.set_defaults(func=cmd_expectation)

    p = sub.add_parser("eigen", parents=[common, opt], help="extremal eigenvalue search")
    p.add_argument("--state", required=True)
    p.add_argument("--which", choices=("min", "max"), default="max")
    p.set_defaults(func=cmd_eigen)

    p = sub.add_parser("channel-tomography", parents=[common], help="Choi state of a channel")
    p.add_argument("--channel", required=True)
    p.set_defaults(func=cmd_channel_tomography)

    p = sub.add_parser("capacity-test", parents=[common, opt], help="qubit channel Q2 > 0 test")
    p.add_argument("--channel", required=True)
    p.set_defaults(func=cmd_capacity_test)
    return parser


def _config_echo(args) -> dict:
    skip = {"func", "output", "pretty"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _render_pretty(doc: dict) -> str:
    rows = []
    for key, value in doc.items():
        if isinstance(value, (dict, list)):
            continue
        rows.append((key, f"{value:.12g}" if isinstance(value, float) else str(value)))
    width = max(len(k) for k, _ in rows)
    return "\n".join(f"{k:<{width}}  {v}" for k, v in rows)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        result, converged = args.func(args)
    except MatrixFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except (InvalidStateError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVARIANT

    doc = dict(result)
    doc["command"] = args.command
    doc["config"] = _config_echo(args)
    doc["version"] = __version__
    doc["timestamp"] = _dt.datetime.now(_dt.timezone.utc).isoformat()
    if args.pretty:
        print(_render_pretty(doc))
    if args.output:
        dump_json(doc, args.output)
    elif not args.pretty:
        print(dump_json(doc))
    if not converged:
        print("warning: optimizer did not converge; best-so-far result reported", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
