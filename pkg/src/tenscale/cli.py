"""Command-line surface.

Exit codes: 0 for SCALED/IN, 1 for NOT_IN_POLYTOPE/EPS_FAR (and failed
checks), 2 for usage or validation errors, 3 for numeric failures.
Reports are JSON, written to --out or standard output.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

import numpy as np

from . import io
from .hwv import (
    EvalBudgetError,
    check_hwv_transformation,
    evaluate_hwv,
    evaluation_bound,
)
from .oracle import (
    IN,
    KroneckerQuery,
    gap_constant,
    kronecker_support,
    membership,
    qmp,
    sinkhorn,
)
from .reduction import reduce_tensor
from .scaling import (
    BOREL,
    PARABOLIC,
    SCALED,
    THEORETICAL,
    DEFAULT_RAND_RANGE,
    ScalingConfig,
    TargetSpectrum,
    fixed_tensor_parametrization,
    identity_parametrization,
    mps_parametrization,
    mps_tensor,
    orbit_parametrization,
    run_general_scaling,
    run_scaling,
)
from .tensors import Tensor


class UsageError(ValueError):
    pass


def _parse_rand_range(text: str) -> int | str:
    if text == THEORETICAL:
        return THEORETICAL
    try:
        value = int(text)
    except ValueError as exc:
        raise UsageError(f"--rand-range must be an integer or '{THEORETICAL}'") from exc
    if value < 1:
        raise UsageError("--rand-range must be >= 1")
    return value


def _config(args: argparse.Namespace) -> ScalingConfig:
    if args.epsilon <= 0:
        raise UsageError("--epsilon must be positive")
    return ScalingConfig(
        epsilon=args.epsilon,
        seed=args.seed,
        rand_range=_parse_rand_range(args.rand_range),
        mode=args.mode,
        max_iters=args.max_iters,
        randomize=not getattr(args, "no_randomize", False),
    )


def _load_target(args: argparse.Namespace, dims: Sequence[int]) -> TargetSpectrum:
    if args.target == "uniform":
        return TargetSpectrum.uniform(dims)
    return io.load_spectrum(args.target)


def _emit(obj: dict, out: str | None) -> None:
    text = io.dumps_canonical(obj)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv_ints(text: str, flag: str) -> tuple[int, ...]:
    try:
        values = tuple(int(v) for v in text.split(","))
    except ValueError as exc:
        raise UsageError(f"{flag} expects comma-separated integers") from exc
    if not values or any(v < 0 for v in values):
        raise UsageError(f"{flag} expects nonnegative integers")
    return values


def _add_run_flags(sub: argparse.ArgumentParser, *, target: bool = True) -> None:
    if target:
        sub.add_argument("--target", required=True,
                         help="spectrum JSON path, or the shorthand 'uniform'")
    sub.add_argument("--epsilon", type=float, required=True)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--rand-range", default=str(DEFAULT_RAND_RANGE),
                     help=f"integer sampling range or '{THEORETICAL}'")
    sub.add_argument("--mode", choices=[BOREL, PARABOLIC], default=BOREL)
    sub.add_argument("--max-iters", type=int, default=None)
    sub.add_argument("--no-randomize", action="store_true",
                     help="start from the identity instead of a random basis")
    sub.add_argument("--out", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tenscale",
        description="Tensor scaling to prescribed marginal spectra and "
                    "moment-polytope decision front-ends.")
    commands = parser.add_subparsers(dest="command", required=True)

    scale = commands.add_parser("scale", help="scale a tensor to a target")
    scale.add_argument("--tensor", required=True)
    _add_run_flags(scale)

    general = commands.add_parser(
        "general-scale", help="scale a sampled point of a parametrized variety")
    src = general.add_mutually_exclusive_group(required=True)
    src.add_argument("--dims", help="identity parametrization on 1;DIMS")
    src.add_argument("--mps", help="JSON file with matrix-product site data")
    src.add_argument("--orbit-tensor", help="tensor JSON for the orbit map")
    general.add_argument("--sites", type=int, default=None,
                         help="number of tensor factors for --mps")
    _add_run_flags(general)

    member = commands.add_parser("membership",
                                 help="promise membership for a fixed tensor")
    member.add_argument("--tensor", required=True)
    member.add_argument("--repeats", type=int, default=6)
    member.add_argument("--gap-constant-c", type=float, default=None,
                        help="also report the separation threshold for this "
                             "constant")
    _add_run_flags(member)

    qmp_cmd = commands.add_parser("qmp", help="one-body marginal realizability")
    qmp_cmd.add_argument("--dims", required=True)
    qmp_cmd.add_argument("--repeats", type=int, default=6)
    qmp_cmd.add_argument("--gap-constant-c", type=float, default=None)
    _add_run_flags(qmp_cmd)

    kron = commands.add_parser("kronecker",
                               help="asymptotic Kronecker support query")
    kron.add_argument("--lam", required=True)
    kron.add_argument("--mu", required=True)
    kron.add_argument("--nu", required=True)
    kron.add_argument("--n", type=int, default=0)
    kron.add_argument("--repeats", type=int, default=6)
    kron.add_argument("--gap-constant-c", type=float, default=None)
    _add_run_flags(kron, target=False)

    reduce_cmd = commands.add_parser(
        "reduce", help="expand a tensor for the uniform-scaling reduction")
    reduce_cmd.add_argument("--tensor", required=True)
    reduce_cmd.add_argument("--lambdas", required=True,
                            help="JSON list of partitions, one per factor")
    reduce_cmd.add_argument("--out", default=None)

    verify = commands.add_parser("verify-hwv",
                                 help="evaluate a weight vector and its bounds")
    verify.add_argument("--tensor", required=True)
    verify.add_argument("--spec", required=True)
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--out", default=None)

    sink = commands.add_parser("sinkhorn", help="classical matrix scaling")
    sink.add_argument("--matrix", required=True,
                      help="JSON file with a nonnegative nested-array matrix")
    sink.add_argument("--rows", required=True,
                      help="comma-separated row target sums")
    sink.add_argument("--cols", required=True,
                      help="comma-separated column target sums")
    sink.add_argument("--epsilon", type=float, required=True)
    sink.add_argument("--max-iters", type=int, default=10_000)
    sink.add_argument("--out", default=None)
    return parser


def _gap_field(args, dims, ell) -> dict:
    c = getattr(args, "gap_constant_c", None)
    if c is None:
        return {}
    return {"gapConstant": gap_constant(dims, ell, c), "gapConstantC": c}


def _cmd_scale(args) -> int:
    x = io.load_tensor(args.tensor)
    p = _load_target(args, x.dims)
    report = run_scaling(x, p, _config(args))
    _emit({"command": "scale", **io.report_to_obj(report)}, args.out)
    return 0 if report.verdict == SCALED else 1


def _cmd_general_scale(args) -> int:
    if args.dims:
        dims = _csv_ints(args.dims, "--dims")
        phi = identity_parametrization(dims)
    elif args.mps:
        with open(args.mps) as fh:
            obj = json.load(fh)
        if not isinstance(obj, dict):
            raise UsageError("--mps file must hold a JSON object")
        sites = args.sites or obj.get("sites")
        if not sites:
            raise UsageError("give --sites (or a 'sites' key) for --mps")
        if "matrices" in obj:
            # explicit site matrices: scale the ray through that tensor
            mats = [np.asarray(m, dtype=complex) for m in obj["matrices"]]
            phi = fixed_tensor_parametrization(mps_tensor(mats, int(sites)))
            dims = (len(mats),) * int(sites)
        elif "n" in obj and "bond" in obj:
            phi = mps_parametrization(int(obj["n"]), int(obj["bond"]),
                                      int(sites))
            dims = (int(obj["n"]),) * int(sites)
        else:
            raise UsageError("--mps file needs 'matrices' or 'n' and 'bond'")
    else:
        x0 = io.load_tensor(args.orbit_tensor)
        phi = orbit_parametrization(x0)
        dims = x0.dims
    p = _load_target(args, dims)
    report, sample = run_general_scaling(phi, p, _config(args))
    obj = {"command": "general-scale", **io.report_to_obj(report)}
    if sample.norm() > 0 and sample.is_gaussian_integer():
        obj["sample"] = io.tensor_to_obj(sample)
    _emit(obj, args.out)
    return 0 if report.verdict == SCALED else 1


def _cmd_membership(args) -> int:
    x = io.load_tensor(args.tensor)
    p = _load_target(args, x.dims)
    verdict = membership(x, p, args.epsilon, cfg=_config(args),
                         repeats=args.repeats)
    obj = {"command": "membership", **io.verdict_to_obj(verdict),
           **_gap_field(args, x.dims, p.denominator_lcm)}
    _emit(obj, args.out)
    return 0 if verdict.answer == IN else 1


def _cmd_qmp(args) -> int:
    dims = _csv_ints(args.dims, "--dims")
    p = _load_target(args, dims)
    verdict = qmp(p, dims, args.epsilon, cfg=_config(args), repeats=args.repeats)
    obj = {"command": "qmp", **io.verdict_to_obj(verdict),
           **_gap_field(args, dims, p.denominator_lcm)}
    _emit(obj, args.out)
    return 0 if verdict.answer == IN else 1


def _cmd_kronecker(args) -> int:
    query = KroneckerQuery(lam=_csv_ints(args.lam, "--lam"),
                           mu=_csv_ints(args.mu, "--mu"),
                           nu=_csv_ints(args.nu, "--nu"), n=args.n)
    verdict = kronecker_support(query, args.epsilon, cfg=_config(args),
                                repeats=args.repeats)
    point = query.normalized_point()
    obj = {"command": "kronecker", "lam": list(query.lam),
           "mu": list(query.mu), "nu": list(query.nu), "n": query.n,
           **io.verdict_to_obj(verdict),
           **_gap_field(args, (query.n,) * 3, point.denominator_lcm)}
    _emit(obj, args.out)
    return 0 if verdict.answer == IN else 1


def _cmd_reduce(args) -> int:
    x = io.load_tensor(args.tensor)
    try:
        lams = json.loads(args.lambdas)
    except json.JSONDecodeError as exc:
        raise UsageError(f"--lambdas is not valid JSON: {exc}") from exc
    reduced = reduce_tensor(x, lams)
    _emit({"command": "reduce", "tensor": io.tensor_to_obj(reduced)}, args.out)
    return 0


def _cmd_verify_hwv(args) -> int:
    x = io.load_tensor(args.tensor)
    spec = io.load_hwv_spec(args.spec)
    value = evaluate_hwv(spec, x)
    bound = evaluation_bound(spec, x)
    rng = np.random.default_rng(args.seed)
    group = []
    for n in x.dims:
        upper = np.triu(rng.standard_normal((n, n))
                        + 1j * rng.standard_normal((n, n)), k=1)
        group.append(np.eye(n) + np.diag(1.0 + rng.random(n)) + upper)
    transform_ok = check_hwv_transformation(spec, x, group)
    ok = abs(value) <= bound * (1 + 1e-9) and transform_ok
    _emit({"command": "verify-hwv",
           "value": {"re": value.real, "im": value.imag},
           "abs": abs(value), "bound": bound,
           "boundOk": abs(value) <= bound * (1 + 1e-9),
           "transformOk": transform_ok}, args.out)
    return 0 if ok else 1


def _cmd_sinkhorn(args) -> int:
    with open(args.matrix) as fh:
        matrix = np.asarray(json.load(fh), dtype=float)
    rows = [float(v) for v in args.rows.split(",")]
    cols = [float(v) for v in args.cols.split(",")]
    result = sinkhorn(matrix, rows, cols, args.epsilon, max_iters=args.max_iters)
    _emit({"command": "sinkhorn",
           "scalable": result.scalable,
           "converged": result.converged,
           "iterations": result.iterations,
           "matrix": [[float(v) for v in row] for row in result.matrix],
           "rowScale": [float(v) for v in result.row_scale],
           "colScale": [float(v) for v in result.col_scale]},
          args.out)
    return 0 if result.converged else 1


_HANDLERS = {
    "scale": _cmd_scale,
    "general-scale": _cmd_general_scale,
    "membership": _cmd_membership,
    "qmp": _cmd_qmp,
    "kronecker": _cmd_kronecker,
    "reduce": _cmd_reduce,
    "verify-hwv": _cmd_verify_hwv,
    "sinkhorn": _cmd_sinkhorn,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return _HANDLERS[args.command](args)
    except (UsageError, io.SchemaError, ValueError, FileNotFoundError,
            json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ArithmeticError, EvalBudgetError, np.linalg.LinAlgError,
            OverflowError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
