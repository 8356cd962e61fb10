"""Command-line interface.

Subcommands: bound, fidelity, kappa, sweep, verify.  Channels are chosen
by name plus parameters (identity, erasure, werner, nr) or loaded from a
JSON file (--channel-file), which also covers mixed-unitary channels.

Exit codes: 0 success, 1 usage error, 2 computation failure,
3 verification-suite failure.  Given identical arguments and seed the
output bytes are identical across runs; wall-clock timings are only
included with --timings.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from .bounds import (
    IDENTIFIERS,
    SUITE_NAMES,
    report,
    sweep,
    sweep_csv_str,
    verify_suite,
)
from .channels import (
    QuantumChannel,
    erasure_channel,
    identity_channel,
    load_channel,
    nr_channel,
    werner_holevo,
)
from .models import CodeClass, fidelity, kappa
from .sdp import SdpSolverError, SolverSettings

CHANNEL_NAMES = ("identity", "erasure", "werner", "nr", "mixed-unitary")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_COMPUTATION = 2
EXIT_VERIFY = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # route argparse errors to exit code 1
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="qcapbound", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add_channel_args(p):
        p.add_argument("--channel", help="channel family name: " + ", ".join(CHANNEL_NAMES))
        p.add_argument("--channel-file", help="path to a channel JSON file")
        p.add_argument("--dim", type=int, help="dimension for identity/erasure/werner")
        p.add_argument("--p", type=float, help="erasure probability")
        p.add_argument("--r", type=float, help="nr family parameter in [0, 0.5]")

    def add_common(p):
        p.add_argument("--tol-gap", type=float, default=None, help="solver gap tolerance")
        p.add_argument("--max-iter", type=int, default=None, help="solver iteration cap")
        p.add_argument("--output", default=None, help="write output to this path instead of stdout")
        p.add_argument("--timings", action="store_true", help="include wall-clock timings in JSON output")

    p_bound = sub.add_parser("bound", help="compute bound identifiers for a channel")
    add_channel_args(p_bound)
    p_bound.add_argument("--bounds", required=True, help="comma-separated identifiers: " + ",".join(IDENTIFIERS))
    p_bound.add_argument("--out", default="text", choices=("text", "json"))
    add_common(p_bound)

    p_fid = sub.add_parser("fidelity", help="optimal code fidelity at size k")
    add_channel_args(p_fid)
    p_fid.add_argument("--k", type=float, required=True)
    p_fid.add_argument("--code", required=True, choices=[c.value for c in CodeClass])
    p_fid.add_argument("--dual", action="store_true", help="also report the dual certificate value")
    p_fid.add_argument("--out", default="text", choices=("text", "json"))
    add_common(p_fid)

    p_kap = sub.add_parser("kappa", help="largest perfect-fidelity code size")
    add_channel_args(p_kap)
    p_kap.add_argument("--code", required=True, choices=[c.value for c in CodeClass])
    p_kap.add_argument("--tol", type=float, default=1e-4, help="bisection bracket width")
    p_kap.add_argument("--out", default="text", choices=("text", "json"))
    add_common(p_kap)

    p_sweep = sub.add_parser("sweep", help="bounds along a channel family")
    p_sweep.add_argument("--family", required=True, choices=("nr",))
    p_sweep.add_argument("--from", dest="start", type=float, required=True)
    p_sweep.add_argument("--to", dest="stop", type=float, required=True)
    p_sweep.add_argument("--steps", type=int, required=True)
    p_sweep.add_argument("--bounds", required=True)
    p_sweep.add_argument("--out", default="csv", choices=("csv", "json"))
    add_common(p_sweep)

    p_ver = sub.add_parser("verify", help="run verification suites")
    p_ver.add_argument("--suites", required=True, help="comma-separated: " + ",".join(SUITE_NAMES))
    p_ver.add_argument("--seed", type=int, default=0)
    add_common(p_ver)
    return parser


def _settings(args) -> SolverSettings | None:
    tol_gap = args.tol_gap
    if tol_gap is None and os.environ.get("QCAP_SOLVER_TOL"):
        try:
            tol_gap = float(os.environ["QCAP_SOLVER_TOL"])
        except ValueError as exc:
            raise UsageError(f"QCAP_SOLVER_TOL is not a number: {exc}") from exc
    kwargs = {}
    if tol_gap is not None:
        kwargs["tol_gap"] = tol_gap
        kwargs["tol_feas"] = tol_gap
    if args.max_iter is not None:
        kwargs["max_iter"] = args.max_iter
    return SolverSettings(**kwargs) if kwargs else None


def _resolve_channel(args) -> QuantumChannel:
    if bool(args.channel) == bool(args.channel_file):
        raise UsageError("exactly one of --channel or --channel-file is required")
    if args.channel_file:
        try:
            return load_channel(args.channel_file)
        except FileNotFoundError as exc:
            raise UsageError(f"channel file not found: {exc.filename}") from exc
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    name = args.channel
    try:
        if name == "identity":
            return identity_channel(_require(args, "dim"))
        if name == "erasure":
            return erasure_channel(_require(args, "dim"), _require(args, "p"))
        if name == "werner":
            return werner_holevo(_require(args, "dim"))
        if name == "nr":
            return nr_channel(_require(args, "r"))
        if name == "mixed-unitary":
            raise UsageError(
                "mixed-unitary channels are file-based; pass --channel-file with "
                "the channel JSON"
            )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    raise UsageError(
        f"unknown channel {name!r}; available channels: " + ", ".join(CHANNEL_NAMES)
    )


def _require(args, field):
    value = getattr(args, field)
    if value is None:
        raise UsageError(f"--{field} is required for --channel {args.channel}")
    return value


def _emit(text: str, args) -> None:
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fp:
            fp.write(text)
    else:
        sys.stdout.write(text)


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _cmd_bound(args) -> int:
    ch = _resolve_channel(args)
    idents = [s for s in args.bounds.split(",") if s]
    try:
        rep = report(ch, idents, settings=_settings(args))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if rep.errors:
        failing = ", ".join(f"{k}: {v}" for k, v in sorted(rep.errors.items()))
        sys.stderr.write(f"computation failed for {failing}\n")
        return EXIT_COMPUTATION
    if args.out == "json":
        _emit(json.dumps(rep.to_dict(include_timings=args.timings), indent=2, sort_keys=True) + "\n", args)
        return EXIT_OK
    lines = [f"channel: {rep.channel_name} ({rep.dims[0]} -> {rep.dims[1]})"]
    for ident in idents:
        lines.append(f"{ident} = {_fmt(rep.values[ident])}")
    v = rep.values
    if "kappaPPTp" in v and "qGamma" in v and "qTheta" in v:
        ok = (
            math.log2(v["kappaPPTp"]) <= v["qGamma"] + 1e-4
            and v["qGamma"] <= v["qTheta"] + 2e-5
        )
        lines.append(
            "chain log2(kappa_pptp) <= Q_Gamma <= Q_Theta: "
            + ("[ok]" if ok else "[VIOLATED]")
        )
    _emit("\n".join(lines) + "\n", args)
    return EXIT_OK


def _cmd_fidelity(args) -> int:
    ch = _resolve_channel(args)
    code = CodeClass.parse(args.code)
    if args.k < 1.0:
        raise UsageError("--k must be >= 1")
    res = fidelity(
        ch, args.k, code, side="both" if args.dual else "primal", settings=_settings(args)
    )
    if args.out == "json":
        payload = {
            "channel": ch.name,
            "k": args.k,
            "code": code.value,
            "value": res.value,
        }
        if args.dual:
            payload["dual_value"] = res.dual_value
        _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", args)
        return EXIT_OK
    lines = [f"fidelity({ch.name}, k={_fmt(args.k)}, {code.value}) = {_fmt(res.value)}"]
    if args.dual:
        lines.append(f"dual bound = {_fmt(res.dual_value)}")
    _emit("\n".join(lines) + "\n", args)
    return EXIT_OK


def _cmd_kappa(args) -> int:
    ch = _resolve_channel(args)
    code = CodeClass.parse(args.code)
    res = kappa(ch, code, tol_k=args.tol, settings=_settings(args))
    if args.out == "json":
        payload = {
            "channel": ch.name,
            "code": code.value,
            "kappa": res.kappa,
            "one_shot_zero_error": res.one_shot_zero_error,
            "bracket": list(res.bracket),
        }
        _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", args)
        return EXIT_OK
    lines = [
        f"kappa({ch.name}, {code.value}) = {_fmt(res.kappa)}",
        f"one-shot zero-error (integer part) = {res.one_shot_zero_error}",
        f"bracket = [{_fmt(res.bracket[0])}, {_fmt(res.bracket[1])}]",
    ]
    _emit("\n".join(lines) + "\n", args)
    return EXIT_OK


def _cmd_sweep(args) -> int:
    idents = [s for s in args.bounds.split(",") if s]
    if args.steps < 1:
        raise UsageError("--steps must be >= 1")
    if args.steps == 1:
        grid = [args.start]
    else:
        step = (args.stop - args.start) / (args.steps - 1)
        grid = [args.start + i * step for i in range(args.steps)]
    try:
        rows = sweep(args.family, grid, idents, settings=_settings(args))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.out == "json":
        payload = [
            {"param": row.parameter, **{k: row.values[k] for k in idents}} for row in rows
        ]
        _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", args)
    else:
        _emit(sweep_csv_str(rows, idents), args)
    return EXIT_OK


def _cmd_verify(args) -> int:
    names = [s for s in args.suites.split(",") if s]
    try:
        rep = verify_suite(names, seed=args.seed, settings=_settings(args))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _emit("\n".join(rep.lines()) + "\n", args)
    return EXIT_OK if rep.passed else EXIT_VERIFY


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "bound":
            return _cmd_bound(args)
        if args.command == "fidelity":
            return _cmd_fidelity(args)
        if args.command == "kappa":
            return _cmd_kappa(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "verify":
            return _cmd_verify(args)
        raise UsageError(f"unknown command {args.command!r}")
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except SdpSolverError as exc:
        sys.stderr.write(f"computation failed: {exc}\n")
        return EXIT_COMPUTATION
    except RuntimeError as exc:
        sys.stderr.write(f"computation failed: {exc}\n")
        return EXIT_COMPUTATION


if __name__ == "__main__":
    sys.exit(main())
