"""Command line entry point.

Subcommands: ``dipoles`` (hyperfine dipole matrix), ``pulses`` (sampled
pulse fields), ``simulate`` (population time trace), ``diagnostics``
(adiabatic-frame trace), ``sweep`` (parameter scans from a JSON config).

Exit codes: 0 success, 1 validation error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .atomic import HalfInt, build_rb87_system
from .dynamics import StepUnderflowError
from .experiments import (SweepSpec, emit, run_diagnostics_trace, run_sweep,
                          run_time_trace, _train_for)
from .pulses import field_at


def _add_point_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--protocol", choices=("stirap", "jump"),
                        default="jump")
    parser.add_argument("--n-pairs", type=int, default=6)
    parser.add_argument("--bandwidth-ratio", type=float, default=1.0 / 30.0,
                        help="pulse bandwidth over the ground splitting")
    parser.add_argument("--area-error", type=float, default=0.0,
                        help="pulse area error in rad")
    parser.add_argument("--detuning2-mhz", type=float, default=0.0,
                        help="two-photon detuning in MHz")
    parser.add_argument("--phase-mode", choices=("locked", "centered"),
                        default="locked")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="raman",
        description="Raman pulse synthesis and propagation toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dipoles", help="hyperfine dipole matrix")
    p.add_argument("--mf", type=float, default=1.0)
    p.add_argument("--out", default="-")
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("pulses", help="sampled pump/Stokes fields")
    _add_point_flags(p)
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--out", default="-")
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("simulate", help="population time trace")
    _add_point_flags(p)
    p.add_argument("--tier", action="append", default=None,
                   help="model tier; repeatable (default rwa3)")
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--out", default="-")
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("diagnostics", help="adiabatic-frame trace")
    _add_point_flags(p)
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--out", default="-")
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("sweep", help="parameter scan from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default="-")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--workers", type=int, default=None)
    return parser


def _write(text: str, out: str) -> None:
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _emit_result(result, fmt: str, out: str) -> None:
    if out == "-":
        import tempfile

        with tempfile.NamedTemporaryFile("r", suffix=f".{fmt}") as tmp:
            emit(result, fmt, tmp.name)
            with open(tmp.name, encoding="utf-8") as fh:
                sys.stdout.write(fh.read())
    else:
        emit(result, fmt, out)


def _cmd_dipoles(args) -> int:
    system = build_rb87_system(mF=HalfInt.of(args.mf))
    rows = [
        ("mu_11p", system.mu_11p),
        ("mu_12p", system.mu_12p),
        ("mu_21p", system.mu_21p),
        ("mu_22p", system.mu_22p),
    ]
    if args.format == "csv":
        text = "element,value_au\n"
        text += "".join(f"{name},{value:.9g}\n" for name, value in rows)
    else:
        text = json.dumps({name: value for name, value in rows}, indent=2)
        text += "\n"
    _write(text, args.out)
    return 0


def _cmd_pulses(args) -> int:
    system = build_rb87_system()
    train = _train_for(args.protocol, system, args.bandwidth_ratio,
                       args.n_pairs, args.area_error)
    grid = np.linspace(train.t_start, train.t_end, args.samples)
    rows = [(t,) + field_at(train, t) for t in grid]
    if args.format == "csv":
        text = "t_ns,E_pump,E_stokes\n"
        text += "".join(f"{t:.9g},{ep:.9g},{es:.9g}\n" for t, ep, es in rows)
    else:
        text = json.dumps({
            "columns": ["t_ns", "E_pump", "E_stokes"],
            "rows": [[float(v) for v in row] for row in rows],
        }, indent=2) + "\n"
    _write(text, args.out)
    return 0


def _point_spec(args, kind: str, tiers: tuple) -> SweepSpec:
    return SweepSpec(
        kind=kind,
        protocol=args.protocol,
        tiers=tiers,
        fixed={
            "n_pairs": args.n_pairs,
            "bandwidth_ratio": args.bandwidth_ratio,
            "area_error": args.area_error,
            "detuning2_mhz": args.detuning2_mhz,
        },
    )


def _cmd_simulate(args) -> int:
    tiers = tuple(args.tier) if args.tier else ("rwa3",)
    spec = _point_spec(args, "time_trace", tiers)
    result = run_time_trace(spec, n_samples=args.samples)
    _emit_result(result, args.format, args.out)
    return 0


def _cmd_diagnostics(args) -> int:
    spec = _point_spec(args, "diagnostics_trace", ("rwa3",))
    result = run_diagnostics_trace(spec, n_samples=args.samples)
    _emit_result(result, args.format, args.out)
    return 0


def _cmd_sweep(args) -> int:
    with open(args.config, encoding="utf-8") as fh:
        spec = SweepSpec.from_json(fh.read())
    result = run_sweep(spec, workers=args.workers)
    _emit_result(result, args.format, args.out)
    return 0


_COMMANDS = {
    "dipoles": _cmd_dipoles,
    "pulses": _cmd_pulses,
    "simulate": _cmd_simulate,
    "diagnostics": _cmd_diagnostics,
    "sweep": _cmd_sweep,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (StepUnderflowError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
