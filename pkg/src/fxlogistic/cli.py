"""Command-line front end.

Subcommands: ``encode``, ``iterate``, ``simulate``, ``compare``, ``lyapunov``.
Defaults reproduce the reference experiment (r = 4, x0 = 0.1, 150
iterations).  Output is CSV or JSON, byte-deterministic, on stdout or in
``--output``; when ``FXLOGISTIC_OUTDIR`` is set, output without ``--output``
goes to ``$FXLOGISTIC_OUTDIR/<subcommand>.<format>``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from decimal import Decimal, InvalidOperation, localcontext
from pathlib import Path
from typing import Any, Optional, Sequence

from . import __version__
from .analysis import DEFAULT_EPSILON, divergence, lyapunov
from .ctrlsim import SimConfig, TraceEvent, run_sim
from .errors import FxLogisticError, ParseError
from .fixq16 import Fix32, RoundMode, decode, encode, format_decimal
from .uoml import MapParams, Orbit, run_orbit

OUTDIR_ENV = "FXLOGISTIC_OUTDIR"

EXIT_CODES = {
    "usage": 2,
    "parse": 3,
    "range": 4,
    "domain": 5,
    "config": 6,
    "insufficient-data": 7,
    "comparison": 8,
    "io": 9,
}

ORBIT_COLUMNS = ["n", "x_hex", "x_decimal", "overflow", "underflow"]
TRACE_COLUMNS = [
    "cycle", "fsm_state", "counter", "ready", "o_done", "done_all",
    "x_reg_hex", "x_reg_decimal", "o_over", "o_under",
]
COMPARE_COLUMNS = [
    "n", "x_trunc_hex", "x_trunc_decimal", "x_ceil_hex", "x_ceil_decimal",
    "abs_diff_hex", "abs_diff",
]


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # one line, no usage dump
        sys.stderr.write(f"error[usage]: {message}\n")
        raise SystemExit(EXIT_CODES["usage"])


def parse_decimal(text: str) -> Decimal:
    try:
        value = Decimal(text.strip())
    except InvalidOperation:
        raise ParseError(f"{text!r} is not a decimal number") from None
    if not value.is_finite():
        raise ParseError(f"{text!r} is not a finite decimal number")
    return value


def _fix_dict(prefix: str, x: Fix32) -> dict[str, str]:
    return {f"{prefix}_hex": x.hex, f"{prefix}_decimal": x.decimal}


def _params_dict(p: MapParams, args: argparse.Namespace) -> dict[str, Any]:
    out: dict[str, Any] = {}
    out.update(_fix_dict("r", p.r))
    out.update(_fix_dict("x0", p.x0))
    out["rounding"] = p.mode.label
    out["i_round"] = int(p.mode)
    out["encode_rounding"] = args.encode_rounding.label
    out["n_iter"] = p.n_iter
    return out


def _orbit_rows(orbit: Orbit) -> list[list[Any]]:
    return [
        [rec.n, rec.x.hex, rec.x.decimal, int(rec.overflow), int(rec.underflow)]
        for rec in orbit.records
    ]


def _orbit_json_records(orbit: Orbit) -> list[dict[str, Any]]:
    return [
        {
            "n": rec.n,
            "x_hex": rec.x.hex,
            "x_decimal": rec.x.decimal,
            "overflow": rec.overflow,
            "underflow": rec.underflow,
        }
        for rec in orbit.records
    ]


def _csv_text(header: Optional[Sequence[str]], rows: Sequence[Sequence[Any]], footer: Sequence[str] = ()) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if header is not None:
        writer.writerow(header)
    writer.writerows(rows)
    for line in footer:
        buf.write(f"# {line}\n")
    return buf.getvalue()


def _json_text(doc: dict[str, Any]) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _kv_rows(doc: dict[str, Any]) -> list[list[Any]]:
    rows = []
    for key, value in doc.items():
        if isinstance(value, float):
            value = repr(value)
        elif value is None:
            value = "none"
        rows.append([key, value])
    return rows


def _params_from_args(args: argparse.Namespace, n_iter: int, mode: Optional[RoundMode] = None) -> MapParams:
    return MapParams(
        encode(parse_decimal(args.r), args.encode_rounding),
        encode(parse_decimal(args.x0), args.encode_rounding),
        args.rounding if mode is None else mode,
        n_iter,
    )


def trace_text(config: SimConfig, trace: Sequence[TraceEvent]) -> str:
    """Trace CSV: one notes line, one column header line, one row per cycle."""
    notes = (
        f"# fxlogistic trace; uoml_latency={config.uoml_latency}; it_max={config.it_max}; "
        "done_all half-cycle pulse drawn as one full cycle; reset sampled at cycle edges; "
        "counter increments with the X_n load\n"
    )
    rows = [
        [
            ev.cycle, ev.fsm.value, ev.counter, ev.ready, ev.done_pulse, ev.done_all,
            ev.x_reg.hex, ev.x_reg.decimal, ev.o_over, ev.o_under,
        ]
        for ev in trace
    ]
    return notes + _csv_text(TRACE_COLUMNS, rows)


# -- subcommands -------------------------------------------------------------

def cmd_encode(args: argparse.Namespace) -> str:
    value = parse_decimal(args.value)
    x = encode(value, args.rounding)
    with localcontext() as ctx:
        ctx.prec = 80
        error = value - decode(x)
    doc = {
        "command": "encode",
        "input": args.value.strip(),
        "rounding": args.rounding.label,
        "raw": x.raw,
        "x_hex": x.hex,
        "x_decimal": x.decimal,
        "error": format_decimal(error),
    }
    if args.format == "json":
        return _json_text(doc)
    return _csv_text(["field", "value"], _kv_rows({k: v for k, v in doc.items() if k != "command"}))


def cmd_iterate(args: argparse.Namespace) -> str:
    params = _params_from_args(args, args.n)
    orbit = run_orbit(params)
    if args.format == "json":
        return _json_text(
            {"command": "iterate", "params": _params_dict(params, args), "records": _orbit_json_records(orbit)}
        )
    return _csv_text(ORBIT_COLUMNS, _orbit_rows(orbit))


def cmd_simulate(args: argparse.Namespace) -> str:
    params = _params_from_args(args, args.it_max)
    config = SimConfig(params, args.it_max, args.latency)
    orbit, trace = run_sim(config)
    trace_path = args.trace
    if trace_path is None:
        if args.output is not None:
            trace_path = str(Path(args.output).with_suffix(".trace.csv"))
        elif os.environ.get(OUTDIR_ENV):
            trace_path = str(Path(os.environ[OUTDIR_ENV]) / "simulate.trace.csv")
    if trace_path is not None:
        _write(trace_path, trace_text(config, trace))
    if args.format == "json":
        return _json_text(
            {
                "command": "simulate",
                "params": _params_dict(orbit.params, args),
                "it_max": config.it_max,
                "uoml_latency": config.uoml_latency,
                "cycles": len(trace),
                "records": _orbit_json_records(orbit),
            }
        )
    return _csv_text(ORBIT_COLUMNS, _orbit_rows(orbit))


def cmd_compare(args: argparse.Namespace) -> str:
    eps_text = args.epsilon.strip()
    epsilon = float(parse_decimal(eps_text))
    trunc = run_orbit(_params_from_args(args, args.n, RoundMode.TRUNC))
    ceil = run_orbit(_params_from_args(args, args.n, RoundMode.CEIL))
    profile = divergence(trunc, ceil)
    first_bit = profile.first_bit_divergence
    first_visible = profile.first_visible_divergence(epsilon)
    rows = []
    for rt, rc in zip(trunc.records, ceil.records):
        diff = Fix32(abs(rt.x.raw - rc.x.raw))
        rows.append([rt.n, rt.x.hex, rt.x.decimal, rc.x.hex, rc.x.decimal, diff.hex, diff.decimal])
    if args.format == "json":
        params = _params_dict(trunc.params, args)
        del params["rounding"], params["i_round"]
        return _json_text(
            {
                "command": "compare",
                "params": params,
                "records": [dict(zip(COMPARE_COLUMNS, row)) for row in rows],
                "summary": {
                    "epsilon": eps_text,
                    "first_bit_divergence": first_bit,
                    "first_visible_divergence": first_visible,
                },
            }
        )
    footer = [
        f"epsilon={eps_text}",
        f"first_bit_divergence={'none' if first_bit is None else first_bit}",
        f"first_visible_divergence={'none' if first_visible is None else first_visible}",
    ]
    return _csv_text(COMPARE_COLUMNS, rows, footer)


def cmd_lyapunov(args: argparse.Namespace) -> str:
    params = _params_from_args(args, args.n)
    est = lyapunov(run_orbit(params), debug=args.debug)
    doc: dict[str, Any] = {"command": "lyapunov"}
    doc.update(_params_dict(params, args))
    doc.update(
        {
            "lambda": est.exponent,
            "n_used": est.n_used,
            "skipped": est.skipped,
            "reference": est.reference,
            "deviation": est.deviation,
        }
    )
    if args.debug:
        doc["abs_log_form"] = est.abs_log_form
    if args.format == "json":
        return _json_text(doc)
    del doc["command"]
    return _csv_text(["field", "value"], _kv_rows(doc))


# -- plumbing ----------------------------------------------------------------

class _IOFailure(FxLogisticError):
    category = "io"


def _write(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise _IOFailure(f"cannot write {path}: {exc.strerror}") from exc


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("-o", "--output", default=None, help="output file (default: stdout)")


def _add_map_args(p: argparse.ArgumentParser, with_mode: bool = True) -> None:
    p.add_argument("--r", default="4", help="map parameter r, exact decimal (default 4)")
    p.add_argument("--x0", default="0.1", help="initial condition, exact decimal (default 0.1)")
    if with_mode:
        p.add_argument(
            "--rounding", type=RoundMode.parse, default=RoundMode.TRUNC,
            help="datapath rounding: trunc (i_round=0) or ceil (i_round=1, toward +inf)",
        )
    p.add_argument(
        "--encode-rounding", type=RoundMode.parse, default=RoundMode.TRUNC,
        help="rounding used to quantize r and x0 (default trunc)",
    )


def _int_arg(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fxlogistic", description="Q16.16 logistic map reference model")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("encode", help="quantize a decimal to Q16.16")
    p.add_argument("value")
    p.add_argument("--rounding", type=RoundMode.parse, default=RoundMode.TRUNC)
    _add_common(p)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("iterate", help="run the datapath for n iterations")
    _add_map_args(p)
    p.add_argument("-n", "--n", type=_int_arg, default=150)
    _add_common(p)
    p.set_defaults(func=cmd_iterate)

    p = sub.add_parser("simulate", help="cycle-level run of the control unit")
    _add_map_args(p)
    p.add_argument("--it-max", type=_int_arg, default=150)
    p.add_argument("--latency", type=_int_arg, default=4, help="cycles per datapath iteration")
    p.add_argument("--trace", default=None, help="per-cycle trace CSV path")
    _add_common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="truncation vs ceiling orbits side by side")
    _add_map_args(p, with_mode=False)
    p.add_argument("-n", "--n", type=_int_arg, default=150)
    p.add_argument("--epsilon", default=str(DEFAULT_EPSILON))
    _add_common(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("lyapunov", help="Lyapunov exponent of the fixed-point orbit")
    _add_map_args(p)
    p.add_argument("-n", "--n", type=_int_arg, default=150)
    p.add_argument("--debug", action="store_true", help="also report the mean of |ln|f'||")
    _add_common(p)
    p.set_defaults(func=cmd_lyapunov)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = args.func(args)
        output = args.output
        if output is None and os.environ.get(OUTDIR_ENV):
            output = str(Path(os.environ[OUTDIR_ENV]) / f"{args.command}.{args.format}")
        if output is None:
            sys.stdout.write(text)
        else:
            _write(output, text)
    except FxLogisticError as exc:
        sys.stderr.write(f"error[{exc.category}]: {exc}\n")
        return EXIT_CODES.get(exc.category, 1)
    return 0
