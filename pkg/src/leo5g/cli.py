"""``leo5g`` command line.

Exit codes: 0 success, 2 invalid scenario/arguments, 1 runtime failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import report as rp
from .scenario import Scenario, ScenarioError

EXIT_OK, EXIT_RUNTIME, EXIT_INVALID = 0, 1, 2


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--scenario", type=Path, help="flat JSON scenario file")
    p.add_argument("--seed", type=int)
    p.add_argument("--output", type=Path, help="write the artifact here instead of stdout")
    p.add_argument("--format", choices=("csv", "json", "text"))
    p.add_argument("--payload", choices=("transparent", "regenerative"))
    p.add_argument("--altitude", type=float, help="orbit altitude, km")
    p.add_argument("--elev-user", type=float, help="user-satellite elevation, deg")
    p.add_argument("--elev-gw", type=float, help="gateway-satellite elevation, deg")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="leo5g", description="5G NR over transparent LEO feasibility tools")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("delay", parents=[common], help="propagation-delay budget")
    d = sub.add_parser("doppler", parents=[common], help="Doppler summary; csv gives a pass time series")
    d.add_argument("--step", type=float, default=1.0, help="pass sampling step, s")
    sub.add_parser("residual-sweep", parents=[common], help="residual Doppler vs elevation and position error")
    n = sub.add_parser("numerology", parents=[common], help="SCS family and CFO verdicts")
    n.add_argument("--index", type=int, help="numerology index")
    ra = sub.add_parser("ra", parents=[common], help="simulate the Random Access procedure")
    ra.add_argument("--mode", choices=("contention_based", "contention_free", "adhoc_deployment"))
    ra.add_argument("--rar-window", type=float)
    ra.add_argument("--contention-resolution", type=float)
    ra.add_argument("--extended", action="store_true", default=None, help="allow timers above the standard caps")
    ra.add_argument("--loss", type=float, help="per-message loss probability")
    sub.add_parser("harq-dim", parents=[common], help="HARQ process, DCI and buffer dimensioning")
    h = sub.add_parser("harq", parents=[common], help="simulate HARQ and compare mitigation strategies")
    h.add_argument("--error-prob", type=float)
    h.add_argument("--duration", type=float, help="simulated time, ms")
    h.add_argument("--processes", type=int)
    h.add_argument("--ack-mode", choices=("one_bit", "two_bit", "disabled"))
    h.add_argument("--workers", type=int, default=1)
    r = sub.add_parser("report", parents=[common], help="consolidated feasibility report")
    r.add_argument("--workers", type=int, default=1)
    return parser


def load_scenario(args: argparse.Namespace) -> Scenario:
    s = Scenario.load(args.scenario) if args.scenario else Scenario()
    changes = dict(
        seed=args.seed,
        payload_mode=args.payload,
        altitude_km=args.altitude,
        elev_user_deg=args.elev_user,
        elev_gw_deg=args.elev_gw,
        numerology_index=getattr(args, "index", None),
        ra_mode=getattr(args, "mode", None),
        rar_window_ms=getattr(args, "rar_window", None),
        contention_resolution_ms=getattr(args, "contention_resolution", None),
        ra_extended=getattr(args, "extended", None),
        ra_loss_probability=getattr(args, "loss", None),
        harq_error_prob=getattr(args, "error_prob", None),
        harq_duration_ms=getattr(args, "duration", None),
        harq_n_processes=getattr(args, "processes", None),
        harq_ack_mode=getattr(args, "ack_mode", None),
    )
    try:
        return s.override(**changes)
    except ScenarioError:
        raise
    except ValueError as exc:
        raise ScenarioError("<arguments>", str(exc)) from None


def _render(command: str, s: Scenario, args: argparse.Namespace) -> dict[str, str]:
    """Artifacts keyed by file suffix; "" is the primary artifact."""
    if command == "report":
        rec = rp.build_report(s, args.workers)
        text = rp.render_text(rec)
        if args.format == "text":
            return {"": text}
        return {"": rp.to_json(rec), ".txt": text}
    return {"": _render_one(command, s, args)}


def _render_one(command: str, s: Scenario, args: argparse.Namespace) -> str:
    fmt = args.format
    if command == "delay":
        rec = rp.delay_record(s)
        return rp.to_json(rec) if fmt == "json" else rp.to_csv([rec], list(rec)) if fmt == "csv" else rp.delay_text(rec)
    if command == "doppler":
        if fmt == "csv":
            return rp.to_csv(rp.pass_rows(s, args.step), rp.PASS_COLUMNS)
        rec = rp.doppler_record(s)
        return rp.to_json(rec) if fmt == "json" else rp.kv_text(rec)
    if command == "residual-sweep":
        rows = rp.residual_rows(s)
        return rp.to_json(rows) if fmt == "json" else rp.to_csv(rows, rp.RESIDUAL_COLUMNS)
    if command == "numerology":
        rec = rp.numerology_record(s)
        if fmt == "csv":
            return rp.to_csv(rec["family"], ("index", "scs_khz", "max_cfo_khz", "feasible", "margin_hz"))
        return rp.to_json(rec) if fmt == "json" else rp.kv_text(rec)
    if command == "ra":
        rec = rp.ra_record(s)
        return rp.kv_text(rec) if fmt == "text" else rp.to_json(rec)
    if command == "harq-dim":
        rec = rp.harq_dim_record(s)
        return rp.kv_text(rec) if fmt == "text" else rp.to_json(rec)
    if command == "harq":
        rec = rp.harq_record(s, args.workers)
        if fmt == "csv":
            return rp.to_csv(rec["strategies"], rp.HARQ_COLUMNS)
        return rp.kv_text(rec) if fmt == "text" else rp.to_json(rec)
    raise AssertionError(command)  # pragma: no cover


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        s = load_scenario(args)
        artifacts = _render(args.command, s, args)
    except (ScenarioError, ValueError) as exc:
        print(f"leo5g: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"leo5g: {args.command} failed: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    try:
        if args.output is None:
            sys.stdout.write(artifacts[""])
        else:
            for suffix, text in artifacts.items():
                path = args.output.with_suffix(suffix) if suffix else args.output
                with open(path, "w", newline="\n") as fh:
                    fh.write(text)
    except OSError as exc:
        print(f"leo5g: cannot write output: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK
