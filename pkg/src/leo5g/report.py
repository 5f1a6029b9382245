"""Assemble module outputs into records, CSV tables and the feasibility report."""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import brentq

from . import _kernels
from . import doppler as dop
from .geometry import (
    PassGeometry,
    horizon_central_angle,
    orbital_speed,
)
from .harq import buffer_requirement, compare_strategies, dci_process_bits, min_processes, simulate_harq
from .numerology import SCS_FAMILY_KHZ, index_from_scs, max_tolerable_cfo, waveform_feasibility, Numerology
from .random_access import RaMode, analyze_timers, min_rar_window, simulate_ra, timing_advance_from_geometry
from .scenario import Scenario

RESIDUAL_COLUMNS = ("elevation_deg", "error_km", "direction", "residual_hz")
HARQ_COLUMNS = ("strategy", "n_processes", "utilization", "retransmissions", "peak_buffer", "dci_bits")
LTE_PROCESSES = 8


def to_csv(rows: Iterable[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(columns), extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _fmt(row[k]) for k in columns})
    return buf.getvalue()


def _fmt(value):
    if isinstance(value, float):
        return repr(value)
    return value


def to_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# -- per-command records ---------------------------------------------------

def delay_record(s: Scenario) -> dict:
    rec = s.budget().as_dict()
    rec.update(elev_user_deg=s.elev_user_deg, elev_gw_deg=s.elev_gw_deg, altitude_km=s.altitude_km)
    return rec


def doppler_record(s: Scenario) -> dict:
    orbit, earth = s.orbit(), s.earth()
    dl, ul = s.downlink(), s.uplink()
    return {
        "orbital_speed_km_s": orbital_speed(orbit, earth),
        "min_elevation_deg": 0.0,
        "max_doppler_dl_hz": dop.max_doppler(dl, 0.0, orbit, earth),
        "max_doppler_ul_hz": dop.max_doppler(ul, 0.0, orbit, earth),
        "doppler_dl_at_user_elevation_hz": dop.instantaneous_doppler(dl, s.elev_user_deg, orbit, earth),
        "doppler_ul_at_user_elevation_hz": dop.instantaneous_doppler(ul, s.elev_user_deg, orbit, earth),
        "terrestrial_speed_kmh": s.terrestrial_speed_kmh,
        "terrestrial_doppler_hz": dop.terrestrial_doppler(s.terrestrial_speed_kmh, s.terrestrial_frequency_hz, earth),
    }


def pass_rows(s: Scenario, step_s: float = 1.0) -> list[dict]:
    """Time series over one full pass, sampled every ``step_s`` seconds."""
    pass_ = PassGeometry(s.earth(), s.orbit())
    n = int(math.floor(pass_.duration / step_s)) + 1
    t = np.arange(n) * step_s
    gamma = pass_.initial_central_angle - np.degrees(pass_.angular_rate * t)
    earth = s.earth()
    r = earth.earth_radius + s.altitude_km
    ranges = _kernels.slant_range_series(np.radians(np.abs(gamma)), earth.earth_radius, r)
    dl = dop.pass_doppler_series(s.downlink(), pass_, t)
    ul = dop.pass_doppler_series(s.uplink(), pass_, t)
    ratio = earth.earth_radius / r
    g = np.radians(np.abs(gamma))
    elev = np.degrees(np.arctan2(np.maximum(np.cos(g) - ratio, 0.0), np.sin(g)))
    return [
        {"time_s": float(t[i]), "elevation_deg": float(elev[i]), "slant_range_km": float(ranges[i]),
         "doppler_dl_hz": float(dl[i]), "doppler_ul_hz": float(ul[i])}
        for i in range(n)
    ]


PASS_COLUMNS = ("time_s", "elevation_deg", "slant_range_km", "doppler_dl_hz", "doppler_ul_hz")


def residual_rows(s: Scenario) -> list[dict]:
    rows = []
    for carrier in (s.downlink(), s.uplink()):
        for sample in dop.residual_sweep(s.sweep_elevations_deg, s.sweep_errors_km, carrier, s.orbit(), s.earth()):
            rows.append({
                "elevation_deg": sample.true_elevation,
                "error_km": sample.error,
                "direction": sample.direction.value,
                "residual_hz": sample.residual,
            })
    return rows


def error_threshold_km(s: Scenario, elevation: float = 90.0) -> float | None:
    """Largest along-track error keeping the uplink residual at ``elevation``
    within the CFO tolerance, or None if no bound exists below the horizon."""
    tol = max_tolerable_cfo(s.numerology().scs, s.cfo_policy()) * 1e3
    orbit, earth, ul = s.orbit(), s.earth(), s.uplink()
    g0 = math.radians(90.0 - elevation - math.degrees(math.asin(
        earth.earth_radius / (earth.earth_radius + orbit.altitude) * math.cos(math.radians(elevation)))))
    hi = (math.radians(horizon_central_angle(orbit, earth)) - g0) * earth.earth_radius * (1 - 1e-9)

    def excess(err):
        return abs(dop.residual_at_elevation(elevation, err, ul, orbit, earth)) - tol

    if excess(hi) <= 0:
        return None
    return brentq(excess, 0.0, hi, xtol=1e-9)


def numerology_record(s: Scenario) -> dict:
    rows = residual_rows(s)
    worst = max(abs(r["residual_hz"]) for r in rows)
    policy = s.cfo_policy()
    family = []
    for scs in SCS_FAMILY_KHZ:
        v = waveform_feasibility(worst, Numerology(index_from_scs(scs)), policy)
        family.append({"index": index_from_scs(scs), "scs_khz": scs,
                       "max_cfo_khz": max_tolerable_cfo(scs, policy), "feasible": v.feasible, "margin_hz": v.margin_hz})
    selected = waveform_feasibility(worst, s.numerology(), policy)
    return {
        "cfo_fraction": policy.fraction,
        "family": family,
        "selected_index": s.numerology_index,
        "selected_scs_khz": s.numerology().scs,
        "worst_sweep_residual_hz": worst,
        "verdict": selected.as_dict(),
        "error_threshold_km": error_threshold_km(s),
    }


def ra_record(s: Scenario) -> dict:
    budget = s.budget()
    verdicts = analyze_timers(s.ra_timers(), budget.two_way, s.ra_processing_ms)
    outcome = simulate_ra(s.ra_mode, s.ra_timers(), s.link(s.ra_loss_probability), s.ra_processing_ms, s.ra_tx_time_ms)
    return {
        "mode": s.ra_mode,
        "timers": {"rar_window_ms": s.rar_window_ms, "contention_resolution_ms": s.contention_resolution_ms,
                   "extended": s.ra_extended},
        "delays": {"one_way_ms": budget.one_way, "two_way_ms": budget.two_way,
                   "processing_ms": s.ra_processing_ms},
        "analysis": {k: v.as_dict() for k, v in verdicts.items()},
        "min_rar_window_ms": min_rar_window(budget.two_way, s.ra_processing_ms),
        "timing_advance_ms": timing_advance_from_geometry(s.elev_user_deg, s.elev_gw_deg, s.orbit(), s.earth()),
        "outcome": outcome.as_dict(),
        "failure_step": outcome.as_dict()["failure_step"],
    }


def harq_dim_record(s: Scenario) -> dict:
    budget = s.budget()
    n_paper = min_processes(s.harq_paper_rtt_ms, s.harq_ack_window_ms, s.harq_tti_ms)
    n_exact = min_processes(budget.two_way, s.harq_ack_window_ms, s.harq_tti_ms)
    b = s.harq_per_tti_soft_bits
    return {
        "rtt_paper_rounding_ms": s.harq_paper_rtt_ms,
        "rtt_exact_ms": budget.two_way,
        "ack_window_ms": s.harq_ack_window_ms,
        "tti_ms": s.harq_tti_ms,
        "n_min_paper_rounding": n_paper,
        "n_min_exact": n_exact,
        "dci_bits": dci_process_bits(n_paper),
        "dci_bits_exact": dci_process_bits(n_exact),
        "dci_bits_lte": dci_process_bits(LTE_PROCESSES),
        "buffer_paper_rounding": buffer_requirement(n_paper, s.harq_tti_ms, b),
        "buffer_lte": buffer_requirement(LTE_PROCESSES, s.harq_tti_ms, b),
        "buffer_ratio_vs_lte": n_paper / LTE_PROCESSES,
    }


def harq_record(s: Scenario, workers: int = 1) -> dict:
    link = s.link()
    stats = simulate_harq(s.harq_config(), link, s.harq_error_prob, s.harq_duration_ms, s.seed, s.redundancy())
    strategies = compare_strategies(
        link, s.harq_error_prob, s.harq_duration_ms, s.seed, s.harq_reduced_processes,
        s.harq_tti_ms, s.harq_ack_window_ms, s.harq_max_transmissions, s.harq_per_tti_soft_bits, workers,
    )
    return {"config": {"n_processes": s.harq_processes(), "ack_mode": s.harq_ack_mode,
                       "error_prob": s.harq_error_prob, "duration_ms": s.harq_duration_ms, "seed": s.seed},
            "stats": stats.as_dict(), "strategies": strategies}


# -- consolidated report ---------------------------------------------------

def build_report(s: Scenario, workers: int = 1) -> dict:
    delay = delay_record(s)
    dopp = doppler_record(s)
    num = numerology_record(s)
    ra = ra_record(s)
    adhoc = simulate_ra(RaMode.ADHOC_DEPLOYMENT, s.ra_timers(), s.link())
    dim = harq_dim_record(s)
    harq = harq_record(s, workers)
    rar, cr = ra["analysis"]["rar_window"], ra["analysis"]["contention_resolution"]
    findings = [
        _finding("delay.two_way", "delay-budget",
                 f"two-way propagation delay {delay['two_way_ms']:.2f} ms ({s.payload_mode} payload)", None),
        _finding("doppler.max", "doppler-envelope",
                 f"maximum Doppler {dopp['max_doppler_dl_hz'] / 1e3:.1f} kHz DL / "
                 f"{dopp['max_doppler_ul_hz'] / 1e3:.1f} kHz UL vs {dopp['terrestrial_doppler_hz'] / 1e3:.2f} kHz terrestrial",
                 None),
        _finding("waveform.residual", "residual-doppler",
                 f"worst residual {num['worst_sweep_residual_hz'] / 1e3:.2f} kHz vs tolerance "
                 f"{num['verdict']['tolerance_hz'] / 1e3:.2f} kHz at {num['selected_scs_khz']} kHz SCS",
                 num["verdict"]["feasible"]),
        _finding("ra.rar_window", "random-access",
                 f"RAR window {rar['configured_ms']:g} ms vs required {rar['required_ms']:.2f} ms", rar["feasible"]),
        _finding("ra.contention_resolution", "random-access",
                 f"contention resolution {cr['configured_ms']:g} ms vs required {cr['required_ms']:.2f} ms",
                 cr["feasible"]),
        _finding("ra.adhoc", "random-access",
                 f"ad hoc deployment with precomputed timing advance {ra['timing_advance_ms']:.2f} ms",
                 adhoc.success),
        _finding("harq.processes", "harq-dimensioning",
                 f"at least {dim['n_min_paper_rounding']} parallel processes "
                 f"({dim['n_min_exact']} with the exact delay), {dim['dci_bits']}-bit process id",
                 None),
    ]
    return {
        "scenario": s.to_dict(),
        "delay": delay,
        "doppler": dopp,
        "numerology": num,
        "random_access": {k: v for k, v in ra.items() if k != "outcome"} | {
            "outcome": {k: v for k, v in ra["outcome"].items() if k != "timeline"}},
        "harq_dimensioning": dim,
        "harq": harq,
        "findings": findings,
    }


def _finding(key: str, topic: str, statement: str, verdict: bool | None) -> dict:
    return {"id": key, "topic": topic, "statement": statement,
            "verdict": None if verdict is None else ("feasible" if verdict else "infeasible")}


def render_text(report: dict) -> str:
    d = report["delay"]
    lines = [
        "LEO 5G feasibility report",
        "=========================",
        f"altitude {d['altitude_km']:g} km, user elevation {d['elev_user_deg']:g} deg, "
        f"gateway elevation {d['elev_gw_deg']:g} deg, payload {d['payload_mode']}",
        "",
        f"user-satellite delay   {d['t_user_sat_ms']:9.3f} ms",
        f"satellite-gateway delay{d['t_sat_gw_ms']:9.3f} ms",
        f"one-way delay          {d['one_way_ms']:9.3f} ms",
        f"two-way delay          {d['two_way_ms']:9.3f} ms",
        "",
        "HARQ strategies:",
        f"  {'strategy':<9}{'n_proc':>7}{'util':>8}{'retx':>7}{'buffer':>8}{'dci':>5}",
    ]
    for row in report["harq"]["strategies"]:
        lines.append(f"  {row['strategy']:<9}{row['n_processes']:>7}{row['utilization']:>8.3f}"
                     f"{row['retransmissions']:>7}{row['peak_buffer']:>8g}{row['dci_bits']:>5}")
    lines += ["", "Findings:"]
    for f in report["findings"]:
        tag = "" if f["verdict"] is None else f" [{f['verdict'].upper()}]"
        lines.append(f"  - {f['id']}: {f['statement']}{tag}")
    thr = report["numerology"]["error_threshold_km"]
    if thr is not None:
        lines.append(f"  - waveform stays feasible for position errors up to {thr:.2f} km (uplink, zenith)")
    return "\n".join(lines) + "\n"


def delay_text(rec: dict) -> str:
    return (
        f"{'payload':<22}{rec['payload_mode']}\n"
        f"{'T user-sat [ms]':<22}{rec['t_user_sat_ms']:.3f}\n"
        f"{'T sat-gw [ms]':<22}{rec['t_sat_gw_ms']:.3f}\n"
        f"{'T one-way [ms]':<22}{rec['one_way_ms']:.3f}\n"
        f"{'T two-way [ms]':<22}{rec['two_way_ms']:.3f}\n"
    )


def kv_text(rec: dict) -> str:
    width = max(len(k) for k in rec) + 2
    out = []
    for k, v in rec.items():
        if isinstance(v, (dict, list)):
            v = json.dumps(v, sort_keys=True)
        elif isinstance(v, float):
            v = f"{v:.6g}"
        out.append(f"{k:<{width}}{v}")
    return "\n".join(out) + "\n"

