"""Scenario files: flat JSON documents keyed by dotted paths.

Every key is optional; missing keys take the defaults below, which describe
a 1500 km transparent LEO system seen at 10 deg from the relay node and
5 deg from the gateway, Ka-band 20 GHz down / 30 GHz up.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any

from .doppler import CarrierConfig, Direction
from .event_sim import DelayedLink
from .geometry import EarthModel, OrbitConfig, PayloadMode, delay_budget, LinkBudgetDelay
from .harq import AckMode, HarqConfig, RedundancyModel, min_processes
from .numerology import CfoTolerancePolicy, Numerology
from .random_access import RaMode, RaTimers


class ScenarioError(ValueError):
    """Invalid scenario; ``path`` names the offending dotted key."""

    def __init__(self, path: str, message: str) -> None:
        super().__init__(f"{path}: {message}")
        self.path = path


def _default_errors() -> list[float]:
    return [i * 0.5 for i in range(21)]


@dataclass(frozen=True)
class Scenario:
    # geometry
    altitude_km: float = 1500.0
    payload_mode: str = "transparent"
    earth_radius_km: float = 6371.0
    mu_km3_s2: float = 398600.4418
    light_speed_km_s: float = 299792.458
    elev_user_deg: float = 10.0
    elev_gw_deg: float = 5.0
    # doppler
    dl_frequency_hz: float = 20e9
    ul_frequency_hz: float = 30e9
    sweep_elevations_deg: tuple[float, ...] = (10.0, 45.0, 80.0, 90.0)
    sweep_errors_km: tuple[float, ...] = field(default_factory=lambda: tuple(_default_errors()))
    terrestrial_speed_kmh: float = 500.0
    terrestrial_frequency_hz: float = 4e9
    # numerology
    numerology_index: int = 5
    cfo_tolerance_khz: float = 30.4
    cfo_reference_scs_khz: float = 480.0
    # random access
    ra_mode: str = "contention_based"
    rar_window_ms: float = 15.0
    contention_resolution_ms: float = 64.0
    ra_extended: bool = False
    ra_processing_ms: float = 1.0
    ra_tx_time_ms: float = 1.0
    ra_loss_probability: float = 0.0
    # harq
    harq_n_processes: int | None = None
    harq_tti_ms: float = 1.0
    harq_ack_window_ms: float = 8.0
    harq_ack_mode: str = "one_bit"
    harq_max_transmissions: int = 4
    harq_per_tti_soft_bits: float = 1.0
    harq_error_prob: float = 0.1
    harq_duration_ms: float = 2000.0
    harq_reduced_processes: int = 16
    harq_paper_rtt_ms: float = 51.0
    harq_required_redundancy: int = 4
    seed: int = 0

    # -- construction -----------------------------------------------------
    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Scenario":
        kwargs = {}
        for key, value in data.items():
            attr = KEY_TO_ATTR.get(key)
            if attr is None:
                raise ScenarioError(key, "unknown scenario key")
            kwargs[attr] = _coerce(key, attr, value)
        scenario = cls(**kwargs)
        scenario.validate()
        return scenario

    @classmethod
    def load(cls, path: str | Path) -> "Scenario":
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ScenarioError("<file>", f"not valid JSON ({exc})") from None
        if not isinstance(data, dict):
            raise ScenarioError("<file>", "top level must be an object")
        return cls.from_dict(data)

    def to_dict(self) -> dict[str, Any]:
        out = {}
        for key, attr in KEY_TO_ATTR.items():
            value = getattr(self, attr)
            out[key] = list(value) if isinstance(value, tuple) else value
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def override(self, **changes: Any) -> "Scenario":
        changes = {k: v for k, v in changes.items() if v is not None}
        s = replace(self, **changes)
        s.validate()
        return s

    def validate(self) -> None:
        checks = [
            ("geometry.earth_radius_km", self.earth),
            ("geometry.altitude_km", self.orbit),
            ("doppler.dl_frequency_hz", self.downlink),
            ("doppler.ul_frequency_hz", self.uplink),
            ("numerology.index", self.numerology),
            ("numerology.cfo_tolerance_khz", self.cfo_policy),
            ("random_access.rar_window_ms", self.ra_timers),
            ("harq.required_redundancy", self.redundancy),
        ]
        for path, build in checks:
            try:
                build()
            except ValueError as exc:
                raise ScenarioError(path, str(exc)) from None
        for key, value in (("geometry.elev_user_deg", self.elev_user_deg), ("geometry.elev_gw_deg", self.elev_gw_deg)):
            if not 0.0 <= value <= 90.0:
                raise ScenarioError(key, "elevation must be in [0, 90]")
        if not self.sweep_elevations_deg or not self.sweep_errors_km:
            raise ScenarioError("doppler.sweep_elevations_deg", "sweep lists must be non-empty")
        if any(not 0.0 <= e <= 90.0 for e in self.sweep_elevations_deg):
            raise ScenarioError("doppler.sweep_elevations_deg", "elevations must be in [0, 90]")
        if any(e < 0 for e in self.sweep_errors_km):
            raise ScenarioError("doppler.sweep_errors_km", "errors must be non-negative")
        try:
            RaMode(self.ra_mode)
        except ValueError:
            raise ScenarioError("random_access.mode", f"unknown mode {self.ra_mode!r}") from None
        if not 0.0 <= self.ra_loss_probability <= 1.0:
            raise ScenarioError("random_access.loss_probability", "must be in [0, 1]")
        if self.ra_processing_ms < 0:
            raise ScenarioError("random_access.processing_ms", "must be non-negative")
        if not 0.0 <= self.harq_error_prob <= 1.0:
            raise ScenarioError("harq.error_prob", "must be in [0, 1]")
        if self.harq_reduced_processes < 1:
            raise ScenarioError("harq.reduced_processes", "must be >= 1")
        try:
            self.harq_config()
        except ValueError as exc:
            raise ScenarioError("harq", str(exc)) from None
        if self.harq_duration_ms < self.budget().two_way:
            raise ScenarioError("harq.duration_ms", "must cover at least one round trip")

    # -- module configs ---------------------------------------------------
    def earth(self) -> EarthModel:
        return EarthModel(self.earth_radius_km, self.mu_km3_s2, self.light_speed_km_s)

    def orbit(self) -> OrbitConfig:
        return OrbitConfig(self.altitude_km, PayloadMode(self.payload_mode))

    def downlink(self) -> CarrierConfig:
        return CarrierConfig(self.dl_frequency_hz, Direction.DOWNLINK)

    def uplink(self) -> CarrierConfig:
        return CarrierConfig(self.ul_frequency_hz, Direction.UPLINK)

    def numerology(self) -> Numerology:
        return Numerology(self.numerology_index)

    def cfo_policy(self) -> CfoTolerancePolicy:
        return CfoTolerancePolicy(self.cfo_tolerance_khz, self.cfo_reference_scs_khz)

    def ra_timers(self) -> RaTimers:
        return RaTimers(self.rar_window_ms, self.contention_resolution_ms, self.ra_extended)

    def redundancy(self) -> RedundancyModel:
        return RedundancyModel(required=self.harq_required_redundancy)

    def budget(self) -> LinkBudgetDelay:
        return delay_budget(self.elev_user_deg, self.elev_gw_deg, self.orbit(), self.earth())

    def link(self, loss_probability: float = 0.0) -> DelayedLink:
        return DelayedLink(self.budget().one_way, loss_probability, self.seed)

    def harq_processes(self) -> int:
        if self.harq_n_processes is not None:
            return self.harq_n_processes
        return min_processes(self.budget().two_way, self.harq_ack_window_ms, self.harq_tti_ms)

    def harq_config(self) -> HarqConfig:
        return HarqConfig(
            n_processes=self.harq_processes(),
            tti=self.harq_tti_ms,
            ack_window=self.harq_ack_window_ms,
            ack_mode=AckMode(self.harq_ack_mode),
            max_transmissions=self.harq_max_transmissions,
            per_process_buffer=self.harq_per_tti_soft_bits,
        )


KEY_TO_ATTR = {
    "geometry.altitude_km": "altitude_km",
    "geometry.payload_mode": "payload_mode",
    "geometry.earth_radius_km": "earth_radius_km",
    "geometry.mu_km3_s2": "mu_km3_s2",
    "geometry.light_speed_km_s": "light_speed_km_s",
    "geometry.elev_user_deg": "elev_user_deg",
    "geometry.elev_gw_deg": "elev_gw_deg",
    "doppler.dl_frequency_hz": "dl_frequency_hz",
    "doppler.ul_frequency_hz": "ul_frequency_hz",
    "doppler.sweep_elevations_deg": "sweep_elevations_deg",
    "doppler.sweep_errors_km": "sweep_errors_km",
    "doppler.terrestrial_speed_kmh": "terrestrial_speed_kmh",
    "doppler.terrestrial_frequency_hz": "terrestrial_frequency_hz",
    "numerology.index": "numerology_index",
    "numerology.cfo_tolerance_khz": "cfo_tolerance_khz",
    "numerology.cfo_reference_scs_khz": "cfo_reference_scs_khz",
    "random_access.mode": "ra_mode",
    "random_access.rar_window_ms": "rar_window_ms",
    "random_access.contention_resolution_ms": "contention_resolution_ms",
    "random_access.extended": "ra_extended",
    "random_access.processing_ms": "ra_processing_ms",
    "random_access.tx_time_ms": "ra_tx_time_ms",
    "random_access.loss_probability": "ra_loss_probability",
    "harq.n_processes": "harq_n_processes",
    "harq.tti_ms": "harq_tti_ms",
    "harq.ack_window_ms": "harq_ack_window_ms",
    "harq.ack_mode": "harq_ack_mode",
    "harq.max_transmissions": "harq_max_transmissions",
    "harq.per_tti_soft_bits": "harq_per_tti_soft_bits",
    "harq.error_prob": "harq_error_prob",
    "harq.duration_ms": "harq_duration_ms",
    "harq.reduced_processes": "harq_reduced_processes",
    "harq.paper_rtt_ms": "harq_paper_rtt_ms",
    "harq.required_redundancy": "harq_required_redundancy",
    "seed": "seed",
}

_TYPES = {f.name: f.type for f in fields(Scenario)}


def _coerce(key: str, attr: str, value: Any) -> Any:
    kind = _TYPES[attr]
    try:
        if kind.startswith("tuple"):
            if not isinstance(value, list):
                raise TypeError("expected a list")
            return tuple(float(v) for v in value)
        if kind == "bool":
            if not isinstance(value, bool):
                raise TypeError("expected true/false")
            return value
        if kind == "int | None":
            return None if value is None else _as_int(value)
        if kind == "int":
            return _as_int(value)
        if kind == "float":
            if isinstance(value, bool):
                raise TypeError("expected a number")
            return float(value)
        if kind == "str":
            if not isinstance(value, str):
                raise TypeError("expected a string")
            return value
    except (TypeError, ValueError) as exc:
        raise ScenarioError(key, str(exc)) from None
    raise AssertionError(kind)  # pragma: no cover


def _as_int(value: Any) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
        raise TypeError("expected an integer")
    return int(value)
