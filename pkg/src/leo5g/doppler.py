"""Doppler on the ground-node/satellite link and gateway pre-compensation.

Sign convention: Doppler is positive while the satellite approaches.
``instantaneous_doppler`` and ``max_doppler`` report magnitudes; the
pass- and residual-level functions are signed.

Position error model: the gateway believes the ground node sits
``along_track_error`` km further along the sub-satellite ground track
(in the direction of increasing signed central angle) than it really is.
Both the true and the believed Doppler are evaluated at the same instant.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from .geometry import (
    DEFAULT_EARTH,
    DEFAULT_ORBIT,
    BelowHorizonError,
    EarthModel,
    GeometryError,
    OrbitConfig,
    PassGeometry,
    central_angle_from_elevation,
    elevation_from_central_angle,
    horizon_central_angle,
    orbital_speed,
    slant_range_from_central_angle,
)


class Direction(str, enum.Enum):
    DOWNLINK = "downlink"
    UPLINK = "uplink"


@dataclass(frozen=True)
class CarrierConfig:
    frequency: float  # Hz
    direction: Direction = Direction.DOWNLINK

    def __post_init__(self) -> None:
        if not self.frequency > 0:
            raise ValueError("carrier frequency must be positive")
        object.__setattr__(self, "direction", Direction(self.direction))


DOWNLINK = CarrierConfig(20e9, Direction.DOWNLINK)
UPLINK = CarrierConfig(30e9, Direction.UPLINK)


@dataclass(frozen=True)
class ErroneousGeometry:
    central_angle: float  # signed, deg
    elevation: float  # deg
    slant_range: float  # km


@dataclass(frozen=True)
class PositionEstimate:
    along_track_error: float = 0.0  # km

    def __post_init__(self) -> None:
        if self.along_track_error < 0:
            raise ValueError("along_track_error must be non-negative")

    def believed_geometry(
        self,
        true_central_angle: float,
        orbit: OrbitConfig = DEFAULT_ORBIT,
        earth: EarthModel = DEFAULT_EARTH,
    ) -> ErroneousGeometry:
        """Geometry of the believed position given the true signed central
        angle (deg)."""
        g = true_central_angle + math.degrees(self.along_track_error / earth.earth_radius)
        try:
            elev = elevation_from_central_angle(abs(g), orbit, earth)
        except BelowHorizonError:
            raise BelowHorizonError("estimated position below horizon") from None
        return ErroneousGeometry(g, elev, slant_range_from_central_angle(abs(g), orbit, earth))


@dataclass(frozen=True)
class ResidualDopplerSample:
    true_elevation: float
    error: float
    residual: float
    direction: Direction


def _scale(carrier: CarrierConfig, orbit: OrbitConfig, earth: EarthModel) -> float:
    return carrier.frequency / earth.light_speed * orbital_speed(orbit, earth) * earth.earth_radius


def instantaneous_doppler(
    carrier: CarrierConfig,
    elevation: float,
    orbit: OrbitConfig = DEFAULT_ORBIT,
    earth: EarthModel = DEFAULT_EARTH,
) -> float:
    """Doppler magnitude (Hz) seen at ``elevation`` degrees."""
    if not 0.0 <= elevation <= 90.0:
        raise GeometryError(f"elevation {elevation!r} deg outside [0, 90]")
    if elevation == 90.0:
        return 0.0
    r = earth.earth_radius + orbit.altitude
    v = orbital_speed(orbit, earth)
    return carrier.frequency / earth.light_speed * v * (earth.earth_radius / r) * math.cos(math.radians(elevation))


def max_doppler(
    carrier: CarrierConfig,
    min_elevation: float = 0.0,
    orbit: OrbitConfig = DEFAULT_ORBIT,
    earth: EarthModel = DEFAULT_EARTH,
) -> float:
    # Doppler magnitude falls monotonically with elevation
    return instantaneous_doppler(carrier, min_elevation, orbit, earth)


def terrestrial_doppler(speed_kmh: float, carrier: CarrierConfig | float, earth: EarthModel = DEFAULT_EARTH) -> float:
    """Maximum Doppler (Hz) for a terminal moving at ``speed_kmh``."""
    if speed_kmh < 0:
        raise ValueError("speed must be non-negative")
    f = carrier.frequency if isinstance(carrier, CarrierConfig) else float(carrier)
    return speed_kmh / 3600.0 / earth.light_speed * f


def doppler_from_central_angle(
    carrier: CarrierConfig,
    signed_central_angle: float,
    orbit: OrbitConfig = DEFAULT_ORBIT,
    earth: EarthModel = DEFAULT_EARTH,
) -> float:
    """Signed Doppler (Hz) for a node at the given signed central angle."""
    g = math.radians(signed_central_angle)
    d = slant_range_from_central_angle(abs(signed_central_angle), orbit, earth)
    return _scale(carrier, orbit, earth) * math.sin(g) / d


def pass_doppler(carrier: CarrierConfig, pass_: PassGeometry, t: float) -> float:
    """Signed Doppler at time ``t`` (s) along a pass."""
    g = pass_.signed_central_angle(t)
    if abs(g) > horizon_central_angle(pass_.orbit, pass_.earth):
        raise BelowHorizonError(f"t = {t} s is outside the visibility window")
    return doppler_from_central_angle(carrier, g, pass_.orbit, pass_.earth)


def precompensation_shift(
    estimate: PositionEstimate,
    carrier: CarrierConfig,
    pass_: PassGeometry,
    t: float,
) -> float:
    """Doppler the gateway removes, computed from the believed position."""
    g = pass_.signed_central_angle(t)
    if abs(g) > horizon_central_angle(pass_.orbit, pass_.earth):
        raise BelowHorizonError(f"t = {t} s is outside the visibility window")
    believed = estimate.believed_geometry(g, pass_.orbit, pass_.earth)
    return doppler_from_central_angle(carrier, believed.central_angle, pass_.orbit, pass_.earth)


def residual_doppler(
    estimate: PositionEstimate,
    carrier: CarrierConfig,
    pass_: PassGeometry,
    t: float,
) -> float:
    """True Doppler minus the pre-compensation, signed, in Hz."""
    if estimate.along_track_error == 0:
        pass_doppler(carrier, pass_, t)  # still validates visibility
        return 0.0
    return pass_doppler(carrier, pass_, t) - precompensation_shift(estimate, carrier, pass_, t)


def residual_at_elevation(
    elevation: float,
    error_km: float,
    carrier: CarrierConfig,
    orbit: OrbitConfig = DEFAULT_ORBIT,
    earth: EarthModel = DEFAULT_EARTH,
) -> float:
    """Residual for a node seeing the (approaching) satellite at ``elevation``."""
    pass_ = PassGeometry(earth, orbit)
    t = pass_.time_at_elevation(elevation, approaching=True)
    return residual_doppler(PositionEstimate(error_km), carrier, pass_, t)


def residual_sweep(
    elevations: Sequence[float],
    errors: Sequence[float],
    carrier: CarrierConfig,
    orbit: OrbitConfig = DEFAULT_ORBIT,
    earth: EarthModel = DEFAULT_EARTH,
) -> list[ResidualDopplerSample]:
    """Residual Doppler over the elevation x error cross product.

    Rows are elevation-major, then error, in the order given. The grid is
    evaluated by the array kernel in one call.
    """
    if len(elevations) == 0 or len(errors) == 0:
        raise ValueError("elevations and errors must be non-empty")
    for e in errors:
        if e < 0:
            raise ValueError("position errors must be non-negative")
    gamma = np.array([central_angle_from_elevation(e, orbit, earth) for e in elevations])
    offsets = np.asarray(errors, dtype=np.float64) / earth.earth_radius
    horizon = horizon_central_angle(orbit, earth)
    if gamma.max() + math.degrees(max(errors) / earth.earth_radius) > horizon:
        raise BelowHorizonError("estimated position below horizon")
    grid = _kernels.residual_grid(
        np.radians(gamma),
        offsets,
        earth.earth_radius,
        earth.earth_radius + orbit.altitude,
        _scale(carrier, orbit, earth),
    )
    rows = []
    for i, elev in enumerate(elevations):
        for j, err in enumerate(errors):
            res = 0.0 if err == 0 else float(grid[i, j])
            rows.append(ResidualDopplerSample(float(elev), float(err), res, carrier.direction))
    return rows


def pass_doppler_series(carrier: CarrierConfig, pass_: PassGeometry, times: Sequence[float]) -> np.ndarray:
    """Signed Doppler (Hz) sampled at ``times`` (s) along a visible pass."""
    t = np.asarray(times, dtype=np.float64)
    gamma_deg = pass_.initial_central_angle - np.degrees(pass_.angular_rate * t)
    if np.any(np.abs(gamma_deg) > horizon_central_angle(pass_.orbit, pass_.earth) + 1e-12):
        raise BelowHorizonError("sample times leave the visibility window")
    earth, orbit = pass_.earth, pass_.orbit
    return _kernels.doppler_series(
        np.radians(gamma_deg), earth.earth_radius, earth.earth_radius + orbit.altitude, _scale(carrier, orbit, earth)
    )
