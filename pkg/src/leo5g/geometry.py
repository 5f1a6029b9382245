"""Satellite/ground link geometry and the propagation-delay budget.

All angles cross the public API in degrees and are converted to radians
internally. Lengths are in km, times in ms unless a name says otherwise.
The geometry is planar: one satellite on a circular orbit whose plane
contains the ground node, Earth rotation neglected.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field


class GeometryError(ValueError):
    """Invalid geometric input (bad elevation, altitude, distance)."""


class BelowHorizonError(GeometryError):
    """The requested configuration puts the satellite below the horizon."""


class PayloadMode(str, enum.Enum):
    TRANSPARENT = "transparent"
    REGENERATIVE = "regenerative"


@dataclass(frozen=True)
class EarthModel:
    earth_radius: float = 6371.0  # km
    mu: float = 398600.4418  # km^3/s^2
    light_speed: float = 299792.458  # km/s

    def __post_init__(self) -> None:
        for name in ("earth_radius", "mu", "light_speed"):
            if not getattr(self, name) > 0:
                raise GeometryError(f"{name} must be positive")


@dataclass(frozen=True)
class OrbitConfig:
    altitude: float = 1500.0  # km
    payload_mode: PayloadMode = PayloadMode.TRANSPARENT

    def __post_init__(self) -> None:
        if not self.altitude > 0:
            raise GeometryError("altitude must be positive")
        object.__setattr__(self, "payload_mode", PayloadMode(self.payload_mode))


DEFAULT_EARTH = EarthModel()
DEFAULT_ORBIT = OrbitConfig()


@dataclass(frozen=True)
class LinkGeometry:
    """Instantaneous geometry of a ground node and its satellite.

    ``central_angle`` is the unsigned Earth-centre angle between the ground
    node and the sub-satellite point; ``approaching`` tells on which side of
    the zenith crossing the satellite is.
    """

    elevation: float  # deg
    central_angle: float  # deg
    slant_range: float  # km
    approaching: bool = True


@dataclass(frozen=True)
class LinkBudgetDelay:
    t_user_sat: float
    t_sat_gw: float
    one_way: float
    two_way: float
    payload_mode: PayloadMode

    def as_dict(self) -> dict:
        return {
            "payload_mode": self.payload_mode.value,
            "t_user_sat_ms": self.t_user_sat,
            "t_sat_gw_ms": self.t_sat_gw,
            "one_way_ms": self.one_way,
            "two_way_ms": self.two_way,
        }


def _check_elevation(elevation: float) -> None:
    if not 0.0 <= elevation <= 90.0:
        raise GeometryError(f"elevation {elevation!r} deg outside [0, 90]")


def slant_range(
    elevation: float,
    orbit: OrbitConfig = DEFAULT_ORBIT,
    earth: EarthModel = DEFAULT_EARTH,
) -> float:
    """Line-of-sight distance (km) from a ground node to the satellite.

    Parameters
    ----------
    elevation : float
        Elevation of the satellite above the local horizon, degrees.
    orbit, earth : OrbitConfig, EarthModel
        Orbit altitude and planet constants.
    """
    _check_elevation(elevation)
    if elevation == 90.0:
        return float(orbit.altitude)
    re, h = earth.earth_radius, orbit.altitude
    s = math.sin(math.radians(elevation))
    return math.sqrt(re * re * s * s + 2.0 * re * h + h * h) - re * s


def propagation_delay(distance: float, earth: EarthModel = DEFAULT_EARTH) -> float:
    """Free-space propagation delay in ms over ``distance`` km."""
    if distance < 0:
        raise GeometryError("distance must be non-negative")
    return distance / earth.light_speed * 1e3


def delay_budget(
    elev_user: float,
    elev_gw: float,
    orbit: OrbitConfig = DEFAULT_ORBIT,
    earth: EarthModel = DEFAULT_EARTH,
) -> LinkBudgetDelay:
    """User-satellite-gateway delay decomposition for the payload mode.

    A regenerative payload terminates the radio link on board, so only the
    user leg contributes to the round trip.
    """
    t_us = propagation_delay(slant_range(elev_user, orbit, earth), earth)
    t_sg = propagation_delay(slant_range(elev_gw, orbit, earth), earth)
    if orbit.payload_mode is PayloadMode.TRANSPARENT:
        one_way = t_us + t_sg
    else:
        one_way = t_us
    return LinkBudgetDelay(t_us, t_sg, one_way, 2.0 * one_way, orbit.payload_mode)


def orbital_speed(orbit: OrbitConfig = DEFAULT_ORBIT, earth: EarthModel = DEFAULT_EARTH) -> float:
    """Circular-orbit speed in km/s."""
    return math.sqrt(earth.mu / (earth.earth_radius + orbit.altitude))


def _orbit_radius(orbit: OrbitConfig, earth: EarthModel) -> float:
    return earth.earth_radius + orbit.altitude


def horizon_central_angle(orbit: OrbitConfig = DEFAULT_ORBIT, earth: EarthModel = DEFAULT_EARTH) -> float:
    """Central angle (deg) at which the satellite sits on the horizon."""
    return math.degrees(math.acos(earth.earth_radius / _orbit_radius(orbit, earth)))


def central_angle_from_elevation(
    elevation: float,
    orbit: OrbitConfig = DEFAULT_ORBIT,
    earth: EarthModel = DEFAULT_EARTH,
) -> float:
    _check_elevation(elevation)
    e = math.radians(elevation)
    ratio = earth.earth_radius / _orbit_radius(orbit, earth)
    return math.degrees(math.pi / 2 - e - math.asin(ratio * math.cos(e)))


def elevation_from_central_angle(
    central_angle: float,
    orbit: OrbitConfig = DEFAULT_ORBIT,
    earth: EarthModel = DEFAULT_EARTH,
) -> float:
    """Elevation (deg) seen from a ground node at ``central_angle`` deg from
    the sub-satellite point.

    Raises
    ------
    BelowHorizonError
        If the satellite is below the horizon of that node.
    """
    if central_angle < 0:
        raise GeometryError("central_angle must be non-negative")
    g = math.radians(central_angle)
    ratio = earth.earth_radius / _orbit_radius(orbit, earth)
    num = math.cos(g) - ratio
    if num < 0:
        # tolerate rounding right at the horizon
        if num > -1e-15:
            return 0.0
        raise BelowHorizonError(f"central angle {central_angle} deg is beyond the horizon")
    return math.degrees(math.atan2(num, math.sin(g)))


def slant_range_from_central_angle(
    central_angle: float,
    orbit: OrbitConfig = DEFAULT_ORBIT,
    earth: EarthModel = DEFAULT_EARTH,
) -> float:
    re = earth.earth_radius
    r = _orbit_radius(orbit, earth)
    g = math.radians(central_angle)
    # 1 - cos(g) written as 2 sin^2(g/2) to keep precision near the zenith
    return math.sqrt((r - re) ** 2 + 4.0 * re * r * math.sin(g / 2.0) ** 2)


@dataclass(frozen=True)
class PassGeometry:
    """One in-plane pass of a satellite over a ground node.

    The signed central angle evolves as ``gamma(t) = gamma0 - omega * t``
    (t in seconds), so it is positive while the satellite approaches.
    By default the pass starts at satellite rise.
    """

    earth: EarthModel = DEFAULT_EARTH
    orbit: OrbitConfig = DEFAULT_ORBIT
    start_central_angle: float | None = None  # deg
    _gamma0: float = field(init=False, repr=False)

    def __post_init__(self) -> None:
        horizon = horizon_central_angle(self.orbit, self.earth)
        g0 = horizon if self.start_central_angle is None else float(self.start_central_angle)
        if not 0 < g0 <= horizon:
            raise GeometryError("start_central_angle must lie in (0, horizon]")
        object.__setattr__(self, "_gamma0", g0)

    @property
    def initial_central_angle(self) -> float:
        return self._gamma0

    @property
    def angular_rate(self) -> float:
        """Angular rate of the satellite about the Earth centre, rad/s."""
        return orbital_speed(self.orbit, self.earth) / _orbit_radius(self.orbit, self.earth)

    @property
    def zenith_time(self) -> float:
        return math.radians(self._gamma0) / self.angular_rate

    @property
    def duration(self) -> float:
        """Length of the visibility window starting at t = 0, seconds."""
        return 2.0 * self.zenith_time

    def signed_central_angle(self, t: float) -> float:
        return self._gamma0 - math.degrees(self.angular_rate * t)

    def time_at_elevation(self, elevation: float, approaching: bool = True) -> float:
        g = central_angle_from_elevation(elevation, self.orbit, self.earth)
        dt = math.radians(g) / self.angular_rate
        return self.zenith_time - dt if approaching else self.zenith_time + dt


def pass_state(t: float, pass_: PassGeometry) -> LinkGeometry:
    """Geometry at time ``t`` seconds into the pass."""
    gamma = pass_.signed_central_angle(t)
    try:
        elev = elevation_from_central_angle(abs(gamma), pass_.orbit, pass_.earth)
    except BelowHorizonError:
        raise BelowHorizonError(f"t = {t} s is outside the visibility window") from None
    d = slant_range_from_central_angle(abs(gamma), pass_.orbit, pass_.earth)
    return LinkGeometry(elev, abs(gamma), d, approaching=gamma > 0)
