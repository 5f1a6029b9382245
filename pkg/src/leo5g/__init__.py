"""Feasibility toolkit for 5G NR over transparent LEO mega-constellations."""

from ._kernels import BACKEND
from .doppler import (
    DOWNLINK,
    UPLINK,
    CarrierConfig,
    Direction,
    PositionEstimate,
    ResidualDopplerSample,
    instantaneous_doppler,
    max_doppler,
    precompensation_shift,
    residual_doppler,
    residual_sweep,
    terrestrial_doppler,
)
from .event_sim import DelayedLink, Simulator
from .geometry import (
    BelowHorizonError,
    EarthModel,
    GeometryError,
    LinkBudgetDelay,
    LinkGeometry,
    OrbitConfig,
    PassGeometry,
    PayloadMode,
    delay_budget,
    orbital_speed,
    pass_state,
    propagation_delay,
    slant_range,
)
from .harq import AckMode, HarqConfig, HarqStats, compare_strategies, min_processes, simulate_harq
from .numerology import CfoTolerancePolicy, Numerology, max_tolerable_cfo, scs_from_index, waveform_feasibility
from .random_access import RaMode, RaOutcome, RaTimers, analyze_timers, min_rar_window, simulate_ra
from .scenario import Scenario, ScenarioError

__version__ = "0.1.0"
