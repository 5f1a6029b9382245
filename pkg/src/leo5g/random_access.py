"""Random Access over the long-delay satellite link.

The 4-step contention-based exchange is Msg1 (preamble) -> Msg2 (RAR) ->
Msg3 -> Msg4 (contention resolution). The gRN-side transmissions (Msg1,
Msg3) occupy one TTI; each node reaction costs ``processing`` ms, which
also covers the response transmission at the donor. The RAR window opens
when Msg1 ends and the contention-resolution timer when Msg3 ends. A timer
expires at the first microsecond tick after its window, so a response
arriving exactly at the window edge is still accepted.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .event_sim import DelayedLink, Event, Simulator, TraceRecord, to_ms, to_us
from .geometry import (
    DEFAULT_EARTH,
    DEFAULT_ORBIT,
    EarthModel,
    OrbitConfig,
    PayloadMode,
    delay_budget,
)

MAX_RAR_WINDOW_MS = 15.0
MAX_CONTENTION_RESOLUTION_MS = 64.0
DEFAULT_PROCESSING_MS = 1.0
DEFAULT_TX_TIME_MS = 1.0


class RaMode(str, enum.Enum):
    CONTENTION_BASED = "contention_based"
    CONTENTION_FREE = "contention_free"
    ADHOC_DEPLOYMENT = "adhoc_deployment"


class FailureStep(str, enum.Enum):
    RAR_EXPIRY = "rar_expiry"
    CONTENTION_RESOLUTION_EXPIRY = "contention_resolution_expiry"


@dataclass(frozen=True)
class RaTimers:
    rar_window: float = MAX_RAR_WINDOW_MS
    contention_resolution: float = MAX_CONTENTION_RESOLUTION_MS
    extended: bool = False

    def __post_init__(self) -> None:
        if not (self.rar_window > 0 and self.contention_resolution > 0):
            raise ValueError("RA timers must be positive")
        if not self.extended:
            if self.rar_window > MAX_RAR_WINDOW_MS:
                raise ValueError(f"rar_window above {MAX_RAR_WINDOW_MS} ms needs extended=True")
            if self.contention_resolution > MAX_CONTENTION_RESOLUTION_MS:
                raise ValueError(
                    f"contention_resolution above {MAX_CONTENTION_RESOLUTION_MS} ms needs extended=True"
                )


@dataclass(frozen=True)
class TimerVerdict:
    timer: str
    configured_ms: float
    required_ms: float
    feasible: bool

    @property
    def margin_ms(self) -> float:
        return self.configured_ms - self.required_ms

    def as_dict(self) -> dict:
        return {
            "timer": self.timer,
            "configured_ms": self.configured_ms,
            "required_ms": self.required_ms,
            "margin_ms": self.margin_ms,
            "feasible": self.feasible,
        }


def min_rar_window(two_way_delay: float, processing: float = DEFAULT_PROCESSING_MS) -> float:
    """Shortest RAR window that still catches the response."""
    if two_way_delay < 0 or processing < 0:
        raise ValueError("delays must be non-negative")
    return two_way_delay + processing


def analyze_timers(
    timers: RaTimers, two_way_delay: float, processing: float = DEFAULT_PROCESSING_MS
) -> dict[str, TimerVerdict]:
    wait = min_rar_window(two_way_delay, processing)
    return {
        "rar_window": TimerVerdict("rar_window", timers.rar_window, wait, timers.rar_window >= wait),
        "contention_resolution": TimerVerdict(
            "contention_resolution", timers.contention_resolution, wait, timers.contention_resolution >= wait
        ),
    }


def timing_advance_from_geometry(
    elev_user: float,
    elev_gw: float | None = None,
    orbit: OrbitConfig = DEFAULT_ORBIT,
    earth: EarthModel = DEFAULT_EARTH,
) -> float:
    """Round-trip delay (ms) known in advance from orbit and node position."""
    if elev_gw is None:
        if orbit.payload_mode is PayloadMode.TRANSPARENT:
            raise ValueError("a transparent payload needs the gateway elevation")
        elev_gw = 90.0  # unused by the regenerative budget
    return delay_budget(elev_user, elev_gw, orbit, earth).two_way


@dataclass
class RaOutcome:
    mode: RaMode
    success: bool
    failure_step: FailureStep | None
    completion_time: float | None
    trace: list[TraceRecord] = field(default_factory=list)
    timing_advance: float | None = None
    messages_sent: int = 0

    def timeline(self) -> list[dict]:
        return [r.as_dict() for r in self.trace]

    def as_dict(self) -> dict:
        return {
            "mode": self.mode.value,
            "success": self.success,
            "failure_step": None if self.failure_step is None else self.failure_step.value,
            "completion_time_ms": self.completion_time,
            "timing_advance_ms": self.timing_advance,
            "messages_sent": self.messages_sent,
            "timeline": self.timeline(),
        }


def simulate_ra(
    mode: RaMode | str,
    timers: RaTimers,
    link: DelayedLink,
    processing: float = DEFAULT_PROCESSING_MS,
    tx_time: float = DEFAULT_TX_TIME_MS,
) -> RaOutcome:
    """Run one RA attempt on ``link`` (used in both directions)."""
    mode = RaMode(mode)
    if mode is RaMode.ADHOC_DEPLOYMENT:
        # position and ephemeris are known, so the timing advance is set
        # directly and nothing goes over the air
        return RaOutcome(mode, True, None, 0.0, [], timing_advance=2.0 * link.one_way_delay)

    sim = Simulator()
    state: dict = {"timer": None, "failure": None, "done_us": None, "sent": 0}
    proc_us = to_us(processing)

    def start_timer(window: float, step: FailureStep) -> None:
        def expire(ev: Event) -> None:
            state["failure"] = step
            sim.stop()

        state["timer"] = sim.schedule_us(sim.now_us + to_us(window) + 1, "grn", step.value, expire)

    def stop_timer() -> None:
        sim.cancel(state["timer"])
        state["timer"] = None

    def send(msg: str, to: str, on_delivery) -> None:
        state["sent"] += 1
        sim.send(link, {"msg": msg}, on_delivery, actor=to)

    def msg1_end(ev: Event) -> None:
        start_timer(timers.rar_window, FailureStep.RAR_EXPIRY)
        send("msg1", "gnb", gnb_got_msg1)

    def gnb_got_msg1(ev: Event) -> None:
        sim.schedule_us(sim.now_us + proc_us, "gnb", "msg2_tx", lambda e: send("msg2", "grn", grn_got_msg2))

    def grn_got_msg2(ev: Event) -> None:
        stop_timer()
        if mode is RaMode.CONTENTION_FREE:
            state["done_us"] = sim.now_us
            return
        sim.schedule_us(sim.now_us + proc_us + to_us(tx_time), "grn", "msg3_end", msg3_end)

    def msg3_end(ev: Event) -> None:
        start_timer(timers.contention_resolution, FailureStep.CONTENTION_RESOLUTION_EXPIRY)
        send("msg3", "gnb", gnb_got_msg3)

    def gnb_got_msg3(ev: Event) -> None:
        sim.schedule_us(sim.now_us + proc_us, "gnb", "msg4_tx", lambda e: send("msg4", "grn", grn_got_msg4))

    def grn_got_msg4(ev: Event) -> None:
        stop_timer()
        state["done_us"] = sim.now_us

    sim.schedule_us(to_us(tx_time), "grn", "msg1_end", msg1_end)
    trace = sim.run()
    done = state["done_us"]
    return RaOutcome(
        mode,
        done is not None,
        state["failure"],
        None if done is None else to_ms(done),
        list(trace),
        messages_sent=state["sent"],
    )
