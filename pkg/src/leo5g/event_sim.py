"""Deterministic discrete-event engine and a fixed-delay lossy link.

Times are given in milliseconds at the API and kept internally as integer
microseconds, so repeated additions never drift. Events at the same
instant fire in scheduling order.
"""

from __future__ import annotations

import hashlib
import heapq
import itertools
import json
import random
from dataclasses import dataclass, field
from typing import Any, Callable, NamedTuple

US_PER_MS = 1000


class SchedulingError(ValueError):
    """An event was scheduled before the current simulation time."""


def to_us(ms: float) -> int:
    return int(round(ms * US_PER_MS))


def to_ms(us: int) -> float:
    return us / US_PER_MS


class TraceRecord(NamedTuple):
    time_us: int
    actor: str
    kind: str
    detail: Any = None

    @property
    def time_ms(self) -> float:
        return to_ms(self.time_us)

    def as_dict(self) -> dict:
        return {"time_ms": self.time_ms, "actor": self.actor, "kind": self.kind, "detail": self.detail}


@dataclass
class Event:
    fire_time: int
    sequence: int
    actor: str = field(compare=False)
    kind: str = field(compare=False)
    callback: Callable[["Event"], None] | None = field(compare=False, default=None)
    payload: Any = field(compare=False, default=None)
    cancelled: bool = field(compare=False, default=False)
    fired: bool = field(compare=False, default=False)
    traced: bool = field(compare=False, default=True)


class Simulator:
    """Single-threaded event loop.

    ``run`` returns the ordered trace of fired events. Events scheduled
    with ``traced=False`` still fire but are kept out of the trace.
    """

    def __init__(self) -> None:
        # heap of (fire_time, sequence, event); tuples compare faster than dataclasses
        self._queue: list[tuple[int, int, Event]] = []
        self._seq = itertools.count()
        self._now = 0
        self.trace: list[TraceRecord] = []

    @property
    def now(self) -> float:
        return to_ms(self._now)

    @property
    def now_us(self) -> int:
        return self._now

    def schedule_us(self, fire_time_us, actor, kind, callback=None, payload=None, traced=True) -> Event:
        if fire_time_us < self._now:
            raise SchedulingError(f"cannot schedule at {fire_time_us} us before now ({self._now} us)")
        ev = Event(int(fire_time_us), next(self._seq), actor, kind, callback, payload, traced=traced)
        heapq.heappush(self._queue, (ev.fire_time, ev.sequence, ev))
        return ev

    def schedule(self, fire_time: float, actor: str, kind: str, callback=None, payload=None, traced=True) -> Event:
        """Schedule an event at absolute time ``fire_time`` ms."""
        return self.schedule_us(to_us(fire_time), actor, kind, callback, payload, traced)

    def schedule_in(self, delay: float, actor: str, kind: str, callback=None, payload=None, traced=True) -> Event:
        if delay < 0:
            raise SchedulingError("negative delay")
        return self.schedule_us(self._now + to_us(delay), actor, kind, callback, payload, traced)

    def cancel(self, handle: Event) -> bool:
        """Cancel a pending event. Returns False if it already fired or was cancelled."""
        if handle.fired or handle.cancelled:
            return False
        handle.cancelled = True
        return True

    def record(self, actor: str, kind: str, detail: Any = None) -> None:
        """Append an action taken at the current instant to the trace."""
        self.trace.append(TraceRecord(self._now, actor, kind, _detail(detail)))

    def stop(self) -> None:
        """Drop every pending event; ``run`` then returns immediately."""
        for _, _, ev in self._queue:
            ev.cancelled = True
        self._queue.clear()

    def pending(self) -> int:
        return sum(1 for _, _, ev in self._queue if not ev.cancelled)

    def step(self) -> Event | None:
        while self._queue:
            ev = heapq.heappop(self._queue)[2]
            if ev.cancelled:
                continue
            self._now = ev.fire_time
            ev.fired = True
            if ev.traced:
                self.trace.append(TraceRecord(ev.fire_time, ev.actor, ev.kind, _detail(ev.payload)))
            if ev.callback is not None:
                ev.callback(ev)
            return ev
        return None

    def run(self, until: float | None = None) -> list[TraceRecord]:
        """Fire events in order until the queue drains or the next event lies
        beyond ``until`` ms. The clock is left at ``until`` in the latter case."""
        limit = None if until is None else to_us(until)
        while self._queue:
            head = self._queue[0][2]
            if head.cancelled:
                heapq.heappop(self._queue)
                continue
            if limit is not None and head.fire_time > limit:
                break
            self.step()
        if limit is not None and limit > self._now:
            self._now = limit
        return self.trace

    run_until = run

    def send(self, link: "DelayedLink", msg: Any, on_delivery: Callable[[Event], None] | None = None,
             at: float | None = None, actor: str | None = None) -> "SendRecord":
        """Put ``msg`` on ``link`` at ``at`` ms (default: now)."""
        at_us = self._now if at is None else to_us(at)
        if at_us < self._now:
            raise SchedulingError("cannot send in the past")
        link.sent += 1
        name = actor or link.name
        if link.draw_loss():
            link.lost += 1
            if link.trace_losses:
                self.trace.append(TraceRecord(at_us, name, "lost", _detail(msg)))
            return SendRecord(False, at_us, None, None)
        deliver_us = at_us + link.delay_us

        def _deliver(ev: Event) -> None:
            link.delivered += 1
            if on_delivery is not None:
                on_delivery(ev)

        ev = self.schedule_us(deliver_us, name, "deliver", _deliver, msg)
        return SendRecord(True, at_us, deliver_us, ev)


def _detail(payload: Any) -> Any:
    if payload is None or isinstance(payload, (str, int, float, bool)):
        return payload
    if isinstance(payload, dict):
        return {k: _detail(v) for k, v in payload.items()}
    if isinstance(payload, (list, tuple)):
        return [_detail(v) for v in payload]
    return repr(payload)


class SendRecord(NamedTuple):
    delivered: bool
    sent_us: int
    deliver_us: int | None
    handle: Event | None

    @property
    def deliver_time(self) -> float | None:
        return None if self.deliver_us is None else to_ms(self.deliver_us)


@dataclass
class DelayedLink:
    """Fixed one-way delay with independent per-message loss.

    A message is lost when the seeded uniform draw is below
    ``loss_probability``; the draw happens for every message, so the loss
    pattern depends only on the seed and the send order.
    """

    one_way_delay: float  # ms
    loss_probability: float = 0.0
    rng_seed: int = 0
    name: str = "link"
    trace_losses: bool = True
    sent: int = field(default=0, init=False)
    delivered: int = field(default=0, init=False)
    lost: int = field(default=0, init=False)

    def __post_init__(self) -> None:
        if self.one_way_delay < 0:
            raise ValueError("one_way_delay must be non-negative")
        if not 0.0 <= self.loss_probability <= 1.0:
            raise ValueError("loss_probability must be in [0, 1]")
        self._rng = random.Random(self.rng_seed)

    @property
    def delay_us(self) -> int:
        return to_us(self.one_way_delay)

    def draw_loss(self) -> bool:
        return self._rng.random() < self.loss_probability


def trace_digest(trace) -> str:
    """SHA-256 of a trace, for cheap equality checks across runs."""
    blob = json.dumps([tuple(r) for r in trace], sort_keys=True, separators=(",", ":"), default=repr)
    return hashlib.sha256(blob.encode()).hexdigest()
