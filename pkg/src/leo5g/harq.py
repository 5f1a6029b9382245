"""Parallel stop-and-wait HARQ over a long round-trip link.

Dimensioning helpers plus an event-driven sender/receiver pair. A process
sends one transport block in a TTI and stays blocked until its feedback
arrives ``rtt + ack_window`` later; a single transmission happens per TTI.

Decoding uses a small redundancy-accounting model. A block needs
``required`` redundancy units. A first transmission that survives the
channel draw decodes outright; one that fails leaves the receiver short by
1..required-1 units (uniform). A retransmission that survives its draw adds
its units. With 1-bit feedback every retransmission carries
``one_bit_increment`` units; with 2-bit feedback the receiver reports how
many units it still misses and the transmitter sends a matched amount.
Random draws are taken from a per-block stream keyed by (seed, block id),
so two ACK modes run on the same seed see the same channel per block.
"""

from __future__ import annotations

import enum
import heapq
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

from .event_sim import DelayedLink, Event, Simulator, to_ms, to_us, trace_digest


class AckMode(str, enum.Enum):
    ONE_BIT = "one_bit"
    TWO_BIT = "two_bit"
    DISABLED = "disabled"


def min_processes(rtt: float, ack_window: float, tti: float) -> int:
    """Parallel processes needed to keep the pipeline full."""
    if tti <= 0:
        raise ValueError("tti must be positive")
    if rtt < 0 or ack_window < 0:
        raise ValueError("rtt and ack_window must be non-negative")
    # guard against 59.000000001 style float noise before the ceiling
    return max(1, math.ceil(round((rtt + ack_window) / tti, 9)))


def dci_process_bits(n_processes: int) -> int:
    """Width of the HARQ process-id field for ``n_processes`` processes."""
    if n_processes < 1:
        raise ValueError("n_processes must be >= 1")
    return max(1, (n_processes - 1).bit_length())


def buffer_requirement(n_processes: int, tti: float, per_tti_soft_bits: float) -> float:
    if n_processes < 1 or tti <= 0 or per_tti_soft_bits <= 0:
        raise ValueError("buffer inputs must be positive")
    return n_processes * tti * per_tti_soft_bits


@dataclass(frozen=True)
class RedundancyModel:
    required: int = 4
    one_bit_increment: int = 1
    two_bit_increments: tuple[int, ...] = (1, 2, 3)

    def __post_init__(self) -> None:
        if self.required < 2:
            raise ValueError("required redundancy must be >= 2")
        if self.one_bit_increment <= 0 or any(i <= 0 for i in self.two_bit_increments):
            raise ValueError("redundancy increments must be positive")
        if list(self.two_bit_increments) != sorted(self.two_bit_increments):
            raise ValueError("two-bit increments must grow with the reported shortfall")

    def increment(self, mode: AckMode, remaining: int) -> int:
        if mode is AckMode.TWO_BIT:
            level = min(remaining, len(self.two_bit_increments))
            return self.two_bit_increments[level - 1]
        return self.one_bit_increment


@dataclass(frozen=True)
class HarqConfig:
    n_processes: int = 8
    tti: float = 1.0
    ack_window: float = 8.0
    ack_mode: AckMode = AckMode.ONE_BIT
    max_transmissions: int = 4
    per_process_buffer: float = 1.0  # soft-buffer units per TTI of data

    def __post_init__(self) -> None:
        if self.n_processes < 1:
            raise ValueError("n_processes must be >= 1")
        if not self.tti > 0:
            raise ValueError("tti must be positive")
        if self.ack_window < 0:
            raise ValueError("ack_window must be non-negative")
        if self.max_transmissions < 1:
            raise ValueError("max_transmissions must be >= 1")
        if not self.per_process_buffer > 0:
            raise ValueError("per_process_buffer must be positive")
        object.__setattr__(self, "ack_mode", AckMode(self.ack_mode))


@dataclass(frozen=True)
class HarqStats:
    offered_ttis: int
    measured_ttis: int
    busy_ttis: int
    offered_packets: int
    delivered_packets: int
    pending_packets: int
    abandoned_packets: int
    lost_packets: int
    transmissions: int
    retransmissions: int
    utilization: float
    peak_buffer: float
    dci_process_bits: int
    trace_digest: str = ""

    def as_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class _Block:
    block_id: int
    rng: random.Random
    attempts: int = 0
    accumulated: int = 0


@dataclass
class _Process:
    pid: int
    free_since: int = 0
    busy: bool = False
    block: _Block | None = None
    retransmit: bool = False
    feedback_handle: Event | None = field(default=None, repr=False)


def _block_rng(seed: int, block_id: int) -> random.Random:
    return random.Random(f"{seed}:{block_id}")


def simulate_harq(
    config: HarqConfig,
    link: DelayedLink,
    error_prob: float,
    duration: float,
    seed: int = 0,
    redundancy: RedundancyModel = RedundancyModel(),
    keep_trace: bool = False,
):
    """Simulate ``duration`` ms of saturated traffic.

    Returns the :class:`HarqStats`; with ``keep_trace`` a ``(stats, trace)``
    pair. ``link`` is copied, so the caller's loss stream is untouched.
    """
    if not 0.0 <= error_prob <= 1.0:
        raise ValueError("error_prob must be in [0, 1]")
    rtt = 2.0 * link.one_way_delay
    if duration < rtt or duration <= 0:
        raise ValueError("duration must cover at least one round trip")
    link = replace(link)
    mode = config.ack_mode
    sim = Simulator()
    tti_us = to_us(config.tti)
    ack_us = to_us(config.ack_window)
    n_slots = int(to_us(duration) // tti_us)
    loop_us = 2 * link.delay_us + ack_us
    warmup_slots = min(-(-2 * loop_us // tti_us), n_slots // 2)

    procs = [_Process(pid) for pid in range(1 if mode is AckMode.DISABLED else config.n_processes)]
    free = [(0, p.pid) for p in procs]  # heap of (free_since, pid)
    counts = dict(offered=0, delivered=0, abandoned=0, lost=0, tx=0, busy_measured=0, peak=0, busy=0)
    next_block = [0]

    def new_block() -> _Block:
        b = _Block(next_block[0], _block_rng(seed, next_block[0]))
        next_block[0] += 1
        counts["offered"] += 1
        return b

    def tick(ev: Event) -> None:
        sim.schedule_us(sim.now_us, "sender", "decide", decide, ev.payload, traced=False)
        if ev.payload + 1 < n_slots:
            sim.schedule_us(sim.now_us + tti_us, "sender", "tick", tick, ev.payload + 1, traced=False)

    def decide(ev: Event) -> None:
        slot = ev.payload
        if not free:
            return
        p = procs[heapq.heappop(free)[1]]
        if p.block is None or not p.retransmit:
            p.block = new_block()
        transmit(p, slot)

    def transmit(p: _Process, slot: int) -> None:
        b = p.block
        b.attempts += 1
        counts["tx"] += 1
        if slot >= warmup_slots:
            counts["busy_measured"] += 1
        sim.record("sender", "tx", {"pid": p.pid, "block": b.block_id, "attempt": b.attempts})
        if mode is AckMode.DISABLED:
            if b.rng.random() < error_prob:
                counts["lost"] += 1
            else:
                counts["delivered"] += 1
            p.block = None
            counts["peak"] = 1
            heapq.heappush(free, (sim.now_us, p.pid))
            return
        p.busy = True
        counts["busy"] += 1
        counts["peak"] = max(counts["peak"], counts["busy"])
        due_us = sim.now_us + loop_us
        rec = sim.send(link, {"pid": p.pid, "block": b.block_id}, lambda e: receive(p, b, due_us), actor="receiver")
        if not rec.delivered:
            # missing feedback is read as NACK at the expected instant
            sim.schedule_us(due_us, "sender", "dtx", lambda e: feedback(p, None))

    def receive(p: _Process, b: _Block, due_us: int) -> None:
        ok = b.rng.random() >= error_prob
        if b.attempts == 1:
            if ok:
                b.accumulated = redundancy.required
            else:
                b.accumulated = 1 + int(b.rng.random() * (redundancy.required - 1))
        elif ok:
            b.accumulated += redundancy.increment(mode, redundancy.required - b.accumulated)
        remaining = max(0, redundancy.required - b.accumulated)
        rec = sim.send(link, {"pid": p.pid, "remaining": remaining}, lambda e: feedback(p, remaining),
                       at=to_ms(due_us - link.delay_us), actor="sender")
        if not rec.delivered:
            sim.schedule_us(due_us, "sender", "dtx", lambda e: feedback(p, None))

    def feedback(p: _Process, remaining: int | None) -> None:
        sim.record("sender", "feedback", {"pid": p.pid, "remaining": remaining})
        b = p.block
        p.busy = False
        p.free_since = sim.now_us
        counts["busy"] -= 1
        heapq.heappush(free, (p.free_since, p.pid))
        if remaining == 0:
            counts["delivered"] += 1
            p.block, p.retransmit = None, False
        elif b.attempts >= config.max_transmissions:
            counts["abandoned"] += 1
            p.block, p.retransmit = None, False
        else:
            p.retransmit = True

    if n_slots:
        sim.schedule_us(0, "sender", "tick", tick, 0, traced=False)
    # stop at the end of the last slot; feedback still in flight stays pending
    sim.run(until=to_ms(n_slots * tti_us))

    pending = sum(1 for p in procs if p.block is not None)
    measured = n_slots - warmup_slots
    stats = HarqStats(
        offered_ttis=n_slots,
        measured_ttis=measured,
        busy_ttis=counts["busy_measured"],
        offered_packets=counts["offered"],
        delivered_packets=counts["delivered"],
        pending_packets=pending,
        abandoned_packets=counts["abandoned"],
        lost_packets=counts["lost"],
        transmissions=counts["tx"],
        retransmissions=counts["tx"] - counts["offered"],
        utilization=counts["busy_measured"] / measured if measured else 0.0,
        peak_buffer=buffer_requirement(max(1, counts["peak"]), config.tti, config.per_process_buffer),
        dci_process_bits=0 if mode is AckMode.DISABLED else dci_process_bits(config.n_processes),
        trace_digest=trace_digest(sim.trace),
    )
    return (stats, list(sim.trace)) if keep_trace else stats


STRATEGIES = ("i", "ii", "iii", "iv")
STRATEGY_LABELS = {
    "i": "larger buffer, full process count",
    "ii": "full process count with 2-bit ACK",
    "iii": "reduced process count",
    "iv": "HARQ disabled",
}


def strategy_configs(
    rtt: float,
    reduced_n: int = 16,
    tti: float = 1.0,
    ack_window: float = 8.0,
    max_transmissions: int = 4,
    per_tti_soft_bits: float = 1.0,
) -> dict[str, HarqConfig]:
    n_full = min_processes(rtt, ack_window, tti)
    base = dict(tti=tti, ack_window=ack_window, max_transmissions=max_transmissions,
                per_process_buffer=per_tti_soft_bits)
    return {
        "i": HarqConfig(n_processes=n_full, ack_mode=AckMode.ONE_BIT, **base),
        "ii": HarqConfig(n_processes=n_full, ack_mode=AckMode.TWO_BIT, **base),
        "iii": HarqConfig(n_processes=reduced_n, ack_mode=AckMode.ONE_BIT, **base),
        "iv": HarqConfig(n_processes=1, ack_mode=AckMode.DISABLED, **base),
    }


def _run_strategy(args):
    key, cfg, link, error_prob, duration, seed = args
    return key, cfg, simulate_harq(cfg, link, error_prob, duration, seed)


def compare_strategies(
    link: DelayedLink,
    error_prob: float,
    duration: float,
    seed: int = 0,
    reduced_n: int = 16,
    tti: float = 1.0,
    ack_window: float = 8.0,
    max_transmissions: int = 4,
    per_tti_soft_bits: float = 1.0,
    workers: int = 1,
) -> list[dict]:
    """One row per mitigation strategy, ordered i, ii, iii, iv."""
    configs = strategy_configs(2.0 * link.one_way_delay, reduced_n, tti, ack_window,
                               max_transmissions, per_tti_soft_bits)
    jobs = [(k, configs[k], link, error_prob, duration, seed) for k in STRATEGIES]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = dict((k, (c, s)) for k, c, s in pool.map(_run_strategy, jobs))
    else:
        results = dict((k, (c, s)) for k, c, s in map(_run_strategy, jobs))
    rows = []
    for key in STRATEGIES:
        cfg, stats = results[key]
        n_buf = 1 if cfg.ack_mode is AckMode.DISABLED else cfg.n_processes
        rows.append({
            "strategy": key,
            "description": STRATEGY_LABELS[key],
            "ack_mode": cfg.ack_mode.value,
            "n_processes": cfg.n_processes,
            "utilization": stats.utilization,
            "retransmissions": stats.retransmissions,
            "delivered_packets": stats.delivered_packets,
            "lost_packets": stats.lost_packets + stats.abandoned_packets,
            "peak_buffer": stats.peak_buffer,
            "buffer_requirement": buffer_requirement(n_buf, cfg.tti, cfg.per_process_buffer),
            "dci_bits": stats.dci_process_bits,
        })
    return rows
