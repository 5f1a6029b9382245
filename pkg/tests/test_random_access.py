import pytest

from leo5g.event_sim import DelayedLink, to_us
from leo5g.geometry import OrbitConfig, PayloadMode
from leo5g.random_access import (
    FailureStep,
    RaMode,
    RaTimers,
    analyze_timers,
    min_rar_window,
    simulate_ra,
    timing_advance_from_geometry,
)

PAPER_LINK = 25.83  # ms one way, representable on the microsecond clock
STD = RaTimers(15.0, 64.0)


def test_timer_caps():
    with pytest.raises(ValueError):
        RaTimers(16.0, 64.0)
    with pytest.raises(ValueError):
        RaTimers(15.0, 65.0)
    with pytest.raises(ValueError):
        RaTimers(0.0, 10.0)
    assert RaTimers(100.0, 128.0, extended=True).rar_window == 100.0


def test_analyze_paper_case():
    v = analyze_timers(STD, 51.66)
    assert not v["rar_window"].feasible
    assert v["contention_resolution"].feasible


def test_analyze_regenerative_still_short():
    assert not analyze_timers(STD, 24.32)["rar_window"].feasible


def test_analyze_zero_delay():
    v = analyze_timers(STD, 0.0, processing=0.0)
    assert all(x.feasible for x in v.values())


@pytest.mark.parametrize("rtt, proc, expected", [(51.66, 2.0, 53.66), (0.0, 0.0, 0.0), (24.32, 2.0, 26.32)])
def test_min_rar_window(rtt, proc, expected):
    assert min_rar_window(rtt, proc) == pytest.approx(expected, abs=1e-12)


def test_timing_advance():
    assert timing_advance_from_geometry(10.0, 5.0) == pytest.approx(51.66, rel=2e-3)
    assert timing_advance_from_geometry(90.0, 90.0) == pytest.approx(4 * 1500 / 299792.458 * 1e3, rel=1e-12)
    regen = OrbitConfig(payload_mode=PayloadMode.REGENERATIVE)
    assert timing_advance_from_geometry(10.0, None, regen) == pytest.approx(24.32, rel=2e-3)
    with pytest.raises(ValueError):
        timing_advance_from_geometry(10.0, None)


def test_standard_window_fails_at_rar():
    out = simulate_ra(RaMode.CONTENTION_BASED, STD, DelayedLink(PAPER_LINK))
    assert not out.success
    assert out.failure_step is FailureStep.RAR_EXPIRY
    # expiry recorded when the window closes, before the RAR would land
    expiry = [r for r in out.trace if r.kind == "rar_expiry"]
    assert expiry[0].time_us == to_us(1.0 + 15.0) + 1


def test_extended_window_succeeds():
    out = simulate_ra(RaMode.CONTENTION_BASED, RaTimers(54.0, 64.0, extended=True), DelayedLink(PAPER_LINK))
    assert out.success and out.failure_step is None
    # two TTIs of uplink transmission, four one-way legs, three reactions
    assert out.completion_time == pytest.approx(2 * 1.0 + 2 * 51.66 + 3 * 1.0, abs=1e-9)
    assert out.completion_time >= 2 * 51.66
    kinds = [(r.actor, r.kind) for r in out.trace]
    assert kinds == [
        ("grn", "msg1_end"), ("gnb", "deliver"), ("gnb", "msg2_tx"), ("grn", "deliver"),
        ("grn", "msg3_end"), ("gnb", "deliver"), ("gnb", "msg4_tx"), ("grn", "deliver"),
    ]


def test_rar_arrival_time():
    out = simulate_ra(RaMode.CONTENTION_BASED, RaTimers(54.0, 64.0, extended=True), DelayedLink(PAPER_LINK))
    rar = [r for r in out.trace if r.detail == {"msg": "msg2"}][0]
    assert rar.time_ms == pytest.approx(1.0 + 51.66 + 1.0)


def test_adhoc():
    out = simulate_ra(RaMode.ADHOC_DEPLOYMENT, STD, DelayedLink(PAPER_LINK))
    assert out.success and out.messages_sent == 0 and out.trace == []
    assert out.timing_advance == pytest.approx(51.66)


def _ok(window_us, link_delay, processing=1.0):
    t = RaTimers(window_us / 1000, 64.0, extended=True)
    return simulate_ra(RaMode.CONTENTION_BASED, t, DelayedLink(link_delay), processing).success


def _cutoff_us(link_delay, processing=1.0):
    lo, hi = 1, 200_000
    assert not _ok(lo, link_delay, processing) and _ok(hi, link_delay, processing)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _ok(mid, link_delay, processing):
            hi = mid
        else:
            lo = mid
    return hi


@pytest.mark.parametrize("delay, proc", [(25.83, 1.0), (12.16, 2.0), (25.83, 0.0)])
def test_threshold_sharpness(delay, proc):
    assert _cutoff_us(delay, proc) == to_us(min_rar_window(2 * delay, proc))


def test_contention_free_is_prefix():
    t = RaTimers(60.0, 64.0, extended=True)
    cb = simulate_ra(RaMode.CONTENTION_BASED, t, DelayedLink(PAPER_LINK, 0.2, 5))
    cf = simulate_ra(RaMode.CONTENTION_FREE, t, DelayedLink(PAPER_LINK, 0.2, 5))
    assert cb.trace[: len(cf.trace)] == cf.trace
    cf_ok = simulate_ra(RaMode.CONTENTION_FREE, t, DelayedLink(PAPER_LINK))
    assert cf_ok.success and cf_ok.messages_sent == 2
    assert cf_ok.completion_time == pytest.approx(1.0 + 51.66 + 1.0)


def test_analysis_agrees_with_simulation():
    delay = PAPER_LINK
    for rar, cr in [(15.0, 64.0), (60.0, 40.0), (60.0, 64.0), (52.0, 52.0)]:
        timers = RaTimers(rar, cr, extended=True)
        verdict = analyze_timers(timers, 2 * delay)
        out = simulate_ra(RaMode.CONTENTION_BASED, timers, DelayedLink(delay))
        if not verdict["rar_window"].feasible:
            assert out.failure_step is FailureStep.RAR_EXPIRY
        elif not verdict["contention_resolution"].feasible:
            assert out.failure_step is FailureStep.CONTENTION_RESOLUTION_EXPIRY
        else:
            assert out.success


def test_lost_preamble():
    out = simulate_ra(RaMode.CONTENTION_BASED, RaTimers(60.0, 64.0, extended=True), DelayedLink(PAPER_LINK, 1.0))
    assert out.failure_step is FailureStep.RAR_EXPIRY and out.messages_sent == 1


def test_deterministic():
    t = RaTimers(60.0, 64.0, extended=True)
    runs = [simulate_ra("contention_based", t, DelayedLink(PAPER_LINK, 0.3, 9)).as_dict() for _ in range(2)]
    assert runs[0] == runs[1]
