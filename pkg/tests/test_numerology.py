import pytest
from hypothesis import given, strategies as st

from leo5g.numerology import (
    SCS_FAMILY_KHZ,
    CfoTolerancePolicy,
    Numerology,
    max_tolerable_cfo,
    scs_from_index,
    waveform_feasibility,
)


@pytest.mark.parametrize("n, scs", [(0, 15), (1, 30), (5, 480), (6, 960)])
def test_scs_from_index(n, scs):
    assert scs_from_index(n) == scs


@pytest.mark.parametrize("bad", [-1, 7, 2.5])
def test_scs_rejects_bad_index(bad):
    with pytest.raises(ValueError):
        scs_from_index(bad)


def test_family_membership():
    for n, scs in enumerate(SCS_FAMILY_KHZ):
        assert scs % 15 == 0
        q = scs // 15
        assert q & (q - 1) == 0 and q == 2**n


@pytest.mark.parametrize("scs, tol", [(480, 30.4), (240, 15.2), (15, 0.95)])
def test_tolerance(scs, tol):
    assert max_tolerable_cfo(scs) == tol


def test_tolerance_linear():
    for a, b in zip(SCS_FAMILY_KHZ, SCS_FAMILY_KHZ[1:]):
        assert max_tolerable_cfo(b) == 2 * max_tolerable_cfo(a)


def test_tolerance_rejects_foreign_scs():
    with pytest.raises(ValueError):
        max_tolerable_cfo(100)


def test_policy():
    assert CfoTolerancePolicy().fraction == pytest.approx(0.063333, abs=1e-6)
    assert max_tolerable_cfo(480, CfoTolerancePolicy.from_fraction(0.1)) == pytest.approx(48.0)
    with pytest.raises(ValueError):
        CfoTolerancePolicy.from_fraction(1.5)


def test_verdicts():
    v = waveform_feasibility(3.2e3, Numerology(5))
    assert v.feasible and v.margin_hz == pytest.approx(27.2e3)
    assert waveform_feasibility(0.0, Numerology(0)).feasible
    assert not waveform_feasibility(31e3, Numerology(5)).feasible
    assert not waveform_feasibility(-31e3, Numerology(5)).feasible


@given(st.floats(0, 1e5), st.floats(0, 1e5), st.integers(0, 6))
def test_verdict_monotone(r1, r2, n):
    lo, hi = sorted((r1, r2))
    if waveform_feasibility(hi, Numerology(n)).feasible:
        assert waveform_feasibility(lo, Numerology(n)).feasible
