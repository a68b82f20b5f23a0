"""Gain arithmetic: worked examples and structural invariants.

Expected values were frozen from 50-digit evaluation of the closed
forms; tests compare against them at 1e-12 unless a looser published
rounding is the point.
"""

import math

import pytest
from hypothesis import given, strategies as st

from itergain.errors import InvalidAssessment, InvalidProbability
from itergain.gains import (
    BITS_PER_NAT,
    LogBase,
    ProbabilityAssessment,
    anomaly_gain,
    cross_entropy_gain,
    expected_gain,
    gain_for_probability,
    observed_gain,
)

NEGLOG2_095 = 0.074000581443776854077
NEGLOG2_005 = 4.3219280948873623479
NEGLOG2_099 = 0.014499569695115076634
NEGLOG2_001 = 6.6438561897747246957
H2_095 = 0.28639695711595612877
H2_099 = 0.080793135895911172825
XE_080_095 = 0.92358608413249395284
XE_050_075 = 1.2075187496394219093

TIGHT = 1e-12

valid_p = st.floats(min_value=0.5, max_value=1.0, exclude_min=True, exclude_max=True)


def test_gain_at_certainty_is_exactly_zero():
    assert gain_for_probability(1.0) == 0.0
    assert gain_for_probability(1.0, LogBase.NATS) == 0.0


def test_gain_for_probability_examples():
    assert gain_for_probability(0.05) == pytest.approx(4.3219, abs=5e-5)
    assert gain_for_probability(0.05) == pytest.approx(NEGLOG2_005, abs=TIGHT)
    assert gain_for_probability(0.25) == pytest.approx(2.0, abs=TIGHT)


@pytest.mark.parametrize("bad", [0.0, -0.1, 1.0001, 2.0])
def test_gain_for_probability_domain(bad):
    with pytest.raises(InvalidProbability):
        gain_for_probability(bad)


@pytest.mark.parametrize("bad", [0.5, 1.0, 0.0, 1.2, -0.3, 0.49999])
def test_assessment_bounds_strict(bad):
    with pytest.raises(InvalidAssessment):
        ProbabilityAssessment(bad)


def test_assessment_complement():
    a = ProbabilityAssessment(0.95)
    assert a.p_anomaly == pytest.approx(0.05, abs=TIGHT)


def test_observed_gain_examples():
    a95 = ProbabilityAssessment(0.95)
    a99 = ProbabilityAssessment(0.99)
    assert observed_gain(True, a95) == pytest.approx(NEGLOG2_095, abs=TIGHT)
    assert observed_gain(False, a95) == pytest.approx(NEGLOG2_005, abs=TIGHT)
    assert observed_gain(False, a99) == pytest.approx(NEGLOG2_001, abs=TIGHT)


def test_expected_gain_examples():
    assert expected_gain(ProbabilityAssessment(0.95)) == pytest.approx(H2_095, abs=TIGHT)
    assert expected_gain(ProbabilityAssessment(0.95)) == pytest.approx(0.29, abs=5e-3)
    assert expected_gain(ProbabilityAssessment(0.99)) == pytest.approx(H2_099, abs=TIGHT)


def test_expected_gain_approaches_one_bit_near_half():
    assert expected_gain(ProbabilityAssessment(0.5 + 1e-9)) == pytest.approx(1.0, abs=1e-6)


def test_anomaly_gain_examples():
    assert anomaly_gain(ProbabilityAssessment(0.95)) == pytest.approx(NEGLOG2_005, abs=TIGHT)
    assert anomaly_gain(ProbabilityAssessment(0.99)) == pytest.approx(NEGLOG2_001, abs=TIGHT)
    assert anomaly_gain(ProbabilityAssessment(0.75)) == pytest.approx(2.0, abs=TIGHT)


def test_cross_entropy_examples():
    a95 = ProbabilityAssessment(0.95)
    assert cross_entropy_gain(0.95, a95) == pytest.approx(expected_gain(a95), abs=TIGHT)
    assert cross_entropy_gain(0.80, a95) == pytest.approx(XE_080_095, abs=TIGHT)
    assert cross_entropy_gain(0.5, ProbabilityAssessment(0.75)) == pytest.approx(
        XE_050_075, abs=TIGHT
    )


@pytest.mark.parametrize("bad", [0.0, 1.0, -0.5, 1.5])
def test_cross_entropy_domain(bad):
    with pytest.raises(InvalidProbability):
        cross_entropy_gain(bad, ProbabilityAssessment(0.9))


@given(valid_p)
def test_positivity_and_finiteness(p):
    a = ProbabilityAssessment(p)
    for event in (True, False):
        g = observed_gain(event, a)
        assert 0.0 < g < math.inf


@given(valid_p)
def test_anomaly_dominates_expected_side(p):
    a = ProbabilityAssessment(p)
    assert anomaly_gain(a) > gain_for_probability(p)


@given(valid_p)
def test_decomposition_identity(p):
    a = ProbabilityAssessment(p)
    recombined = p * observed_gain(True, a) + (1 - p) * observed_gain(False, a)
    assert abs(expected_gain(a) - recombined) <= TIGHT


@given(valid_p)
def test_base_conversion(p):
    a = ProbabilityAssessment(p)
    for fn in (expected_gain, anomaly_gain):
        bits = fn(a, LogBase.BITS)
        nats = fn(a, LogBase.NATS)
        assert nats * BITS_PER_NAT == pytest.approx(bits, abs=TIGHT)


def test_monotonicity_on_grid():
    grid = [k / 1000 for k in range(501, 1000)]
    h = [expected_gain(ProbabilityAssessment(p)) for p in grid]
    m = [anomaly_gain(ProbabilityAssessment(p)) for p in grid]
    assert all(a > b for a, b in zip(h, h[1:]))
    assert all(a < b for a, b in zip(m, m[1:]))


@given(
    st.floats(min_value=0.01, max_value=0.99),
    valid_p,
)
def test_calibration_identity(p_true, p_hat):
    a = ProbabilityAssessment(p_hat)
    lhs = cross_entropy_gain(p_true, a) - expected_gain(a)
    rhs = (p_hat - p_true) * (math.log2(p_hat) - math.log2(1 - p_hat))
    assert lhs == pytest.approx(rhs, abs=1e-9)
    if p_hat > p_true:
        assert lhs > -1e-12
    assert cross_entropy_gain(p_hat, a) - expected_gain(a) == pytest.approx(0.0, abs=TIGHT)


def test_nats_values():
    a = ProbabilityAssessment(0.95)
    assert observed_gain(True, a, LogBase.NATS) == pytest.approx(
        0.051293294387550533426, abs=TIGHT
    )
    assert expected_gain(a, LogBase.NATS) == pytest.approx(
        0.19851524334587255643, abs=TIGHT
    )
