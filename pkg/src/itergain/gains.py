"""Information gain arithmetic over a binary expected/anomaly partition.

All functions are pure and operate on scalar probabilities in double
precision. Gains are reported in bits or nats depending on the session's
log base; bits is the default everywhere.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import InvalidAssessment, InvalidProbability

BITS_PER_NAT = math.log2(math.e)


class LogBase(enum.Enum):
    """Logarithm convention for gains. Fixed once per session."""

    BITS = "bits"
    NATS = "nats"

    def log(self, x: float) -> float:
        return math.log2(x) if self is LogBase.BITS else math.log(x)

    @property
    def unit(self) -> str:
        return self.value

    @classmethod
    def parse(cls, text: str) -> "LogBase":
        try:
            return cls(text.lower())
        except ValueError:
            raise InvalidProbability(
                f"unknown log base {text!r}, expected 'bits' or 'nats'"
            ) from None


@dataclass(frozen=True)
class ProbabilityAssessment:
    """The analyst's probability that the output lands in the expected set.

    Must lie strictly between 0.5 and 1: the expected set is judged more
    likely than not, while anomalies remain possible. Values of exactly
    0.5 or 1.0 are rejected, never clamped.
    """

    p_expected: float

    def __post_init__(self) -> None:
        p = self.p_expected
        if isinstance(p, bool) or not isinstance(p, (int, float)):
            raise InvalidAssessment(f"p_expected must be a number, got {p!r}")
        p = float(p)
        if not 0.5 < p < 1.0:
            raise InvalidAssessment(
                f"p_expected must lie strictly between 0.5 and 1, got {p!r}"
            )
        object.__setattr__(self, "p_expected", p)

    @property
    def p_anomaly(self) -> float:
        return 1.0 - self.p_expected


def gain_for_probability(p: float, base: LogBase = LogBase.BITS) -> float:
    """Surprisal -log(p) of observing an event assigned probability p.

    p = 1 returns exactly 0.0: a certain event carries no information.
    """
    if isinstance(p, bool) or not isinstance(p, (int, float)):
        raise InvalidProbability(f"probability must be a number, got {p!r}")
    if not 0.0 < p <= 1.0:
        raise InvalidProbability(f"probability must lie in (0, 1], got {p!r}")
    if p == 1.0:
        return 0.0
    return -base.log(p)


def observed_gain(
    event_in_expected: bool,
    assessment: ProbabilityAssessment,
    base: LogBase = LogBase.BITS,
) -> float:
    """Gain realized once the verdict is known.

    -log(p) when the output landed in the expected set, -log(1-p) when it
    landed in the anomaly set. Strictly positive and finite for any valid
    assessment.
    """
    p = assessment.p_expected if event_in_expected else assessment.p_anomaly
    return -base.log(p)


def expected_gain(
    assessment: ProbabilityAssessment, base: LogBase = LogBase.BITS
) -> float:
    """Mean gain under the analyst's own assessment: binary entropy of p.

    Decreases toward 0 as p approaches 1 and toward its supremum of one
    bit as p approaches 0.5.
    """
    p = assessment.p_expected
    q = assessment.p_anomaly
    return p * -base.log(p) + q * -base.log(q)


def anomaly_gain(
    assessment: ProbabilityAssessment, base: LogBase = LogBase.BITS
) -> float:
    """Gain if the anomaly occurs: -log(1-p).

    Always finite, and the largest gain a single step can deliver, since
    the anomaly side carries less probability than the expected side.
    """
    return -base.log(assessment.p_anomaly)


def cross_entropy_gain(
    p_true: float,
    assessment: ProbabilityAssessment,
    base: LogBase = LogBase.BITS,
) -> float:
    """Mean gain when the expected event truly occurs with probability p_true.

    Reduces to ``expected_gain`` at p_true == p_expected; the excess over
    ``expected_gain`` is what a miscalibrated analyst accrues per step.
    """
    if isinstance(p_true, bool) or not isinstance(p_true, (int, float)):
        raise InvalidProbability(f"p_true must be a number, got {p_true!r}")
    if not 0.0 < p_true < 1.0:
        raise InvalidProbability(f"p_true must lie in (0, 1), got {p_true!r}")
    p_hat = assessment.p_expected
    q_hat = assessment.p_anomaly
    return p_true * -base.log(p_hat) + (1.0 - p_true) * -base.log(q_hat)
