"""Ranking candidate next steps by information criteria.

Each candidate pairs a tool with a declaration. The expected-gain
criterion rewards assessments near 0.5 (genuinely uncertain steps); the
anomaly-gain criterion rewards assessments near 1 (steps whose surprises
would be hugely informative). The two orderings reverse each other
whenever assessments differ, so which criterion the analyst optimizes is
a real decision, not a detail.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import EmptyCandidates, InvalidAssessment, ParamError
from .gains import (
    LogBase,
    ProbabilityAssessment,
    anomaly_gain,
    expected_gain,
)
from .session import ExpectationDeclaration
from .tools import ToolSpec

_TIE_TOLERANCE = 1e-12


class RankCriterion(enum.Enum):
    EXPECTED_GAIN = "expected"
    ANOMALY_GAIN = "anomaly"

    @classmethod
    def parse(cls, text: str) -> "RankCriterion":
        aliases = {
            "expected": cls.EXPECTED_GAIN,
            "expectedgain": cls.EXPECTED_GAIN,
            "h": cls.EXPECTED_GAIN,
            "anomaly": cls.ANOMALY_GAIN,
            "anomalygain": cls.ANOMALY_GAIN,
            "m": cls.ANOMALY_GAIN,
        }
        try:
            return aliases[text.strip().lower().replace("_", "").replace("-", "")]
        except KeyError:
            raise ParamError(
                f"unknown criterion {text!r}; use 'expected' or 'anomaly'"
            ) from None


@dataclass(frozen=True)
class CandidateTriple:
    """A tool with its declared expected set and assessment, indexed by j."""

    tool: ToolSpec
    declaration: ExpectationDeclaration
    j: int


@dataclass(frozen=True)
class Ranking:
    criterion: RankCriterion
    ordered: tuple[tuple[int, float], ...]
    chosen: int

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion.value,
            "ordered": [{"j": j, "score": s} for j, s in self.ordered],
            "chosen": self.chosen,
        }


def score_triples(
    triples: Sequence[CandidateTriple],
    criterion: RankCriterion,
    base: LogBase = LogBase.BITS,
) -> Ranking:
    """Score candidates and order them best-first.

    Scores within 1e-12 of each other count as tied and fall back to the
    lower candidate index, keeping the ranking deterministic.
    """
    triples = list(triples)
    if not triples:
        raise EmptyCandidates("no candidate triples to rank")

    score_fn = expected_gain if criterion is RankCriterion.EXPECTED_GAIN else anomaly_gain
    scored = [(t.j, score_fn(t.declaration.assessment, base)) for t in triples]
    scored.sort(key=lambda js: (-js[1], js[0]))

    ordered: list[tuple[int, float]] = []
    group: list[tuple[int, float]] = []
    for j, score in scored:
        if group and group[0][1] - score > _TIE_TOLERANCE:
            ordered.extend(sorted(group))
            group = []
        group.append((j, score))
    ordered.extend(sorted(group))

    return Ranking(criterion, tuple(ordered), ordered[0][0])


@dataclass(frozen=True)
class ProfileRow:
    p_hat: float
    h_expected: float
    m_anomaly: float


def criterion_profile(
    p_grid: Iterable[float], base: LogBase = LogBase.BITS
) -> list[ProfileRow]:
    """Table of (p, expected gain, anomaly gain) over a grid of assessments.

    Sorted ascending in p; the expected column strictly falls and the
    anomaly column strictly rises along it.
    """
    rows = []
    for p in sorted(p_grid):
        assessment = ProbabilityAssessment(p)
        rows.append(
            ProfileRow(
                p_hat=assessment.p_expected,
                h_expected=expected_gain(assessment, base),
                m_anomaly=anomaly_gain(assessment, base),
            )
        )
    if not rows:
        raise InvalidAssessment("profile grid is empty")
    return rows
