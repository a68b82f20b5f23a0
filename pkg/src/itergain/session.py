"""Analytic sessions: executing iterations and keeping honest books.

One iteration = declare an expected set and a probability before looking,
apply the tool, classify the output as-expected or unexpected, and bank
the realized information gain. A session accumulates observed gain (s_g)
and declared expected gain (s_h); their divergence is the calibration
diagnostic.

Sessions persist to an append-only, line-delimited JSON log. Nothing in
a log is trusted on load: every gain, verdict, and sum is recomputed from
the declaration and the observed value, so silent edits surface as
IntegrityError.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable

from .dataset import Dataset
from .errors import (
    EngineError,
    IntegrityError,
    InvalidExpectedSet,
    ModelViolation,
    ReplayError,
    SessionNotFound,
)
from .gains import (
    LogBase,
    ProbabilityAssessment,
    anomaly_gain,
    expected_gain,
    observed_gain,
)
from .notation import format_set, parse_set
from .outcomes import EventVerdict, OutcomeSet, ScalarValue, classify, expected_set
from .tools import ToolSpec, apply_tool

_LOG_VERSION = 1


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass(frozen=True)
class ExpectationDeclaration:
    """What the analyst commits to before the tool touches the data."""

    expected_set: OutcomeSet
    assessment: ProbabilityAssessment
    declared_at: str = field(default_factory=_now)
    note: str = ""


@dataclass(frozen=True)
class PlanSummary:
    """Gains computable before execution: expected (h) and anomaly (m)."""

    h_expected: float
    m_anomaly: float


@dataclass(frozen=True)
class IterationRecord:
    index: int
    tool: ToolSpec
    declaration: ExpectationDeclaration
    observed: ScalarValue
    verdict: EventVerdict
    g_observed: float
    h_expected: float
    m_anomaly: float


@dataclass(frozen=True)
class ViolationRecord:
    tool: ToolSpec
    declaration: ExpectationDeclaration
    observed: ScalarValue


class Session:
    """Ordered iteration records with running information sums.

    Single-writer: mutations are serialized on an internal lock; reads
    take a consistent snapshot. One session, one log base.
    """

    def __init__(
        self,
        session_id: str | None = None,
        base: LogBase = LogBase.BITS,
        created_at: str | None = None,
    ):
        self.session_id = session_id or uuid.uuid4().hex[:12]
        self.base = base
        self.created_at = created_at or _now()
        self.records: list[IterationRecord] = []
        self.violations: list[ViolationRecord] = []
        self.s_g = 0.0
        self.s_h = 0.0
        self._events: list[IterationRecord | ViolationRecord] = []
        self._lock = threading.RLock()
        self._sink: Callable[[dict], None] | None = None

    @property
    def t_count(self) -> int:
        return len(self.records)

    def bind_sink(self, sink: Callable[[dict], None]) -> None:
        """Attach an appender called with each new log payload."""
        self._sink = sink

    def _emit(self, payload: dict) -> None:
        if self._sink is not None:
            self._sink(payload)


def new_session(base: LogBase = LogBase.BITS, session_id: str | None = None) -> Session:
    return Session(session_id=session_id, base=base)


def _check_declaration(tool: ToolSpec, declaration: ExpectationDeclaration) -> None:
    if declaration.expected_set.space != tool.declared_space:
        raise InvalidExpectedSet(
            f"declaration is over {declaration.expected_set.space}, but "
            f"{tool.tool_id} has outcome set {tool.declared_space}"
        )


def plan_iteration(
    session: Session, tool: ToolSpec, declaration: ExpectationDeclaration
) -> PlanSummary:
    """Gains implied by a declaration, before any data is touched."""
    _check_declaration(tool, declaration)
    return PlanSummary(
        h_expected=expected_gain(declaration.assessment, session.base),
        m_anomaly=anomaly_gain(declaration.assessment, session.base),
    )


def run_iteration(
    session: Session,
    tool: ToolSpec,
    declaration: ExpectationDeclaration,
    data: Dataset,
) -> IterationRecord:
    """Execute one full iteration and append it to the session.

    An output outside the declared outcome set is recorded as a model
    violation (sums unchanged) and re-raised: the declaration's premise
    failed, so no gain is banked.
    """
    plan = plan_iteration(session, tool, declaration)
    try:
        observed = apply_tool(tool, data)
    except ModelViolation as exc:
        observed = getattr(exc, "observed", None)
        if observed is not None:
            _log_violation(session, tool, declaration, observed)
        raise
    return _record_outcome(session, tool, declaration, observed, plan)


def observe_iteration(
    session: Session,
    tool: ToolSpec,
    declaration: ExpectationDeclaration,
    observed: ScalarValue,
) -> IterationRecord:
    """Record an iteration whose output was produced outside the engine."""
    plan = plan_iteration(session, tool, declaration)
    return _record_outcome(session, tool, declaration, observed, plan)


def _log_violation(
    session: Session,
    tool: ToolSpec,
    declaration: ExpectationDeclaration,
    observed: ScalarValue,
) -> None:
    violation = ViolationRecord(tool, declaration, observed)
    with session._lock:
        session._emit(_violation_payload(session, violation))
        session.violations.append(violation)
        session._events.append(violation)


def _record_outcome(
    session: Session,
    tool: ToolSpec,
    declaration: ExpectationDeclaration,
    observed: ScalarValue,
    plan: PlanSummary,
) -> IterationRecord:
    try:
        verdict = classify(declaration.expected_set, tool.declared_space, observed)
    except ModelViolation:
        _log_violation(session, tool, declaration, observed)
        raise

    g = observed_gain(verdict is EventVerdict.AS_EXPECTED, declaration.assessment, session.base)
    with session._lock:
        record = IterationRecord(
            index=session.t_count + 1,
            tool=tool,
            declaration=declaration,
            observed=observed,
            verdict=verdict,
            g_observed=g,
            h_expected=plan.h_expected,
            m_anomaly=plan.m_anomaly,
        )
        session._emit(_record_payload(session, record))
        session.records.append(record)
        session._events.append(record)
        session.s_g += record.g_observed
        session.s_h += record.h_expected
    return record


@dataclass(frozen=True)
class SessionSummary:
    session_id: str
    base: LogBase
    t_count: int
    s_g: float
    s_h: float
    divergence: float
    n_violations: int
    rows: tuple[dict, ...]

    def to_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "base": self.base.value,
            "t": self.t_count,
            "s_g": self.s_g,
            "s_h": self.s_h,
            "divergence": self.divergence,
            "n_violations": self.n_violations,
            "records": list(self.rows),
        }


def session_summary(session: Session) -> SessionSummary:
    """Cumulative accounting: s_g, s_h, their divergence, per-record rows.

    Rows carry running sums (s_g_after, s_h_after) so display clients can
    chart the cumulative series without doing gain arithmetic themselves.
    """
    with session._lock:
        rows = []
        run_g = 0.0
        run_h = 0.0
        for record in session.records:
            run_g += record.g_observed
            run_h += record.h_expected
            row = _row_dict(record)
            row["s_g_after"] = run_g
            row["s_h_after"] = run_h
            rows.append(row)
        rows = tuple(rows)
        return SessionSummary(
            session_id=session.session_id,
            base=session.base,
            t_count=session.t_count,
            s_g=session.s_g,
            s_h=session.s_h,
            divergence=session.s_g - session.s_h,
            n_violations=len(session.violations),
            rows=rows,
        )


def _row_dict(record: IterationRecord) -> dict:
    return {
        "t": record.index,
        "tool_id": record.tool.tool_id,
        "params": dict(record.tool.params),
        "space": format_set(record.tool.declared_space),
        "expected_set": format_set(record.declaration.expected_set),
        "p_hat": record.declaration.assessment.p_expected,
        "observed": record.observed,
        "verdict": record.verdict.value,
        "g": record.g_observed,
        "h": record.h_expected,
        "m": record.m_anomaly,
        "note": record.declaration.note,
        "at": record.declaration.declared_at,
    }


def _record_payload(session: Session, record: IterationRecord) -> dict:
    return {
        "type": "iteration",
        "session_id": session.session_id,
        "base": session.base.value,
        **_row_dict(record),
    }


def _violation_payload(session: Session, violation: ViolationRecord) -> dict:
    return {
        "type": "violation",
        "session_id": session.session_id,
        "base": session.base.value,
        "tool_id": violation.tool.tool_id,
        "params": dict(violation.tool.params),
        "space": format_set(violation.tool.declared_space),
        "expected_set": format_set(violation.declaration.expected_set),
        "p_hat": violation.declaration.assessment.p_expected,
        "observed": violation.observed,
        "note": violation.declaration.note,
        "at": violation.declaration.declared_at,
    }


def _header_payload(session: Session) -> dict:
    return {
        "type": "session",
        "version": _LOG_VERSION,
        "session_id": session.session_id,
        "base": session.base.value,
        "created_at": session.created_at,
    }


def persist(session: Session, path: str | Path) -> Path:
    """Write the whole session as an append-only JSON-lines log."""
    path = Path(path)
    with session._lock:
        lines = [json.dumps(_header_payload(session))]
        for event in session._events:
            if isinstance(event, IterationRecord):
                lines.append(json.dumps(_record_payload(session, event)))
            else:
                lines.append(json.dumps(_violation_payload(session, event)))
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _parse_line(line: str, line_number: int) -> dict:
    try:
        payload = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ReplayError(f"not valid JSON ({exc.msg})", line_number) from exc
    if not isinstance(payload, dict) or "type" not in payload:
        raise ReplayError("log entry must be an object with a 'type'", line_number)
    return payload


def _require(payload: dict, key: str, line_number: int):
    if key not in payload:
        raise ReplayError(f"missing field {key!r}", line_number)
    return payload[key]


def replay(path: str | Path) -> Session:
    """Reconstruct a session from its log, re-verifying every record.

    Verdicts, gains, and running sums are recomputed from first
    principles; any stored value that disagrees with its recomputation is
    an IntegrityError, and any malformed or invariant-violating entry is
    a ReplayError naming the line.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ReplayError(f"cannot read {path}: {exc}") from exc

    lines = [ln for ln in text.splitlines()]
    if not lines:
        raise ReplayError("log is empty", 1)

    header = _parse_line(lines[0], 1)
    if header.get("type") != "session":
        raise ReplayError("first line must be the session header", 1)
    try:
        base = LogBase.parse(str(_require(header, "base", 1)))
    except EngineError as exc:
        raise ReplayError(str(exc), 1) from exc
    session = Session(
        session_id=str(_require(header, "session_id", 1)),
        base=base,
        created_at=str(header.get("created_at", "")),
    )

    expected_t = 1
    for line_number, line in enumerate(lines[1:], start=2):
        if not line.strip():
            raise ReplayError("blank line inside log", line_number)
        payload = _parse_line(line, line_number)
        kind = payload["type"]
        if kind == "iteration":
            _replay_iteration(session, payload, line_number, expected_t)
            expected_t += 1
        elif kind == "violation":
            _replay_violation(session, payload, line_number)
        else:
            raise ReplayError(f"unknown entry type {kind!r}", line_number)
    return session


def _replay_common(session: Session, payload: dict, line_number: int):
    if payload.get("session_id") != session.session_id:
        raise ReplayError("session_id differs from header", line_number)
    if payload.get("base") != session.base.value:
        raise ReplayError("log mixes gain bases; one session, one base", line_number)
    try:
        space = parse_set(str(_require(payload, "space", line_number)))
        e_set = expected_set(
            parse_set(str(_require(payload, "expected_set", line_number))), space
        )
        assessment = ProbabilityAssessment(_require(payload, "p_hat", line_number))
    except ReplayError:
        raise
    except EngineError as exc:
        raise ReplayError(f"{exc.code}: {exc}", line_number) from exc

    observed = _require(payload, "observed", line_number)
    if not isinstance(observed, (int, float, str)) or isinstance(observed, bool):
        raise ReplayError(f"observed value {observed!r} is not a scalar", line_number)

    params = payload.get("params", {})
    if not isinstance(params, dict):
        raise ReplayError("params must be an object", line_number)
    tool = ToolSpec(
        tool_id=str(_require(payload, "tool_id", line_number)),
        params=params,
        output_kind=space.kind,
        declared_space=space,
    )
    declaration = ExpectationDeclaration(
        expected_set=e_set,
        assessment=assessment,
        declared_at=str(payload.get("at", "")),
        note=str(payload.get("note", "")),
    )
    return tool, declaration, observed


def _replay_iteration(session: Session, payload: dict, line_number: int, expected_t: int) -> None:
    tool, declaration, observed = _replay_common(session, payload, line_number)

    t = _require(payload, "t", line_number)
    if t != expected_t:
        raise ReplayError(f"record index {t!r}, expected {expected_t}", line_number)

    try:
        verdict = classify(declaration.expected_set, tool.declared_space, observed)
    except ModelViolation as exc:
        raise IntegrityError(
            f"line {line_number}: observed {observed!r} lies outside {tool.declared_space}; "
            f"an iteration record cannot hold a model violation"
        ) from exc
    except EngineError as exc:
        raise ReplayError(f"{exc.code}: {exc}", line_number) from exc

    if payload.get("verdict") != verdict.value:
        raise IntegrityError(
            f"line {line_number}: stored verdict {payload.get('verdict')!r} "
            f"!= recomputed {verdict.value!r}"
        )

    g = observed_gain(verdict is EventVerdict.AS_EXPECTED, declaration.assessment, session.base)
    h = expected_gain(declaration.assessment, session.base)
    m = anomaly_gain(declaration.assessment, session.base)
    for name, recomputed in (("g", g), ("h", h), ("m", m)):
        stored = _require(payload, name, line_number)
        if not isinstance(stored, (int, float)) or stored != recomputed:
            raise IntegrityError(
                f"line {line_number}: stored {name}={stored!r} != recomputed {recomputed!r}"
            )

    record = IterationRecord(
        index=expected_t,
        tool=tool,
        declaration=declaration,
        observed=observed,
        verdict=verdict,
        g_observed=g,
        h_expected=h,
        m_anomaly=m,
    )
    session.records.append(record)
    session._events.append(record)
    session.s_g += g
    session.s_h += h


def _replay_violation(session: Session, payload: dict, line_number: int) -> None:
    tool, declaration, observed = _replay_common(session, payload, line_number)
    try:
        in_space = tool.declared_space.contains(observed)
    except EngineError:
        in_space = False
    if in_space:
        raise IntegrityError(
            f"line {line_number}: violation entry whose observed value "
            f"{observed!r} lies inside {tool.declared_space}"
        )
    violation = ViolationRecord(tool, declaration, observed)
    session.violations.append(violation)
    session._events.append(violation)


def session_fingerprint(session: Session) -> tuple:
    """Hashable digest of everything that defines the session's state."""
    with session._lock:
        rows = tuple(tuple(sorted(_row_dict(r).items(), key=lambda kv: kv[0])) for r in session.records)
        rows = tuple(
            tuple((k, tuple(sorted(v.items())) if isinstance(v, dict) else v) for k, v in row)
            for row in rows
        )
        return (
            session.session_id,
            session.base.value,
            session.s_g,
            session.s_h,
            rows,
            len(session.violations),
        )


class SessionStore:
    """Directory of session logs, one append-only file per session."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def path_for(self, session_id: str) -> Path:
        return self.root / f"{session_id}.jsonl"

    def create(self, base: LogBase = LogBase.BITS) -> Session:
        session = new_session(base=base)
        path = self.path_for(session.session_id)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(_header_payload(session)) + "\n")
        self._bind(session, path)
        return session

    def load(self, session_id: str) -> Session:
        path = self.path_for(session_id)
        if not path.exists():
            raise SessionNotFound(f"no session {session_id!r} in {self.root}")
        session = replay(path)
        self._bind(session, path)
        return session

    def list_sessions(self) -> list[str]:
        return sorted(p.stem for p in self.root.glob("*.jsonl"))

    def _bind(self, session: Session, path: Path) -> None:
        def append(payload: dict) -> None:
            with open(path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(payload) + "\n")

        session.bind_sink(append)
