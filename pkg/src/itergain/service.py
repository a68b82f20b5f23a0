"""Local HTTP session API.

Every response is an envelope ``{ok, payload | error, engine_version}``;
errors carry the engine error codes verbatim so clients can branch on
them. The service is stateless above the session log store: restarting
and replaying the logs reproduces every summary exactly. Per-session
mutations are serialized; distinct sessions proceed in parallel.
"""

from __future__ import annotations

import os
import tempfile
import threading
import uuid
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request, UploadFile
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from . import __version__
from .chooser import CandidateTriple, RankCriterion, score_triples
from .dataset import Dataset, load_csv
from .errors import (
    EngineError,
    IngestError,
    IntegrityError,
    ModelViolation,
    ParamError,
    SessionNotFound,
    ToolContractError,
    ToolDomainError,
)
from .gains import LogBase, ProbabilityAssessment
from .generators import HypothesisGenerator
from .informativeness import informativeness_check
from .notation import format_set, parse_set
from .outcomes import complement_within, expected_set
from .session import (
    ExpectationDeclaration,
    Session,
    SessionStore,
    plan_iteration,
    run_iteration,
    session_summary,
)
from .simulate import run_scenario
from .tools import describe_tools, make_tool

_DEFAULT_STATUS = 400
_STATUS_OVERRIDES = {
    SessionNotFound: 404,
    ModelViolation: 409,
    ToolDomainError: 422,
    ToolContractError: 500,
    IntegrityError: 500,
}

MAX_UPLOAD_MB_ENV = "ITERGAIN_MAX_UPLOAD_MB"


def _envelope(payload: Any = None, error: dict | None = None) -> dict:
    body: dict = {"ok": error is None, "engine_version": __version__}
    if error is None:
        body["payload"] = payload
    else:
        body["error"] = error
    return body


def _error_response(code: str, message: str, status: int) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content=_envelope(error={"code": code, "message": message}),
    )


class PlanRequest(BaseModel):
    tool: str
    params: dict = Field(default_factory=dict)
    expect: str
    p: float
    dataset_id: str | None = None


class IterationRequest(PlanRequest):
    note: str = ""


class CandidateBody(BaseModel):
    tool: str
    params: dict = Field(default_factory=dict)
    expect: str
    p: float


class RankRequest(BaseModel):
    criterion: str
    candidates: list[CandidateBody]


class SessionRequest(BaseModel):
    base: str = "bits"


class InformativenessRequest(BaseModel):
    tool: str
    params: dict = Field(default_factory=dict)
    h1: dict
    h2: dict
    n_replicates: int = 1000
    alpha: float = 0.01
    seed: int = 0


class SimulateRequest(BaseModel):
    scenario: dict


class _State:
    """Session cache enforcing the single-writer contract per session."""

    def __init__(self, store: SessionStore):
        self.store = store
        self.sessions: dict[str, Session] = {}
        self.datasets: dict[str, Dataset] = {}
        self._lock = threading.Lock()

    def create_session(self, base: LogBase) -> Session:
        session = self.store.create(base)
        with self._lock:
            self.sessions[session.session_id] = session
        return session

    def get_session(self, session_id: str) -> Session:
        with self._lock:
            session = self.sessions.get(session_id)
            if session is None:
                session = self.store.load(session_id)
                self.sessions[session_id] = session
            return session

    def get_dataset(self, dataset_id: str) -> Dataset:
        try:
            return self.datasets[dataset_id]
        except KeyError:
            raise ParamError(f"unknown dataset_id {dataset_id!r}; upload it first") from None

    def add_dataset(self, data: Dataset) -> str:
        dataset_id = uuid.uuid4().hex[:12]
        self.datasets[dataset_id] = data
        return dataset_id


def _build_declaration(tool, expect: str, p: float, note: str = "") -> ExpectationDeclaration:
    e_set = expected_set(parse_set(expect), tool.declared_space)
    return ExpectationDeclaration(e_set, ProbabilityAssessment(p), note=note)


def create_app(
    store_dir: str | Path | None = None,
    frontend_dir: str | Path | None = None,
) -> FastAPI:
    """Build the API app over a session log directory."""
    store_dir = Path(store_dir or os.environ.get("ITERGAIN_STORE", "./itergain-sessions"))
    state = _State(SessionStore(store_dir))
    max_upload = int(os.environ.get(MAX_UPLOAD_MB_ENV, "50")) * 1024 * 1024

    app = FastAPI(title="itergain session API", version=__version__)
    app.state.engine = state

    @app.exception_handler(EngineError)
    async def engine_error_handler(request: Request, exc: EngineError):
        status = _STATUS_OVERRIDES.get(type(exc), _DEFAULT_STATUS)
        return _error_response(exc.code, str(exc), status)

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        return _error_response("ParamError", str(exc.errors()), 400)

    @app.get("/health")
    def health():
        return _envelope({"status": "up"})

    @app.get("/tools")
    def tools():
        return _envelope({"tools": describe_tools()})

    @app.post("/sessions")
    def create_session(body: SessionRequest):
        session = state.create_session(LogBase.parse(body.base))
        return _envelope(
            {"session_id": session.session_id, "base": session.base.value}
        )

    @app.get("/sessions")
    def list_sessions():
        return _envelope({"sessions": state.store.list_sessions()})

    @app.get("/sessions/{session_id}/summary")
    def summary(session_id: str):
        session = state.get_session(session_id)
        return _envelope(session_summary(session).to_dict())

    @app.post("/sessions/{session_id}/plan")
    def plan(session_id: str, body: PlanRequest):
        session = state.get_session(session_id)
        data = state.get_dataset(body.dataset_id) if body.dataset_id else None
        tool = make_tool(body.tool, body.params, data)
        declaration = _build_declaration(tool, body.expect, body.p)
        summary = plan_iteration(session, tool, declaration)
        return _envelope(
            {
                "tool_id": tool.tool_id,
                "space": format_set(tool.declared_space),
                "expected_set": format_set(declaration.expected_set),
                "anomaly_set": format_set(complement_within(declaration.expected_set)),
                "p": declaration.assessment.p_expected,
                "h": summary.h_expected,
                "m": summary.m_anomaly,
                "base": session.base.value,
            }
        )

    @app.post("/sessions/{session_id}/iterations")
    def iterate(session_id: str, body: IterationRequest):
        session = state.get_session(session_id)
        if body.dataset_id is None:
            raise ParamError("an iteration needs a dataset_id")
        data = state.get_dataset(body.dataset_id)
        tool = make_tool(body.tool, body.params, data)
        declaration = _build_declaration(tool, body.expect, body.p, body.note)
        record = run_iteration(session, tool, declaration, data)
        return _envelope(
            {
                "t": record.index,
                "observed": record.observed,
                "verdict": record.verdict.value,
                "g": record.g_observed,
                "h": record.h_expected,
                "m": record.m_anomaly,
                "s_g": session.s_g,
                "s_h": session.s_h,
                "divergence": session.s_g - session.s_h,
            }
        )

    @app.post("/sessions/{session_id}/rank")
    def rank(session_id: str, body: RankRequest):
        session = state.get_session(session_id)
        criterion = RankCriterion.parse(body.criterion)
        triples = []
        for j, cand in enumerate(body.candidates):
            tool = make_tool(cand.tool, cand.params)
            declaration = _build_declaration(tool, cand.expect, cand.p)
            triples.append(CandidateTriple(tool, declaration, j))
        ranking = score_triples(triples, criterion, session.base)
        ordered = []
        for j, score in ranking.ordered:
            cand = body.candidates[j]
            ordered.append(
                {"j": j, "score": score, "tool": cand.tool, "expect": cand.expect, "p": cand.p}
            )
        return _envelope(
            {"criterion": ranking.criterion.value, "ordered": ordered, "chosen": ranking.chosen}
        )

    @app.post("/datasets")
    async def upload_dataset(file: UploadFile):
        content = await file.read()
        if len(content) > max_upload:
            raise IngestError(
                f"upload exceeds limit of {max_upload // (1024 * 1024)} MB"
            )
        suffix = Path(file.filename or "upload.csv").suffix or ".csv"
        with tempfile.NamedTemporaryFile(suffix=suffix, delete=False) as tmp:
            tmp.write(content)
            tmp_path = Path(tmp.name)
        try:
            data = load_csv(tmp_path)
        finally:
            tmp_path.unlink(missing_ok=True)
        dataset_id = state.add_dataset(data)
        return _envelope(
            {
                "dataset_id": dataset_id,
                "n_rows": data.n_rows,
                "columns": data.head_summary(),
            }
        )

    @app.post("/informativeness")
    def informativeness(body: InformativenessRequest):
        tool = make_tool(body.tool, body.params)
        verdict = informativeness_check(
            tool,
            HypothesisGenerator.from_dict(body.h1),
            HypothesisGenerator.from_dict(body.h2),
            n_replicates=body.n_replicates,
            alpha=body.alpha,
            seed=body.seed,
        )
        return _envelope(verdict.to_dict())

    @app.post("/simulate")
    def simulate(body: SimulateRequest):
        report = run_scenario(body.scenario)
        return _envelope(report.to_dict())

    if frontend_dir is not None and Path(frontend_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(frontend_dir), html=True), name="console")

    return app
