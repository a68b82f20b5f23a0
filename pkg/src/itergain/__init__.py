"""itergain: information accounting for iterative data analysis.

Declare what you expect before a tool touches the data, classify what
you observe as expected or anomalous, and keep honest cumulative books
on how much information each step actually delivered.
"""

from .chooser import CandidateTriple, RankCriterion, Ranking, criterion_profile, score_triples
from .dataset import Column, Dataset, load_csv
from .errors import (
    EmptyCandidates,
    EmptySpace,
    EngineError,
    GenError,
    IngestError,
    IntegrityError,
    InvalidAssessment,
    InvalidExpectedSet,
    InvalidProbability,
    KindMismatch,
    ModelViolation,
    ParamError,
    ParseError,
    ReplayError,
    SessionNotFound,
    SpaceMismatch,
    ToolContractError,
    ToolDomainError,
)
from .gains import (
    LogBase,
    ProbabilityAssessment,
    anomaly_gain,
    cross_entropy_gain,
    expected_gain,
    gain_for_probability,
    observed_gain,
)
from .generators import HypothesisGenerator, replicate_rng
from .informativeness import InformativenessVerdict, informativeness_check
from .notation import format_set, parse_set
from .outcomes import (
    EventVerdict,
    FiniteSet,
    IntegerRange,
    Kind,
    OutcomeSet,
    OutcomeSpace,
    RealInterval,
    UnionOf,
    classify,
    complement_within,
    contains,
    expected_set,
    is_strict_subset,
    normalize,
)
from .session import (
    ExpectationDeclaration,
    IterationRecord,
    PlanSummary,
    Session,
    SessionStore,
    SessionSummary,
    ViolationRecord,
    new_session,
    observe_iteration,
    persist,
    plan_iteration,
    replay,
    run_iteration,
    session_summary,
)
from .simulate import (
    SimAssertion,
    SimReport,
    SimulatedAnalyst,
    TrueMechanism,
    simulate_gain_distribution,
    verify_structural_theorems,
    verify_two_analyst_scenarios,
)
from .tools import ToolSpec, apply_tool, builtin_tool_ids, describe_tools, make_tool, register_tool

__version__ = "0.1.0"
