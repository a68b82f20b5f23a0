"""Monte Carlo verification harness for the information accounting.

Two planes: abstract runs draw the as-expected event directly with a true
probability (fast, with exact theory targets); concrete runs sample
datasets from a generator and push them through a real tool (slower,
exercises the whole stack). Identical seeds give bit-identical reports:
per-run streams are counter-based and accumulation is in run order.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Mapping

from .errors import GenError, ParamError, SpaceMismatch
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
from .notation import parse_set
from .outcomes import (
    EventVerdict,
    Kind,
    OutcomeSet,
    OutcomeSpace,
    classify,
    expected_set,
)
from .tools import ToolSpec, apply_tool, make_tool

_IDENTITY_TOL = 1e-12
_GRID = tuple(k / 1000 for k in range(501, 1000))


@dataclass(frozen=True)
class SimulatedAnalyst:
    """A fixed declaration replayed across simulated iterations."""

    analyst_id: str
    expected_set: OutcomeSet
    assessment: ProbabilityAssessment
    base: LogBase = LogBase.BITS


@dataclass(frozen=True)
class TrueMechanism:
    """The simulated truth: either an event probability or an output draw."""

    event_probability: float | None = None
    outcome_values: tuple | None = None
    outcome_weights: tuple | None = None
    generator: HypothesisGenerator | None = None
    tool: ToolSpec | None = None

    @staticmethod
    def bernoulli(p: float) -> "TrueMechanism":
        """Abstract plane: the as-expected event occurs with probability p."""
        if isinstance(p, bool) or not isinstance(p, (int, float)) or not 0.0 < p < 1.0:
            raise ParamError(f"event probability must lie in (0, 1), got {p!r}")
        return TrueMechanism(event_probability=float(p))

    @staticmethod
    def categorical(space: OutcomeSpace, weights: Mapping) -> "TrueMechanism":
        """Draw outputs from a finite space with the given weights."""
        members = list(space.iter_values())
        total = 0.0
        w = []
        for value in members:
            weight = float(weights.get(value, 0.0))
            if weight < 0 or not math.isfinite(weight):
                raise ParamError(f"weight for {value!r} must be finite and >= 0")
            w.append(weight)
            total += weight
        for value in weights:
            if not space.contains(value):
                raise ParamError(f"weighted value {value!r} is not in {space}")
        if total <= 0:
            raise ParamError("outcome weights must sum to a positive value")
        probs = tuple(weight / total for weight in w)
        return TrueMechanism(outcome_values=tuple(members), outcome_weights=probs)

    @staticmethod
    def from_tool(generator: HypothesisGenerator, tool: ToolSpec) -> "TrueMechanism":
        """Concrete plane: sample data from the generator, apply the tool."""
        return TrueMechanism(generator=generator, tool=tool)

    def produces_outputs(self) -> bool:
        return self.event_probability is None

    def output_space(self) -> OutcomeSpace | None:
        if self.tool is not None:
            return self.tool.declared_space
        return None

    def draw_output(self, rng):
        if self.outcome_values is not None:
            u = rng.random()
            acc = 0.0
            for value, p in zip(self.outcome_values, self.outcome_weights):
                acc += p
                if u < acc:
                    return value
            return self.outcome_values[-1]
        if self.generator is None or self.tool is None:
            raise ParamError("mechanism does not produce outputs; use bernoulli runs")
        try:
            data = self.generator.sample(rng)
        except GenError:
            raise
        except Exception as exc:
            raise GenError(f"generator failed: {exc}") from exc
        return apply_tool(self.tool, data)

    def event_probability_for(self, analyst: SimulatedAnalyst) -> float | None:
        """True probability of the analyst's as-expected event, if known."""
        if self.event_probability is not None:
            return self.event_probability
        if self.outcome_values is not None:
            p = sum(
                w
                for value, w in zip(self.outcome_values, self.outcome_weights)
                if analyst.expected_set.contains(value)
            )
            return p if 0.0 < p < 1.0 else None
        return None


@dataclass(frozen=True)
class SimAssertion:
    name: str
    passed: bool
    target: float | None = None
    actual: float | None = None
    tolerance: float | None = None

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "target": self.target,
            "actual": self.actual,
            "tolerance": self.tolerance,
        }


@dataclass(frozen=True)
class SimReport:
    kind: str
    n_runs: int
    seed: int | None
    stats: dict
    assertions: tuple[SimAssertion, ...]
    counts: dict = field(default_factory=dict)

    @property
    def all_passed(self) -> bool:
        return all(a.passed for a in self.assertions)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "n_runs": self.n_runs,
            "seed": self.seed,
            "stats": self.stats,
            "counts": self.counts,
            "assertions": [a.to_dict() for a in self.assertions],
            "all_passed": self.all_passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def render_text(self) -> str:
        lines = [f"simulation {self.kind}: runs={self.n_runs} seed={self.seed}"]
        for key, value in self.stats.items():
            if isinstance(value, float):
                lines.append(f"  {key} = {value:.6f}")
            else:
                lines.append(f"  {key} = {value}")
        for key, value in self.counts.items():
            lines.append(f"  count[{key}] = {value}")
        for a in self.assertions:
            mark = "PASS" if a.passed else "FAIL"
            detail = ""
            if a.target is not None and a.actual is not None:
                detail = f"  (actual {a.actual:.6f}, target {a.target:.6f}"
                if a.tolerance is not None:
                    detail += f", tol {a.tolerance:.6f}"
                detail += ")"
            lines.append(f"  [{mark}] {a.name}{detail}")
        lines.append(f"  => {'ALL PASS' if self.all_passed else 'FAILURES PRESENT'}")
        return "\n".join(lines)


def _check_space(analyst: SimulatedAnalyst, mechanism: TrueMechanism) -> None:
    mech_space = mechanism.output_space()
    if mech_space is not None and mech_space != analyst.expected_set.space:
        raise SpaceMismatch(
            f"mechanism outputs live in {mech_space}, analyst declared over "
            f"{analyst.expected_set.space}"
        )


def simulate_gain_distribution(
    mechanism: TrueMechanism,
    analyst: SimulatedAnalyst,
    n_runs: int,
    seed: int = 0,
    known_event_probability: float | None = None,
) -> SimReport:
    """Empirical distribution of the observed gain under a true mechanism.

    When the true event probability is known, the empirical mean is
    checked against its exact target (binary entropy when calibrated, the
    cross-entropy form otherwise) within three standard errors, and the
    per-step ledger divergence against cross-entropy minus entropy.
    """
    if n_runs < 1000:
        raise ParamError(f"n_runs must be at least 1000, got {n_runs}")
    _check_space(analyst, mechanism)

    base = analyst.base
    assessment = analyst.assessment
    g_if_expected = observed_gain(True, assessment, base)
    g_if_anomaly = observed_gain(False, assessment, base)

    sum_g = 0.0
    sum_g2 = 0.0
    n_expected = 0
    p_event = mechanism.event_probability
    for i in range(n_runs):
        rng = replicate_rng(seed, i, stream=3)
        if p_event is not None:
            event = rng.random() < p_event
        else:
            y = mechanism.draw_output(rng)
            verdict = classify(analyst.expected_set, analyst.expected_set.space, y)
            event = verdict is EventVerdict.AS_EXPECTED
        g = g_if_expected if event else g_if_anomaly
        n_expected += event
        sum_g += g
        sum_g2 += g * g

    mean_g = sum_g / n_runs
    var_g = max(0.0, (sum_g2 - n_runs * mean_g * mean_g) / (n_runs - 1))
    se_g = math.sqrt(var_g / n_runs)
    h_hat = expected_gain(assessment, base)

    p_true = mechanism.event_probability_for(analyst)
    if p_true is None:
        p_true = known_event_probability

    stats = {
        "mean_g": mean_g,
        "se_g": se_g,
        "h_expected": h_hat,
        "event_rate": n_expected / n_runs,
        "divergence_per_step": mean_g - h_hat,
    }
    assertions: list[SimAssertion] = []
    if p_true is not None:
        theory = cross_entropy_gain(p_true, assessment, base)
        stats["p_true"] = p_true
        stats["theory_mean_g"] = theory
        tol = 3.0 * se_g
        assertions.append(
            SimAssertion(
                "mean gain within 3 SE of its exact target",
                abs(mean_g - theory) <= tol,
                target=theory,
                actual=mean_g,
                tolerance=tol,
            )
        )
        assertions.append(
            SimAssertion(
                "per-step divergence within 3 SE of cross-entropy minus entropy",
                abs((mean_g - h_hat) - (theory - h_hat)) <= tol,
                target=theory - h_hat,
                actual=mean_g - h_hat,
                tolerance=tol,
            )
        )

    return SimReport(
        kind="gain_distribution",
        n_runs=n_runs,
        seed=seed,
        stats=stats,
        assertions=tuple(assertions),
    )


_SCENARIOS = (
    "a_expected_b_unexpected",
    "a_unexpected_b_expected",
    "both_expected",
    "both_unexpected",
)


def verify_two_analyst_scenarios(
    analyst_a: SimulatedAnalyst,
    analyst_b: SimulatedAnalyst,
    mechanism: TrueMechanism,
    n_runs: int,
    seed: int = 0,
) -> SimReport:
    """Replay one output stream past two analysts and compare their gains.

    Every run lands in exactly one of four scenarios (each analyst saw
    the output as expected or unexpected). With unequal assessments the
    two realized gains differ in every single run; equal gains can only
    come from equal assessments with same-side verdicts.
    """
    if n_runs < 1:
        raise ParamError(f"n_runs must be positive, got {n_runs}")
    if analyst_a.expected_set.space != analyst_b.expected_set.space:
        raise SpaceMismatch(
            "the two analysts must declare over one complete outcome set"
        )
    if not mechanism.produces_outputs():
        raise ParamError(
            "two-analyst comparison needs a mechanism that produces outputs "
            "(categorical or generator-backed)"
        )
    _check_space(analyst_a, mechanism)
    if analyst_a.base is not analyst_b.base:
        raise ParamError("both analysts must account in the same log base")

    space = analyst_a.expected_set.space
    counts = {name: 0 for name in _SCENARIOS}
    differ_runs = 0
    equal_runs = 0
    equal_gains_consistent = True

    p_a = analyst_a.assessment.p_expected
    p_b = analyst_b.assessment.p_expected

    for i in range(n_runs):
        rng = replicate_rng(seed, i, stream=4)
        y = mechanism.draw_output(rng)
        va = classify(analyst_a.expected_set, space, y)
        vb = classify(analyst_b.expected_set, space, y)
        a_exp = va is EventVerdict.AS_EXPECTED
        b_exp = vb is EventVerdict.AS_EXPECTED
        if a_exp and not b_exp:
            counts["a_expected_b_unexpected"] += 1
        elif not a_exp and b_exp:
            counts["a_unexpected_b_expected"] += 1
        elif a_exp and b_exp:
            counts["both_expected"] += 1
        else:
            counts["both_unexpected"] += 1

        g_a = observed_gain(a_exp, analyst_a.assessment, analyst_a.base)
        g_b = observed_gain(b_exp, analyst_b.assessment, analyst_b.base)
        if g_a == g_b:
            equal_runs += 1
            if p_a != p_b or a_exp != b_exp:
                equal_gains_consistent = False
        else:
            differ_runs += 1

    assertions = [
        SimAssertion(
            "scenario counts partition the runs exactly",
            sum(counts.values()) == n_runs,
            target=float(n_runs),
            actual=float(sum(counts.values())),
        ),
        SimAssertion(
            "equal gains arise only from equal assessments with same-side verdicts",
            equal_gains_consistent,
        ),
    ]
    if p_a != p_b:
        assertions.append(
            SimAssertion(
                "unequal assessments: gains differ in every run",
                differ_runs == n_runs,
                target=float(n_runs),
                actual=float(differ_runs),
            )
        )
    if analyst_a.expected_set.values == analyst_b.expected_set.values and p_a == p_b:
        assertions.append(
            SimAssertion(
                "identical declarations: gains equal in every run",
                equal_runs == n_runs,
                target=float(n_runs),
                actual=float(equal_runs),
            )
        )

    return SimReport(
        kind="two_analyst",
        n_runs=n_runs,
        seed=seed,
        stats={
            "p_a": p_a,
            "p_b": p_b,
            "runs_with_differing_gains": differ_runs,
            "runs_with_equal_gains": equal_runs,
        },
        assertions=tuple(assertions),
        counts=counts,
    )


def verify_structural_theorems(base: LogBase = LogBase.BITS) -> SimReport:
    """Deterministic grid checks of the gain structure.

    Certainty carries no information; both verdicts carry strictly
    positive finite gain; the anomaly gain strictly dominates; and the
    expected gain decomposes exactly over the two verdicts.
    """
    failures = 0
    checks = 0
    certainty_zero = gain_for_probability(1.0, base) == 0.0

    min_gain = math.inf
    max_decomp_err = 0.0
    for p in _GRID:
        assessment = ProbabilityAssessment(p)
        g_exp = observed_gain(True, assessment, base)
        g_anom = observed_gain(False, assessment, base)

        checks += 1
        positive_finite = (
            0.0 < g_exp < math.inf and 0.0 < g_anom < math.inf
        )
        failures += not positive_finite

        checks += 1
        dominance = anomaly_gain(assessment, base) > gain_for_probability(p, base)
        failures += not dominance

        checks += 1
        decomp_err = abs(
            expected_gain(assessment, base) - (p * g_exp + (1.0 - p) * g_anom)
        )
        failures += not decomp_err <= _IDENTITY_TOL

        min_gain = min(min_gain, g_exp, g_anom)
        max_decomp_err = max(max_decomp_err, decomp_err)

    assertions = (
        SimAssertion(
            "a certain event (p = 1) yields exactly zero gain",
            certainty_zero,
            target=0.0,
            actual=gain_for_probability(1.0, base),
        ),
        SimAssertion(
            f"all {checks} grid checks pass "
            "(positivity/finiteness, anomaly dominance, decomposition)",
            failures == 0,
            target=0.0,
            actual=float(failures),
        ),
    )
    return SimReport(
        kind="structural_theorems",
        n_runs=len(_GRID),
        seed=None,
        stats={
            "grid_points": len(_GRID),
            "grid_checks": checks,
            "failures": failures,
            "min_gain_on_grid": min_gain,
            "max_decomposition_error": max_decomp_err,
        },
        assertions=assertions,
    )


_ABSTRACT_SPACE_TEXT = "{0,1}"
_ABSTRACT_EXPECTED_TEXT = "{1}"


def _abstract_analyst(analyst_id: str, p: float, base: LogBase) -> SimulatedAnalyst:
    space = parse_set(_ABSTRACT_SPACE_TEXT)
    return SimulatedAnalyst(
        analyst_id,
        expected_set(parse_set(_ABSTRACT_EXPECTED_TEXT), space),
        ProbabilityAssessment(p),
        base,
    )


def _scenario_value(space: OutcomeSpace, key: str):
    if space.kind is Kind.INTEGER:
        return int(key)
    if space.kind is Kind.REAL:
        return float(key)
    return key


def _scenario_mechanism(spec: Mapping, space: OutcomeSpace | None) -> TrueMechanism:
    if "p_true" in spec:
        return TrueMechanism.bernoulli(spec["p_true"])
    if "weights" in spec:
        if space is None:
            raise ParamError("weighted outcomes need a 'space' in the scenario")
        weights = {
            _scenario_value(space, str(k)): v for k, v in dict(spec["weights"]).items()
        }
        return TrueMechanism.categorical(space, weights)
    if "generator" in spec and "tool" in spec:
        generator = HypothesisGenerator.from_dict(spec["generator"])
        tool_spec = dict(spec["tool"])
        tool = make_tool(str(tool_spec.get("tool_id")), tool_spec.get("params"))
        return TrueMechanism.from_tool(generator, tool)
    raise ParamError(
        "scenario needs one of: p_true, weights (+space), or generator+tool"
    )


def run_scenario(spec: Mapping) -> SimReport:
    """Run a simulation described by a plain JSON-able scenario spec.

    Kinds: ``theorems`` (no other fields); ``expectation`` with p, runs,
    seed and either p_true (abstract) or space/expect plus a mechanism;
    ``two_analyst`` with space, a{expect,p}, b{expect,p}, a mechanism,
    runs, seed.
    """
    spec = dict(spec)
    kind = str(spec.get("kind", ""))
    base = LogBase.parse(str(spec.get("base", "bits")))
    seed = int(spec.get("seed", 0))

    if kind == "theorems":
        return verify_structural_theorems(base)

    if kind == "expectation":
        runs = int(spec.get("runs", 100_000))
        p = spec.get("p")
        if p is None:
            raise ParamError("expectation scenario needs the assessment 'p'")
        if "space" in spec:
            space = parse_set(str(spec["space"]))
            analyst = SimulatedAnalyst(
                "analyst",
                expected_set(parse_set(str(spec.get("expect", ""))), space),
                ProbabilityAssessment(p),
                base,
            )
            mechanism = _scenario_mechanism(spec, space)
        else:
            analyst = _abstract_analyst("analyst", p, base)
            mechanism = _scenario_mechanism(spec, None)
        known = spec.get("known_event_probability")
        return simulate_gain_distribution(
            mechanism, analyst, runs, seed=seed, known_event_probability=known
        )

    if kind == "two_analyst":
        runs = int(spec.get("runs", 10_000))
        if "space" not in spec:
            raise ParamError("two_analyst scenario needs a 'space'")
        space = parse_set(str(spec["space"]))
        analysts = []
        for label in ("a", "b"):
            part = spec.get(label)
            if not isinstance(part, Mapping) or "expect" not in part or "p" not in part:
                raise ParamError(
                    f"two_analyst scenario needs '{label}' with expect and p"
                )
            analysts.append(
                SimulatedAnalyst(
                    label,
                    expected_set(parse_set(str(part["expect"])), space),
                    ProbabilityAssessment(part["p"]),
                    base,
                )
            )
        mechanism = _scenario_mechanism(spec, space)
        return verify_two_analyst_scenarios(
            analysts[0], analysts[1], mechanism, runs, seed=seed
        )

    raise ParamError(
        f"unknown scenario kind {kind!r}; use theorems, expectation, or two_analyst"
    )
